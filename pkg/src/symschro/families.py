"""Closed-form amplitude/phase solution families and the free-particle
energy relation.

Every constructor returns a :class:`ClosedFormSolution` carrying the
amplitude A(x), the phase S(x, t), their analytic derivatives, the potential
the pair solves, a default domain, and the residual systems the family is
expected to satisfy (see :mod:`symschro.residuals`).

Sign conventions follow the one-dimensional system

    A'' + eta*A*S'**2 + 2*mu*delta*A*Sdot - 2*mu*V*A = 0
    A*S'' + 2*A'*S' = 0

with ``eta = sigma**2 - delta**2``.  Families that exist in a "paper" (literal)
and a "corrected" form take a ``mode`` argument; the literal form is kept
so the verifier can show where it breaks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .algebra import MixedUnit
from .errors import (DegeneratePlaneError, DomainError, NoRealExponentError,
                     SingularAmplitudeError, ZeroAmplitudeError)
from .ode import quadrature
from .trig import cs_eval, erf

# residual system names (the verifier owns the formulas)
FULL_1D = "full_1d"
ETA_ZERO_1D = "eta_zero_1d"
AMPLITUDE_ONLY = "amplitude_only"
CUBIC_AMPLITUDE = "cubic_amplitude"
PHASE_ONLY = "phase_only"
PLANE_WAVE_CONSISTENCY = "plane_wave_consistency"
PHASE_RELATION = "phase_relation"

MODES = ("paper", "corrected")

DEFAULT_DOMAIN = (-3.0, 3.0)
SINGULAR_DOMAIN = (0.5, 3.0)

Evaluator = Callable[[float], float]
PhaseEvaluator = Callable[[float, float], float]


# ---------------------------------------------------------------- potentials

@dataclass(frozen=True)
class PotentialSpec:
    """A tagged potential V(x).

    kinds and coefficients:

    ``constant``               value
    ``inverse_square``         V0                      -> V0 / x**2
    ``polynomial2``            mu, V0, V1, V2          -> (V0 + V1 x + V2 x**2) / (2 mu)
    ``power_exponential_mix``  mu, n, kn, eta, B1, B   -> see :func:`power_exponential`
    ``linear``                 slope                   -> slope * x
    ``shifted``                shift (+ base)          -> base(x) + shift
    """

    kind: str
    coefficients: Mapping[str, float]
    base: Optional["PotentialSpec"] = None

    def __call__(self, x: float) -> float:
        k = self.coefficients
        if self.kind == "constant":
            return k["value"]
        if self.kind == "inverse_square":
            return k["V0"] / (x * x)
        if self.kind == "polynomial2":
            return (k["V0"] + k["V1"] * x + k["V2"] * x * x) / (2.0 * k["mu"])
        if self.kind == "power_exponential_mix":
            n, kn = k["n"], k["kn"]
            xn = x ** n
            x2n = x ** (2.0 * (n - 1.0))
            return ((n * n - 1.0) / 4.0 / (x * x)
                    + n * n * kn * kn * x2n
                    + k["eta"] * k["B1"] ** 2 / k["B"] ** 4 * x2n * math.exp(-4.0 * kn * xn)) / (2.0 * k["mu"])
        if self.kind == "linear":
            return k["slope"] * x
        if self.kind == "shifted":
            return self.base(x) + k["shift"]
        raise DomainError(f"unknown potential kind {self.kind!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "coefficients": {n: float(v) for n, v in self.coefficients.items()}}
        if self.base is not None:
            d["base"] = self.base.to_dict()
        return d


# ------------------------------------------------------------------ solutions

@dataclass(frozen=True)
class ClosedFormSolution:
    family: str
    params: Mapping[str, float]
    plane: MixedUnit
    mu: float
    potential: PotentialSpec
    domain: Tuple[float, float]
    A: Evaluator
    dA: Evaluator
    d2A: Evaluator
    S: PhaseEvaluator
    dS: PhaseEvaluator
    d2S: PhaseEvaluator
    dSdt: PhaseEvaluator
    systems: Tuple[str, ...]
    mode: Optional[str] = None
    # constant value of S' * A**2 when the phase is time independent
    phase_flux: Optional[float] = None
    base: Optional["ClosedFormSolution"] = field(default=None, repr=False)

    @property
    def eta(self) -> float:
        return self.plane.effective_eta

    def V(self, x: float) -> float:
        return self.potential(x)

    def to_dict(self) -> dict:
        doc = {
            "family": self.family,
            "params": {k: float(v) for k, v in self.params.items()},
            "plane": {"delta": float(self.plane.delta), "sigma": float(self.plane.sigma)},
            "domain": [float(self.domain[0]), float(self.domain[1])],
        }
        if self.mode is not None:
            doc["mode"] = self.mode
        if self.base is not None:
            doc["base"] = self.base.to_dict()
        return doc


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _domain(domain, default) -> Tuple[float, float]:
    lo, hi = (default if domain is None else domain)
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise DomainError(f"domain must satisfy lo < hi, got [{lo}, {hi}]")
    return lo, hi


def _positive(name: str, value: float) -> float:
    if not value > 0.0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return float(value)


def _zero(x, t=0.0):
    return 0.0


def _smooth_integral(f: Evaluator, a: float, b: float, panels: int = 16, order: int = 24) -> float:
    """Composite Gauss-Legendre integral.

    Used inside phase evaluators that have no closed form: unlike an adaptive
    rule it is a smooth function of the endpoints, so finite differences of
    the resulting phase stay meaningful.
    """
    if a == b:
        return 0.0
    nodes, weights = _gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        total += half * sum(w * f(mid + half * z) for z, w in zip(nodes, weights))
    return float(total)


_GL_CACHE: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _quadrature_phase(A: Evaluator, B1: float, B2: float, anchor: float):
    """S = B1 * int_anchor^x A**-2 + B2 and its x-derivatives."""
    def S(x, t=0.0):
        if B1 == 0.0:
            return B2
        return B2 + B1 * _smooth_integral(lambda xi: A(xi) ** -2, anchor, x)

    def dS(x, t=0.0):
        return B1 / A(x) ** 2

    return S, dS


def _flux_d2S(A: Evaluator, dA: Evaluator, flux: float) -> PhaseEvaluator:
    # S' = flux / A**2  =>  S'' = -2 flux A' / A**3
    return lambda x, t=0.0: -2.0 * flux * dA(x) / A(x) ** 3


def _anchor(domain) -> float:
    lo, hi = domain
    return 0.0 if lo < 0.0 < hi else lo


# ------------------------------------------------------------ energy relation

class EnergyRelation(NamedTuple):
    E: float
    branch: str
    coefficient: float


def energy_relation(delta: float, sigma: float, mu: float, p: float) -> EnergyRelation:
    """E = ((delta**2 - sigma**2)/delta) * p**2 / (2 mu), with its branch.

    Branches: ``zero-energy`` (eta = 0), ``classical`` (coefficient 1),
    ``phantom`` (E < 0 with p != 0) and ``nonclassical`` otherwise.  A
    coefficient within rounding of 1 (or an eta within rounding of 0) is
    snapped so the classical and zero-energy values come out exact.
    """
    if delta == 0.0:
        raise DegeneratePlaneError(
            "delta = 0: the left side delta*E*psi vanishes, so E is not fixed by p")
    _positive("mu", mu)
    unit = MixedUnit(delta, sigma)
    kinetic = p * p / (2.0 * mu)
    if unit.is_degenerate:
        return EnergyRelation(0.0, "zero-energy", 0.0)
    coefficient = (delta * delta - sigma * sigma) / delta
    if abs(coefficient - 1.0) <= 1e-14 * (delta * delta + sigma * sigma + 1.0):
        return EnergyRelation(kinetic, "classical", 1.0)
    E = coefficient * kinetic
    if E < 0.0:
        branch = "phantom"
    else:
        branch = "nonclassical"
        E = abs(E)  # drop -0.0 when p = 0
    return EnergyRelation(E, branch, coefficient)


# ------------------------------------------------------------------ families

def free_particle(delta: float, sigma: float, mu: float, p: float, A0: float = 1.0,
                  mode: str = "corrected", domain=None) -> ClosedFormSolution:
    """Constant amplitude plane wave with E from :func:`energy_relation`.

    ``mode="paper"`` uses the literal S = p x - E t alongside the energy
    relation; with the 1-D system's ``+2 mu delta A Sdot`` term that phase
    leaves the residual ``2 eta p**2 A0``.  ``mode="corrected"`` uses
    S = p x + E t, the sign under which the same E solves the system (and
    the k = 0 limit of :func:`linear_planewave`).
    """
    _check_mode(mode)
    _positive("A0", A0)
    E = energy_relation(delta, sigma, mu, p).E
    tsign = -1.0 if mode == "paper" else 1.0
    A0 = float(A0)
    return ClosedFormSolution(
        family="free_particle",
        params={"mu": mu, "p": p, "A0": A0},
        plane=MixedUnit(delta, sigma), mu=float(mu),
        potential=PotentialSpec("constant", {"value": 0.0}),
        domain=_domain(domain, DEFAULT_DOMAIN),
        A=lambda x: A0, dA=lambda x: 0.0, d2A=lambda x: 0.0,
        S=lambda x, t=0.0: p * x + tsign * E * t,
        dS=lambda x, t=0.0: p,
        d2S=_zero,
        dSdt=lambda x, t=0.0: tsign * E,
        systems=(FULL_1D, PHASE_ONLY),
        mode=mode,
        phase_flux=None,
    )


def constant_potential(eta_sign: int, V0: float, C1: float, C2: float, B1: float, B2: float,
                       mu: float, mode: str = "corrected", delta: float = 1.0,
                       sigma: float = 1.0, domain=None) -> ClosedFormSolution:
    """V = -eta_sign * V0 with k = sqrt(2 mu V0).

    The cosine-type factor is the generalized pair with series signature
    ``-eta_sign``, the one whose second derivative is ``-eta_sign k**2``
    times itself (cos for an attractive well, cosh for a barrier).

    corrected: A = C1 c(kx) + C2 s(kx), the general solution of A'' = 2 mu V A.
    paper:     A = C1 c(kx) + C2, which leaves the constant residual
               eta_sign * k**2 * C2.
    With C2 = 0 both readings coincide and the phase is
    S = B1 / (C1**2 k) * s(kx)/c(kx) + B2.
    """
    _check_mode(mode)
    if eta_sign not in (1, -1):
        raise DomainError(f"eta_sign must be +1 or -1, got {eta_sign!r}")
    _positive("V0", V0)
    _positive("mu", mu)
    if C1 == 0.0 and C2 == 0.0:
        raise ZeroAmplitudeError("C1 = C2 = 0 gives the zero amplitude")
    eta_sign = int(eta_sign)
    dom = _domain(domain, DEFAULT_DOMAIN)
    k = math.sqrt(2.0 * mu * V0)
    sig = -float(eta_sign)  # series signature of the cosine-type factor

    def pair(x):
        return cs_eval(k * x, sig, "closed")

    if mode == "corrected":
        def A(x):
            cs = pair(x)
            return C1 * cs.c + C2 * cs.s

        def dA(x):
            cs = pair(x)
            return k * (C1 * sig * cs.s + C2 * cs.c)

        def d2A(x):
            return sig * k * k * A(x)
    else:
        def A(x):
            return C1 * pair(x).c + C2

        def dA(x):
            return k * C1 * sig * pair(x).s

        def d2A(x):
            return sig * k * k * C1 * pair(x).c

    if C2 == 0.0:
        if C1 == 0.0:
            raise ZeroAmplitudeError("C1 = 0 with C2 = 0")

        def S(x, t=0.0):
            cs = pair(x)
            return B1 / (C1 * C1 * k) * cs.s / cs.c + B2

        def dS(x, t=0.0):
            return B1 / (C1 * pair(x).c) ** 2
    else:
        S, dS = _quadrature_phase(A, B1, B2, _anchor(dom))

    return ClosedFormSolution(
        family="constant_potential",
        params={"eta_sign": float(eta_sign), "V0": V0, "C1": C1, "C2": C2,
                "B1": B1, "B2": B2, "mu": mu},
        plane=MixedUnit(delta, sigma), mu=float(mu),
        potential=PotentialSpec("constant", {"value": -eta_sign * V0}),
        domain=dom,
        A=A, dA=dA, d2A=d2A,
        S=S, dS=dS, d2S=_flux_d2S(A, dA, B1), dSdt=_zero,
        systems=(AMPLITUDE_ONLY, PHASE_ONLY, PHASE_RELATION),
        mode=mode,
        phase_flux=float(B1),
    )


def inverse_square_exponents(V0: float, mu: float) -> Tuple[float, float]:
    """Roots (n+, n-) of n**2 - n - 2 mu V0 = 0."""
    _positive("mu", mu)
    disc = 1.0 + 8.0 * mu * V0
    if disc < -1e-14:
        raise NoRealExponentError(
            f"1 + 8 mu V0 = {disc:.6g} < 0: V0 must exceed -1/(8 mu) for a real exponent")
    root = math.sqrt(max(disc, 0.0))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def inverse_square(V0: float, mu: float, branch: int, C: float, B1: float, B2: float,
                   delta: float = 1.0, sigma: float = 1.0, domain=None) -> ClosedFormSolution:
    """V = V0/x**2 with A = C x**n, S = B1 x**(1-2n) + B2.

    The phase absorbs the 1/(1-2n) factor into B1, so ``S' A**2`` equals
    ``B1 (1 - 2n) C**2`` rather than B1.  At the double root n = 1/2
    (V0 = -1/(8 mu)) the power phase degenerates and S = B1 ln x + B2 is used.
    """
    if branch not in (1, -1):
        raise DomainError(f"branch must be +1 or -1, got {branch!r}")
    _positive("C", C)
    n_plus, n_minus = inverse_square_exponents(V0, mu)
    n = n_plus if branch == 1 else n_minus
    dom = _domain(domain, SINGULAR_DOMAIN)
    if dom[0] <= 0.0:
        raise DomainError("inverse-square solutions need a domain with x > 0")
    logarithmic = abs(n - 0.5) < 1e-7

    def A(x):
        return C * x ** n

    def dA(x):
        return n * C * x ** (n - 1.0)

    def d2A(x):
        return n * (n - 1.0) * C * x ** (n - 2.0)

    if logarithmic:
        flux = B1 * C * C

        def S(x, t=0.0):
            return B1 * math.log(x) + B2

        def dS(x, t=0.0):
            return B1 / x

        def d2S(x, t=0.0):
            return -B1 / (x * x)
    else:
        m = 1.0 - 2.0 * n
        flux = B1 * m * C * C

        def S(x, t=0.0):
            return B1 * x ** m + B2

        def dS(x, t=0.0):
            return B1 * m * x ** (m - 1.0)

        def d2S(x, t=0.0):
            return B1 * m * (m - 1.0) * x ** (m - 2.0)

    return ClosedFormSolution(
        family="inverse_square",
        params={"V0": V0, "mu": mu, "branch": float(branch), "C": C, "B1": B1, "B2": B2},
        plane=MixedUnit(delta, sigma), mu=float(mu),
        potential=PotentialSpec("inverse_square", {"V0": V0}),
        domain=dom,
        A=A, dA=dA, d2A=d2A, S=S, dS=dS, d2S=d2S, dSdt=_zero,
        systems=(AMPLITUDE_ONLY, PHASE_ONLY, PHASE_RELATION),
        mode=None,
        phase_flux=float(flux),
    )


class QuadraticCoefficients(NamedTuple):
    C2: float
    C1: float
    V0: float


def quadratic_coefficients(V1: float, V2: float, sign: int) -> QuadraticCoefficients:
    """Match e**f, f = C2 x**2 + C1 x + C0, to V = (V0 + V1 x + V2 x**2)/(2 mu)."""
    if not V2 > 0.0:
        raise DomainError(f"quadratic potential needs V2 > 0, got {V2!r}")
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    r = math.sqrt(V2)
    return QuadraticCoefficients(sign * 0.5 * r, sign * V1 / (2.0 * r), V1 * V1 / (4.0 * V2) + sign * r)


def quadratic_potential(V1: float, V2: float, sign: int, C0: float, B1: float, B2: float,
                        mu: float, mode: str = "corrected", delta: float = 1.0,
                        sigma: float = 1.0, domain=None) -> ClosedFormSolution:
    """A = exp(C2 x**2 + C1 x + C0) for V = (V0 + V1 x + V2 x**2)/(2 mu).

    For sign = +1 (C2 > 0) the phase is the erf closed form

        S = +- sqrt(pi) B1 / (2 sqrt(2 C2)) * exp(C1**2/(2 C2) - 2 C0)
              * erf(sqrt(2 C2) (x + C1/(2 C2))) + B2

    with ``+`` in corrected mode (forced by S' = B1 A**-2) and the literal
    ``-`` in paper mode.  For sign = -1 the phase falls back to quadrature.
    """
    _check_mode(mode)
    _positive("mu", mu)
    C2, C1, V0 = quadratic_coefficients(V1, V2, sign)
    dom = _domain(domain, DEFAULT_DOMAIN)

    def f(x):
        return (C2 * x + C1) * x + C0

    def fp(x):
        return 2.0 * C2 * x + C1

    def A(x):
        return math.exp(f(x))

    def dA(x):
        return fp(x) * A(x)

    def d2A(x):
        return (2.0 * C2 + fp(x) ** 2) * A(x)

    if sign == 1:
        a = 2.0 * C2
        shift = C1 / a
        phase_sign = 1.0 if mode == "corrected" else -1.0
        pre = phase_sign * math.sqrt(math.pi) * B1 / (2.0 * math.sqrt(a)) * math.exp(C1 * C1 / a - 2.0 * C0)

        def S(x, t=0.0):
            return pre * erf(math.sqrt(a) * (x + shift)) + B2

        def dS(x, t=0.0):
            return phase_sign * B1 * math.exp(-2.0 * f(x))
        flux = phase_sign * B1
    else:
        S, dS = _quadrature_phase(A, B1, B2, _anchor(dom))
        flux = B1

    return ClosedFormSolution(
        family="quadratic_potential",
        params={"V1": V1, "V2": V2, "sign": float(sign), "C0": C0, "B1": B1, "B2": B2, "mu": mu},
        plane=MixedUnit(delta, sigma), mu=float(mu),
        potential=PotentialSpec("polynomial2", {"mu": mu, "V0": V0, "V1": V1, "V2": V2}),
        domain=dom,
        A=A, dA=dA, d2A=d2A,
        S=S, dS=dS, d2S=_flux_d2S(A, dA, flux), dSdt=_zero,
        systems=(AMPLITUDE_ONLY, PHASE_ONLY, PHASE_RELATION),
        mode=mode,
        phase_flux=float(B1),
    )


def power_exponential(n: float, kn: float, B: float, B1: float, B2: float,
                      delta: float, sigma: float, mu: float, domain=None) -> ClosedFormSolution:
    """A = B x**(-(n-1)/2) exp(kn x**n), S = -B1/(2 n kn B**2) exp(-2 kn x**n) + B2.

    Solves A'' + eta B1**2 A**-3 - 2 mu V A = 0 for

        V = [(n**2-1)/4 x**-2 + n**2 kn**2 x**(2(n-1))
             + eta B1**2 B**-4 x**(2(n-1)) exp(-4 kn x**n)] / (2 mu)
    """
    if n == 0.0:
        raise DomainError("n must be nonzero")
    if kn == 0.0:
        raise DomainError("kn must be nonzero")
    _positive("B", B)
    _positive("mu", mu)
    plane = MixedUnit(delta, sigma)
    dom = _domain(domain, SINGULAR_DOMAIN)
    if dom[0] <= 0.0:
        raise DomainError("power-exponential solutions need a domain with x > 0")
    m = -(n - 1.0) / 2.0

    def A(x):
        return B * x ** m * math.exp(kn * x ** n)

    def dlogA(x):
        return m / x + n * kn * x ** (n - 1.0)

    def dA(x):
        return A(x) * dlogA(x)

    def d2A(x):
        return A(x) * ((n * n - 1.0) / 4.0 / (x * x) + n * n * kn * kn * x ** (2.0 * (n - 1.0)))

    def S(x, t=0.0):
        return -B1 / (2.0 * n * kn * B * B) * math.exp(-2.0 * kn * x ** n) + B2

    def dS(x, t=0.0):
        return B1 / (B * B) * x ** (n - 1.0) * math.exp(-2.0 * kn * x ** n)

    return ClosedFormSolution(
        family="power_exponential",
        params={"n": n, "kn": kn, "B": B, "B1": B1, "B2": B2, "mu": mu},
        plane=plane, mu=float(mu),
        potential=PotentialSpec("power_exponential_mix",
                                {"mu": mu, "n": n, "kn": kn, "eta": plane.effective_eta, "B1": B1, "B": B}),
        domain=dom,
        A=A, dA=dA, d2A=d2A,
        S=S, dS=dS, d2S=_flux_d2S(A, dA, B1), dSdt=_zero,
        systems=(CUBIC_AMPLITUDE, PHASE_ONLY, PHASE_RELATION, FULL_1D),
        mode=None,
        phase_flux=float(B1),
    )


def exponential_coefficient(sol: ClosedFormSolution) -> float:
    """Coefficient of the exp(-4 kn x) term of an n = 1 power-exponential potential.

    Equals eta B1**2 / (2 mu B**4); for eta = 1 it can never be negative.
    """
    if sol.family != "power_exponential" or sol.params["n"] != 1.0:
        raise DomainError("only defined for the n = 1 power-exponential family")
    p = sol.params
    return sol.eta * p["B1"] ** 2 / (2.0 * p["mu"] * p["B"] ** 4)


SHIFTABLE = ("constant_potential", "inverse_square", "quadratic_potential")


def energy_shifted(base: ClosedFormSolution, E: float, delta: float, sigma: Optional[float] = None,
                   mode: str = "corrected", domain=None) -> ClosedFormSolution:
    """Reuse a time-independent amplitude with S = E t.

    With Sdot = E the amplitude equation becomes A'' - 2 mu (V - delta E) A = 0,
    so an amplitude solving the base potential W solves V = W + delta E
    (corrected).  Paper mode keeps the literal V = W - delta E.
    """
    _check_mode(mode)
    if base.family not in SHIFTABLE:
        raise DomainError(f"energy_shifted needs one of {SHIFTABLE}, got {base.family!r}")
    if sigma is None:
        sigma = delta
    shift = (1.0 if mode == "corrected" else -1.0) * delta * E
    E = float(E)
    return ClosedFormSolution(
        family="energy_shifted",
        params={"E": E},
        plane=MixedUnit(delta, sigma), mu=base.mu,
        potential=PotentialSpec("shifted", {"shift": shift}, base=base.potential),
        domain=_domain(domain, base.domain),
        A=base.A, dA=base.dA, d2A=base.d2A,
        S=lambda x, t=0.0: E * t,
        dS=_zero, d2S=_zero,
        dSdt=lambda x, t=0.0: E,
        systems=(ETA_ZERO_1D, FULL_1D, PHASE_ONLY),
        mode=mode,
        phase_flux=None,
        base=base,
    )


def linear_planewave(p0: float, k: float, E: float, delta: float, sigma: float, mu: float,
                     A0: float = 1.0, domain=None) -> ClosedFormSolution:
    """Constant A with S = (p0 + k t) x + E t in the linear potential V = delta k x.

    Substituting gives the scalar relation
    ``eta p(t)**2 + 2 mu delta (k x + E) - 2 mu V = eta p(t)**2 + 2 mu delta E``:
    the x-terms cancel exactly but, with E held constant, what remains
    varies with t through p(t) = p0 + k t (see :func:`planewave_residual`).
    """
    if delta == 0.0:
        raise DegeneratePlaneError("linear plane wave needs delta != 0")
    _positive("mu", mu)
    _positive("A0", A0)
    A0 = float(A0)
    return ClosedFormSolution(
        family="linear_planewave",
        params={"p0": p0, "k": k, "E": E, "mu": mu, "A0": A0},
        plane=MixedUnit(delta, sigma), mu=float(mu),
        potential=PotentialSpec("linear", {"slope": delta * k}),
        domain=_domain(domain, DEFAULT_DOMAIN),
        A=lambda x: A0, dA=lambda x: 0.0, d2A=lambda x: 0.0,
        S=lambda x, t=0.0: (p0 + k * t) * x + E * t,
        dS=lambda x, t=0.0: p0 + k * t,
        d2S=_zero,
        dSdt=lambda x, t=0.0: k * x + E,
        systems=(PLANE_WAVE_CONSISTENCY, PHASE_ONLY),
        mode=None,
        phase_flux=None,
    )


def planewave_momentum(sol: ClosedFormSolution, t: float) -> float:
    return sol.params["p0"] + sol.params["k"] * t


def planewave_residual(sol: ClosedFormSolution, t: float) -> float:
    """r(t) = 2 mu delta E + eta p(t)**2, what is left once the x-terms cancel."""
    p = planewave_momentum(sol, t)
    return 2.0 * sol.mu * sol.plane.delta * sol.params["E"] + sol.eta * p * p


def planewave_energy(sol: ClosedFormSolution, t: float) -> float:
    """The E that would zero r(t); at k = 0 this is the free-particle relation."""
    return energy_relation(sol.plane.delta, sol.plane.sigma, sol.mu, planewave_momentum(sol, t)).E


# ---------------------------------------------------------- phase quadrature

def phase_from_amplitude(A: Evaluator, B1: float, B2: float, x0: float, x: float,
                         abs_tol: float = 1e-11, samples: int = 65) -> float:
    """S(x) = B1 * int_{x0}^{x} A**-2 + B2 by adaptive Simpson quadrature."""
    if B1 == 0.0 or x == x0:
        return float(B2)
    values = [abs(A(x0 + (x - x0) * j / (samples - 1))) for j in range(samples)]
    peak = max(values)
    if not peak > 0.0 or min(values) <= 1e-10 * peak:
        raise SingularAmplitudeError(
            f"amplitude nearly vanishes on [{min(x0, x)}, {max(x0, x)}]; A**-2 is singular")
    integral = quadrature(lambda xi: A(xi) ** -2, x0, x,
                          abs_tol=abs_tol / max(abs(B1), 1.0), rel_tol=1e-14)
    return B2 + B1 * integral


# ----------------------------------------------------------- serialization

def _pop_plane(params: dict, plane: Optional[Mapping[str, float]], default=(1.0, 1.0)):
    delta = params.pop("delta", None)
    sigma = params.pop("sigma", None)
    if plane is not None:
        delta = plane.get("delta", delta)
        sigma = plane.get("sigma", sigma)
    return (default[0] if delta is None else float(delta),
            default[1] if sigma is None else float(sigma))


def _int_flag(params: dict, name: str):
    if name in params:
        params[name] = int(params[name])


FAMILIES = ("free_particle", "constant_potential", "inverse_square", "quadratic_potential",
            "power_exponential", "energy_shifted", "linear_planewave")


def build_solution(doc: Mapping) -> ClosedFormSolution:
    """Construct a family from its JSON document.

    ``{"family": ..., "params": {...}, "plane": {"delta": .., "sigma": ..},
    "domain": [lo, hi], "mode": ..}``; energy_shifted additionally carries
    its base document under ``"base"``.
    """
    family = doc.get("family")
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    params = {k: float(v) for k, v in dict(doc.get("params", {})).items()}
    plane = doc.get("plane")
    domain = doc.get("domain")
    mode = doc.get("mode")
    extra = {} if mode is None else {"mode": mode}
    try:
        if family == "energy_shifted":
            if "base" not in doc:
                raise DomainError("energy_shifted needs a 'base' family document")
            base = build_solution(doc["base"])
            delta, sigma = _pop_plane(params, plane, default=(base.plane.delta, None))
            return energy_shifted(base, delta=delta, sigma=sigma, domain=domain, **params, **extra)
        delta, sigma = _pop_plane(params, plane)
        if family in ("free_particle", "power_exponential", "linear_planewave"):
            if plane is None and ("delta" not in doc.get("params", {})):
                raise DomainError(f"{family} needs a plane (delta, sigma)")
        _int_flag(params, "eta_sign")
        _int_flag(params, "branch")
        _int_flag(params, "sign")
        ctor = globals()[family]
        return ctor(delta=delta, sigma=sigma, domain=domain, **params, **extra)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {family}: {exc}") from None
