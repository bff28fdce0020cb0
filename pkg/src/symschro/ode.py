"""Numeric oracles: adaptive Simpson quadrature and an embedded Runge-Kutta
integrator for the amplitude equations.

The integrator solves

    A'' = 2*mu*V(x)*A                          (amplitude_only)
    A'' = 2*mu*V(x)*A - eta*B1**2 * A**-3      (cubic_amplitude)
    A'' = 2*mu*(V(x) - delta*Sdot)*A           (eta_zero, constant Sdot)

as a first-order system in (A, A') with the Dormand-Prince 5(4) pair.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import DomainError, IncompatibleSystemError, IntegrationError, QuadratureError

AMPLITUDE_ONLY = "amplitude_only"
CUBIC_AMPLITUDE = "cubic_amplitude"
ETA_ZERO = "eta_zero_1d"
IVP_EQUATIONS = (AMPLITUDE_ONLY, CUBIC_AMPLITUDE, ETA_ZERO)

# the step cap keeps cubic Hermite dense output near 1e-10 on steep amplitudes
DEFAULT_STEPS = 1024


def quadrature(f: Callable[[float], float], a: float, b: float,
               abs_tol: float = 1e-11, max_depth: int = 50, rel_tol: float = 0.0) -> float:
    """Adaptive Simpson integral of f over [a, b] with total error <= abs_tol.

    Each panel is accepted once ``|S_left + S_right - S_whole| < 15*tol_panel``
    where ``tol_panel`` is the target times the panel's share of ``|b - a|``;
    the accepted value carries the Richardson correction.  A nonzero
    ``rel_tol`` relaxes the target to ``max(abs_tol, rel_tol*|first estimate|)``
    for integrals too large for an absolute target to be reachable.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    length = b - a

    def sample(x):
        try:
            y = f(x)
        except (ZeroDivisionError, OverflowError) as exc:
            raise QuadratureError(f"integrand failed at x={x!r}: {exc}") from None
        if not math.isfinite(y):
            raise QuadratureError(f"non-finite integrand {y!r} at x={x!r}")
        return y

    fa, fm, fb = sample(a), sample(0.5 * (a + b)), sample(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    target = max(abs_tol, rel_tol * abs(whole))
    stack = [(a, b, fa, fm, fb, whole, 0)]
    parts: List[float] = []
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = sample(lm), sample(rm)
        left = (mid - lo) * (flo + 4.0 * flm + fmid) / 6.0
        right = (hi - mid) * (fmid + 4.0 * frm + fhi) / 6.0
        err = left + right - est
        tol = target * (hi - lo) / length
        if abs(err) < 15.0 * tol:
            parts.append(left + right + err / 15.0)
            continue
        if depth >= max_depth:
            raise QuadratureError(f"max depth {max_depth} exceeded near x={mid!r}")
        stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return sign * math.fsum(parts)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass(frozen=True)
class IvpSpec:
    equation: str
    V: Callable[[float], float]
    x0: float
    x1: float
    A0: float
    A0_prime: float
    mu: float = 1.0
    eta: float = 0.0
    B1: float = 0.0
    delta: float = 0.0
    Sdot: float = 0.0
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: Optional[float] = None

    def __post_init__(self):
        if self.equation not in IVP_EQUATIONS:
            raise DomainError(f"unsupported equation {self.equation!r}; choose from {IVP_EQUATIONS}")
        if self.equation == CUBIC_AMPLITUDE and not self.A0 > 0.0:
            raise DomainError("cubic amplitude equation needs A0 > 0")
        if not self.x1 > self.x0:
            raise DomainError(f"span must satisfy x0 < x1, got [{self.x0}, {self.x1}]")
        if self.mu <= 0.0:
            raise DomainError("mu must be positive")


@dataclass
class NumericSolution:
    xs: List[float]
    A: List[float]
    dA: List[float]
    steps: int = 0
    rejected: int = 0

    def nodes(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.xs, self.A, self.dA))

    def __call__(self, x: float) -> float:
        return self.evaluate(x)[0]

    def evaluate(self, x: float) -> Tuple[float, float]:
        """Cubic Hermite interpolation of (A, A') between nodes."""
        xs = self.xs
        if x < xs[0] or x > xs[-1]:
            raise DomainError(f"x={x!r} outside integrated span [{xs[0]}, {xs[-1]}]")
        j = bisect.bisect_right(xs, x) - 1
        if j >= len(xs) - 1:
            return self.A[-1], self.dA[-1]
        if x == xs[j]:
            return self.A[j], self.dA[j]
        h = xs[j + 1] - xs[j]
        t = (x - xs[j]) / h
        y0, y1 = self.A[j], self.A[j + 1]
        m0, m1 = self.dA[j] * h, self.dA[j + 1] * h
        t2, t3 = t * t, t * t * t
        value = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0
                 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1)
        slope = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0
                 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h
        return value, slope

    def to_csv(self) -> str:
        from .formatting import fmt

        lines = ["x,A,Aprime"]
        lines += [f"{fmt(x)},{fmt(a)},{fmt(d)}" for x, a, d in self.nodes()]
        return "\n".join(lines) + "\n"


def _rhs(spec: IvpSpec) -> Callable[[float, float, float], Tuple[float, float]]:
    two_mu = 2.0 * spec.mu
    floor = 1e-10 * spec.A0

    def potential(x):
        v = spec.V(x)
        if not math.isfinite(v):
            raise IntegrationError(f"potential is not finite at x={x!r}")
        return v

    if spec.equation == AMPLITUDE_ONLY:
        def f(x, a, da):
            return da, two_mu * potential(x) * a
    elif spec.equation == ETA_ZERO:
        shift = spec.delta * spec.Sdot

        def f(x, a, da):
            return da, two_mu * (potential(x) - shift) * a
    else:
        coupling = spec.eta * spec.B1 * spec.B1

        def f(x, a, da):
            if a < floor:
                raise IntegrationError(f"amplitude collapsed to {a!r} at x={x!r} (A**-3 singular)")
            return da, two_mu * potential(x) * a - coupling / (a * a * a)
    return f


def integrate_amplitude(spec: IvpSpec, max_steps: int = 200000) -> NumericSolution:
    """Adaptive Dormand-Prince integration of an amplitude IVP over [x0, x1]."""
    f = _rhs(spec)
    x, y0, y1 = spec.x0, spec.A0, spec.A0_prime
    span = spec.x1 - spec.x0
    max_step = spec.max_step if spec.max_step is not None else span / DEFAULT_STEPS
    h = min(max_step, span / 100.0)
    k1 = f(x, y0, y1)
    sol = NumericSolution([x], [y0], [y1])
    min_step = 1e-14 * max(1.0, abs(spec.x0), abs(spec.x1))

    while x < spec.x1:
        if sol.steps + sol.rejected > max_steps:
            raise IntegrationError(f"exceeded {max_steps} steps before reaching x1")
        h = min(h, spec.x1 - x)
        ks = [k1]
        for i in range(1, 7):
            a_row = _A[i]
            ya = y0 + h * sum(a * k[0] for a, k in zip(a_row, ks))
            yb = y1 + h * sum(a * k[1] for a, k in zip(a_row, ks))
            ks.append(f(x + _C[i] * h, ya, yb))
        n0 = y0 + h * sum(b * k[0] for b, k in zip(_B5, ks))
        n1 = y1 + h * sum(b * k[1] for b, k in zip(_B5, ks))
        e0 = h * sum(e * k[0] for e, k in zip(_E, ks))
        e1 = h * sum(e * k[1] for e, k in zip(_E, ks))
        sc0 = spec.abs_tol + spec.rel_tol * max(abs(y0), abs(n0))
        sc1 = spec.abs_tol + spec.rel_tol * max(abs(y1), abs(n1))
        err = math.sqrt(0.5 * ((e0 / sc0) ** 2 + (e1 / sc1) ** 2))
        if not math.isfinite(err):
            raise IntegrationError(f"non-finite error estimate at x={x!r}")
        if err <= 1.0:
            x += h
            if spec.x1 - x <= min_step:
                x = spec.x1
            y0, y1 = n0, n1
            k1 = ks[6]  # FSAL
            sol.xs.append(x)
            sol.A.append(y0)
            sol.dA.append(y1)
            sol.steps += 1
            factor = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        else:
            sol.rejected += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h = min(max_step, h * factor)
        if h < min_step:
            raise IntegrationError(f"step size underflow at x={x!r}")
    return sol


def ivp_from_solution(sol, span: Optional[Tuple[float, float]] = None,
                      rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> IvpSpec:
    """Seed an IvpSpec with the value and slope of a closed form at the span start.

    The equation is picked from the systems the family declares: the cubic
    equation when it is declared, then the eta = 0 equation (constant Sdot
    read from the family), then the plain amplitude equation.
    """
    x0, x1 = sol.domain if span is None else span
    lo, hi = sol.domain
    if x0 < lo or x1 > hi:
        raise DomainError(f"span [{x0}, {x1}] leaves the solution domain [{lo}, {hi}]")
    common = dict(V=sol.potential, x0=float(x0), x1=float(x1), A0=sol.A(x0), A0_prime=sol.dA(x0),
                  mu=sol.mu, rel_tol=rel_tol, abs_tol=abs_tol)
    if CUBIC_AMPLITUDE in sol.systems:
        return IvpSpec(CUBIC_AMPLITUDE, eta=sol.eta, B1=sol.phase_flux, **common)
    if ETA_ZERO in sol.systems:
        return IvpSpec(ETA_ZERO, delta=sol.plane.delta, Sdot=sol.dSdt(x0, 0.0), **common)
    if AMPLITUDE_ONLY in sol.systems:
        return IvpSpec(AMPLITUDE_ONLY, **common)
    raise IncompatibleSystemError(f"{sol.family} declares no amplitude equation to integrate")


def _reflected(spec: IvpSpec) -> IvpSpec:
    # B(y) = A(-y) solves the same equation with V(-y); the slope flips sign
    V = spec.V
    return replace(spec, V=lambda y: V(-y), x0=-spec.x1, x1=-spec.x0, A0_prime=-spec.A0_prime)


def integrate_outward(spec: IvpSpec, seed: float, max_steps: int = 200000) -> NumericSolution:
    """Integrate from an interior seed point towards both ends of [x0, x1].

    ``spec.A0`` and ``spec.A0_prime`` are the data at ``seed``.  Integrating
    into a decaying amplitude lets the growing companion solution swamp the
    result, so the usual remedy is to start where |A| is smallest and march
    outward, in the direction the amplitude grows.
    """
    if not spec.x0 <= seed <= spec.x1:
        raise DomainError(f"seed {seed!r} outside span [{spec.x0}, {spec.x1}]")
    span = spec.x1 - spec.x0
    max_step = spec.max_step if spec.max_step is not None else span / DEFAULT_STEPS
    xs: List[float] = []
    A: List[float] = []
    dA: List[float] = []
    steps = rejected = 0
    if seed > spec.x0:
        left = integrate_amplitude(_reflected(replace(spec, x1=seed, max_step=max_step)), max_steps)
        xs += [-x for x in reversed(left.xs)]
        A += list(reversed(left.A))
        dA += [-d for d in reversed(left.dA)]
        steps, rejected = left.steps, left.rejected
    if seed < spec.x1:
        right = integrate_amplitude(replace(spec, x0=seed, max_step=max_step), max_steps)
        skip = 1 if xs else 0
        xs += right.xs[skip:]
        A += right.A[skip:]
        dA += right.dA[skip:]
        steps += right.steps
        rejected += right.rejected
    return NumericSolution(xs, A, dA, steps, rejected)


def growth_pieces(A: Callable[[float], float], lo: float, hi: float,
                  samples: int = 257) -> List[Tuple[float, float, float]]:
    """Split [lo, hi] at the sampled local maxima of |A|.

    Returns ``(start, seed, end)`` triples where ``seed`` is the smallest
    |A| on the piece, so integrating outward from it always follows growth.
    """
    xs = [lo + (hi - lo) * j / (samples - 1) for j in range(samples)]
    mags = [abs(A(x)) for x in xs]
    cuts = [0] + [j for j in range(1, samples - 1)
                  if mags[j] >= mags[j - 1] and mags[j] > mags[j + 1]] + [samples - 1]
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        seed = min(range(a, b + 1), key=lambda j: mags[j])
        pieces.append((xs[a], xs[seed], xs[b]))
    return pieces


def solve_from_closed_form(sol, span: Optional[Tuple[float, float]] = None,
                           rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> NumericSolution:
    """Integrate a family's amplitude equation, seeded from its closed form.

    Linear amplitude equations are integrated outward from the minima of
    |A| (see :func:`growth_pieces`).  The cubic equation is integrated
    forward from the span start: its perturbations grow in both directions
    when eta > 0, so no seed placement helps there.
    """
    x0, x1 = sol.domain if span is None else span
    spec = ivp_from_solution(sol, (x0, x1), rel_tol, abs_tol)
    if spec.equation == CUBIC_AMPLITUDE:
        return integrate_amplitude(spec)
    cap = (x1 - x0) / DEFAULT_STEPS
    out = NumericSolution([], [], [])
    for start, seed, end in growth_pieces(sol.A, x0, x1):
        piece = replace(spec, x0=start, x1=end, A0=sol.A(seed), A0_prime=sol.dA(seed), max_step=cap)
        part = integrate_outward(piece, seed)
        skip = 1 if out.xs else 0
        out.xs += part.xs[skip:]
        out.A += part.A[skip:]
        out.dA += part.dA[skip:]
        out.steps += part.steps
        out.rejected += part.rejected
    return out


def compare_with_closed_form(numeric: NumericSolution, closed, grid: Sequence[float]) -> float:
    """max over grid of |A_numeric - A_closed| / max(|A_closed|, 1e-14).

    ``closed`` is a ClosedFormSolution or any callable amplitude.
    """
    A_closed = closed if callable(closed) else closed.A
    lo, hi = numeric.xs[0], numeric.xs[-1]
    if any(x < lo or x > hi for x in grid):
        raise DomainError(f"comparison grid leaves the integrated span [{lo}, {hi}]")
    worst = 0.0
    for x in grid:
        ref = A_closed(x)
        worst = max(worst, abs(numeric(x) - ref) / max(abs(ref), 1e-14))
    return worst
