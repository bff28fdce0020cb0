"""Substitute a solution into the one-dimensional equation systems and report
per-point residuals.

Systems (A = A(x), primes are x-derivatives, Sdot the time derivative):

``full_1d``                 A'' + eta A S'**2 + 2 mu delta A Sdot - 2 mu V A = 0
                            and A S'' + 2 A' S' = 0
``eta_zero_1d``             A'' + 2 mu delta A Sdot - 2 mu V A = 0
``amplitude_only``          A'' - 2 mu V A = 0
``cubic_amplitude``         A'' + eta B1**2 A**-3 - 2 mu V A = 0
``phase_only``              A S'' + 2 A' S' = 0
``plane_wave_consistency``  eta S'**2 + 2 mu delta Sdot - 2 mu V = 0
``phase_relation``          S' A**2 - B1 = 0

A report is normalized by the largest single term magnitude seen on the
grid, so "zero residual" means cancellation to within ``tolerance`` of the
terms that had to cancel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GridError, IncompatibleSystemError, SingularAmplitudeError
from .families import (AMPLITUDE_ONLY, CUBIC_AMPLITUDE, ETA_ZERO_1D, FULL_1D, PHASE_ONLY,
                       PHASE_RELATION, PLANE_WAVE_CONSISTENCY, ClosedFormSolution)
from .formatting import fmt

SYSTEMS = (FULL_1D, ETA_ZERO_1D, AMPLITUDE_ONLY, CUBIC_AMPLITUDE, PHASE_ONLY,
           PLANE_WAVE_CONSISTENCY, PHASE_RELATION)
DERIVATIVE_SOURCES = ("analytic", "finite_difference")

SCALE_FLOOR = 1e-14
DEFAULT_TOLERANCE = 1e-8
STEP_FACTOR = 5e-4
SINGULAR_A = 1e-12
EVAL_ULPS = 8.0
_EPS = 2.220446049250313e-16
_D1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
_D2 = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))

# systems that never touch S' (so a vanishing amplitude is harmless)
_AMPLITUDE_SYSTEMS = (AMPLITUDE_ONLY, ETA_ZERO_1D)


def default_step(x: float) -> float:
    return max(STEP_FACTOR, STEP_FACTOR * abs(x))


def finite_diff(f: Callable[[float], float], x: float, order: int = 1,
                h: Optional[float] = None) -> float:
    """Fourth-order central difference of f at x (order 1 or 2)."""
    return finite_diff_bounded(f, x, order, h)[0]


def finite_diff_bounded(f: Callable[[float], float], x: float, order: int = 1,
                        h: Optional[float] = None) -> Tuple[float, float]:
    """Finite difference plus a bound on its rounding error.

    Each sample is assumed good to ``EVAL_ULPS`` units in the last place; the
    bound is that error pushed through the stencil weights.
    """
    if h is None:
        h = default_step(x)
    if not h > 0.0:
        raise ValueError(f"step must be positive, got {h!r}")
    if order == 1:
        weights = _D1
        denom = 12.0 * h
    elif order == 2:
        weights = _D2
        denom = 12.0 * h * h
    else:
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    samples = [(w, f(x + j * h)) for j, w in weights]
    value = math.fsum(w * v for w, v in samples) / denom
    noise = EVAL_ULPS * _EPS * math.fsum(abs(w * v) for w, v in samples) / denom
    return value, noise


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    n_points: int = 101

    def __post_init__(self):
        if not self.lo < self.hi:
            raise GridError(f"grid needs lo < hi, got {self.lo}:{self.hi}")
        if self.n_points < 9:
            raise GridError(f"grid needs at least 9 points, got {self.n_points}")

    def points(self) -> List[float]:
        return [float(x) for x in np.linspace(self.lo, self.hi, self.n_points)]

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """``lo:hi:n``"""
        parts = text.split(":")
        if len(parts) != 3:
            raise GridError(f"grid must look like lo:hi:n, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            raise GridError(f"grid must look like lo:hi:n, got {text!r}") from None

    @classmethod
    def default_for(cls, sol: ClosedFormSolution, n_points: int = 101) -> "Grid":
        return cls(sol.domain[0], sol.domain[1], n_points)

    def check_inside(self, support: Tuple[float, float]) -> None:
        """Points plus two stencil widths on each side must lie inside support."""
        lo, hi = support
        if self.lo - 4.0 * default_step(self.lo) <= lo or self.hi + 4.0 * default_step(self.hi) >= hi:
            raise GridError(
                f"grid [{self.lo}, {self.hi}] (plus stencil margin) leaves the open domain ({lo}, {hi})")


@dataclass(frozen=True)
class PointResidual:
    x: float
    t: float
    r: float
    noise: float = 0.0  # rounding bound carried by finite-difference derivatives


@dataclass(frozen=True)
class ResidualReport:
    system: str
    points: Tuple[PointResidual, ...]
    max_abs: float
    rms: float
    scale: float
    tolerance: float
    derivative_source: str = "analytic"

    @property
    def relative(self) -> float:
        return self.max_abs / max(self.scale, SCALE_FLOOR)

    @property
    def passed(self) -> bool:
        """Every |r| within tolerance*scale, widened by its rounding bound.

        The bound is zero for analytic derivatives, where this reduces to
        ``max_abs / max(scale, floor) <= tolerance``.
        """
        allowed = self.tolerance * max(self.scale, SCALE_FLOOR)
        return all(abs(p.r) <= allowed + p.noise for p in self.points)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def per_point(self) -> List[float]:
        return [p.r for p in self.points]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "scale": self.scale,
            "verdict": self.verdict,
            "points": [{"x": p.x, "t": p.t, "r": p.r} for p in self.points],
        }

    def to_csv(self) -> str:
        rows = ["x,t,residual"] + [f"{fmt(p.x)},{fmt(p.t)},{fmt(p.r)}" for p in self.points]
        return "\n".join(rows) + "\n"


def _product(coef: float, *factors: Tuple[float, float]) -> Tuple[float, float]:
    """coef * prod(values) and a first-order bound on its error."""
    value = coef
    for v, _ in factors:
        value *= v
    err = 0.0
    for k, (_, e) in enumerate(factors):
        if e:
            rest = abs(coef) * e
            for j, (v, _) in enumerate(factors):
                if j != k:
                    rest *= abs(v)
            err += rest
    return value, err


def _terms(sol: ClosedFormSolution, system: str, x: float, t: float, source: str):
    """Terms of ``system`` at one point as (value, error bound) pairs.

    Returns ``(main, extra)``; ``extra`` holds the phase equation of full_1d
    and is empty for every other system.
    """
    mu, delta, eta = sol.mu, sol.plane.delta, sol.eta
    A = (sol.A(x), 0.0)
    uses_phase = system not in (ETA_ZERO_1D, AMPLITUDE_ONLY, CUBIC_AMPLITUDE)
    dS = d2S = (0.0, 0.0)
    if source == "analytic":
        dA, d2A = (sol.dA(x), 0.0), (sol.d2A(x), 0.0)
        if uses_phase:
            dS, d2S = (sol.dS(x, t), 0.0), (sol.d2S(x, t), 0.0)
    else:
        dA = finite_diff_bounded(sol.A, x, 1)
        d2A = finite_diff_bounded(sol.A, x, 2)
        if uses_phase:
            phase = (lambda y: sol.S(y, t))
            dS = finite_diff_bounded(phase, x, 1)
            d2S = finite_diff_bounded(phase, x, 2)
    V = (sol.V(x), 0.0)
    Sdot = (sol.dSdt(x, t), 0.0)
    if system == FULL_1D:
        return ((_product(1.0, d2A), _product(eta, A, dS, dS),
                 _product(2.0 * mu * delta, A, Sdot), _product(-2.0 * mu, V, A)),
                (_product(1.0, A, d2S), _product(2.0, dA, dS)))
    if system == ETA_ZERO_1D:
        return (_product(1.0, d2A), _product(2.0 * mu * delta, A, Sdot), _product(-2.0 * mu, V, A)), ()
    if system == AMPLITUDE_ONLY:
        return (_product(1.0, d2A), _product(-2.0 * mu, V, A)), ()
    if system == CUBIC_AMPLITUDE:
        inv3 = (A[0] ** -3, 0.0)
        return (_product(1.0, d2A), _product(eta * sol.phase_flux ** 2, inv3), _product(-2.0 * mu, V, A)), ()
    if system == PHASE_ONLY:
        return (_product(1.0, A, d2S), _product(2.0, dA, dS)), ()
    if system == PLANE_WAVE_CONSISTENCY:
        return (_product(eta, dS, dS), _product(2.0 * mu * delta, Sdot), _product(-2.0 * mu, V)), ()
    if system == PHASE_RELATION:
        return (_product(1.0, dS, A, A), (-sol.phase_flux, 0.0)), ()
    raise IncompatibleSystemError(f"unknown system {system!r}; choose from {', '.join(SYSTEMS)}")


def _check_compatible(sol: ClosedFormSolution, system: str) -> None:
    if system not in SYSTEMS:
        raise IncompatibleSystemError(f"unknown system {system!r}; choose from {', '.join(SYSTEMS)}")
    if system in (CUBIC_AMPLITUDE, PHASE_RELATION) and sol.phase_flux is None:
        raise IncompatibleSystemError(
            f"{system} needs a time-independent phase with S' A**2 = B1; {sol.family} has none")


def point_residual(sol: ClosedFormSolution, system: str, x: float, t: float = 0.0,
                   derivative_source: str = "analytic") -> Tuple[float, float, float]:
    """(residual, largest term magnitude, rounding bound) at one point."""
    _check_compatible(sol, system)
    try:
        main, extra = _terms(sol, system, x, t, derivative_source)
    except ZeroDivisionError:
        raise SingularAmplitudeError(f"amplitude vanishes at x={x!r}") from None
    r = math.fsum(v for v, _ in main)
    size = max(abs(v) for v, _ in main)
    noise = math.fsum(e for _, e in main)
    if extra:
        r2 = math.fsum(v for v, _ in extra)
        size = max(size, max(abs(v) for v, _ in extra))
        if abs(r2) > abs(r):
            r = r2
            noise = math.fsum(e for _, e in extra)
    return r, size, noise


def residual_field(sol: ClosedFormSolution, system: str, grid: Optional[Grid] = None,
                   t: float = 0.0, derivative_source: str = "analytic",
                   tolerance: float = DEFAULT_TOLERANCE, support=None) -> ResidualReport:
    """Residual of ``system`` at every grid point (``full_1d`` reports, per
    point, whichever of its two equations is further from zero)."""
    if derivative_source not in DERIVATIVE_SOURCES:
        raise ValueError(f"derivative_source must be one of {DERIVATIVE_SOURCES}")
    _check_compatible(sol, system)
    grid = grid or Grid.default_for(sol)
    grid.check_inside(support or sol_support(sol))
    xs = grid.points()
    if system not in _AMPLITUDE_SYSTEMS:
        amps = [abs(sol.A(x)) for x in xs]
        peak = max(amps)
        for x, a in zip(xs, amps):
            if a <= SINGULAR_A * peak or a == 0.0:
                raise SingularAmplitudeError(f"amplitude {a!r} at x={x!r} is (numerically) zero")
    pts = []
    scale = 0.0
    for x in xs:
        r, size, noise = point_residual(sol, system, x, t, derivative_source)
        pts.append(PointResidual(x, float(t), r, noise))
        scale = max(scale, size)
    rs = [p.r for p in pts]
    return ResidualReport(
        system=system,
        points=tuple(pts),
        max_abs=max(abs(r) for r in rs),
        rms=math.sqrt(math.fsum(r * r for r in rs) / len(rs)),
        scale=scale,
        tolerance=tolerance,
        derivative_source=derivative_source,
    )


def residual_grid(sol: ClosedFormSolution, system: str, xs: Sequence[float],
                  ts: Sequence[float]) -> List[List[float]]:
    """Analytic residuals on an (x, t) product grid, indexed [t][x]."""
    _check_compatible(sol, system)
    return [[point_residual(sol, system, x, t)[0] for x in xs] for t in ts]


def sol_support(sol: ClosedFormSolution) -> Tuple[float, float]:
    if sol.family in ("inverse_square", "power_exponential"):
        return 0.0, math.inf
    if sol.family == "energy_shifted" and sol.base is not None:
        return sol_support(sol.base)
    return -math.inf, math.inf


@dataclass
class VerifyConfig:
    tolerance: float = DEFAULT_TOLERANCE
    grid: Optional[Grid] = None
    systems: Optional[Sequence[str]] = None
    t: float = 0.0
    derivative_source: str = "analytic"


def verify(sol: ClosedFormSolution, config: Optional[VerifyConfig] = None) -> List[ResidualReport]:
    """Run ``sol`` against its declared systems (or ``config.systems``)."""
    config = config or VerifyConfig()
    systems = list(config.systems) if config.systems else list(sol.systems)
    return [residual_field(sol, s, config.grid, config.t, config.derivative_source, config.tolerance)
            for s in systems]


def all_passed(reports: Sequence[ResidualReport]) -> bool:
    return all(r.passed for r in reports)
