"""psi = A * exp(u*S) for a real amplitude A, real phase S and mixed unit u."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import EtaElement, MixedUnit, conj, exp_mixed, in_plane, mul, planar_norm2, plane_coords
from .errors import DomainError, PlaneMismatchError, SymSchroError

NORM_CHECK_RTOL = 1e-9


@dataclass(frozen=True)
class PsiValue:
    value: EtaElement
    plane: MixedUnit
    amplitude: float
    phase: float

    def __post_init__(self):
        if not in_plane(self.value, self.plane):
            raise PlaneMismatchError(f"value {self.value} does not lie in the plane of {self.plane}")


class NormMismatchError(SymSchroError):
    pass


def evaluate_psi(A: float, S: float, u: MixedUnit) -> PsiValue:
    if not math.isfinite(A):
        raise DomainError(f"amplitude must be finite, got {A!r}")
    return PsiValue(exp_mixed(u, S).scale(A), u, float(A), float(S))


def algebraic_norm2(psi: PsiValue) -> float:
    """Scalar part of ``conj(psi)*psi`` computed in the full algebra."""
    return mul(conj(psi.value), psi.value).a


def square_norm(psi: PsiValue) -> float:
    """|psi|**2 = A**2, cross-checked against conj(psi)*psi.

    The two routes differ only by rounding in ``c**2 - eta*s**2``; a
    disagreement beyond that (measured against the size of the squared terms)
    raises NormMismatchError.
    """
    expected = psi.amplitude * psi.amplitude
    a, y = plane_coords(psi.value, psi.plane)
    planar = planar_norm2(a, y, psi.plane)
    algebraic = algebraic_norm2(psi)
    scale = max(a * a, abs(psi.plane.effective_eta) * y * y, expected, 1e-300)
    for other in (planar, algebraic):
        if abs(other - expected) > NORM_CHECK_RTOL * scale:
            raise NormMismatchError(f"|psi|^2 routes disagree: {expected!r} vs {other!r}")
    return expected


def partial_psi(A: float, S: float, u: MixedUnit, dlnA_dq: float, dS_dq: float) -> EtaElement:
    """d(psi)/dq = psi * dlnA/dq + u * psi * dS/dq."""
    if not A > 0.0:
        raise DomainError(f"partial_psi needs A > 0 (uses ln A), got {A!r}")
    psi = evaluate_psi(A, S, u).value
    return psi.scale(dlnA_dq) + mul(u.embed(), psi).scale(dS_dq)
