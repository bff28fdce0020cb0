"""The real 4-dimensional algebra spanned by 1, i, eps and i*eps.

Generators obey ``i*i = -1``, ``eps*eps = +1`` and ``i*eps = -eps*i``.
Writing ``k = i*eps`` the full Cayley table is::

          |  1     i     eps    k
    ------+-------------------------
      1   |  1     i     eps    k
      i   |  i    -1     k     -eps
      eps |  eps  -k     1     -i
      k   |  k     eps   i      1

A mixed unit ``u = delta*i + sigma*eps`` squares to ``eta = sigma**2 - delta**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError, TrigOverflowError

Mat2 = Tuple[Tuple[float, float], Tuple[float, float]]

# |sqrt(eta)*S| above this would push cosh/sinh close to the float limit
EXP_LIMIT = 700.0


@dataclass(frozen=True)
class EtaElement:
    """a + b*i + c*eps + d*(i*eps)."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __add__(self, other: EtaElement) -> EtaElement:
        other = _coerce(other)
        return EtaElement(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __sub__(self, other: EtaElement) -> EtaElement:
        other = _coerce(other)
        return EtaElement(self.a - other.a, self.b - other.b,
                          self.c - other.c, self.d - other.d)

    def __neg__(self) -> EtaElement:
        return EtaElement(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other) -> EtaElement:
        if isinstance(other, (int, float)):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other) -> EtaElement:
        if isinstance(other, (int, float)):
            return self.scale(other)
        return mul(_coerce(other), self)

    def scale(self, r: float) -> EtaElement:
        return EtaElement(r * self.a, r * self.b, r * self.c, r * self.d)

    def components(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def conj(self) -> EtaElement:
        return conj(self)

    def __str__(self) -> str:
        return f"{self.a!r} + {self.b!r}*i + {self.c!r}*eps + {self.d!r}*i*eps"


ONE = EtaElement(1.0, 0.0, 0.0, 0.0)
I = EtaElement(0.0, 1.0, 0.0, 0.0)
EPS = EtaElement(0.0, 0.0, 1.0, 0.0)
I_EPS = EtaElement(0.0, 0.0, 0.0, 1.0)


def _coerce(x) -> EtaElement:
    if isinstance(x, EtaElement):
        return x
    if isinstance(x, (int, float)):
        return EtaElement(float(x))
    raise TypeError(f"cannot use {type(x).__name__} as an EtaElement")


@dataclass(frozen=True)
class MixedUnit:
    """The mixed imaginary unit ``delta*i + sigma*eps``."""

    delta: float
    sigma: float

    @property
    def eta(self) -> float:
        return self.sigma * self.sigma - self.delta * self.delta

    @property
    def is_degenerate(self) -> bool:
        """True when eta should be treated as exactly zero."""
        d2 = self.delta * self.delta
        s2 = self.sigma * self.sigma
        return abs(s2 - d2) < 1e-14 * (s2 + d2 + 1.0)

    @property
    def effective_eta(self) -> float:
        return 0.0 if self.is_degenerate else self.eta

    def embed(self) -> EtaElement:
        return EtaElement(0.0, self.delta, self.sigma, 0.0)

    def element(self, real: float, imag: float) -> EtaElement:
        """``real + imag*u`` as a full algebra element."""
        return EtaElement(real, imag * self.delta, imag * self.sigma, 0.0)


def mul(x: EtaElement, y: EtaElement) -> EtaElement:
    a1, b1, c1, d1 = x.a, x.b, x.c, x.d
    a2, b2, c2, d2 = y.a, y.b, y.c, y.d
    return EtaElement(
        a1 * a2 - b1 * b2 + c1 * c2 + d1 * d2,
        a1 * b2 + b1 * a2 - c1 * d2 + d1 * c2,
        a1 * c2 + c1 * a2 - b1 * d2 + d1 * b2,
        a1 * d2 + d1 * a2 + b1 * c2 - c1 * b2,
    )


def conj(x: EtaElement) -> EtaElement:
    """Negate every imaginary generator.

    On the full algebra this is the Clifford conjugate: it reverses products,
    and ``conj(x)*x`` is the scalar ``a**2 + b**2 - c**2 - d**2``, the
    determinant of ``matrix_rep(x)``.
    """
    return EtaElement(x.a, -x.b, -x.c, -x.d)


def planar_norm2(a: float, y: float, u: MixedUnit) -> float:
    """Square norm ``conj(a + y*u) * (a + y*u) = a**2 - eta*y**2``."""
    return a * a - u.effective_eta * y * y


def matrix_rep(x: EtaElement) -> Mat2:
    # 1 -> I, i -> [[0,-1],[1,0]], eps -> [[0,1],[1,0]], i*eps -> [[-1,0],[0,1]]
    return ((x.a - x.d, x.c - x.b),
            (x.b + x.c, x.a + x.d))


def from_matrix(m: Mat2) -> EtaElement:
    (p, q), (r, s) = m
    return EtaElement(0.5 * (p + s), 0.5 * (r - q), 0.5 * (r + q), 0.5 * (s - p))


def matmul2(m: Mat2, n: Mat2) -> Mat2:
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h),
            (c * e + d * g, c * f + d * h))


def exp_mixed(u: MixedUnit, S: float) -> EtaElement:
    """``exp(u*S) = c(S) + u*s(S)``, closed-form branch of the generalized trig pair."""
    from .trig import cs_eval

    eta = u.effective_eta
    if eta > 0.0 and math.sqrt(eta) * abs(S) > EXP_LIMIT:
        raise TrigOverflowError(
            f"exp_mixed overflow: sqrt(eta)*|S| = {math.sqrt(eta) * abs(S):.6g} > {EXP_LIMIT}")
    pair = cs_eval(S, eta, method="closed")
    return u.element(pair.c, pair.s)


def in_plane(x: EtaElement, u: MixedUnit, rtol: float = 1e-12) -> bool:
    """Whether x has the form ``a + y*u``."""
    mag = abs(x.a) + abs(x.b) + abs(x.c) + abs(x.d)
    tol = rtol * max(mag, 1e-300)
    if abs(x.d) > tol:
        return False
    # (b, c) must be parallel to (delta, sigma)
    cross = x.b * u.sigma - x.c * u.delta
    return abs(cross) <= tol * max(abs(u.delta) + abs(u.sigma), 1.0)


def plane_coords(x: EtaElement, u: MixedUnit) -> Tuple[float, float]:
    """Return (a, y) with ``x = a + y*u``; raises if x is off the plane."""
    if not in_plane(x, u):
        raise DomainError(f"{x} is not in the plane spanned by 1 and {u}")
    n2 = u.delta * u.delta + u.sigma * u.sigma
    if n2 == 0.0:
        return x.a, 0.0
    return x.a, (x.b * u.delta + x.c * u.sigma) / n2

