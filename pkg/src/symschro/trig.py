"""Generalized cosine/sine pair and the error function.

For a signature ``eta`` the pair is defined by the power series

    c(S) = sum_n eta**n S**(2n) / (2n)!
    s(S) = sum_n eta**n S**(2n+1) / (2n+1)!

so that ``c = cos, s = sin`` at ``eta = -1`` and ``c = cosh, s = sinh`` at
``eta = +1``.  The pair satisfies ``c**2 - eta*s**2 = 1``,
``dc/dS = eta*s`` and ``ds/dS = c``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Tuple

from .errors import DomainError, SeriesNotConvergedError, TrigOverflowError

SERIES_MAX_TERMS = 200
SERIES_DOMAIN = 1e4  # largest |eta|*S**2 the series path accepts
SERIES_STOP = 1e-17
OVERFLOW_ARG = 700.0

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


class TrigPair(NamedTuple):
    c: float
    s: float
    eta: float

    def identity_residual(self) -> float:
        """``c**2 - eta*s**2 - 1`` relative to the size of the two squares."""
        c2 = self.c * self.c
        es2 = self.eta * self.s * self.s
        return (c2 - es2 - 1.0) / max(c2, abs(es2), 1.0)


def cs_eval(S: float, eta: float, method: str = "closed") -> TrigPair:
    """Evaluate ``(c(S), s(S))`` for signature ``eta``.

    ``method="series"`` sums the defining series in exact rational arithmetic
    (the float inputs are exact rationals), so the only errors are truncation
    and the final rounding.  ``method="closed"`` uses cos/sin or cosh/sinh.
    """
    S = float(S)
    eta = float(eta)
    if not (math.isfinite(S) and math.isfinite(eta)):
        raise DomainError(f"non-finite argument S={S!r}, eta={eta!r}")
    if method == "series":
        return _series(S, eta)
    if method == "closed":
        return _closed(S, eta)
    raise ValueError(f"unknown method {method!r}; expected 'series' or 'closed'")


def _closed(S: float, eta: float) -> TrigPair:
    if eta == 0.0:
        return TrigPair(1.0, S, 0.0)
    if eta < 0.0:
        w = math.sqrt(-eta)
        return TrigPair(math.cos(w * S), math.sin(w * S) / w, eta)
    w = math.sqrt(eta)
    arg = w * S
    if abs(arg) > OVERFLOW_ARG:
        raise TrigOverflowError(f"cosh/sinh overflow: sqrt(eta)*|S| = {abs(arg):.6g}")
    c = math.cosh(arg)
    s = math.sinh(arg) / w
    if not math.isfinite(s):
        raise TrigOverflowError(f"s(S) overflows for S={S!r}, eta={eta!r}")
    return TrigPair(c, s, eta)


def _series(S: float, eta: float) -> TrigPair:
    if abs(eta) * S * S > SERIES_DOMAIN:
        raise DomainError(
            f"series needs |eta|*S**2 <= {SERIES_DOMAIN:g}, got {abs(eta) * S * S:.6g}")
    z = Fraction(eta) * Fraction(S) ** 2
    c_term = Fraction(1)
    s_term = Fraction(S)
    c_sum, s_sum = c_term, s_term
    for n in range(1, SERIES_MAX_TERMS):
        c_term = c_term * z / ((2 * n - 1) * (2 * n))
        s_term = s_term * z / ((2 * n) * (2 * n + 1))
        c_sum += c_term
        s_sum += s_term
        cf, sf = float(c_sum), float(s_sum)
        if (abs(float(c_term)) < SERIES_STOP * (1.0 + abs(cf))
                and abs(float(s_term)) < SERIES_STOP * (1.0 + abs(sf))):
            return TrigPair(cf, sf, eta)
    raise SeriesNotConvergedError(
        f"series for S={S!r}, eta={eta!r} not converged after {SERIES_MAX_TERMS} terms")


def cs_derivative(S: float, Sq: float, eta: float, method: str = "closed") -> Tuple[float, float]:
    """Chain rule for the pair: ``(ds/dq, dc/dq) = (c*Sq, eta*s*Sq)``."""
    pair = cs_eval(S, eta, method)
    return pair.c * Sq, eta * pair.s * Sq


def erf(x: float) -> float:
    """Error function.

    |x| <= 2 uses the all-positive series
    ``erf(x) = 2/sqrt(pi) * exp(-x**2) * sum 2**n x**(2n+1) / (2n+1)!!``;
    larger |x| uses the continued fraction for erfc.  Oddness is exact.
    """
    if math.isnan(x):
        return x
    ax = abs(x)
    if ax <= 2.0:
        r = _erf_series(ax)
    elif math.isinf(ax):
        r = 1.0
    else:
        r = 1.0 - _erfc_cf(ax)
    return r if x >= 0.0 else -r


def _erf_series(x: float) -> float:
    if x == 0.0:
        return 0.0
    x2 = x * x
    term = x
    total = x
    n = 0
    while term > 1e-17 * total:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float, max_iter: int = 5000) -> float:
    # erfc(x) = exp(-x**2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    # evaluated with the modified Lentz algorithm
    tiny = 1e-300
    f = x
    C = f
    D = 0.0
    for n in range(1, max_iter):
        a = 0.5 * n
        D = x + a * D
        D = tiny if D == 0.0 else D
        C = x + a / C
        C = tiny if C == 0.0 else C
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise SeriesNotConvergedError(f"erfc continued fraction stalled at x={x!r}")
    return math.exp(-x * x) * _INV_SQRT_PI / f
