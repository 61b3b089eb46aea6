"""Special functions and quadrature used by the coverage formulas.

The hypergeometric routines cover real ``2F1(a, b; c; z)`` with ``z <= 0``
and ``c > b > 0``, which is the family produced by truncated interference
integrals, ``2F1(1, 1 - 2/alpha; 2 - 2/alpha; -x)``. Every evaluation is
reduced to a power series whose argument has modulus at most 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln, rgamma

_EPS = 1e-17
_MAX_TERMS = 200_000


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class HypergeometricError(ArithmeticError):
    """The hypergeometric series could not be summed to full precision."""


# ---------------------------------------------------------------------------
# nearest-neighbour distance distribution


def log_nn_distance_pdf(r, n: int, lam: float):
    """Log of the pdf of the distance to the n-th nearest PPP point."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    if lam <= 0:
        raise ValueError("lam must be > 0")
    r = np.asarray(r, dtype=float)
    pl = math.pi * lam
    with np.errstate(divide="ignore"):
        out = (math.log(2.0) + n * math.log(pl) - math.lgamma(n)
               + (2 * n - 1) * np.log(r) - pl * r * r)
    return out if out.ndim else float(out)


def nn_distance_pdf(r, n: int, lam: float):
    """Density of the distance from the origin to the n-th nearest point.

    ``f(r, n) = 2 (pi lam)^n / Gamma(n) * r^(2n-1) * exp(-pi lam r^2)``,
    evaluated in log space so large ``n`` or ``r`` do not overflow.

    Parameters
    ----------
    r : float or array_like
        Distance(s), ``r >= 0``.
    n : int
        Neighbour rank, ``n >= 1``.
    lam : float
        Point density, ``lam > 0``.
    """
    if np.any(np.asarray(r) < 0):
        raise ValueError("r must be >= 0")
    out = np.exp(log_nn_distance_pdf(r, n, lam))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function on the negative real axis


def _series(a, b, c, w):
    # plain 2F1 Maclaurin series; callers keep |w| <= 1/2
    total = 1.0
    term = 1.0
    for k in range(_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        total += term
        if abs(term) <= _EPS * abs(total):
            return total
        if term == 0.0:
            return total
    raise HypergeometricError(f"2F1 series did not converge for w={w!r}")


def _near(a, b, c, z):
    # z in [-1, 0]: Pfaff transformation onto w = z/(z-1) in [0, 1/2]
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _series(a, c - b, c, w)


def _check_args(a, b, c):
    if c <= 0 and float(c).is_integer():
        raise ValueError("c must not be a non-positive integer")
    if not (c > b > 0):
        raise ValueError("only c > b > 0 is supported")


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) < 1e-14


def _reciprocal_terms(a, b, c, log_negz):
    """Coefficients of the 1/z connection formula.

    Returns ``[(exponent, coefficient * inner_series)]`` such that
    ``2F1(a, b; c; z) = sum(coef * exp(-exponent * log(-z)))``.
    """
    inv = -math.exp(-log_negz)
    g_c = math.exp(gammaln(c)) if c > 0 else float(1.0 / rgamma(c))
    coef_a = g_c * _gamma(b - a) * float(rgamma(b)) * float(rgamma(c - a))
    coef_b = g_c * _gamma(a - b) * float(rgamma(a)) * float(rgamma(c - b))
    terms = []
    if coef_a != 0.0:
        terms.append((a, coef_a * _near(a, a - c + 1.0, a - b + 1.0, inv)))
    if coef_b != 0.0:
        terms.append((b, coef_b * _near(b, b - c + 1.0, b - a + 1.0, inv)))
    return terms


def _gamma(x):
    return float(1.0 / rgamma(x))


def gauss_2f1_neg(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z <= 0``.

    For ``-1 <= z <= 0`` the Pfaff transformation maps the argument into
    ``[0, 1/2]``. For ``z < -1`` the ``1/z`` connection formula is used,
    whose inner functions are again evaluated through Pfaff. When ``b - a``
    is an integer the connection formula degenerates and the Pfaff series
    is summed directly, which is slow for very large ``|z|``.
    """
    _check_args(a, b, c)
    if z > 0:
        raise ValueError("z must be <= 0")
    if z == 0:
        return 1.0
    if z >= -1.0:
        return _near(a, b, c, z)
    if _is_integer(b - a):
        return (1.0 - z) ** (-a) * _series(a, c - b, c, z / (z - 1.0))
    log_negz = math.log(-z)
    return math.fsum(coef * math.exp(-e * log_negz)
                     for e, coef in _reciprocal_terms(a, b, c, log_negz))


def log_gauss_2f1_neg(a: float, b: float, c: float, log_negz: float) -> float:
    """``log 2F1(a, b; c; -exp(log_negz))`` without forming ``z``.

    Used where ``|z|`` overflows a double, e.g. ``(1 + s) / r**alpha`` as
    ``r -> 0``. The value is positive for ``c > b > 0``, ``a`` real.
    """
    _check_args(a, b, c)
    if log_negz == -math.inf:
        return 0.0
    if log_negz <= 0.0 or _is_integer(b - a):
        val = gauss_2f1_neg(a, b, c, -math.exp(log_negz))
        if val <= 0:
            raise HypergeometricError("2F1 is not positive; log undefined")
        return math.log(val)
    terms = _reciprocal_terms(a, b, c, log_negz)
    lead = min(e for e, _ in terms)
    scaled = math.fsum(coef * math.exp(-(e - lead) * log_negz) for e, coef in terms)
    if scaled <= 0:
        raise HypergeometricError("2F1 is not positive; log undefined")
    return -lead * log_negz + math.log(scaled)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


class QuadResult(NamedTuple):
    value: float
    error: float


def integrate_semi_infinite(f: Callable[[float], float], lower: float = 0.0,
                            spec: QuadratureSpec = QuadratureSpec(),
                            scale: float = 1.0) -> QuadResult:
    """Adaptive estimate of ``int_lower^inf f(x) dx``.

    The half line is mapped onto ``[0, 1)`` by ``x = lower + scale*u/(1-u)``
    and the result handed to QUADPACK's adaptive Gauss-Kronrod rule.
    ``scale`` should be the length over which ``f`` varies; it does not
    change the value, only how evenly nodes are spread.

    Raises
    ------
    QuadratureError
        If the tolerance is not met within ``spec.max_subdivisions``
        intervals, or the integrand returns a non-finite value.
    """
    if not scale > 0:
        raise ValueError("scale must be > 0")

    def mapped(u):
        if u >= 1.0:
            return 0.0
        one_m = 1.0 - u
        y = f(lower + scale * u / one_m)
        if y == 0.0:
            return 0.0
        return y * scale / (one_m * one_m)

    value, err, _info, *message = integrate.quad(
        mapped, 0.0, 1.0, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1)
    if not math.isfinite(value) or not math.isfinite(err):
        raise QuadratureError("integrand produced a non-finite value")
    if message:
        # QUADPACK warning; a roundoff flag alone is fine if the tolerance holds
        tol = max(spec.abs_tol, spec.rel_tol * abs(value))
        if err > tol:
            first = message[0].strip().splitlines()[0]
            raise QuadratureError(f"{first} (estimate {value!r}, error {err!r})")
    return QuadResult(float(value), float(err))
