"""Coverage probabilities and harvested energy in closed/integral form.

Everything here assumes Rayleigh fading (unit-mean exponential power),
the bounded path loss ``1/(1 + d**alpha)`` and a PPP of interferers. The
SIC composition treats the residual interference terms as independent,
which is the approximation the Monte Carlo simulator measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .model import NetworkParams, SicConfig, tau
from .specfun import (QuadratureSpec, integrate_semi_infinite,
                      log_gauss_2f1_neg, log_nn_distance_pdf)

#: Quadrature settings for the r-integrals. Integrands are positive, so a
#: purely relative tolerance keeps tiny probabilities accurate.
QUAD = QuadratureSpec(rel_tol=1e-10, abs_tol=0.0, max_subdivisions=2000)

#: Largest excursion outside [0, 1] treated as rounding rather than a bug.
PROB_TOL = 1e-9

_LOG_TINY = -745.0  # exp() underflows to 0 below this


def _probability(x: float, what: str) -> float:
    if not (-PROB_TOL <= x <= 1.0 + PROB_TOL):
        raise ArithmeticError(f"{what} = {x!r} lies outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def _csc(x: float) -> float:
    return 1.0 / math.sin(x)


def _noise_rate(params: NetworkParams) -> float:
    # coefficient of xi in the exponent of the noise-only success term
    return (params.theta / params.p_t) * (params.sigma2 + params.sigma2_c / params.v)


# ---------------------------------------------------------------------------
# Laplace transforms of the aggregate interference


def log_laplace_interference_full(s: float, params: NetworkParams) -> float:
    if s < 0:
        raise ValueError("s must be >= 0")
    a = params.alpha
    return (-(2.0 / a) * params.lam * math.pi ** 2 * s
            * (1.0 + s) ** (2.0 / a - 1.0) * _csc(2.0 * math.pi / a))


def laplace_interference_full(s: float, params: NetworkParams) -> float:
    """``E[exp(-s I)]`` for the interference from the whole plane.

    ``exp(-(2/alpha) lam pi^2 s (1+s)^(2/alpha - 1) csc(2 pi/alpha))``.
    """
    return math.exp(log_laplace_interference_full(s, params))


def tail_exponent(s: float, r: float, params: NetworkParams) -> float:
    """``2 pi lam int_r^inf (1 - 1/(1 + s/(1+x^alpha))) x dx`` in closed form.

    Equal to ``2 pi lam s r^(2-alpha)/(alpha-2) * 2F1(1, 1-2/alpha;
    2-2/alpha; -(1+s)/r^alpha)``; assembled in log space because the two
    factors overflow and underflow respectively as ``r -> 0``.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if r < 0:
        raise ValueError("r must be >= 0")
    if s == 0 or params.lam == 0:
        return 0.0
    if r == 0:
        return -log_laplace_interference_full(s, params)
    a = params.alpha
    b = 1.0 - 2.0 / a
    log_r = math.log(r)
    log_negz = math.log1p(s) - a * log_r
    log_val = (math.log(2.0 * math.pi * params.lam) + math.log(s)
               + (2.0 - a) * log_r - math.log(a - 2.0)
               + log_gauss_2f1_neg(1.0, b, b + 1.0, log_negz))
    return math.exp(log_val)


def laplace_interference_outside(s: float, r: float, params: NetworkParams) -> float:
    """Laplace transform of the interference from points beyond distance ``r``."""
    if not r > 0:
        raise ValueError("r must be > 0; use laplace_interference_full for r = 0")
    return math.exp(-tail_exponent(s, r, params))


# ---------------------------------------------------------------------------
# coverage probabilities


def coverage_no_sic(params: NetworkParams) -> float:
    """Coverage of a receiver that does not attempt any cancellation."""
    t = tau(params)
    s = params.theta * t
    log_p = -_noise_rate(params) * t + log_laplace_interference_full(s, params)
    return _probability(math.exp(log_p), "coverage_no_sic")


def _pdf_scale(n: int, lam: float) -> float:
    return math.sqrt(n / (math.pi * lam))


def coverage_decode_nth(params: NetworkParams, n: int) -> float:
    """Probability of decoding the n-th nearest interferer.

    The useful signal counts as extra interference, and only points beyond
    the n-th neighbour contribute to the residual aggregate. The integral
    runs over the n-th neighbour distance ``r`` with ``xi = 1 + r^alpha``.
    """
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    n = int(n)
    if params.lam == 0:
        # no n-th interferer exists
        return 0.0
    t = tau(params)
    theta = params.theta
    rate = _noise_rate(params)
    lam, a = params.lam, params.alpha

    def integrand(r):
        log_f = log_nn_distance_pdf(r, n, lam)
        if log_f < _LOG_TINY:
            return 0.0
        xi = 1.0 + r ** a
        s = theta * xi
        log_val = log_f - math.log1p(s / t) - rate * xi
        if log_val < _LOG_TINY:
            return 0.0
        return math.exp(log_val - tail_exponent(s, r, params))

    res = integrate_semi_infinite(integrand, 0.0, QUAD, scale=_pdf_scale(n, lam))
    return _probability(res.value, f"coverage_decode_nth(n={n})")


@lru_cache(maxsize=4096)
def _cancelled_interference_integral(lam: float, alpha: float, s: float, n: int) -> float:
    # int_0^inf f(r, n) * L_{I_n}(s | r) dr; independent of v and the noise
    params = NetworkParams(lam=lam, alpha=alpha)

    def integrand(r):
        log_f = log_nn_distance_pdf(r, n, lam)
        if log_f < _LOG_TINY:
            return 0.0
        return math.exp(log_f - tail_exponent(s, r, params))

    return integrate_semi_infinite(integrand, 0.0, QUAD, scale=_pdf_scale(n, lam)).value


def coverage_after_cancel(params: NetworkParams, n: int) -> float:
    """Coverage of the useful link once the n nearest interferers are removed.

    ``n = 0`` returns :func:`coverage_no_sic` exactly. With ``lam = 0``
    and ``n >= 1`` the limit ``lam -> 0+`` (noise-only success) is returned.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    n = int(n)
    if n == 0:
        return coverage_no_sic(params)
    t = tau(params)
    noise = math.exp(-_noise_rate(params) * t)
    if params.lam == 0:
        return _probability(noise, "coverage_after_cancel")
    integral = _cancelled_interference_integral(params.lam, params.alpha, params.theta * t, n)
    return _probability(noise * integral, f"coverage_after_cancel(n={n})")


@dataclass(frozen=True)
class CoverageBreakdown:
    """All coverage terms for one parameter point.

    ``pi_d[j-1]`` is the decode probability of the j-th interferer
    (j = 1..n) and ``pi_c[j]`` the coverage after j cancellations
    (j = 0..n).
    """

    pi_nc: float
    pi_d: tuple
    pi_c: tuple
    pi_sic: float

    @property
    def n_max(self) -> int:
        return len(self.pi_d)


def compose_sic(pi_nc: float, pi_d, pi_c) -> float:
    """Combine the per-stage terms into the SIC coverage probability.

    Stage i contributes ``prod_{j<i}(1 - pi_c[j]) * prod_{j=1..i} pi_d[j]
    * pi_c[i]``: every earlier useful-signal attempt failed, interferers
    1..i were decoded, and the useful signal was then decoded.
    """
    total = pi_nc
    fail = 1.0
    decoded = 1.0
    for i in range(1, len(pi_d) + 1):
        fail *= 1.0 - pi_c[i - 1]
        decoded *= pi_d[i - 1]
        total += fail * decoded * pi_c[i]
    return total


def coverage_sic(params: NetworkParams, sic: SicConfig | int) -> CoverageBreakdown:
    """Coverage of a receiver that cancels up to ``sic.n_max`` interferers."""
    n = sic if isinstance(sic, int) else sic.n_max
    pi_nc = coverage_no_sic(params)
    pi_c = [pi_nc] + [coverage_after_cancel(params, j) for j in range(1, n + 1)]
    pi_d = []
    for j in range(1, n + 1):
        pi_d.append(coverage_decode_nth(params, j))
        if pi_d[-1] == 0.0:
            # later stages are unreachable
            pi_d.extend([0.0] * (n - j))
            break
    pi_sic = _probability(compose_sic(pi_nc, pi_d, pi_c), "coverage_sic")
    return CoverageBreakdown(pi_nc, tuple(pi_d), tuple(pi_c), pi_sic)


# ---------------------------------------------------------------------------
# harvested energy


def mean_interference(params: NetworkParams) -> float:
    """Mean aggregate interference power gain, ``(2/alpha) pi^2 lam csc(2 pi/alpha)``."""
    a = params.alpha
    return (2.0 / a) * math.pi ** 2 * params.lam * _csc(2.0 * math.pi / a)


def mean_interference_outside(r: float, params: NetworkParams) -> float:
    """Mean interference from points beyond distance ``r``.

    ``2 pi lam int_r^inf x/(1+x^alpha) dx``; equals :func:`mean_interference`
    at ``r = 0``.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if params.lam == 0:
        return 0.0
    if r == 0:
        return mean_interference(params)
    a = params.alpha
    b = 1.0 - 2.0 / a
    log_val = (math.log(2.0 * math.pi * params.lam) + (2.0 - a) * math.log(r)
               - math.log(a - 2.0) + log_gauss_2f1_neg(1.0, b, b + 1.0, -a * math.log(r)))
    return math.exp(log_val)


def avg_harvested_energy(params: NetworkParams) -> float:
    """Average energy at the rectenna, ``zeta (1-v) P_t (1/tau + E[I])``.

    Harvesting uses the full received signal, direct link plus all
    interference; noise is not harvested.
    """
    return (params.zeta * (1.0 - params.v) * params.p_t
            * (1.0 / tau(params) + mean_interference(params)))


def harvested_energy_upper_bound(params: NetworkParams, zero_distance: bool = False) -> float:
    """Harvested energy with every watt sent to the rectenna (``v -> 0``).

    With ``zero_distance`` the direct link is also taken at ``d0 -> 0``
    (``tau -> 1``), the absolute ceiling for a given density.
    """
    direct = 1.0 if zero_distance else 1.0 / tau(params)
    return params.zeta * params.p_t * (direct + mean_interference(params))
