"""Standard-normal analytics and the grids built on them.

Provides the distribution function F, density f, quantile F^{-1}, and the
indicator variance s2(t) = F(t)(1 - F(t)), together with:

* the probability grid {l*step} and its quantile image on the real line,
* the quantile grid lam_i = F^{-1}(i/m) and the per-cell quantile averages
  eta_i = m * integral of F^{-1} over ((i-1)/m, i/m],
* ratio checks for the density envelope f(F^{-1}(u)) <~ ubar*sqrt(log(1/ubar))
  and the tail equivalence s2(t) ~ exp(-t^2/2)/t.

Accuracy contract: CDF absolute error <= 1e-12 (complementary error
function evaluation), quantile round-trip |F(F^{-1}(u)) - u| <= 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from gaussdkw.errors import ConfigError, DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_LOG_INV_SQRT_2PI = -0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# scalar API


def std_normal_cdf(t: float) -> float:
    """P(g <= t) for standard normal g; absolute error below 1e-12."""
    if not math.isfinite(t):
        raise DomainError(f"std_normal_cdf: non-finite input {t!r}")
    return 0.5 * math.erfc(-t / _SQRT2)


def std_normal_density(t: float) -> float:
    """Standard normal density at t."""
    if not math.isfinite(t):
        raise DomainError(f"std_normal_density: non-finite input {t!r}")
    return _INV_SQRT_2PI * math.exp(-0.5 * t * t)


def sigma2(t: float) -> float:
    """Variance F(t)(1 - F(t)) of the half-line indicator; in [0, 1/4].

    Computed as F(-|t|) * F(|t|) so the small tail factor never comes from a
    cancellation of 1 - F.
    """
    if not math.isfinite(t):
        raise DomainError(f"sigma2: non-finite input {t!r}")
    a = abs(t)
    lo = 0.5 * math.erfc(a / _SQRT2)
    hi = 0.5 * math.erfc(-a / _SQRT2)
    return lo * hi


def std_normal_quantile(u: float) -> float:
    """Inverse of the standard normal CDF.

    Initial guess from the tail asymptotic -sqrt(2L - log L), L = log(1/u),
    refined by Newton iteration on log F(t) = log u.  log F is increasing and
    strictly concave, so the iteration is globally convergent; a bisection
    fallback guards against floating-point stagnation.
    """
    if not (isinstance(u, (int, float)) and 0.0 < u < 1.0):
        raise DomainError(f"std_normal_quantile: u must be in (0,1), got {u!r}")
    if u == 0.5:
        return 0.0
    flip = u > 0.5
    uu = 1.0 - u if flip else u
    t = _quantile_left_scalar(uu)
    return -t if flip else t


def _quantile_left_scalar(u: float) -> float:
    # u in (0, 1/2); solve F(t) = u with t <= 0.
    log_u = math.log(u)
    t = _initial_guess(u)
    lo, hi = -40.0, 0.0
    for _ in range(80):
        cdf = 0.5 * math.erfc(-t / _SQRT2)
        if cdf > u:
            hi = min(hi, t)
        elif cdf < u:
            lo = max(lo, t)
        diff = math.log(cdf) - log_u
        if abs(diff) <= 1e-14:
            break
        logf = _LOG_INV_SQRT_2PI - 0.5 * t * t
        step = diff * math.exp(math.log(cdf) - logf)
        t_new = t - step
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if t_new == t:
            break
        t = t_new
    return t


def _initial_guess(u: float) -> float:
    big_l = -math.log(u)
    if big_l >= 2.0:
        return -math.sqrt(2.0 * big_l - math.log(big_l))
    return math.sqrt(2.0 * math.pi) * (u - 0.5)


# ---------------------------------------------------------------------------
# array API (used by grids, samplers, and the deviation statistics)


def _cdf_array(t: np.ndarray) -> np.ndarray:
    return 0.5 * special.erfc(-np.asarray(t, dtype=np.float64) / _SQRT2)


def _density_array(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return _INV_SQRT_2PI * np.exp(-0.5 * t * t)


def _sigma2_array(t: np.ndarray) -> np.ndarray:
    a = np.abs(np.asarray(t, dtype=np.float64))
    return 0.25 * special.erfc(a / _SQRT2) * special.erfc(-a / _SQRT2)


def _quantile_array(u: np.ndarray) -> np.ndarray:
    """Vectorised quantile; same iteration as the scalar path, 12 sweeps."""
    u = np.asarray(u, dtype=np.float64)
    if u.size and (np.min(u) <= 0.0 or np.max(u) >= 1.0):
        raise DomainError("_quantile_array: all u must be in (0,1)")
    flip = u > 0.5
    uu = np.where(flip, 1.0 - u, u)
    log_u = np.log(uu)
    big_l = -log_u
    tail = big_l >= 2.0
    t = np.where(
        tail,
        -np.sqrt(np.maximum(2.0 * big_l - np.log(np.maximum(big_l, 2.0)), 1e-300)),
        math.sqrt(2.0 * math.pi) * (uu - 0.5),
    )
    for _ in range(12):
        cdf = 0.5 * special.erfc(-t / _SQRT2)
        diff = np.log(cdf) - log_u
        if np.max(np.abs(diff)) <= 1e-15:
            break
        logf = _LOG_INV_SQRT_2PI - 0.5 * t * t
        t = t - diff * np.exp(np.log(cdf) - logf)
    return np.where(flip, -t, t)


# ---------------------------------------------------------------------------
# record types


@dataclass(frozen=True)
class GaussianScalars:
    """CDF, density and indicator variance of the standard normal at t."""

    t: float
    cdf: float
    density: float
    sigma2: float


def gaussian_scalars(t: float) -> GaussianScalars:
    return GaussianScalars(t=t, cdf=std_normal_cdf(t), density=std_normal_density(t),
                           sigma2=sigma2(t))


@dataclass(frozen=True)
class ProbabilityGrid:
    """u_values = {l*delta : 1 <= l <= (1-delta)/delta}, t_values their quantiles."""

    delta: float
    u_values: np.ndarray
    t_values: np.ndarray


@dataclass(frozen=True)
class QuantileGrid:
    """lam_i = F^{-1}(i/m) (last value repeated) and the cell averages eta_i."""

    m: int
    lambdas: np.ndarray
    etas: np.ndarray


def build_probability_grid(delta: float) -> ProbabilityGrid:
    """Multiples of delta inside [delta, 1-delta] and their quantiles.

    delta is accepted up to 1/4; the deviation theorems' regime delta <= 1/10
    is enforced at the experiment-configuration layer, not here.
    """
    if not (isinstance(delta, (int, float)) and 0.0 < delta <= 0.25):
        raise ConfigError(f"build_probability_grid: delta must be in (0, 1/4], got {delta!r}")
    l_max = int(math.floor((1.0 - delta) / delta + 1e-9))
    u = delta * np.arange(1, l_max + 1, dtype=np.float64)
    return ProbabilityGrid(delta=float(delta), u_values=u, t_values=_quantile_array(u))


def build_quantile_grid(m: int) -> QuantileGrid:
    """Quantile grid lam_i and per-cell averages eta_i for sample size m.

    The cell integrals are evaluated in t-coordinates, where the substitution
    u = F(t) turns every cell of integral of F^{-1}(u) du into an integral of
    t f(t) dt with antiderivative -f(t); both tail cells are finite there.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 2):
        raise ConfigError(f"build_quantile_grid: m must be an integer >= 2, got {m!r}")
    m = int(m)
    interior = _quantile_array(np.arange(1, m, dtype=np.float64) / m)
    lambdas = np.append(interior, interior[-1])
    # Cell boundaries in t: -inf = b_0 < b_1 < ... < b_{m-1} < b_m = +inf,
    # with f(+-inf) = 0; eta_i = m * (f(b_{i-1}) - f(b_i)).
    f_bound = np.concatenate(([0.0], _density_array(interior), [0.0]))
    etas = m * (f_bound[:-1] - f_bound[1:])
    return QuantileGrid(m=m, lambdas=lambdas, etas=etas)


# ---------------------------------------------------------------------------
# ratio checks backing the preliminary-lemma sweeps


def check_density_bound(u: float) -> float:
    """f(F^{-1}(u)) / (ubar * sqrt(log(1/ubar))) with ubar = min(u, 1-u).

    The ratio is bounded above and below by absolute constants; the sweep
    over u in [1e-8, 1/2] lands in [1/3, 3] empirically.
    """
    if not (isinstance(u, (int, float)) and 0.0 < u < 1.0):
        raise DomainError(f"check_density_bound: u must be in (0,1), got {u!r}")
    ubar = min(u, 1.0 - u)
    denom = ubar * math.sqrt(math.log(1.0 / ubar))
    return std_normal_density(std_normal_quantile(u)) / denom


def check_sigma_equivalence(t: float) -> float:
    """sigma2(t) * t * exp(t^2 / 2); bounded band over t in [1, 8]."""
    if not (isinstance(t, (int, float)) and t >= 1.0):
        raise DomainError(f"check_sigma_equivalence: t must be >= 1, got {t!r}")
    return sigma2(t) * t * math.exp(0.5 * t * t)
