"""Curation objective pieces: E_m, policy correlation, and the two bounds.

The curated-set objective scores a batch of m actions by expected
quantitative value plus a diversity bonus
``sigma * sqrt(1 - rho) * E_m`` where E_m is the expected maximum of m
iid standard normals and rho is the average pairwise correlation the
sampling policy induces under the qualitative kernel.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.stats import norm

from . import kernels
from .errors import DimensionError, DomainError

#: Above this m the closed-form tail expansion replaces quadrature.
_QUADRATURE_LIMIT = 10**6


@dataclass(frozen=True)
class CurationObjectiveParams:
    """Scale of the qualitative component, batch size, and its kernel."""

    sigma: float
    m: int
    kernel: kernels.Kernel

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError("m must be a positive integer")


@lru_cache(maxsize=None)
def _expected_max_cached(m):
    if m == 1:
        return 0.0
    if m > _QUADRATURE_LIMIT:
        # Two-term extreme-value expansion; relative error is already
        # below 1e-4 long before this threshold.
        lead = np.sqrt(2.0 * np.log(m))
        return float(lead - (np.log(np.log(m)) + np.log(4.0 * np.pi)) / (2.0 * lead))

    def integrand(x):
        return m * x * norm.pdf(x) * norm.cdf(x) ** (m - 1)

    value, _ = integrate.quad(integrand, -9.0, 9.0, epsabs=1e-9, epsrel=1e-9, limit=200)
    return float(value)


def expected_max_gaussian(m):
    """E[max of m iid standard normals], memoized per process."""
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    return _expected_max_cached(int(m))


def rho_exact(kernel, policy):
    """Average pairwise correlation w' K w / k(a,a) of a discrete policy."""
    gram = kernels.gram(kernel, policy.grid)
    w = policy.weights
    return float(w @ gram @ w) / kernel.diagonal()


def rho_empirical(kernel, samples):
    """Pairing estimator of rho: mean unit-kernel value over consecutive
    disjoint pairs (a1,a2), (a3,a4), ...; an odd trailing sample is dropped."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n_pairs = samples.shape[0] // 2
    if n_pairs == 0:
        raise DomainError("rho_empirical needs at least 2 samples")
    vals = kernels.pair_correlations(
        kernel, samples[0 : 2 * n_pairs : 2], samples[1 : 2 * n_pairs : 2]
    )
    return float(np.mean(vals))


def diversity_gain(rho, params):
    """sigma * sqrt(1 - rho) * E_m, the qualitative headroom of a policy."""
    return params.sigma * np.sqrt(max(1.0 - rho, 0.0)) * expected_max_gaussian(params.m)


def lower_bound_value(expected_y, rho, params):
    """Guaranteed value of the best of m draws: E[Y] + diversity gain."""
    return float(expected_y + diversity_gain(rho, params))


def upper_bound_value(expected_max_y, rho, params):
    """Ceiling on the value of the best of m draws."""
    return float(expected_max_y + diversity_gain(rho, params))


def expected_max_y(y_grid, weights, m, n_samples=4000, rng=None):
    """Monte-Carlo estimate of E[max of m policy draws of Y]."""
    y_grid = np.asarray(y_grid, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if y_grid.shape != weights.shape:
        raise DimensionError("y_grid and weights must have matching length")
    rng = np.random.default_rng(rng)
    idx = rng.choice(len(y_grid), size=(n_samples, m), p=weights)
    return float(np.mean(np.max(y_grid[idx], axis=1)))
