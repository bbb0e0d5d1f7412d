"""Policy optimization over a finite grid.

``optimize_policy`` maximizes the concave curated-set lower bound

    f(w) = y'w + sigma * sqrt(1 - w'Kbar w) * E_m

over the probability simplex with projected gradient ascent and
backtracking line search.  ``asymptotic_policy`` solves the sigma -> inf
limit (minimize the induced correlation alone) with an accelerated
scheme, and ``variance_max_policy`` places the classical two-point
maximum-variance design on the near-optimal set.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels, objective
from .errors import DimensionError, InfeasibleError

#: Diversity square roots are clamped here to keep gradients finite.
RHO_CLAMP = 1e-12


@dataclass(frozen=True)
class DiscretePolicy:
    """A probability vector over explicit grid points."""

    grid: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        grid = np.atleast_2d(np.asarray(self.grid, dtype=np.float64))
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", weights)
        if weights.ndim != 1 or len(weights) != grid.shape[0]:
            raise DimensionError("one weight per grid point required")
        if np.any(weights < 0):
            raise ValueError("policy weights must be non-negative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"policy weights sum to {weights.sum()!r}, expected 1")

    @property
    def size(self):
        return len(self.weights)

    def expected_y(self, y_grid):
        return float(np.asarray(y_grid, dtype=np.float64) @ self.weights)

    def sample_indices(self, count, rng):
        return rng.choice(self.size, size=count, p=self.weights)


def project_simplex(v):
    """Euclidean projection onto the probability simplex.

    Sort-based O(n log n) algorithm; the result is renormalized exactly
    so downstream simplex invariants hold to float precision.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError("expected a 1-d vector")
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, len(v) + 1)
    cond = u - cssv / ind > 0
    rho = ind[cond][-1]
    theta = cssv[cond][-1] / float(rho)
    w = np.maximum(v - theta, 0.0)
    return w / w.sum()


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 5000
    step: float = None
    tol: float = 1e-10


def _bound_and_grad(w, y, kbar, params, e_m):
    kw = kbar @ w
    rho = float(w @ kw)
    slack = max(1.0 - rho, RHO_CLAMP)
    root = np.sqrt(slack)
    value = float(y @ w) + params.sigma * root * e_m
    grad = y - params.sigma * e_m * kw / root
    return value, grad, rho


def optimize_policy(y_grid, kernel, params, grid, options=None):
    """Maximize the curated-set lower bound over policies on ``grid``."""
    options = options or SolveOptions()
    y = np.asarray(y_grid, dtype=np.float64)
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    if len(y) != grid.shape[0]:
        raise DimensionError("y_grid and grid must have matching length")
    kbar = kernels.gram(kernel.unit(), grid)
    e_m = objective.expected_max_gaussian(params.m)

    w = np.full(len(y), 1.0 / len(y))
    value, grad, _ = _bound_and_grad(w, y, kbar, params, e_m)
    # Initial step from the gradient Lipschitz scale of the quadratic part.
    step = options.step or 1.0 / max(
        2.0 * params.sigma * e_m * float(np.linalg.norm(kbar, 2)), 1.0
    )
    for _ in range(options.max_iters):
        improved = False
        trial_step = step
        for _ in range(60):
            w_new = project_simplex(w + trial_step * grad)
            value_new, grad_new, _ = _bound_and_grad(w_new, y, kbar, params, e_m)
            if value_new > value:
                improved = True
                break
            trial_step *= 0.5
        if not improved:
            break
        gain = value_new - value
        w, value, grad = w_new, value_new, grad_new
        step = trial_step * 2.0
        if gain < options.tol * max(abs(value), 1.0):
            break
    return DiscretePolicy(grid=grid, weights=w)


def asymptotic_policy(kernel, grid, options=None):
    """Policy minimizing the induced correlation w' Kbar w alone.

    This is the sigma -> infinity limit of the curated-set bound, solved
    by accelerated projected gradient descent with monotone restarts.
    """
    options = options or SolveOptions(max_iters=20000)
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    kbar = kernels.gram(kernel.unit(), grid)
    n = grid.shape[0]
    lip = 2.0 * float(np.linalg.norm(kbar, 2))
    step = options.step or 1.0 / lip

    w = np.full(n, 1.0 / n)
    z = w.copy()
    t = 1.0
    q_best = float(w @ kbar @ w)
    w_best = w
    for _ in range(options.max_iters):
        grad = 2.0 * (kbar @ z)
        w_new = project_simplex(z - step * grad)
        q_new = float(w_new @ kbar @ w_new)
        if q_new > q_best:
            # Restart momentum whenever acceleration overshoots.
            z, t = w_best, 1.0
            w = w_best
            continue
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = w_new + ((t - 1.0) / t_new) * (w_new - w)
        shift = float(np.max(np.abs(w_new - w)))
        w, t = w_new, t_new
        if q_new < q_best:
            q_best, w_best = q_new, w_new
        if shift < options.tol:
            break
    return DiscretePolicy(grid=grid, weights=w_best)


def variance_max_policy(y_grid, delta, grid):
    """Half/half policy on the extreme points of the (1-delta)-optimal set.

    Among grid points whose quantitative value is within a (1-delta)
    factor of the best, put weight 1/2 on the smallest and 1/2 on the
    largest coordinate; this maximizes qualitative variance over that
    set for one-dimensional actions.
    """
    y = np.asarray(y_grid, dtype=np.float64)
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    if grid.shape[1] != 1:
        raise DimensionError("the two-point design is defined for 1-d grids")
    if len(y) != grid.shape[0]:
        raise DimensionError("y_grid and grid must have matching length")
    threshold = (1.0 - delta) * float(np.max(y))
    feasible = np.flatnonzero(y >= threshold)
    if len(feasible) == 0:
        raise InfeasibleError("no grid point reaches the (1-delta) level")
    coords = grid[feasible, 0]
    lo = feasible[int(np.argmin(coords))]
    hi = feasible[int(np.argmax(coords))]
    w = np.zeros(len(y))
    w[lo] += 0.5
    w[hi] += 0.5
    return DiscretePolicy(grid=grid, weights=w)
