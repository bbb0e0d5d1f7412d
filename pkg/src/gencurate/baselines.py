"""Comparison policies: Random, QO, QO+Noise, and Iterative Search."""

from dataclasses import dataclass

import numpy as np

from .dis_gc import InnerMaximizerConfig, maximize_scores
from .errors import InfeasibleError

METHODS = ("random", "qo", "qo-noise", "is")


@dataclass(frozen=True)
class BaselineConfig:
    method: str
    m: int = 20
    noise_std: float = None
    delta: float = 0.1
    seed: int = 0
    inner: InnerMaximizerConfig = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown baseline method {self.method!r}")
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        if self.noise_std is not None and self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")

    def run(self, problem):
        if self.method == "random":
            return random_policy(problem, self.m, self.seed)
        if self.method == "qo":
            return qo(problem, self.m, self.seed, inner=self.inner)
        if self.method == "qo-noise":
            return qo_noise(
                problem, self.m, noise_std=self.noise_std, seed=self.seed,
                inner=self.inner,
            )
        return iterative_search(
            problem, self.m, delta=self.delta, seed=self.seed, inner=self.inner
        )


def random_policy(problem, m, seed):
    """m i.i.d. uniform draws from the grid / feasible enumeration."""
    gen = np.random.default_rng(seed)
    idx = gen.integers(0, problem.space.size, size=m)
    return problem.space.points[idx]


def qo(problem, m, seed, inner=None):
    """m independent inner-maximizer runs on the quantitative score alone."""
    return qo_noise(problem, m, noise_std=0.0, seed=seed, inner=inner)


def qo_noise(problem, m, noise_std=None, seed=0, inner=None):
    """m independent maximizations of Y + fresh N(0, noise_std^2) per evaluation.

    noise_std defaults to 5% of the quantitative range.
    """
    inner = inner or InnerMaximizerConfig()
    y = np.asarray(problem.y_grid, dtype=np.float64)
    if noise_std is None:
        noise_std = 0.05 * float(np.max(y) - np.min(y))
    gen = np.random.default_rng(seed)
    chosen = [
        maximize_scores(y, problem.space, noise_std, inner, gen) for _ in range(m)
    ]
    return problem.space.points[chosen]


def iterative_search(problem, m, delta=0.1, seed=0, inner=None):
    """Greedy max-min-distance spread over the (1-delta)-optimal set.

    The first action is the QO result; each later action maximizes the
    minimum squared distance to everything already chosen, restricted to
    grid points with Y >= (1-delta) * max Y.  Squared Euclidean distance
    on binary vectors equals Hamming distance, so one code path serves
    both space kinds.
    """
    inner = inner or InnerMaximizerConfig()
    y = np.asarray(problem.y_grid, dtype=np.float64)
    gen = np.random.default_rng(seed)
    first = maximize_scores(y, problem.space, 0.0, inner, gen)

    threshold = (1.0 - delta) * float(np.max(y))
    if y[first] < threshold:
        # A stuck local search may miss the near-optimal set; every
        # emitted action must satisfy the optimality constraint, so fall
        # back to the exact grid argmax.
        first = int(np.argmax(y))
    feasible = np.flatnonzero(y >= threshold)
    if len(feasible) == 0:
        raise InfeasibleError("no grid point reaches the (1-delta) level")
    feasible_pts = problem.space.points[feasible]

    chosen = [first]
    min_d2 = np.sum((feasible_pts - problem.space.points[first]) ** 2, axis=1)
    for _ in range(m - 1):
        pick = int(np.argmax(min_d2))
        chosen.append(int(feasible[pick]))
        d2_new = np.sum((feasible_pts - feasible_pts[pick]) ** 2, axis=1)
        min_d2 = np.minimum(min_d2, d2_new)
    return problem.space.points[chosen]
