"""Diversified Iterative Search.

Actions are generated one at a time.  The first ``n`` iterations warm up
by maximizing the quantitative score plus evaluation noise; afterwards
each iteration maximizes

    Y(a) + sigma * sqrt(1 - (1/n) sum_j kbar(a_j, a)) * E_m + eps(a)

against the FIFO buffer of the last n accepted actions, with eps fresh
i.i.d. N(0, sigma2_dis) noise per candidate evaluation.  The emitted
recommendation set is the last m buffer entries.

The mean kernel column over the buffer is maintained incrementally (one
column added, one subtracted per iteration), so candidate scoring inside
the inner maximizer is a plain array lookup.
"""

import collections
from dataclasses import dataclass, field

import numpy as np

from . import _inner, kernels, objective


@dataclass(frozen=True)
class InnerMaximizerConfig:
    """Settings for the per-iteration maximizer.

    ``mode`` is resolved from the action space when left as "auto";
    continuous grids use multi-start noisy coordinate ascent, enumerated
    binary spaces use simulated annealing over bit flips.
    """

    mode: str = "auto"
    restarts: int = 16
    steps: int = 500
    step_size: int = 1
    anneal_steps: int = 2000
    t0: float = 1.0
    gamma: float = 0.995
    seed: int = None

    def __post_init__(self):
        if self.mode not in ("auto", "continuous-multistart", "discrete-annealing"):
            raise ValueError(f"unknown inner-maximizer mode {self.mode!r}")
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.restarts < 1 or self.steps < 1 or self.anneal_steps < 1:
            raise ValueError("restarts and step counts must be positive")
        if self.step_size < 1:
            raise ValueError("step_size must be >= 1")

    def resolve_mode(self, space):
        if self.mode == "auto":
            return "discrete-annealing" if space.is_discrete else "continuous-multistart"
        if self.mode == "discrete-annealing" and not space.is_discrete:
            raise ValueError("annealing mode requires an enumerated discrete space")
        if self.mode == "continuous-multistart" and space.is_discrete:
            raise ValueError("multistart mode requires a continuous grid space")
        return self.mode


@dataclass
class CurationState:
    """Run history: accepted actions, buffer view, per-iteration trace.

    Both traced statistics describe the buffer: ``rho_hat`` is the mean
    kernel correlation over all distinct buffer pairs (the U-statistic
    estimate of rho for the current sampling state) and ``regret`` is
    the regret of the buffer contents. Emitted-set metrics are a
    separate concern and live in the benchmark harness.
    """

    space: object
    n: int
    accepted_indices: list = field(default_factory=list)
    objective_trace: list = field(default_factory=list)
    rho_hat_trace: list = field(default_factory=list)
    regret_trace: list = field(default_factory=list)

    @property
    def t(self):
        return len(self.accepted_indices)

    def buffer_indices(self, upto=None):
        """Indices in the FIFO buffer after iteration ``upto`` (default: now)."""
        upto = self.t if upto is None else upto
        return self.accepted_indices[max(0, upto - self.n) : upto]

    @property
    def buffer(self):
        return self.space.points[self.buffer_indices()]

    def trace_rows(self):
        """Iterable of (iteration, objective, rho_hat, regret) rows."""
        for i in range(self.t):
            yield (
                i + 1,
                self.objective_trace[i],
                self.rho_hat_trace[i],
                self.regret_trace[i],
            )


def maximize_scores(base, space, noise_std, inner, gen):
    """One inner-maximizer call over precomputed candidate scores."""
    mode = inner.resolve_mode(space)
    base = np.ascontiguousarray(base, dtype=np.float64)
    if mode == "discrete-annealing":
        idx, _ = _inner.anneal_codes(
            base,
            space.codes,
            space.code_to_index,
            space.dim,
            noise_std,
            inner.restarts,
            inner.anneal_steps,
            inner.t0,
            inner.gamma,
            gen,
        )
    else:
        dims = np.asarray(space.shape, dtype=np.int64)
        idx, _ = _inner.ascend_grid(
            base, dims, noise_std, inner.restarts, inner.steps, inner.step_size, gen
        )
    if idx < 0 or idx >= space.size:
        raise RuntimeError("inner maximizer returned an out-of-space index")
    return int(idx)


def diversity_score(kernel, buffer, candidate, params):
    """sigma * sqrt(clamp(1 - mean_j kbar(a_j, candidate), 0, 1)) * E_m.

    Kernel values are normalized to unit amplitude so the mean is a
    correlation in [0, 1].
    """
    buffer = np.atleast_2d(np.asarray(buffer, dtype=np.float64))
    if buffer.shape[0] == 0:
        raise ValueError("diversity score needs a non-empty buffer")
    candidate = np.asarray(candidate, dtype=np.float64).reshape(1, -1)
    mean_corr = float(np.mean(kernels.cross_gram(kernel.unit(), buffer, candidate)))
    slack = np.clip(1.0 - mean_corr, 0.0, 1.0)
    return params.sigma * float(np.sqrt(slack)) * objective.expected_max_gaussian(params.m)


def run(
    problem,
    kernel,
    params,
    n=50,
    T=1000,
    sigma2_dis=2e-2,
    inner=None,
    seed=0,
    truth=None,
):
    """Run T iterations and return (actions, state), actions = last m accepted."""
    if T < n:
        raise ValueError(f"need T >= n, got T={T} n={n}")
    if n < params.m:
        raise ValueError(f"need n >= m, got n={n} m={params.m}")
    if sigma2_dis < 0:
        raise ValueError("sigma2_dis must be non-negative")
    inner = inner or InnerMaximizerConfig()
    space = problem.space
    y = np.asarray(problem.y_grid, dtype=np.float64)
    unit = kernel.unit()
    e_m = objective.expected_max_gaussian(params.m)
    noise_std = float(np.sqrt(sigma2_dis))
    gen = np.random.default_rng(seed)

    state = CurationState(space=space, n=n)
    div_columns = collections.deque()
    div_sum = np.zeros(space.size)
    optimum = truth.optimum() if truth is not None else None

    for t in range(1, T + 1):
        if t <= n:
            base = y
        else:
            mean_corr = div_sum / n
            bonus = params.sigma * np.sqrt(np.clip(1.0 - mean_corr, 0.0, 1.0)) * e_m
            base = y + bonus
        idx = maximize_scores(base, space, noise_std, inner, gen)

        state.accepted_indices.append(idx)
        column = kernels.cross_gram(
            unit, space.points[idx : idx + 1], space.points
        )[0]
        div_columns.append(column)
        div_sum += column
        if len(div_columns) > n:
            div_sum -= div_columns.popleft()

        state.objective_trace.append(float(base[idx]))
        in_buffer = state.buffer_indices()
        size = len(in_buffer)
        if size < 2:
            rho_hat = float("nan")
        else:
            # Sum of k over all ordered buffer pairs, read off the cached
            # columns; subtract the diagonal (k(a, a) = 1) before averaging.
            total = float(np.sum(div_sum[in_buffer]))
            rho_hat = (total - size) / (size * (size - 1))
        state.rho_hat_trace.append(rho_hat)
        state.regret_trace.append(
            float(optimum - np.max(truth.ell_values[in_buffer]))
            if truth is not None
            else float("nan")
        )

    actions = space.points[state.accepted_indices[-params.m :]]
    return actions, state
