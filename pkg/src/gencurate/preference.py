"""Pairwise-preference posterior over qualitative desirability.

The belief over U on a fixed grid starts as the GP prior N(0, K) and is
refined by sequential Gaussian moment matching: each observed comparison
"winner beats loser" conditions on D = U(winner) - U(loser) > 0, whose
truncated-normal moments are matched by a fresh Gaussian before the next
comparison arrives.

With alpha = mu_D / sigma_D and the hazard lambda(x) = phi(x)/(1-Phi(x)),
conditioning on D > 0 truncates D below at 0, i.e. at the standardized
point -alpha, giving

    E[D | D > 0]   = mu_D + sigma_D * lambda(-alpha)
    Var[D | D > 0] = sigma_D^2 * (1 - lambda(-alpha) * (lambda(-alpha) + alpha))

and the joint update follows from U | D being linear-Gaussian:

    mu'    = mu + (c / sigma_D) * lambda(-alpha)
    Sigma' = Sigma - (c c^T / sigma_D^2) * lambda(-alpha) * (lambda(-alpha) + alpha)

where c = Cov(U, D) = Sigma[:, winner] - Sigma[:, loser].  The shrink
factor lambda(-alpha)*(lambda(-alpha) + alpha) lies in (0, 1), so the
update can never produce a negative variance.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import kernels
from .errors import DegenerateComparisonError, NumericError

#: Comparisons with Var(D) below this carry no usable information.
DEGENERATE_VAR = 1e-12


def hazard(x):
    """phi(x) / (1 - Phi(x)), stable for large |x| via log-space cdf tails."""
    return float(np.exp(norm.logpdf(x) - norm.logsf(x)))


@dataclass(frozen=True)
class PreferenceObservation:
    winner: np.ndarray
    loser: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.winner, dtype=np.float64))
        l = np.atleast_1d(np.asarray(self.loser, dtype=np.float64))
        object.__setattr__(self, "winner", w)
        object.__setattr__(self, "loser", l)
        if w.shape != l.shape:
            raise ValueError("winner and loser must have the same dimension")
        if np.array_equal(w, l):
            raise ValueError("winner and loser must differ")

    def to_json(self):
        return {"winner": self.winner.tolist(), "loser": self.loser.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(winner=obj["winner"], loser=obj["loser"])


@dataclass(frozen=True)
class PosteriorState:
    """Gaussian belief over U at fixed grid points (a value object)."""

    grid: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)
    kernel: kernels.Kernel
    history: tuple = ()

    @property
    def size(self):
        return self.grid.shape[0]

    def grid_index(self, a):
        """Row of the grid point nearest to ``a``."""
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        d2 = np.sum((self.grid - a) ** 2, axis=1)
        return int(np.argmin(d2))

    def to_json(self, include_cov=False):
        doc = {
            "grid": self.grid.tolist(),
            "mean": self.mean.tolist(),
            "cov_diag": np.diag(self.cov).tolist(),
            "kernel": self.kernel.to_json(),
            "history": [obs.to_json() for obs in self.history],
        }
        if include_cov:
            doc["cov"] = self.cov.tolist()
        return doc


def make_prior(kernel, grid):
    """Zero-mean prior with covariance gram(kernel, grid)."""
    grid = np.atleast_2d(np.asarray(grid, dtype=np.float64))
    return PosteriorState(
        grid=grid,
        mean=np.zeros(grid.shape[0]),
        cov=kernels.gram(kernel, grid),
        kernel=kernel,
    )


def _ensure_valid_cov(cov):
    cov = 0.5 * (cov + cov.T)
    diag = np.diag(cov)
    scale = max(float(np.max(np.abs(diag))), 1.0)
    if np.min(diag) < -1e-9 * scale:
        # Numerically broken; rebuild from clipped eigenvalues.
        vals, vecs = np.linalg.eigh(cov)
        if np.min(vals) < -1e-6 * scale:
            raise NumericError("posterior covariance lost positive semidefiniteness")
        cov = (vecs * np.maximum(vals, 0.0)) @ vecs.T
        cov = 0.5 * (cov + cov.T)
    elif np.min(diag) < 0:
        np.fill_diagonal(cov, np.maximum(diag, 0.0))
    return cov


def update(state, obs):
    """Condition on one comparison; returns a new PosteriorState."""
    i = state.grid_index(obs.winner)
    j = state.grid_index(obs.loser)
    cov, mean = state.cov, state.mean

    var_d = cov[i, i] + cov[j, j] - 2.0 * cov[i, j]
    if var_d <= DEGENERATE_VAR:
        raise DegenerateComparisonError(
            "compared actions are indistinguishable under the current posterior"
        )
    sd = np.sqrt(var_d)
    alpha = (mean[i] - mean[j]) / sd
    lam = hazard(-alpha)
    shrink = lam * (lam + alpha)

    c = cov[:, i] - cov[:, j]
    new_mean = mean + (c / sd) * lam
    new_cov = _ensure_valid_cov(cov - np.outer(c, c) * (shrink / var_d))
    return PosteriorState(
        grid=state.grid,
        mean=new_mean,
        cov=new_cov,
        kernel=state.kernel,
        history=state.history + (obs,),
    )


def replay(kernel, grid, observations):
    """Rebuild a posterior from scratch by applying observations in order."""
    state = make_prior(kernel, grid)
    for obs in observations:
        state = update(state, obs)
    return state


def predict(state, a):
    """Posterior (mean, variance) of U at a grid(-snapped) point."""
    idx = state.grid_index(a)
    return float(state.mean[idx]), float(state.cov[idx, idx])


def rank_candidates(state, candidates, y_values):
    """Candidate indices sorted by Y + posterior mean, descending.

    Ties keep the lower original index first.
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    y_values = np.asarray(y_values, dtype=np.float64)
    if candidates.shape[0] != len(y_values):
        raise ValueError("one Y value per candidate required")
    scores = np.array(
        [y + state.mean[state.grid_index(a)] for a, y in zip(candidates, y_values)]
    )
    return [int(k) for k in np.argsort(-scores, kind="stable")]
