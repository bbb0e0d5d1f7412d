"""Synthetic ground truth: desirability = quantitative score + a GP draw.

The qualitative component U is a single fixed realization of a zero-mean
Gaussian process over the whole grid, sampled once per experiment so the
latent "taste" stays constant while methods are compared against it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels, spaces
from .errors import NumericError


@dataclass(frozen=True)
class GroundTruth:
    """Frozen desirability surface over a finite space."""

    space: object
    y_values: np.ndarray = field(repr=False)
    u_values: np.ndarray = field(repr=False)
    kernel: kernels.Kernel
    seed: int

    @property
    def ell_values(self):
        return self.y_values + self.u_values

    def desirability(self, a):
        """Y(a) + U(a) for an action on (or snapped to) the grid."""
        return float(self.ell_values[self.space.index_of(a)])

    def argmax_index(self):
        return int(np.argmax(self.ell_values))

    def optimum(self):
        return float(np.max(self.ell_values))

    def regret(self, actions):
        """Best achievable desirability minus the best achieved one."""
        actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
        best = max(self.desirability(a) for a in actions)
        return self.optimum() - best

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "y_values": self.y_values.tolist(),
            "u_values": self.u_values.tolist(),
            "kernel": self.kernel.to_json(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            space=spaces.space_from_json(obj["space"]),
            y_values=np.asarray(obj["y_values"], dtype=np.float64),
            u_values=np.asarray(obj["u_values"], dtype=np.float64),
            kernel=kernels.Kernel.from_json(obj["kernel"]),
            seed=obj["seed"],
        )


def cholesky_with_jitter(matrix, relative_jitter=kernels.JITTER):
    """Lower Cholesky factor, escalating diagonal jitter on failure.

    Jitter is relative to the mean diagonal; it starts at ``relative_jitter``
    and escalates by 10x up to 1e-4 before giving up.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    scale = float(np.mean(np.diag(matrix)))
    if scale <= 0:
        scale = 1.0
    jitter = relative_jitter
    while jitter <= 1e-4:
        try:
            return np.linalg.cholesky(matrix + jitter * scale * np.eye(len(matrix)))
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NumericError(
        "covariance factorization failed even with jitter up to 1e-4"
    )


def sample_realization(space, quantitative, kernel, seed):
    """Draw one GP realization of U over ``space`` and freeze Y + U.

    ``quantitative`` is either a callable evaluated on the (n, dim)
    point array or a length-n vector of precomputed Y values.
    """
    points = space.points
    if callable(quantitative):
        y_values = np.asarray(quantitative(points), dtype=np.float64).reshape(-1)
    else:
        y_values = np.asarray(quantitative, dtype=np.float64).reshape(-1)
    if y_values.shape[0] != space.size:
        raise ValueError(
            f"quantitative values have length {y_values.shape[0]}, "
            f"space has {space.size} points"
        )
    if kernel.diagonal() == 0.0:
        u_values = np.zeros(space.size)
    else:
        cov = kernels.gram(kernel, points)
        factor = cholesky_with_jitter(cov)
        z = np.random.default_rng(seed).standard_normal(space.size)
        u_values = factor @ z
    return GroundTruth(
        space=space, y_values=y_values, u_values=u_values, kernel=kernel, seed=seed
    )
