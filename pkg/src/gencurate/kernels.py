"""Stationary covariance kernels over action spaces.

Four variants are supported, all with overall amplitude ``sigma2``:

* ``sqexp``    -- squared-exponential, ``sigma2 * exp(-||a - b||^2 / (2 h^2))``
* ``laplace``  -- Laplacian, ``sigma2 * exp(-||a - b|| / h)``
* ``white``    -- white noise, ``sigma2 * kappa * 1{a == b}``
* ``hamming``  -- exponential in Hamming distance for binary vectors,
  ``sigma2 * exp(-d_H(a, b) / h)``

Note the bandwidth scaling is not uniform across variants: the
squared-exponential divides the squared distance by ``2 h^2`` while the
Hamming variant divides the raw distance by ``h`` with no factor 2.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateKernelError, DimensionError

VARIANTS = ("sqexp", "laplace", "white", "hamming")

#: Relative jitter added to Gram diagonals before Cholesky factorization.
JITTER = 1e-8


@dataclass(frozen=True)
class Kernel:
    """A stationary kernel: variant tag plus hyperparameters.

    ``h`` is the bandwidth (ignored by ``white``); ``kappa`` scales only
    the white-noise variant; ``sigma2`` is the overall amplitude, i.e.
    the marginal variance ``k(a, a)`` except for white noise where the
    marginal variance is ``sigma2 * kappa``.
    """

    variant: str
    h: float = 1.0
    kappa: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant != "white" and not self.h > 0:
            raise ValueError("bandwidth h must be positive")
        if self.variant == "white" and not self.kappa > 0:
            raise ValueError("white-noise kappa must be positive")
        if self.sigma2 < 0:
            raise ValueError("amplitude sigma2 must be non-negative")

    def diagonal(self):
        """Marginal variance k(a, a)."""
        if self.variant == "white":
            return self.sigma2 * self.kappa
        return self.sigma2

    def with_amplitude(self, sigma2):
        return replace(self, sigma2=float(sigma2))

    def unit(self):
        """Rescaled copy with k(a, a) == 1 (correlation form)."""
        d = self.diagonal()
        if d <= 0:
            raise DegenerateKernelError("kernel has zero marginal variance")
        return replace(self, sigma2=self.sigma2 / d)

    def to_json(self):
        return {
            "variant": self.variant,
            "h": self.h,
            "kappa": self.kappa,
            "sigma2": self.sigma2,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            variant=obj["variant"],
            h=float(obj.get("h", 1.0)),
            kappa=float(obj.get("kappa", 1.0)),
            sigma2=float(obj.get("sigma2", 1.0)),
        )


def _as_points(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise DimensionError("kernel operands must be 1-d action vectors")
    if a.shape != b.shape:
        raise DimensionError(
            f"action dimensions differ: {a.shape[0]} vs {b.shape[0]}"
        )
    return a, b


def evaluate(kernel, a, b):
    """k(a, b) for a single pair of actions."""
    a, b = _as_points(a, b)
    if kernel.variant == "white":
        return kernel.sigma2 * kernel.kappa * float(np.array_equal(a, b))
    if kernel.variant == "sqexp":
        d2 = float(np.sum((a - b) ** 2))
        return kernel.sigma2 * float(np.exp(-d2 / (2.0 * kernel.h**2)))
    if kernel.variant == "laplace":
        d = float(np.sqrt(np.sum((a - b) ** 2)))
        return kernel.sigma2 * float(np.exp(-d / kernel.h))
    # hamming
    dh = float(np.sum(a != b))
    return kernel.sigma2 * float(np.exp(-dh / kernel.h))


def cross_gram(kernel, xa, xb):
    """Kernel matrix between two point sets, shape (len(xa), len(xb))."""
    xa = np.atleast_2d(np.asarray(xa, dtype=np.float64))
    xb = np.atleast_2d(np.asarray(xb, dtype=np.float64))
    if xa.shape[1] != xb.shape[1]:
        raise DimensionError(
            f"point sets have different dimension: {xa.shape[1]} vs {xb.shape[1]}"
        )
    if kernel.variant == "sqexp":
        d2 = cdist(xa, xb, metric="sqeuclidean")
        return kernel.sigma2 * np.exp(-d2 / (2.0 * kernel.h**2))
    if kernel.variant == "laplace":
        d = cdist(xa, xb, metric="euclidean")
        return kernel.sigma2 * np.exp(-d / kernel.h)
    if kernel.variant == "hamming":
        # cdist "hamming" returns the fraction of mismatched coordinates
        dh = cdist(xa, xb, metric="hamming") * xa.shape[1]
        return kernel.sigma2 * np.exp(-dh / kernel.h)
    # white: exact coincidence only
    eq = cdist(xa, xb, metric="chebyshev") == 0.0
    return kernel.sigma2 * kernel.kappa * eq.astype(np.float64)


def gram(kernel, points):
    """Symmetric kernel matrix of a point set."""
    return cross_gram(kernel, points, points)


def pair_correlations(kernel, xa, xb):
    """Unit-amplitude kernel values between row-aligned point pairs.

    Returns a length-len(xa) vector of kbar(xa[i], xb[i]); used for
    empirical correlation estimates where full Gram matrices would be
    wasteful.
    """
    xa = np.atleast_2d(np.asarray(xa, dtype=np.float64))
    xb = np.atleast_2d(np.asarray(xb, dtype=np.float64))
    if xa.shape != xb.shape:
        raise DimensionError(
            f"paired point sets differ in shape: {xa.shape} vs {xb.shape}"
        )
    if kernel.variant == "sqexp":
        d2 = np.sum((xa - xb) ** 2, axis=1)
        return np.exp(-d2 / (2.0 * kernel.h**2))
    if kernel.variant == "laplace":
        d = np.sqrt(np.sum((xa - xb) ** 2, axis=1))
        return np.exp(-d / kernel.h)
    if kernel.variant == "hamming":
        dh = np.sum(xa != xb, axis=1).astype(np.float64)
        return np.exp(-dh / kernel.h)
    return np.all(xa == xb, axis=1).astype(np.float64)
