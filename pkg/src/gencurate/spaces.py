"""Finite action spaces: regular box grids and enumerated binary sets.

Both space kinds expose the same small surface used throughout the
package: ``points`` (an (n, dim) float array of every candidate action),
``size``, ``dim``, ``is_discrete`` and ``index_of`` for snapping an
action to its grid index.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BoxSpace:
    """Regular grid over an axis-aligned box.

    ``axes`` holds the per-axis coordinate vectors; ``points`` is their
    cartesian product in C order (last axis varies fastest), so the flat
    index of grid cell (i0, i1, ...) is ``np.ravel_multi_index``.
    """

    lows: np.ndarray
    highs: np.ndarray
    shape: tuple
    axes: tuple = field(repr=False)
    points: np.ndarray = field(repr=False)

    is_discrete = False

    @classmethod
    def regular(cls, bounds, points_per_axis):
        """Build from [(low, high), ...] and per-axis point counts."""
        bounds = [(float(lo), float(hi)) for lo, hi in bounds]
        if isinstance(points_per_axis, int):
            points_per_axis = [points_per_axis] * len(bounds)
        if len(points_per_axis) != len(bounds):
            raise ValueError("one point count per axis required")
        axes = []
        for (lo, hi), n in zip(bounds, points_per_axis):
            if not hi > lo:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            if n < 2:
                raise ValueError("need at least 2 points per axis")
            axes.append(np.linspace(lo, hi, n))
        mesh = np.meshgrid(*axes, indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        return cls(
            lows=np.array([b[0] for b in bounds]),
            highs=np.array([b[1] for b in bounds]),
            shape=tuple(points_per_axis),
            axes=tuple(axes),
            points=points,
        )

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return len(self.shape)

    def contains(self, a):
        a = np.asarray(a, dtype=np.float64)
        return bool(np.all(a >= self.lows) and np.all(a <= self.highs))

    def index_of(self, a):
        """Flat index of the grid point nearest to ``a`` (must be in the box)."""
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        if a.shape != (self.dim,):
            raise DomainError(f"expected a {self.dim}-d action, got shape {a.shape}")
        if not self.contains(a):
            raise DomainError(f"action {a.tolist()} outside box")
        idx = [int(np.argmin(np.abs(ax - x))) for ax, x in zip(self.axes, a)]
        return int(np.ravel_multi_index(idx, self.shape))

    def to_json(self):
        return {
            "kind": "box",
            "bounds": [[lo, hi] for lo, hi in zip(self.lows, self.highs)],
            "shape": list(self.shape),
        }

    @classmethod
    def from_json(cls, obj):
        return cls.regular(obj["bounds"], list(obj["shape"]))


@dataclass(frozen=True)
class BinarySpace:
    """Explicit enumeration of feasible binary vectors of length ``dim``.

    ``codes`` packs each vector into an integer (bit j = coordinate j);
    ``code_to_index`` maps every one of the 2^dim codes to its row in
    ``points`` or -1 when infeasible, which gives the compiled inner
    loop O(1) feasibility checks.
    """

    dim: int
    points: np.ndarray = field(repr=False)
    codes: np.ndarray = field(repr=False)
    code_to_index: np.ndarray = field(repr=False)

    is_discrete = True

    @classmethod
    def from_feasible(cls, dim, feasible_bits):
        if dim > 20:
            raise ValueError(
                f"binary spaces are enumerated explicitly; dim={dim} exceeds the "
                "2^20 enumeration limit"
            )
        points = np.asarray(feasible_bits, dtype=np.float64).reshape(-1, dim)
        if not np.all((points == 0) | (points == 1)):
            raise ValueError("feasible set must contain binary vectors")
        weights = (1 << np.arange(dim)).astype(np.int64)
        codes = (points.astype(np.int64) @ weights).astype(np.int64)
        if len(np.unique(codes)) != len(codes):
            raise ValueError("duplicate vectors in feasible set")
        code_to_index = np.full(1 << dim, -1, dtype=np.int64)
        code_to_index[codes] = np.arange(len(codes))
        return cls(dim=dim, points=points, codes=codes, code_to_index=code_to_index)

    @property
    def size(self):
        return self.points.shape[0]

    def index_of(self, a):
        a = np.atleast_1d(np.asarray(a))
        if a.shape != (self.dim,):
            raise DomainError(f"expected a {self.dim}-d action, got shape {a.shape}")
        bits = np.rint(a).astype(np.int64)
        if not np.all((bits == 0) | (bits == 1)):
            raise DomainError(f"action {a.tolist()} is not a binary vector")
        code = int(bits @ (1 << np.arange(self.dim)))
        idx = int(self.code_to_index[code])
        if idx < 0:
            raise DomainError(f"action {bits.tolist()} violates the feasibility set")
        return idx

    def to_json(self):
        return {"kind": "binary", "dim": self.dim, "codes": self.codes.tolist()}

    @classmethod
    def from_json(cls, obj):
        dim = int(obj["dim"])
        codes = np.asarray(obj["codes"], dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(dim)) & 1).astype(np.float64)
        return cls.from_feasible(dim, bits)


def space_from_json(obj):
    if obj["kind"] == "box":
        return BoxSpace.from_json(obj)
    if obj["kind"] == "binary":
        return BinarySpace.from_json(obj)
    raise ValueError(f"unknown space kind {obj['kind']!r}")
