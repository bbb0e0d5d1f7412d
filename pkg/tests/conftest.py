import numpy as np
import pytest

from gencurate import bench, kernels, spaces


@pytest.fixture(scope="session")
def gauss1d():
    return bench.make_gaussian1d()


@pytest.fixture(scope="session")
def ackley2d():
    return bench.make_ackley2d()


@pytest.fixture(scope="session")
def knapsack10():
    return bench.make_knapsack(d=10, capacity=20, seed=0)


@pytest.fixture(scope="session")
def toy_knapsack():
    """3-item knapsack with weights (5, 10, 20), values (1, 2, 4), capacity 20.

    Small enough to verify against exhaustive enumeration of all 8 subsets:
    feasible selections are {}, {1}, {2}, {3}, {1,2}; the optimum is {3}
    with value 4.
    """
    weights = np.array([5.0, 10.0, 20.0])
    values = np.array([1.0, 2.0, 4.0])
    bits = ((np.arange(8)[:, None] >> np.arange(3)) & 1).astype(np.float64)
    feasible = bits[bits @ weights <= 20.0]
    space = spaces.BinarySpace.from_feasible(3, feasible)
    return bench.Problem(
        name="knapsack-toy",
        space=space,
        y_grid=space.points @ values,
        kernel=kernels.Kernel("hamming", h=0.5),
        sigma=10.0,
        metric="hamming",
        extras={"weights": weights.tolist(), "values": values.tolist(), "capacity": 20},
    )


@pytest.fixture(scope="session")
def one_point_problem():
    """Degenerate single-action space (the empty selection of one item)."""
    space = spaces.BinarySpace.from_feasible(1, [[0.0]])
    return bench.Problem(
        name="one-point",
        space=space,
        y_grid=np.zeros(1),
        kernel=kernels.Kernel("hamming", h=0.5),
        sigma=1.0,
        metric="hamming",
    )
