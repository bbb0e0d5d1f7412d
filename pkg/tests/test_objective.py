import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.special import ndtri

from gencurate import kernels, objective
from gencurate.errors import DimensionError, DomainError
from gencurate.grid_solver import DiscretePolicy


def mc_expected_max(m, n_samples, seed=0):
    """Monte-Carlo oracle for E[max of m iid N(0,1)] via the inverse CDF.

    max of m uniforms is distributed as U^(1/m), so the expected maximum
    equals E[ndtri(U^(1/m))] -- one uniform per sample instead of m
    normals, which keeps the 1e7-sample acceptance oracle cheap.
    """
    u = np.random.default_rng(seed).random(n_samples)
    return float(np.mean(ndtri(u ** (1.0 / m))))


def test_expected_max_m1_is_exactly_zero():
    assert objective.expected_max_gaussian(1) == 0.0


def test_expected_max_m2_analytic():
    # E[max(Z1, Z2)] = 1/sqrt(pi)
    npt.assert_allclose(
        objective.expected_max_gaussian(2), 1.0 / math.sqrt(math.pi), atol=1e-4
    )


def test_expected_max_m10_oracle():
    npt.assert_allclose(
        objective.expected_max_gaussian(10), mc_expected_max(10, 10**7), atol=1e-3
    )


def test_expected_max_asymptotic_branch():
    # Above the quadrature cutoff the tail expansion is used verbatim.
    m = 10**6 + 1
    lead = math.sqrt(2.0 * math.log(m))
    two_term = lead - (math.log(math.log(m)) + math.log(4.0 * math.pi)) / (2.0 * lead)
    assert objective.expected_max_gaussian(m) == pytest.approx(two_term, rel=1e-12)


def test_expected_max_branch_continuity():
    """The tail expansion converges slowly: ~2% low at the branch point."""
    quad = objective.expected_max_gaussian(10**6)
    asym = objective.expected_max_gaussian(10**6 + 1)
    assert asym < quad
    assert abs(quad - asym) / quad < 0.03


def test_expected_max_strictly_increasing():
    vals = [objective.expected_max_gaussian(m) for m in range(1, 60)]
    assert np.all(np.diff(vals) > 0)
    assert all(v >= 0 for v in vals)


@pytest.mark.parametrize("bad", [0, -3, 2.0, True])
def test_expected_max_rejects_bad_m(bad):
    with pytest.raises(DomainError):
        objective.expected_max_gaussian(bad)


def unit_params(sigma=1.0, m=2, kernel=None):
    return objective.CurationObjectiveParams(
        sigma=sigma, m=m, kernel=kernel or kernels.Kernel("sqexp")
    )


def test_params_validation():
    with pytest.raises(ValueError):
        unit_params(sigma=-0.1)
    with pytest.raises(ValueError):
        unit_params(m=0)
    with pytest.raises(ValueError):
        unit_params(m=2.5)


class TestRhoExact:
    def test_point_mass_is_one(self):
        k = kernels.Kernel("sqexp", sigma2=4.0)
        pol = DiscretePolicy(grid=[[0.3]], weights=[1.0])
        npt.assert_allclose(objective.rho_exact(k, pol), 1.0, rtol=1e-12)

    def test_white_uniform_four_points(self):
        k = kernels.Kernel("white")
        pol = DiscretePolicy(grid=[[0.0], [1.0], [2.0], [3.0]], weights=[0.25] * 4)
        npt.assert_allclose(objective.rho_exact(k, pol), 0.25, rtol=1e-12)

    def test_sqexp_two_point_uniform(self):
        k = kernels.Kernel("sqexp", h=1.0)
        pol = DiscretePolicy(grid=[[0.0], [math.sqrt(2.0)]], weights=[0.5, 0.5])
        npt.assert_allclose(
            objective.rho_exact(k, pol), (1.0 + math.exp(-1.0)) / 2.0, rtol=1e-12
        )

    def test_in_unit_interval_for_random_policies(self):
        gen = np.random.default_rng(7)
        for variant in ("sqexp", "laplace", "white"):
            k = kernels.Kernel(variant, h=0.6, sigma2=2.0)
            for _ in range(5):
                grid = gen.normal(size=(12, 2))
                w = gen.random(12)
                pol = DiscretePolicy(grid=grid, weights=w / w.sum())
                rho = objective.rho_exact(k, pol)
                assert -1e-12 <= rho <= 1.0 + 1e-12


class TestRhoEmpirical:
    def test_identical_samples(self):
        k = kernels.Kernel("sqexp")
        assert objective.rho_empirical(k, [[0.3]] * 6) == 1.0

    def test_white_distinct_samples(self):
        k = kernels.Kernel("white")
        samples = np.arange(8.0).reshape(-1, 1)
        assert objective.rho_empirical(k, samples) == 0.0

    def test_odd_trailing_sample_dropped(self):
        k = kernels.Kernel("white")
        # pairs (0,0) and (1,1) match; the trailing 2 is ignored
        samples = [[0.0], [0.0], [1.0], [1.0], [2.0]]
        assert objective.rho_empirical(k, samples) == 1.0

    def test_fewer_than_two_samples_raises(self):
        k = kernels.Kernel("sqexp")
        with pytest.raises(DomainError):
            objective.rho_empirical(k, [[0.1]])

    def test_converges_to_rho_exact(self):
        gen = np.random.default_rng(42)
        grid = gen.normal(size=(15, 1))
        w = gen.random(15)
        pol = DiscretePolicy(grid=grid, weights=w / w.sum())
        k = kernels.Kernel("sqexp", h=0.7)
        idx = pol.sample_indices(10**5, np.random.default_rng(1))
        rho_hat = objective.rho_empirical(k, grid[idx])
        npt.assert_allclose(rho_hat, objective.rho_exact(k, pol), atol=1e-2)


class TestBounds:
    def test_m1_reduces_to_expected_y(self):
        p = unit_params(sigma=3.0, m=1)
        assert objective.lower_bound_value(1.7, 0.2, p) == 1.7
        assert objective.upper_bound_value(1.7, 0.2, p) == 1.7

    def test_rho_one_kills_the_bonus(self):
        p = unit_params(sigma=3.0, m=5)
        assert objective.lower_bound_value(1.7, 1.0, p) == 1.7

    def test_lower_bound_m2_unit(self):
        p = unit_params(sigma=1.0, m=2)
        npt.assert_allclose(
            objective.lower_bound_value(0.0, 0.0, p), 1.0 / math.sqrt(math.pi), atol=1e-4
        )

    def test_rho_overshoot_clamped(self):
        p = unit_params(sigma=1.0, m=3)
        assert objective.lower_bound_value(0.5, 1.0 + 1e-12, p) == 0.5

    def test_upper_dominates_lower(self):
        gen = np.random.default_rng(8)
        y = gen.normal(size=20)
        w = gen.random(20)
        w /= w.sum()
        p = unit_params(sigma=0.7, m=4)
        e_y = float(y @ w)
        e_max = objective.expected_max_y(y, w, 4, n_samples=20000, rng=9)
        rho = 0.3
        assert objective.upper_bound_value(e_max, rho, p) >= objective.lower_bound_value(
            e_y, rho, p
        )


class TestExpectedMaxY:
    def test_deterministic_policy(self):
        y = np.array([0.1, 2.0, 0.5])
        w = np.array([0.0, 1.0, 0.0])
        assert objective.expected_max_y(y, w, 7, n_samples=100, rng=0) == 2.0

    def test_matches_pair_enumeration(self):
        # E[max(Y_i, Y_j)] over 25 ordered pairs of a uniform 5-point policy
        y = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        w = np.full(5, 0.2)
        exact = sum(
            w[i] * w[j] * max(y[i], y[j]) for i in range(5) for j in range(5)
        )
        mc = objective.expected_max_y(y, w, 2, n_samples=400_000, rng=3)
        npt.assert_allclose(mc, exact, atol=5e-3)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            objective.expected_max_y([1.0, 2.0], [1.0], 2)


def test_lower_bound_midpoint_concavity():
    """f(w) = y.w + sigma sqrt(1 - w'Kw) E_m is concave on the simplex."""
    gen = np.random.default_rng(13)
    grid = np.linspace(0.0, 1.0, 30)[:, None]
    y = gen.normal(size=30)
    k = kernels.Kernel("sqexp", h=0.3)
    p = unit_params(sigma=0.8, m=10, kernel=k)

    def f(w):
        pol = DiscretePolicy(grid=grid, weights=w)
        return objective.lower_bound_value(
            pol.expected_y(y), objective.rho_exact(k, pol), p
        )

    for _ in range(20):
        w1 = gen.random(30)
        w1 /= w1.sum()
        w2 = gen.random(30)
        w2 /= w2.sum()
        mid = 0.5 * (w1 + w2)
        assert f(mid) >= 0.5 * (f(w1) + f(w2)) - 1e-10


def test_diversity_gain_formula():
    p = unit_params(sigma=2.0, m=2)
    npt.assert_allclose(
        objective.diversity_gain(0.75, p),
        2.0 * 0.5 * objective.expected_max_gaussian(2),
        rtol=1e-12,
    )
