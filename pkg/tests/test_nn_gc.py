"""Tests for the noise-to-action generator.

Gradient correctness is the load-bearing property here: the backward
pass is hand-derived through the squashing output, the grid
interpolation of Y, and the pairwise kernel term, so it gets checked
against central differences and against small hand-computed instances.
"""

import math

import numpy as np
import pytest

from gencurate import bench, kernels, nn_gc, objective
from gencurate.errors import DimensionError
from gencurate.nn_gc import GeneratorNet, TrainConfig


def params(sigma=1.0, m=5, kernel=None):
    return objective.CurationObjectiveParams(
        sigma=sigma, m=m, kernel=kernel or kernels.Kernel("sqexp", h=1.0)
    )


def quadratic_bowl(center=0.5):
    """Smooth stand-in for grid interpolation: y(a) = -|a - c|^2."""

    def evaluate(actions):
        diff = actions - center
        return -np.sum(diff * diff, axis=1), -2.0 * diff

    return evaluate


class TestGeneratorNet:
    def test_param_count_layout(self):
        assert nn_gc.param_count((3, 4, 2)) == (3 + 1) * 4 + (4 + 1) * 2

    def test_init_shapes_and_determinism(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=4, hidden=8, depth=2, seed=3)
        assert net.layer_dims == (4, 8, 8, 1)
        assert net.noise_dim == 4 and net.action_dim == 1
        twin = nn_gc.init_net(gauss1d.space, noise_dim=4, hidden=8, depth=2, seed=3)
        assert np.array_equal(net.params, twin.params)

    def test_init_rejects_discrete_space(self, toy_knapsack):
        with pytest.raises(ValueError):
            nn_gc.init_net(toy_knapsack.space)

    def test_rejects_wrong_param_length(self):
        with pytest.raises(DimensionError):
            GeneratorNet(
                layer_dims=(2, 1), params=np.zeros(5), box_low=[0.0], box_high=[1.0]
            )

    def test_rejects_unknown_squash(self):
        with pytest.raises(ValueError):
            GeneratorNet(
                layer_dims=(1, 1),
                params=np.zeros(2),
                box_low=[0.0],
                box_high=[1.0],
                squash="relu",
            )

    def test_json_round_trip(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=3, hidden=5, depth=1, seed=1)
        back = GeneratorNet.from_json(net.to_json())
        assert back.layer_dims == net.layer_dims
        assert np.array_equal(back.params, net.params)
        assert back.squash == "tanh"

    def test_tanh_squash_stays_inside_box(self, ackley2d):
        net = nn_gc.init_net(ackley2d.space, noise_dim=6, hidden=8, depth=2, seed=0)
        actions = nn_gc.sample_actions(net, 300, sigma2_nn=25.0, seed=2)
        assert actions.shape == (300, 2)
        assert np.all(actions > ackley2d.space.lows)
        assert np.all(actions < ackley2d.space.highs)


class TestGridEvaluator:
    def test_linear_interpolation_1d(self, gauss1d):
        y_eval = nn_gc.grid_evaluator(gauss1d.space, gauss1d.y_grid)
        x = gauss1d.space.points[:5]
        vals, grads = y_eval(x)
        assert vals == pytest.approx(gauss1d.y_grid[:5])
        mid = 0.5 * (x[1] + x[2])
        vals_mid, grads_mid = y_eval(mid[None, :])
        assert vals_mid[0] == pytest.approx(
            0.5 * (gauss1d.y_grid[1] + gauss1d.y_grid[2])
        )
        width = gauss1d.space.points[2, 0] - gauss1d.space.points[1, 0]
        assert grads_mid[0, 0] == pytest.approx(
            (gauss1d.y_grid[2] - gauss1d.y_grid[1]) / width
        )

    def test_bilinear_interpolation_2d(self):
        from gencurate import spaces

        space = spaces.BoxSpace.regular([(0.0, 1.0), (0.0, 1.0)], 2)
        y = np.array([0.0, 1.0, 2.0, 4.0])  # f(0,0), f(0,1), f(1,0), f(1,1)
        y_eval = nn_gc.grid_evaluator(space, y)
        vals, grads = y_eval(np.array([[0.5, 0.5]]))
        assert vals[0] == pytest.approx(np.mean(y))
        assert grads[0] == pytest.approx([(2 + 4 - 0 - 1) / 2.0, (1 + 4 - 0 - 2) / 2.0])

    def test_rejects_discrete_and_high_dim(self, toy_knapsack):
        from gencurate import spaces

        with pytest.raises(ValueError):
            nn_gc.grid_evaluator(toy_knapsack.space, toy_knapsack.y_grid)
        cube = spaces.BoxSpace.regular([(0, 1)] * 3, 4)
        with pytest.raises(ValueError):
            nn_gc.grid_evaluator(cube, np.zeros(cube.size))


class TestObjectiveArithmetic:
    def test_hand_computed_value(self):
        # One batch element, m = 2 pairs, affine 1-d generator a = 2e + 0.5.
        net = GeneratorNet(
            layer_dims=(1, 1),
            params=[2.0, 0.5],
            box_low=[0.0],
            box_high=[1.0],
            squash="identity",
        )
        eps = np.array([[[-1.0], [0.0], [1.0], [2.0]]])
        p = params(sigma=1.5, m=2)

        def linear(actions):
            return 3.0 * actions[:, 0], np.full_like(actions, 3.0)

        value, grad = nn_gc._objective_and_grad(
            net, eps, linear, kernels.Kernel("sqexp", h=1.0), p
        )
        expected = 3.0 * 1.5 + 1.5 * math.sqrt(1.0 - math.exp(-2.0)) * (
            objective.expected_max_gaussian(2)
        )
        assert value == pytest.approx(expected, rel=1e-12)
        assert grad.shape == (2,)

    def test_m_one_removes_kernel_dependence(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=3, hidden=6, depth=1, seed=0)
        p = params(sigma=4.0, m=1)
        kw = dict(batch_n=16, seed=5)
        a = nn_gc.batch_objective(net, gauss1d, kernels.Kernel("sqexp", h=0.1), p, **kw)
        b = nn_gc.batch_objective(net, gauss1d, kernels.Kernel("laplace", h=2.0), p, **kw)
        assert a == b

    def test_degenerate_generator_has_zero_gradient(self, gauss1d):
        # All-zero weights collapse every action onto the box center; the
        # diversity root sits on its floor clamp and contributes nothing.
        net = GeneratorNet(
            layer_dims=(2, 1),
            params=np.zeros(3),
            box_low=[0.0],
            box_high=[1.0],
        )
        eps = 0.3 * np.random.default_rng(0).standard_normal((3, 4, 2))

        def flat(actions):
            return np.zeros(len(actions)), np.zeros_like(actions)

        p = params(sigma=5.0, m=2)
        value, grad = nn_gc._objective_and_grad(
            net, eps, flat, kernels.Kernel("sqexp", h=1.0), p
        )
        floor_value = 5.0 * math.sqrt(nn_gc.SQRT_FLOOR) * objective.expected_max_gaussian(2)
        assert value == pytest.approx(floor_value, rel=1e-9)
        assert np.all(grad == 0.0)


class TestGradientCheck:
    @pytest.mark.parametrize("squash", ["identity", "tanh"])
    def test_smooth_surrogate_matches_finite_differences(self, gauss1d, squash):
        net = nn_gc.init_net(
            gauss1d.space, noise_dim=4, hidden=10, depth=2, seed=1, squash=squash
        )
        err = nn_gc.gradient_check(
            net,
            gauss1d,
            kernels.Kernel("sqexp", h=0.5),
            params(sigma=1.0, m=3),
            y_eval=quadratic_bowl(),
            seed=2,
        )
        assert err < 1e-5

    def test_interpolated_scores_on_2d_grid(self, ackley2d):
        net = nn_gc.init_net(ackley2d.space, noise_dim=5, hidden=12, depth=2, seed=0)
        err = nn_gc.gradient_check(
            net, ackley2d, kernels.Kernel("sqexp", h=1.0), params(sigma=1.0, m=5), seed=0
        )
        assert err < 1e-4


class TestTraining:
    def test_zero_learning_rate_freezes_parameters(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=3, hidden=6, depth=1, seed=0)
        cfg = TrainConfig(batch_n=8, iters=5, lr=0.0, seed=0)
        trained, trace = nn_gc.train(net, gauss1d, gauss1d.kernel, params(m=3), cfg)
        assert np.array_equal(trained.params, net.params)
        assert np.all(trace == trace[0])

    def test_trace_is_non_decreasing(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=4, hidden=8, depth=2, seed=2)
        cfg = TrainConfig(batch_n=8, iters=40, lr=0.05, seed=1)
        _, trace = nn_gc.train(net, gauss1d, gauss1d.kernel, params(sigma=0.5, m=3), cfg)
        assert np.all(np.diff(trace) >= -1e-12)

    def test_m_mismatch_rejected(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=3, hidden=4, depth=1, seed=0)
        cfg = TrainConfig(batch_n=4, iters=2, m=7)
        with pytest.raises(ValueError):
            nn_gc.train(net, gauss1d, gauss1d.kernel, params(m=3), cfg)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"batch_n": 0},
            {"iters": 0},
            {"m": 0},
            {"lr": -0.1},
            {"sigma2_nn": -1.0},
        ],
    )
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_pure_exploitation_concentrates_on_peak(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=4, hidden=16, depth=2, seed=0)
        cfg = TrainConfig(batch_n=16, iters=150, lr=0.05, sigma2_nn=0.1, seed=0)
        trained, _ = nn_gc.train(net, gauss1d, gauss1d.kernel, params(sigma=0.0, m=5), cfg)
        actions = nn_gc.sample_actions(trained, 200, sigma2_nn=0.1, seed=1)
        assert abs(actions[:, 0].mean() - 0.5) < 0.05

    def test_high_sigma_spreads_ackley_batch(self, ackley2d):
        net = nn_gc.init_net(ackley2d.space, noise_dim=6, hidden=16, depth=2, seed=0)
        cfg = TrainConfig(batch_n=16, iters=120, lr=0.05, sigma2_nn=0.1, seed=0)
        p = params(sigma=10.0, m=5, kernel=ackley2d.kernel)
        trained, _ = nn_gc.train(net, ackley2d, ackley2d.kernel, p, cfg)
        actions = nn_gc.sample_actions(trained, 400, sigma2_nn=0.1, seed=3)
        rho = objective.rho_empirical(ackley2d.kernel.unit(), actions)
        assert 1.0 - rho > 0.5


class TestSampling:
    def test_rejects_non_positive_count(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=2, hidden=4, depth=1, seed=0)
        with pytest.raises(ValueError):
            nn_gc.sample_actions(net, 0, sigma2_nn=0.1, seed=0)

    def test_seeded_draws_reproduce(self, gauss1d):
        net = nn_gc.init_net(gauss1d.space, noise_dim=2, hidden=4, depth=1, seed=0)
        a = nn_gc.sample_actions(net, 10, sigma2_nn=0.1, seed=4)
        b = nn_gc.sample_actions(net, 10, sigma2_nn=0.1, seed=4)
        assert np.array_equal(a, b)
