"""Noise-to-action generator trained on the sampled curation bound.

A small tanh MLP maps noise vectors to actions inside the action box.
Training freezes one noise sample of n batch elements x 2m actions and
ascends

    (1/2m) sum_j Y(a_ij)
    + sigma * sqrt(clamp(1 - (1/m) sum_j kbar(a_{i,2j}, a_{i,2j-1}), floor, 1)) * E_m

averaged over i.  The backward pass is derived
by hand (layer-by-layer) including the bilinear grid interpolation of Y
and the pairwise kernel terms; ``gradient_check`` compares it against
central finite differences.

Only continuous (box) spaces are supported; enumerated discrete spaces
are served by diversified iterative search instead.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import objective
from .errors import DimensionError, TrainingError

#: Lower clamp of the diversity square root's argument.
SQRT_FLOOR = 1e-9


@dataclass(frozen=True)
class GeneratorNet:
    """MLP weights plus the box-squashing output map.

    ``params`` is the flat parameter vector laid out layer by layer as
    (weight matrix row-major, bias); hidden activations are tanh, the
    output is affine followed by ``squash``:

    * "tanh": center + halfwidth * tanh(.), guaranteeing box membership;
    * "identity": raw affine output (analysis/testing only).
    """

    layer_dims: tuple
    params: np.ndarray
    box_low: np.ndarray
    box_high: np.ndarray
    squash: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        object.__setattr__(
            self, "params", np.asarray(self.params, dtype=np.float64).copy()
        )
        object.__setattr__(
            self, "box_low", np.asarray(self.box_low, dtype=np.float64)
        )
        object.__setattr__(
            self, "box_high", np.asarray(self.box_high, dtype=np.float64)
        )
        if self.squash not in ("tanh", "identity"):
            raise ValueError(f"unknown squash {self.squash!r}")
        if len(self.params) != param_count(self.layer_dims):
            raise DimensionError(
                f"parameter vector has length {len(self.params)}, layout "
                f"{self.layer_dims} needs {param_count(self.layer_dims)}"
            )

    @property
    def noise_dim(self):
        return self.layer_dims[0]

    @property
    def action_dim(self):
        return self.layer_dims[-1]

    def to_json(self):
        return {
            "layer_dims": list(self.layer_dims),
            "params": self.params.tolist(),
            "box_low": self.box_low.tolist(),
            "box_high": self.box_high.tolist(),
            "squash": self.squash,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            layer_dims=tuple(obj["layer_dims"]),
            params=np.asarray(obj["params"], dtype=np.float64),
            box_low=np.asarray(obj["box_low"], dtype=np.float64),
            box_high=np.asarray(obj["box_high"], dtype=np.float64),
            squash=obj.get("squash", "tanh"),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters.  ``m`` (recommendation count) defaults
    to the objective params' m when left as None."""

    batch_n: int = 64
    m: int = None
    sigma2_nn: float = 0.1
    iters: int = 500
    lr: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.batch_n < 1 or self.iters < 1:
            raise ValueError("batch_n and iters must be positive")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be positive")
        if not self.lr >= 0:
            raise ValueError("learning rate must be non-negative")
        if self.sigma2_nn < 0:
            raise ValueError("sigma2_nn must be non-negative")


def param_count(layer_dims):
    return sum(
        (layer_dims[i] + 1) * layer_dims[i + 1] for i in range(len(layer_dims) - 1)
    )


def _layer_views(layer_dims, flat):
    """Yield (W, b) array views into the flat parameter vector."""
    off = 0
    for i in range(len(layer_dims) - 1):
        d_in, d_out = layer_dims[i], layer_dims[i + 1]
        w = flat[off : off + d_in * d_out].reshape(d_out, d_in)
        off += d_in * d_out
        b = flat[off : off + d_out]
        off += d_out
        yield w, b


def init_net(space, noise_dim=10, hidden=64, depth=2, seed=0, squash="tanh"):
    """Xavier-initialized generator for a box space."""
    if space.is_discrete:
        raise ValueError("the generator network requires a continuous box space")
    dims = (noise_dim,) + (hidden,) * depth + (space.dim,)
    gen = np.random.default_rng(seed)
    chunks = []
    for i in range(len(dims) - 1):
        scale = np.sqrt(2.0 / (dims[i] + dims[i + 1]))
        chunks.append(gen.standard_normal(dims[i] * dims[i + 1]) * scale)
        chunks.append(np.zeros(dims[i + 1]))
    return GeneratorNet(
        layer_dims=dims,
        params=np.concatenate(chunks),
        box_low=space.lows,
        box_high=space.highs,
        squash=squash,
    )


def _forward(net, eps):
    """Forward pass with cached activations for the backward pass."""
    xs = [np.atleast_2d(np.asarray(eps, dtype=np.float64))]
    views = list(_layer_views(net.layer_dims, net.params))
    for w, b in views[:-1]:
        xs.append(np.tanh(xs[-1] @ w.T + b))
    w, b = views[-1]
    z_out = xs[-1] @ w.T + b
    if net.squash == "tanh":
        t = np.tanh(z_out)
        center = 0.5 * (net.box_low + net.box_high)
        half = 0.5 * (net.box_high - net.box_low)
        actions = center + half * t
        dact_dz = half * (1.0 - t * t)
    else:
        actions = z_out
        dact_dz = np.ones_like(z_out)
    return actions, (xs, dact_dz)


def forward(net, eps):
    """Actions for a batch of noise vectors, shape (batch, action_dim)."""
    return _forward(net, eps)[0]


def _backward(net, cache, g_actions):
    """Map dJ/dactions back to a flat dJ/dparams vector."""
    xs, dact_dz = cache
    views = list(_layer_views(net.layer_dims, net.params))
    grads = [None] * len(views)
    g = g_actions * dact_dz
    for layer in range(len(views) - 1, -1, -1):
        w, _ = views[layer]
        grads[layer] = (g.T @ xs[layer], g.sum(axis=0))
        if layer > 0:
            g = (g @ w) * (1.0 - xs[layer] * xs[layer])
    return np.concatenate([np.concatenate([gw.ravel(), gb]) for gw, gb in grads])


def grid_evaluator(space, y_grid):
    """Piecewise-(bi)linear interpolator of grid scores.

    Returns a callable mapping (batch, dim) actions to (values, gradients);
    this is what makes grid-defined quantitative scores differentiable.
    """
    y = np.asarray(y_grid, dtype=np.float64)
    if space.is_discrete:
        raise ValueError("interpolation needs a box space")

    def _cell(ax, x):
        i = np.clip(np.searchsorted(ax, x, side="right") - 1, 0, len(ax) - 2)
        width = ax[i + 1] - ax[i]
        return i, (x - ax[i]) / width, width

    if space.dim == 1:
        ax = space.axes[0]

        def evaluate(actions):
            x = actions[:, 0]
            i, t, width = _cell(ax, x)
            vals = y[i] * (1.0 - t) + y[i + 1] * t
            grads = ((y[i + 1] - y[i]) / width)[:, None]
            return vals, grads

        return evaluate

    if space.dim == 2:
        ax0, ax1 = space.axes
        yy = y.reshape(space.shape)

        def evaluate(actions):
            i, tx, w0 = _cell(ax0, actions[:, 0])
            j, ty, w1 = _cell(ax1, actions[:, 1])
            f00, f10 = yy[i, j], yy[i + 1, j]
            f01, f11 = yy[i, j + 1], yy[i + 1, j + 1]
            vals = (
                f00 * (1 - tx) * (1 - ty)
                + f10 * tx * (1 - ty)
                + f01 * (1 - tx) * ty
                + f11 * tx * ty
            )
            g0 = ((f10 - f00) * (1 - ty) + (f11 - f01) * ty) / w0
            g1 = ((f01 - f00) * (1 - tx) + (f11 - f10) * tx) / w1
            return vals, np.stack([g0, g1], axis=1)

        return evaluate

    raise ValueError("grid interpolation implemented for 1-d and 2-d boxes")


def _pair_kernel(kernel, a, b):
    """Unit-amplitude kernel over row pairs with gradients wrt both rows."""
    if kernel.variant == "sqexp":
        diff = a - b
        k = np.exp(-np.sum(diff * diff, axis=-1) / (2.0 * kernel.h**2))
        ga = k[..., None] * (-diff) / kernel.h**2
        return k, ga, -ga
    if kernel.variant == "laplace":
        diff = a - b
        r = np.sqrt(np.sum(diff * diff, axis=-1))
        k = np.exp(-r / kernel.h)
        safe = np.where(r > 0, r, 1.0)
        ga = k[..., None] * (-diff) / (kernel.h * safe[..., None])
        ga[r == 0] = 0.0
        return k, ga, -ga
    if kernel.variant == "white":
        k = np.all(a == b, axis=-1).astype(np.float64)
        return k, np.zeros_like(a), np.zeros_like(b)
    raise ValueError(
        f"kernel variant {kernel.variant!r} has no continuous-action gradient"
    )


def _objective_and_grad(net, eps, y_eval, kernel, params, with_grad=True):
    """Sampled curation objective and its flat parameter gradient.

    ``eps`` has shape (n, 2m, noise_dim); pair j of batch element i is
    (actions[i, 2j], actions[i, 2j+1]).  With ``with_grad=False`` the
    backward pass is skipped and the gradient slot is None.
    """
    n, two_m, _ = eps.shape
    m = two_m // 2
    e_m = objective.expected_max_gaussian(params.m)

    actions, cache = _forward(net, eps.reshape(n * two_m, -1))
    y_vals, y_grads = y_eval(actions)

    acts = actions.reshape(n, two_m, -1)
    k_vals, g_even, g_odd = _pair_kernel(kernel, acts[:, 0::2, :], acts[:, 1::2, :])
    raw = 1.0 - np.mean(k_vals, axis=1)
    arg = np.clip(raw, SQRT_FLOOR, 1.0)
    root = np.sqrt(arg)

    value = float(
        np.mean(y_vals.reshape(n, two_m).mean(axis=1) + params.sigma * root * e_m)
    )
    if not with_grad:
        return value, None

    # dJ/dactions: quantitative term ...
    g_actions = y_grads / (n * two_m)
    # ... plus the diversity term (zero where the clamp is active).
    active = (raw > SQRT_FLOOR) & (raw < 1.0)
    coef = np.where(active, -params.sigma * e_m / (2.0 * root * m * n), 0.0)
    g_pairs = np.zeros_like(acts)
    g_pairs[:, 0::2, :] = coef[:, None, None] * g_even
    g_pairs[:, 1::2, :] = coef[:, None, None] * g_odd
    g_actions = g_actions + g_pairs.reshape(n * two_m, -1)

    return value, _backward(net, cache, g_actions)


def _resolve_y_eval(problem, y_eval):
    return y_eval if y_eval is not None else grid_evaluator(problem.space, problem.y_grid)


def batch_objective(net, problem, kernel, params, batch_n, seed, sigma2_nn=0.1, y_eval=None):
    """One sampled value of the training objective."""
    gen = np.random.default_rng(seed)
    eps = np.sqrt(sigma2_nn) * gen.standard_normal(
        (batch_n, 2 * params.m, net.noise_dim)
    )
    return _objective_and_grad(
        net, eps, _resolve_y_eval(problem, y_eval), kernel, params
    )[0]


def train(net, problem, kernel, params, cfg, y_eval=None):
    """Guarded adaptive gradient ascent; returns (trained net, trace).

    The noise tensor is frozen up front (a sample-average approximation
    of the population objective with batch_n * 2m draws), so the ascent
    is deterministic and the trace reflects parameter progress rather
    than resampling noise.  Fresh noise enters only at generation time.

    Steps follow Adam-style first/second-moment scaling with ``cfg.lr``
    as the step size; a step that would decrease the frozen objective is
    halved until it improves, which keeps the trace non-decreasing even
    when actions sit on interpolation-cell edges where the
    piecewise-linear Y has kinks.
    """
    y_eval = _resolve_y_eval(problem, y_eval)
    m = cfg.m if cfg.m is not None else params.m
    if m != params.m:
        raise ValueError("recommendation count disagrees with objective params")
    gen = np.random.default_rng(cfg.seed)
    eps = np.sqrt(cfg.sigma2_nn) * gen.standard_normal(
        (cfg.batch_n, 2 * m, net.noise_dim)
    )
    theta = net.params.copy()
    trace = np.empty(cfg.iters)
    current = net
    mom = np.zeros_like(theta)
    vel = np.zeros_like(theta)
    beta1, beta2 = 0.9, 0.999

    def line_search(value, direction):
        scale = 1.0
        for _ in range(20):
            candidate = theta + cfg.lr * scale * direction
            trial, _ = _objective_and_grad(
                replace(current, params=candidate),
                eps,
                y_eval,
                kernel,
                params,
                with_grad=False,
            )
            if trial >= value:
                return candidate
            scale *= 0.5
        return None

    for it in range(cfg.iters):
        value, grad = _objective_and_grad(current, eps, y_eval, kernel, params)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            raise TrainingError(
                f"non-finite objective or gradient at iteration {it}", iteration=it
            )
        trace[it] = value
        mom = beta1 * mom + (1.0 - beta1) * grad
        vel = beta2 * vel + (1.0 - beta2) * grad * grad
        mhat = mom / (1.0 - beta1 ** (it + 1))
        vhat = vel / (1.0 - beta2 ** (it + 1))
        accepted = line_search(value, mhat / (np.sqrt(vhat) + 1e-8))
        if accepted is None:
            # The momentum direction has gone stale; drop it and retry
            # along the bare (max-normalized) gradient before giving up.
            mom[:] = 0.0
            vel[:] = grad * grad
            accepted = line_search(value, grad / (np.abs(grad).max() + 1e-8))
        if accepted is None:
            # No improving step at any scale: converged; hold the
            # parameters and let the trace stay flat.
            trace[it + 1 :] = value
            break
        theta = accepted
        current = replace(current, params=theta)
    return current, trace


def sample_actions(net, count, sigma2_nn, seed):
    """Draw ``count`` actions from the generator."""
    if count < 1:
        raise ValueError("count must be positive")
    gen = np.random.default_rng(seed)
    eps = np.sqrt(sigma2_nn) * gen.standard_normal((count, net.noise_dim))
    return forward(net, eps)


def gradient_check(
    net,
    problem,
    kernel,
    params,
    seed=0,
    batch_n=4,
    n_params=200,
    step=1e-5,
    y_eval=None,
):
    """Max relative error of the analytic gradient vs central differences."""
    y_eval = _resolve_y_eval(problem, y_eval)
    gen = np.random.default_rng(seed)
    eps = np.sqrt(0.1) * gen.standard_normal((batch_n, 2 * params.m, net.noise_dim))
    _, analytic = _objective_and_grad(net, eps, y_eval, kernel, params)

    picks = np.random.default_rng([seed, 1]).permutation(len(net.params))[
        : min(n_params, len(net.params))
    ]
    worst = 0.0
    for k in picks:
        shifted = net.params.copy()
        shifted[k] += step
        up, _ = _objective_and_grad(replace(net, params=shifted), eps, y_eval, kernel, params)
        shifted[k] -= 2.0 * step
        down, _ = _objective_and_grad(replace(net, params=shifted), eps, y_eval, kernel, params)
        fd = (up - down) / (2.0 * step)
        rel = abs(analytic[k] - fd) / max(abs(analytic[k]), abs(fd), 1e-6)
        worst = max(worst, rel)
    return worst
