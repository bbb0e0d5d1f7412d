"""Benchmark problems, the repeated-trial experiment harness, and reports.

Three synthetic problems: a 1-d Gaussian bump, the negated 2-d Ackley
surface, and a knapsack with its feasible set enumerated explicitly.
Each experiment trial draws a fresh qualitative GP realization, runs
every method against the same frozen truth, and records the regret of
the emitted recommendation set plus its empirical diversity.
"""

import concurrent.futures
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import baselines, dis_gc, gp_truth, kernels, nn_gc, objective, spaces

ALL_METHODS = ("dis-gc", "nn-gc", "random", "qo", "qo-noise", "is")


@dataclass(frozen=True)
class Problem:
    """A benchmark: finite space, quantitative scores, kernel defaults."""

    name: str
    space: object
    y_grid: np.ndarray = field(repr=False)
    kernel: kernels.Kernel
    sigma: float
    metric: str = "euclidean"
    extras: dict = field(default_factory=dict)

    @property
    def y_max(self):
        return float(np.max(self.y_grid))


def make_gaussian1d():
    """Gaussian bump on [0, 1]: peak 1 at 0.5, width 0.1, 200-point grid."""
    space = spaces.BoxSpace.regular([(0.0, 1.0)], 200)
    y = np.exp(-((space.points[:, 0] - 0.5) ** 2) / (2.0 * 0.1**2))
    return Problem(
        name="gauss1d",
        space=space,
        y_grid=y,
        kernel=kernels.Kernel("sqexp", h=1.0),
        sigma=0.25,
    )


def _neg_ackley(points):
    a1, a2 = points[:, 0], points[:, 1]
    sq = 0.5 * (a1**2 + a2**2)
    cos = 0.5 * (np.cos(2 * np.pi * a1) + np.cos(2 * np.pi * a2))
    return 20.0 * np.exp(-0.2 * np.sqrt(sq)) + np.exp(cos) - 20.0 - np.e


def make_ackley2d():
    """Negated Ackley on [-3, 3]^2 with a 60x60 grid; maximum 0 at origin."""
    space = spaces.BoxSpace.regular([(-3.0, 3.0), (-3.0, 3.0)], 60)
    return Problem(
        name="ackley2d",
        space=space,
        y_grid=_neg_ackley(space.points),
        kernel=kernels.Kernel("sqexp", h=0.5),
        sigma=10.0,
    )


def make_knapsack(d=10, capacity=20, seed=0):
    """Knapsack with Uniform{0..10} integer weights/values and an
    exhaustively enumerated feasible set (d capped at 20)."""
    if d > 20:
        raise ValueError(f"knapsack enumeration capped at d=20, got {d}")
    gen = np.random.default_rng(seed)
    weights = gen.integers(0, 11, size=d)
    values = gen.integers(0, 11, size=d)
    all_bits = ((np.arange(1 << d)[:, None] >> np.arange(d)) & 1).astype(np.float64)
    feasible = all_bits[all_bits @ weights <= capacity]
    space = spaces.BinarySpace.from_feasible(d, feasible)
    return Problem(
        name="knapsack",
        space=space,
        y_grid=space.points @ values.astype(np.float64),
        kernel=kernels.Kernel("hamming", h=0.5),
        sigma=10.0,
        metric="hamming",
        extras={
            "weights": weights.tolist(),
            "values": values.tolist(),
            "capacity": capacity,
        },
    )


def make_problem(tag, **kwargs):
    if tag == "gauss1d":
        return make_gaussian1d()
    if tag == "ackley2d":
        return make_ackley2d()
    if tag == "knapsack":
        return make_knapsack(**kwargs)
    raise ValueError(f"unknown problem {tag!r}")


@dataclass(frozen=True)
class MethodSettings:
    """Hyperparameters shared by the harness and the CLI."""

    dis_n: int = 50
    dis_t: int = 1000
    sigma2_dis: float = 2e-2
    nn_width: int = 64
    nn_batch: int = 64
    nn_iters: int = 500
    nn_lr: float = 0.05
    sigma2_nn: float = 0.1
    noise_std: float = None
    delta: float = 0.1
    inner: dis_gc.InnerMaximizerConfig = None

    def to_json(self):
        doc = {
            "dis_n": self.dis_n,
            "dis_t": self.dis_t,
            "sigma2_dis": self.sigma2_dis,
            "nn_width": self.nn_width,
            "nn_batch": self.nn_batch,
            "nn_iters": self.nn_iters,
            "nn_lr": self.nn_lr,
            "sigma2_nn": self.sigma2_nn,
            "noise_std": self.noise_std,
            "delta": self.delta,
        }
        return doc


def subseed(seed, *tags):
    """Derive a child seed key from a master seed plus integer tags."""
    base = [int(s) for s in np.atleast_1d(seed)]
    return base + [int(t) for t in tags]


def run_method(method, problem, m, seed, settings=None):
    """Emit one recommendation set of m actions for one method tag."""
    settings = settings or MethodSettings()
    params = objective.CurationObjectiveParams(
        sigma=problem.sigma, m=m, kernel=problem.kernel
    )
    if method == "dis-gc":
        actions, _ = dis_gc.run(
            problem,
            problem.kernel,
            params,
            n=settings.dis_n,
            T=settings.dis_t,
            sigma2_dis=settings.sigma2_dis,
            inner=settings.inner,
            seed=seed,
        )
        return actions
    if method == "nn-gc":
        net = nn_gc.init_net(
            problem.space, hidden=settings.nn_width, seed=subseed(seed, 1)
        )
        cfg = nn_gc.TrainConfig(
            batch_n=settings.nn_batch,
            sigma2_nn=settings.sigma2_nn,
            iters=settings.nn_iters,
            lr=settings.nn_lr,
            seed=subseed(seed, 2),
        )
        trained, _ = nn_gc.train(net, problem, problem.kernel, params, cfg)
        return nn_gc.sample_actions(
            trained, m, settings.sigma2_nn, seed=subseed(seed, 3)
        )
    if method == "random":
        return baselines.random_policy(problem, m, seed)
    if method == "qo":
        return baselines.qo(problem, m, seed, inner=settings.inner)
    if method == "qo-noise":
        return baselines.qo_noise(
            problem, m, noise_std=settings.noise_std, seed=seed, inner=settings.inner
        )
    if method == "is":
        return baselines.iterative_search(
            problem, m, delta=settings.delta, seed=seed, inner=settings.inner
        )
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ExperimentReport:
    problem: str
    trials: int
    m: int
    seed: int
    rows: tuple
    config: dict

    def row(self, method):
        for r in self.rows:
            if r["method"] == method:
                return r
        raise KeyError(method)

    def to_json(self):
        return {
            "problem": self.problem,
            "trials": self.trials,
            "m": self.m,
            "seed": self.seed,
            "rows": list(self.rows),
            "config": self.config,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            problem=obj["problem"],
            trials=obj["trials"],
            m=obj["m"],
            seed=obj["seed"],
            rows=tuple(obj["rows"]),
            config=obj["config"],
        )


def _one_trial(problem, methods, m, seed, trial, settings):
    truth = gp_truth.sample_realization(
        problem.space,
        problem.y_grid,
        problem.kernel.with_amplitude(problem.sigma**2),
        seed=subseed(seed, trial, 101),
    )
    record = {}
    for k, method in enumerate(methods):
        try:
            actions = run_method(
                method, problem, m, seed=subseed(seed, trial, k), settings=settings
            )
            rho = objective.rho_empirical(problem.kernel, actions)
            record[method] = {
                "regret": truth.regret(actions),
                "diversity": float(np.sqrt(max(1.0 - rho, 0.0))),
            }
        except Exception as exc:  # noqa: BLE001 - per-trial failures are data
            record[method] = {"error": f"{type(exc).__name__}: {exc}"}
    return record


def run_experiment(problem, methods, trials=50, m=20, seed=0, settings=None, threads=1):
    """Repeated-trial comparison; returns (report, per-trial log)."""
    if not methods:
        raise ValueError("need at least one method")
    settings = settings or MethodSettings()
    trial_log = [None] * trials
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_one_trial, problem, methods, m, seed, t, settings): t
                for t in range(trials)
            }
            for fut in concurrent.futures.as_completed(futures):
                trial_log[futures[fut]] = fut.result()
    else:
        for t in range(trials):
            trial_log[t] = _one_trial(problem, methods, m, seed, t, settings)

    rows = []
    for method in methods:
        regrets = [
            rec[method]["regret"] for rec in trial_log if "regret" in rec[method]
        ]
        diversities = [
            rec[method]["diversity"] for rec in trial_log if "diversity" in rec[method]
        ]
        failed = trials - len(regrets)
        row = {"method": method, "failed_trials": failed}
        if regrets:
            row.update(
                mean_regret=float(np.mean(regrets)),
                low=float(np.quantile(regrets, 0.05)),
                up=float(np.quantile(regrets, 0.95)),
                diversity=float(np.mean(diversities)),
            )
        rows.append(row)

    config = {
        "problem": problem.name,
        "sigma": problem.sigma,
        "kernel": problem.kernel.to_json(),
        "settings": settings.to_json(),
        "extras": problem.extras,
    }
    report = ExperimentReport(
        problem=problem.name,
        trials=trials,
        m=m,
        seed=seed,
        rows=tuple(rows),
        config=config,
    )
    return report, trial_log


REPORT_COLUMNS = ("method", "mean_regret", "low", "up", "diversity")


def write_report(report, path, fmt="csv"):
    """Write the aggregate report; JSON round-trips bit-exactly."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [row["method"]]
                + [repr(row[c]) if c in row else "" for c in REPORT_COLUMNS[1:]]
            )


def read_report(path):
    with open(path) as fh:
        return ExperimentReport.from_json(json.load(fh))


def write_trial_log(trial_log, path):
    """Per-trial records as JSON lines."""
    with open(path, "w") as fh:
        for t, rec in enumerate(trial_log):
            fh.write(json.dumps({"trial": t, "results": rec}, sort_keys=True))
            fh.write("\n")
