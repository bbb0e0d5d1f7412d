"""Command-line entry point.

Subcommands: em, solve-grid, asymptotic, curate, bench, serve.  Results
go to stdout or ``--out`` files (machine-readable only); logs and the
fully resolved configuration echo go to stderr.  A JSON config file may
supply any flag's value; explicit flags win.

Exit codes: 0 success, 2 argument error, 1 runtime error.
"""

import argparse
import json
import sys

from . import bench, dis_gc, grid_solver, kernels, nn_gc, objective


def _policy_csv(path_or_stdout, policy):
    dim = policy.grid.shape[1]
    lines = [",".join([f"x{i}" for i in range(dim)] + ["weight"])]
    for point, w in zip(policy.grid, policy.weights):
        lines.append(",".join([repr(float(c)) for c in point] + [repr(float(w))]))
    _emit(path_or_stdout, "\n".join(lines) + "\n")


def _actions_csv(path_or_stdout, problem, actions):
    dim = actions.shape[1]
    y = [float(problem.y_grid[problem.space.index_of(a)]) for a in actions]
    lines = [",".join([f"x{i}" for i in range(dim)] + ["y"])]
    for a, v in zip(actions, y):
        lines.append(",".join([repr(float(c)) for c in a] + [repr(v)]))
    _emit(path_or_stdout, "\n".join(lines) + "\n")


def _trace_csv(path, state):
    lines = ["iteration,objective,rho_hat,regret"]
    for it, obj, rho, regret in state.trace_rows():
        lines.append(f"{it},{obj!r},{rho!r},{regret!r}")
    _emit(path, "\n".join(lines) + "\n")


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _echo_config(args):
    resolved = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")
    }
    print(f"config: {json.dumps(resolved, sort_keys=True)}", file=sys.stderr)


def _problem_from_args(args):
    if args.problem == "knapsack":
        return bench.make_knapsack(
            d=args.knapsack_d, capacity=args.knapsack_capacity, seed=args.knapsack_seed
        )
    return bench.make_problem(args.problem)


def _kernel_from_args(args, problem=None):
    if args.kernel is None and problem is not None:
        base = problem.kernel
    else:
        base = kernels.Kernel(
            variant=args.kernel or "sqexp",
            h=args.h if args.h is not None else 1.0,
            kappa=args.kappa,
        )
        return base
    if args.h is not None:
        base = kernels.Kernel(
            variant=base.variant, h=args.h, kappa=base.kappa, sigma2=base.sigma2
        )
    return base


def _cmd_em(args):
    value = objective.expected_max_gaussian(args.m)
    print(repr(value))
    return 0


def _cmd_solve_grid(args):
    problem = _problem_from_args(args)
    kernel = _kernel_from_args(args, problem)
    sigma = args.sigma if args.sigma is not None else problem.sigma
    params = objective.CurationObjectiveParams(sigma=sigma, m=args.m, kernel=kernel)
    policy = grid_solver.optimize_policy(
        problem.y_grid, kernel, params, problem.space.points,
        grid_solver.SolveOptions(max_iters=args.max_iters),
    )
    _policy_csv(args.out, policy)
    return 0


def _cmd_asymptotic(args):
    problem = _problem_from_args(args)
    kernel = _kernel_from_args(args, problem)
    policy = grid_solver.asymptotic_policy(
        kernel, problem.space.points,
        grid_solver.SolveOptions(max_iters=args.max_iters),
    )
    _policy_csv(args.out, policy)
    return 0


def _cmd_curate(args):
    problem = _problem_from_args(args)
    kernel = _kernel_from_args(args, problem)
    sigma = args.sigma if args.sigma is not None else problem.sigma
    params = objective.CurationObjectiveParams(sigma=sigma, m=args.m, kernel=kernel)
    settings = bench.MethodSettings(
        dis_n=args.n,
        dis_t=args.iterations,
        sigma2_dis=args.sigma2_dis,
        nn_width=args.width,
        nn_iters=args.nn_iters,
        nn_lr=args.lr,
        sigma2_nn=args.sigma2_nn,
        noise_std=args.noise_std,
        delta=args.delta,
    )
    if args.method == "dis-gc":
        actions, state = dis_gc.run(
            problem, kernel, params,
            n=args.n, T=args.iterations, sigma2_dis=args.sigma2_dis, seed=args.seed,
        )
        if args.trace:
            _trace_csv(args.trace, state)
    elif args.method == "nn-gc":
        net = nn_gc.init_net(problem.space, hidden=args.width, seed=bench.subseed(args.seed, 1))
        cfg = nn_gc.TrainConfig(
            batch_n=args.nn_batch, sigma2_nn=args.sigma2_nn, iters=args.nn_iters,
            lr=args.lr, seed=bench.subseed(args.seed, 2),
        )
        trained, _ = nn_gc.train(net, problem, kernel, params, cfg)
        actions = nn_gc.sample_actions(
            trained, args.m, args.sigma2_nn, seed=bench.subseed(args.seed, 3)
        )
        if args.model:
            _emit(args.model, json.dumps(trained.to_json(), sort_keys=True) + "\n")
    else:
        actions = bench.run_method(
            args.method, problem, args.m, seed=args.seed, settings=settings
        )
    _actions_csv(args.out, problem, actions)
    return 0


def _cmd_bench(args):
    problem = _problem_from_args(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    settings = bench.MethodSettings(
        dis_n=args.n,
        dis_t=args.iterations,
        sigma2_dis=args.sigma2_dis,
        nn_width=args.width,
        nn_iters=args.nn_iters,
        nn_lr=args.lr,
        sigma2_nn=args.sigma2_nn,
        noise_std=args.noise_std,
        delta=args.delta,
    )
    report, trial_log = bench.run_experiment(
        problem, methods, trials=args.trials, m=args.m, seed=args.seed,
        settings=settings, threads=args.threads,
    )
    fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    if args.out:
        bench.write_report(report, args.out, fmt=fmt)
    else:
        print(json.dumps(report.to_json(), sort_keys=True))
    if args.trial_log:
        bench.write_trial_log(trial_log, args.trial_log)
    return 0


def _cmd_serve(args):
    import pathlib

    import uvicorn

    from . import service

    frontend = args.frontend_dir
    if frontend is None:
        default = pathlib.Path("frontend") / "dist"
        frontend = str(default) if default.is_dir() else None
    app = service.create_app(session_dir=args.session_dir, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_problem_flags(sub):
    sub.add_argument(
        "--problem", choices=("gauss1d", "ackley2d", "knapsack"), default="gauss1d"
    )
    sub.add_argument("--knapsack-d", type=int, default=10)
    sub.add_argument("--knapsack-capacity", type=int, default=20)
    sub.add_argument("--knapsack-seed", type=int, default=0)
    sub.add_argument("--kernel", choices=kernels.VARIANTS, default=None)
    sub.add_argument("--h", type=float, default=None)
    sub.add_argument("--kappa", type=float, default=1.0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gencurate",
        description="Curated candidate generation and preference refinement.",
    )
    parser.add_argument("--config", default=None, help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("em", help="expected maximum of m standard normals")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_em)

    p = sub.add_parser("solve-grid", help="optimize the curation lower bound")
    _add_problem_flags(p)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_solve_grid)

    p = sub.add_parser("asymptotic", help="minimize policy correlation alone")
    _add_problem_flags(p)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_asymptotic)

    p = sub.add_parser("curate", help="emit one recommendation set")
    _add_problem_flags(p)
    p.add_argument(
        "--method", choices=bench.ALL_METHODS, default="dis-gc"
    )
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=50, help="buffer size (dis-gc)")
    p.add_argument("--iterations", type=int, default=1000, help="dis-gc iterations")
    p.add_argument("--sigma2-dis", type=float, default=2e-2)
    p.add_argument("--width", type=int, default=64, help="hidden width (nn-gc)")
    p.add_argument("--nn-batch", type=int, default=64)
    p.add_argument("--nn-iters", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--sigma2-nn", type=float, default=0.1)
    p.add_argument("--noise-std", type=float, default=None, help="qo-noise std")
    p.add_argument("--delta", type=float, default=0.1, help="is optimality slack")
    p.add_argument("--out", default=None, help="actions CSV (default stdout)")
    p.add_argument("--trace", default=None, help="dis-gc trace CSV")
    p.add_argument("--model", default=None, help="nn-gc trained model JSON")
    p.set_defaults(func=_cmd_curate)

    p = sub.add_parser("bench", help="repeated-trial method comparison")
    _add_problem_flags(p)
    p.add_argument("--methods", default="dis-gc,random,qo,qo-noise,is")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--sigma2-dis", type=float, default=2e-2)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--nn-iters", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--sigma2-nn", type=float, default=0.1)
    p.add_argument("--noise-std", type=float, default=None)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--out", default=None, help=".csv or .json report path")
    p.add_argument("--trial-log", default=None, help="JSON-lines per-trial records")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the curation session HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8351)
    p.add_argument("--session-dir", default=None)
    p.add_argument("--frontend-dir", default=None, help="static UI assets to mount")
    p.set_defaults(func=_cmd_serve)

    return parser


def _apply_config_file(parser, argv):
    """Seed parser defaults from --config JSON; explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise ValueError("config file must hold a JSON object of flag values")
    for action in parser._subparsers._group_actions:
        for sub in action.choices.values():
            applicable = {
                k: v for k, v in values.items()
                if any(k == a.dest for a in sub._actions)
            }
            sub.set_defaults(**applicable)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: bad config file: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    _echo_config(args)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
