"""Command-line front end.

Verbs: run, sweep, compare, plot, analyze. Flags mirror the config-file
keys and override file values. Exit codes: 0 success, 1 config error,
2 divergence, 3 equivalence failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import runconfig
from .analysis import (compute_kernel, taylor_convergence_order, toy_experiment)
from .losses import Discrepancy
from .models import Mlp, ToyGenerator
from .plans import (EQUIVALENCE_TOLERANCE, build_plan, compare_equivalence,
                    factorial_conditions, rate_sweep_conditions, run_plan,
                    run_sweep, write_csv)
from .plots import emit_plots, kernel_heatmap
from .runconfig import ConfigError
from .training import SubproblemConfig

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGENCE = 2
EXIT_EQUIVALENCE = 3


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None,
                        help="key=value config file; flags override its values")
    for key, (_, default, help_text) in runconfig.SCHEMA.items():
        parser.add_argument(f"--{key}", type=str, default=None,
                            help=f"{help_text} (default {runconfig.format_value(key, default)})")


def _collect_values(args: argparse.Namespace) -> dict:
    values: dict = {}
    if args.config:
        values.update(runconfig.parse_config_file(args.config))
    for key in runconfig.SCHEMA:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = runconfig.parse_value(key, raw)
    return values


def _cmd_run(args) -> int:
    plan = build_plan(_collect_values(args))
    result = run_plan(plan)
    for outcome in result.outcomes:
        status = "diverged" if outcome.diverged else "ok"
        extra = (f" frechet={outcome.final_frechet:.6g}"
                 if outcome.final_frechet is not None else "")
        print(f"seed {outcome.seed}: {status}{extra} -> {outcome.run_dir}")
    return EXIT_DIVERGENCE if result.any_diverged else EXIT_OK


def _cmd_sweep(args) -> int:
    out_dir = Path(args.out)
    common = dict(seeds=tuple(runconfig.parse_value("seeds", args.seeds)),
                  steps=int(args.steps), eta_g=float(args.eta_g),
                  optimizer=args.optimizer)
    if args.template == "rates":
        conditions = rate_sweep_conditions(out_dir, **common)
    else:
        conditions = factorial_conditions(out_dir, **common)
    summary = run_sweep(conditions, out_dir)
    diverged = 0
    for entry in summary:
        diverged += entry["diverged_seeds"]
        print(f"{entry['condition']:>16}: frechet {entry['mean_frechet']:.4f}"
              f" +/- {entry['stderr_frechet']:.4f} (n={entry['n_seeds']},"
              f" diverged={entry['diverged_seeds']})")
    print(f"summary -> {out_dir / 'sweep_summary.csv'}")
    return EXIT_DIVERGENCE if diverged else EXIT_OK


def _cmd_compare(args) -> int:
    values = _collect_values(args)
    values.setdefault("regime", "equivalence-pair")
    plan = build_plan(values)
    report = compare_equivalence(plan, tolerance=float(args.tolerance))
    print(f"max relative parameter divergence: {report.max_divergence:.3e}"
          f" (tolerance {report.tolerance:g})")
    for flag in report.flags:
        print(f"flag: {flag}")
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_EQUIVALENCE


def _cmd_plot(args) -> int:
    outcome = emit_plots(Path(args.run_dir))
    for name in outcome["written"]:
        print(f"wrote {Path(args.run_dir) / name}")
    for name in outcome["missing"]:
        print(f"missing input: {name}")
    return EXIT_OK


def _analyze_kernel(args, out_dir: Path) -> None:
    rng = np.random.default_rng(int(args.seed))
    dim = int(args.dim)
    if args.model == "toy":
        gen = ToyGenerator(dim, rng=rng)
        in_dim = dim
    else:
        gen = Mlp([dim, 16, 16, dim], activation="tanh", rng=rng)
        in_dim = dim
    draws = int(args.draws)
    rows = []
    mean_matrix = np.zeros((dim, dim))
    for k in range(draws):
        z = rng.standard_normal((1, in_dim))
        kernel = compute_kernel(gen, z)
        eigs = kernel.eigenvalues()
        rows.append([k, float(np.trace(kernel.matrix)), kernel.identity_distance(),
                     *[float(e) for e in eigs]])
        mean_matrix += kernel.matrix / draws
    header = ["draw", "trace", "identity_distance"] + [f"eig{i}" for i in range(dim)]
    write_csv(out_dir / "kernel.csv", header, rows)
    kernel_heatmap(mean_matrix, out_dir / "kernel_heatmap.svg")
    print(f"wrote {out_dir / 'kernel.csv'} and kernel_heatmap.svg")


def _analyze_taylor(args, out_dir: Path) -> None:
    rng = np.random.default_rng(int(args.seed))
    dim = int(args.dim)
    gen = Mlp([dim, 16, 16, dim], activation="tanh", rng=rng)
    disc = Mlp([dim, 16, 1], activation="tanh", head="sigmoid", rng=rng)
    z = rng.standard_normal((1, dim))
    etas = [float(v) for v in args.etas.split(",")]
    residuals, orders = taylor_convergence_order(gen, disc, z, etas)
    rows = [[eta, res, (orders[i - 1] if i else float("nan"))]
            for i, (eta, res) in enumerate(zip(etas, residuals))]
    write_csv(out_dir / "taylor.csv", ["eta", "residual", "order_vs_previous"], rows)
    print(f"wrote {out_dir / 'taylor.csv'}")
    for eta, res in zip(etas, residuals):
        print(f"eta={eta:g}: residual {res:.3e}")
    print("empirical orders:", ", ".join(f"{o:.3f}" for o in orders))


def _analyze_toy(args, out_dir: Path) -> None:
    mu = [float(v) for v in args.mu.split(",")]
    sigma = np.diag([float(v) for v in args.sigma.split(",")])
    cfg = SubproblemConfig(lambda1=1.0, lambda2=float(args.eta_g),
                           eta_f=float(args.eta_f), eta_g=float(args.eta_g),
                           delta2=Discrepancy("l2", "sum"))
    report = toy_experiment(mu, sigma, cfg, int(args.steps), seed=int(args.seed))
    rows = [["mean_error", report.mean_error],
            ["cov_error", report.cov_error],
            ["alignment_cosine", report.alignment_cosine],
            ["alpha", report.alpha],
            ["beta", report.beta],
            ["diverged", float(report.diverged)],
            ["delta1_first", report.delta1_first],
            ["delta1_last", report.delta1_last]]
    write_csv(out_dir / "toy_report.csv", ["quantity", "value"], rows)
    if report.real_samples is not None:
        from .plots import scatter_points
        scatter_points(report.real_samples, report.fake_samples,
                       out_dir / "toy_scatter.svg",
                       title="toy GAN: means align, covariance does not")
    print(f"wrote {out_dir / 'toy_report.csv'} and toy_scatter.svg")
    print(f"mean error {report.mean_error:.4f}, covariance error {report.cov_error:.4f},"
          f" w-alignment cosine {report.alignment_cosine:.4f}")


def _cmd_analyze(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.what == "kernel":
        _analyze_kernel(args, out_dir)
    elif args.what == "taylor":
        _analyze_taylor(args, out_dir)
    else:
        _analyze_toy(args, out_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgan",
        description="GAN training via explicit label-inversion and regression subproblems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single experiment plan")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sweep template")
    p_sweep.add_argument("--template", choices=["rates", "factorial"], default="rates")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--seeds", default="0,1,2,3,4")
    p_sweep.add_argument("--steps", default="500")
    p_sweep.add_argument("--eta-g", dest="eta_g", default="2e-4")
    p_sweep.add_argument("--optimizer", default="sgd",
                         help="sgd matches the baseline trajectory; adam explores genuinely different splits")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cmp = sub.add_parser("compare",
                           help="paired standard-vs-decomposed run with per-step divergence")
    _add_config_flags(p_cmp)
    p_cmp.add_argument("--tolerance", default=str(EQUIVALENCE_TOLERANCE))
    p_cmp.set_defaults(func=_cmd_compare)

    p_plot = sub.add_parser("plot", help="render figures for an existing run directory")
    p_plot.add_argument("--run-dir", required=True)
    p_plot.set_defaults(func=_cmd_plot)

    p_an = sub.add_parser("analyze", help="kernel, taylor-prediction, or toy-GAN diagnostics")
    p_an.add_argument("what", choices=["kernel", "taylor", "toy"])
    p_an.add_argument("--out", required=True)
    p_an.add_argument("--seed", default="0")
    p_an.add_argument("--dim", default="2")
    p_an.add_argument("--model", choices=["toy", "mlp"], default="toy")
    p_an.add_argument("--draws", default="100")
    p_an.add_argument("--etas", default="1e-3,5e-4,2.5e-4")
    p_an.add_argument("--mu", default="3,-2")
    p_an.add_argument("--sigma", default="4,0.25")
    p_an.add_argument("--steps", default="5000")
    p_an.add_argument("--eta-f", dest="eta_f", default="0.05")
    p_an.add_argument("--eta-g", dest="eta_g", default="0.05")
    p_an.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
