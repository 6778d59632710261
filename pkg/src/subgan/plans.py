"""Experiment plans: seeded runs, lockstep equivalence pairs, and sweeps.

Every run directory is self-describing: the exact resolved config that
produced it, the per-step CSV, metric snapshots, final checkpoints, a
status file, and rendered figures. Re-running a plan with the same
config and seeds reproduces all CSV numeric content bit-exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import runconfig
from .autodiff import Tensor
from .distributions import (DistributionSpec, gaussian, gaussian_mixture,
                            make_sampler, ring, sample, uniform_hypercube)
from .losses import Discrepancy
from .metrics import MetricsSnapshot, gaussian_frechet, moment_errors
from .models import Mlp, ToyDiscriminator, ToyGenerator, save_model
from .runconfig import ConfigError
from .training import (DivergenceError, StepReport, SubproblemConfig,
                       discriminator_step, make_optimizer,
                       standard_generator_step, subproblem_generator_step,
                       train)

EQUIVALENCE_TOLERANCE = 1e-6

STEP_HEADER = ["step", "loss_d", "loss_g", "delta1_first", "delta1_last", "dtheta_norm"]
METRIC_HEADER = ["step", "frechet", "mean_error", "cov_error", "n_samples"]
DIVERGENCE_HEADER = ["step", "theta_divergence", "psi_divergence"]

REGIMES = ("standard", "subproblem", "equivalence-pair")


@dataclass
class ExperimentPlan:
    plan_id: str
    regime: str
    cfg: SubproblemConfig
    data: DistributionSpec
    noise: DistributionSpec
    steps: int
    eval_every: int
    seeds: list[int]
    out_dir: Path
    model: str = "mlp"
    gen_hidden: list[int] = field(default_factory=lambda: [16, 16])
    disc_hidden: list[int] = field(default_factory=lambda: [16, 16])
    activation: str = "tanh"
    batch_size: int = 64
    eval_samples: int = 2048
    allow_nonequivalent: bool = False

    def validate(self) -> None:
        if self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}")
        if not self.seeds:
            raise ConfigError("seed list must be non-empty")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.model not in ("mlp", "toy"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.model == "toy" and self.noise.dim != self.data.dim:
            raise ConfigError("toy models need noise_dim == data_dim")
        try:
            self.cfg.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.regime == "equivalence-pair" and not self.allow_nonequivalent:
            flags = equivalence_violations(self.cfg)
            if flags:
                raise ConfigError(
                    "equivalence-pair regime requires equivalence mode: "
                    + "; ".join(flags)
                    + " (set allow_nonequivalent=true to run anyway)")


def equivalence_violations(cfg: SubproblemConfig) -> list[str]:
    flags = []
    if cfg.optimizer != "sgd":
        flags.append(f"optimizer must be sgd, got {cfg.optimizer}")
    if cfg.n1 != 1:
        flags.append(f"n1 must be 1, got {cfg.n1}")
    if cfg.n2 != 1:
        flags.append(f"n2 must be 1, got {cfg.n2}")
    if cfg.delta2 != Discrepancy("l2", "sum"):
        flags.append(f"delta2 must be l2:sum, got {cfg.delta2}")
    if cfg.eta_g != cfg.lambda1 * cfg.lambda2:
        flags.append(
            f"eta_g must equal lambda1*lambda2 ({cfg.lambda1 * cfg.lambda2:g}), got {cfg.eta_g:g}")
    return flags


# ---------------------------------------------------------------------------
# Plan construction from parsed config values
# ---------------------------------------------------------------------------

def build_data_spec(values: dict) -> DistributionSpec:
    kind = values["data_kind"]
    if kind == "gaussian":
        mu = values["data_mu"][0]
        sigma = runconfig.parse_sigma_spec(values["data_sigma"])[0]
        return gaussian(mu, sigma)
    if kind == "mixture":
        sigmas = runconfig.parse_sigma_spec(values["data_sigma"])
        mus = values["data_mu"]
        if len(sigmas) == 1 and len(mus) > 1:
            sigmas = sigmas * len(mus)
        return gaussian_mixture(values["data_weights"], list(zip(mus, sigmas)))
    if kind == "ring":
        return ring(values["data_radius"], values["data_noise_std"])
    if kind == "uniform":
        return uniform_hypercube(values["data_dim"])
    raise ConfigError(f"unknown data_kind {kind!r}")


def build_noise_spec(values: dict) -> DistributionSpec:
    kind = values["noise_kind"]
    dim = values["noise_dim"]
    if kind == "gaussian":
        return gaussian(np.zeros(dim), np.eye(dim))
    if kind == "uniform":
        return uniform_hypercube(dim)
    raise ConfigError(f"unknown noise_kind {kind!r}")


def build_plan(values: dict) -> ExperimentPlan:
    merged = runconfig.defaults()
    merged.update(values)
    try:
        cfg = SubproblemConfig(
            delta1=Discrepancy.parse(merged["delta1"]),
            lambda1=merged["lambda1"], n1=merged["n1"],
            delta2=Discrepancy.parse(merged["delta2"]),
            lambda2=merged["lambda2"], n2=merged["n2"],
            optimizer=merged["optimizer"],
            eta_f=merged["eta_f"], eta_g=merged["eta_g"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    plan = ExperimentPlan(
        plan_id=merged["plan_id"], regime=merged["regime"], cfg=cfg,
        data=build_data_spec(merged), noise=build_noise_spec(merged),
        steps=merged["steps"], eval_every=merged["eval_every"],
        seeds=list(merged["seeds"]), out_dir=Path(merged["out_dir"]),
        model=merged["model"], gen_hidden=list(merged["gen_hidden"]),
        disc_hidden=list(merged["disc_hidden"]), activation=merged["activation"],
        batch_size=merged["batch_size"], eval_samples=merged["eval_samples"],
        allow_nonequivalent=merged["allow_nonequivalent"])
    plan.validate()
    return plan


def plan_to_values(plan: ExperimentPlan) -> dict:
    """Resolved config dict for persisting next to artifacts."""
    sigma_blocks = []
    mu_rows: list[list[float]]
    if plan.data.kind == "gaussian":
        mu_rows = [list(plan.data.params["mu"])]
        sigma_blocks = ["|".join(",".join(repr(float(v)) for v in row)
                                 for row in plan.data.params["sigma"])]
    elif plan.data.kind == "mixture":
        mu_rows = [list(row) for row in plan.data.params["mus"]]
        sigma_blocks = ["|".join(",".join(repr(float(v)) for v in r) for r in block)
                        for block in plan.data.params["sigmas"]]
    else:
        mu_rows = [[0.0] * plan.data.dim]
        sigma_blocks = [",".join(["1.0"] * plan.data.dim)]
    return {
        "delta1": str(plan.cfg.delta1), "lambda1": plan.cfg.lambda1, "n1": plan.cfg.n1,
        "delta2": str(plan.cfg.delta2), "lambda2": plan.cfg.lambda2, "n2": plan.cfg.n2,
        "optimizer": plan.cfg.optimizer, "eta_f": plan.cfg.eta_f, "eta_g": plan.cfg.eta_g,
        "plan_id": plan.plan_id, "regime": plan.regime, "steps": plan.steps,
        "eval_every": plan.eval_every, "seeds": plan.seeds,
        "batch_size": plan.batch_size, "eval_samples": plan.eval_samples,
        "allow_nonequivalent": plan.allow_nonequivalent,
        "model": plan.model, "gen_hidden": plan.gen_hidden,
        "disc_hidden": plan.disc_hidden, "activation": plan.activation,
        "data_kind": plan.data.kind, "data_dim": plan.data.dim,
        "data_mu": mu_rows, "data_sigma": ";".join(sigma_blocks),
        "data_weights": (list(plan.data.params["weights"])
                         if plan.data.kind == "mixture" else [1.0]),
        "data_radius": plan.data.params.get("radius", 1.0),
        "data_noise_std": plan.data.params.get("noise_std", 0.05),
        "noise_kind": plan.noise.kind, "noise_dim": plan.noise.dim,
        "out_dir": str(plan.out_dir),
    }


# ---------------------------------------------------------------------------
# Model and stream construction
# ---------------------------------------------------------------------------

def _build_models(plan: ExperimentPlan, seed: int):
    streams = np.random.SeedSequence(seed).spawn(8)
    rng_g, rng_f = np.random.default_rng(streams[0]), np.random.default_rng(streams[1])
    if plan.model == "toy":
        gen = ToyGenerator(plan.data.dim, rng=rng_g)
        disc = ToyDiscriminator(plan.data.dim, rng=rng_f)
    else:
        gen = Mlp([plan.noise.dim, *plan.gen_hidden, plan.data.dim],
                  activation=plan.activation, rng=rng_g)
        disc = Mlp([plan.data.dim, *plan.disc_hidden, 1],
                   activation=plan.activation, head="sigmoid", rng=rng_f)
    return gen, disc, streams


def _make_evaluator(plan: ExperimentPlan, eval_streams):
    real_rng = np.random.default_rng(eval_streams[0])
    noise_rng = np.random.default_rng(eval_streams[1])

    def evaluate(step: int, gen) -> MetricsSnapshot:
        real = sample(plan.data, plan.eval_samples, real_rng)
        z = sample(plan.noise, plan.eval_samples, noise_rng)
        fake = gen(Tensor(z)).data
        frechet = gaussian_frechet(fake, real)
        mean_error, cov_error = moment_errors(fake, plan.data)
        return MetricsSnapshot(step=step, frechet=frechet, mean_error=mean_error,
                               cov_error=cov_error, n_samples=plan.eval_samples)

    return evaluate


# ---------------------------------------------------------------------------
# CSV helpers (repr formatting round-trips float64 exactly)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _step_rows(reports: list[StepReport]):
    for k, rep in enumerate(reports):
        yield [k, rep.loss_d, rep.loss_g, rep.delta1_first, rep.delta1_last,
               rep.dtheta_norm]


def _metric_rows(metrics: list[MetricsSnapshot]):
    for snap in metrics:
        yield [snap.step, snap.frechet, snap.mean_error, snap.cov_error, snap.n_samples]


def _dump_samples(plan: ExperimentPlan, gen, run_dir: Path, eval_streams) -> None:
    real_rng = np.random.default_rng(eval_streams[0])
    noise_rng = np.random.default_rng(eval_streams[1])
    n = min(plan.eval_samples, 2048)
    real = sample(plan.data, n, real_rng)
    fake = gen(Tensor(sample(plan.noise, n, noise_rng))).data
    header = [f"x{i}" for i in range(plan.data.dim)]
    write_csv(run_dir / "samples_real.csv", header, ([float(v) for v in row] for row in real))
    write_csv(run_dir / "samples_generated.csv", header, ([float(v) for v in row] for row in fake))


# ---------------------------------------------------------------------------
# Single runs
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    seed: int
    run_dir: Path
    diverged: bool
    final_frechet: float | None
    max_divergence: float | None = None  # equivalence pairs only


@dataclass
class PlanResult:
    plan: ExperimentPlan
    outcomes: list[RunOutcome]

    @property
    def any_diverged(self) -> bool:
        return any(o.diverged for o in self.outcomes)

    @property
    def max_divergence(self) -> float:
        vals = [o.max_divergence for o in self.outcomes if o.max_divergence is not None]
        return max(vals) if vals else float("nan")


def _run_single(plan: ExperimentPlan, seed: int, run_dir: Path) -> RunOutcome:
    gen, disc, streams = _build_models(plan, seed)
    evaluator = _make_evaluator(plan, streams[2:4])
    data_sampler = make_sampler(plan.data, streams[4])
    noise_sampler = make_sampler(plan.noise, streams[5])
    result = train(gen, disc, data_sampler, noise_sampler, plan.cfg, plan.steps,
                   regime=plan.regime, batch_size=plan.batch_size,
                   eval_every=plan.eval_every, evaluator=evaluator,
                   checkpoint_dir=run_dir)
    write_csv(run_dir / "steps.csv", STEP_HEADER, _step_rows(result.reports))
    write_csv(run_dir / "metrics.csv", METRIC_HEADER, _metric_rows(result.metrics))
    _dump_samples(plan, gen, run_dir, streams[6:8])
    status = "ok" if not result.diverged else f"diverged step={result.halted_at}"
    (run_dir / "status.txt").write_text(status + "\n")
    final_frechet = result.metrics[-1].frechet if result.metrics else None
    return RunOutcome(seed=seed, run_dir=run_dir, diverged=result.diverged,
                      final_frechet=final_frechet)


def _run_pair(plan: ExperimentPlan, seed: int, run_dir: Path) -> RunOutcome:
    """Standard and decomposed regimes in lockstep from one seed, with a
    per-step parameter-divergence record."""
    gen_std, disc_std, streams = _build_models(plan, seed)
    gen_sub, disc_sub = gen_std.clone(), disc_std.clone()
    data_sampler = make_sampler(plan.data, streams[4])
    noise_sampler = make_sampler(plan.noise, streams[5])
    cfg = plan.cfg
    opt_f_std = make_optimizer(cfg.optimizer, disc_std.parameters(), cfg.eta_f)
    opt_f_sub = make_optimizer(cfg.optimizer, disc_sub.parameters(), cfg.eta_f)
    opt_g_std = make_optimizer(cfg.optimizer, gen_std.parameters(), cfg.eta_g)
    opt_g_sub = make_optimizer(cfg.optimizer, gen_sub.parameters(), cfg.lambda2 / cfg.n2)

    rows = []
    reports_std: list[StepReport] = []
    reports_sub: list[StepReport] = []
    diverged = False
    max_div = 0.0
    tiny = 1e-300
    for k in range(plan.steps):
        try:
            real = data_sampler(plan.batch_size)
            z = noise_sampler(plan.batch_size)
            fake_std = gen_std(Tensor(z)).detach()
            fake_sub = gen_sub(Tensor(z)).detach()
            rep_d_std = discriminator_step(disc_std, Tensor(real), fake_std,
                                           cfg.eta_f, optimizer=opt_f_std)
            rep_d_sub = discriminator_step(disc_sub, Tensor(real), fake_sub,
                                           cfg.eta_f, optimizer=opt_f_sub)
            rep_g_std = standard_generator_step(gen_std, disc_std, Tensor(z),
                                                cfg.eta_g, cfg.delta1, optimizer=opt_g_std)
            rep_g_sub = subproblem_generator_step(gen_sub, disc_sub, Tensor(z),
                                                  cfg, optimizer=opt_g_sub)
        except DivergenceError:
            diverged = True
            break
        rep_d_std.loss_g = rep_g_std.loss_g
        rep_d_std.delta1_path = rep_g_std.delta1_path
        rep_d_std.dtheta_norm = rep_g_std.dtheta_norm
        reports_std.append(rep_d_std)
        rep_d_sub.loss_g = rep_g_sub.loss_g
        rep_d_sub.delta1_path = rep_g_sub.delta1_path
        rep_d_sub.dtheta_norm = rep_g_sub.dtheta_norm
        reports_sub.append(rep_d_sub)

        theta_std = gen_std.flat_parameters()
        theta_sub = gen_sub.flat_parameters()
        theta_div = float(np.max(np.abs(theta_sub - theta_std))
                          / max(np.max(np.abs(theta_std)), tiny))
        psi_std = disc_std.flat_parameters()
        psi_sub = disc_sub.flat_parameters()
        psi_div = float(np.max(np.abs(psi_sub - psi_std))
                        / max(np.max(np.abs(psi_std)), tiny))
        max_div = max(max_div, theta_div)
        rows.append([k, theta_div, psi_div])

    for label, reports, gen, disc in (("standard", reports_std, gen_std, disc_std),
                                      ("subproblem", reports_sub, gen_sub, disc_sub)):
        side = run_dir / label
        side.mkdir(parents=True, exist_ok=True)
        write_csv(side / "steps.csv", STEP_HEADER, _step_rows(reports))
        save_model(gen, side / "generator.ckpt")
        save_model(disc, side / "discriminator.ckpt")
    write_csv(run_dir / "divergence.csv", DIVERGENCE_HEADER, rows)
    status = "ok" if not diverged else f"diverged step={len(rows)}"
    (run_dir / "status.txt").write_text(status + "\n")
    return RunOutcome(seed=seed, run_dir=run_dir, diverged=diverged,
                      final_frechet=None, max_divergence=max_div if rows or plan.steps == 0 else None)


def run_plan(plan: ExperimentPlan, emit_figures: bool = True) -> PlanResult:
    """Execute a plan: one subdirectory per seed, artifacts as documented."""
    plan.validate()
    plan.out_dir.mkdir(parents=True, exist_ok=True)
    runconfig.write_config(plan_to_values(plan), plan.out_dir / "config.txt")
    outcomes = []
    for seed in plan.seeds:
        run_dir = plan.out_dir / f"seed_{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        runconfig.write_config(plan_to_values(plan), run_dir / "config.txt")
        if plan.regime == "equivalence-pair":
            outcomes.append(_run_pair(plan, seed, run_dir))
        else:
            outcomes.append(_run_single(plan, seed, run_dir))
        if emit_figures:
            from .plots import emit_plots
            emit_plots(run_dir)
    return PlanResult(plan=plan, outcomes=outcomes)


# ---------------------------------------------------------------------------
# Equivalence comparison
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceReport:
    tolerance: float
    max_divergence: float
    per_seed: dict[int, float]
    flags: list[str]
    passed: bool


def compare_equivalence(plan: ExperimentPlan, tolerance: float = EQUIVALENCE_TOLERANCE,
                        emit_figures: bool = True) -> EquivalenceReport:
    """Run the paired regimes and judge per-step parameter divergence.

    Configurations that break equivalence mode (wrong optimizer, extra
    inner steps, eta_g != lambda1*lambda2, non-l2:sum regression loss)
    are reported as flags; with allow_nonequivalent they still run and
    are expected to fail the tolerance.
    """
    if plan.regime != "equivalence-pair":
        raise ConfigError(
            f"compare_equivalence needs regime=equivalence-pair, got {plan.regime!r}")
    result = run_plan(plan, emit_figures=emit_figures)
    per_seed = {o.seed: (o.max_divergence if o.max_divergence is not None else float("inf"))
                for o in result.outcomes}
    finite = [v for v in per_seed.values() if np.isfinite(v)]
    max_div = max(finite) if finite else float("inf")
    if result.any_diverged:
        max_div = float("inf")
    flags = equivalence_violations(plan.cfg)
    passed = bool(max_div <= tolerance) and not flags
    report = EquivalenceReport(tolerance=tolerance, max_divergence=max_div,
                               per_seed=per_seed, flags=flags, passed=passed)
    lines = [f"tolerance={tolerance!r}", f"max_divergence={max_div!r}",
             f"passed={report.passed}"]
    lines += [f"flag={f}" for f in flags]
    lines += [f"seed_{s}={v!r}" for s, v in per_seed.items()]
    (plan.out_dir / "equivalence_report.txt").write_text("\n".join(lines) + "\n")
    return report


# ---------------------------------------------------------------------------
# Sweep templates
# ---------------------------------------------------------------------------

DEFAULT_MIXTURE = dict(
    data_kind="mixture",
    data_mu=[[1.5, 1.5], [-1.5, 1.5], [-1.5, -1.5], [1.5, -1.5]],
    data_sigma="0.0625,0.0625",
    data_weights=[0.25, 0.25, 0.25, 0.25],
)

RATE_SWEEP_LAMBDA1 = (0.1, 0.25, 0.5, 0.75, 0.9, 1.0)


@dataclass
class SweepCondition:
    name: str
    plan: ExperimentPlan


def _sweep_base_values(out_dir, seeds, steps, eta_g, optimizer) -> dict:
    values = runconfig.defaults()
    values.update(DEFAULT_MIXTURE)
    values.update(dict(steps=steps, seeds=list(seeds), eval_every=max(steps // 4, 1),
                       optimizer=optimizer, eta_f=eta_g, eta_g=eta_g,
                       out_dir=str(out_dir), batch_size=64, model="mlp",
                       gen_hidden=[16, 16], disc_hidden=[16, 16], activation="tanh"))
    return values


def rate_sweep_conditions(out_dir, *, seeds=(0, 1, 2, 3, 4), steps=500,
                          eta_g=2e-4, optimizer="sgd",
                          lambda1_values=RATE_SWEEP_LAMBDA1) -> list[SweepCondition]:
    """Inversion-rate sweep with lambda2 = eta_g / lambda1, plus the
    standard-regime baseline; every condition shares the seed list."""
    out_dir = Path(out_dir)
    conditions = []
    base = _sweep_base_values(out_dir, seeds, steps, eta_g, optimizer)
    baseline = dict(base)
    baseline.update(plan_id="baseline", regime="standard",
                    out_dir=str(out_dir / "baseline"))
    conditions.append(SweepCondition("baseline", build_plan(baseline)))
    for lam1 in lambda1_values:
        lam2 = eta_g / lam1
        values = dict(base)
        values.update(plan_id=f"lambda1_{lam1:g}", regime="subproblem",
                      lambda1=lam1, lambda2=lam2, eta_g=lam1 * lam2,
                      delta2="l2:sum",
                      out_dir=str(out_dir / f"lambda1_{lam1:g}"))
        conditions.append(SweepCondition(f"lambda1_{lam1:g}", build_plan(values)))
    return conditions


def factorial_conditions(out_dir, *, seeds=(0,), steps=500, eta_g=2e-4,
                         optimizer="sgd") -> list[SweepCondition]:
    """Regression-loss x inversion-steps x regression-steps factorial
    (20 decomposed conditions with lambda1 = 1/N1, lambda2 = eta_g/N2)
    plus the standard baseline."""
    out_dir = Path(out_dir)
    base = _sweep_base_values(out_dir, seeds, steps, eta_g, optimizer)
    conditions = []
    baseline = dict(base)
    baseline.update(plan_id="baseline", regime="standard",
                    out_dir=str(out_dir / "baseline"))
    conditions.append(SweepCondition("baseline", build_plan(baseline)))
    for delta2 in ("l2", "l1"):
        for n1 in range(1, 6):
            for n2 in (1, 2):
                name = f"{delta2}_n1-{n1}_n2-{n2}"
                values = dict(base)
                values.update(plan_id=name, regime="subproblem",
                              delta2=delta2, n1=n1, n2=n2,
                              lambda1=1.0 / n1, lambda2=eta_g / n2,
                              out_dir=str(out_dir / name))
                conditions.append(SweepCondition(name, build_plan(values)))
    return conditions


SWEEP_HEADER = ["condition", "regime", "lambda1", "lambda2", "delta2", "n1", "n2",
                "mean_frechet", "stderr_frechet", "n_seeds", "diverged_seeds"]


def run_sweep(conditions: list[SweepCondition], out_dir,
              emit_figures: bool = True) -> list[dict]:
    """Run every condition; summarize final Frechet distance per condition
    as mean with standard error across seeds."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = []
    for cond in conditions:
        result = run_plan(cond.plan, emit_figures=emit_figures)
        finals = [o.final_frechet for o in result.outcomes if o.final_frechet is not None]
        n = len(finals)
        mean = float(np.mean(finals)) if finals else float("nan")
        stderr = float(np.std(finals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        summary.append(dict(
            condition=cond.name, regime=cond.plan.regime,
            lambda1=cond.plan.cfg.lambda1, lambda2=cond.plan.cfg.lambda2,
            delta2=str(cond.plan.cfg.delta2), n1=cond.plan.cfg.n1, n2=cond.plan.cfg.n2,
            mean_frechet=mean, stderr_frechet=stderr, n_seeds=n,
            diverged_seeds=sum(1 for o in result.outcomes if o.diverged)))
    rows = [[s[k] for k in SWEEP_HEADER] for s in summary]
    write_csv(out_dir / "sweep_summary.csv", SWEEP_HEADER, rows)
    if emit_figures:
        from .plots import sweep_summary_plot
        sweep_summary_plot(out_dir / "sweep_summary.csv", out_dir / "sweep_summary.svg")
    return summary
