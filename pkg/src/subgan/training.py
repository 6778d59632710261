"""Both generator-training regimes plus the shared discriminator step.

The standard regime takes one gradient step on delta1(f(g(z)), "real").
The decomposed regime first nudges the generated samples themselves
toward the "real" label (label inversion, producing inverse examples),
then regresses the generator onto those targets. Under the equivalence
configuration (plain SGD, single inversion and regression steps, squared
regression loss with sum reduction, eta_g = lambda1 * lambda2) the two
regimes produce the same parameter update up to 64-bit rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .losses import (Discrepancy, discriminator_loss, label_discrepancy,
                     regression_discrepancy)

LOSS_DIVERGENCE_LIMIT = 1e6
REAL_LABEL = 1.0
FAKE_LABEL = 0.0


class DivergenceError(RuntimeError):
    """A training step produced a non-finite or runaway loss."""


@dataclass
class SubproblemConfig:
    """Knobs for the decomposed generator update (and the standard one).

    lambda1=1 with lambda2=eta_g is the documented default split; it is
    believed to mirror what standard training does implicitly, so it is a
    default here, not an asserted identity.
    """
    delta1: Discrepancy = field(default_factory=lambda: Discrepancy("bce"))
    lambda1: float = 1.0
    n1: int = 1
    delta2: Discrepancy = field(default_factory=lambda: Discrepancy("l2"))
    lambda2: float = 2e-4
    n2: int = 1
    optimizer: str = "sgd"
    eta_f: float = 2e-4
    eta_g: float = 2e-4

    def validate(self) -> None:
        for name in ("lambda1", "lambda2", "eta_f", "eta_g"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"n1 and n2 must be >= 1, got n1={self.n1}, n2={self.n2}")
        if self.optimizer not in ("sgd", "momentum", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def equivalence_mode(self) -> "SubproblemConfig":
        """The restricted configuration under which decomposed == standard.

        Forces plain SGD, single inner steps, a squared regression loss
        with sum-over-batch reduction, and eta_g = lambda1 * lambda2.
        """
        return replace(
            self,
            optimizer="sgd",
            n1=1,
            n2=1,
            delta2=Discrepancy("l2", "sum"),
            eta_g=self.lambda1 * self.lambda2,
        )

    def is_equivalence_mode(self) -> bool:
        return (self.optimizer == "sgd" and self.n1 == 1 and self.n2 == 1
                and self.delta2 == Discrepancy("l2", "sum")
                and self.eta_g == self.lambda1 * self.lambda2)


@dataclass
class InverseBatch:
    """Generated samples alongside their label-inverted targets."""
    z: np.ndarray | None
    x_tilde_initial: np.ndarray
    x_prime: np.ndarray
    delta1_path: list[float]
    grad_norms: list[float]


@dataclass
class StepReport:
    """Per-step bookkeeping; merged across the discriminator and generator
    halves of a full training step."""
    loss_d: float | None = None
    loss_g: float | None = None
    delta1_path: list[float] = field(default_factory=list)
    dtheta_norm: float = 0.0
    inverse: InverseBatch | None = None

    @property
    def delta1_first(self) -> float:
        return self.delta1_path[0] if self.delta1_path else float("nan")

    @property
    def delta1_last(self) -> float:
        return self.delta1_path[-1] if self.delta1_path else float("nan")


# ---------------------------------------------------------------------------
# Optimizers
# ---------------------------------------------------------------------------

class SgdOptimizer:
    def __init__(self, params, rate: float):
        self.params = list(params)
        self.rate = float(rate)

    def step(self) -> None:
        for p in self.params:
            if p.grad is not None:
                p.data = p.data - self.rate * p.grad


class MomentumOptimizer:
    def __init__(self, params, rate: float, momentum: float = 0.9):
        self.params = list(params)
        self.rate = float(rate)
        self.momentum = float(momentum)
        self.velocity = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        for p, v in zip(self.params, self.velocity):
            if p.grad is None:
                continue
            v *= self.momentum
            v += p.grad
            p.data = p.data - self.rate * v


class AdamOptimizer:
    def __init__(self, params, rate: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.rate = float(rate)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]
        self.t = 0

    def step(self) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            if p.grad is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad * p.grad
            m_hat = m / correction1
            v_hat = v / correction2
            p.data = p.data - self.rate * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(kind: str, params, rate: float):
    if kind == "sgd":
        return SgdOptimizer(params, rate)
    if kind == "momentum":
        return MomentumOptimizer(params, rate)
    if kind == "adam":
        return AdamOptimizer(params, rate)
    raise ValueError(f"unknown optimizer {kind!r}")


# ---------------------------------------------------------------------------
# Step operations
# ---------------------------------------------------------------------------

def _check_finite(value: float, what: str) -> float:
    if not np.isfinite(value):
        raise DivergenceError(f"{what} is non-finite ({value}); step aborted")
    return value


def _as_constant_batch(x) -> Tensor:
    data = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    return Tensor(data.copy())


def discriminator_step(f_psi, real, fake, eta_f: float, optimizer=None) -> StepReport:
    """One update of psi against combined real-vs-fake BCE.

    The fake batch is treated as constant data: no gradient reaches the
    generator. Aborts (raising) on a non-finite loss, leaving psi intact.
    """
    real_t = _as_constant_batch(real)
    fake_t = _as_constant_batch(fake)
    f_psi.zero_grad()
    loss = discriminator_loss(f_psi, real_t, fake_t)
    loss_val = _check_finite(loss.item(), "discriminator loss")
    ad.backprop(loss)
    before = f_psi.flat_parameters()
    opt = optimizer if optimizer is not None else SgdOptimizer(f_psi.parameters(), eta_f)
    opt.step()
    dpsi = float(np.linalg.norm(f_psi.flat_parameters() - before))
    f_psi.zero_grad()
    return StepReport(loss_d=loss_val, dtheta_norm=dpsi)


def standard_generator_step(g_theta, f_psi, z, eta_g: float,
                            loss: Discrepancy | None = None, optimizer=None) -> StepReport:
    """One plain gradient step on delta(f(g(z)), "real") with psi frozen."""
    loss = loss if loss is not None else Discrepancy("bce")
    z_t = _as_constant_batch(z)
    g_theta.zero_grad()
    f_psi.zero_grad()
    objective = label_discrepancy(loss, f_psi, g_theta(z_t), REAL_LABEL)
    loss_val = _check_finite(objective.item(), "generator loss")
    ad.backprop(objective)
    before = g_theta.flat_parameters()
    opt = optimizer if optimizer is not None else SgdOptimizer(g_theta.parameters(), eta_g)
    opt.step()
    dtheta = float(np.linalg.norm(g_theta.flat_parameters() - before))
    g_theta.zero_grad()
    f_psi.zero_grad()
    return StepReport(loss_g=loss_val, delta1_path=[loss_val], dtheta_norm=dtheta)


def invert_labels(f_psi, x_tilde, cfg: SubproblemConfig, z=None) -> InverseBatch:
    """Approximately invert the "real" label into data space.

    Runs n1 gradient steps of size lambda1/n1 on the sample tensor
    itself; model parameters are untouched. The returned delta1 path has
    one entry per step plus the value after the final step (improvement
    is monitored, not enforced: single steps may overshoot).
    """
    x0 = x_tilde.data.copy() if isinstance(x_tilde, Tensor) else np.asarray(x_tilde, dtype=np.float64).copy()
    x = Tensor(x0.copy(), requires_grad=True)
    step_size = cfg.lambda1 / cfg.n1 if cfg.n1 > 0 else 0.0
    path: list[float] = []
    grad_norms: list[float] = []
    for _ in range(cfg.n1):
        f_psi.zero_grad()
        loss = label_discrepancy(cfg.delta1, f_psi, x, REAL_LABEL)
        path.append(_check_finite(loss.item(), "inversion discrepancy"))
        ad.backprop(loss)
        grad = x.grad
        if grad is None or not np.all(np.isfinite(grad)):
            raise DivergenceError("inversion gradient is non-finite; step aborted")
        grad_norms.append(float(np.linalg.norm(grad)))
        x = Tensor(x.data - step_size * grad, requires_grad=True)
    f_psi.zero_grad()
    final = label_discrepancy(cfg.delta1, f_psi, x, REAL_LABEL)
    path.append(_check_finite(final.item(), "inversion discrepancy"))
    z_data = None
    if z is not None:
        z_data = z.data.copy() if isinstance(z, Tensor) else np.asarray(z, dtype=np.float64).copy()
    return InverseBatch(z=z_data, x_tilde_initial=x0, x_prime=x.data.copy(),
                        delta1_path=path, grad_norms=grad_norms)


def regress_on_targets(g_theta, z, x_prime, cfg: SubproblemConfig, optimizer=None) -> StepReport:
    """n2 regression steps of g(z) onto constant targets, size lambda2/n2.

    The gradient is recomputed between steps; no gradient ever reaches
    the targets.
    """
    z_t = _as_constant_batch(z)
    target = _as_constant_batch(x_prime)
    opt = optimizer if optimizer is not None else SgdOptimizer(g_theta.parameters(), cfg.lambda2 / cfg.n2)
    before = g_theta.flat_parameters()
    first_loss = None
    for _ in range(cfg.n2):
        g_theta.zero_grad()
        loss = regression_discrepancy(cfg.delta2, g_theta(z_t), target)
        loss_val = _check_finite(loss.item(), "regression loss")
        if first_loss is None:
            first_loss = loss_val
        ad.backprop(loss)
        opt.step()
    g_theta.zero_grad()
    dtheta = float(np.linalg.norm(g_theta.flat_parameters() - before))
    return StepReport(loss_g=first_loss, dtheta_norm=dtheta)


def subproblem_generator_step(g_theta, f_psi, z, cfg: SubproblemConfig,
                              optimizer=None) -> StepReport:
    """One decomposed generator update: invert labels, then regress."""
    z_t = _as_constant_batch(z)
    x_tilde = g_theta(z_t).detach()
    inverse = invert_labels(f_psi, x_tilde, cfg, z=z_t)
    report = regress_on_targets(g_theta, z_t, inverse.x_prime, cfg, optimizer=optimizer)
    report.delta1_path = inverse.delta1_path
    report.inverse = inverse
    return report


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------

@dataclass
class TrainResult:
    reports: list[StepReport]
    metrics: list
    halted_at: int | None = None

    @property
    def diverged(self) -> bool:
        return self.halted_at is not None


def train(g_theta, f_psi, data_sampler, noise_sampler, cfg: SubproblemConfig,
          steps: int, *, regime: str = "subproblem", batch_size: int = 64,
          eval_every: int = 0, evaluator=None, checkpoint_dir=None) -> TrainResult:
    """Alternate discriminator and generator updates for ``steps`` rounds.

    ``data_sampler(n)`` and ``noise_sampler(n)`` return seeded (n, d)
    arrays. On divergence (non-finite loss or loss above
    LOSS_DIVERGENCE_LIMIT) training halts with both models restored to
    the last good step. Final checkpoints are written into
    ``checkpoint_dir`` when given.
    """
    if regime not in ("standard", "subproblem"):
        raise ValueError(f"unknown regime {regime!r}")
    cfg.validate()
    opt_f = make_optimizer(cfg.optimizer, f_psi.parameters(), cfg.eta_f)
    gen_rate = cfg.eta_g if regime == "standard" else cfg.lambda2 / cfg.n2
    opt_g = make_optimizer(cfg.optimizer, g_theta.parameters(), gen_rate)

    reports: list[StepReport] = []
    metrics: list = []
    halted_at: int | None = None
    for k in range(steps):
        snap_g = g_theta.flat_parameters()
        snap_f = f_psi.flat_parameters()
        try:
            real = data_sampler(batch_size)
            z = noise_sampler(batch_size)
            fake = g_theta(Tensor(z)).detach()
            report = discriminator_step(f_psi, Tensor(real), fake, cfg.eta_f, optimizer=opt_f)
            if regime == "standard":
                gen_report = standard_generator_step(
                    g_theta, f_psi, Tensor(z), cfg.eta_g, cfg.delta1, optimizer=opt_g)
            else:
                gen_report = subproblem_generator_step(
                    g_theta, f_psi, Tensor(z), cfg, optimizer=opt_g)
            report.loss_g = gen_report.loss_g
            report.delta1_path = gen_report.delta1_path
            report.dtheta_norm = gen_report.dtheta_norm
            report.inverse = gen_report.inverse
            if (abs(report.loss_d) > LOSS_DIVERGENCE_LIMIT
                    or abs(report.loss_g) > LOSS_DIVERGENCE_LIMIT):
                raise DivergenceError(
                    f"loss exceeded {LOSS_DIVERGENCE_LIMIT:g} at step {k}")
        except DivergenceError:
            g_theta.set_flat_parameters(snap_g)
            f_psi.set_flat_parameters(snap_f)
            halted_at = k
            break
        reports.append(report)
        if eval_every and evaluator is not None and (k + 1) % eval_every == 0:
            metrics.append(evaluator(k + 1, g_theta))
    final_step = len(reports)
    if (evaluator is not None and final_step > 0
            and (not eval_every or final_step % eval_every != 0)):
        metrics.append(evaluator(final_step, g_theta))
    if checkpoint_dir is not None:
        from pathlib import Path

        from .models import save_model
        out = Path(checkpoint_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_model(g_theta, out / "generator.ckpt")
        save_model(f_psi, out / "discriminator.ckpt")
    return TrainResult(reports=reports, metrics=metrics, halted_at=halted_at)
