"""Diagnostics for how the generator filters requested output changes.

The central object is the d-by-d kernel J J^T built from the parameter
Jacobian of the generator at one input: it describes which data-space
directions a parameter update can actually move the output in. For the
linear toy generator this kernel is ||[z; 1]||^2 times the identity, so
the parameterization is direction-neutral there; the toy GAN still only
aligns means, because the logistic discriminator's inversion signal is a
single shared direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .distributions import gaussian, make_sampler
from .losses import Discrepancy, label_discrepancy
from .metrics import moment_errors
from .models import ToyDiscriminator, ToyGenerator
from .training import (REAL_LABEL, SubproblemConfig, invert_labels,
                       standard_generator_step, train)


@dataclass
class KernelMatrix:
    """d x d outer product of the generator's parameter Jacobian."""
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    def identity_distance(self) -> float:
        return float(np.linalg.norm(self.matrix - np.eye(self.dim), ord="fro"))


@dataclass
class TaylorPrediction:
    x_before: np.ndarray
    x_predicted: np.ndarray
    x_after: np.ndarray
    residual: float


@dataclass
class ToyAnalysisReport:
    w_learned: np.ndarray
    mean_real: np.ndarray
    mean_fake: np.ndarray
    alignment_cosine: float
    alpha: float
    beta: float
    mean_error: float
    cov_error: float
    diverged: bool = False
    delta1_first: float = float("nan")
    delta1_last: float = float("nan")
    inversion_cosines: np.ndarray = field(default_factory=lambda: np.empty(0))
    fake_samples: np.ndarray | None = None
    real_samples: np.ndarray | None = None


def _single_input(z) -> Tensor:
    data = z.data if isinstance(z, Tensor) else np.asarray(z, dtype=np.float64)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    if data.shape[0] != 1:
        raise ValueError(f"kernel analysis takes one input at a time, got batch {data.shape[0]}")
    return Tensor(data)


def compute_kernel(g_theta, z) -> KernelMatrix:
    """J J^T for one input, J the Jacobian of g(z) in the flattened
    parameters."""
    z_t = _single_input(z)
    jac = ad.jacobian(g_theta, z_t, wrt="parameters")
    return KernelMatrix(matrix=jac.data @ jac.data.T)


def input_loss_gradient(f_psi, x: np.ndarray, loss: Discrepancy) -> np.ndarray:
    """Gradient of delta(f(x), "real") in the sample itself."""
    x_leaf = Tensor(np.asarray(x, dtype=np.float64).copy(), requires_grad=True)
    objective = label_discrepancy(loss, f_psi, x_leaf, REAL_LABEL)
    ad.backprop(objective)
    f_psi.zero_grad()
    return x_leaf.grad.copy()


def taylor_check(g_theta, f_psi, z, eta_g: float,
                 loss: Discrepancy | None = None) -> TaylorPrediction:
    """First-order prediction of the post-update output vs. the real thing.

    predicted x_after = x - eta_g * K(x) * grad_x(loss); the actual
    x_after comes from one plain SGD step on a cloned generator. The
    residual shrinks as O(eta^2) for smooth activations and vanishes for
    the linear toy generator.
    """
    loss = loss if loss is not None else Discrepancy("bce")
    z_t = _single_input(z)
    x_before = g_theta(z_t).data.copy()
    grad_x = input_loss_gradient(f_psi, x_before, loss)
    kernel = compute_kernel(g_theta, z_t)
    x_pred = x_before - eta_g * (kernel.matrix @ grad_x[0]).reshape(1, -1)
    clone = g_theta.clone()
    standard_generator_step(clone, f_psi, z_t, eta_g, loss)
    x_after = clone(z_t).data.copy()
    residual = float(np.linalg.norm(x_after - x_pred))
    return TaylorPrediction(x_before=x_before, x_predicted=x_pred,
                            x_after=x_after, residual=residual)


def taylor_convergence_order(g_theta, f_psi, z, etas,
                             loss: Discrepancy | None = None) -> tuple[list[float], list[float]]:
    """Residuals at each eta plus the empirical orders between successive
    (halving) rates."""
    residuals = [taylor_check(g_theta, f_psi, z, eta, loss).residual for eta in etas]
    orders = []
    for (e1, r1), (e2, r2) in zip(zip(etas, residuals), zip(etas[1:], residuals[1:])):
        if r2 == 0.0 or r1 == 0.0:
            orders.append(float("nan"))
        else:
            orders.append(float(np.log(r1 / r2) / np.log(e1 / e2)))
    return residuals, orders


def chain_factorization_gap(g_theta, f_psi, z, loss: Discrepancy | None = None) -> float:
    """Max-abs gap between the parameter gradient assembled from the three
    stage Jacobians (loss-of-output, output-of-sample, sample-of-params)
    and the directly back-propagated one."""
    loss = loss if loss is not None else Discrepancy("bce")
    z_t = _single_input(z)

    x_val = g_theta(z_t).data.copy()
    x_leaf = Tensor(x_val.copy(), requires_grad=True)
    jac_y_x = ad.jacobian(f_psi, x_leaf, wrt="input")

    y_val = f_psi(Tensor(x_val)).data.copy()

    class _LossOfY:
        def __call__(self, y):
            return _label_loss_on_output(loss, y)

    y_leaf = Tensor(y_val.copy(), requires_grad=True)
    jac_l_y = ad.jacobian(_LossOfY(), y_leaf, wrt="input")

    jac_x_theta = ad.jacobian(g_theta, z_t, wrt="parameters")
    assembled = (jac_l_y.data @ jac_y_x.data @ jac_x_theta.data).ravel()

    g_theta.zero_grad()
    f_psi.zero_grad()
    objective = _label_loss_on_output(loss, f_psi(g_theta(z_t)))
    ad.backprop(objective)
    direct = np.concatenate([p.grad.ravel() for p in g_theta.parameters()])
    g_theta.zero_grad()
    f_psi.zero_grad()
    return float(np.max(np.abs(assembled - direct)))


def _label_loss_on_output(loss: Discrepancy, y: Tensor) -> Tensor:
    """delta(y, "real") on an already-squashed output (no logit access)."""
    from .losses import bce_loss, l1_discrepancy, l2_discrepancy
    target = np.full(y.shape, REAL_LABEL)
    if loss.kind == "bce":
        return bce_loss(y, target, loss.reduction)
    if loss.kind == "l2":
        return l2_discrepancy(y, Tensor(target), loss.reduction)
    if loss.kind == "l1":
        return l1_discrepancy(y, Tensor(target), loss.reduction)
    raise ValueError(f"chain factorization undefined for {loss.kind!r}")


def inverse_example_direction_check(f_psi: ToyDiscriminator, x_batch,
                                    lambda1: float = 1.0) -> np.ndarray:
    """Cosine between each example's inversion move and the discriminator
    weight vector.

    For the logistic toy discriminator the move is a positive multiple of
    w, so every defined cosine is +1; entries are NaN when w (or the
    move) is zero.
    """
    x = np.asarray(x_batch.data if isinstance(x_batch, Tensor) else x_batch, dtype=np.float64)
    cfg = SubproblemConfig(lambda1=lambda1, n1=1)
    inverse = invert_labels(f_psi, Tensor(x), cfg)
    moves = inverse.x_prime - inverse.x_tilde_initial
    w = f_psi.w_vector
    w_norm = np.linalg.norm(w)
    cosines = np.full(x.shape[0], np.nan)
    if w_norm == 0.0:
        return cosines
    move_norms = np.linalg.norm(moves, axis=1)
    defined = move_norms > 0.0
    cosines[defined] = (moves[defined] @ w) / (move_norms[defined] * w_norm)
    return cosines


def toy_experiment(mu, sigma, cfg: SubproblemConfig, steps: int, *,
                   seed: int = 0, batch_size: int = 64, n_eval: int = 4096,
                   regime: str = "subproblem",
                   init_matrix: np.ndarray | None = None,
                   init_weights: np.ndarray | None = None) -> ToyAnalysisReport:
    """Train the linear-generator / logistic-discriminator GAN on
    N(mu, sigma) and report how far the first two moments got.

    The expected picture: the mean error shrinks while the covariance
    error stays large, and w ends up near a weighted difference of class
    means.
    """
    mu = np.asarray(mu, dtype=np.float64).ravel()
    d = mu.size
    data_spec = gaussian(mu, sigma)
    noise_spec = gaussian(np.zeros(d), np.eye(d))
    streams = np.random.SeedSequence(seed).spawn(5)
    if init_matrix is not None:
        gen = ToyGenerator(d, matrix=init_matrix)
    else:
        gen = ToyGenerator(d, rng=np.random.default_rng(streams[0]))
    if init_weights is not None:
        disc = ToyDiscriminator(d, weights=init_weights)
    else:
        disc = ToyDiscriminator(d, rng=np.random.default_rng(streams[1]))
    result = train(gen, disc, make_sampler(data_spec, streams[2]),
                   make_sampler(noise_spec, streams[3]), cfg, steps,
                   regime=regime, batch_size=batch_size)

    eval_rng = np.random.default_rng(streams[4])
    z_eval = eval_rng.standard_normal((n_eval, d))
    fake = gen(Tensor(z_eval)).data
    real = np.asarray(data_spec.params["mu"] + eval_rng.standard_normal((n_eval, d))
                      @ data_spec.params["chol"].T)
    mean_error, cov_error = moment_errors(fake, data_spec)

    w = disc.w_vector.copy()
    mean_real = real.mean(axis=0)
    mean_fake = fake.mean(axis=0)
    gap = mean_real - mean_fake
    denom = np.linalg.norm(w) * np.linalg.norm(gap)
    cosine = float(w @ gap / denom) if denom > 0 else float("nan")
    basis = np.stack([mean_real, -mean_fake], axis=1)
    coeffs, *_ = np.linalg.lstsq(basis, w, rcond=None)
    alpha, beta = (float(coeffs[0]), float(coeffs[1]))

    delta1_first = delta1_last = float("nan")
    if result.reports:
        delta1_first = result.reports[-1].delta1_first
        delta1_last = result.reports[-1].delta1_last
    cosines = inverse_example_direction_check(disc, fake[: min(256, n_eval)],
                                              lambda1=cfg.lambda1)
    return ToyAnalysisReport(
        w_learned=w, mean_real=mean_real, mean_fake=mean_fake,
        alignment_cosine=cosine, alpha=alpha, beta=beta,
        mean_error=mean_error, cov_error=cov_error,
        diverged=result.diverged, delta1_first=delta1_first,
        delta1_last=delta1_last, inversion_cosines=cosines,
        fake_samples=fake, real_samples=real)
