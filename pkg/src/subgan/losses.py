"""Discrepancy losses: BCE, squared, and absolute-deviation variants.

All losses reduce to a scalar. ``reduction="mean"`` divides by the batch
size (rows), so learning rates are batch-size-invariant; ``"sum"`` leaves
the per-example sum untouched, which is the convention under which the
decomposed generator update matches the standard one at any batch size.

BCE used in training is always computed from pre-sigmoid logits in a
fused, numerically safe form; nothing else is clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import ShapeMismatchError, Tensor

DISCREPANCY_KINDS = ("bce", "l2", "l1", "minimax")
REDUCTIONS = ("mean", "sum")


@dataclass(frozen=True)
class Discrepancy:
    """A loss choice: kind in {bce, l2, l1, minimax} plus batch reduction.

    "minimax" is the alternative generator objective log(1 - f(x)); it is
    only meaningful against the "real" label and cannot serve as a
    regression loss. ``regularizers`` reserves room for compound losses
    (smoothness penalties on inverse examples); it must stay empty for
    now.
    """
    kind: str = "bce"
    reduction: str = "mean"
    regularizers: tuple = ()

    def __post_init__(self):
        if self.kind not in DISCREPANCY_KINDS:
            raise ValueError(f"unknown discrepancy kind {self.kind!r}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.regularizers:
            raise NotImplementedError(
                "compound discrepancies with regularizer terms are reserved, not implemented")

    def __str__(self) -> str:
        return self.kind if self.reduction == "mean" else f"{self.kind}:{self.reduction}"

    @classmethod
    def parse(cls, text: str) -> "Discrepancy":
        kind, _, reduction = text.partition(":")
        return cls(kind=kind.strip(), reduction=(reduction.strip() or "mean"))


def _reduce(per_element: Tensor, reduction: str, batch: int) -> Tensor:
    total = ad.sum_all(per_element)
    if reduction == "sum":
        return total
    return ad.scale(total, 1.0 / batch)


def _validate_labels(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.float64)
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise ValueError("labels must be exactly 0 or 1")
    return labels


def bce_loss(y: Tensor, y_star, reduction: str = "mean") -> Tensor:
    """Binary cross-entropy from probabilities.

    Contract surface for already-squashed outputs; training paths use
    :func:`bce_logits_loss` instead. y must lie strictly inside (0, 1).
    """
    labels = _validate_labels(y_star.data if isinstance(y_star, Tensor) else y_star)
    if labels.shape != y.shape:
        raise ShapeMismatchError(f"bce_loss: labels {labels.shape} vs y {y.shape}")
    if np.any(y.data <= 0.0) or np.any(y.data >= 1.0):
        raise ValueError("bce_loss: probabilities must lie strictly inside (0, 1)")
    t = Tensor(labels)
    one_minus_t = Tensor(1.0 - labels)
    per = ad.neg(ad.add(ad.mul(ad.log(y), t),
                        ad.mul(ad.log(ad.sub(Tensor(np.ones_like(y.data)), y)), one_minus_t)))
    return _reduce(per, reduction, y.shape[0])


def bce_logits_loss(v: Tensor, y_star, reduction: str = "mean") -> Tensor:
    """Binary cross-entropy fused with the sigmoid, from logits."""
    labels = _validate_labels(y_star.data if isinstance(y_star, Tensor) else y_star)
    if labels.shape != v.shape:
        labels = np.broadcast_to(labels, v.shape).copy()
    return _reduce(ad.bce_from_logits(v, labels), reduction, v.shape[0])


def minimax_logits_loss(v: Tensor, reduction: str = "mean") -> Tensor:
    """log(1 - sigma(v)), the generator objective that saturates when the
    discriminator confidently rejects the sample."""
    return _reduce(ad.log_one_minus_sigmoid(v), reduction, v.shape[0])


def l2_discrepancy(x: Tensor, x_prime: Tensor, reduction: str = "mean") -> Tensor:
    """Half squared Euclidean distance per example, reduced over the batch."""
    if x.shape != x_prime.shape:
        raise ShapeMismatchError(f"l2_discrepancy: {x.shape} vs {x_prime.shape}")
    total = ad.scale(ad.sumsq(ad.sub(x, x_prime)), 0.5)
    if reduction == "sum":
        return total
    return ad.scale(total, 1.0 / x.shape[0])


def l1_discrepancy(x: Tensor, x_prime: Tensor, reduction: str = "mean") -> Tensor:
    """Absolute deviation summed per example, reduced over the batch.

    The subgradient at a tie is 0, so x == x' is a fixed point.
    """
    if x.shape != x_prime.shape:
        raise ShapeMismatchError(f"l1_discrepancy: {x.shape} vs {x_prime.shape}")
    total = ad.abs_sum(ad.sub(x, x_prime))
    if reduction == "sum":
        return total
    return ad.scale(total, 1.0 / x.shape[0])


def label_discrepancy(disc: Discrepancy, f_model, x: Tensor, target: float) -> Tensor:
    """delta(f(x), target-label) for a discriminator-like model.

    BCE goes through the model's logits; l2/l1 compare the squashed
    probability against the constant label.
    """
    if disc.kind == "bce":
        v = f_model.logit(x)
        return bce_logits_loss(v, np.full(v.shape, float(target)), disc.reduction)
    if disc.kind == "minimax":
        if float(target) != 1.0:
            raise ValueError("minimax objective is only defined against the 'real' label")
        return minimax_logits_loss(f_model.logit(x), disc.reduction)
    y = f_model(x)
    t = Tensor(np.full(y.shape, float(target)))
    if disc.kind == "l2":
        return l2_discrepancy(y, t, disc.reduction)
    return l1_discrepancy(y, t, disc.reduction)


def regression_discrepancy(disc: Discrepancy, x: Tensor, target: Tensor) -> Tensor:
    """delta2(x, x') against a constant data-space target."""
    if disc.kind == "l2":
        return l2_discrepancy(x, target, disc.reduction)
    if disc.kind == "l1":
        return l1_discrepancy(x, target, disc.reduction)
    raise ValueError(
        f"regression loss must be l2 or l1 for real-valued targets, got {disc.kind!r}")


def discriminator_loss(f_model, real: Tensor, fake: Tensor) -> Tensor:
    """Average of the real-vs-1 and fake-vs-0 mean BCEs."""
    loss_real = bce_logits_loss(f_model.logit(real), np.ones((real.shape[0], 1)))
    loss_fake = bce_logits_loss(f_model.logit(fake), np.zeros((fake.shape[0], 1)))
    return ad.scale(ad.add(loss_real, loss_fake), 0.5)
