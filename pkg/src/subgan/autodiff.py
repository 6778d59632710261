"""Reverse-mode automatic differentiation over dense float64 tensors.

The engine is intentionally small. A :class:`Tensor` wraps a float64
ndarray; every primitive links its result to its inputs together with a
closure that maps the output adjoint to input adjoints. A
:class:`ComputationRecord` is the topologically ordered trace behind one
output, and :func:`backward` replays it in reverse, accumulating adjoints
additively into ``Tensor.grad``.

Everything is 64-bit and single-threaded-deterministic: the same model,
input, and seed produce bit-identical outputs and gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ShapeMismatchError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class RecordConsumedError(RuntimeError):
    """A single-use computation record was replayed more than once."""


class Tensor:
    """Dense float64 value with an optional accumulated gradient.

    ``grad`` accumulates additively: two backward passes without a reset
    double it. Tensors produced by primitives keep references to their
    parents; leaf tensors have none.
    """

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_vjp", "_op")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._vjp = None
        self._op = "leaf"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        """Copy of the value with no graph history and no grad tracking."""
        return Tensor(self.data.copy())

    def __repr__(self) -> str:
        return f"Tensor(op={self._op}, shape={self.shape}, requires_grad={self.requires_grad})"

    # Small amount of operator sugar; the module-level functions are the API.
    def __add__(self, other):
        return add(self, other if isinstance(other, Tensor) else Tensor(other))

    def __sub__(self, other):
        return sub(self, other if isinstance(other, Tensor) else Tensor(other))

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return mul(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__


def _result(data, parents, vjp, op) -> Tensor:
    # requires_grad is transitive, so constant subgraphs prune themselves:
    # a result with no grad-requiring parent is an ordinary leaf.
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._vjp = vjp
        out._op = op
    return out


def _check_same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{op}: shapes {a.shape} and {b.shape} differ")


# ---------------------------------------------------------------------------
# Primitives. Each returns a Tensor whose _vjp maps the output adjoint to a
# tuple of parent adjoints (None where no gradient flows).
# ---------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "add")
    return _result(a.data + b.data, (a, b), lambda g: (g, g), "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")
    return _result(a.data - b.data, (a, b), lambda g: (g, -g), "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "mul")
    ad, bd = a.data, b.data
    return _result(ad * bd, (a, b), lambda g: (g * bd, g * ad), "mul")


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _result(a.data * c, (a,), lambda g: (g * c,), "scale")


def neg(a: Tensor) -> Tensor:
    return scale(a, -1.0)


def affine(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """``x @ weight.T (+ bias)`` with x (n, k), weight (m, k), bias (m,)."""
    if x.data.ndim != 2 or weight.data.ndim != 2:
        raise ShapeMismatchError(
            f"affine: expected 2-d operands, got {x.shape} and {weight.shape}")
    if x.shape[1] != weight.shape[1]:
        raise ShapeMismatchError(
            f"affine: input width {x.shape[1]} does not match weight fan-in {weight.shape[1]}")
    out = x.data @ weight.data.T
    xd, wd = x.data, weight.data
    if bias is None:
        return _result(out, (x, weight),
                       lambda g: (g @ wd, g.T @ xd), "affine")
    if bias.shape != (weight.shape[0],):
        raise ShapeMismatchError(
            f"affine: bias shape {bias.shape} does not match fan-out {weight.shape[0]}")
    return _result(out + bias.data, (x, weight, bias),
                   lambda g: (g @ wd, g.T @ xd, g.sum(axis=0)), "affine")


def augment_ones(x: Tensor) -> Tensor:
    """Append a constant-1 column: (n, k) -> (n, k+1)."""
    if x.data.ndim != 2:
        raise ShapeMismatchError(f"augment_ones: expected 2-d input, got {x.shape}")
    out = np.concatenate([x.data, np.ones((x.shape[0], 1))], axis=1)
    return _result(out, (x,), lambda g: (g[:, :-1],), "augment_ones")


def _sigma(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Tensor) -> Tensor:
    s = _sigma(a.data)
    return _result(s, (a,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return _result(t, (a,), lambda g: (g * (1.0 - t * t),), "tanh")


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _result(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,), "relu")


def log(a: Tensor) -> Tensor:
    ad = a.data
    return _result(np.log(ad), (a,), lambda g: (g / ad,), "log")


def sumsq(a: Tensor) -> Tensor:
    """Squared-norm reduction: sum of squares over all elements (scalar)."""
    ad = a.data
    return _result(np.sum(ad * ad), (a,),
                   lambda g: (2.0 * ad * g,), "sumsq")


def abs_sum(a: Tensor) -> Tensor:
    """Absolute-value reduction; subgradient at 0 is defined as 0."""
    ad = a.data
    return _result(np.sum(np.abs(ad)), (a,),
                   lambda g: (np.sign(ad) * g,), "abs_sum")


def sum_all(a: Tensor) -> Tensor:
    n_shape = a.data.shape
    return _result(np.sum(a.data), (a,),
                   lambda g: (np.broadcast_to(g, n_shape).astype(np.float64),), "sum")


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    n_shape = a.data.shape
    return _result(np.mean(a.data), (a,),
                   lambda g: (np.broadcast_to(g / n, n_shape).astype(np.float64),), "mean")


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def bce_from_logits(v: Tensor, labels: np.ndarray) -> Tensor:
    """Per-element binary cross-entropy computed from pre-sigmoid logits.

    Fused for numerical safety: loss = softplus(v) - v*y, gradient
    sigma(v) - y. Labels are constants; no gradient flows into them.
    """
    y = np.asarray(labels, dtype=np.float64)
    if y.shape != v.shape:
        raise ShapeMismatchError(f"bce_from_logits: labels {y.shape} vs logits {v.shape}")
    vd = v.data
    return _result(_softplus(vd) - vd * y, (v,),
                   lambda g: (g * (_sigma(vd) - y),), "bce_from_logits")


def log_one_minus_sigmoid(v: Tensor) -> Tensor:
    """Per-element log(1 - sigma(v)) = -softplus(v); gradient -sigma(v)."""
    vd = v.data
    return _result(-_softplus(vd), (v,), lambda g: (-g * _sigma(vd),), "log_one_minus_sigmoid")


# ---------------------------------------------------------------------------
# Records, backward, jacobian
# ---------------------------------------------------------------------------

class ComputationRecord:
    """Topologically ordered trace of the primitives behind one output.

    Every operation's inputs precede it in ``nodes``; replaying the list in
    reverse propagates adjoints to all grad-requiring leaves. Records are
    replayable by default; pass ``single_use=True`` to forbid a second pass.
    """

    __slots__ = ("output", "nodes", "single_use", "consumed")

    def __init__(self, output: Tensor, single_use: bool = False):
        self.output = output
        self.nodes = _toposort(output)
        self.single_use = single_use
        self.consumed = False

    def __len__(self) -> int:
        return len(self.nodes)


def _toposort(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            stack.append((parent, False))
    return order


def forward(model, input: Tensor, single_use: bool = False) -> tuple[Tensor, ComputationRecord]:
    """Run ``model(input)`` and capture the trace behind the output."""
    output = model(input)
    return output, ComputationRecord(output, single_use=single_use)


def backward(record: ComputationRecord, seed_grad) -> None:
    """Replay a record in reverse, seeding the output adjoint.

    Accumulates (additively) into ``.grad`` of every grad-requiring tensor
    in the record.
    """
    if record.single_use and record.consumed:
        raise RecordConsumedError("single-use record already replayed")
    record.consumed = True
    seed = seed_grad.data if isinstance(seed_grad, Tensor) else np.asarray(seed_grad, dtype=np.float64)
    if seed.shape != record.output.data.shape:
        raise ShapeMismatchError(
            f"backward: seed shape {seed.shape} does not match output shape {record.output.data.shape}")
    adjoints: dict[int, np.ndarray] = {id(record.output): seed}
    for node in reversed(record.nodes):
        adj = adjoints.pop(id(node), None)
        if adj is None:
            continue
        if node.requires_grad:
            node.grad = adj.copy() if node.grad is None else node.grad + adj
        if node._vjp is not None:
            for parent, padj in zip(node._parents, node._vjp(adj)):
                if padj is None:
                    continue
                pid = id(parent)
                if pid in adjoints:
                    adjoints[pid] = adjoints[pid] + padj
                else:
                    adjoints[pid] = padj


def backprop(loss: Tensor) -> None:
    """Convenience: backward over a scalar loss with seed 1."""
    if loss.data.ndim != 0:
        raise ShapeMismatchError(f"backprop expects a scalar loss, got shape {loss.shape}")
    backward(ComputationRecord(loss), np.asarray(1.0))


@dataclass
class JacobianMatrix:
    """Dense Jacobian; row i is d(output_i)/d(flattened target)."""
    rows: int
    cols: int
    data: np.ndarray


def jacobian(model, input, wrt: str = "parameters") -> JacobianMatrix:
    """Dense Jacobian of a model output, one backward pass per output row.

    ``wrt="parameters"`` differentiates against the model's flattened
    parameters (the model must expose ``parameters()``); ``wrt="input"``
    against the input tensor. Pre-existing gradients on the targets are
    saved and restored.
    """
    if wrt not in ("parameters", "input"):
        raise ValueError(f"jacobian: wrt must be 'parameters' or 'input', got {wrt!r}")
    x = input if isinstance(input, Tensor) else Tensor(input)
    if x.data.ndim == 1:
        x = Tensor(x.data.reshape(1, -1), requires_grad=x.requires_grad)

    params = list(model.parameters()) if hasattr(model, "parameters") else []
    if wrt == "parameters":
        if not params:
            raise ValueError("jacobian: model exposes no parameters")
        targets = params
    else:
        targets = [x]

    restore_flag = x.requires_grad
    x.requires_grad = True
    touched = {id(t): t for t in params}
    touched[id(x)] = x
    saved = {tid: t.grad for tid, t in touched.items()}
    try:
        output, record = forward(model, x)
        m = output.data.size
        cols = sum(t.data.size for t in targets)
        jac = np.zeros((m, cols))
        for i in range(m):
            for t in touched.values():
                t.grad = None
            seed = np.zeros_like(output.data)
            seed.flat[i] = 1.0
            backward(record, seed)
            jac[i] = np.concatenate([
                (t.grad if t.grad is not None else np.zeros_like(t.data)).ravel()
                for t in targets
            ])
    finally:
        x.requires_grad = restore_flag
        for tid, t in touched.items():
            t.grad = saved[tid]
    return JacobianMatrix(rows=m, cols=cols, data=jac)
