"""Generators, discriminators, and parameter plumbing.

Two model families: fully connected nets (generators end in a linear
layer, discriminators in a sigmoid over a single logit) and the linear
toy pair (an affine map on 1-augmented noise, and logistic regression).
Parameters are float64 tensors with a stable flattened ordering so
checkpoints and update-norm bookkeeping are exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import ShapeMismatchError, Tensor

_ACTIVATIONS = {
    "sigmoid": ad.sigmoid,
    "tanh": ad.tanh,
    "relu": ad.relu,
    "linear": None,
}


class Model:
    """Base for parameterized differentiable maps."""

    def parameters(self) -> list[Tensor]:
        raise NotImplementedError

    def __call__(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def describe(self) -> dict:
        """One-line JSON-able architecture descriptor."""
        raise NotImplementedError

    @property
    def param_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([p.data.ravel() for p in self.parameters()])

    def set_flat_parameters(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.param_count:
            raise ShapeMismatchError(
                f"expected {self.param_count} parameters, got {flat.size}")
        offset = 0
        for p in self.parameters():
            chunk = flat[offset:offset + p.size]
            p.data = chunk.reshape(p.shape).copy()
            offset += p.size

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def clone(self) -> "Model":
        other = make_model(self.describe())
        other.set_flat_parameters(self.flat_parameters())
        return other


class Mlp(Model):
    """Fully connected net: affine layers with a fixed hidden activation.

    ``head`` controls the last layer: None leaves it linear (generator
    use), "sigmoid" squashes it to (0, 1) (discriminator use, with
    :meth:`logit` exposing the pre-sigmoid value for stable losses).

    Weights start at N(0, 1/fan_in), biases at zero.
    """

    def __init__(self, sizes, activation: str = "tanh", head: str | None = None,
                 rng: np.random.Generator | None = None):
        if len(sizes) < 2:
            raise ValueError("Mlp needs at least an input and an output size")
        if activation not in ("sigmoid", "tanh", "relu"):
            raise ValueError(f"unknown activation {activation!r}")
        if head not in (None, "sigmoid"):
            raise ValueError(f"unknown head {head!r}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.sizes = [int(s) for s in sizes]
        self.activation = activation
        self.head = head
        self.weights: list[Tensor] = []
        self.biases: list[Tensor] = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            w = rng.standard_normal((fan_out, fan_in)) / np.sqrt(fan_in)
            self.weights.append(Tensor(w, requires_grad=True))
            self.biases.append(Tensor(np.zeros(fan_out), requires_grad=True))

    def parameters(self) -> list[Tensor]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def _check_input(self, x: Tensor) -> None:
        if x.data.ndim != 2 or x.shape[1] != self.sizes[0]:
            raise ShapeMismatchError(
                f"layer 'affine0' expects input (batch, {self.sizes[0]}), got {x.shape}")

    def logit(self, x: Tensor) -> Tensor:
        """Forward pass up to (and including) the last affine layer."""
        self._check_input(x)
        act = _ACTIVATIONS[self.activation]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if h.shape[1] != w.shape[1]:
                raise ShapeMismatchError(
                    f"layer 'affine{i}' expects input width {w.shape[1]}, got {h.shape[1]}")
            h = ad.affine(h, w, b)
            if i < last:
                h = act(h)
        return h

    def __call__(self, x: Tensor) -> Tensor:
        h = self.logit(x)
        if self.head == "sigmoid":
            h = ad.sigmoid(h)
        return h

    def describe(self) -> dict:
        return {"kind": "mlp", "sizes": self.sizes,
                "activation": self.activation, "head": self.head}


class ToyGenerator(Model):
    """Affine map on 1-augmented noise: x = B [z; 1], B of shape (d, d+1)."""

    def __init__(self, dim: int, rng: np.random.Generator | None = None,
                 matrix: np.ndarray | None = None):
        self.dim = int(dim)
        if matrix is not None:
            matrix = np.asarray(matrix, dtype=np.float64)
            if matrix.shape != (self.dim, self.dim + 1):
                raise ShapeMismatchError(
                    f"toy generator matrix must be ({self.dim}, {self.dim + 1}), got {matrix.shape}")
            b = matrix.copy()
        else:
            rng = rng if rng is not None else np.random.default_rng(0)
            b = rng.standard_normal((self.dim, self.dim + 1)) / np.sqrt(self.dim + 1)
        self.b_matrix = Tensor(b, requires_grad=True)

    def parameters(self) -> list[Tensor]:
        return [self.b_matrix]

    def __call__(self, z: Tensor) -> Tensor:
        if z.data.ndim != 2 or z.shape[1] != self.dim:
            raise ShapeMismatchError(
                f"layer 'toy_affine' expects input (batch, {self.dim}), got {z.shape}")
        return ad.affine(ad.augment_ones(z), self.b_matrix)

    def describe(self) -> dict:
        return {"kind": "toy_generator", "dim": self.dim}


class ToyDiscriminator(Model):
    """Logistic regression without bias: y = sigma(w . x)."""

    def __init__(self, dim: int, rng: np.random.Generator | None = None,
                 weights: np.ndarray | None = None):
        self.dim = int(dim)
        if weights is not None:
            weights = np.asarray(weights, dtype=np.float64).reshape(1, self.dim)
            w = weights.copy()
        else:
            rng = rng if rng is not None else np.random.default_rng(0)
            w = rng.standard_normal((1, self.dim)) / np.sqrt(self.dim)
        self.w = Tensor(w, requires_grad=True)

    @property
    def w_vector(self) -> np.ndarray:
        return self.w.data.ravel()

    def parameters(self) -> list[Tensor]:
        return [self.w]

    def logit(self, x: Tensor) -> Tensor:
        if x.data.ndim != 2 or x.shape[1] != self.dim:
            raise ShapeMismatchError(
                f"layer 'toy_logit' expects input (batch, {self.dim}), got {x.shape}")
        return ad.affine(x, self.w)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.sigmoid(self.logit(x))

    def describe(self) -> dict:
        return {"kind": "toy_discriminator", "dim": self.dim}


def make_model(descriptor: dict, rng: np.random.Generator | None = None) -> Model:
    """Build a model from its architecture descriptor."""
    kind = descriptor.get("kind")
    if kind == "mlp":
        return Mlp(descriptor["sizes"], activation=descriptor.get("activation", "tanh"),
                   head=descriptor.get("head"), rng=rng)
    if kind == "toy_generator":
        return ToyGenerator(descriptor["dim"], rng=rng)
    if kind == "toy_discriminator":
        return ToyDiscriminator(descriptor["dim"], rng=rng)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model: Model, path) -> None:
    """Checkpoint: one JSON descriptor line, then one hex float per line.

    float.hex() round-trips bit-exactly through text.
    """
    path = Path(path)
    lines = [json.dumps(model.describe(), sort_keys=True)]
    lines.extend(v.hex() for v in model.flat_parameters())
    path.write_text("\n".join(lines) + "\n")


def load_model(path) -> Model:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"empty checkpoint {path}")
    descriptor = json.loads(lines[0])
    model = make_model(descriptor)
    flat = np.array([float.fromhex(v) for v in lines[1:]], dtype=np.float64)
    model.set_flat_parameters(flat)
    return model
