"""Independent reference computations used by the tests.

Everything here is straight-line numpy with no autodiff: central finite
differences, hand-rolled MLP arithmetic, and the analytic toy-model
gradient formulas. These stay independent of the code paths they check.
"""

import numpy as np


def central_diff_grad(fn, x, h=1e-6):
    """Central finite-difference gradient of scalar fn at x (any shape)."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = fn(x)
        flat[i] = orig - h
        down = fn(x)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * h)
    return grad


def grad_close(ad_grad, fd_grad, rel=1e-5, abs_floor=1e-8):
    """Per-element agreement: relative within rel, or absolute within floor."""
    ad_grad = np.asarray(ad_grad)
    fd_grad = np.asarray(fd_grad)
    diff = np.abs(ad_grad - fd_grad)
    denom = np.maximum(np.abs(ad_grad), np.abs(fd_grad))
    return bool(np.all((diff <= rel * denom) | (diff <= abs_floor)))


def sigmoid(v):
    return 1.0 / (1.0 + np.exp(-np.asarray(v, dtype=np.float64)))


def mlp_forward(x, weights, biases, activation):
    """Plain matrix arithmetic forward pass; activation on all but last layer."""
    acts = {"tanh": np.tanh, "sigmoid": sigmoid,
            "relu": lambda v: np.maximum(v, 0.0)}
    h = np.asarray(x, dtype=np.float64)
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        h = h @ w.T + b
        if i < last:
            h = acts[activation](h)
    return h


def toy_disc_w_grad(w, x_batch, labels):
    """Mean over the batch of (sigma(w.x) - y) x."""
    v = x_batch @ w
    return ((sigmoid(v) - labels)[:, None] * x_batch).mean(axis=0)


def toy_disc_x_grad(w, x_batch, labels):
    """Per-example (sigma(w.x) - y) w."""
    v = x_batch @ w
    return (sigmoid(v) - labels)[:, None] * w[None, :]


def toy_inversion_loop(w, x0, lam1, n1, batch_mean=True):
    """Reference loop for label inversion on the logistic toy model with
    BCE against the real label, step size lam1/n1."""
    x = np.asarray(x0, dtype=np.float64).copy()
    n = x.shape[0]
    for _ in range(n1):
        grad = toy_disc_x_grad(w, x, np.ones(n))
        if batch_mean:
            grad = grad / n
        x = x - (lam1 / n1) * grad
    return x


def toy_regression_loop(b_matrix, z, target, lam2, n2, sum_reduction=False):
    """Reference loop for squared-loss regression of the toy generator
    onto constant targets, gradient recomputed between steps."""
    b = np.asarray(b_matrix, dtype=np.float64).copy()
    z_aug = np.concatenate([z, np.ones((z.shape[0], 1))], axis=1)
    n = z.shape[0]
    for _ in range(n2):
        x = z_aug @ b.T
        resid = x - target
        grad = resid.T @ z_aug
        if not sum_reduction:
            grad = grad / n
        b = b - (lam2 / n2) * grad
    return b
