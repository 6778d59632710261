"""Seeded synthetic data distributions with known moments."""

from __future__ import annotations

import numpy as np


def _as_cov(sigma, dim: int) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim == 1:
        sigma = np.diag(sigma)
    if sigma.shape != (dim, dim):
        raise ValueError(f"covariance must be ({dim}, {dim}), got {sigma.shape}")
    if not np.allclose(sigma, sigma.T, atol=1e-12):
        raise ValueError("covariance must be symmetric")
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise ValueError("covariance must be positive definite") from None
    return sigma


class DistributionSpec:
    """A sampleable synthetic distribution: gaussian, gaussian mixture,
    noisy ring, or the unit hypercube. Construct via the factory
    functions below."""

    def __init__(self, kind: str, dim: int, **params):
        self.kind = kind
        self.dim = int(dim)
        self.params = params

    def __repr__(self) -> str:
        return f"DistributionSpec(kind={self.kind!r}, dim={self.dim})"

    def true_mean(self) -> np.ndarray:
        if self.kind == "gaussian":
            return self.params["mu"].copy()
        if self.kind == "mixture":
            weights = self.params["weights"]
            mus = self.params["mus"]
            return np.einsum("k,kd->d", weights, mus)
        if self.kind == "ring":
            return np.zeros(2)
        if self.kind == "uniform":
            return np.full(self.dim, 0.5)
        raise ValueError(self.kind)

    def true_cov(self) -> np.ndarray:
        if self.kind == "gaussian":
            return self.params["sigma"].copy()
        if self.kind == "mixture":
            weights = self.params["weights"]
            mus = self.params["mus"]
            sigmas = self.params["sigmas"]
            mean = self.true_mean()
            second = np.zeros((self.dim, self.dim))
            for w, mu, sig in zip(weights, mus, sigmas):
                second += w * (sig + np.outer(mu, mu))
            return second - np.outer(mean, mean)
        if self.kind == "ring":
            r = self.params["radius"]
            s = self.params["noise_std"]
            return (0.5 * r * r + s * s) * np.eye(2)
        if self.kind == "uniform":
            return np.eye(self.dim) / 12.0
        raise ValueError(self.kind)


def gaussian(mu, sigma) -> DistributionSpec:
    mu = np.asarray(mu, dtype=np.float64).ravel()
    cov = _as_cov(sigma, mu.size)
    spec = DistributionSpec("gaussian", mu.size, mu=mu, sigma=cov)
    spec.params["chol"] = np.linalg.cholesky(cov)
    return spec


def gaussian_mixture(weights, components) -> DistributionSpec:
    """components: sequence of (mu, sigma) pairs."""
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    if len(components) != weights.size:
        raise ValueError("one (mu, sigma) pair per weight required")
    mus, sigmas, chols = [], [], []
    dim = None
    for mu, sigma in components:
        mu = np.asarray(mu, dtype=np.float64).ravel()
        dim = mu.size if dim is None else dim
        if mu.size != dim:
            raise ValueError("mixture components must share a dimension")
        cov = _as_cov(sigma, dim)
        mus.append(mu)
        sigmas.append(cov)
        chols.append(np.linalg.cholesky(cov))
    return DistributionSpec("mixture", dim, weights=weights,
                            mus=np.stack(mus), sigmas=np.stack(sigmas),
                            chols=np.stack(chols))


def ring(radius: float = 1.0, noise_std: float = 0.05) -> DistributionSpec:
    if radius <= 0 or noise_std < 0:
        raise ValueError("ring needs radius > 0 and noise_std >= 0")
    return DistributionSpec("ring", 2, radius=float(radius), noise_std=float(noise_std))


def uniform_hypercube(dim: int) -> DistributionSpec:
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return DistributionSpec("uniform", dim)


def sample(spec: DistributionSpec, n: int, seed) -> np.ndarray:
    """Draw an (n, d) array, bit-reproducible for a given (spec, seed).

    ``seed`` may be an integer or an existing numpy Generator (for
    derived streams).
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if spec.kind == "gaussian":
        normals = rng.standard_normal((n, spec.dim))
        return spec.params["mu"] + normals @ spec.params["chol"].T
    if spec.kind == "mixture":
        idx = rng.choice(spec.params["weights"].size, size=n, p=spec.params["weights"])
        normals = rng.standard_normal((n, spec.dim))
        out = np.empty((n, spec.dim))
        for k in range(spec.params["weights"].size):
            rows = idx == k
            out[rows] = spec.params["mus"][k] + normals[rows] @ spec.params["chols"][k].T
        return out
    if spec.kind == "ring":
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        pts = spec.params["radius"] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return pts + spec.params["noise_std"] * rng.standard_normal((n, 2))
    if spec.kind == "uniform":
        return rng.random((n, spec.dim))
    raise ValueError(spec.kind)


def make_sampler(spec: DistributionSpec, seed) -> callable:
    """A stateful sampler closure drawing successive batches from one
    seeded stream."""
    rng = np.random.default_rng(seed)
    return lambda n: sample(spec, n, rng)
