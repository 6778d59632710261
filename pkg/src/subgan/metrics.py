"""Desk-scale sample-quality metrics: Gaussian Frechet distance on raw
data, plus first/second-moment errors against a known target.

The Frechet formula is the usual one; covariances are fitted from raw
samples and made PSD by clipping negative eigenvalues at zero, and the
matrix square root goes through an eigendecomposition of the symmetrized
product, which stays stable for near-singular fits.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionSpec

_DEGENERATE_EIG = 1e-12


class DegenerateCovarianceWarning(RuntimeWarning):
    """A fitted covariance was rank-deficient after PSD clipping."""


@dataclass
class MetricsSnapshot:
    step: int
    frechet: float
    mean_error: float
    cov_error: float
    n_samples: int


def fit_gaussian(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    samples = np.asarray(samples, dtype=np.float64)
    return samples.mean(axis=0), np.cov(samples, rowvar=False).reshape(samples.shape[1], samples.shape[1])


def _psd_clip(cov: np.ndarray, warn_label: str | None = None) -> np.ndarray:
    sym = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    clipped = np.clip(eigvals, 0.0, None)
    if warn_label and clipped.min() <= _DEGENERATE_EIG * max(1.0, clipped.max()):
        warnings.warn(
            f"{warn_label}: fitted covariance is degenerate after clipping",
            DegenerateCovarianceWarning, stacklevel=3)
    return (eigvecs * clipped) @ eigvecs.T


def _psd_sqrt(cov: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(0.5 * (cov + cov.T))
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T


def frechet_from_moments(mean_a, cov_a, mean_b, cov_b) -> float:
    """||m_a - m_b||^2 + tr(C_a + C_b - 2 (C_a C_b)^{1/2}).

    tr((C_a C_b)^{1/2}) is computed as the trace square root of the
    symmetrized product S_a C_b S_a with eigenvalues clipped at zero.
    """
    mean_a = np.asarray(mean_a, dtype=np.float64).ravel()
    mean_b = np.asarray(mean_b, dtype=np.float64).ravel()
    cov_a = np.asarray(cov_a, dtype=np.float64)
    cov_b = np.asarray(cov_b, dtype=np.float64)
    diff = mean_a - mean_b
    root_a = _psd_sqrt(cov_a)
    inner = root_a @ cov_b @ root_a
    eigvals = np.linalg.eigvalsh(0.5 * (inner + inner.T))
    trace_sqrt = np.sum(np.sqrt(np.clip(eigvals, 0.0, None)))
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * trace_sqrt)
    return max(value, 0.0)


def gaussian_frechet(samples_a: np.ndarray, samples_b: np.ndarray) -> float:
    """Frechet distance between Gaussian fits of two raw sample sets."""
    samples_a = np.asarray(samples_a, dtype=np.float64)
    samples_b = np.asarray(samples_b, dtype=np.float64)
    if samples_a.ndim != 2 or samples_b.ndim != 2 or samples_a.shape[1] != samples_b.shape[1]:
        raise ValueError("expected two (n, d) sample sets with equal d")
    d = samples_a.shape[1]
    if samples_a.shape[0] < d + 1 or samples_b.shape[0] < d + 1:
        raise ValueError(f"need at least d+1={d + 1} samples per side")
    mean_a, cov_a = fit_gaussian(samples_a)
    mean_b, cov_b = fit_gaussian(samples_b)
    cov_a = _psd_clip(cov_a, warn_label="gaussian_frechet(side a)")
    cov_b = _psd_clip(cov_b, warn_label="gaussian_frechet(side b)")
    return frechet_from_moments(mean_a, cov_a, mean_b, cov_b)


def moment_errors(samples: np.ndarray, spec: DistributionSpec) -> tuple[float, float]:
    """Euclidean mean error and Frobenius covariance error against the
    spec's true moments."""
    samples = np.asarray(samples, dtype=np.float64)
    mean, cov = fit_gaussian(samples)
    mean_error = float(np.linalg.norm(mean - spec.true_mean()))
    cov_error = float(np.linalg.norm(cov - spec.true_cov(), ord="fro"))
    return mean_error, cov_error
