"""Exact Gaussian-process regression on top of the hybrid additive kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from . import kernel
from ._fastpath import cross_kernel_core
from .space import HybridPoint, SpaceSpec

_MAX_JITTER = 1e-2
_Y_STD_FLOOR = 1e-8


@dataclass(frozen=True)
class GPModel:
    """Fitted GP: training data, Cholesky factor, and precomputed alpha.

    Targets are standardized internally; predictions are reported in the
    original y units via (y_mean, y_std).
    """

    spec: SpaceSpec
    hypers: kernel.KernelHypers
    xd: np.ndarray          # (N, m) category indices
    xc: np.ndarray          # (N, n) normalized coordinates
    y: np.ndarray           # (N,) standardized targets
    chol: np.ndarray        # lower-triangular factor of the jittered Gram
    alpha: np.ndarray       # chol^-T chol^-1 y
    y_mean: float
    y_std: float
    prior_var: float        # k(x, x), constant across the space

    @property
    def n_train(self) -> int:
        return self.y.shape[0]


def robust_cholesky(g: np.ndarray, jitter: float = kernel.JITTER) -> np.ndarray:
    """Lower Cholesky factor, escalating jitter x10 up to 1e-2 on failure.

    `g` is assumed to already carry the base jitter on its diagonal; the
    escalation adds the difference on top.
    """
    added = 0.0
    while True:
        try:
            return cholesky(g + added * np.eye(g.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > _MAX_JITTER:
                raise np.linalg.LinAlgError(
                    "Gram matrix not positive definite after jitter escalation"
                )
            added = jitter


def fit(X, y_raw, h: kernel.KernelHypers, spec: SpaceSpec) -> GPModel:
    """Standardize targets, build the jittered Gram, and factorize."""
    y_raw = np.asarray(y_raw, dtype=float)
    if len(X) < 1 or y_raw.shape[0] != len(X):
        raise ValueError("need at least one training pair with matching lengths")
    if not np.all(np.isfinite(y_raw)):
        raise ValueError("non-finite training targets")
    y_mean = float(y_raw.mean())
    y_std = max(float(y_raw.std()), _Y_STD_FLOOR)
    y = (y_raw - y_mean) / y_std
    g = kernel.gram(X, h, spec)
    chol = robust_cholesky(g)
    alpha = cho_solve((chol, True), y)
    xd, xc = kernel.encode_points(X, spec)
    return GPModel(spec=spec, hypers=h, xd=xd, xc=xc, y=y, chol=chol,
                   alpha=alpha, y_mean=y_mean, y_std=y_std,
                   prior_var=kernel.self_kernel_value(h, spec))


def predict_batch(model: GPModel, xd: np.ndarray, xc: np.ndarray):
    """Predictive (mean, variance) in original y units for encoded points."""
    h = model.hypers
    theta2 = np.asarray(h.theta) ** 2
    k_star = cross_kernel_core(
        model.xd, model.xc, np.ascontiguousarray(xd, dtype=np.int64),
        np.ascontiguousarray(xc, dtype=float),
        np.asarray(model.spec.arities, dtype=float),
        np.asarray(h.beta), np.asarray(h.sigma), theta2)
    mean_std = k_star.T @ model.alpha
    v = solve_triangular(model.chol, k_star, lower=True, check_finite=False)
    var_std = np.maximum(model.prior_var - np.sum(v * v, axis=0), 0.0)
    return (mean_std * model.y_std + model.y_mean,
            var_std * model.y_std ** 2)


def predict(model: GPModel, x: HybridPoint) -> tuple[float, float]:
    """Predictive mean and (clamped non-negative) variance at one point."""
    xd = x.xd_array.reshape(1, -1)
    xc = x.xc_array.reshape(1, -1)
    mean, var = predict_batch(model, xd, xc)
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(model: GPModel) -> float:
    """Gaussian evidence of the standardized targets."""
    n = model.n_train
    return float(
        -0.5 * np.dot(model.y, model.alpha)
        - np.sum(np.log(np.diag(model.chol)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )
