"""Plain RBF-kernel GP over a relaxed all-continuous view of the space.

Used by the Cont-BO and Vanilla-BO baselines: discrete category indices are
embedded into [-1, 1] and every dimension gets an RBF base with its own
length scale. The kernel is the usual product (anisotropic) RBF with unit
amplitude on standardized targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .hyper import _golden_section_max
from .space import SpaceSpec

_JITTER = 1e-6
_SIGMA_LOG_LO, _SIGMA_LOG_HI = math.log(0.01), math.log(10.0)
_NOISE_LOG_LO, _NOISE_LOG_HI = math.log(1e-8), math.log(1e-1)


def embed(spec: SpaceSpec, xd: np.ndarray, xc: np.ndarray) -> np.ndarray:
    """Map (category indices, normalized continuous) to one [-1, 1]^dim array."""
    cols = []
    for i, v in enumerate(spec.discrete_vars):
        cols.append(2.0 * xd[:, i] / (v.arity - 1) - 1.0)
    out = np.empty((xd.shape[0], spec.dim))
    for i, col in enumerate(cols):
        out[:, i] = col
    if spec.n:
        out[:, spec.m:] = xc
    return out


def round_to_categories(spec: SpaceSpec, z: np.ndarray) -> np.ndarray:
    """Nearest category index for each relaxed discrete coordinate."""
    idx = np.empty(spec.m, dtype=np.int64)
    for i, v in enumerate(spec.discrete_vars):
        idx[i] = int(np.clip(np.round((z[i] + 1.0) / 2.0 * (v.arity - 1)),
                             0, v.arity - 1))
    return idx


@dataclass(frozen=True)
class RbfModel:
    x: np.ndarray        # (N, d) relaxed inputs
    y: np.ndarray        # standardized targets
    sigma: np.ndarray    # (d,) length scales
    noise_var: float
    chol: np.ndarray
    alpha: np.ndarray
    y_mean: float
    y_std: float


def _kernel(xa: np.ndarray, xb: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    diff = xa[:, None, :] - xb[None, :, :]
    return np.exp(-0.5 * np.einsum("abd,d->ab", diff * diff, 1.0 / sigma ** 2))


def fit(x: np.ndarray, y_raw, sigma, noise_var: float) -> RbfModel:
    y_raw = np.asarray(y_raw, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    y_mean = float(y_raw.mean())
    y_std = max(float(y_raw.std()), 1e-8)
    y = (y_raw - y_mean) / y_std
    g = _kernel(x, x, sigma)
    g[np.diag_indices_from(g)] += noise_var + _JITTER
    chol = cholesky(g, lower=True)
    alpha = cho_solve((chol, True), y)
    return RbfModel(x=x, y=y, sigma=sigma, noise_var=noise_var, chol=chol,
                    alpha=alpha, y_mean=y_mean, y_std=y_std)


def predict_batch(model: RbfModel, z: np.ndarray):
    k_star = _kernel(model.x, z, model.sigma)
    mean = k_star.T @ model.alpha
    v = solve_triangular(model.chol, k_star, lower=True)
    var = np.maximum(1.0 - np.sum(v * v, axis=0), 0.0)
    return mean * model.y_std + model.y_mean, var * model.y_std ** 2


class _RbfEvaluator:
    """Cached marginal-likelihood evaluator over (log sigma, log noise)."""

    def __init__(self, x: np.ndarray, y_raw):
        y_raw = np.asarray(y_raw, dtype=float)
        self.y = (y_raw - y_raw.mean()) / max(float(y_raw.std()), 1e-8)
        diff = x[:, None, :] - x[None, :, :]
        self.sqdist = diff * diff  # (N, N, d)
        self.n = x.shape[0]

    def loglik(self, z: np.ndarray) -> float:
        sigma = np.exp(z[:-1])
        noise = math.exp(z[-1])
        g = np.exp(-0.5 * self.sqdist @ (1.0 / sigma ** 2))
        g[np.diag_indices_from(g)] += noise + _JITTER
        try:
            chol = cholesky(g, lower=True)
        except np.linalg.LinAlgError:
            return -np.inf
        alpha = cho_solve((chol, True), self.y)
        return float(-0.5 * np.dot(self.y, alpha)
                     - np.sum(np.log(np.diag(chol)))
                     - 0.5 * self.n * np.log(2.0 * np.pi))


def fit_map(x: np.ndarray, y_raw, rng: np.random.Generator,
            init: np.ndarray | None = None, n_starts: int = 4,
            rounds: int = 20) -> tuple[RbfModel, np.ndarray]:
    """MAP fit with uniform-on-log priors, coordinate golden-section ascent.

    Returns the fitted model and the optimizing log-parameter vector, which
    callers keep as a warm start for the next refit.
    """
    d = x.shape[1]
    ev = _RbfEvaluator(x, y_raw)
    lo = np.array([_SIGMA_LOG_LO] * d + [_NOISE_LOG_LO])
    hi = np.array([_SIGMA_LOG_HI] * d + [_NOISE_LOG_HI])
    starts = []
    if init is not None:
        starts.append(np.clip(init, lo, hi))
    starts.append(np.concatenate([np.zeros(d), [math.log(1e-4)]]))
    while len(starts) < n_starts:
        starts.append(rng.uniform(lo, hi))
    best_z, best_f = None, -np.inf
    for z0 in starts:
        z = np.array(z0, dtype=float)
        f_cur = ev.loglik(z)
        for _ in range(rounds):
            f_prev = f_cur
            for k in range(z.size):
                def f_coord(v, k=k):
                    zc = z.copy()
                    zc[k] = v
                    return ev.loglik(zc)

                v, fv = _golden_section_max(f_coord, lo[k], hi[k], iters=20)
                if fv > f_cur:
                    z[k], f_cur = v, fv
            if f_cur - f_prev < 1e-8:
                break
        if f_cur > best_f:
            best_z, best_f = z.copy(), f_cur
    sigma = np.exp(best_z[:-1])
    noise = math.exp(best_z[-1])
    return fit(x, y_raw, sigma, noise), best_z
