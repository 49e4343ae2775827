"""Expected improvement and its marginalized (posterior-averaged) form.

Internal convention is maximization; benchmark objectives to be minimized
are negated at the runner boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr

from . import gp
from ._fastpath import multi_kernel_stack
from .space import HybridPoint


@dataclass(frozen=True)
class AcquisitionContext:
    """Models (one per posterior hyper sample) plus the incumbent best.

    When every model shares the same training set and interaction-order
    count (the usual case: one model per posterior hyper sample), the
    per-model hyper-parameters are stacked so a batch query costs a single
    fused kernel evaluation instead of one pass per model.
    """

    models: tuple[gp.GPModel, ...]
    incumbent_best: float

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if not self.models:
            raise ValueError("need at least one model")
        first = self.models[0]
        stackable = all(
            m.spec == first.spec
            and m.n_train == first.n_train
            and m.hypers.max_order == first.hypers.max_order
            and np.array_equal(m.xd, first.xd)
            and np.array_equal(m.xc, first.xc)
            for m in self.models[1:])
        stacks = None
        if stackable:
            stacks = {
                "beta": np.array([m.hypers.beta for m in self.models]),
                "sigma": np.array([m.hypers.sigma for m in self.models]),
                "theta2": np.array([m.hypers.theta for m in self.models]) ** 2,
                "prior": np.array([m.prior_var for m in self.models]),
                "y_mean": np.array([m.y_mean for m in self.models]),
                "y_std": np.array([m.y_std for m in self.models]),
                "arities": np.asarray(first.spec.arities, dtype=float),
            }
        object.__setattr__(self, "_stacks", stacks)


def expected_improvement(mean, variance, best):
    """EI for maximization; variance may be a scalar or an array."""
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError("variance must be non-negative")
    s = np.sqrt(variance)
    improve = mean - best
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(s > 0, improve / np.where(s > 0, s, 1.0), 0.0)
    pdf = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
    ei = np.where(s > 0,
                  improve * ndtr(z) + s * pdf,
                  np.maximum(improve, 0.0))
    if ei.ndim == 0:
        return float(ei)
    return ei


def marginalized_af_batch(ctx: AcquisitionContext, xd: np.ndarray,
                          xc: np.ndarray) -> np.ndarray:
    """Mean EI over the posterior models at a batch of encoded points."""
    stacks = ctx._stacks
    if stacks is not None:
        first = ctx.models[0]
        k_stack = multi_kernel_stack(
            first.xd, first.xc,
            np.ascontiguousarray(xd, dtype=np.int64),
            np.ascontiguousarray(xc, dtype=float),
            stacks["arities"], stacks["beta"], stacks["sigma"],
            stacks["theta2"])
        means = np.empty((len(ctx.models), xd.shape[0]))
        varis = np.empty_like(means)
        for i, model in enumerate(ctx.models):
            means[i] = k_stack[i].T @ model.alpha
            v = solve_triangular(model.chol, k_stack[i], lower=True,
                                 check_finite=False)
            varis[i] = stacks["prior"][i] - np.sum(v * v, axis=0)
        means = means * stacks["y_std"][:, None] + stacks["y_mean"][:, None]
        varis = np.maximum(varis, 0.0) * stacks["y_std"][:, None] ** 2
        ei = expected_improvement(means, varis, ctx.incumbent_best)
        return ei.mean(axis=0)
    total = None
    for model in ctx.models:
        mean, var = gp.predict_batch(model, xd, xc)
        ei = expected_improvement(mean, var, ctx.incumbent_best)
        total = ei if total is None else total + ei
    return total / len(ctx.models)


def marginalized_af(ctx: AcquisitionContext, x: HybridPoint) -> float:
    """Monte-Carlo estimate of the hyper-marginalized acquisition at x."""
    xd = x.xd_array.reshape(1, -1)
    xc = x.xc_array.reshape(1, -1)
    return float(marginalized_af_batch(ctx, xd, xc)[0])
