"""Priors over kernel hyper-parameters and posterior inference.

All positive hyper-parameters are handled in log-space. The sampler target
is the log posterior expressed over the log-parameter vector z (likelihood
+ prior + change-of-variables term), so samples follow the intended
densities over the original parameters.

Vector layout, following the dimension-ordering convention:
    z = [log beta_1..m, log sigma_1..n, log theta_1..P, log noise_var]
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky

from . import gp, kernel
from .kernel import KernelHypers
from .space import SpaceSpec


@dataclass(frozen=True)
class HyperPriorSpec:
    """Uniform-on-log priors for sigma and noise, horseshoe for beta/theta."""

    sigma_log_lo: float = math.log(0.01)
    sigma_log_hi: float = math.log(10.0)
    noise_log_lo: float = math.log(1e-8)
    noise_log_hi: float = math.log(1e-1)
    tau_beta: float = 1.0
    tau_theta: float = 1.0


@dataclass(frozen=True)
class HyperSample:
    hypers: KernelHypers
    log_posterior: float


def horseshoe_log_density(x: float, tau: float) -> float:
    """Tight surrogate for the (closed-form-free) horseshoe density.

    log p(x) = log log(1 + 2 (tau/x)^2), up to an additive constant.
    """
    if x <= 0:
        return -np.inf
    log_r = math.log(2.0) + 2.0 * (math.log(tau) - math.log(x))
    if log_r > 30.0:  # log1p(r) ~ log r, avoids overflow of (tau/x)^2
        return math.log(log_r)
    return math.log(math.log1p(math.exp(log_r)))


def log_prior(h: KernelHypers, priors: HyperPriorSpec) -> float:
    """Sum of per-parameter log densities; -inf outside support."""
    total = 0.0
    for s in h.sigma:
        ls = math.log(s)
        if not priors.sigma_log_lo <= ls <= priors.sigma_log_hi:
            return -np.inf
        total -= ls  # uniform on log sigma => density 1/sigma on sigma
    ln = math.log(h.noise_var) if h.noise_var > 0 else -np.inf
    if not priors.noise_log_lo <= ln <= priors.noise_log_hi:
        return -np.inf
    total -= ln
    for b in h.beta:
        total += horseshoe_log_density(b, priors.tau_beta)
    for t in h.theta:
        total += horseshoe_log_density(t, priors.tau_theta)
    return float(total)


# ---------------------------------------------------------------------------
# Packing between KernelHypers and the log-parameter vector.
# ---------------------------------------------------------------------------

def pack(h: KernelHypers) -> np.ndarray:
    return np.log(np.concatenate([h.beta, h.sigma, h.theta, [h.noise_var]]))


def unpack(z: np.ndarray, m: int, n: int) -> KernelHypers:
    x = np.exp(z)
    return KernelHypers(sigma=tuple(x[m:m + n]), beta=tuple(x[:m]),
                        theta=tuple(x[m + n:-1]), noise_var=float(x[-1]))


# ---------------------------------------------------------------------------
# Fast marginal-likelihood evaluator. Coordinate-wise samplers call this
# thousands of times per BO iteration, so the inner loop is compiled
# (see _fastpath); its semantics are pinned against gp.fit in the tests.
# ---------------------------------------------------------------------------

class LikelihoodEvaluator:
    def __init__(self, X, y_raw, spec: SpaceSpec, max_order: int):
        self.spec = spec
        self.max_order = max_order
        y_raw = np.asarray(y_raw, dtype=float)
        self.y_mean = float(y_raw.mean())
        self.y_std = max(float(y_raw.std()), 1e-8)
        self.y = (y_raw - self.y_mean) / self.y_std
        self.n_train = len(X)
        xd, xc = kernel.encode_points(X, spec)
        n = self.n_train
        self.mismatch = np.empty((spec.m, n, n), dtype=np.uint8)
        for i in range(spec.m):
            self.mismatch[i] = xd[:, i, None] != xd[None, :, i]
        self.neg_half_sqdist = np.empty((spec.n, n, n))
        for j in range(spec.n):
            self.neg_half_sqdist[j] = -0.5 * (xc[:, j, None] - xc[None, :, j]) ** 2
        self.arities = spec.arities.astype(np.float64)
        from ._fastpath import CachedEvidence
        self._core = CachedEvidence(self.neg_half_sqdist, self.mismatch,
                                    self.arities, max_order, self.y)

    def loglik(self, h: KernelHypers) -> float:
        """Log marginal likelihood of the standardized targets under h."""
        return self._core.loglik(np.asarray(h.beta), np.asarray(h.sigma),
                                 np.asarray(h.theta) ** 2,
                                 h.noise_var + kernel.JITTER)


def make_log_target(X, y_raw, spec: SpaceSpec, priors: HyperPriorSpec,
                    max_order: int):
    """z-space log posterior: likelihood + prior + log-space Jacobian."""
    ev = LikelihoodEvaluator(X, y_raw, spec, max_order)
    m, n = spec.m, spec.n

    def target(z: np.ndarray) -> float:
        if np.any(np.abs(z) > 300.0):  # exp(z) would under/overflow
            return -np.inf
        h = unpack(z, m, n)
        lp = log_prior(h, priors)
        if not np.isfinite(lp):
            return -np.inf
        return ev.loglik(h) + lp + float(np.sum(z))

    return target


# ---------------------------------------------------------------------------
# Univariate slice sampling with step-out, cycling coordinates.
# ---------------------------------------------------------------------------

def slice_sample_vector(log_target, z0, n_samples: int, burn_in: int,
                        rng: np.random.Generator, width: float = 1.0,
                        max_doublings: int = 100):
    """Coordinate-cycling slice sampler over a real vector.

    Returns (samples, log_target_values) with one sample per post-burn-in
    sweep. The step-out phase doubles the bracket up to `max_doublings`
    times per side.
    """
    z = np.array(z0, dtype=float)
    f_cur = float(log_target(z))
    if not np.isfinite(f_cur):
        raise ValueError("log target must be finite at the initial point")
    samples, values = [], []
    for sweep in range(burn_in + n_samples):
        for d in range(z.size):
            level = f_cur + math.log(rng.uniform())
            u = rng.uniform()
            lo = z[d] - width * u
            hi = lo + width
            step = width
            zl = z.copy()
            for _ in range(max_doublings):
                zl[d] = lo
                if log_target(zl) <= level:
                    break
                lo -= step
                step *= 2.0
            step = width
            zr = z.copy()
            for _ in range(max_doublings):
                zr[d] = hi
                if log_target(zr) <= level:
                    break
                hi += step
                step *= 2.0
            zc = z.copy()
            while True:
                cand = rng.uniform(lo, hi)
                zc[d] = cand
                f_cand = float(log_target(zc))
                if f_cand > level:
                    z[d] = cand
                    f_cur = f_cand
                    break
                if cand < z[d]:
                    lo = cand
                elif cand > z[d]:
                    hi = cand
                else:
                    # shrunk onto the current point; keep it
                    f_cur = float(log_target(z))
                    break
        if sweep >= burn_in:
            samples.append(z.copy())
            values.append(f_cur)
    return samples, values


def slice_sample(log_target, init: KernelHypers, n_samples: int,
                 burn_in: int, rng: np.random.Generator):
    """Slice-sample KernelHypers from an x-space log target.

    `log_target` is a log density over KernelHypers; the change-of-variables
    term for log-space sampling is added internally.
    """
    m, n = len(init.beta), len(init.sigma)

    def target_z(z):
        if np.any(np.abs(z) > 300.0):
            return -np.inf
        return log_target(unpack(z, m, n)) + float(np.sum(z))

    zs, vals = slice_sample_vector(target_z, pack(init), n_samples, burn_in, rng)
    return [HyperSample(unpack(z, m, n), v) for z, v in zip(zs, vals)]


def default_init(spec: SpaceSpec, max_order: int) -> KernelHypers:
    return KernelHypers(sigma=(1.0,) * spec.n, beta=(1.0,) * spec.m,
                        theta=(1.0,) * max_order, noise_var=1e-4)


def posterior_samples(X, y, spec: SpaceSpec, priors: HyperPriorSpec,
                      n_samples: int, burn_in: int, rng: np.random.Generator,
                      max_order: int | None = None,
                      init: KernelHypers | None = None):
    """Draw kernel hypers from p(theta | D) via slice sampling."""
    if len(X) < 1:
        raise ValueError("need at least one training point")
    if max_order is None:
        max_order = spec.dim if init is None else init.max_order
    if init is None:
        init = default_init(spec, max_order)
    target = make_log_target(X, y, spec, priors, max_order)
    zs, vals = slice_sample_vector(target, pack(init), n_samples, burn_in, rng)
    return [HyperSample(unpack(z, spec.m, spec.n), v) for z, v in zip(zs, vals)]


# ---------------------------------------------------------------------------
# MAP mode (no-marginalization ablation).
# ---------------------------------------------------------------------------

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
_HS_LOG_LO, _HS_LOG_HI = math.log(1e-4), math.log(1e3)


def _coordinate_brackets(spec: SpaceSpec, max_order: int,
                         priors: HyperPriorSpec) -> np.ndarray:
    lo, hi = [], []
    for _ in range(spec.m):
        lo.append(_HS_LOG_LO), hi.append(_HS_LOG_HI)
    for _ in range(spec.n):
        lo.append(priors.sigma_log_lo), hi.append(priors.sigma_log_hi)
    for _ in range(max_order):
        lo.append(_HS_LOG_LO), hi.append(_HS_LOG_HI)
    lo.append(priors.noise_log_lo), hi.append(priors.noise_log_hi)
    return np.array([lo, hi])


def _golden_section_max(f, lo: float, hi: float, iters: int = 30):
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def fit_map(X, y, spec: SpaceSpec, priors: HyperPriorSpec,
            rng: np.random.Generator, max_order: int | None = None,
            n_starts: int = 8, rounds: int = 50,
            init: KernelHypers | None = None) -> KernelHypers:
    """Multi-start coordinate-wise golden-section ascent of the log posterior."""
    if len(X) < 1:
        raise ValueError("need at least one training point")
    if max_order is None:
        max_order = spec.dim if init is None else init.max_order
    target = make_log_target(X, y, spec, priors, max_order)
    brackets = _coordinate_brackets(spec, max_order, priors)
    starts = [pack(init if init is not None else default_init(spec, max_order))]
    for _ in range(n_starts - 1):
        starts.append(rng.uniform(brackets[0], brackets[1]))
    best_z, best_f = None, -np.inf
    for z0 in starts:
        z = np.clip(np.array(z0, dtype=float), brackets[0], brackets[1])
        f_cur = target(z)
        for _ in range(rounds):
            f_prev = f_cur
            for d in range(z.size):
                def f_coord(v, d=d):
                    zc = z.copy()
                    zc[d] = v
                    return target(zc)

                v, fv = _golden_section_max(f_coord, brackets[0][d], brackets[1][d])
                if fv > f_cur:
                    z[d], f_cur = v, fv
            if f_cur - f_prev < 1e-9:
                break
        if f_cur > best_f:
            best_z, best_f = z.copy(), f_cur
    return unpack(best_z, spec.m, spec.n)


def fit_models(X, y, spec: SpaceSpec, samples) -> list:
    """One fitted GPModel per hyper sample."""
    return [gp.fit(X, y, s.hypers, spec) for s in samples]
