"""Acquisition-function optimization over the hybrid space.

Alternates CMA-ES on the continuous subspace with restart hill-climbing on
the discrete subspace. All objectives here are maximized and must accept
batches: continuous objectives take an (B, dim) array, discrete objectives
a list of assignments, hybrid objectives a pair of encoded arrays; each
returns a length-B value array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .space import HybridPoint, SpaceSpec, hamming_neighbors, sample_discrete_uniform


@dataclass(frozen=True)
class AfoConfig:
    cma_population: int = 50
    cma_sigma0: float = 0.1
    cma_budget: int = 2000
    ls_restarts: int = 20
    alternations: int = 1

    def __post_init__(self):
        if min(self.cma_population, self.cma_budget, self.ls_restarts,
               self.alternations) < 1 or self.cma_sigma0 <= 0:
            raise ValueError("all AfoConfig fields must be positive")


def cmaes_maximize(f, dim: int, cfg: AfoConfig, rng: np.random.Generator,
                   x0=None):
    """(mu/mu_w, lambda) CMA-ES on [-1, 1]^dim, maximizing a batched f.

    Rank-one and rank-mu covariance updates with weighted recombination and
    cumulative step-size control; candidates are clipped to the box before
    evaluation. Stops once the evaluation budget is spent and returns the
    best evaluated point.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    lam = cfg.cma_population
    mu = lam // 2
    w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w /= w.sum()
    mu_eff = 1.0 / np.sum(w ** 2)
    c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, np.sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim)
    c_1 = 2.0 / ((dim + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dim + 2.0) ** 2 + mu_eff))
    chi_n = np.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim ** 2))

    mean = np.zeros(dim) if x0 is None else np.clip(np.asarray(x0, dtype=float), -1.0, 1.0)
    sigma = cfg.cma_sigma0
    cov = np.eye(dim)
    p_sigma = np.zeros(dim)
    p_c = np.zeros(dim)
    best_x, best_val = None, -np.inf
    evals = 0
    gen = 0
    while evals < cfg.cma_budget:
        evals_d, evecs = np.linalg.eigh(cov)
        evals_d = np.maximum(evals_d, 1e-20)
        sqrt_d = np.sqrt(evals_d)
        n_cand = min(lam, cfg.cma_budget - evals)
        z = rng.standard_normal((n_cand, dim))
        y = (evecs * sqrt_d) @ z.T  # (dim, n_cand)
        x = np.clip(mean[:, None] + sigma * y, -1.0, 1.0)
        vals = np.asarray(f(x.T))
        evals += n_cand
        top = int(np.argmax(vals))
        if vals[top] > best_val:
            best_val = float(vals[top])
            best_x = x[:, top].copy()
        if n_cand < lam:
            break  # partial final generation: no distribution update
        order = np.argsort(-vals)[:mu]
        y_sel = (x[:, order] - mean[:, None]) / sigma
        y_w = y_sel @ w
        mean = np.clip(mean + sigma * y_w, -1.0, 1.0)
        c_inv_sqrt = (evecs / sqrt_d) @ evecs.T
        p_sigma = (1.0 - c_sigma) * p_sigma + np.sqrt(
            c_sigma * (2.0 - c_sigma) * mu_eff) * (c_inv_sqrt @ y_w)
        gen += 1
        h_sigma = float(np.linalg.norm(p_sigma) /
                        np.sqrt(1.0 - (1.0 - c_sigma) ** (2 * gen))
                        < (1.4 + 2.0 / (dim + 1.0)) * chi_n)
        p_c = (1.0 - c_c) * p_c + h_sigma * np.sqrt(
            c_c * (2.0 - c_c) * mu_eff) * y_w
        rank_mu = (y_sel * w) @ y_sel.T
        cov = ((1.0 - c_1 - c_mu) * cov
               + c_1 * (np.outer(p_c, p_c) + (1.0 - h_sigma) * c_c * (2.0 - c_c) * cov)
               + c_mu * rank_mu)
        sigma *= np.exp(c_sigma / d_sigma * (np.linalg.norm(p_sigma) / chi_n - 1.0))
        sigma = float(np.clip(sigma, 1e-12, 1e3))
    return best_x, best_val


def discrete_local_search(f, spec: SpaceSpec, init, cfg: AfoConfig,
                          rng: np.random.Generator):
    """Steepest-ascent hill climbing with random restarts.

    Climbs over Hamming-1 neighborhoods until no strictly improving neighbor
    exists; the provided init plus cfg.ls_restarts uniform restarts are each
    climbed, and the overall best assignment is returned.
    """
    init = tuple(int(v) for v in init)
    starts = [init] + [sample_discrete_uniform(spec, rng)
                       for _ in range(cfg.ls_restarts)]
    best_x, best_val = None, -np.inf
    for start in starts:
        cur = start
        cur_val = float(np.asarray(f([cur]))[0])
        while True:
            neighbors = hamming_neighbors(spec, cur)
            if not neighbors:
                break
            vals = np.asarray(f(neighbors))
            top = int(np.argmax(vals))
            if vals[top] > cur_val:
                cur, cur_val = neighbors[top], float(vals[top])
            else:
                break
        if cur_val > best_val:
            best_x, best_val = cur, cur_val
    return best_x, best_val


def optimize_acquisition(af, spec: SpaceSpec, cfg: AfoConfig,
                         rng: np.random.Generator,
                         warm_start: HybridPoint) -> HybridPoint:
    """Alternating subspace maximization of a hybrid acquisition function.

    `af` takes encoded batches (xd: (B, m) ints, xc: (B, n) floats) and
    returns (B,) values. Each alternation fixes the discrete part and runs
    CMA-ES over the continuous part, then fixes the continuous part and runs
    discrete local search. The returned point never scores below warm_start.
    """
    best_d = warm_start.xd_array
    best_c = warm_start.xc_array
    best_val = float(af(best_d.reshape(1, -1), best_c.reshape(1, -1))[0])
    for _ in range(cfg.alternations):
        if spec.n > 0:
            fixed_d = best_d.copy()

            def f_cont(xc_batch):
                xd_batch = np.tile(fixed_d, (xc_batch.shape[0], 1))
                return af(xd_batch, xc_batch)

            xc, val = cmaes_maximize(f_cont, spec.n, cfg, rng, x0=best_c)
            if val > best_val:
                best_c, best_val = xc, val
        if spec.m > 0:
            fixed_c = best_c.copy()

            def f_disc(assignments):
                xd_batch = np.asarray(assignments, dtype=np.int64)
                xc_batch = np.tile(fixed_c, (xd_batch.shape[0], 1))
                return af(xd_batch, xc_batch)

            xd, val = discrete_local_search(f_disc, spec, best_d, cfg, rng)
            if val > best_val:
                best_d, best_val = np.asarray(xd, dtype=np.int64), val
    return HybridPoint(tuple(int(v) for v in best_d),
                       tuple(float(v) for v in best_c))
