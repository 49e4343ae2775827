"""Additive hybrid diffusion kernel.

Each input dimension gets a base kernel (unit-amplitude RBF for continuous
dimensions, a diagonal-normalized graph-diffusion kernel for discrete ones).
The hybrid kernel sums all interaction orders p = 1..max_order, where the
p-th order term is theta_p^2 times the elementary symmetric polynomial of
order p in the base-kernel values. Elementary symmetric polynomials are
computed from power sums via the Newton-Girard recursion, which keeps the
cost at O((m + n) * max_order) per pair instead of exponential.

Hyper-parameter vectors follow the dimension ordering convention: the
discrete block (beta) comes first, then the continuous block (sigma).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .space import HybridPoint, SpaceSpec

JITTER = 1e-6


@dataclass(frozen=True)
class KernelHypers:
    """All kernel hyper-parameters.

    sigma: per-continuous-dim RBF length scales (n,)
    beta:  per-discrete-dim diffusion rates (m,)
    theta: per-order strengths (max_order,), stored unsquared
    noise_var: observation noise variance
    """

    sigma: tuple[float, ...]
    beta: tuple[float, ...]
    theta: tuple[float, ...]
    noise_var: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(float(v) for v in self.sigma))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))
        if any(v <= 0 for v in self.sigma):
            raise ValueError("sigma entries must be positive")
        if any(v <= 0 for v in self.beta):
            raise ValueError("beta entries must be positive")
        if any(v <= 0 for v in self.theta):
            raise ValueError("theta entries must be positive")
        if self.noise_var < 0:
            raise ValueError("noise_var must be non-negative")

    @property
    def max_order(self) -> int:
        return len(self.theta)

    @classmethod
    def default(cls, spec: SpaceSpec, max_order: int | None = None,
                noise_var: float = 1e-6) -> "KernelHypers":
        p = spec.dim if max_order is None else min(max_order, spec.dim)
        return cls(sigma=(1.0,) * spec.n, beta=(1.0,) * spec.m,
                   theta=(1.0,) * p, noise_var=noise_var)


def rbf_base(a: float, b: float, sigma_i: float) -> float:
    """Unit-amplitude RBF base kernel exp(-(a-b)^2 / (2 sigma^2))."""
    if sigma_i <= 0:
        raise ValueError("sigma must be positive")
    d = a - b
    return float(np.exp(-d * d / (2.0 * sigma_i * sigma_i)))


def diffusion_factor(beta_i: float, arity: int) -> float:
    """Off-diagonal value of the normalized single-variable diffusion kernel."""
    e = np.exp(-arity * beta_i)
    return float((1.0 - e) / (1.0 + (arity - 1) * e))


def discrete_diffusion_base(a: int, b: int, beta_i: float, arity: int) -> float:
    """Normalized diffusion kernel on one categorical variable.

    Equals 1 when the categories match, otherwise the closed-form factor
    (1 - e^(-C beta)) / (1 + (C-1) e^(-C beta)) with C the arity.
    """
    if beta_i <= 0:
        raise ValueError("beta must be positive")
    if arity < 2:
        raise ValueError("arity must be >= 2")
    if not (0 <= a < arity and 0 <= b < arity):
        raise ValueError(f"category index out of range for arity {arity}")
    if a == b:
        return 1.0
    return diffusion_factor(beta_i, arity)


def base_values(x: HybridPoint, y: HybridPoint, h: KernelHypers,
                spec: SpaceSpec) -> np.ndarray:
    """Per-dimension base-kernel values, discrete block first."""
    if len(x.x_d) != spec.m or len(y.x_d) != spec.m:
        raise ValueError("discrete dimension mismatch")
    if len(x.x_c) != spec.n or len(y.x_c) != spec.n:
        raise ValueError("continuous dimension mismatch")
    if len(h.beta) != spec.m or len(h.sigma) != spec.n:
        raise ValueError("hyper-parameter dimension mismatch")
    k = np.empty(spec.dim)
    for i, v in enumerate(spec.discrete_vars):
        k[i] = discrete_diffusion_base(x.x_d[i], y.x_d[i], h.beta[i], v.arity)
    for j in range(spec.n):
        k[spec.m + j] = rbf_base(x.x_c[j], y.x_c[j], h.sigma[j])
    return k


def power_sums(base: np.ndarray, max_order: int) -> np.ndarray:
    """S_j = sum_i base_i^j for j = 1..max_order."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    base = np.asarray(base, dtype=float)
    return np.array([np.sum(base ** j) for j in range(1, max_order + 1)])


def elementary_symmetric(s: np.ndarray) -> np.ndarray:
    """E_1..E_P from power sums S_1..S_P via the Newton-Girard recursion.

    E_p = (1/p) * sum_{j=1}^{p} (-1)^(j-1) E_{p-j} S_j, with E_0 = 1.
    """
    p_max = len(s)
    e = np.empty(p_max + 1)
    e[0] = 1.0
    for p in range(1, p_max + 1):
        signs = (-1.0) ** np.arange(p)
        e[p] = np.dot(signs * s[:p], e[p - 1::-1]) / p
    return e[1:]


def additive_kernel(x: HybridPoint, y: HybridPoint, h: KernelHypers,
                    spec: SpaceSpec) -> float:
    """Sum over interaction orders: K = sum_p theta_p^2 E_p(base values)."""
    if h.max_order > spec.dim:
        raise ValueError("max_order exceeds number of dimensions")
    k = base_values(x, y, h, spec)
    s = power_sums(k, h.max_order)
    e = elementary_symmetric(s)
    theta = np.asarray(h.theta)
    return float(np.dot(theta * theta, e))


def additive_bruteforce(x: HybridPoint, y: HybridPoint, h: KernelHypers,
                        spec: SpaceSpec) -> float:
    """Explicit subset-enumeration oracle for the additive kernel.

    Enumerates every subset of dimensions of size p <= max_order and sums
    theta_p^2 times the product of the selected base values. Exponential
    cost; test use only.
    """
    d = spec.dim
    if d > 16:
        raise ValueError("too many dimensions for brute-force enumeration")
    k = base_values(x, y, h, spec)
    total = 0.0
    for p in range(1, h.max_order + 1):
        tp2 = h.theta[p - 1] ** 2
        for subset in itertools.combinations(range(d), p):
            total += tp2 * float(np.prod(k[list(subset)]))
    return total


def discrete_kernel_spectral_oracle(spec: SpaceSpec, beta) -> np.ndarray:
    """Full diffusion-kernel matrix over all discrete assignments.

    Builds the combinatorial graph (vertices = assignments, edges = Hamming
    distance one), forms the beta-weighted graph Laplacian, computes its
    matrix exponential exp(-L) by eigendecomposition, and normalizes so the
    diagonal equals 1. Test oracle only; the space must have <= 64 vertices.
    """
    if spec.m < 1 or spec.n != 0:
        raise ValueError("oracle is defined for purely discrete specs")
    arities = spec.arities
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (spec.m,))
    n_vertices = int(np.prod(arities))
    if n_vertices > 64:
        raise ValueError("discrete space too large for spectral oracle")
    assignments = list(itertools.product(*[range(a) for a in arities]))
    lap = np.zeros((n_vertices, n_vertices))
    for i, a in enumerate(assignments):
        for j, b in enumerate(assignments):
            if i == j:
                continue
            diff = [d for d in range(spec.m) if a[d] != b[d]]
            if len(diff) == 1:
                lap[i, j] = -beta[diff[0]]
    np.fill_diagonal(lap, -lap.sum(axis=1))
    evals, evecs = np.linalg.eigh(lap)
    kmat = evecs @ np.diag(np.exp(-evals)) @ evecs.T
    diag = np.sqrt(np.diag(kmat))
    return kmat / np.outer(diag, diag)


# ---------------------------------------------------------------------------
# Vectorized cross-kernel machinery (shared by Gram construction, the GP
# predictive path, and the likelihood evaluator in `hyper`).
# ---------------------------------------------------------------------------

def encode_points(points, spec: SpaceSpec) -> tuple[np.ndarray, np.ndarray]:
    """Stack a list of HybridPoints into (N, m) int and (N, n) float arrays."""
    n = len(points)
    xd = np.zeros((n, spec.m), dtype=np.int64)
    xc = np.zeros((n, spec.n), dtype=float)
    for i, p in enumerate(points):
        if spec.m:
            xd[i] = p.x_d
        if spec.n:
            xc[i] = p.x_c
    return xd, xc


def base_matrices(xd_a, xc_a, xd_b, xc_b, h: KernelHypers,
                  spec: SpaceSpec) -> np.ndarray:
    """Per-dimension base-kernel matrices, shape (m + n, A, B)."""
    a, b = xd_a.shape[0], xd_b.shape[0]
    mats = np.empty((spec.dim, a, b))
    for i, v in enumerate(spec.discrete_vars):
        mismatch = xd_a[:, i, None] != xd_b[None, :, i]
        mats[i] = np.where(mismatch, diffusion_factor(h.beta[i], v.arity), 1.0)
    for j in range(spec.n):
        diff = xc_a[:, j, None] - xc_b[None, :, j]
        mats[spec.m + j] = np.exp(diff * diff * (-0.5 / h.sigma[j] ** 2))
    return mats


def elementary_symmetric_stack(s_stack: np.ndarray) -> np.ndarray:
    """Entrywise Newton-Girard over stacked power-sum matrices.

    s_stack has shape (P, A, B) holding S_1..S_P; returns E_1..E_P with the
    same shape.
    """
    p_max = s_stack.shape[0]
    e = np.empty((p_max + 1,) + s_stack.shape[1:])
    e[0] = 1.0
    for p in range(1, p_max + 1):
        signs = ((-1.0) ** np.arange(p))[:, None, None]
        e[p] = np.einsum("jab,jab->ab", signs * s_stack[:p], e[p - 1::-1]) / p
    return e[1:]


def cross_kernel(xd_a, xc_a, xd_b, xc_b, h: KernelHypers,
                 spec: SpaceSpec) -> np.ndarray:
    """Additive-kernel matrix between two encoded point sets, shape (A, B)."""
    mats = base_matrices(xd_a, xc_a, xd_b, xc_b, h, spec)
    p_max = h.max_order
    s_stack = np.empty((p_max,) + mats.shape[1:])
    cur = mats.copy()
    for j in range(p_max):
        s_stack[j] = cur.sum(axis=0)
        if j + 1 < p_max:
            cur *= mats
    e_stack = elementary_symmetric_stack(s_stack)
    theta2 = np.asarray(h.theta) ** 2
    return np.tensordot(theta2, e_stack, axes=1)


def kernel_matrix(points, h: KernelHypers, spec: SpaceSpec) -> np.ndarray:
    """Noise-free kernel matrix over a point list (no jitter)."""
    if not points:
        raise ValueError("point list must be non-empty")
    xd, xc = encode_points(points, spec)
    return cross_kernel(xd, xc, xd, xc, h, spec)


def gram(points, h: KernelHypers, spec: SpaceSpec,
         jitter: float = JITTER) -> np.ndarray:
    """Kernel matrix with noise_var + jitter added to the diagonal."""
    g = kernel_matrix(points, h, spec)
    g[np.diag_indices_from(g)] += h.noise_var + jitter
    return g


def self_kernel_value(h: KernelHypers, spec: SpaceSpec) -> float:
    """k(x, x), identical for every point: sum_p theta_p^2 C(dim, p)."""
    s = power_sums(np.ones(spec.dim), h.max_order)
    e = elementary_symmetric(s)
    theta = np.asarray(h.theta)
    return float(np.dot(theta * theta, e))
