"""Hybrid search spaces: mixed discrete/continuous domains.

Dimension ordering convention used throughout the package: all discrete
variables first, then all continuous variables. Continuous coordinates are
kept in normalized [-1, 1] units internally; raw units appear only at the
benchmark-evaluation and I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DiscreteVar:
    name: str
    arity: int  # number of candidate values, >= 2


@dataclass(frozen=True)
class ContinuousVar:
    name: str
    lower: float
    upper: float


@dataclass(frozen=True)
class SpaceSpec:
    """Declaration of a hybrid space: m discrete vars + n continuous vars."""

    discrete_vars: tuple[DiscreteVar, ...] = ()
    continuous_vars: tuple[ContinuousVar, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "discrete_vars", tuple(self.discrete_vars))
        object.__setattr__(self, "continuous_vars", tuple(self.continuous_vars))

    @property
    def m(self) -> int:
        return len(self.discrete_vars)

    @property
    def n(self) -> int:
        return len(self.continuous_vars)

    @property
    def dim(self) -> int:
        return self.m + self.n

    @property
    def arities(self) -> np.ndarray:
        return np.array([v.arity for v in self.discrete_vars], dtype=np.int64)

    @property
    def lowers(self) -> np.ndarray:
        return np.array([v.lower for v in self.continuous_vars], dtype=float)

    @property
    def uppers(self) -> np.ndarray:
        return np.array([v.upper for v in self.continuous_vars], dtype=float)


@dataclass(frozen=True)
class HybridPoint:
    """One assignment in a SpaceSpec.

    x_d holds category indices, x_c holds normalized [-1, 1] coordinates.
    Stored as tuples so points are hashable value types.
    """

    x_d: tuple[int, ...] = ()
    x_c: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x_d", tuple(int(v) for v in self.x_d))
        object.__setattr__(self, "x_c", tuple(float(v) for v in self.x_c))

    @property
    def xd_array(self) -> np.ndarray:
        return np.array(self.x_d, dtype=np.int64)

    @property
    def xc_array(self) -> np.ndarray:
        return np.array(self.x_c, dtype=float)


def validate(spec: SpaceSpec) -> SpaceSpec:
    """Check SpaceSpec invariants, returning the spec unchanged if valid."""
    if spec.m + spec.n < 1:
        raise ValueError("empty space: need at least one variable")
    for v in spec.discrete_vars:
        if v.arity < 2:
            raise ValueError(f"arity must be >= 2 for variable {v.name!r} (got {v.arity})")
    for v in spec.continuous_vars:
        if not v.lower < v.upper:
            raise ValueError(
                f"inverted bounds for variable {v.name!r}: [{v.lower}, {v.upper}]"
            )
    return spec


def check_point(spec: SpaceSpec, point: HybridPoint) -> HybridPoint:
    """Check that a point belongs to the spec."""
    if len(point.x_d) != spec.m or len(point.x_c) != spec.n:
        raise ValueError(
            f"point shape ({len(point.x_d)}, {len(point.x_c)}) does not match "
            f"space shape ({spec.m}, {spec.n})"
        )
    for i, (v, xi) in enumerate(zip(spec.discrete_vars, point.x_d)):
        if not 0 <= xi < v.arity:
            raise ValueError(f"category index {xi} out of range for {v.name!r}")
    for v, xi in zip(spec.continuous_vars, point.x_c):
        if not -1.0 <= xi <= 1.0:
            raise ValueError(f"normalized coordinate {xi} outside [-1, 1] for {v.name!r}")
    return point


def normalize(spec: SpaceSpec, raw_continuous) -> np.ndarray:
    """Affine map of each continuous coordinate from [lower, upper] to [-1, 1]."""
    raw = np.asarray(raw_continuous, dtype=float)
    if raw.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} continuous values, got {raw.shape[-1]}")
    lo, hi = spec.lowers, spec.uppers
    if np.any(raw < lo) or np.any(raw > hi):
        raise ValueError("continuous value out of bounds")
    return 2.0 * (raw - lo) / (hi - lo) - 1.0


def denormalize(spec: SpaceSpec, normed) -> np.ndarray:
    """Exact inverse of `normalize`."""
    z = np.asarray(normed, dtype=float)
    if z.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} normalized values, got {z.shape[-1]}")
    lo, hi = spec.lowers, spec.uppers
    return lo + (z + 1.0) * (hi - lo) / 2.0


def sample_uniform(spec: SpaceSpec, rng: np.random.Generator) -> HybridPoint:
    """Uniform point: categories uniform per arity, continuous uniform on [-1, 1]."""
    x_d = tuple(int(rng.integers(0, v.arity)) for v in spec.discrete_vars)
    x_c = tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=spec.n))
    return HybridPoint(x_d, x_c)


def sample_discrete_uniform(spec: SpaceSpec, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(rng.integers(0, v.arity)) for v in spec.discrete_vars)


def hamming_neighbors(spec: SpaceSpec, x_d) -> list[tuple[int, ...]]:
    """All assignments at Hamming distance exactly one from x_d.

    Returns sum_i (arity_i - 1) assignments; excludes x_d itself.
    """
    x_d = tuple(int(v) for v in x_d)
    out = []
    for i, v in enumerate(spec.discrete_vars):
        for c in range(v.arity):
            if c != x_d[i]:
                out.append(x_d[:i] + (c,) + x_d[i + 1:])
    return out
