"""Closed-form hybrid benchmark functions.

All benchmarks are registered as minimization problems. Discrete variables
are exposed to the optimizer as category indices; each benchmark maps the
index to its raw level (e.g., pressure-vessel thickness index 0 -> 1).
`BenchmarkFn.evaluate` accepts a HybridPoint (normalized continuous
coordinates) and handles the denormalization internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .space import ContinuousVar, DiscreteVar, HybridPoint, SpaceSpec, denormalize


@dataclass(frozen=True)
class BenchmarkFn:
    """A benchmark objective: spec, raw-unit evaluator, and discrete levels."""

    name: str
    spec: SpaceSpec
    levels: tuple[tuple[float, ...], ...]  # raw value per category, per discrete var
    raw_fn: callable  # (d_raw: array, c_raw: array) -> float
    direction: str = "min"

    def discrete_raw(self, x_d) -> np.ndarray:
        return np.array([self.levels[i][int(c)] for i, c in enumerate(x_d)])

    def evaluate_raw(self, d_raw, c_raw) -> float:
        """Evaluate at raw-unit values, with bounds guards."""
        d_raw = np.asarray(d_raw, dtype=float)
        c_raw = np.asarray(c_raw, dtype=float)
        if d_raw.shape != (self.spec.m,) or c_raw.shape != (self.spec.n,):
            raise ValueError(f"{self.name}: expected {self.spec.m} discrete and "
                             f"{self.spec.n} continuous values")
        for i, v in enumerate(d_raw):
            if v not in self.levels[i]:
                raise ValueError(f"{self.name}: discrete value {v} not a valid "
                                 f"level of {self.spec.discrete_vars[i].name!r}")
        lo, hi = self.spec.lowers, self.spec.uppers
        if np.any(c_raw < lo) or np.any(c_raw > hi):
            raise ValueError(f"{self.name}: continuous value out of bounds")
        return float(self.raw_fn(d_raw, c_raw))

    def evaluate(self, point: HybridPoint) -> float:
        d_raw = self.discrete_raw(point.x_d)
        c_raw = denormalize(self.spec, point.xc_array) if self.spec.n else np.zeros(0)
        return self.evaluate_raw(d_raw, c_raw)


def _levels_range(start: int, stop: int) -> tuple[float, ...]:
    return tuple(float(v) for v in range(start, stop + 1))


# ---------------------------------------------------------------------------
# Pressure vessel design (cost of a cylindrical vessel).
# ---------------------------------------------------------------------------

def _pressure_vessel_raw(d, c):
    x1, x2 = d
    x3, x4 = c
    return (0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3 ** 2
            + 3.1661 * x1 ** 2 * x4 + 19.84 * x1 ** 2 * x3)


def pressure_vessel() -> BenchmarkFn:
    spec = SpaceSpec(
        discrete_vars=(DiscreteVar("shell_thickness", 100),
                       DiscreteVar("head_thickness", 100)),
        continuous_vars=(ContinuousVar("inner_radius", 10.0, 200.0),
                         ContinuousVar("cylinder_length", 10.0, 240.0)),
    )
    return BenchmarkFn("pressure_vessel", spec,
                       (_levels_range(1, 100), _levels_range(1, 100)),
                       _pressure_vessel_raw)


# ---------------------------------------------------------------------------
# Welded beam design (fabrication cost). The (G1, G2, L) constants depend on
# the material/configuration variable x2 and ship in a data file.
# ---------------------------------------------------------------------------

def load_welded_beam_constants() -> dict[int, tuple[float, float, float]]:
    text = (resources.files("hybridopt.data")
            .joinpath("welded_beam_constants.txt").read_text())
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        idx, g1, g2, length = line.split()
        table[int(idx)] = (float(g1), float(g2), float(length))
    return table


def _welded_beam_raw_factory(constants):
    def raw(d, c):
        x1, x2 = d
        x3, x4, x5, x6 = c
        if int(x2) not in constants:
            raise ValueError(f"welded_beam: no constants entry for x2={int(x2)}")
        g1, g2, length = constants[int(x2)]
        return ((1.0 + g1) * (x1 * x5 + x4) * x3 ** 2
                + g2 * x5 * x6 * (length + x4))
    return raw


def welded_beam(constants=None) -> BenchmarkFn:
    """Welded-beam benchmark; pass a constants dict to override the data file
    (used by the unit-constant formula fixture in tests)."""
    if constants is None:
        constants = load_welded_beam_constants()
    spec = SpaceSpec(
        discrete_vars=(DiscreteVar("weld_config", 2),
                       DiscreteVar("material", 4)),
        continuous_vars=(ContinuousVar("weld_thickness", 0.0625, 2.0),
                         ContinuousVar("joint_length", 0.0, 20.0),
                         ContinuousVar("beam_width", 2.0, 20.0),
                         ContinuousVar("beam_thickness", 0.0625, 2.0)),
    )
    return BenchmarkFn("welded_beam", spec,
                       ((0.0, 1.0), (0.0, 1.0, 2.0, 3.0)),
                       _welded_beam_raw_factory(constants))


# ---------------------------------------------------------------------------
# Speed reducer design (weight).
# ---------------------------------------------------------------------------

def _speed_reducer_raw(d, c):
    x1 = d[0]
    x2, x3, x4, x5, x6, x7 = c
    return (0.79 * x2 * x3 ** 2 * (3.33 * x1 ** 3 + 14.93 * x1 - 43.09)
            - 1.51 * x2 * (x6 ** 2 + x7 ** 2)
            + 7.48 * (x6 ** 3 + x7 ** 3)
            + 0.79 * (x4 * x6 ** 2 + x5 * x7 ** 2))


def speed_reducer() -> BenchmarkFn:
    spec = SpaceSpec(
        discrete_vars=(DiscreteVar("pinion_teeth", 12),),
        continuous_vars=(ContinuousVar("face_width", 2.6, 3.6),
                         ContinuousVar("teeth_module", 0.7, 0.8),
                         ContinuousVar("shaft1_length", 7.3, 8.3),
                         ContinuousVar("shaft2_length", 0.7, 0.8),
                         ContinuousVar("shaft1_diameter", 2.9, 3.9),
                         ContinuousVar("shaft2_diameter", 5.0, 5.5)),
    )
    return BenchmarkFn("speed_reducer", spec, (_levels_range(17, 28),),
                       _speed_reducer_raw)


# ---------------------------------------------------------------------------
# Mixed-integer sphere: shifted sphere over integer levels 0..15 plus a
# continuous box, in the 8d+2c and 16d+4c shapes.
# ---------------------------------------------------------------------------

_MIXINT_SHIFT_SEED = 20210721


def _mixint_shift(m: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(_MIXINT_SHIFT_SEED + 1000 * m + n)
    d_shift = np.clip(np.round(rng.uniform(0, 15, size=m)), 0, 15)
    c_shift = rng.uniform(-4.0, 4.0, size=n)
    return np.concatenate([d_shift, c_shift])


def mixint_sphere(m: int = 8, n: int = 2, shift=None) -> BenchmarkFn:
    """Seeded-shift sphere over m integer variables (levels 0..15) and n
    continuous variables in [-5, 5]."""
    if shift is None:
        shift = _mixint_shift(m, n)
    shift = np.asarray(shift, dtype=float)

    def raw(d, c, shift=shift):
        z = np.concatenate([d, c])
        return float(np.sum((z - shift) ** 2))

    spec = SpaceSpec(
        discrete_vars=tuple(DiscreteVar(f"i{k}", 16) for k in range(m)),
        continuous_vars=tuple(ContinuousVar(f"c{k}", -5.0, 5.0) for k in range(n)),
    )
    return BenchmarkFn(f"mixint_sphere_{m + n}d", spec,
                       tuple(_levels_range(0, 15) for _ in range(m)), raw)


_REGISTRY = {
    "pressure_vessel": pressure_vessel,
    "welded_beam": welded_beam,
    "speed_reducer": speed_reducer,
    "mixint_sphere_10d": lambda: mixint_sphere(8, 2),
    "mixint_sphere_20d": lambda: mixint_sphere(16, 4),
}


def names() -> list[str]:
    return sorted(_REGISTRY)


def lookup(name: str) -> BenchmarkFn:
    if name not in _REGISTRY:
        raise KeyError(f"unknown benchmark {name!r}; available: {', '.join(names())}")
    return _REGISTRY[name]()
