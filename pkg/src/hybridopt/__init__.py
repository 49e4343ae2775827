"""Bayesian optimization over hybrid discrete/continuous search spaces."""

from .space import ContinuousVar, DiscreteVar, HybridPoint, SpaceSpec
from .kernel import KernelHypers

__all__ = [
    "ContinuousVar",
    "DiscreteVar",
    "HybridPoint",
    "KernelHypers",
    "SpaceSpec",
]

__version__ = "0.1.0"
