import numpy as np
import pytest

from hybridopt import space


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_space():
    """2 discrete (arity 3, 4) + 2 continuous dims."""
    return space.SpaceSpec(
        discrete_vars=(space.DiscreteVar("a", 3), space.DiscreteVar("b", 4)),
        continuous_vars=(space.ContinuousVar("u", -2.0, 2.0),
                         space.ContinuousVar("v", 0.0, 10.0)),
    )


def random_hypers(rng, m, n, max_order, noise_var=1e-4):
    from hybridopt import kernel
    return kernel.KernelHypers(
        sigma=tuple(rng.uniform(0.2, 2.0, size=n)),
        beta=tuple(rng.uniform(0.1, 2.0, size=m)),
        theta=tuple(rng.uniform(0.2, 1.5, size=max_order)),
        noise_var=noise_var,
    )


def random_point(rng, spec):
    return space.sample_uniform(spec, rng)
