import math

import numpy as np
import pytest
from scipy.stats import norm

from hybridopt import acq, gp, kernel, space

from conftest import random_hypers


def _ei_reference(mean, var, best):
    """Textbook EI (maximization, xi = 0) via scipy's normal."""
    s = math.sqrt(var)
    if s == 0.0:
        return max(mean - best, 0.0)
    z = (mean - best) / s
    return (mean - best) * norm.cdf(z) + s * norm.pdf(z)


@pytest.mark.parametrize("mean,var,best", [
    (1.0, 1.0, 0.0),
    (0.0, 1.0, 0.0),
    (-2.0, 0.25, 1.0),
    (3.0, 4.0, 2.5),
    (0.0, 1e-12, 0.0),
])
def test_expected_improvement_matches_reference(mean, var, best):
    assert acq.expected_improvement(mean, var, best) == pytest.approx(
        _ei_reference(mean, var, best), rel=1e-10, abs=1e-300)


def test_expected_improvement_zero_variance_branch():
    assert acq.expected_improvement(2.0, 0.0, 1.0) == 1.0
    assert acq.expected_improvement(0.5, 0.0, 1.0) == 0.0


def test_expected_improvement_nonnegative(rng):
    means = rng.normal(size=200)
    varis = rng.uniform(0, 4, size=200)
    ei = acq.expected_improvement(means, varis, 0.3)
    assert np.all(ei >= 0.0)


def test_expected_improvement_monotone_in_mean():
    ei = acq.expected_improvement(np.linspace(-3, 3, 50), np.ones(50), 0.0)
    assert np.all(np.diff(ei) > 0)


def test_expected_improvement_rejects_negative_variance():
    with pytest.raises(ValueError):
        acq.expected_improvement(0.0, -1e-3, 0.0)


def test_context_requires_models():
    with pytest.raises(ValueError):
        acq.AcquisitionContext(models=(), incumbent_best=0.0)


def _make_models(spec, rng, count, n_train=8):
    pts = [space.sample_uniform(spec, rng) for _ in range(n_train)]
    y = rng.normal(size=n_train)
    return tuple(gp.fit(pts, y, random_hypers(rng, spec.m, spec.n, spec.dim),
                        spec) for _ in range(count)), float(y.max())


def test_marginalized_af_is_mean_over_models(small_space, rng):
    models, best = _make_models(small_space, rng, 5)
    ctx = acq.AcquisitionContext(models=models, incumbent_best=best)
    x = space.sample_uniform(small_space, rng)
    per_model = [acq.expected_improvement(*gp.predict(m, x), best)
                 for m in models]
    assert acq.marginalized_af(ctx, x) == pytest.approx(
        float(np.mean(per_model)), rel=1e-9, abs=1e-12)


def test_marginalized_af_batch_fused_path_matches_loop(small_space, rng):
    """The stacked fast path agrees with per-model prediction."""
    models, best = _make_models(small_space, rng, 6)
    ctx = acq.AcquisitionContext(models=models, incumbent_best=best)
    assert ctx._stacks is not None
    pts = [space.sample_uniform(small_space, rng) for _ in range(40)]
    xd, xc = kernel.encode_points(pts, small_space)
    fused = acq.marginalized_af_batch(ctx, xd, xc)
    looped = np.mean([acq.expected_improvement(
        *gp.predict_batch(m, xd, xc), best) for m in models], axis=0)
    np.testing.assert_allclose(fused, looped, rtol=1e-9, atol=1e-12)


def test_marginalized_af_batch_unstackable_models(small_space, rng):
    """Models with different training sets fall back to the per-model loop."""
    models_a, best = _make_models(small_space, rng, 1, n_train=6)
    models_b, _ = _make_models(small_space, rng, 1, n_train=9)
    ctx = acq.AcquisitionContext(models=models_a + models_b,
                                 incumbent_best=best)
    assert ctx._stacks is None
    pts = [space.sample_uniform(small_space, rng) for _ in range(10)]
    xd, xc = kernel.encode_points(pts, small_space)
    vals = acq.marginalized_af_batch(ctx, xd, xc)
    assert vals.shape == (10,) and np.all(vals >= 0.0)


def test_single_model_context(small_space, rng):
    models, best = _make_models(small_space, rng, 1)
    ctx = acq.AcquisitionContext(models=models, incumbent_best=best)
    x = space.sample_uniform(small_space, rng)
    mean, var = gp.predict(models[0], x)
    assert acq.marginalized_af(ctx, x) == pytest.approx(
        acq.expected_improvement(mean, var, best), rel=1e-9, abs=1e-12)
