import itertools

import numpy as np
import pytest

from hybridopt import afo, space


def test_config_validation():
    with pytest.raises(ValueError):
        afo.AfoConfig(cma_population=0)
    with pytest.raises(ValueError):
        afo.AfoConfig(cma_sigma0=-0.1)
    with pytest.raises(ValueError):
        afo.AfoConfig(alternations=0)


def test_config_defaults():
    cfg = afo.AfoConfig()
    assert (cfg.cma_population, cfg.cma_sigma0, cfg.cma_budget,
            cfg.ls_restarts, cfg.alternations) == (50, 0.1, 2000, 20, 1)


def test_cmaes_solves_sphere_2d(rng):
    def neg_sphere(x):
        return -np.sum((x - 0.3) ** 2, axis=1)

    x, val = afo.cmaes_maximize(neg_sphere, 2, afo.AfoConfig(), rng)
    assert -val < 1e-6
    np.testing.assert_allclose(x, [0.3, 0.3], atol=1e-3)


def test_cmaes_respects_budget():
    calls = {"n": 0}

    def f(x):
        calls["n"] += x.shape[0]
        return -np.sum(x ** 2, axis=1)

    cfg = afo.AfoConfig(cma_budget=130, cma_population=50)
    afo.cmaes_maximize(f, 3, cfg, np.random.default_rng(0))
    assert calls["n"] == 130


def test_cmaes_stays_in_box(rng):
    seen = []

    def f(x):
        seen.append(x.copy())
        return np.sum(x, axis=1)  # pushes toward the +1 corner

    afo.cmaes_maximize(f, 4, afo.AfoConfig(cma_budget=500), rng)
    all_x = np.vstack(seen)
    assert np.all(all_x >= -1.0) and np.all(all_x <= 1.0)


def test_cmaes_warm_start_helps_far_optimum(rng):
    def f(x):
        return -np.sum((x - 0.9) ** 2, axis=1)

    x, val = afo.cmaes_maximize(f, 3, afo.AfoConfig(), rng,
                                x0=np.array([0.88, 0.9, 0.92]))
    assert -val < 1e-6


def test_cmaes_deterministic_under_seed():
    def f(x):
        return -np.sum((x - 0.2) ** 2, axis=1)

    a = afo.cmaes_maximize(f, 2, afo.AfoConfig(cma_budget=300),
                           np.random.default_rng(3))
    b = afo.cmaes_maximize(f, 2, afo.AfoConfig(cma_budget=300),
                           np.random.default_rng(3))
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1] == b[1]


def _binary_spec(m):
    return space.SpaceSpec(
        discrete_vars=tuple(space.DiscreteVar(f"b{i}", 2) for i in range(m)))


def test_local_search_matches_exhaustive_on_linear(rng):
    """Linear pseudo-boolean objectives: Hamming-1 ascent finds the optimum."""
    for _ in range(100):
        m = int(rng.integers(2, 11))
        spec = _binary_spec(m)
        w = rng.normal(size=m)

        def f(assignments, w=w):
            a = np.asarray(assignments, dtype=float)
            return a @ w

        init = space.sample_discrete_uniform(spec, rng)
        best_x, best_val = afo.discrete_local_search(
            f, spec, init, afo.AfoConfig(ls_restarts=1), rng)
        exhaustive = max(f(list(itertools.product((0, 1), repeat=m))))
        assert best_val == pytest.approx(float(exhaustive), rel=1e-12)
        assert best_x == tuple(int(v > 0) for v in w)


def test_local_search_returns_at_least_init_value(rng):
    spec = space.SpaceSpec(discrete_vars=(space.DiscreteVar("a", 5),
                                          space.DiscreteVar("b", 7)))
    table = rng.normal(size=(5, 7))

    def f(assignments):
        return np.array([table[a, b] for a, b in assignments])

    init = (2, 3)
    _, best_val = afo.discrete_local_search(f, spec, init,
                                            afo.AfoConfig(ls_restarts=3), rng)
    assert best_val >= table[2, 3]


def test_local_search_restarts_escape_local_optima(rng):
    """With enough restarts the global optimum of a small table is found."""
    spec = space.SpaceSpec(discrete_vars=(space.DiscreteVar("a", 6),
                                          space.DiscreteVar("b", 6)))
    table = rng.normal(size=(6, 6))

    def f(assignments):
        return np.array([table[a, b] for a, b in assignments])

    _, best_val = afo.discrete_local_search(f, spec, (0, 0),
                                            afo.AfoConfig(ls_restarts=20), rng)
    assert best_val == pytest.approx(float(table.max()), rel=1e-12)


def _separable_af(spec):
    g = {(a, b, c): 0.4 * a - 0.9 * b + 0.2 * c
         for a, b, c in itertools.product((0, 1), repeat=3)}

    def af(xd, xc):
        disc = np.array([g[tuple(row)] for row in xd])
        return disc - (xc[:, 0] - 0.37) ** 2

    return af, g


def test_optimize_acquisition_matches_bruteforce_separable(rng):
    spec = space.SpaceSpec(
        discrete_vars=tuple(space.DiscreteVar(f"b{i}", 2) for i in range(3)),
        continuous_vars=(space.ContinuousVar("u", -1.0, 1.0),))
    af, g = _separable_af(spec)
    warm = space.HybridPoint((0, 0, 0), (0.0,))
    best = afo.optimize_acquisition(af, spec, afo.AfoConfig(), rng, warm)
    assert best.x_d == max(g, key=g.get)
    assert best.x_c[0] == pytest.approx(0.37, abs=1e-4)


def test_optimize_acquisition_never_below_warm_start(rng):
    spec = space.SpaceSpec(
        discrete_vars=(space.DiscreteVar("a", 4),),
        continuous_vars=(space.ContinuousVar("u", -1.0, 1.0),))

    for trial in range(5):
        table = rng.normal(size=4)

        def af(xd, xc):
            return table[xd[:, 0]] + np.sin(3 * xc[:, 0])

        warm = space.sample_uniform(spec, rng)
        warm_val = float(af(warm.xd_array.reshape(1, -1),
                            warm.xc_array.reshape(1, -1))[0])
        best = afo.optimize_acquisition(af, spec,
                                        afo.AfoConfig(cma_budget=200), rng,
                                        warm)
        best_val = float(af(best.xd_array.reshape(1, -1),
                            best.xc_array.reshape(1, -1))[0])
        assert best_val >= warm_val


def test_optimize_acquisition_pure_discrete(rng):
    spec = space.SpaceSpec(discrete_vars=(space.DiscreteVar("a", 3),
                                          space.DiscreteVar("b", 3)))
    table = rng.normal(size=(3, 3))

    def af(xd, xc):
        return np.array([table[a, b] for a, b in xd])

    warm = space.HybridPoint((0, 0), ())
    best = afo.optimize_acquisition(af, spec, afo.AfoConfig(), rng, warm)
    assert table[best.x_d] == pytest.approx(float(table.max()))


def test_optimize_acquisition_pure_continuous(rng):
    spec = space.SpaceSpec(
        continuous_vars=(space.ContinuousVar("u", -1.0, 1.0),
                         space.ContinuousVar("v", -1.0, 1.0)))

    def af(xd, xc):
        return -np.sum((xc - 0.25) ** 2, axis=1)

    warm = space.HybridPoint((), (0.0, 0.0))
    best = afo.optimize_acquisition(af, spec, afo.AfoConfig(), rng, warm)
    np.testing.assert_allclose(best.x_c, [0.25, 0.25], atol=1e-3)
