import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridopt import space


def test_spec_shape_properties(small_space):
    assert small_space.m == 2
    assert small_space.n == 2
    assert small_space.dim == 4
    assert list(small_space.arities) == [3, 4]
    assert list(small_space.lowers) == [-2.0, 0.0]
    assert list(small_space.uppers) == [2.0, 10.0]


def test_validate_accepts_good_spec(small_space):
    assert space.validate(small_space) is small_space


def test_validate_rejects_empty_space():
    with pytest.raises(ValueError, match="empty space"):
        space.validate(space.SpaceSpec())


def test_validate_rejects_bad_arity():
    spec = space.SpaceSpec(discrete_vars=(space.DiscreteVar("a", 1),))
    with pytest.raises(ValueError, match="arity"):
        space.validate(spec)


def test_validate_rejects_inverted_bounds():
    spec = space.SpaceSpec(
        continuous_vars=(space.ContinuousVar("u", 1.0, -1.0),))
    with pytest.raises(ValueError, match="bounds"):
        space.validate(spec)


def test_check_point_accepts_member(small_space):
    p = space.HybridPoint((0, 3), (0.5, -1.0))
    assert space.check_point(small_space, p) is p


@pytest.mark.parametrize("point", [
    space.HybridPoint((0,), (0.0, 0.0)),           # wrong discrete length
    space.HybridPoint((0, 4), (0.0, 0.0)),         # category out of range
    space.HybridPoint((0, 0), (0.0, 1.5)),         # outside [-1, 1]
])
def test_check_point_rejects(small_space, point):
    with pytest.raises(ValueError):
        space.check_point(small_space, point)


def test_normalize_maps_bounds_to_unit_interval(small_space):
    np.testing.assert_allclose(space.normalize(small_space, [-2.0, 0.0]), [-1.0, -1.0])
    np.testing.assert_allclose(space.normalize(small_space, [2.0, 10.0]), [1.0, 1.0])
    np.testing.assert_allclose(space.normalize(small_space, [0.0, 5.0]), [0.0, 0.0])


def test_normalize_rejects_out_of_bounds(small_space):
    with pytest.raises(ValueError):
        space.normalize(small_space, [-2.5, 0.0])


@given(u=st.floats(-2.0, 2.0), v=st.floats(0.0, 10.0))
@settings(max_examples=50)
def test_normalize_denormalize_roundtrip(u, v):
    spec = space.SpaceSpec(
        continuous_vars=(space.ContinuousVar("u", -2.0, 2.0),
                         space.ContinuousVar("v", 0.0, 10.0)))
    raw = np.array([u, v])
    z = space.normalize(spec, raw)
    assert np.all(z >= -1.0) and np.all(z <= 1.0)
    np.testing.assert_allclose(space.denormalize(spec, z), raw, atol=1e-12)


def test_sample_uniform_in_space(small_space, rng):
    for _ in range(100):
        space.check_point(small_space, space.sample_uniform(small_space, rng))


def test_hamming_neighbors_binary_pair():
    spec = space.SpaceSpec(discrete_vars=(space.DiscreteVar("a", 2),
                                          space.DiscreteVar("b", 2)))
    assert set(space.hamming_neighbors(spec, (0, 0))) == {(1, 0), (0, 1)}


def test_hamming_neighbors_count_and_distance(small_space, rng):
    for _ in range(20):
        x = space.sample_discrete_uniform(small_space, rng)
        nbrs = space.hamming_neighbors(small_space, x)
        # sum of (arity - 1): (3-1) + (4-1)
        assert len(nbrs) == 5
        assert len(set(nbrs)) == len(nbrs)
        assert x not in nbrs
        for nb in nbrs:
            assert sum(a != b for a, b in zip(nb, x)) == 1


def test_hybrid_point_is_hashable_value_type():
    a = space.HybridPoint((1, 2), (0.5,))
    b = space.HybridPoint((1, 2), (0.5,))
    assert a == b
    assert hash(a) == hash(b)
