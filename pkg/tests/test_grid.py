import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import leaf_arrays
from mohardy.grid import (INF_TIME, AdaptedProcess, DyadicGrid, DyadicMartingale, GridError, SampledFunction,
                          StoppingTimeMap, all_levels, cond_expect, dyadic_add, is_measurable, martingale_of,
                          predictable_envelope, resolution_of, stopped, translate, translate_set,
                          validate_stopping_time)


def test_resolution_of_rejects_non_powers():
    assert resolution_of(8) == 3
    with pytest.raises(GridError):
        resolution_of(6)


def test_grid_cap_from_environment(monkeypatch):
    monkeypatch.setenv("MOHARDY_MAX_RESOLUTION", "4")
    with pytest.raises(GridError):
        DyadicGrid(5)
    assert DyadicGrid(4).size == 16


def test_sampled_function_validates_values():
    with pytest.raises(GridError, match="leaf 2"):
        SampledFunction.from_values([1.0, 2.0, np.nan, 0.0])
    with pytest.raises(GridError):
        SampledFunction(DyadicGrid(2), np.zeros(8))


def test_cond_expect_block_averages():
    f = np.array([1.0, 3, 5, 7])
    np.testing.assert_array_equal(cond_expect(f, 1), [2, 2, 6, 6])
    np.testing.assert_array_equal(cond_expect(f, 0), [4, 4, 4, 4])
    np.testing.assert_array_equal(cond_expect(f, 2), f)
    with pytest.raises(GridError):
        cond_expect(f, 3)


@given(leaf_arrays())
def test_cond_expect_tower_and_measurability(f):
    N = resolution_of(f.size)
    for n in range(N + 1):
        e = cond_expect(f, n)
        assert is_measurable(e, n, atol=1e-9)
        for m in range(n + 1):
            np.testing.assert_allclose(cond_expect(e, m), cond_expect(f, m), atol=1e-9)


def test_martingale_of_examples():
    m = martingale_of([1.0, -1, 1, -1])
    np.testing.assert_array_equal(m.levels, [[0, 0, 0, 0], [0, 0, 0, 0], [1, -1, 1, -1]])
    assert np.all(martingale_of(np.full(8, 3.0)).levels == 0)
    u = martingale_of([1.0, 3, 5, 7], center=False)
    np.testing.assert_array_equal(u.level(0), [4, 4, 4, 4])
    np.testing.assert_array_equal(u.level(1), [2, 2, 6, 6])


@given(leaf_arrays())
def test_martingale_levels_are_consistent(f):
    m = martingale_of(f)
    m.check(atol=1e-9)
    assert np.all(m.level(0) == 0)
    np.testing.assert_allclose(m.differences.sum(axis=-2), m.final, atol=1e-9)


def test_batched_levels_match_single():
    rng = np.random.default_rng(0)
    f = rng.standard_normal((3, 16))
    lv = all_levels(f)
    for i in range(3):
        np.testing.assert_allclose(lv[i], all_levels(f[i]))


def test_stopped_examples():
    m = martingale_of(np.arange(8.0))
    one = stopped(m, StoppingTimeMap.constant(1, 3))
    for n in range(4):
        np.testing.assert_array_equal(one.level(n), m.level(min(n, 1)))
    np.testing.assert_array_equal(stopped(m, StoppingTimeMap.constant(np.inf, 3)).levels, m.levels)
    assert np.all(stopped(m, StoppingTimeMap.constant(0, 3)).levels == 0)


def test_predictable_envelope_example():
    x = np.array([[0, 0, 0, 0], [2, 2, 0, 0], [1, 3, 1, 1]], dtype=float)
    lam = predictable_envelope(AdaptedProcess(x)).entries
    np.testing.assert_array_equal(lam[0], [2, 2, 2, 2])
    np.testing.assert_array_equal(lam[1], [3, 3, 2, 2])
    np.testing.assert_array_equal(lam[2], [3, 3, 2, 2])


def test_predictable_envelope_constant_and_zero():
    assert np.all(predictable_envelope(np.full((3, 4), 2.5)).entries == 2.5)
    assert np.all(predictable_envelope(np.zeros((3, 4))).entries == 0)


@given(leaf_arrays(max_res=4, elements=st.floats(0, 10)))
def test_predictable_envelope_dominates_one_step_ahead(f):
    x = np.abs(all_levels(f))
    lam = predictable_envelope(x)
    lam.check()
    e = lam.entries
    assert np.all(np.diff(e, axis=0) >= 0)
    assert np.all(e[:-1] >= x[1:])


def test_dyadic_add_examples():
    assert dyadic_add(1, 2) == 3
    assert dyadic_add(5, 5) == 0
    with pytest.raises(GridError):
        dyadic_add(4, 1, DyadicGrid(2))


@given(st.integers(0, 1023), st.integers(0, 1023))
def test_dyadic_add_group_law(i, j):
    assert dyadic_add(dyadic_add(i, j), j) == i


def test_translate_set_examples():
    assert translate_set({0, 1}, 2) == {2, 3}
    assert translate_set({1, 3}, 0) == {1, 3}


@given(st.sets(st.integers(0, 31)), st.integers(0, 31))
def test_translation_preserves_measure(A, t):
    assert len(translate_set(A, t)) == len(A)


def test_translate_is_dyadic_shift():
    f = np.arange(8.0)
    np.testing.assert_array_equal(translate(f, 4), [4, 5, 6, 7, 0, 1, 2, 3])


def test_validate_stopping_time():
    assert np.all(validate_stopping_time(np.full(8, 3)).tau == 3)
    with pytest.raises(GridError, match="level-1 atom 0"):
        validate_stopping_time([1, np.inf, 2, 2])
    nu = validate_stopping_time([np.inf, np.inf, 1, 1])
    assert nu.tau[0] == INF_TIME
    np.testing.assert_array_equal(nu.finite, [False, False, True, True])
    with pytest.raises(GridError):
        validate_stopping_time([-1, 0, 0, 0])


def test_martingale_check_detects_inconsistency():
    lv = np.array([[0.0, 0], [1, 2]])
    with pytest.raises(GridError):
        DyadicMartingale(lv).check()
