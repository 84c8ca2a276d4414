import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import leaf_arrays
from mohardy import walsh as ws
from mohardy.grid import GridError, cond_expect, resolution_of

F = np.array([1.0, 3, 5, 7])


def test_rademacher_examples():
    np.testing.assert_array_equal(ws.rademacher(0, 2), [1, 1, -1, -1])
    np.testing.assert_array_equal(ws.rademacher(1, 2), [1, -1, 1, -1])
    for n in range(5):
        assert ws.rademacher(n, 5).mean() == 0
    with pytest.raises(GridError):
        ws.rademacher(2, 2)


def test_walsh_examples():
    np.testing.assert_array_equal(ws.walsh(0, 3), np.ones(8))
    np.testing.assert_array_equal(ws.walsh(3, 2), [1, -1, -1, 1])
    W = ws.walsh_rows(np.arange(16), 4).astype(float)
    np.testing.assert_array_equal(W @ W.T / 16, np.eye(16))


def test_analyze_examples():
    c = ws.analyze(F)
    np.testing.assert_allclose(c, [4, -2, -1, 0])
    assert np.sum(c ** 2) == pytest.approx(21.0)
    unit = np.zeros(8)
    unit[3] = 1
    np.testing.assert_allclose(ws.analyze(ws.walsh(3, 3)), unit)
    assert np.all(ws.analyze(np.zeros(8)) == 0)


@given(leaf_arrays(max_res=7))
def test_fast_transform_matches_naive(f):
    c = ws.analyze(f)
    np.testing.assert_allclose(c, ws.naive_analyze(f), atol=1e-9)
    np.testing.assert_allclose(ws.synthesize(c), f, atol=1e-9)
    assert ws.parseval_gap(f, c) <= 1e-10


def test_hadamard_reordering():
    N = 3
    H = np.array([[(-1) ** bin(i & j).count("1") for j in range(8)] for i in range(8)])
    f = np.arange(8.0)
    natural = H @ f / 8
    np.testing.assert_allclose(ws.hadamard_to_paley(natural), ws.analyze(f))


def test_dirichlet_examples():
    np.testing.assert_allclose(ws.dirichlet_kernel(2, 2).values, [2, 2, 0, 0])
    np.testing.assert_allclose(ws.dirichlet_kernel(1, 2).values, 1.0)
    np.testing.assert_allclose(ws.dirichlet_kernel(3, 2).values, [3, 1, 1, -1])
    for k in range(5):
        np.testing.assert_array_equal(ws.dirichlet_kernel(1 << k, 4).values, ws.dirichlet_dyadic(k, 4))


def test_fejer_kernel_examples():
    np.testing.assert_allclose(ws.fejer_kernel(2, 2).values, [1.5, 1.5, 0.5, 0.5])
    np.testing.assert_allclose(ws.fejer_kernel(1, 3).values, 1.0)
    for m in range(5):
        np.testing.assert_allclose(ws.fejer_kernel(1 << m, 4).values, ws.fejer_dyadic_closed(m, 4), atol=1e-12)


def test_fejer_kernel_bound():
    assert np.all(np.abs(ws.fejer_kernel(5, 4).values) <= ws.fejer_bound(5, 4) + 1e-12)
    for n in range(1, 64):
        assert np.all(np.abs(ws.fejer_kernel(n, 6).values) <= ws.fejer_bound(n, 6) + 1e-12)


def test_partial_sum_examples():
    np.testing.assert_allclose(ws.partial_sum(F, 2), [2, 2, 6, 6])
    np.testing.assert_allclose(ws.partial_sum(F, 4), F)
    np.testing.assert_allclose(ws.partial_sum(F, 1), 4.0)


@given(leaf_arrays(max_res=6))
def test_dyadic_partial_sums_are_conditional_expectations(f):
    N = resolution_of(f.size)
    for n in range(N + 1):
        np.testing.assert_allclose(ws.partial_sum(f, 1 << n), cond_expect(f, n), atol=1e-9)


@given(leaf_arrays(max_res=5), st.data())
def test_partial_sum_via_T0_identity(f, data):
    n = data.draw(st.integers(0, f.size))
    np.testing.assert_allclose(ws.partial_sum_via_T0(f, n), ws.partial_sum(f, n), atol=1e-9)


def test_T0_example():
    np.testing.assert_allclose(ws.partial_sum_via_T0(F, 2), [2, 2, 6, 6])
    np.testing.assert_allclose(ws.partial_sum_via_T0(F, 1), 4.0)


@given(leaf_arrays(max_res=5), st.data())
def test_convolution_forms_agree(f, data):
    n = data.draw(st.integers(1, f.size))
    np.testing.assert_allclose(ws.partial_sum_conv(f, n), ws.partial_sum(f, n), atol=1e-9)
    np.testing.assert_allclose(ws.fejer_mean_conv(f, n), ws.fejer_mean(f, n), atol=1e-9)


def test_fejer_mean_examples():
    np.testing.assert_allclose(ws.fejer_mean(F, 2), [3, 3, 5, 5])
    np.testing.assert_allclose(ws.fejer_mean(np.full(8, -2.0), 5), -2.0)


def test_fejer_mean_tail_is_order_one_over_n(rng):
    f = rng.standard_normal(16)
    errs = [np.max(np.abs(ws.fejer_mean(f, n) - f)) for n in (100, 1000, 10000)]
    assert errs[0] / errs[1] == pytest.approx(10.0, rel=1e-9)
    assert errs[1] / errs[2] == pytest.approx(10.0, rel=1e-9)


def test_fejer_mean_beyond_grid_matches_definition(rng):
    f = rng.standard_normal(8)
    n = 13
    direct = sum(ws.partial_sum(f, k) for k in range(1, n + 1)) / n
    np.testing.assert_allclose(ws.fejer_mean(f, n), direct, atol=1e-12)


def test_maximal_fejer_examples():
    np.testing.assert_allclose(ws.maximal_fejer(np.full(8, -1.5)), 1.5)


def brute_force_sigma_star(f, extra=6):
    N = resolution_of(f.size)
    best = np.abs(f).copy()
    running = np.zeros_like(f)
    for k in range(1, (1 << (N + extra)) + 1):
        running += ws.partial_sum(f, k)
        best = np.maximum(best, np.abs(running / k))
    return best


@given(leaf_arrays(max_res=3))
def test_maximal_fejer_matches_brute_force(f):
    got = ws.maximal_fejer(f)
    assert np.all(got >= np.abs(f) - 1e-12)
    np.testing.assert_allclose(got, brute_force_sigma_star(f, extra=3), atol=1e-10)


def test_maximal_fejer_dyadic_is_below_full():
    f = np.random.default_rng(3).standard_normal(32)
    assert np.all(ws.maximal_fejer_dyadic(f) <= ws.maximal_fejer(f) + 1e-12)


def test_all_partial_sums_rows():
    f = np.random.default_rng(4).standard_normal(8)
    rows = ws.all_partial_sums(f)
    for n in range(1, 9):
        np.testing.assert_allclose(rows[n - 1], ws.partial_sum(f, n), atol=1e-12)
