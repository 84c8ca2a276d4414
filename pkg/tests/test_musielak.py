import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import leaf_arrays
from mohardy import musielak as mu


def half_indicator(N=2, height=2.0):
    f = np.zeros(1 << N)
    f[: (1 << N) // 2] = height
    return f


def test_modular_examples():
    phi = mu.power(2)
    assert mu.modular(phi, half_indicator()) == pytest.approx(2.0)
    assert mu.modular(phi, np.zeros(8)) == 0.0
    f = np.array([0.5, 2.0, 1.0, 0.0])
    assert mu.modular(mu.power(1), f) == pytest.approx(f.mean())


def test_modular_reports_non_finite_leaf():
    with pytest.raises(mu.MusielakError, match="leaf 1"):
        mu.modular(mu.orlicz_exp(), [0.0, 1e6, 0.0, 0.0])


def test_norm_examples():
    assert mu.luxemburg_norm(mu.power(2), half_indicator()) == pytest.approx(np.sqrt(2), rel=1e-9)
    assert mu.luxemburg_norm(mu.power(2), np.zeros(4)) == 0.0


@given(leaf_arrays(), st.sampled_from([1.0, 2.0, 4.0]))
def test_norm_matches_lp_closed_form(f, p):
    # scale first so tiny inputs do not underflow in the oracle
    top = np.max(np.abs(f))
    expected = top * np.mean((np.abs(f) / top) ** p) ** (1 / p) if top > 0 else 0.0
    got = mu.luxemburg_norm(mu.power(p), f)
    assert got == pytest.approx(expected, rel=1e-8, abs=1e-300)


@given(leaf_arrays(), st.floats(0.01, 100))
def test_norm_homogeneous(f, c):
    phi = mu.loggrow(1.5)
    assert mu.luxemburg_norm(phi, c * f) == pytest.approx(c * mu.luxemburg_norm(phi, f), rel=1e-8, abs=1e-300)


def test_norm_batched_matches_rows(rng):
    f = rng.standard_normal((5, 16))
    batch = mu.luxemburg_norm(mu.power(1.5), f)
    assert batch.shape == (5,)
    for i in range(5):
        assert batch[i] == mu.luxemburg_norm(mu.power(1.5), f[i])


def test_modular_at_norm_is_one(rng):
    f = rng.standard_normal(32)
    for phi in (mu.power(3), mu.loglow(1.0), mu.double_phase(2, 4, mu.power_weight(-0.4))):
        lam = mu.luxemburg_norm(phi, f)
        assert mu.modular(phi, f / lam) == pytest.approx(1.0, abs=1e-6)


def test_power_rescale():
    phi = mu.power_rescale(mu.power(2), 0.5)
    assert phi.family == "power" and phi.params["p"] == 1.0
    same = mu.power(3)
    assert mu.power_rescale(same, 1) is same
    with pytest.raises(mu.MusielakError):
        mu.power_rescale(same, 0)


@given(leaf_arrays())
def test_rescaled_norm_identity(f):
    lhs = mu.luxemburg_norm(mu.power(2), np.sqrt(np.abs(f)))
    rhs = mu.luxemburg_norm(mu.power(1), f) ** 0.5
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-300)


def test_complement_closed_forms():
    half = mu.power(2, 0.5)
    t = np.linspace(0, 5, 11)
    np.testing.assert_allclose(mu.complementary(half)(0.3, t), t ** 2 / 2)
    w = mu.power_weight(-0.4)
    p = 3.0
    q = p / (p - 1)
    phi = mu.wpower(p, w, c=1 / p)
    x = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(mu.complementary(phi)(x, 2.0), w(x) ** (-1 / (p - 1)) * 2.0 ** q / q)


def test_numeric_complement():
    star = mu.complementary(mu.power(2, 0.5), numeric=True)
    assert mu.evaluate_complement(star, 0.5, 1.0) == pytest.approx(0.5, abs=1e-3)
    t = np.geomspace(1e-3, 1e3, 13)
    np.testing.assert_allclose(mu.evaluate_complement(star, 0.5, t), t ** 2 / 2, rtol=1e-9)


def test_numeric_complement_top_boundary_is_an_error():
    star = mu.complementary(mu.power(2, 0.5), numeric=True)
    with pytest.raises(mu.ComplementError):
        mu.evaluate_complement(star, 0.5, 1e9)


def test_complement_of_sublinear_power_is_rejected():
    with pytest.raises(mu.ComplementError):
        mu.complementary(mu.power(0.5))


def test_uniform_type_examples():
    phi = mu.power(2)
    rep = mu.check_uniform_type(phi, 2, "lower")
    assert rep.constant == pytest.approx(1.0) and not rep.divergent
    assert np.isfinite(mu.check_uniform_type(mu.loglow(2.0), 1.5, "lower").constant)
    assert not mu.check_uniform_type(mu.loglow(2.0), 1.5, "lower").divergent
    assert mu.check_uniform_type(phi, 3, "lower").divergent


def test_type_indices_of_log_family():
    lower, upper = mu.type_indices(mu.loggrow(1.5))
    assert lower == pytest.approx(1.5) and 1.5 < upper <= 1.7


def test_Aq_examples():
    assert mu.check_Aq(mu.power(3), 1.0).constant == pytest.approx(1.0)
    phi = mu.wpower(1, mu.weight_from_values([0.5, 1.5]))
    assert mu.check_Aq(phi, 1.0, resolution=1).constant == pytest.approx(2.0)


@given(st.floats(1.0, 5.0), st.floats(0.0, 3.0))
def test_Aq_constant_decreases_in_q(q, dq):
    phi = mu.wpower(2, mu.power_weight(-0.6))
    assert mu.check_Aq(phi, q + dq).constant <= mu.check_Aq(phi, q).constant * (1 + 1e-12)


def test_q_phi_examples():
    assert mu.q_phi(mu.power(2.5)).value == 1.0
    a1 = mu.q_phi(mu.wpower(2, mu.power_weight(-0.4)))
    assert a1.passed and a1.value <= 1 + 1e-3
    alternating = np.tile([1.5, 4.0], 32)
    rep = mu.q_phi(mu.varexp(mu.weight_from_values(alternating)))
    assert not rep.passed and "A_inf" in rep.message


def test_S_condition_examples():
    assert mu.check_S_condition(mu.power(2)).constant == 1.0
    phi = mu.wpower(1, mu.weight_from_values([0.5, 1.5]))
    assert mu.check_S_condition(phi, resolution=1).constant == pytest.approx(2.0)
    rep = mu.check_S_condition(mu.wpower(2, mu.power_weight(-0.4)))
    assert np.isfinite(rep.constant)


def test_weight_S_minus():
    assert mu.weight_S_minus(np.array([0.5, 1.5])) == pytest.approx(2.0)
    assert mu.weight_S_minus(np.ones(8)) == 1.0


def test_dual_pairing_for_l2(rng):
    f = rng.standard_normal(16)
    rep = mu.dual_pairing_check(mu.power(2), f)
    # with ||g||_{phi*} = 1 for phi* = t^2/4 the extremal pairing is 2 ||f||_2
    assert rep.best == pytest.approx(2 * np.sqrt(np.mean(f ** 2)), rel=1e-6)
    assert rep.best <= rep.upper * (1 + 1e-9)
    assert mu.dual_pairing_check(mu.power(2), np.zeros(8)).best == 0.0


@given(leaf_arrays(max_res=4))
def test_dual_pairing_never_exceeds_upper_bound(f):
    rep = mu.dual_pairing_check(mu.power(3), f, samples=8)
    assert rep.best <= rep.upper * (1 + 1e-6)


def test_tabulated_interpolates():
    phi = mu.tabulated([1.0, 2.0], [1.0, 4.0])
    np.testing.assert_allclose(phi(0.0, [0.5, 1.5, 3.0]), [0.5, 2.5, 7.0])
    with pytest.raises(mu.MusielakError):
        mu.tabulated([1.0, 0.5], [1.0, 2.0])


def test_family_parameter_guards():
    for bad in (lambda: mu.power(0), lambda: mu.loglow(0.5), lambda: mu.logdamp(0.5),
                lambda: mu.double_phase(3, 2, mu.constant_weight(1.0)), lambda: mu.xlog(0, 1, 1)):
        with pytest.raises(mu.MusielakError):
            bad()
