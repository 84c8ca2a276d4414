import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mohardy import musielak as mu
from mohardy.grid import martingale_of
from mohardy.harness import (AtomCampaignConfig, ExperimentConfig, VerificationReport, atom_campaign,
                             fejer_convergence, five_space_campaign, five_space_report, generate_martingale, verify,
                             write_report)
from mohardy.harness import generators as gen
from mohardy.harness.campaigns import CAMPAIGNS, default_ceiling, stability_ratio
from mohardy.harness.experiments import s_bound_constant
from mohardy.harness.hypotheses import PhiProfile, hypotheses_for
from mohardy.walsh import walsh

FROZEN_DOOB = """\
inequality,phi_spec,resolution,trials,max_ratio,median_ratio,worst_seed_index,pass
doob,power:p=2,3,12,1.126749273672161,1.058966472919244,6,true
doob,power:p=2,4,12,1.1714299202637293,1.1285251998991574,5,true
"""


def small_doob():
    return verify(ExperimentConfig("doob", "power:p=2", (3, 4), trials=12, seed=7))


def test_campaign_is_deterministic():
    assert small_doob().csv_text() == small_doob().csv_text()


def test_campaign_matches_frozen_csv():
    got = list(csv.DictReader(io.StringIO(small_doob().csv_text())))
    want = list(csv.DictReader(io.StringIO(FROZEN_DOOB)))
    assert len(got) == len(want)
    for g, w in zip(got, want):
        for key in ("inequality", "phi_spec", "resolution", "trials", "worst_seed_index", "pass"):
            assert g[key] == w[key]
        for key in ("max_ratio", "median_ratio"):
            assert float(g[key]) == pytest.approx(float(w[key]), rel=1e-12)


def test_report_json_round_trip(tmp_path):
    rep = small_doob()
    back = VerificationReport.from_json(json.loads(rep.json_text()))
    assert back == rep
    write_report(rep, tmp_path / "doob.csv")
    assert (tmp_path / "doob.csv").read_text() == rep.csv_text()
    assert VerificationReport.from_json(json.loads((tmp_path / "doob.json").read_text())) == rep


def test_strict_rejection_runs_no_trials():
    rep = verify(ExperimentConfig("stein", "power:p=1", (4,), trials=5))
    assert rep.rejected and not rep.passed and rep.rows == ()
    assert rep.csv_text().count("\n") == 1
    loose = verify(ExperimentConfig("stein", "power:p=1", (4,), trials=5, strict=False))
    assert not loose.rejected and len(loose.rows) == 1
    assert loose.mode == "exploratory"


@pytest.mark.parametrize("name", sorted(CAMPAIGNS))
def test_every_campaign_runs_under_t_squared(name):
    rep = verify(ExperimentConfig(name, "power:p=2", (3, 4), trials=6, seed=1))
    assert rep.passed, rep.csv_text()
    assert all(np.isfinite(row.max_ratio) for row in rep.rows)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("nope", "power:p=2")
    with pytest.raises(ValueError):
        ExperimentConfig("doob", "power:p=2", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("doob", "power:p=2", resolutions=(0,))
    with pytest.raises(ValueError):
        ExperimentConfig("doob", "power:p=2", law="cauchy")
    with pytest.raises(ValueError):
        verify(ExperimentConfig("stein", "power:p=2", (3,), r=1.0))


def test_default_ceilings():
    assert default_ceiling("doob", mu.power(2)) == pytest.approx(2.0)
    assert default_ceiling("doob", mu.power(3)) == pytest.approx(1.5)
    assert default_ceiling("bdg", mu.power(2)) == 2.0
    assert default_ceiling("doob", mu.power(2, 3.0)) == np.inf
    assert default_ceiling("five-space", mu.power(2)) == np.inf


def test_stability_ratio():
    assert stability_ratio([1.0, 2.0, 1.5]) == 2.0
    assert stability_ratio([0.0, 0.0]) == 1.0
    assert stability_ratio([1.0, np.inf]) == np.inf


def test_hypotheses():
    assert hypotheses_for("doob", PhiProfile(mu.power(2), 4), None).passed
    assert not hypotheses_for("doob", PhiProfile(mu.power(1), 4), None).passed
    assert hypotheses_for("bdg", PhiProfile(mu.power(1), 4), None).passed
    assert hypotheses_for("five-space", PhiProfile(mu.power(0.8), 4), None).passed
    assert not hypotheses_for("stein", PhiProfile(mu.power(2), 4), 1.0).passed


# generators


@pytest.mark.parametrize("law", gen.LAWS)
def test_generated_martingales_are_centered_and_reproducible(law):
    a = generate_martingale(law, 5, 3)
    b = generate_martingale(law, 5, 3)
    np.testing.assert_array_equal(a.levels, b.levels)
    assert gen.is_centered(a)
    a.check()  # raises when the levels are not a martingale


def test_trial_streams_are_independent_of_batch_size():
    big = gen.martingale_batch("mixed", 4, 10, seed=2)
    small = gen.martingale_batch("mixed", 4, 3, seed=2)
    np.testing.assert_array_equal(big.levels[:3], small.levels)


@given(st.integers(1, 6), st.integers(0, 1000))
def test_random_stopping_times_are_valid(N, seed):
    rng = np.random.default_rng(seed)
    nu = gen.random_stopping_time(N, rng)
    A = gen.random_stopped_set(nu, rng)
    from mohardy.atoms import is_stopped_measurable
    assert is_stopped_measurable(A, nu)


def test_adapted_multipliers_shape_and_range(rng):
    v = gen.adapted_multipliers(4, rng)
    assert v.shape == (5, 16)
    assert np.all(np.abs(v) <= 1)


def test_doubling_weight_is_positive(rng):
    w = gen.doubling_weight(6, rng)
    assert np.all(w > 0)
    assert np.all(np.isfinite(mu.weight_S_minus(w)))


# five-space


def test_five_space_report_of_r0():
    table = five_space_report(martingale_of(np.array([1.0, 1, -1, -1])), mu.power(2))
    for ratio in table.ratios().values():
        np.testing.assert_allclose(ratio, 1.0, rtol=1e-9)


def test_five_space_report_of_zero_is_nan():
    table = five_space_report(martingale_of(np.zeros(8)), mu.power(2))
    assert all(np.all(np.isnan(r)) for r in table.ratios().values())


def test_five_space_campaign_small():
    camp = five_space_campaign("power:p=2", (3, 4), trials=20, seed=0)
    assert camp.stable()
    assert camp.worst_drift >= 1.0
    json.dumps(camp.to_json())


# Fejer convergence


def test_convergence_for_walsh_function():
    table = fejer_convergence(walsh(3, 4), mu.power(2), schedule=range(1, 17))
    for n, _, partial in table.rows():
        if n >= 4:
            assert partial == 0.0
    assert table.limit_sigma_error < 1e-12


def test_convergence_exact_at_full_resolution(rng):
    f = rng.standard_normal(64)
    for spec in (mu.power(1), mu.power(2), mu.power(0.6)):
        table = fejer_convergence(f, spec)
        assert table.partial_errors[-1] == 0.0
        assert table.limit_sigma_error < 1e-12 * max(1.0, table.norm_f)
    table = fejer_convergence(f, mu.power(2))
    assert table.sigma_nonincreasing() and table.partial_nonincreasing()


def test_convergence_rejects_bad_schedule():
    with pytest.raises(ValueError):
        fejer_convergence(np.ones(4), mu.power(2), schedule=[2, 1])


# atom campaigns


@pytest.mark.parametrize("kind", ("s", "P", "Q", "M", "S"))
def test_atom_campaign_has_no_failures(kind):
    rep = atom_campaign(AtomCampaignConfig(kind, "power:p=2", resolution=5, trials=10, seed=3))
    assert rep.validation_failures == 0
    assert rep.atoms_checked > 0
    assert rep.worst_reconstruction_error < 1e-9
    if kind == "s":
        assert rep.s_bound_violations == 0
    json.dumps(rep.to_json())


def test_s_bound_constant():
    assert s_bound_constant(1.0) == pytest.approx(4.0)
    assert s_bound_constant(0.5) > s_bound_constant(1.0)


def test_atom_campaign_config_validation():
    with pytest.raises(ValueError):
        AtomCampaignConfig("Z", "power:p=2")
    with pytest.raises(ValueError):
        AtomCampaignConfig("s", "power:p=2", r=1.5)
