import numpy as np
import pytest

from mohardy.phispec import GRAMMAR, SpecError, parse, tokenize


def test_power_evaluates():
    assert parse("power:p=2")(0.3, 3.0) == 9.0


def test_double_phase_with_zero_weight_is_square():
    phi = parse("double-phase:p=2,q=4,w=zero")
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(phi(0.7, t), t ** 2)


def test_weighted_power_from_file(tmp_path):
    w = np.array([1.0, 2.0, 3.0, 4.0])
    path = tmp_path / "w.csv"
    path.write_text("\n".join(map(str, w)))
    phi = parse(f"wpower:p=2,w={path.name}", base_dir=tmp_path)
    np.testing.assert_allclose(phi.on_leaves(np.full(4, 3.0)), w * 9)
    assert phi.label == f"wpower:p=2,w={path.name}"


def test_varexp_and_table(tmp_path):
    (tmp_path / "p.csv").write_text("2\n3\n")
    phi = parse("varexp:pfile=p.csv", base_dir=tmp_path)
    np.testing.assert_allclose(phi.on_leaves(np.array([2.0, 2.0])), [4.0, 8.0])
    (tmp_path / "t.csv").write_text("1,1\n2,4\n")
    assert parse("table:file=t.csv", base_dir=tmp_path)(0.0, 1.5) == pytest.approx(2.5)


def test_tokenize_positions():
    fam, pairs = tokenize("xlog:alpha=2,beta=1,gamma=1")
    assert fam == "xlog"
    assert pairs[1] == ("beta", "1", 13, 18)


@pytest.mark.parametrize("spec, fragment, position", [
    ("power:q=2", "unknown key 'q'", 6),
    ("power:p=two", "expected a number", 8),
    ("power:p=2,p=3", "duplicate key", 10),
    ("pow:p=2", "unknown family", 0),
    ("power", "missing key 'p'", 5),
    ("power;p=2", "expected ':'", 5),
    ("power:p", "expected '='", 7),
    ("wpower:p=2,w=zero", "weight 'zero'", 13),
    ("wpower:p=2,w=missing.csv", "no such file", 13),
    ("loglow:alpha=0.5", "alpha >= 1", 7),
])
def test_spec_errors_carry_position(spec, fragment, position):
    with pytest.raises(SpecError) as err:
        parse(spec)
    assert fragment in str(err.value)
    assert err.value.position == position


def test_unit_weight_reduces_to_power():
    assert parse("wpower:p=3,w=one").family == "power"


def test_grammar_lists_every_family():
    for fam in ("power", "wpower", "orlicz-exp", "loglow", "loggrow", "logdamp", "double-phase", "varexp",
                "xlog", "table"):
        assert fam in GRAMMAR
