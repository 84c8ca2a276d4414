"""Sampled checks of the structural hypotheses behind each inequality.

The conditions are stated asymptotically (uniform in t and x); here they are
tested on a finite t-grid and leaf sample, so a pass is evidence rather than
proof. Each check returns a :class:`HypothesisReport` that campaigns embed in
their output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import musielak as mu

K_MAX = 1e6  # constants above this count as unbounded on the sample


@dataclass(frozen=True)
class HypothesisReport:
    condition: str
    passed: bool
    checks: dict[str, bool] = field(default_factory=dict)
    values: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "passed": self.passed,
            "checks": dict(self.checks),
            "values": {k: _json_float(v) for k, v in self.values.items()},
            "notes": list(self.notes),
        }


def _json_float(v: float):
    v = float(v)
    if np.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def _conjugate(p: float) -> float:
    return np.inf if p == 1 else p / (p - 1)


@dataclass
class PhiProfile:
    """Cached sampled indices of one Musielak-Orlicz function."""

    phi: mu.MusielakFunction
    resolution: int = 6

    def __post_init__(self):
        self.lower, self.upper = mu.type_indices(self.phi, resolution=min(self.resolution, 6))
        self.q = mu.q_phi(self.phi, resolution=self.resolution, k_max=K_MAX)
        self._s = None
        self._a1 = None

    @property
    def s_condition(self) -> mu.SReport:
        if self._s is None:
            self._s = mu.check_S_condition(self.phi, resolution=self.resolution)
        return self._s

    @property
    def a_one(self) -> mu.WeightReport:
        if self._a1 is None:
            self._a1 = mu.check_Aq(self.phi, 1.0, resolution=self.resolution, k_max=K_MAX)
        return self._a1

    def base_values(self) -> dict[str, float]:
        return {"p_minus": self.lower, "p_plus": self.upper, "q_phi": self.q.value, "A_q_constant": self.q.constant}


def doob_condition(prof: PhiProfile) -> HypothesisReport:
    """A_inf and q(phi) < p- <= p+ < inf."""
    checks = {
        "A_infinity": prof.q.passed,
        "q_below_lower_type": bool(prof.q.value < prof.lower),
        "finite_upper_type": bool(np.isfinite(prof.upper)),
    }
    notes = (prof.q.message,) if prof.q.message else ()
    return HypothesisReport("A_inf, q(phi) < p- <= p+ < inf", all(checks.values()), checks, prof.base_values(), notes)


def maximal_on_complement(prof: PhiProfile, exponent: float = 1.0) -> HypothesisReport:
    """Sufficient check that M is bounded on the complement of phi_s(x, t) = phi(x, t^s).

    The complement of a function with types (a, b), a > 1, has types (b', a');
    Doob's condition is then tested on it. A complement of an x-independent
    function of exact type 1 is L^inf, where M is trivially bounded.
    """
    a, b = prof.lower * exponent, prof.upper * exponent
    values = {"rescaled_p_minus": a, "rescaled_p_plus": b}
    if a < 1:
        return HypothesisReport("M bounded on complement", False, {"rescaled_lower_type_at_least_1": False}, values,
                                ("complement is infinite: rescaled lower type below 1",))
    if a == 1 and b == 1 and prof.phi.x_independent:
        return HypothesisReport("M bounded on complement", True, {"complement_is_L_infinity": True}, values)
    if a == 1:
        return HypothesisReport("M bounded on complement", False, {"rescaled_lower_type_above_1": False}, values,
                                ("complement has no finite upper type",))
    lower_star = _conjugate(b)
    if prof.phi.x_independent:
        q_star = mu.QReport(1.0, True, 1.0)
    else:
        psi = mu.power_rescale(prof.phi, exponent)
        q_star = mu.q_phi(mu.complementary(psi), resolution=prof.resolution, k_max=K_MAX)
    values.update({"complement_p_minus": lower_star, "complement_p_plus": _conjugate(a), "complement_q": q_star.value})
    checks = {"complement_A_infinity": q_star.passed, "complement_q_below_lower_type": bool(q_star.value < lower_star)}
    return HypothesisReport("M bounded on complement", all(checks.values()), checks, values)


def _combine(condition: str, parts: dict[str, HypothesisReport], extra: dict[str, bool] | None = None,
             values: dict[str, float] | None = None) -> HypothesisReport:
    checks: dict[str, bool] = {}
    vals: dict[str, float] = dict(values or {})
    notes: list[str] = []
    for name, rep in parts.items():
        for k, v in rep.checks.items():
            checks[f"{name}.{k}"] = v
        for k, v in rep.values.items():
            vals.setdefault(k, v)
        notes.extend(rep.notes)
    checks.update(extra or {})
    return HypothesisReport(condition, all(checks.values()), checks, vals, tuple(notes))


def _s_minus(prof: PhiProfile) -> dict[str, bool]:
    return {"S_minus": bool(prof.s_condition.minus <= K_MAX)}


def hypotheses_for(name: str, prof: PhiProfile, r: float | None = None) -> HypothesisReport:
    """The sampled hypothesis report for campaign ``name``."""
    base = prof.base_values()
    if name in ("doob", "weak", "transform", "partial-sum"):
        return doob_condition(prof)
    if name in ("stein", "fefferman-stein"):
        return _combine("Doob condition with r > 1", {"doob": doob_condition(prof)}, {"r_above_1": bool(r > 1)})
    if name == "uv-maximal":
        return _combine("Doob condition with r > 0", {"doob": doob_condition(prof)}, {"r_positive": bool(r > 0)})
    if name == "dual-doob":
        lower_ok = bool(prof.lower >= 1)
        via_complement = maximal_on_complement(prof, 1.0)
        via_a1 = bool(lower_ok and prof.a_one.passed and np.isfinite(prof.upper))
        rep = _combine("p- >= 1 and (M bounded on phi* or lower type 1 with A_1)",
                       {"complement": via_complement}, values={**base, "A_1_constant": prof.a_one.constant})
        checks = dict(rep.checks)
        checks["lower_type_at_least_1"] = lower_ok
        passed = lower_ok and (via_complement.passed or via_a1)
        return HypothesisReport(rep.condition, passed, {**checks, "A_1_route": via_a1}, rep.values, rep.notes)
    if name == "s-vs-S":
        return _combine("p- >= 2 and M bounded on (phi_{1/2})*", {"complement": maximal_on_complement(prof, 0.5)},
                        {"lower_type_at_least_2": bool(prof.lower >= 2)}, base)
    if name == "bdg":
        main = _combine("A_inf, S-, 1 < p- <= p+ < inf, M bounded on phi*",
                        {"complement": maximal_on_complement(prof, 1.0)},
                        {"A_infinity": prof.q.passed, **_s_minus(prof),
                         "lower_type_above_1": bool(prof.lower > 1), "finite_upper_type": bool(np.isfinite(prof.upper))},
                        base)
        if main.passed or not (prof.phi.x_independent and prof.lower >= 1 and np.isfinite(prof.upper)):
            return main
        # x-independent Orlicz function of lower type 1: unweighted Davis regime
        return HypothesisReport(main.condition + " (or x-independent with lower type 1)", True,
                                {**main.checks, "orlicz_lower_type_1_route": True}, main.values, main.notes)
    if name == "five-space":
        return _combine("A_inf, S-, 0 < p- <= p+ < inf", {},
                        {"A_infinity": prof.q.passed, **_s_minus(prof), "positive_lower_type": bool(prof.lower > 0),
                         "finite_upper_type": bool(np.isfinite(prof.upper))}, base)
    if name in ("fejer-max", "fejer-dyadic"):
        r_used = fejer_exponent(name, prof.lower) if r is None else r
        low = 0.5 if name == "fejer-max" else 0.0
        in_range = bool(low < r_used <= min(1.0, prof.lower))
        if r_used > 0:
            comp = maximal_on_complement(prof, 1.0 / r_used)
        else:
            comp = HypothesisReport("M bounded on complement", False, {"r_positive": False})
        return _combine(f"A_inf, p+ < inf, r in ({low:g}, min(1, p-)] with M bounded on (phi_(1/r))*",
                        {"complement": comp},
                        {"A_infinity": prof.q.passed, "finite_upper_type": bool(np.isfinite(prof.upper)),
                         "r_in_range": in_range}, {**base, "r": r_used})
    raise ValueError(f"no hypotheses registered for {name!r}")


def fejer_exponent(name: str, lower: float) -> float:
    """Default r strictly inside the admissible range, so phi_(1/r) has lower type above 1."""
    top = min(1.0, lower)
    low = 0.5 if name == "fejer-max" else 0.0
    return 0.5 * (low + top) if top > low else top
