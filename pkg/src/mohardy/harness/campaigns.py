"""Monte Carlo verification of the maximal, square-function and Fourier inequalities.

A campaign draws ``trials`` random inputs per resolution, evaluates the
lhs/rhs Luxemburg-norm ratio of the named inequality and records the largest
and median observations. Observed ratios are lower bounds for the true
constants and are never reported as operator norms.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .. import musielak as mu
from ..grid import DyadicMartingale, max_resolution, martingale_of
from ..operators import (U_maximal, V_maximal, doob_maximal, dual_doob_sum, martingale_transform, stein_sum,
                         variation, vector_maximal, weak_type_value)
from ..phispec import parse
from ..walsh import all_partial_sums, maximal_fejer, maximal_fejer_dyadic
from . import generators as gen
from .experiments import five_space_report
from .hypotheses import HypothesisReport, PhiProfile, fejer_exponent, hypotheses_for

CSV_COLUMNS = ("inequality", "phi_spec", "resolution", "trials", "max_ratio", "median_ratio",
               "worst_seed_index", "pass")

# default exponent r for campaigns that take one
DEFAULT_R = {"stein": 2.0, "fefferman-stein": 2.0, "uv-maximal": 1.0}
TWO_SIDED = {"bdg", "five-space"}
CEILING_SLACK = 1e-6


class HypothesisRejected(RuntimeError):
    def __init__(self, report: "VerificationReport"):
        super().__init__(f"{report.inequality}: hypotheses fail for {report.phi_spec}")
        self.report = report


@dataclass(frozen=True)
class ExperimentConfig:
    inequality: str
    phi_spec: str
    resolutions: tuple[int, ...] = (6, 8, 10)
    trials: int = 100
    seed: int = 0
    r: Optional[float] = None
    t_star: float = 1.0
    out: Optional[str] = None
    law: str = "mixed"
    strict: bool = True
    stability_limit: float = 4.0
    ceiling: Optional[float] = None
    base_dir: str = "."

    def __post_init__(self):
        if self.inequality not in CAMPAIGNS:
            raise ValueError(f"unknown inequality {self.inequality!r}; expected one of {', '.join(CAMPAIGNS)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.resolutions:
            raise ValueError("at least one resolution is required")
        cap = max_resolution()
        for N in self.resolutions:
            if not 1 <= N <= cap:
                raise ValueError(f"resolution {N} outside [1, {cap}]")
        if self.stability_limit < 1:
            raise ValueError("stability limit must be >= 1")
        if self.law != "mixed" and self.law not in gen.LAWS:
            raise ValueError(f"unknown law {self.law!r}")

    def exponent(self, lower_type: float) -> Optional[float]:
        if self.r is not None:
            return float(self.r)
        if self.inequality in ("fejer-max", "fejer-dyadic"):
            return fejer_exponent(self.inequality, lower_type)
        return DEFAULT_R.get(self.inequality)


@dataclass(frozen=True)
class ResolutionRow:
    resolution: int
    trials: int
    max_ratio: float
    median_ratio: float
    min_ratio: float
    worst_seed_index: int
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    inequality: str
    phi_spec: str
    seed: int
    mode: str
    law: str
    r: Optional[float]
    ceiling: float
    stability_limit: float
    stability_ratio: float
    rows: tuple[ResolutionRow, ...]
    hypothesis: HypothesisReport
    rejected: bool
    passed: bool

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            w.writerow([self.inequality, self.phi_spec, row.resolution, row.trials, repr(row.max_ratio),
                        repr(row.median_ratio), row.worst_seed_index, "true" if row.passed else "false"])
        return buf.getvalue()

    def to_json(self) -> dict:
        enc = _enc_float
        return {
            "inequality": self.inequality,
            "phi_spec": self.phi_spec,
            "seed": self.seed,
            "mode": self.mode,
            "law": self.law,
            "r": self.r,
            "ceiling": enc(self.ceiling),
            "stability_limit": self.stability_limit,
            "stability_ratio": enc(self.stability_ratio),
            "rows": [{"resolution": row.resolution, "trials": row.trials, "max_ratio": enc(row.max_ratio),
                      "median_ratio": enc(row.median_ratio), "min_ratio": enc(row.min_ratio),
                      "worst_seed_index": row.worst_seed_index, "pass": row.passed} for row in self.rows],
            "hypothesis": self.hypothesis.to_json(),
            "rejected": self.rejected,
            "pass": self.passed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        dec = _dec_float
        h = obj["hypothesis"]
        hyp = HypothesisReport(h["condition"], h["passed"], dict(h["checks"]),
                               {k: dec(v) for k, v in h["values"].items()}, tuple(h["notes"]))
        rows = tuple(ResolutionRow(r["resolution"], r["trials"], dec(r["max_ratio"]), dec(r["median_ratio"]),
                                   dec(r["min_ratio"]), r["worst_seed_index"], r["pass"]) for r in obj["rows"])
        return cls(obj["inequality"], obj["phi_spec"], obj["seed"], obj["mode"], obj["law"], obj["r"],
                   dec(obj["ceiling"]), obj["stability_limit"], dec(obj["stability_ratio"]), rows, hyp,
                   obj["rejected"], obj["pass"])

    def json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _enc_float(v: float):
    v = float(v)
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _dec_float(v) -> float:
    return float(v)


# --------------------------------------------------------------------------
# per-inequality ratio evaluators; each returns one ratio per trial index


@dataclass(frozen=True)
class TrialContext:
    phi: mu.MusielakFunction
    resolution: int
    seed: int
    law: str
    r: Optional[float]


def _ratio(lhs, rhs) -> np.ndarray:
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(rhs > 0, lhs / rhs, np.nan)


def _martingales(ctx: TrialContext, idx) -> DyadicMartingale:
    N = ctx.resolution
    leaves = np.stack([gen.leaf_sample(gen.law_for_trial(ctx.law, t), N, gen.trial_rng(ctx.seed, N, t))
                       for t in idx])
    return martingale_of(leaves, center=True)


def _functions(ctx: TrialContext, idx, stream: int = 0) -> np.ndarray:
    N = ctx.resolution
    return np.stack([gen.leaf_sample(gen.law_for_trial(ctx.law, t), N,
                                     np.random.default_rng([ctx.seed, N, t, stream])) for t in idx])


def _sequences(ctx: TrialContext, idx) -> np.ndarray:
    """Nonnegative g_1..g_N per trial, laid out (N, trials, 2^N)."""
    N = ctx.resolution
    g = np.stack([gen.nonnegative_sequence(N, N, gen.trial_rng(ctx.seed, N, t)) for t in idx])
    return np.moveaxis(g, 0, 1)


def _norm(ctx: TrialContext, f) -> np.ndarray:
    return np.atleast_1d(mu.luxemburg_norm(ctx.phi, f))


def _doob(ctx, idx):
    m = _martingales(ctx, idx)
    return _ratio(_norm(ctx, doob_maximal(m)), _norm(ctx, m.final))


def _weak(ctx, idx):
    m = _martingales(ctx, idx)
    lhs = np.array([weak_type_value(DyadicMartingale(m.levels[i]), ctx.phi) for i in range(len(idx))])
    return _ratio(lhs, _norm(ctx, m.final))


def _dual_doob(ctx, idx):
    lhs, rhs = dual_doob_sum(_sequences(ctx, idx), shift=1)
    return _ratio(_norm(ctx, lhs), _norm(ctx, rhs))


def _s_vs_S(ctx, idx):
    m = _martingales(ctx, idx)
    return _ratio(_norm(ctx, variation(m, "s")), _norm(ctx, variation(m, "S")))


def _fefferman_stein(ctx, idx):
    fs = np.stack([_functions(ctx, idx, stream=j) for j in range(4)])
    lhs, rhs = vector_maximal(fs, ctx.r)
    return _ratio(_norm(ctx, lhs), _norm(ctx, rhs))


def _stein(ctx, idx):
    lhs, rhs = stein_sum(_sequences(ctx, idx), ctx.r, shift=1)
    return _ratio(_norm(ctx, lhs), _norm(ctx, rhs))


def _bdg(ctx, idx):
    m = _martingales(ctx, idx)
    raw = _ratio(_norm(ctx, doob_maximal(m)), _norm(ctx, variation(m, "S")))
    return np.maximum(raw, 1.0 / raw)


def _five_space(ctx, idx):
    table = five_space_report(_martingales(ctx, idx), ctx.phi)
    return table.max_spread()


def _transform(ctx, idx):
    m = _martingales(ctx, idx)
    N = ctx.resolution
    v = np.stack([gen.adapted_multipliers(N, np.random.default_rng([ctx.seed, N, t, 1])) for t in idx])
    return _ratio(_norm(ctx, martingale_transform(m, v).final), _norm(ctx, m.final))


def _partial_sum(ctx, idx):
    f = _martingales(ctx, idx).final
    out = np.empty(len(idx))
    for i in range(len(idx)):
        sums = all_partial_sums(f[i])
        out[i] = np.max(_norm(ctx, sums), initial=0.0)
    return _ratio(out, _norm(ctx, f))


def _fejer_max(ctx, idx):
    m = _martingales(ctx, idx)
    return _ratio(_norm(ctx, maximal_fejer(m.final)), _norm(ctx, doob_maximal(m)))


def _fejer_dyadic(ctx, idx):
    m = _martingales(ctx, idx)
    return _ratio(_norm(ctx, maximal_fejer_dyadic(m.final)), _norm(ctx, doob_maximal(m)))


def _uv_maximal(ctx, idx):
    f = _functions(ctx, idx)
    with_v = 0.5 < ctx.r <= 1.0
    best = np.zeros(len(idx))
    for n in range(1, ctx.resolution + 1):
        best = np.maximum(best, _norm(ctx, U_maximal(f, n, ctx.r)))
        if with_v:
            best = np.maximum(best, _norm(ctx, V_maximal(f, n, ctx.r)))
    return _ratio(best, _norm(ctx, f))


CAMPAIGNS: dict[str, tuple[Callable, int]] = {
    # name: (evaluator, trials per batch)
    "doob": (_doob, 128),
    "weak": (_weak, 64),
    "dual-doob": (_dual_doob, 64),
    "s-vs-S": (_s_vs_S, 128),
    "fefferman-stein": (_fefferman_stein, 64),
    "stein": (_stein, 64),
    "bdg": (_bdg, 128),
    "five-space": (_five_space, 64),
    "transform": (_transform, 64),
    "partial-sum": (_partial_sum, 16),
    "fejer-max": (_fejer_max, 32),
    "fejer-dyadic": (_fejer_dyadic, 64),
    "uv-maximal": (_uv_maximal, 32),
}


def default_ceiling(name: str, phi: mu.MusielakFunction) -> float:
    """Classical constants for unweighted L^p; elsewhere no fixed ceiling."""
    if phi.family != "power" or "c" in phi.params:
        return np.inf
    p = phi.params["p"]
    if name == "doob" and p > 1:
        return p / (p - 1)
    if name == "weak" and p >= 1:
        return 1.0
    if p == 2 and name in ("transform", "partial-sum", "s-vs-S"):
        return 1.0
    if p == 2 and name == "bdg":
        return 2.0
    if p == 1 and name == "dual-doob":
        return 1.0
    return np.inf


def observe(name: str, phi: mu.MusielakFunction, resolution: int, trials: int, seed: int,
            law: str = "mixed", r: Optional[float] = None) -> np.ndarray:
    """Ratios for trials 0..trials-1 at one resolution (nan where the rhs vanishes)."""
    fn, chunk = CAMPAIGNS[name]
    ctx = TrialContext(phi, resolution, seed, law, r)
    # keep memory flat at fine resolutions
    chunk = max(1, chunk >> max(0, resolution - 8))
    parts = [fn(ctx, np.arange(s, min(s + chunk, trials))) for s in range(0, trials, chunk)]
    return np.concatenate(parts)


def _summarize(N: int, ratios: np.ndarray, ceiling: float) -> ResolutionRow:
    ok = ratios[np.isfinite(ratios)]
    bad = np.isinf(ratios)
    if bad.any():
        worst = int(np.argmax(bad))
        return ResolutionRow(N, int(ratios.size), np.inf, float(np.median(ok)) if ok.size else np.inf,
                             float(ok.min()) if ok.size else np.inf, worst, False)
    if ok.size == 0:
        return ResolutionRow(N, int(ratios.size), 0.0, 0.0, 0.0, -1, True)
    worst = int(np.nanargmax(ratios))
    top = float(ok.max())
    return ResolutionRow(N, int(ratios.size), top, float(np.median(ok)), float(ok.min()), worst,
                         bool(top <= ceiling * (1 + CEILING_SLACK)))


def stability_ratio(values) -> float:
    v = np.asarray([x for x in values], dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        return np.inf
    if np.all(v == 0):
        return 1.0
    if v.min() <= 0:
        return np.inf
    return float(v.max() / v.min())


def verify(config: ExperimentConfig, profile: Optional[PhiProfile] = None) -> VerificationReport:
    """Run one campaign; in strict mode failing hypotheses reject without running trials."""
    phi = parse(config.phi_spec, config.base_dir)
    prof = profile or PhiProfile(phi, resolution=min(max(config.resolutions), 8))
    r = config.exponent(prof.lower)
    if config.inequality in ("stein", "fefferman-stein") and r is not None and r <= 1:
        raise ValueError(f"{config.inequality} needs r > 1, got {r}")
    hyp = hypotheses_for(config.inequality, prof, r)
    ceiling = default_ceiling(config.inequality, phi) if config.ceiling is None else float(config.ceiling)
    mode = "strict" if config.strict else "exploratory"
    common = dict(inequality=config.inequality, phi_spec=config.phi_spec, seed=config.seed, mode=mode,
                  law=config.law, r=r, ceiling=ceiling, stability_limit=config.stability_limit, hypothesis=hyp)
    if config.strict and not hyp.passed:
        return VerificationReport(stability_ratio=np.nan, rows=(), rejected=True, passed=False, **common)
    rows = []
    for N in config.resolutions:
        ratios = observe(config.inequality, phi, N, config.trials, config.seed, config.law, r)
        rows.append(_summarize(N, ratios, ceiling))
    stab = stability_ratio(row.max_ratio for row in rows)
    stable = stab <= config.stability_limit
    rows = tuple(replace(row, passed=row.passed and stable) for row in rows)
    passed = all(row.passed for row in rows)
    return VerificationReport(stability_ratio=stab, rows=rows, rejected=False, passed=passed, **common)


def write_report(report: VerificationReport, path: str | Path) -> None:
    """CSV at ``path`` and the JSON mirror next to it (same stem, .json)."""
    p = Path(path)
    p.write_text(report.csv_text())
    p.with_suffix(".json").write_text(report.json_text())
