"""Hardy-norm comparisons, Fourier convergence tables and atom campaigns."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .. import musielak as mu
from ..atoms import ATOM_FUNCTIONAL, atomic_norm, decompose, validate_atom
from ..grid import DyadicMartingale, martingale_of, resolution_of
from ..operators import hardy_processes
from ..phispec import parse
from ..walsh import fejer_mean, maximal_fejer, partial_sum
from . import generators as gen

FIVE = ("H^M", "H^S", "H^s", "P", "Q")
_PROCESS_OF = {"H^M": "maximal", "H^S": "square", "H^s": "conditional_square",
               "P": "predictable_maximal", "Q": "predictable_square"}


@dataclass(frozen=True)
class FiveSpaceTable:
    """The five Hardy norms of one martingale or a batch (arrays then)."""

    norms: dict[str, np.ndarray]

    def ratios(self) -> dict[str, np.ndarray]:
        """All ten pairwise ratios A/B; nan where a norm vanishes (zero input)."""
        out = {}
        for a, b in combinations(FIVE, 2):
            na, nb = np.asarray(self.norms[a], float), np.asarray(self.norms[b], float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out[f"{a}/{b}"] = np.where((na > 0) & (nb > 0), na / nb, np.nan)
        return out

    def max_spread(self) -> np.ndarray:
        """Largest two-sided pairwise ratio max(A/B, B/A) per input."""
        r = np.stack([np.atleast_1d(v) for v in self.ratios().values()])
        with np.errstate(invalid="ignore"):
            return np.max(np.maximum(r, 1.0 / r), axis=0)


def five_space_report(m: DyadicMartingale, phi: mu.MusielakFunction) -> FiveSpaceTable:
    procs = hardy_processes(m)
    return FiveSpaceTable({label: mu.luxemburg_norm(phi, procs[_PROCESS_OF[label]]) for label in FIVE})


@dataclass(frozen=True)
class FiveSpaceCampaign:
    phi_spec: str
    trials: int
    seed: int
    brackets: dict[int, dict[str, tuple[float, float]]]  # resolution -> pair -> (min, max)
    drift: dict[str, float]  # pair -> spread of the bracket ends across resolutions

    @property
    def worst_drift(self) -> float:
        return max(self.drift.values())

    def stable(self, limit: float = 4.0) -> bool:
        return self.worst_drift <= limit

    def to_json(self) -> dict:
        return {"phi_spec": self.phi_spec, "trials": self.trials, "seed": self.seed,
                "brackets": {str(N): {k: list(v) for k, v in b.items()} for N, b in self.brackets.items()},
                "drift": self.drift}


def five_space_campaign(phi_spec: str, resolutions: Sequence[int] = (6, 8, 10), trials: int = 500, seed: int = 0,
                        law: str = "mixed", base_dir: str = ".", chunk: int = 100) -> FiveSpaceCampaign:
    phi = parse(phi_spec, base_dir)
    brackets: dict[int, dict[str, tuple[float, float]]] = {}
    for N in resolutions:
        collected: dict[str, list[np.ndarray]] = {}
        for start in range(0, trials, chunk):
            idx = range(start, min(start + chunk, trials))
            leaves = np.stack([gen.leaf_sample(gen.law_for_trial(law, t), N, gen.trial_rng(seed, N, t)) for t in idx])
            m = martingale_of(leaves, center=True)
            for k, v in five_space_report(m, phi).ratios().items():
                collected.setdefault(k, []).append(np.atleast_1d(v))
        brackets[N] = {}
        for k, parts in collected.items():
            v = np.concatenate(parts)
            v = v[np.isfinite(v)]
            brackets[N][k] = (float(v.min()), float(v.max()))
    drift = {}
    for k in brackets[resolutions[0]]:
        lo = np.array([brackets[N][k][0] for N in resolutions])
        hi = np.array([brackets[N][k][1] for N in resolutions])
        drift[k] = float(max(hi.max() / hi.min(), lo.max() / lo.min()))
    return FiveSpaceCampaign(phi_spec, trials, seed, brackets, drift)


# --------------------------------------------------------------------------
# convergence of Walsh-Fourier partial sums and Fejer means


LIMIT_ORDER = 1 << 60


@dataclass(frozen=True)
class ConvergenceTable:
    orders: tuple[int, ...]
    sigma_errors: tuple[float, ...]
    partial_errors: tuple[float, ...]
    norm_f: float
    limit_sigma_error: float  # at order 2^60, the stand-in for n -> infinity

    def sigma_nonincreasing(self, rtol: float = 1e-12) -> bool:
        e = np.asarray(self.sigma_errors)
        return bool(np.all(np.diff(e) <= rtol * max(self.norm_f, 1e-300)))

    def partial_nonincreasing(self, rtol: float = 1e-12) -> bool:
        e = np.asarray(self.partial_errors)
        return bool(np.all(np.diff(e) <= rtol * max(self.norm_f, 1e-300)))

    def rows(self) -> list[tuple[int, float, float]]:
        return list(zip(self.orders, self.sigma_errors, self.partial_errors))


def fejer_convergence(f, phi: mu.MusielakFunction, schedule: Optional[Sequence[int]] = None) -> ConvergenceTable:
    """Errors ||sigma_n f - f|| and ||s_n f - f|| in L^phi along ``schedule`` (default 1, 2, 4, ..., 2^N)."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    orders = [1 << k for k in range(N + 1)] if schedule is None else [int(n) for n in schedule]
    if any(n < 1 for n in orders) or any(b < a for a, b in zip(orders, orders[1:])):
        raise ValueError("schedule must be sorted with entries >= 1")
    sig = np.stack([fejer_mean(v, n) - v for n in orders])
    par = np.stack([partial_sum(v, n) - v for n in orders])
    limit = fejer_mean(v, LIMIT_ORDER) - v
    sig_err = np.atleast_1d(mu.luxemburg_norm(phi, sig))
    par_err = np.atleast_1d(mu.luxemburg_norm(phi, par))
    return ConvergenceTable(tuple(orders), tuple(float(x) for x in sig_err), tuple(float(x) for x in par_err),
                            float(mu.luxemburg_norm(phi, v)), float(mu.luxemburg_norm(phi, limit)))


# --------------------------------------------------------------------------
# atom campaigns


class AtomCampaignError(RuntimeError):
    def __init__(self, message: str, seed: int, resolution: int, trial: int):
        super().__init__(f"{message} (seed={seed}, resolution={resolution}, trial={trial})")
        self.fingerprint = {"seed": seed, "resolution": resolution, "trial": trial}


@dataclass(frozen=True)
class AtomCampaignConfig:
    kind: str
    phi_spec: str
    resolution: int = 8
    trials: int = 100
    seed: int = 0
    r: float = 1.0
    t_star: float = 1.0
    law: str = "mixed"
    base_dir: str = "."
    fejer: bool = True  # kind M only: evaluate the aggregated maximal-Fejer quantity

    def __post_init__(self):
        if self.kind not in ATOM_FUNCTIONAL:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 < self.r <= 1:
            raise ValueError("r must lie in (0, 1]")


@dataclass(frozen=True)
class AtomCampaignReport:
    kind: str
    phi_spec: str
    resolution: int
    trials: int
    r: float
    atoms_checked: int
    validation_failures: int
    reconstruction_failures: int
    worst_size_margin: float
    worst_support_error: float
    worst_reconstruction_error: float
    norm_ratio_min: float  # atomic_norm / direct Hardy norm
    norm_ratio_max: float
    s_bound_violations: Optional[int] = None
    fejer_ratio_max: Optional[float] = None
    fejer_ratio_median: Optional[float] = None
    worst_trial: int = -1
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["notes"] = list(self.notes)
        return {k: (float(v) if isinstance(v, float) and np.isfinite(v) else
                    (str(v) if isinstance(v, float) else v)) for k, v in out.items()}


def s_bound_constant(r: float) -> float:
    """2 (2^r / (2^r - 1))^{1/r}: atomic_norm of the s-decomposition over ||s(f)||."""
    return 2.0 * (2.0 ** r / (2.0 ** r - 1.0)) ** (1.0 / r)


def fejer_atom_ratio(dec, phi: mu.MusielakFunction, r: float) -> float:
    """||sum_k (mu^k)^r sigma_*(a^k)^r 1_{tau_k = inf}|| / ||sum_k 2^{kr} 1_{tau_k < inf}|| in L^{phi_{1/r}}."""
    live = [t for t in dec.triples if t.mu > 0]
    if not live:
        return np.nan
    finals = np.stack([t.atom.final for t in live])
    smax = maximal_fejer(finals)
    lhs = np.zeros(finals.shape[-1])
    rhs = np.zeros(finals.shape[-1])
    for t, s in zip(live, smax):
        off = ~t.nu.finite
        lhs += (t.mu * s) ** r * off
        rhs += 2.0 ** (t.k * r) * (~off)
    rescaled = mu.power_rescale(phi, 1.0 / r)
    num, den = mu.luxemburg_norm(rescaled, lhs), mu.luxemburg_norm(rescaled, rhs)
    return float(num / den) if den > 0 else np.nan


_DIRECT = {"s": "conditional_square", "P": "predictable_maximal", "Q": "predictable_square",
           "M": "maximal", "S": "square"}


def atom_campaign(config: AtomCampaignConfig) -> AtomCampaignReport:
    """Decompose random martingales, validate every atom and the reconstruction."""
    phi = parse(config.phi_spec, config.base_dir)
    N = config.resolution
    failures = checked = 0
    margin, support, recon = np.inf, 0.0, 0.0
    ratios, fejer = [], []
    s_viol = 0
    worst_trial, worst_margin = -1, np.inf
    for t in range(config.trials):
        leaves = gen.leaf_sample(gen.law_for_trial(config.law, t), N, gen.trial_rng(config.seed, N, t))
        m = martingale_of(leaves, center=True)
        dec = decompose(m, phi, config.kind, config.r, config.t_star, guard=False)
        masks = np.array([tr.nu.finite for tr in dec.triples], dtype=float).reshape(-1, 1 << N)
        b_norms = np.atleast_1d(mu.indicator_norm(phi, masks)) if len(masks) else []
        for triple, nb in zip(dec.triples, b_norms):
            rep = validate_atom(triple.atom, triple.nu, phi, dec.functional, b_norm=float(nb) if nb > 0 else None)
            checked += 1
            failures += not rep.passed
            support = max(support, rep.support_error)
            if rep.size_margin < worst_margin:
                worst_margin, worst_trial = rep.size_margin, t
            margin = min(margin, rep.size_margin)
        err = float(np.max(np.abs(dec.reconstruct() - m.levels), initial=0.0))
        recon = max(recon, err)
        if err > 1e-9 * max(1.0, float(np.max(np.abs(m.levels), initial=0.0))):
            raise AtomCampaignError(f"reconstruction error {err:.3e}", config.seed, N, t)
        direct = float(mu.luxemburg_norm(phi, hardy_processes(m)[_DIRECT[config.kind]]))
        if direct > 0:
            a_norm = atomic_norm(dec)
            ratios.append(a_norm / direct)
            if config.kind == "s" and a_norm > s_bound_constant(config.r) * direct * (1 + 1e-9):
                s_viol += 1
        if config.kind == "M" and config.fejer:
            q = fejer_atom_ratio(dec, phi, config.r)
            if np.isfinite(q):
                fejer.append(q)
    ratios_a = np.asarray(ratios) if ratios else np.array([np.nan])
    return AtomCampaignReport(
        config.kind, config.phi_spec, N, config.trials, config.r, checked, failures, 0, float(margin), support,
        recon, float(np.nanmin(ratios_a)), float(np.nanmax(ratios_a)),
        s_viol if config.kind == "s" else None,
        float(np.max(fejer)) if fejer else None, float(np.median(fejer)) if fejer else None, worst_trial)
