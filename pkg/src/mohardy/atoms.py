"""Constructive atomic decompositions, weighted stopping times and the Davis split.

Atoms are a^k = (f^{nu^{k+1}} - f^{nu^k}) / mu^k with stopping times nu^k
nondecreasing in k, so the telescoping sum over the k-range reconstructs f.
The k-range runs from floor(log2 of the smallest positive value the stopping
process takes at any level) - 1 up to ceil(log2 of its maximum); below that
range every stopped martingale vanishes and above it nu = infinity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import (INF_TIME, AdaptedProcess, DyadicMartingale, GridError, StoppingTimeMap, block_view,
                   cond_expect, martingale_of, predictable_envelope, resolution_of, stopped,
                   validate_stopping_time)
from .musielak import MusielakFunction, indicator_norm, luxemburg_norm, weight_S_minus
from .operators import doob_maximal, maximal_levels, variation, variation_levels

# which size functional an atom of each decomposition kind is measured with
ATOM_FUNCTIONAL = {"s": "s", "P": "M", "Q": "S", "M": "M", "S": "S"}


class AtomError(RuntimeError):
    pass


@dataclass(frozen=True)
class AtomTriple:
    k: int
    mu: float
    atom: DyadicMartingale = field(repr=False)
    nu: StoppingTimeMap = field(repr=False)


@dataclass(frozen=True)
class AtomicDecomposition:
    kind: str
    triples: tuple[AtomTriple, ...]
    phi: MusielakFunction = field(repr=False)
    r: float = 1.0
    resolution: int = 0

    @property
    def functional(self) -> str:
        return ATOM_FUNCTIONAL[self.kind]

    def reconstruct(self) -> np.ndarray:
        """sum_k mu^k a^k as levels (N+1, 2^N)."""
        out = np.zeros((self.resolution + 1, 1 << self.resolution))
        for t in self.triples:
            out += t.mu * t.atom.levels
        return out


def functional_of(a: DyadicMartingale, kind: str) -> np.ndarray:
    if kind == "M":
        return doob_maximal(a)
    if kind in ("S", "s"):
        return variation(a, kind)
    raise ValueError(f"unknown atom functional {kind!r}")


@dataclass(frozen=True)
class AtomReport:
    passed: bool
    support_error: float
    size_margin: float


def validate_atom(a: DyadicMartingale, nu: StoppingTimeMap, phi: MusielakFunction, kind: str,
                  tol: float = 1e-9, b_norm: Optional[float] = None) -> AtomReport:
    """(i) a_n = 0 on {nu >= n}; (ii) functional on B = {nu < inf} <= 1 / ||1_B||.

    size_margin = bound - sup_B functional (>= 0 when (ii) holds; inf if B empty).
    """
    N = a.resolution
    n = np.arange(N + 1)[:, None]
    inactive = nu.tau[None, :] >= n
    support_error = float(np.max(np.abs(a.levels) * inactive, initial=0.0))
    B = nu.finite
    if not B.any():
        return AtomReport(support_error <= tol, support_error, np.inf)
    norm_B = indicator_norm(phi, B) if b_norm is None else b_norm
    bound = 1.0 / norm_B
    size = float(functional_of(a, kind)[B].max())
    margin = bound - size
    ok = support_error <= tol and margin >= -tol * max(1.0, bound)
    return AtomReport(bool(ok), support_error, margin)


def _first_exceed(rows: np.ndarray, lam: float) -> np.ndarray:
    """Smallest row index n with rows[n] > lam at each leaf, INF_TIME if none."""
    hit = rows > lam
    first = np.argmax(hit, axis=0)
    return np.where(hit.any(axis=0), first, INF_TIME).astype(np.int64)


def _k_range(process: np.ndarray) -> tuple[int, int] | None:
    pos = process[process > 0]
    if pos.size == 0:
        return None
    return int(np.floor(np.log2(pos.min()))) - 1, int(np.ceil(np.log2(pos.max())))


def _assemble(m: DyadicMartingale, phi: MusielakFunction, kind: str, ks: range, taus: list[np.ndarray],
              scale: float, r: float, guard: bool = True) -> AtomicDecomposition:
    """Build triples from nu^k (k in ks) and nu^{k_max+1}; mu^k = scale * 2^k * ||1_B||."""
    nus = [validate_stopping_time(np.where(t >= INF_TIME, np.inf, t)) for t in taus]
    masks = np.array([nu.finite for nu in nus[:-1]], dtype=float)
    norms = np.atleast_1d(indicator_norm(phi, masks))
    stops = [stopped(m, nu).levels for nu in nus]
    triples = []
    for i, k in enumerate(ks):
        mu = scale * 2.0 ** k * float(norms[i])
        diff = stops[i + 1] - stops[i]
        atom = DyadicMartingale(diff / mu if mu > 0 else np.zeros_like(diff))
        triples.append(AtomTriple(k, mu, atom, nus[i]))
    dec = AtomicDecomposition(kind, tuple(triples), phi, r, m.resolution)
    if guard:
        _guard(dec, m, norms)
    return dec


def _guard(dec: AtomicDecomposition, m: DyadicMartingale, norms) -> None:
    for t, nb in zip(dec.triples, norms):
        rep = validate_atom(t.atom, t.nu, dec.phi, dec.functional, b_norm=float(nb) if nb > 0 else None)
        if not rep.passed:
            raise AtomError(f"atom at k={t.k} failed validation: {rep}")
    err = np.max(np.abs(dec.reconstruct() - m.levels), initial=0.0)
    if err > 1e-9 * max(1.0, float(np.max(np.abs(m.levels), initial=0.0))):
        raise AtomError(f"reconstruction error {err:.3e}")


def _empty(kind, phi, r, m):
    return AtomicDecomposition(kind, (), phi, r, m.resolution)


def s_atomic_decompose(m: DyadicMartingale, phi: MusielakFunction, r: float = 1.0,
                       guard: bool = True) -> AtomicDecomposition:
    """nu^k = inf{n >= 0 : s_{n+1}(f) > 2^k}, mu^k = 2^{k+1} ||1_{B_k}||."""
    s_lv = variation_levels(m, "s")  # s_0..s_N
    rows = s_lv[1:]  # row n holds s_{n+1}
    rng = _k_range(rows)
    if rng is None:
        return _empty("s", phi, r, m)
    ks = range(rng[0], rng[1] + 1)
    taus = [_first_exceed(rows, 2.0 ** k) for k in range(rng[0], rng[1] + 2)]
    return _assemble(m, phi, "s", ks, taus, 2.0, r, guard)


def pq_atomic_decompose(m: DyadicMartingale, phi: MusielakFunction, kind: str = "P",
                        r: float = 1.0, guard: bool = True) -> AtomicDecomposition:
    """nu^k = inf{n >= 0 : lambda_n > 2^k} for the optimal predictable envelope lambda.

    Kind P (envelope of |f_n|) uses mu^k = 3 * 2^k ||1_B|| so that the stopped
    values |f^{nu^k}| <= 2^k and |f^{nu^{k+1}}| <= 2^{k+1} give an M-atom.
    Kind Q (envelope of S_n f) uses mu^k = 2^{k+1} ||1_B||.
    """
    if kind == "P":
        lam = predictable_envelope(np.abs(m.levels)).entries
        scale = 3.0
    elif kind == "Q":
        lam = predictable_envelope(variation_levels(m, "S")).entries
        scale = 2.0
    else:
        raise ValueError(f"kind must be 'P' or 'Q', got {kind!r}")
    rng = _k_range(lam)
    if rng is None:
        return _empty(kind, phi, r, m)
    ks = range(rng[0], rng[1] + 1)
    taus = [_first_exceed(lam, 2.0 ** k) for k in range(rng[0], rng[1] + 2)]
    return _assemble(m, phi, kind, ks, taus, scale, r, guard)


def weighted_stopping_time(gamma, w, lam: float, K: Optional[float] = None, R: float = 2.0) -> StoppingTimeMap:
    """tau = inf{n >= 0 : x in G_{n+1}},
    G_n = {E_{n-1}(1_{gamma_n > lam} w) / w_{n-1} >= 1/(R K)}.

    K defaults to the S^- constant of the leaf weight w (max w_{n-1} / w_n).
    """
    g = np.asarray(gamma.entries if isinstance(gamma, AdaptedProcess) else gamma, dtype=float)
    w = np.asarray(w, dtype=float)
    N = g.shape[-2] - 1
    if np.any(w <= 0):
        raise GridError("weight must be strictly positive")
    if lam <= np.max(np.abs(g[0])):
        raise GridError(f"lambda={lam} must exceed sup |gamma_0| = {np.max(np.abs(g[0]))}")
    if K is None:
        K = weight_S_minus(w)
    threshold = (1.0 - 1e-12) / (R * K)
    tau = np.full(w.shape, INF_TIME, dtype=np.int64)
    for n in range(1, N + 1):
        ratio = cond_expect((g[n] > lam) * w, n - 1) / cond_expect(w, n - 1)
        in_G = ratio >= threshold
        tau = np.where((tau == INF_TIME) & in_G, n - 1, tau)
    return StoppingTimeMap(tau)


@dataclass(frozen=True)
class StoppingCheck:
    inclusion: bool  # {M gamma > lam} inside {tau < inf}
    bounded: bool  # sup_{n <= tau} gamma_n <= lam
    weighted: bool  # w(tau < inf) <= R K w(M gamma > lam)
    weighted_ratio: float


def check_stopping_time(gamma, w, lam: float, tau: StoppingTimeMap, K: Optional[float] = None,
                        R: float = 2.0) -> StoppingCheck:
    g = np.asarray(gamma.entries if isinstance(gamma, AdaptedProcess) else gamma, dtype=float)
    w = np.asarray(w, dtype=float)
    if K is None:
        K = weight_S_minus(w)
    N = g.shape[-2] - 1
    big = g.max(axis=0) > lam
    finite = tau.finite
    upto = np.arange(N + 1)[:, None] <= tau.tau[None, :]
    bounded = bool(np.all(np.where(upto, g, -np.inf).max(axis=0) <= lam))
    lhs = float(np.mean(w * finite))
    rhs = float(np.mean(w * big))
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    return StoppingCheck(bool(np.all(finite[big])), bounded, lhs <= R * K * rhs * (1 + 1e-12), ratio)


def maximal_atomic_decompose(m: DyadicMartingale, phi: MusielakFunction, kind: str = "M", t_star: float = 1.0,
                             r: float = 1.0, guard: bool = True) -> AtomicDecomposition:
    """Stopping times from the weighted lemma at lambda = 2^k with w = phi(., t_star);
    mu^k = 3 * 2^k ||1_B||."""
    if kind == "M":
        gamma = np.abs(m.levels)
    elif kind == "S":
        gamma = variation_levels(m, "S")
    else:
        raise ValueError(f"kind must be 'M' or 'S', got {kind!r}")
    w = phi.on_leaves(np.full(1 << m.resolution, float(t_star)))
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise GridError(f"construction weight phi(., {t_star}) must be finite and positive")
    K = weight_S_minus(w)
    rng = _k_range(gamma)
    if rng is None:
        return _empty(kind, phi, r, m)
    ks = range(rng[0], rng[1] + 1)
    taus = [weighted_stopping_time(gamma, w, 2.0 ** k, K).tau for k in range(rng[0], rng[1] + 2)]
    return _assemble(m, phi, kind, ks, taus, 3.0, r, guard)


def decompose(m: DyadicMartingale, phi: MusielakFunction, kind: str, r: float = 1.0,
              t_star: float = 1.0, guard: bool = True) -> AtomicDecomposition:
    """Dispatch on kind; ``guard=False`` skips the built-in validation so callers can count failures."""
    if kind == "s":
        return s_atomic_decompose(m, phi, r, guard)
    if kind in ("P", "Q"):
        return pq_atomic_decompose(m, phi, kind, r, guard)
    if kind in ("M", "S"):
        return maximal_atomic_decompose(m, phi, kind, t_star, r, guard)
    raise ValueError(f"unknown decomposition kind {kind!r}")


def aggregate(dec: AtomicDecomposition) -> np.ndarray:
    """(sum_k [mu^k 1_{B_k} / ||1_{B_k}||]^r)^{1/r} on the leaves."""
    N = dec.resolution
    total = np.zeros(1 << N)
    live = [t for t in dec.triples if t.mu > 0]
    if not live:
        return total
    masks = np.array([t.nu.finite for t in live], dtype=float)
    norms = np.atleast_1d(indicator_norm(dec.phi, masks))
    for t, mask, nb in zip(live, masks, norms):
        total += (t.mu * mask / nb) ** dec.r
    return total ** (1.0 / dec.r)


def atomic_norm(dec: AtomicDecomposition) -> float:
    return float(luxemburg_norm(dec.phi, aggregate(dec)))


# --------------------------------------------------------------------------
# Davis decomposition


@dataclass(frozen=True)
class DavisPair:
    h: DyadicMartingale = field(repr=False)
    g: DyadicMartingale = field(repr=False)
    lam: AdaptedProcess = field(repr=False)


def davis_decompose(m: DyadicMartingale, kind: str = "S") -> DavisPair:
    """Split d_k on {lambda_k > 2 lambda_{k-1}} (h) and its complement (g), each compensated.

    Kind S uses lambda_n = S_n f; kind M uses lambda_n = 2 M_n f, which keeps
    |d_k| <= lambda_k as the split requires.
    """
    if kind == "S":
        lam = variation_levels(m, "S")
    elif kind == "M":
        lam = 2.0 * maximal_levels(m)
    else:
        raise ValueError(f"kind must be 'S' or 'M', got {kind!r}")
    N = m.resolution
    d = m.differences
    big = lam[..., 1:, :] > 2.0 * lam[..., :-1, :]
    dh = np.zeros_like(d)
    dg = np.zeros_like(d)
    for k in range(1, N + 1):
        part = d[..., k - 1, :] * big[..., k - 1, :]
        rest = d[..., k - 1, :] - part
        dh[..., k - 1, :] = part - cond_expect(part, k - 1)
        dg[..., k - 1, :] = rest - cond_expect(rest, k - 1)
    zero = np.zeros(d.shape[:-2] + (1, d.shape[-1]))
    h = DyadicMartingale(np.concatenate([zero, np.cumsum(dh, axis=-2)], axis=-2))
    g = DyadicMartingale(np.concatenate([zero, np.cumsum(dg, axis=-2)], axis=-2))
    return DavisPair(h, g, AdaptedProcess(lam))


@dataclass(frozen=True)
class DavisCheck:
    split_error: float
    jump_slack: float  # min over n of 2 lam_n + 2 sum E_{k-1}(lam_k - lam_{k-1}) - sum |d_k h|
    small_slack: float  # min over k of 4 lam_{k-1} - |d_k g|


def check_davis(m: DyadicMartingale, pair: DavisPair) -> DavisCheck:
    lam = pair.lam.entries
    N = m.resolution
    split = float(np.max(np.abs(pair.h.levels + pair.g.levels - m.levels), initial=0.0))
    inc = np.diff(lam, axis=-2)
    comp = np.stack([cond_expect(inc[..., k - 1, :], k - 1) for k in range(1, N + 1)], axis=-2) if N else inc
    bound = 2 * lam[..., 1:, :] + 2 * np.cumsum(comp, axis=-2)
    used = np.cumsum(np.abs(pair.h.differences), axis=-2)
    jump = float(np.min(bound - used, initial=np.inf))
    small = float(np.min(4 * lam[..., :-1, :] - np.abs(pair.g.differences), initial=np.inf))
    return DavisCheck(split, jump, small)


# --------------------------------------------------------------------------
# localization on F_nu-measurable sets


def is_stopped_measurable(A, nu: StoppingTimeMap) -> bool:
    """A intersect {nu < n} in F_{n-1} for n = 1..N."""
    a = np.asarray(A, dtype=bool)
    N = nu.resolution
    for n in range(1, N + 1):
        piece = (a & (nu.tau < n)).astype(float)
        b = block_view(piece, n - 1)
        if np.any(b != b[..., :1]):
            return False
    return True


@dataclass(frozen=True)
class LocalizationReport:
    passed: bool
    max_error: float


def atom_localization_check(kind: str, a: DyadicMartingale, nu: StoppingTimeMap, A,
                            tol: float = 1e-12) -> LocalizationReport:
    """Compare T(a 1_A) with T(a) 1_A pointwise for T in {S, s, M}."""
    mask = np.asarray(A, dtype=bool)
    if not is_stopped_measurable(mask, nu):
        raise GridError("A is not measurable with respect to the stopped sigma-algebra")
    localized = martingale_of(a.final * mask, center=False)
    lhs = functional_of(localized, kind)
    rhs = functional_of(a, kind) * mask
    err = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(rhs), initial=0.0)))
    return LocalizationReport(err <= tol * scale, err)


# --------------------------------------------------------------------------
# JSON export


def decomposition_to_json(dec: AtomicDecomposition) -> dict:
    def enc_nu(nu):
        return [None if t >= INF_TIME else int(t) for t in nu.tau]

    return {
        "kind": dec.kind,
        "r": dec.r,
        "phi": dec.phi.label,
        "resolution": dec.resolution,
        "triples": [{"k": t.k, "mu": t.mu, "nu": enc_nu(t.nu), "atom_final": [float(v) for v in t.atom.final]}
                    for t in dec.triples],
    }


def decomposition_from_json(obj: dict, phi: MusielakFunction) -> AtomicDecomposition:
    triples = []
    for t in obj["triples"]:
        nu = validate_stopping_time([np.inf if v is None else v for v in t["nu"]])
        triples.append(AtomTriple(int(t["k"]), float(t["mu"]),
                                  martingale_of(np.asarray(t["atom_final"], dtype=float), center=False), nu))
    N = int(obj.get("resolution", resolution_of(len(obj["triples"][0]["nu"])) if obj["triples"] else 0))
    return AtomicDecomposition(obj["kind"], tuple(triples), phi, float(obj["r"]), N)


def dumps(dec: AtomicDecomposition) -> str:
    return json.dumps(decomposition_to_json(dec))
