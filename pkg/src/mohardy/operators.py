"""Martingale operators on the dyadic filtration.

Operators take a :class:`DyadicMartingale` (possibly batched) and return leaf
arrays. Sums over n stop at N, which is exact since d_n = 0 beyond the grid.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .grid import (AdaptedProcess, DyadicMartingale, GridError, all_levels, block_view, cond_expect,
                   is_measurable, predictable_envelope, resolution_of, translate)
from .musielak import MusielakFunction, indicator_norm, luxemburg_norm


def maximal_levels(m: DyadicMartingale) -> np.ndarray:
    """M_n f = max_{i<=n} |f_i| for every n, shape (..., N+1, 2^N)."""
    return np.maximum.accumulate(np.abs(m.levels), axis=-2)


def doob_maximal(m: DyadicMartingale, upto: int | None = None) -> np.ndarray:
    lv = np.abs(m.levels if upto is None else m.levels[..., : upto + 1, :])
    return lv.max(axis=-2)


def variation_levels(m: DyadicMartingale, kind: str = "S") -> np.ndarray:
    """S_n or s_n for n = 0..N (zero at n = 0)."""
    d2 = m.differences ** 2  # row k-1 holds |d_k|^2
    if kind == "s":
        N = m.resolution
        d2 = np.stack([cond_expect(d2[..., k - 1, :], k - 1) for k in range(1, N + 1)], axis=-2) if N else d2
    elif kind != "S":
        raise ValueError(f"variation kind must be 'S' or 's', got {kind!r}")
    zero = np.zeros(d2.shape[:-2] + (1, d2.shape[-1]))
    return np.sqrt(np.concatenate([zero, np.cumsum(d2, axis=-2)], axis=-2))


def variation(m: DyadicMartingale, kind: str = "S", upto: int | None = None) -> np.ndarray:
    lv = variation_levels(m, kind)
    return lv[..., -1 if upto is None else upto, :]


def difference_sum(m: DyadicMartingale) -> np.ndarray:
    return np.abs(m.differences).sum(axis=-2)


@dataclass(frozen=True)
class HardyNormReport:
    maximal: float
    square: float
    conditional_square: float
    predictable_maximal: float
    predictable_square: float
    difference_sum: float

    LABELS = {"maximal": "H^M", "square": "H^S", "conditional_square": "H^s",
              "predictable_maximal": "P", "predictable_square": "Q", "difference_sum": "G"}

    def labelled(self) -> dict[str, float]:
        return {self.LABELS[k]: float(v) for k, v in asdict(self).items()}


def hardy_processes(m: DyadicMartingale) -> dict[str, np.ndarray]:
    """The six leaf functions whose phi-norms define the Hardy norms."""
    S_lv = variation_levels(m, "S")
    return {
        "maximal": doob_maximal(m),
        "square": S_lv[..., -1, :],
        "conditional_square": variation(m, "s"),
        "predictable_maximal": predictable_envelope(np.abs(m.levels)).final,
        "predictable_square": predictable_envelope(S_lv).final,
        "difference_sum": difference_sum(m),
    }


def hardy_norms(m: DyadicMartingale, phi: MusielakFunction):
    """All six norms; batched martingales give arrays in each field."""
    procs = hardy_processes(m)
    vals = {k: luxemburg_norm(phi, v) for k, v in procs.items()}
    return HardyNormReport(**vals)


def _check_adapted_bounded(v: np.ndarray, N: int) -> None:
    if np.any(np.abs(v) > 1 + 1e-12):
        raise GridError("transform multipliers must satisfy |v_k| <= 1")
    for k in range(N + 1):
        if not is_measurable(v[..., k, :], k):
            raise GridError(f"multiplier v_{k} is not F_{k}-measurable")


def martingale_transform(m: DyadicMartingale, v) -> DyadicMartingale:
    """(Tf)_n = sum_{k<=n} v_{k-1} d_k f; ``v`` holds v_0..v_N (v_N unused)."""
    vv = np.asarray(v.entries if isinstance(v, AdaptedProcess) else v, dtype=float)
    N = m.resolution
    if vv.shape[-2] == N:
        vv = np.concatenate([vv, vv[..., -1:, :]], axis=-2)
    _check_adapted_bounded(vv, N)
    incr = vv[..., :-1, :] * m.differences
    zero = np.zeros(incr.shape[:-2] + (1, incr.shape[-1]))
    return DyadicMartingale(np.concatenate([zero, np.cumsum(incr, axis=-2)], axis=-2))


def _check_nonneg(gs: np.ndarray) -> None:
    if np.any(gs < 0):
        raise GridError("inputs must be nonnegative")


def _expect_each(gs: np.ndarray, shift: int) -> np.ndarray:
    N = resolution_of(gs.shape[-1])
    return np.stack([cond_expect(gs[k], min(shift + k, N)) for k in range(gs.shape[0])])


def dual_doob_sum(gs: Sequence, shift: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(sum_k E_k g_k, sum_k g_k) with g indexed from k = shift."""
    g = np.asarray(gs, dtype=float)
    _check_nonneg(g)
    return _expect_each(g, shift).sum(axis=0), g.sum(axis=0)


def conditional_square_inputs(m: DyadicMartingale) -> np.ndarray:
    """g_k = |d_{k+1} f|^2 for k = 0..N-1 (use with shift=0)."""
    return np.moveaxis(m.differences ** 2, -2, 0)


def stein_sum(gs: Sequence, r: float, shift: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """((sum_k (E_k g_k)^r)^{1/r}, (sum_k g_k^r)^{1/r})."""
    if r <= 1:
        raise ValueError(f"Stein sums need r > 1, got {r}")
    g = np.asarray(gs, dtype=float)
    _check_nonneg(g)
    lhs = (_expect_each(g, shift) ** r).sum(axis=0) ** (1 / r)
    return lhs, (g ** r).sum(axis=0) ** (1 / r)


def vector_maximal(fs: Sequence, r: float) -> tuple[np.ndarray, np.ndarray]:
    """((sum_j M(f_j)^r)^{1/r}, (sum_j |f_j|^r)^{1/r}) with M of the uncentered martingales."""
    if r <= 1:
        raise ValueError(f"vector maximal inequality needs r > 1, got {r}")
    f = np.asarray(fs, dtype=float)
    M = np.abs(all_levels(f)).max(axis=-2)
    return (M ** r).sum(axis=0) ** (1 / r), (np.abs(f) ** r).sum(axis=0) ** (1 / r)


def weak_type_value(m: DyadicMartingale, phi: MusielakFunction) -> float:
    """sup_rho rho * ||1_{M f > rho}||_phi, exactly.

    On [v_{i-1}, v_i) the level set is {M f >= v_i} and the product grows in
    rho, so the sup is the max over distinct values v_i of v_i ||1_{Mf >= v_i}||.
    """
    M = doob_maximal(m)
    if M.ndim != 1:
        raise ValueError("weak_type_value takes a single martingale")
    vals = np.unique(M[M > 0])
    if vals.size == 0:
        return 0.0
    masks = (M[None, :] >= vals[:, None]).astype(float)
    return float(np.max(vals * indicator_norm(phi, masks)))


def _nu_average(f: np.ndarray, nu: np.ndarray, level: int) -> np.ndarray:
    """Level-`level` nu-averages of f, spread back to leaves."""
    N = resolution_of(f.shape[-1])
    num = block_view(f * nu, level).sum(axis=-1)
    den = block_view(np.broadcast_to(nu, f.shape), level).sum(axis=-1)
    return np.repeat(num / den, 1 << (N - level), axis=-1)


def _prepare(f, nu, n):
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    if not 0 <= n <= N:
        raise GridError(f"n={n} outside [0, {N}]")
    w = np.ones(v.shape[-1]) if nu is None else np.asarray(nu, dtype=float)
    if np.any(w <= 0):
        raise GridError("nu must be strictly positive")
    return v, w, N


def U_maximal(f, n: int, r: float, nu=None) -> np.ndarray:
    """sum_{j<n} 2^{(j-n)r} |nu-average of f over I + 2^{-j-1}|, I the level-n atom of x."""
    v, w, N = _prepare(f, nu, n)
    avg = _nu_average(v, w, n)
    out = np.zeros_like(v)
    for j in range(n):
        out += 2.0 ** ((j - n) * r) * np.abs(translate(avg, 1 << (N - j - 1)))
    return out


def V_maximal(f, n: int, r: float, nu=None) -> np.ndarray:
    """Double sum over j <= i < n of 2^{(j-n)r} 2^{(i-n)r} 2^{n-i} times the
    |nu-average| over the length-2^{-i} dyadic interval containing x + 2^{-j-1}."""
    v, w, N = _prepare(f, nu, n)
    out = np.zeros_like(v)
    for i in range(n):
        avg = np.abs(_nu_average(v, w, i))
        for j in range(i + 1):
            coef = 2.0 ** ((j - n) * r + (i - n) * r + (n - i))
            out += coef * translate(avg, 1 << (N - j - 1))
    return out
