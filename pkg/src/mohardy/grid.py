"""Finite dyadic filtration on [0, 1).

Everything lives at a fixed resolution ``N``: a function is a vector of
``2**N`` leaf values, leaf ``i`` standing for ``[i 2^-N, (i+1) 2^-N)``.
Level-``n`` measurable functions are constant on blocks of ``2**(N-n)``
consecutive leaves. Most helpers accept arrays with leading batch axes and
operate on the last axis.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

# Stopping-time value standing for "never stopped"; any value > N works.
INF_TIME = np.int64(1 << 30)


def max_resolution() -> int:
    return int(os.environ.get("MOHARDY_MAX_RESOLUTION", "24"))


class GridError(ValueError):
    """Raised for malformed grid data (wrong length, bad level, non-measurable maps)."""


def resolution_of(size: int) -> int:
    n = int(size).bit_length() - 1
    if size < 1 or (1 << n) != size:
        raise GridError(f"length {size} is not a power of two")
    return n


@dataclass(frozen=True)
class DyadicGrid:
    resolution: int

    def __post_init__(self):
        cap = max_resolution()
        if not 0 <= self.resolution <= cap:
            raise GridError(f"resolution {self.resolution} outside [0, {cap}]")

    @property
    def size(self) -> int:
        return 1 << self.resolution

    @property
    def leaf_measure(self) -> float:
        return 2.0 ** -self.resolution

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.size) + 0.5) / self.size

    def check_level(self, n: int) -> int:
        if not 0 <= n <= self.resolution:
            raise GridError(f"level {n} outside [0, {self.resolution}]")
        return int(n)


@dataclass(frozen=True)
class SampledFunction:
    grid: DyadicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise GridError(f"expected {self.grid.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise GridError(f"non-finite value at leaf {bad}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values) -> "SampledFunction":
        v = np.asarray(values, dtype=float)
        return cls(DyadicGrid(resolution_of(v.shape[-1])), v)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.grid.size


def _as_array(f) -> np.ndarray:
    return np.asarray(f, dtype=float)


def block_view(values: np.ndarray, n: int) -> np.ndarray:
    """Reshape the leaf axis into (2**n atoms, 2**(N-n) leaves per atom)."""
    N = resolution_of(values.shape[-1])
    return values.reshape(*values.shape[:-1], 1 << n, 1 << (N - n))


def _spread(blocks: np.ndarray, width: int) -> np.ndarray:
    return np.repeat(blocks, width, axis=-1)


def cond_expect(f, n: int) -> np.ndarray:
    """Block averages over the dyadic intervals of length 2**-n."""
    v = _as_array(f)
    N = resolution_of(v.shape[-1])
    if not 0 <= n <= N:
        raise GridError(f"level {n} outside [0, {N}]")
    return _spread(block_view(v, n).mean(axis=-1), 1 << (N - n))


def block_max(f, n: int) -> np.ndarray:
    """Smallest level-n measurable majorant of f."""
    v = _as_array(f)
    N = resolution_of(v.shape[-1])
    if not 0 <= n <= N:
        raise GridError(f"level {n} outside [0, {N}]")
    return _spread(block_view(v, n).max(axis=-1), 1 << (N - n))


def is_measurable(f, n: int, atol: float = 0.0) -> bool:
    v = _as_array(f)
    b = block_view(v, n)
    return bool(np.all(np.abs(b - b[..., :1]) <= atol))


def all_levels(f) -> np.ndarray:
    """Stack E_0 f, ..., E_N f along a new axis -2."""
    v = _as_array(f)
    N = resolution_of(v.shape[-1])
    out = np.empty(v.shape[:-1] + (N + 1, v.shape[-1]))
    out[..., N, :] = v
    # coarsen one level at a time: pairwise means of the finer level
    coarse = v
    for n in range(N - 1, -1, -1):
        coarse = 0.5 * (coarse[..., 0::2] + coarse[..., 1::2])
        out[..., n, :] = _spread(coarse, 1 << (N - n))
    return out


@dataclass(frozen=True)
class DyadicMartingale:
    """Levels f_0..f_N stored as an array of shape (..., N+1, 2**N)."""

    levels: np.ndarray = field(repr=False)

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if lv.ndim < 2:
            raise GridError("levels must have shape (..., N+1, 2**N)")
        N = resolution_of(lv.shape[-1])
        if lv.shape[-2] != N + 1:
            raise GridError(f"expected {N + 1} levels, got {lv.shape[-2]}")
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)

    @property
    def resolution(self) -> int:
        return self.levels.shape[-2] - 1

    @property
    def grid(self) -> DyadicGrid:
        return DyadicGrid(self.resolution)

    @property
    def final(self) -> np.ndarray:
        return self.levels[..., -1, :]

    @property
    def differences(self) -> np.ndarray:
        """d_1..d_N as an array of shape (..., N, 2**N); row k-1 holds d_k."""
        return np.diff(self.levels, axis=-2)

    def level(self, n: int) -> np.ndarray:
        return self.levels[..., n, :]

    def check(self, atol: float = 1e-12) -> None:
        """Verify measurability and tower consistency."""
        N = self.resolution
        scale = max(1.0, float(np.max(np.abs(self.levels), initial=0.0)))
        for n in range(N + 1):
            if not is_measurable(self.levels[..., n, :], n, atol * scale):
                raise GridError(f"level {n} is not F_{n}-measurable")
            if np.max(np.abs(cond_expect(self.final, n) - self.levels[..., n, :]), initial=0.0) > atol * scale:
                raise GridError(f"level {n} is not E_{n} of the final level")


def martingale_of(f, center: bool = True) -> DyadicMartingale:
    v = _as_array(f)
    if center:
        v = v - v.mean(axis=-1, keepdims=True)
    lv = all_levels(v)
    if center:
        lv[..., 0, :] = 0.0
    return DyadicMartingale(lv)


@dataclass(frozen=True)
class AdaptedProcess:
    """Entries x_0..x_N with x_n level-n measurable; shape (..., N+1, 2**N)."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        N = resolution_of(e.shape[-1])
        if e.shape[-2] != N + 1:
            raise GridError(f"expected {N + 1} entries, got {e.shape[-2]}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def resolution(self) -> int:
        return self.entries.shape[-2] - 1

    @property
    def final(self) -> np.ndarray:
        return self.entries[..., -1, :]

    def check(self, atol: float = 0.0) -> None:
        for n in range(self.resolution + 1):
            if not is_measurable(self.entries[..., n, :], n, atol):
                raise GridError(f"entry {n} is not F_{n}-measurable")


def predictable_envelope(x) -> AdaptedProcess:
    """Pointwise-minimal nondecreasing adapted lambda with lambda_{n-1} >= x_n.

    ``x`` holds x_0..x_N (x_0 is ignored). The result has lambda_N = lambda_{N-1}.
    """
    e = np.asarray(x.entries if isinstance(x, AdaptedProcess) else x, dtype=float)
    if np.any(e[..., 1:, :] < 0):
        raise GridError("predictable_envelope needs nonnegative input")
    N = e.shape[-2] - 1
    lam = np.zeros_like(e)
    if N == 0:
        return AdaptedProcess(lam)
    current = block_max(e[..., 1, :], 0)
    lam[..., 0, :] = current
    for n in range(1, N):
        current = np.maximum(current, block_max(e[..., n + 1, :], n))
        lam[..., n, :] = current
    lam[..., N, :] = current
    return AdaptedProcess(lam)


@dataclass(frozen=True)
class StoppingTimeMap:
    """Leaf-indexed stopping time with values in {0..N} and INF_TIME for infinity."""

    tau: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.tau, dtype=np.int64)
        t = np.where(t > resolution_of(t.shape[-1]), INF_TIME, t)
        t.setflags(write=False)
        object.__setattr__(self, "tau", t)

    @property
    def resolution(self) -> int:
        return resolution_of(self.tau.shape[-1])

    @property
    def finite(self) -> np.ndarray:
        """Indicator of B = {tau < infinity}."""
        return self.tau <= self.resolution

    @classmethod
    def constant(cls, value: int | float, resolution: int) -> "StoppingTimeMap":
        v = INF_TIME if value == np.inf or value > resolution else int(value)
        return cls(np.full(1 << resolution, v, dtype=np.int64))


def validate_stopping_time(tau) -> StoppingTimeMap:
    """Accept a raw map (use np.inf or any value > N for infinity) if {tau = n} is F_n-measurable."""
    raw = np.asarray(tau, dtype=float)
    N = resolution_of(raw.shape[-1])
    if np.any(raw < 0) or np.any((raw != np.floor(raw)) & np.isfinite(raw)):
        raise GridError("stopping time values must be nonnegative integers or infinity")
    t = np.where(raw > N, INF_TIME, raw).astype(np.int64)
    for n in range(N + 1):
        ind = block_view((t == n).astype(float), n)
        mixed = np.flatnonzero(np.any(ind != ind[..., :1], axis=-1).reshape(-1))
        if mixed.size:
            atom = int(mixed[0])
            raise GridError(f"{{tau={n}}} is not F_{n}-measurable: splits level-{n} atom {atom}")
    return StoppingTimeMap(t)


def stopped(m: DyadicMartingale, nu: StoppingTimeMap) -> DyadicMartingale:
    """Levels f_{nu ^ n}."""
    N = m.resolution
    if nu.resolution != N:
        raise GridError(f"grid mismatch: martingale N={N}, stopping time N={nu.resolution}")
    n = np.arange(N + 1)[:, None]
    idx = np.minimum(nu.tau[None, :], n)  # (N+1, 2^N)
    lv = np.take_along_axis(m.levels, np.broadcast_to(idx, m.levels.shape), axis=-2)
    return DyadicMartingale(lv)


def dyadic_add(i, j, grid: DyadicGrid | None = None):
    """x + t in the dyadic group, on leaf indices: bitwise xor."""
    a, b = np.asarray(i), np.asarray(j)
    if grid is not None:
        for v in (a, b):
            if np.any((v < 0) | (v >= grid.size)):
                raise GridError(f"leaf index out of range for N={grid.resolution}")
    out = np.bitwise_xor(a, b)
    return int(out) if out.ndim == 0 else out


def translate_set(leaves: Iterable[int], t: int) -> set[int]:
    return {int(i) ^ int(t) for i in leaves}


def translate(f, t: int) -> np.ndarray:
    """g(x) = f(x + t) for a leaf offset t."""
    v = _as_array(f)
    idx = np.arange(v.shape[-1]) ^ int(t)
    return v[..., idx]


def indicator(leaves: Iterable[int], grid: DyadicGrid) -> np.ndarray:
    out = np.zeros(grid.size)
    out[list(leaves)] = 1.0
    return out
