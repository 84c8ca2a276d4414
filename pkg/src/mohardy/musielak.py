"""Musielak-Orlicz functions phi(x, t), modulars and Luxemburg norms.

x-dependent families are sampled at leaf midpoints, so for weighted families
phi(., t) is exactly the leaf-constant weight times the Orlicz part. Every
"for all t" condition (types, A_q, S) is a certificate on a finite t-grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid import DyadicGrid, all_levels, resolution_of

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
WeightFn = Callable[[np.ndarray], np.ndarray]


class MusielakError(ValueError):
    pass


class ConvergenceError(MusielakError):
    pass


# --------------------------------------------------------------------------
# weights


def weight_from_values(values) -> WeightFn:
    """Piecewise-constant weight given by dyadic leaf values."""
    v = np.asarray(values, dtype=float)
    size = v.size
    resolution_of(size)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise MusielakError("weight values must be finite and nonnegative")

    def w(x):
        idx = np.clip((np.asarray(x) * size).astype(np.int64), 0, size - 1)
        return v[idx]

    return w


def power_weight(a: float, center: float = 0.0) -> WeightFn:
    """w(x) = |x - center|**a, sampled wherever it is evaluated."""

    def w(x):
        return np.abs(np.asarray(x, dtype=float) - center) ** a

    return w


def constant_weight(c: float = 1.0) -> WeightFn:
    def w(x):
        return np.full(np.shape(x), float(c))

    return w


# --------------------------------------------------------------------------
# the function object


@dataclass(frozen=True)
class MusielakFunction:
    family: str
    params: dict = field(default_factory=dict, compare=False)
    evaluator: Evaluator = field(default=None, repr=False, compare=False)
    closed_complement: Optional["MusielakFunction"] = field(default=None, repr=False, compare=False)
    type_exponents: Optional[tuple[float, float]] = None
    x_independent: bool = True
    spec: Optional[str] = None
    # raises instead of returning inf when a numeric supremum is unresolved
    strict_evaluator: Optional[Evaluator] = field(default=None, repr=False, compare=False)

    def __call__(self, x, t) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return self.evaluator(x, t)

    def on_leaves(self, t) -> np.ndarray:
        """phi(x_i, t_i) with x_i the midpoint of the leaf on the last axis."""
        t = np.asarray(t, dtype=float)
        return self(DyadicGrid(resolution_of(t.shape[-1])).midpoints, t)

    @property
    def label(self) -> str:
        if self.spec:
            return self.spec
        return self.family + (":" + ",".join(f"{k}={v}" for k, v in self.params.items()) if self.params else "")


def _pos(t):
    return np.where(t > 0, t, 0.0)


def _power_complement(p: float, coef: Callable[[np.ndarray], np.ndarray]) -> Evaluator:
    # sup_u (u t - A u^p) = (p-1) A^{-1/(p-1)} (t/p)^{p/(p-1)}
    def ev(x, t):
        A = coef(x)
        if p == 1.0:
            return np.where(t <= A, 0.0, np.inf)
        return (p - 1.0) * A ** (-1.0 / (p - 1.0)) * (_pos(t) / p) ** (p / (p - 1.0))

    return ev


def power(p: float, c: float = 1.0) -> MusielakFunction:
    """c * t**p."""
    if p <= 0 or c <= 0:
        raise MusielakError(f"power family needs p > 0 and c > 0, got p={p}, c={c}")
    comp = None
    if p >= 1:
        q = np.inf if p == 1 else p / (p - 1)
        comp = MusielakFunction("power-dual", {"p": q}, _power_complement(p, lambda x: np.full(np.shape(x), c)),
                                type_exponents=None if p == 1 else (q, q))
    return MusielakFunction("power", {"p": p, "c": c} if c != 1 else {"p": p},
                            lambda x, t: c * _pos(t) ** p, comp, (p, p), True)


def wpower(p: float, w: WeightFn, c: float = 1.0, name: str = "w") -> MusielakFunction:
    """c * w(x) * t**p."""
    if p <= 0 or c <= 0:
        raise MusielakError(f"wpower needs p > 0 and c > 0, got p={p}, c={c}")
    comp = None
    if p >= 1:
        q = np.inf if p == 1 else p / (p - 1)
        comp = MusielakFunction("wpower-dual", {"p": q, "w": name}, _power_complement(p, lambda x: c * w(x)),
                                type_exponents=None if p == 1 else (q, q), x_independent=False)
    return MusielakFunction("wpower", {"p": p, "w": name},
                            lambda x, t: c * w(x) * _pos(t) ** p, comp, (p, p), False)


def orlicz_exp() -> MusielakFunction:
    """e^t - t - 1 (no upper type)."""
    return MusielakFunction("orlicz-exp", {}, lambda x, t: np.expm1(_pos(t)) - _pos(t) + 0.0 * x, None, None, True)


def _xlogt(t):
    return np.where(t > 0, np.abs(np.log(np.where(t > 0, t, 1.0))), 0.0)


def loglow(alpha: float) -> MusielakFunction:
    """t^alpha (1 + |log t|)."""
    if alpha < 1:
        raise MusielakError(f"loglow needs alpha >= 1 for monotonicity, got {alpha}")
    return MusielakFunction("loglow", {"alpha": alpha},
                            lambda x, t: _pos(t) ** alpha * (1.0 + _xlogt(t)) + 0.0 * x, None, None, True)


def loggrow(alpha: float) -> MusielakFunction:
    """t^alpha (1 + log(1 + t))."""
    if alpha <= 0:
        raise MusielakError(f"loggrow needs alpha > 0, got {alpha}")
    return MusielakFunction("loggrow", {"alpha": alpha},
                            lambda x, t: _pos(t) ** alpha * (1.0 + np.log1p(_pos(t))) + 0.0 * x, None, None, True)


def logdamp(alpha: float) -> MusielakFunction:
    """t^alpha / log(e + t)."""
    if alpha < 1:
        raise MusielakError(f"logdamp needs alpha >= 1 for monotonicity, got {alpha}")
    return MusielakFunction("logdamp", {"alpha": alpha},
                            lambda x, t: _pos(t) ** alpha / np.log(np.e + _pos(t)) + 0.0 * x, None, None, True)


def double_phase(p: float, q: float, w: WeightFn, name: str = "w") -> MusielakFunction:
    """t^p + w(x) t^q."""
    if not 0 < p <= q:
        raise MusielakError(f"double-phase needs 0 < p <= q, got p={p}, q={q}")
    return MusielakFunction("double-phase", {"p": p, "q": q, "w": name},
                            lambda x, t: _pos(t) ** p + w(x) * _pos(t) ** q, None, None, False)


def varexp(exponent: WeightFn, name: str = "p") -> MusielakFunction:
    """t^{p(x)}."""
    return MusielakFunction("varexp", {"pfile": name}, lambda x, t: _pos(t) ** exponent(x), None, None, False)


def xlog(alpha: float, beta: float, gamma: float) -> MusielakFunction:
    """t^alpha / ((log(e + x))^beta + (log(e + t))^gamma)."""
    if alpha <= 0 or beta < 0 or gamma < 0:
        raise MusielakError(f"xlog needs alpha > 0, beta >= 0, gamma >= 0, got {alpha}, {beta}, {gamma}")

    def ev(x, t):
        tt = _pos(t)
        return tt ** alpha / (np.log(np.e + x) ** beta + np.log(np.e + tt) ** gamma)

    return MusielakFunction("xlog", {"alpha": alpha, "beta": beta, "gamma": gamma}, ev, None, None, False)


def tabulated(t_values, phi_values) -> MusielakFunction:
    """Orlicz function by linear interpolation; extrapolated linearly past the table."""
    tv = np.asarray(t_values, dtype=float)
    pv = np.asarray(phi_values, dtype=float)
    if tv.ndim != 1 or tv.shape != pv.shape or tv.size < 2:
        raise MusielakError("table needs two equal-length columns with at least two rows")
    if np.any(np.diff(tv) <= 0) or np.any(np.diff(pv) < 0) or pv[-1] <= pv[0]:
        raise MusielakError("table must be strictly increasing in t and nondecreasing in phi")
    if tv[0] != 0:
        tv, pv = np.concatenate([[0.0], tv]), np.concatenate([[0.0], pv])
    slope = (pv[-1] - pv[-2]) / (tv[-1] - tv[-2])

    def ev(x, t):
        tt = _pos(t)
        inside = np.interp(tt, tv, pv)
        return np.where(tt > tv[-1], pv[-1] + slope * (tt - tv[-1]), inside) + 0.0 * x

    return MusielakFunction("table", {"rows": int(tv.size)}, ev, None, None, True)


def power_rescale(phi: MusielakFunction, r: float) -> MusielakFunction:
    """phi_r(x, t) = phi(x, t**r)."""
    if r <= 0:
        raise MusielakError(f"rescaling exponent must be positive, got {r}")
    if r == 1:
        return phi
    if phi.family == "power":
        return power(phi.params["p"] * r, phi.params.get("c", 1.0))
    types = None if phi.type_exponents is None else (phi.type_exponents[0] * r, phi.type_exponents[1] * r)
    return MusielakFunction(f"{phi.family}^{r:g}", {**phi.params, "r": r},
                            lambda x, t: phi.evaluator(x, _pos(t) ** r), None, types, phi.x_independent,
                            None if phi.spec is None else f"{phi.spec}@r={r:g}")


# --------------------------------------------------------------------------
# modular and norm


def modular(phi: MusielakFunction, f) -> np.ndarray | float:
    v = np.abs(np.asarray(f, dtype=float))
    vals = phi.on_leaves(v)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise MusielakError(f"non-finite phi value at leaf {int(bad[-1])}")
    out = vals.mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def _raw_modular(phi: MusielakFunction, v: np.ndarray, lam: np.ndarray) -> np.ndarray:
    vals = phi.on_leaves(v / lam[..., None])
    m = vals.mean(axis=-1)
    return np.where(np.isnan(m), np.inf, m)


def luxemburg_norm(phi: MusielakFunction, f, rtol: float = 1e-10, max_iter: int = 200):
    """inf{lam > 0 : modular(f / lam) <= 1}; batched over leading axes.

    The returned value is the feasible end of the final bracket, so the
    modular there is <= 1.
    """
    v = np.abs(np.asarray(f, dtype=float))
    batch = v.shape[:-1]
    v2 = v.reshape(-1, v.shape[-1])
    out = np.zeros(v2.shape[0])
    live = np.flatnonzero(np.any(v2 > 0, axis=-1))
    if live.size:
        out[live] = _bisect_norm(phi, v2[live], rtol, max_iter)
    out = out.reshape(batch)
    return float(out) if out.ndim == 0 else out


def _bisect_norm(phi, v, rtol, max_iter):
    n = v.shape[0]
    lam = np.ones(n)
    feasible = _raw_modular(phi, v, lam) <= 1.0
    lo = np.where(feasible, np.nan, lam)
    hi = np.where(feasible, lam, np.nan)
    # grow or shrink by factors of 2 until each row is bracketed
    for _ in range(2200):
        open_lo = np.isnan(lo)
        open_hi = np.isnan(hi)
        if not (open_lo.any() or open_hi.any()):
            break
        trial = np.where(open_lo, hi / 2, np.where(open_hi, lo * 2, np.nan))
        rows = np.flatnonzero(open_lo | open_hi)
        ok = _raw_modular(phi, v[rows], trial[rows]) <= 1.0
        r_ok, r_bad = rows[ok], rows[~ok]
        lo[r_bad] = trial[r_bad]
        hi[r_ok] = trial[r_ok]
    else:
        raise ConvergenceError("could not bracket the Luxemburg norm")
    for _ in range(max_iter):
        rows = np.flatnonzero(hi - lo > rtol * hi)
        if rows.size == 0:
            return hi
        mid = 0.5 * (lo[rows] + hi[rows])
        ok = _raw_modular(phi, v[rows], mid) <= 1.0
        hi[rows[ok]] = mid[ok]
        lo[rows[~ok]] = mid[~ok]
    if np.any(hi - lo > rtol * hi):
        raise ConvergenceError(f"Luxemburg bisection did not converge in {max_iter} iterations")
    return hi


def indicator_norm(phi: MusielakFunction, mask) -> np.ndarray | float:
    return luxemburg_norm(phi, np.asarray(mask, dtype=float))


# --------------------------------------------------------------------------
# t-grids and complementary functions


@dataclass(frozen=True)
class TGrid:
    t_min: float = 1e-6
    t_max: float = 1e6
    size: int = 128

    def __post_init__(self):
        if self.t_min <= 0 or self.t_max / self.t_min < 1e6 * (1 - 1e-12) or self.size < 64:
            raise MusielakError("t-grid needs t_min > 0, t_max/t_min >= 1e6 and at least 64 points")

    @property
    def values(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.size)


class ComplementError(MusielakError):
    pass


def _legendre(phi: MusielakFunction, x: np.ndarray, t: np.ndarray, u: np.ndarray, strict: bool) -> np.ndarray:
    """max(0, sup_u (u t - phi(x, u))) on a u-grid, refined by golden section."""
    xb, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    phi_u = phi(xb[None, ...], u.reshape((-1,) + (1,) * t.ndim))  # (U, *t.shape)
    vals = u.reshape((-1,) + (1,) * t.ndim) * t[None] - phi_u
    vals = np.where(np.isnan(vals), -np.inf, vals)
    j = np.argmax(vals, axis=0)
    best = np.take_along_axis(vals, j[None], axis=0)[0]
    at_top = (j == u.size - 1) & (best > 0)
    if strict and np.any(at_top):
        raise ComplementError("supremum attained at the top of the u-grid; enlarge the grid")
    lo = u[np.clip(j - 1, 0, u.size - 1)]
    hi = u[np.clip(j + 1, 0, u.size - 1)]
    g = (np.sqrt(5.0) - 1) / 2

    def obj(uu):
        r = uu * t - phi(xb, uu)
        return np.where(np.isnan(r), -np.inf, r)

    a, b = lo.copy(), hi.copy()
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(60):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c, new_d = b - g * (b - a), a + g * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, obj(new_c), fd)
        fd_next = np.where(left, fc, obj(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    best = np.maximum(best, np.maximum(fc, fd))
    best = np.maximum(best, 0.0)
    if not strict:
        best = np.where(at_top, np.inf, best)
    return best


def complementary(phi: MusielakFunction, tgrid: TGrid = TGrid(), numeric: bool = False,
                  u_points: int = 512) -> MusielakFunction:
    """phi*(x, t) = sup_u (u t - phi(x, u)); closed form for power families."""
    if phi.closed_complement is not None and not numeric:
        return phi.closed_complement
    if phi.type_exponents is not None and phi.type_exponents[0] < 1 and phi.family in ("power", "wpower"):
        raise ComplementError("complementary function is identically infinite for exponents below 1")
    u = np.geomspace(tgrid.t_min / 100, 100 * tgrid.t_max, u_points)

    def ev(x, t):
        return _legendre(phi, np.asarray(x, dtype=float), t, u, True)

    def ev_tolerant(x, t):
        # used inside norm bisection: unresolved suprema count as infinite
        return _legendre(phi, np.asarray(x, dtype=float), t, u, False)

    return MusielakFunction(f"{phi.family}*", dict(phi.params), ev_tolerant, None, None, phi.x_independent,
                            None if phi.spec is None else f"({phi.spec})*", strict_evaluator=ev)


def evaluate_complement(star: MusielakFunction, x, t) -> np.ndarray:
    """Evaluate a complementary function, raising if the u-grid is too small."""
    if star.strict_evaluator is None:
        return star(x, t)
    return star.strict_evaluator(np.asarray(x, dtype=float), np.asarray(t, dtype=float))


# --------------------------------------------------------------------------
# type, A_q and S checks


@dataclass(frozen=True)
class TypeReport:
    side: str
    p: float
    constant: float
    divergent: bool


def _leaf_table(phi: MusielakFunction, resolution: int, t: np.ndarray) -> np.ndarray:
    x = DyadicGrid(resolution).midpoints
    return np.broadcast_to(phi(x[None, :], t[:, None]), (t.size, x.size))  # (T, leaves)


def check_uniform_type(phi: MusielakFunction, p: float, side: str = "lower", tgrid: TGrid = TGrid(),
                       resolution: int = 6, s_points: int = 64, slope_tol: float = 0.02) -> TypeReport:
    """sup phi(x, s t) / (s^p phi(x, t)) over leaves, the t-grid and an s-grid.

    ``divergent`` is set when the sampled ratio keeps growing toward the open
    end of the s-range (s -> 0 for lower, s -> infinity for upper) with a
    log-slope above ``slope_tol``, or when it is not finite.
    """
    if p <= 0:
        raise MusielakError("type exponent must be positive")
    if side == "lower":
        s = np.geomspace(1e-3, 1.0, s_points + 1)[:-1]
    elif side == "upper":
        s = np.geomspace(1.0, 1e3, s_points)
    else:
        raise MusielakError(f"side must be 'lower' or 'upper', got {side!r}")
    t = tgrid.values
    x = DyadicGrid(resolution).midpoints
    base = phi(x[None, None, :], t[None, :, None])
    if np.any(base <= 0):
        raise MusielakError("phi vanishes at some t > 0 on the grid (family defect)")
    scaled = phi(x[None, None, :], s[:, None, None] * t[None, :, None])
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = scaled / (s[:, None, None] ** p * base)
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    per_s = ratio.max(axis=(1, 2))
    const = float(per_s.max())
    if not np.isfinite(const):
        return TypeReport(side, p, np.inf, True)
    # open end of the s-range is the first entry for lower, last for upper
    tail = per_s[: s_points // 4] if side == "lower" else per_s[-(s_points // 4):][::-1]
    logs = np.log(tail)
    dlog = np.abs(np.log(s[1] / s[0]))
    slope = (logs[0] - logs[1]) / dlog
    divergent = bool(slope > slope_tol and np.all(np.diff(logs) <= 1e-12))
    return TypeReport(side, p, const, divergent)


def type_indices(phi: MusielakFunction, tgrid: TGrid = TGrid(), resolution: int = 6,
                 step: float = 0.05, p_max: float = 16.0) -> tuple[float, float]:
    """Sampled (p-, p+): largest certified lower type and smallest certified upper type.

    Known exponents of the power families are returned directly. A missing
    type is reported as 0 (lower) or inf (upper).
    """
    if phi.type_exponents is not None:
        return phi.type_exponents
    grid = np.round(np.arange(1, int(round(p_max / step)) + 1) * step, 10)
    lower = 0.0
    for p in grid:
        if check_uniform_type(phi, p, "lower", tgrid, resolution).divergent:
            break
        lower = float(p)
    upper = np.inf
    for p in grid:
        if not check_uniform_type(phi, p, "upper", tgrid, resolution).divergent:
            upper = float(p)
            break
    return lower, upper


@dataclass(frozen=True)
class WeightReport:
    q: float
    constant: float
    passed: bool


def _log_mean_exp(a: np.ndarray, n: int) -> np.ndarray:
    """log E_n exp(a) along the leaf axis, block-constant."""
    N = resolution_of(a.shape[-1])
    blocks = a.reshape(*a.shape[:-1], 1 << n, 1 << (N - n))
    m = blocks.max(axis=-1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = np.log(np.exp(blocks - m).mean(axis=-1)) + m[..., 0]
    return np.repeat(out, 1 << (N - n), axis=-1)


def check_Aq(phi: MusielakFunction, q: float, tgrid: TGrid = TGrid(), resolution: int = 6,
             k_max: float = np.inf) -> WeightReport:
    if q < 1:
        raise MusielakError("A_q needs q >= 1")
    table = _leaf_table(phi, resolution, tgrid.values)
    if np.any(table <= 0) or not np.all(np.isfinite(table)):
        raise MusielakError("A_q check needs phi finite and positive on the grid")
    logphi = np.log(table)
    worst = -np.inf
    for n in range(resolution + 1):
        first = _log_mean_exp(logphi, n)
        if q == 1:
            val = first - logphi
        else:
            a = -1.0 / (q - 1)
            val = first + (q - 1) * _log_mean_exp(a * logphi, n)
        worst = max(worst, float(val.max()))
    K = float(np.exp(worst))
    return WeightReport(float(q), K, bool(np.isfinite(K) and K <= k_max))


@dataclass(frozen=True)
class QReport:
    value: float
    passed: bool
    constant: float
    message: str = ""


def q_phi(phi: MusielakFunction, tgrid: TGrid = TGrid(), resolution: int = 6, tol: float = 1e-3,
          k_max: float = 1e6, q_hi: float = 64.0) -> QReport:
    """Sampled q(phi) = inf{q : phi in A_q} by bisection on [1, q_hi]."""
    if phi.x_independent:
        return QReport(1.0, True, 1.0)
    r1 = check_Aq(phi, 1.0, tgrid, resolution)
    if r1.constant <= k_max:
        return QReport(1.0, True, r1.constant)
    rh = check_Aq(phi, q_hi, tgrid, resolution)
    if rh.constant > k_max:
        return QReport(np.inf, False, rh.constant, "A_inf fails on sample")
    lo, hi, k_hi = 1.0, q_hi, rh.constant
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        k = check_Aq(phi, mid, tgrid, resolution).constant
        if k <= k_max:
            hi, k_hi = mid, k
        else:
            lo = mid
    return QReport(hi, True, k_hi)


@dataclass(frozen=True)
class SReport:
    constant: float
    minus: float
    plus: float


def check_S_condition(phi: MusielakFunction, tgrid: TGrid = TGrid(), resolution: int = 6) -> SReport:
    """Smallest K with phi_{n-1}/K <= phi_n <= K phi_{n-1}, phi_n = E_n phi(., t)."""
    if phi.x_independent or resolution == 0:
        return SReport(1.0, 1.0, 1.0)
    table = _leaf_table(phi, resolution, tgrid.values)
    if np.any(table <= 0):
        raise MusielakError("S condition needs phi > 0 on the grid")
    lv = all_levels(table)  # (T, N+1, leaves)
    up = lv[:, 1:, :] / lv[:, :-1, :]
    plus = float(up.max())
    minus = float((1.0 / up).max())
    return SReport(max(plus, minus), minus, plus)


def weight_S_minus(w: np.ndarray) -> float:
    """S^- constant of a leaf-valued weight: max w_{n-1} / w_n."""
    lv = all_levels(np.asarray(w, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = lv[..., :-1, :] / lv[..., 1:, :]
    return float(np.nanmax(r)) if r.size else 1.0


# --------------------------------------------------------------------------
# dual pairing


@dataclass(frozen=True)
class PairingReport:
    best: float
    upper: float
    c_report: float


def pairing(f, g) -> float:
    return float(np.mean(np.asarray(f, dtype=float) * np.asarray(g, dtype=float)))


def dual_pairing_check(phi: MusielakFunction, f, samples: int = 64, seed: int = 0,
                       tgrid: TGrid = TGrid()) -> PairingReport:
    """Best of int f g over random and Young-extremal g with ||g||_{phi*} = 1."""
    v = np.asarray(f, dtype=float)
    norm_f = luxemburg_norm(phi, v)
    if norm_f == 0:
        return PairingReport(0.0, 0.0, 1.0)
    lower, _ = type_indices(phi, tgrid)
    if lower < 1:
        raise MusielakError(f"dual pairing needs lower type >= 1 (sampled p- = {lower})")
    star = complementary(phi, tgrid)
    rng = np.random.default_rng(seed)
    cands = [np.sign(v) * rng.random(v.size) for _ in range(samples)]
    cands.append(np.sign(v) * np.abs(v))
    # Young-extremal direction: derivative of phi at |f| / ||f||
    u = np.abs(v) / norm_f
    h = 1e-6 * np.maximum(u, 1e-12)
    deriv = (phi.on_leaves(u + h) - phi.on_leaves(np.maximum(u - h, 0.0))) / (u + h - np.maximum(u - h, 0.0))
    cands.append(np.sign(v) * np.where(np.isfinite(deriv), deriv, 0.0))
    G = np.asarray(cands)
    G = G[np.any(G != 0, axis=-1)]
    norms = luxemburg_norm(star, G)
    vals = (G * v).mean(axis=-1) / norms
    best = float(np.max(vals))
    return PairingReport(best, 2.0 * norm_f, norm_f / best if best > 0 else np.inf)
