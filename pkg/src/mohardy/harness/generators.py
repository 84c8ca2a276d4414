"""Seeded random inputs for the verification campaigns.

Every trial draws from its own stream ``default_rng([seed, resolution, trial])``
so batched, serial and parallel runs see the same inputs.
"""

from __future__ import annotations

import numpy as np

from ..grid import INF_TIME, DyadicMartingale, StoppingTimeMap, cond_expect, martingale_of

LAWS = ("bounded", "gaussian", "heavy", "sparse")


def trial_rng(seed: int, resolution: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, resolution, trial])


def leaf_sample(law: str, resolution: int, rng: np.random.Generator) -> np.ndarray:
    size = 1 << resolution
    if law == "bounded":
        return rng.uniform(-1.0, 1.0, size)
    if law == "gaussian":
        return rng.standard_normal(size)
    if law == "heavy":
        return np.clip(rng.standard_t(3, size), -1e3, 1e3)
    if law == "sparse":
        out = np.zeros(size)
        count = int(rng.integers(1, max(2, size // 16) + 1))
        where = rng.choice(size, count, replace=False)
        out[where] = rng.standard_normal(count) * 10.0 ** rng.uniform(0, 2, count)
        return out
    raise ValueError(f"unknown law {law!r}; expected one of {', '.join(LAWS)}")


def law_for_trial(law: str, trial: int) -> str:
    """'mixed' cycles through the four laws by trial index."""
    return LAWS[trial % len(LAWS)] if law == "mixed" else law


def generate_martingale(law: str, resolution: int, seed: int | np.random.Generator = 0) -> DyadicMartingale:
    """Centered martingale (f_0 = 0) from iid leaf samples of the given law."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return martingale_of(leaf_sample(law, resolution, rng), center=True)


def martingale_batch(law: str, resolution: int, trials: int, seed: int) -> DyadicMartingale:
    leaves = np.stack([leaf_sample(law_for_trial(law, t), resolution, trial_rng(seed, resolution, t))
                       for t in range(trials)])
    return martingale_of(leaves, center=True)


def function_batch(law: str, resolution: int, trials: int, seed: int, stream: int = 0) -> np.ndarray:
    """Uncentered leaf functions, one per trial; ``stream`` separates draws of one trial."""
    return np.stack([leaf_sample(law_for_trial(law, t), resolution,
                                 np.random.default_rng([seed, resolution, t, stream]))
                     for t in range(trials)])


def nonnegative_sequence(resolution: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` spiky nonnegative leaf functions g_k, shape (count, 2^N)."""
    size = 1 << resolution
    mags = np.exp(rng.normal(0.0, 1.5, (count, size)))
    keep = rng.random((count, size)) < rng.uniform(0.05, 1.0, (count, 1))
    return mags * keep


def adapted_multipliers(resolution: int, rng: np.random.Generator) -> np.ndarray:
    """v_0..v_N with v_k F_k-measurable and |v_k| <= 1, shape (N+1, 2^N)."""
    rows = [np.repeat(rng.uniform(-1.0, 1.0, 1 << k), 1 << (resolution - k)) for k in range(resolution + 1)]
    return np.stack(rows)


def random_stopping_time(resolution: int, rng: np.random.Generator, p_stop: float = 0.3) -> StoppingTimeMap:
    """Stop on each still-running level-n atom with probability ``p_stop``."""
    size = 1 << resolution
    tau = np.full(size, INF_TIME, dtype=np.int64)
    for n in range(resolution + 1):
        coin = np.repeat(rng.random(1 << n) < p_stop, 1 << (resolution - n))
        tau = np.where((tau == INF_TIME) & coin, n, tau)
    return StoppingTimeMap(tau)


def random_stopped_set(nu: StoppingTimeMap, rng: np.random.Generator) -> np.ndarray:
    """Random A with A ∩ {nu = n} in F_n (and any subset of {nu = inf})."""
    N = nu.resolution
    size = 1 << N
    A = np.zeros(size, dtype=bool)
    for n in range(N + 1):
        pick = np.repeat(rng.random(1 << n) < 0.5, 1 << (N - n))
        A |= pick & (nu.tau == n)
    A |= (rng.random(size) < 0.5) & ~nu.finite
    return A


def doubling_weight(resolution: int, rng: np.random.Generator, spread: float = 0.5) -> np.ndarray:
    """Multiplicative cascade: each split sends (1 + d, 1 - d) to the children, |d| <= spread < 1.

    The result is a positive weight whose level averages satisfy the two-sided
    S condition with constant 1 / (1 - spread).
    """
    if not 0 <= spread < 1:
        raise ValueError("spread must lie in [0, 1)")
    w = np.ones(1)
    for _ in range(resolution):
        d = rng.uniform(-spread, spread, w.size)
        w = np.stack([w * (1 + d), w * (1 - d)], axis=-1).reshape(-1)
    return w


def power_weight_values(resolution: int, exponent: float = -0.4) -> np.ndarray:
    """Leaf values of x^exponent at the midpoints."""
    size = 1 << resolution
    return ((np.arange(size) + 0.5) / size) ** exponent


def is_centered(m: DyadicMartingale) -> bool:
    return bool(np.all(m.levels[..., 0, :] == 0.0)) and np.allclose(cond_expect(m.final, 0), 0.0, atol=1e-12)
