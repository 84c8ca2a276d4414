"""Walsh-Paley system on the dyadic grid.

Paley order: w_n = prod_k r_k^{n_k} with r_k(x) = r(2^k x). The binary digit
x_k of a point sits in bit N-1-k of its leaf index, so
w_n(leaf i) = (-1)^{popcount(n & bitrev_N(i))}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridError, all_levels, resolution_of, translate


def _bitrev(i: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros_like(i)
    for b in range(N):
        out |= ((i >> b) & 1) << (N - 1 - b)
    return out


def rademacher(n: int, N: int) -> np.ndarray:
    if not 0 <= n < N:
        raise GridError(f"r_{n} is not resolvable at resolution {N}")
    i = np.arange(1 << N)
    return 1.0 - 2.0 * ((i >> (N - 1 - n)) & 1)


def walsh_rows(ks, N: int) -> np.ndarray:
    """Rows w_k on the leaves for the given orders (int8 matrix)."""
    k = np.asarray(ks, dtype=np.int64)
    rev = _bitrev(np.arange(1 << N, dtype=np.int64), N)
    par = np.bitwise_count(k[..., None] & rev) & 1
    return (1 - 2 * par).astype(np.int8)


def walsh(n: int, N: int) -> np.ndarray:
    if not 0 <= n < (1 << N):
        raise GridError(f"w_{n} is not resolvable at resolution {N}")
    return walsh_rows(n, N).astype(float)


def _butterflies(v: np.ndarray, N: int) -> np.ndarray:
    """Apply the 2-point transform along each of the N binary axes."""
    batch = v.shape[:-N] if N else v.shape
    for ax in range(len(batch), len(batch) + N):
        a = np.take(v, 0, axis=ax)
        b = np.take(v, 1, axis=ax)
        v = np.stack([a + b, a - b], axis=ax)
    return v


def analyze(f) -> np.ndarray:
    """Walsh-Fourier coefficients in Paley order; batched over leading axes."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    batch = v.shape[:-1]
    if N == 0:
        return v.copy()
    # axis a of the binary reshape is the digit x_a of the point
    cube = _butterflies(v.reshape(batch + (2,) * N), N)
    # axis a now carries bit n_a of the order; reverse so bit 0 is fastest
    order = tuple(range(len(batch))) + tuple(range(len(batch) + N - 1, len(batch) - 1, -1))
    return cube.transpose(order).reshape(v.shape) / v.shape[-1]


def synthesize(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    N = resolution_of(c.shape[-1])
    batch = c.shape[:-1]
    if N == 0:
        return c.copy()
    order = tuple(range(len(batch))) + tuple(range(len(batch) + N - 1, len(batch) - 1, -1))
    cube = c.reshape(batch + (2,) * N).transpose(order)
    return _butterflies(cube, N).reshape(c.shape)


def naive_analyze(f) -> np.ndarray:
    """O(4^N) inner products, row block by row block."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    size = 1 << N
    out = np.empty_like(v)
    for start in range(0, size, 256):
        ks = np.arange(start, min(start + 256, size))
        out[..., ks] = v @ walsh_rows(ks, N).T.astype(float) / size
    return out


def parseval_gap(f, coeffs) -> float:
    v = np.asarray(f, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    energy = np.mean(v * v, axis=-1)
    gap = np.abs(energy - np.sum(c * c, axis=-1)) / np.maximum(energy, 1e-300)
    return float(np.max(np.where(energy > 0, gap, np.abs(np.sum(c * c, axis=-1)))))


@dataclass(frozen=True)
class Kernel:
    kind: str
    order: int
    values: np.ndarray = field(repr=False)


def _check_order(n: int, N: int) -> None:
    if not 1 <= n <= (1 << N):
        raise GridError(f"kernel order {n} outside [1, {1 << N}]")


def dirichlet_kernel(n: int, N: int) -> Kernel:
    _check_order(n, N)
    c = (np.arange(1 << N) < n).astype(float)
    return Kernel("dirichlet", n, synthesize(c))


def dirichlet_dyadic(k: int, N: int) -> np.ndarray:
    """Closed form of D_{2^k}: 2^k on [0, 2^-k), zero elsewhere."""
    out = np.zeros(1 << N)
    out[: 1 << (N - k)] = 2.0 ** k
    return out


def fejer_kernel(n: int, N: int) -> Kernel:
    """K_n = (1/n) sum_{k<=n} D_k = sum_{j<n} (1 - j/n) w_j."""
    _check_order(n, N)
    j = np.arange(1 << N)
    c = np.where(j < n, 1.0 - j / n, 0.0)
    return Kernel("fejer", n, synthesize(c))


def fejer_dyadic_closed(m: int, N: int) -> np.ndarray:
    """K_{2^m} = 1/2 [2^-m D_{2^m}(x) + sum_{j=0}^{m} 2^{j-m} D_{2^m}(x + 2^{-j-1})]."""
    if not 0 <= m <= N:
        raise GridError(f"m={m} outside [0, {N}]")
    D = dirichlet_dyadic(m, N)
    out = 2.0 ** -m * D
    for j in range(m + 1):
        # a shift by 2^{-j-1} finer than the grid fixes leaf-constant functions
        shifted = translate(D, 1 << (N - j - 1)) if j < N else D
        out = out + 2.0 ** (j - m) * shifted
    return 0.5 * out


def fejer_bound(n: int, N: int) -> np.ndarray:
    """Pointwise majorant of |K_n| for 2^{B-1} <= n < 2^B (B <= N)."""
    if n < 1:
        raise GridError("kernel order must be >= 1")
    B = int(n).bit_length()
    if B > N:
        raise GridError(f"bound for n={n} needs resolution >= {B}")
    out = np.zeros(1 << N)
    for j in range(B):
        for i in range(j, B):
            D = dirichlet_dyadic(i, N)
            out += 2.0 ** (j - B) * (D + translate(D, 1 << (N - j - 1)))
    return out


def partial_sum(f, n: int) -> np.ndarray:
    """s_n f = sum_{k<n} fhat(k) w_k; n >= 2^N gives f."""
    v = np.asarray(f, dtype=float)
    if n >= v.shape[-1]:
        return v.copy()
    if n < 0:
        raise GridError("partial sum order must be >= 0")
    c = analyze(v)
    c[..., n:] = 0.0
    return synthesize(c)


def dyadic_convolve(f, kernel) -> np.ndarray:
    """int f(t) K(x + t) dt on leaves, by direct summation (O(4^N))."""
    v = np.asarray(f, dtype=float)
    k = np.asarray(kernel, dtype=float)
    size = v.shape[-1]
    idx = np.arange(size)
    # K(i xor j) is symmetric in (i, j)
    return v @ k[idx[:, None] ^ idx[None, :]] / size


def partial_sum_conv(f, n: int) -> np.ndarray:
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    return dyadic_convolve(v, dirichlet_kernel(min(n, 1 << N), N).values)


def transform_T0(f, n: int) -> np.ndarray:
    """sum_{k>=1} n_{k-1} d_k f, with n_k the binary digits of n."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    d = np.diff(all_levels(v), axis=-2)  # row k-1 is d_k
    digits = np.array([(n >> k) & 1 for k in range(N)], dtype=float)
    return np.einsum("k,...ki->...i", digits, d)


def partial_sum_via_T0(f, n: int) -> np.ndarray:
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    if n >= (1 << N):
        return v.copy()
    w = walsh(n, N)
    return w * transform_T0(v * w, n)


def fejer_mean(f, n: int) -> np.ndarray:
    """sigma_n f = (1/n) sum_{k=1}^n s_k f."""
    if n < 1:
        raise GridError("Fejer mean order must be >= 1")
    v = np.asarray(f, dtype=float)
    size = v.shape[-1]
    c = analyze(v)
    j = np.arange(size)
    if n <= size:
        return synthesize(c * np.where(j < n, 1.0 - j / n, 0.0))
    A = synthesize(c * (size - j))  # sum_{k<=2^N} s_k f
    return (A + (n - size) * v) / n


def fejer_mean_conv(f, n: int) -> np.ndarray:
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    return dyadic_convolve(v, fejer_kernel(n, N).values)


def _sweep_sigma(c: np.ndarray, N: int, block: int = 256):
    """Yield (orders, sigma_n f) for n = 1..2^N in blocks; c is (..., 2^N)."""
    size = 1 << N
    s = np.zeros(c.shape)  # running s_n
    t = np.zeros(c.shape)  # running sum_{k<n} k c_k w_k
    for start in range(0, size, block):
        ks = np.arange(start, min(start + block, size))
        W = walsh_rows(ks, N).astype(float)  # (b, leaves)
        terms = c[..., ks, None] * W  # (..., b, leaves)
        cs = np.cumsum(terms, axis=-2) + s[..., None, :]
        ct = np.cumsum(terms * ks[:, None], axis=-2) + t[..., None, :]
        n = (ks + 1).astype(float)[:, None]
        yield ks + 1, cs - ct / n
        s, t = cs[..., -1, :], ct[..., -1, :]


def maximal_fejer(f) -> np.ndarray:
    """sigma_* f = sup over all n >= 1 of |sigma_n f|, exactly.

    Orders up to 2^N are enumerated; beyond that sigma_n f = f + (A - 2^N f)/n
    moves monotonically toward f, so the tail sup is attained at n = 2^N + 1
    or in the limit |f|.
    """
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    c = analyze(v)
    best = np.zeros(v.shape)
    for _, sig in _sweep_sigma(c, N):
        best = np.maximum(best, np.abs(sig).max(axis=-2))
    first_tail = fejer_mean(v, (1 << N) + 1)
    return np.maximum(best, np.maximum(np.abs(first_tail), np.abs(v)))


def maximal_fejer_dyadic(f) -> np.ndarray:
    """sup over n >= 0 of |sigma_{2^n} f| (tail handled as in maximal_fejer)."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    best = np.abs(v)  # limit of the tail
    for m in range(N + 2):
        best = np.maximum(best, np.abs(fejer_mean(v, 1 << m)))
    return best


def all_partial_sums(f) -> np.ndarray:
    """s_1 f, ..., s_{2^N} f stacked on axis -2."""
    v = np.asarray(f, dtype=float)
    N = resolution_of(v.shape[-1])
    c = analyze(v)
    W = walsh_rows(np.arange(1 << N), N).astype(float)
    return np.cumsum(c[..., :, None] * W, axis=-2)


def hadamard_to_paley(coeffs) -> np.ndarray:
    """Reorder natural (Hadamard) ordered coefficients into Paley order."""
    c = np.asarray(coeffs)
    N = resolution_of(c.shape[-1])
    return c[..., _bitrev(np.arange(1 << N), N)]
