"""Gowers uniformity norms U^k on Z/NZ.

Three independent evaluations are provided and are expected to agree:

* ``gowers_norm_recursive``: ||f||_1 = |E f| and
  ||f||_{k+1}^(2^(k+1)) = E_t ||f * conj(f_t)||_k^(2^k)   (the default path),
* ``gowers_norm_closed``: the full average over (x, t_1..t_k) of the
  conjugation-twisted product over the 2^k cube vertices (oracle path),
* ``u2_via_fourier``: for k = 2 only, the l^4 norm of the Fourier transform.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .cube import bit_matrix, popcounts, vertex_index
from .errors import InputError, check_budget, clamp_nonnegative
from .harmonic import GroupFunction, as_group_function, fourier_transform

MAX_K = 6
_CHUNK_ELEMS = 1 << 21


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    if k > MAX_K:
        raise InputError(f"k > {MAX_K} is not supported")
    return int(k)


def _root(power: float, k: int, scale: float) -> float:
    power = clamp_nonnegative(power, 1e-12 * max(1.0, scale), what=f"U^{k} power")
    return power ** (1.0 / 2**k)


# recursive path

def _powers(F: np.ndarray, k: int, fft: bool) -> np.ndarray:
    """||row||_k^(2^k) for every row of F (shape (B, N))."""
    B, N = F.shape
    if k == 1:
        return np.abs(F.mean(axis=1)) ** 2
    if k == 2 and fft:
        # E_x g(x) conj g(x+t) for all t at once
        spec = np.abs(np.fft.fft(F, axis=1)) ** 2
        corr = np.fft.ifft(spec, axis=1) / N
        return np.mean(np.abs(corr) ** 2, axis=1)
    idx = (np.arange(N)[None, :] + np.arange(N)[:, None]) % N  # [t, x] -> x + t
    out = np.empty(B)
    step = max(1, _CHUNK_ELEMS // (N * N))
    for lo in range(0, B, step):
        blk = F[lo:lo + step]
        G = blk[:, None, :] * np.conj(blk[:, idx])
        sub = _powers(G.reshape(-1, N), k - 1, fft)
        out[lo:lo + step] = sub.reshape(len(blk), N).mean(axis=1)
    return out


def gowers_power_recursive(f, k: int, fft: bool = True) -> float:
    """||f||_k^(2^k) via the recursion over shifts (unclamped)."""
    k = _check_k(k)
    f = as_group_function(f)
    return float(_powers(f.values[None, :], k, fft)[0])


def gowers_norm_recursive(f, k: int, fft: bool = True) -> float:
    """U^k norm by the shift recursion.

    With ``fft=True`` the level-2 autocorrelations are taken with an FFT;
    ``fft=False`` keeps every level as an explicit average over shifts.
    """
    k = _check_k(k)
    f = as_group_function(f)
    if k == 1:
        return abs(complex(np.mean(f.values)))
    p = gowers_power_recursive(f, k, fft)
    return _root(p, k, f.sup_norm() ** (2**k))


# closed (box) path

def box_average(values: Sequence[np.ndarray], k: int, budget: int | None = None) -> complex:
    """E over (x, t_1..t_k) of prod_eps values[eps](x + eps.t), no conjugation.

    ``values`` holds 2^k arrays of length N in epsilon-lexicographic order.
    Brute force: every (x, t) is visited; vectorized over (x, t_k).
    """
    k = _check_k(k)
    values = [np.asarray(v, dtype=np.complex128) for v in values]
    if len(values) != 2**k:
        raise InputError(f"expected {2**k} vertex functions, got {len(values)}")
    N = len(values[0])
    if any(len(v) != N for v in values):
        raise InputError("vertex functions live on different groups")
    check_budget(N ** (k + 1), budget, what=f"closed U^{k} average over (Z/{N})^{k + 1}")

    x = np.arange(N)
    xt = (x[:, None] + x[None, :]) % N
    if k == 2:
        # inner[x, y] = sum_t2 v01(x + t2) v11(y + t2)
        inner = values[1][xt] @ values[3][xt].T
        terms = values[0][:, None] * values[2][xt] * inner[x[:, None], xt]
        return complex(terms.sum()) / N**3
    # circulant rows doubled so that rows x+s are a contiguous slice
    circ = [np.concatenate([v[xt]] * 2) for v in values]
    doubled = [np.concatenate([v, v]) for v in values]
    head = bit_matrix(k - 1) if k > 1 else np.zeros((1, 0), dtype=int)
    total = 0j
    for tp in itertools.product(range(N), repeat=k - 1):
        shifts = (head @ np.array(tp, dtype=np.int64)) % N if k > 1 else np.zeros(1, dtype=np.int64)
        v = np.ones(N, dtype=np.complex128)
        W = np.ones((N, N), dtype=np.complex128)
        for ep, s in enumerate(shifts):
            v = v * doubled[2 * ep][s:s + N]
            W = W * circ[2 * ep + 1][s:s + N]
        total += v @ W.sum(axis=1)
    return total / N ** (k + 1)


def gowers_power_closed(f, k: int, budget: int | None = None) -> complex:
    k = _check_k(k)
    f = as_group_function(f)
    conj = np.conj(f.values)
    vals = [conj if w % 2 else f.values for w in popcounts(k)]
    return box_average(vals, k, budget)


def gowers_norm_closed(f, k: int, budget: int | None = None) -> float:
    """U^k norm from the closed (k+1)-fold average; the test oracle.

    Raises BudgetExceeded when N^(k+1) is above the operation cap
    (default 10^9, overridable by ``budget`` or ``ERGOLAB_BUDGET``).
    """
    f = as_group_function(f)
    p = gowers_power_closed(f, k, budget)
    scale = f.sup_norm() ** (2**k)
    if abs(p.imag) > 1e-9 * max(1.0, scale):
        raise InputError(f"closed U^{k} average has imaginary part {p.imag!r}")
    return _root(p.real, k, scale)


def u2_via_fourier(f, naive: bool = False) -> float:
    """(sum_xi |fhat(xi)|^4)^(1/4)."""
    fhat = fourier_transform(f, naive=naive).coefficients
    return float(np.sum(np.abs(fhat) ** 4) ** 0.25)


def gowers_norm(f, k: int, method: str = "recursive", budget: int | None = None) -> float:
    if method == "recursive":
        return gowers_norm_recursive(f, k)
    if method == "closed":
        return gowers_norm_closed(f, k, budget)
    if method == "fourier":
        if k != 2:
            raise InputError("the Fourier formula is only available for k = 2")
        return u2_via_fourier(f)
    raise InputError(f"unknown method {method!r}")


class VertexFamily:
    """One function on Z/NZ per vertex of {0,1}^k, epsilon-lexicographic order."""

    def __init__(self, functions, k: int | None = None):
        if isinstance(functions, dict):
            items = {}
            for key, fn in functions.items():
                bits = tuple(int(c) for c in key) if isinstance(key, str) else tuple(key)
                items[bits] = fn
            kk = len(next(iter(items)))
            ordered = [None] * 2**kk
            for bits, fn in items.items():
                if len(bits) != kk:
                    raise InputError("vertex labels of different lengths")
                ordered[vertex_index(bits)] = fn
            if any(fn is None for fn in ordered):
                raise InputError("vertex family is missing vertices")
            functions = ordered
        functions = [as_group_function(fn) for fn in functions]
        n = len(functions)
        kk = n.bit_length() - 1
        if n < 2 or 2**kk != n:
            raise InputError(f"a vertex family needs 2^k functions, got {n}")
        if k is not None and k != kk:
            raise InputError(f"expected {2**k} functions for k={k}, got {n}")
        N = functions[0].N
        if any(fn.N != N for fn in functions):
            raise InputError("vertex functions live on different groups")
        self.k = kk
        self.N = N
        self.functions = tuple(functions)

    def __len__(self):
        return len(self.functions)

    def __getitem__(self, e):
        if isinstance(e, str):
            e = vertex_index(int(c) for c in e)
        elif isinstance(e, tuple):
            e = vertex_index(e)
        return self.functions[e]

    @classmethod
    def constant(cls, f, k: int) -> "VertexFamily":
        return cls([as_group_function(f)] * 2**k)

    @classmethod
    def random(cls, N: int, k: int, rng: np.random.Generator, kind: str = "disk") -> "VertexFamily":
        return cls([GroupFunction.random(N, rng, kind) for _ in range(2**k)])


def gowers_inner_product(family: VertexFamily, budget: int | None = None) -> complex:
    """E_{x,t} prod_eps f_eps(x + eps.t) with no conjugations."""
    return box_average([fn.values for fn in family.functions], family.k, budget)


def gowers_inner_product_conjugated(family: VertexFamily, budget: int | None = None) -> complex:
    """As gowers_inner_product but with f_eps conjugated when |eps| is odd."""
    w = popcounts(family.k)
    vals = [np.conj(fn.values) if w[e] % 2 else fn.values for e, fn in enumerate(family.functions)]
    return box_average(vals, family.k, budget)


def gcs_gap(family: VertexFamily, budget: int | None = None) -> float:
    """prod_eps ||f_eps||_k - |<family>|; nonnegative by Gowers-Cauchy-Schwarz."""
    bound = float(np.prod([gowers_norm_recursive(fn, family.k) for fn in family.functions]))
    return bound - abs(gowers_inner_product(family, budget))
