"""Cube measures mu^[k] and cube seminorms on finite measure-preserving systems.

A finite system is a permutation T of {0, ..., M-1} with T-invariant
probability weights. On such a system every Cesaro limit of a periodic
sequence is its full-period average, so the invariant conditional
expectation is the cycle average and mu^[k] is computable exactly.

Points of X^[k] = X^(2^k) are rows of an integer array whose columns are
the cube vertices in epsilon-lexicographic order. X^[k+1] is identified with
X^[k] x X^[k] by x'_eps = x_{eps 0}, x''_eps = x_{eps 1}, i.e. the new digit
is the least significant one and the two halves interleave.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cube import bit_matrix, is_cube_isometry, popcounts, side, vertex_bits
from .errors import InputError, check_budget, clamp_nonnegative
from .gowers import box_average
from .harmonic import GroupFunction

EXPLICIT_LIMIT = 10**6
_WEIGHT_TOL = 1e-12


class FiniteSystem:
    """A permutation with invariant probability weights."""

    def __init__(self, perm, weights=None):
        perm = np.asarray(perm, dtype=np.int64).reshape(-1)
        M = len(perm)
        if M == 0 or sorted(perm.tolist()) != list(range(M)):
            raise InputError("T must be a bijection of {0, ..., M-1}")
        if weights is None:
            weights = np.full(M, 1.0 / M)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if len(weights) != M or np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InputError("weights must be M nonnegative finite numbers")
        if abs(weights.sum() - 1.0) > _WEIGHT_TOL:
            raise InputError(f"weights sum to {weights.sum()!r}, not 1")
        if np.max(np.abs(weights[perm] - weights)) > _WEIGHT_TOL:
            raise InputError("weights are not T-invariant")
        perm.setflags(write=False)
        weights.setflags(write=False)
        self.perm = perm
        self.weights = weights
        self.M = M
        self._cycles = None

    @classmethod
    def rotation(cls, N: int, step: int = 1) -> "FiniteSystem":
        """x -> x + step on Z/NZ with uniform weights."""
        return cls((np.arange(N) + step) % N)

    def __repr__(self):
        return f"FiniteSystem(M={self.M}, cycles={len(self.cycles)})"

    @property
    def cycles(self) -> list[list[int]]:
        if self._cycles is None:
            seen = np.zeros(self.M, dtype=bool)
            cycles = []
            for s in range(self.M):
                if seen[s]:
                    continue
                cyc = []
                x = s
                while not seen[x]:
                    seen[x] = True
                    cyc.append(x)
                    x = int(self.perm[x])
                cycles.append(cyc)
            self._cycles = cycles
        return self._cycles

    @property
    def period(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles))

    @property
    def is_uniform(self) -> bool:
        return bool(np.max(np.abs(self.weights - 1.0 / self.M)) <= _WEIGHT_TOL)

    @property
    def is_ergodic(self) -> bool:
        return len(self.cycles) == 1 and self.is_uniform

    def orbit_order(self) -> np.ndarray:
        """For a single-cycle system: the points T^0 0, T^1 0, ..., T^(M-1) 0."""
        if len(self.cycles) != 1:
            raise InputError("system is not a single cycle")
        return np.array(self.cycles[0], dtype=np.int64)

    def power(self, n: int) -> np.ndarray:
        """The permutation T^n (n may be negative)."""
        n %= self.period
        out = np.arange(self.M)
        base = self.perm
        while n:
            if n & 1:
                out = base[out]
            base = base[base]
            n >>= 1
        return out

    def powers(self, count: int) -> np.ndarray:
        """(count, M) array whose row n is T^n."""
        out = np.empty((count, self.M), dtype=np.int64)
        cur = np.arange(self.M)
        for n in range(count):
            out[n] = cur
            cur = self.perm[cur]
        return out

    def integrate(self, f) -> complex:
        return complex(np.dot(self.weights, as_system_function(self, f)))

    def l2_norm(self, f) -> float:
        f = as_system_function(self, f)
        return float(np.sqrt(np.dot(self.weights, np.abs(f) ** 2)))


def as_system_function(sys: FiniteSystem, f) -> np.ndarray:
    if isinstance(f, GroupFunction):
        f = f.values
    arr = np.asarray(f, dtype=np.complex128).reshape(-1)
    if len(arr) != sys.M:
        raise InputError(f"system function needs {sys.M} values, got {len(arr)}")
    if not np.all(np.isfinite(arr)):
        raise InputError("system function values must be finite")
    return arr


def require_ergodic(sys: FiniteSystem) -> None:
    if not sys.is_ergodic:
        raise InputError("cube measures are built for ergodic systems only (standing "
                         "ergodicity assumption): need a single cycle with uniform weights")


def require_rotation(sys: FiniteSystem) -> None:
    if not sys.is_ergodic:
        raise InputError("Kronecker-factor formulas are restricted to single-cycle cyclic "
                         "rotations, where Z_1 is the whole system")


# invariant conditional expectations

def _row_keys(points: np.ndarray) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.int64)
    return pts.view(np.dtype((np.void, pts.dtype.itemsize * pts.shape[1]))).reshape(-1)


def _row_lookup(rows: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Index of each query row inside ``rows`` (all queries must be present)."""
    keys = _row_keys(rows)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    q = _row_keys(queries)
    pos = np.searchsorted(sorted_keys, q)
    pos = np.minimum(pos, len(keys) - 1)
    if np.any(sorted_keys[pos] != q):
        raise InputError("point set is not invariant under the transformation")
    return order[pos]


def _orbit_labels(nxt: np.ndarray, max_len: int) -> np.ndarray:
    """Label each index by the minimum of its orbit under the map ``nxt``."""
    lab = np.arange(len(nxt))
    jump = nxt.copy()
    span = 1
    while span < max_len:
        lab = np.minimum(lab, lab[jump])
        jump = jump[jump]
        span *= 2
    return lab


def invariant_labels(sys: FiniteSystem, points: np.ndarray) -> np.ndarray:
    """Cycle labels of rows of ``points`` under the diagonal action of T."""
    image = sys.perm[points]
    nxt = _row_lookup(points, image)
    return _orbit_labels(nxt, sys.period)


def product_points(M: int, m: int) -> np.ndarray:
    """All of {0..M-1}^m, rows in lexicographic order (flat index = base-M digits)."""
    grids = np.indices((M,) * m).reshape(m, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def cycle_average(values: np.ndarray, labels: np.ndarray) -> np.ndarray:
    _, inv, counts = np.unique(labels, return_inverse=True, return_counts=True)
    re = np.bincount(inv, weights=values.real) / counts
    im = np.bincount(inv, weights=values.imag) / counts
    return (re + 1j * im)[inv]


def invariant_conditional_expectation(sys: FiniteSystem, F, m: int) -> np.ndarray:
    """E(F | invariant sets of T x ... x T) on the m-fold product of ``sys``.

    F is indexed by the flat index of (x_0, ..., x_{m-1}) in base M, most
    significant digit first. The result is the cycle average of F.
    """
    F = np.asarray(F, dtype=np.complex128).reshape(-1)
    if len(F) != sys.M**m:
        raise InputError(f"F needs {sys.M ** m} values for the {m}-fold product")
    pts = product_points(sys.M, m)
    labels = _orbit_labels(_flat_image(sys, pts), sys.period)
    return cycle_average(F, labels)


def _flat_image(sys: FiniteSystem, pts: np.ndarray) -> np.ndarray:
    img = sys.perm[pts]
    place = sys.M ** np.arange(pts.shape[1] - 1, -1, -1)
    return img @ place


# cube measures

@dataclass
class CubeMeasure:
    """mu^[k] on a finite system.

    Explicit form: ``points`` (S, 2^k) and ``weights`` (S,). Parametric form
    (``points is None``): the law of (T^(eps.t) x)_eps with x, t_1..t_k
    uniform over one cycle, used when N^(k+1) is too large to list.
    """
    system: FiniteSystem
    k: int
    points: np.ndarray | None = None
    weights: np.ndarray | None = None

    @property
    def explicit(self) -> bool:
        return self.points is not None

    @property
    def support_size(self) -> int:
        return len(self.weights) if self.explicit else self.system.M ** (self.k + 1)

    def materialize(self, limit: int = EXPLICIT_LIMIT) -> "CubeMeasure":
        if self.explicit:
            return self
        N = self.system.M
        if N ** (self.k + 1) > limit:
            raise InputError(f"explicit mu^[{self.k}] would list {N ** (self.k + 1)} tuples")
        order = self.system.orbit_order()
        grid = product_points(N, self.k + 1)
        pos = (grid[:, :1] + grid[:, 1:] @ bit_matrix(self.k).T) % N
        pts = order[pos]
        w = np.full(len(pts), 1.0 / len(pts))
        return CubeMeasure(self.system, self.k, pts, w)

    def integrate(self, functions, budget: int | None = None) -> complex:
        """Integral of prod_eps f_eps(x_eps); ``functions`` has 2^k entries."""
        fs = [as_system_function(self.system, f) for f in functions]
        if len(fs) != 2**self.k:
            raise InputError(f"mu^[{self.k}] needs {2 ** self.k} functions, got {len(fs)}")
        if self.explicit:
            prod = np.ones(len(self.weights), dtype=np.complex128)
            for e, f in enumerate(fs):
                prod *= f[self.points[:, e]]
            return complex(np.dot(self.weights, prod))
        order = self.system.orbit_order()
        return box_average([f[order] for f in fs], self.k, budget)

    def marginal(self, e: int) -> np.ndarray:
        m = self.materialize()
        return np.bincount(m.points[:, e], weights=m.weights, minlength=self.system.M)

    def canonical(self) -> tuple[np.ndarray, np.ndarray]:
        """Support rows sorted lexicographically with duplicate rows merged."""
        m = self.materialize()
        rows, inv = np.unique(m.points, axis=0, return_inverse=True)
        w = np.bincount(inv.reshape(-1), weights=m.weights, minlength=len(rows))
        return rows, w

    def equals(self, other: "CubeMeasure", atol: float = 0.0) -> bool:
        """Equality as weighted sets (exact by default)."""
        if self.k != other.k:
            return False
        r1, w1 = self.canonical()
        r2, w2 = other.canonical()
        if r1.shape != r2.shape or not np.array_equal(r1, r2):
            return False
        return bool(np.all(np.abs(w1 - w2) <= atol))

    def to_csv(self, path=None) -> str:
        m = self.materialize()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = ["x_" + "".join(map(str, vertex_bits(e, self.k))) for e in range(2**self.k)]
        w.writerow(labels + ["weight"])
        for row, wt in zip(*self.canonical()):
            w.writerow([int(v) for v in row] + [format(wt, ".17g")])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _join_level(sys: FiniteSystem, points: np.ndarray, weights: np.ndarray):
    """Relatively independent self-joining over the invariant algebra."""
    labels = invariant_labels(sys, points)
    order = np.argsort(labels, kind="stable")
    _, starts, counts = np.unique(labels[order], return_index=True, return_counts=True)
    cell_w = np.add.reduceat(weights[order], starts)
    width = points.shape[1]
    if np.all(counts == counts[0]):
        g = counts[0]
        idx = order.reshape(-1, g)
        a = np.broadcast_to(idx[:, :, None], (len(idx), g, g)).reshape(-1)
        b = np.broadcast_to(idx[:, None, :], (len(idx), g, g)).reshape(-1)
        cw = np.repeat(cell_w, g * g)
    else:
        a_parts, b_parts, w_parts = [], [], []
        for s, c, wc in zip(starts, counts, cell_w):
            idx = order[s:s + c]
            a_parts.append(np.repeat(idx, c))
            b_parts.append(np.tile(idx, c))
            w_parts.append(np.full(c * c, wc))
        a, b, cw = np.concatenate(a_parts), np.concatenate(b_parts), np.concatenate(w_parts)
    new = np.empty((len(a), 2 * width), dtype=np.int64)
    new[:, 0::2] = points[a]
    new[:, 1::2] = points[b]
    new_w = weights[a] * (weights[b] / cw)
    keep = new_w > 0
    return new[keep], new_w[keep]


def build_cube_measure(sys: FiniteSystem, k: int, explicit_limit: int = EXPLICIT_LIMIT) -> CubeMeasure:
    """mu^[k] by iterated relative independence over invariant algebras.

    mu^[0] = mu. Returned explicitly when M^(k+1) <= explicit_limit,
    otherwise in parametric form.
    """
    if int(k) != k or k < 0:
        raise InputError(f"k must be a nonnegative integer, got {k!r}")
    require_ergodic(sys)
    if sys.M ** (k + 1) > explicit_limit:
        return CubeMeasure(sys, k)
    pts = np.arange(sys.M, dtype=np.int64)[:, None]
    w = sys.weights.copy()
    for _ in range(k):
        pts, w = _join_level(sys, pts, w)
    return CubeMeasure(sys, k, pts, w)


def _twisted(sys: FiniteSystem, f, k: int) -> list[np.ndarray]:
    f = as_system_function(sys, f)
    fc = np.conj(f)
    return [fc if w % 2 else f for w in popcounts(k)]


def hk_seminorm(sys: FiniteSystem, f, k: int, measure: CubeMeasure | None = None,
                budget: int | None = None) -> float:
    """||f||_k: 2^k-th root of the integral of prod_eps C^|eps| f(x_eps) d mu^[k]."""
    if k < 1:
        raise InputError("k must be >= 1")
    mu = measure if measure is not None else build_cube_measure(sys, k)
    val = mu.integrate(_twisted(sys, f, k), budget)
    scale = max(1.0, float(np.max(np.abs(as_system_function(sys, f)))) ** (2**k))
    if abs(val.imag) > 1e-12 * scale:
        raise InputError(f"seminorm integrand has imaginary part {val.imag!r}")
    return clamp_nonnegative(val.real, 1e-12 * scale, what=f"||f||_{k}^(2^{k})") ** (1.0 / 2**k)


def _hk_powers(sys: FiniteSystem, F: np.ndarray, k: int, pows: np.ndarray) -> np.ndarray:
    if k == 1:
        return np.abs(F @ sys.weights) ** 2
    P = len(pows)
    out = np.empty(len(F))
    step = max(1, (1 << 21) // (P * sys.M))
    for lo in range(0, len(F), step):
        blk = F[lo:lo + step]
        G = blk[:, None, :] * np.conj(blk[:, pows])
        out[lo:lo + step] = _hk_powers(sys, G.reshape(-1, sys.M), k - 1, pows).reshape(len(blk), P).mean(axis=1)
    return out


def hk_seminorm_recursive(sys: FiniteSystem, f, k: int) -> float:
    """||f||_{k+1}^(2^(k+1)) = (1/P) sum_{n<P} ||f . T^n conj f||_k^(2^k), exact at full period P."""
    if k < 1:
        raise InputError("k must be >= 1")
    require_ergodic(sys)
    f = as_system_function(sys, f)
    if k == 1:
        return abs(complex(np.dot(sys.weights, f)))
    p = float(_hk_powers(sys, f[None, :], k, sys.powers(sys.period))[0])
    scale = max(1.0, float(np.max(np.abs(f))) ** (2**k))
    return clamp_nonnegative(p, 1e-12 * scale, what=f"||f||_{k}^(2^{k})") ** (1.0 / 2**k)


# Kronecker-factor formulas on rotations

def mu_s_correlation(sys: FiniteSystem, f0, f1, s: int) -> complex:
    """Integral of f0(x0) f1(x1) d mu_s = E_z f0(z) f1(T^s z) (Z_1 is the system itself)."""
    require_rotation(sys)
    f0 = as_system_function(sys, f0)
    f1 = as_system_function(sys, f1)
    return complex(np.dot(sys.weights, f0 * f1[sys.power(s)]))


def mu_s_average(sys: FiniteSystem, f0, f1) -> complex:
    """Integral over s of the mu_s correlations."""
    return complex(np.mean([mu_s_correlation(sys, f0, f1, s) for s in range(sys.M)]))


def mu2_explicit(sys: FiniteSystem, f00, f01, f10, f11) -> complex:
    """E_{z,s,t} f00(z) f01(z+s) f10(z+t) f11(z+s+t) in cycle coordinates."""
    require_rotation(sys)
    order = sys.orbit_order()
    g00, g01, g10, g11 = (as_system_function(sys, f)[order] for f in (f00, f01, f10, f11))
    N = sys.M
    r = np.arange(N)
    s = r[:, None]
    t = r[None, :]
    total = 0j
    for z in range(N):
        total += g00[z] * np.sum(g01[(z + s) % N] * g10[(z + t) % N] * g11[(z + s + t) % N])
    return total / N**3


def mu2_via_mus(sys: FiniteSystem, f00, f01, f10, f11) -> complex:
    """Integral over s of (mu_s x mu_s)(f00 (x) f10 (x) f01 (x) f11).

    Under x = (x', x'') with x' = (x_00, x_10) and x'' = (x_01, x_11).
    """
    require_rotation(sys)
    return complex(np.mean([mu_s_correlation(sys, f00, f10, s) * mu_s_correlation(sys, f01, f11, s)
                            for s in range(sys.M)]))


# symmetries

def apply_cube_symmetry(m: CubeMeasure, sigma) -> CubeMeasure:
    """Push forward by sigma_*: (sigma_* x)_eps = x_sigma(eps)."""
    sigma = np.asarray(sigma, dtype=np.int64)
    if not is_cube_isometry(sigma, m.k):
        raise InputError("sigma is not an isometry of the cube")
    m = m.materialize()
    return CubeMeasure(m.system, m.k, m.points[:, sigma], m.weights.copy())


def apply_side_transformation(m: CubeMeasure, coordinate: int, bit: int, power: int = 1) -> CubeMeasure:
    """Apply T^power to the coordinates x_eps with eps_coordinate == bit (1-based coordinate)."""
    mask = side(m.k, coordinate, bit)
    m = m.materialize()
    pts = m.points.copy()
    pts[:, mask] = m.system.power(power)[pts[:, mask]]
    return CubeMeasure(m.system, m.k, pts, m.weights.copy())


def apply_diagonal(m: CubeMeasure, power: int = 1) -> CubeMeasure:
    m = m.materialize()
    return CubeMeasure(m.system, m.k, m.system.power(power)[m.points], m.weights.copy())


def side_action_is_transitive(m: CubeMeasure) -> bool:
    """Breadth-first search over the support under the 2k side transformations."""
    m = m.materialize()
    pts = m.points[m.weights > 0]
    moves = []
    for i in range(1, m.k + 1):
        for b in (0, 1):
            mask = side(m.k, i, b)
            img = pts.copy()
            img[:, mask] = m.system.perm[img[:, mask]]
            moves.append(_row_lookup(pts, img))
    seen = np.zeros(len(pts), dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for mv in moves:
            v = mv[u]
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return bool(seen.all())


def cs_gap(sys: FiniteSystem, functions, k: int, measure: CubeMeasure | None = None) -> float:
    """prod_eps ||f_eps||_k - |integral of prod f_eps d mu^[k]|."""
    mu = measure if measure is not None else build_cube_measure(sys, k)
    bound = float(np.prod([hk_seminorm(sys, f, k, mu) for f in functions]))
    return bound - abs(mu.integrate(functions))


def check_budget_explicit(sys: FiniteSystem, k: int, budget: int | None = None) -> None:
    check_budget(sys.M ** (k + 1), budget, what=f"mu^[{k}] on {sys.M} points")
