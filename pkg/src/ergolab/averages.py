"""Multiple ergodic averages and finite-period versions of their bounds.

Sources are either a FiniteSystem (the average is a function on the
system; at N equal to the period it is the exact limit) or an orbit of one
of the explicit nilsystems (the average is a scalar along the orbit).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .cube import bit_matrix, vertex_bits
from .cube_measures import FiniteSystem, as_system_function, hk_seminorm_recursive, require_rotation
from .errors import BudgetExceeded, InputError, check_budget
from .nilmanifolds import CesaroSeries, doubling_checkpoints, series_from_terms

_SUP_TOL = 1e-12
ORBIT_CAP = 5 * 10**7


@dataclass(frozen=True)
class IntegerPolynomial:
    """p(n) = sum_j c_j * binom(n, j) with integer c_j; integer-valued on Z."""
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if any(int(c) != c for c in self.coefficients):
            raise InputError("binomial-basis coefficients must be integers")
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    @property
    def degree(self) -> int:
        nz = [j for j, c in enumerate(self.coefficients) if c]
        return nz[-1] if nz else 0

    @classmethod
    def from_power_coefficients(cls, coeffs: Sequence[int]) -> "IntegerPolynomial":
        """Convert sum a_j n^j (integer a_j) to the binomial basis.

        n^j = sum_i S(j, i) i! binom(n, i), S the Stirling numbers of the second kind.
        """
        d = len(coeffs) - 1
        out = [0] * (d + 1)
        for j, a in enumerate(coeffs):
            for i in range(j + 1):
                out[i] += int(a) * _stirling2(j, i) * math.factorial(i)
        return cls(tuple(out))

    @classmethod
    def linear(cls, a: int, b: int = 0) -> "IntegerPolynomial":
        return cls((b, a))

    def __call__(self, n: int) -> int:
        return sum(c * math.comb(n, j) if n >= 0 else c * _gen_binom(n, j)
                   for j, c in enumerate(self.coefficients))

    def differences(self, n0: int) -> list[int]:
        """Delta^j p(n0) for j = 0..degree; in the binomial basis Delta^j p(n0) = sum_i c_i binom(n0, i - j)."""
        d = len(self.coefficients) - 1
        return [sum(self.coefficients[i] * _gen_binom(n0, i - j) for i in range(j, d + 1))
                for j in range(d + 1)]

    def values(self, start: int, count: int, modulus: int | None = None) -> np.ndarray:
        """p(start), ..., p(start + count - 1) by repeated summation of finite differences.

        With ``modulus`` every intermediate is reduced, so the result is exact
        mod ``modulus`` for any count.
        """
        diffs = self.differences(start)
        d = len(diffs) - 1
        if modulus is None:
            bound = sum(abs(c) for c in diffs) * (count + 1) ** max(1, d)
            if bound >= 2**62:
                raise BudgetExceeded("polynomial values overflow 64-bit integers; pass a modulus")
        else:
            diffs = [c % modulus for c in diffs]
        # level j holds Delta^j p(start + m); the top level is constant
        out = np.full(count, diffs[d], dtype=np.int64)
        for j in range(d - 1, -1, -1):
            nxt = np.empty(count, dtype=np.int64)
            nxt[0] = diffs[j]
            nxt[1:] = diffs[j] + np.cumsum(out)[:-1]
            out = nxt % modulus if modulus else nxt
        return out


def _gen_binom(n: int, j: int) -> int:
    if j < 0:
        return 0
    num = 1
    for i in range(j):
        num *= n - i
    return num // math.factorial(j)


def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


IDENTITY_POLY = IntegerPolynomial((0, 1))
SQUARE_POLY = IntegerPolynomial.from_power_coefficients([0, 0, 1])
FURSTENBERG_WEISS = (IDENTITY_POLY, SQUARE_POLY)


# sources

class OrbitSource:
    """An orbit of a nilsystem; functions are callables on coordinate arrays."""

    def __init__(self, system, start):
        self.system = system
        self.start = start

    def points(self, count: int) -> np.ndarray:
        if count > ORBIT_CAP:
            raise BudgetExceeded(f"orbit of length {count} exceeds cap {ORBIT_CAP}")
        return self.system.orbit(self.start, count)

    def metadata(self) -> dict:
        return self.system.metadata()


def _evaluate_on_orbit(f: Callable, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(*pts.T), dtype=np.complex128)
    return np.broadcast_to(vals, (len(pts),)) if vals.ndim == 0 else vals


def _function_series(sys: FiniteSystem, terms: np.ndarray, metadata: dict) -> CesaroSeries:
    """Cesaro series for function-valued terms (N, M); norms in L^2(mu)."""
    N = len(terms)
    partial = np.cumsum(terms, axis=0) / np.arange(1, N + 1)[:, None]
    return _series_from_partials(sys, partial, metadata)


def _series_from_partials(sys: FiniteSystem, partial: np.ndarray, metadata: dict) -> CesaroSeries:
    N = len(partial)
    w = sys.weights
    cps = doubling_checkpoints(N)
    tails = []
    prev = 0
    for c in cps:
        diff = partial[prev:c] - partial[c - 1]
        tails.append(float(np.sqrt(np.max(np.abs(diff) ** 2 @ w))))
        prev = c
    vals = partial[cps - 1]
    norms = np.sqrt(np.abs(vals) ** 2 @ w)
    meta = dict(metadata)
    meta["weights"] = w
    return CesaroSeries(cps, vals, norms, np.array(tails), meta)


def _check_functions(sys: FiniteSystem, functions) -> list[np.ndarray]:
    return [as_system_function(sys, f) for f in functions]


def _polynomial_average(source, functions, exponents: Callable[[int], np.ndarray], N: int,
                        metadata: dict) -> CesaroSeries:
    """Average of prod_i f_i(T^{e_i(n)} x) for n < N; ``exponents(i)`` gives e_i over n."""
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if isinstance(source, FiniteSystem):
        fs = _check_functions(source, functions)
        P = source.period
        pows = source.powers(P)
        terms = np.ones((N, source.M), dtype=np.complex128)
        for i, f in enumerate(fs):
            e = np.asarray(exponents(i)) % P
            terms *= f[pows[e]]
        return _function_series(source, terms, metadata)
    exps = [np.asarray(exponents(i)) for i in range(len(functions))]
    if any(e.min() < 0 for e in exps if e.size):
        raise InputError("negative exponents are not supported on orbit sources")
    top = max(int(e.max()) for e in exps if e.size) + 1
    pts = source.points(top)
    terms = np.ones(N, dtype=np.complex128)
    for f, e in zip(functions, exps):
        terms *= _evaluate_on_orbit(f, pts)[e]
    meta = dict(source.metadata())
    meta.update(metadata)
    return series_from_terms(terms, N, meta)


def linear_average(source, functions, N: int, offset: int = 0) -> CesaroSeries:
    """(1/N) sum_{n=offset}^{offset+N-1} f_1(T^n x) f_2(T^{2n} x) ... f_k(T^{kn} x)."""
    n = np.arange(offset, offset + N, dtype=np.int64)
    return _polynomial_average(source, functions, lambda i: (i + 1) * n, N,
                               {"mode": "linear", "k": len(functions), "offset": offset})


def polynomial_average(source, functions, polynomials: Sequence[IntegerPolynomial], N: int,
                       offset: int = 0) -> CesaroSeries:
    """(1/N) sum_n prod_i f_i(T^{p_i(n)} x) over n in [offset, offset + N)."""
    if len(polynomials) != len(functions):
        raise InputError("need one polynomial per function")
    modulus = source.period if isinstance(source, FiniteSystem) else None
    exps = [p.values(offset, N, modulus) for p in polynomials]
    return _polynomial_average(source, functions, lambda i: exps[i], N,
                               {"mode": "polynomial", "k": len(functions), "offset": offset,
                                "polynomials": [list(p.coefficients) for p in polynomials]})


def _cubic_family(functions, k: int | None):
    """Normalize a cubic family to a list indexed by vertex index 1..2^k-1."""
    if isinstance(functions, dict):
        items = {}
        for key, f in functions.items():
            bits = tuple(int(c) for c in key) if isinstance(key, str) else tuple(key)
            items[bits] = f
        kk = len(next(iter(items)))
        ordered = [None] * 2**kk
        for bits, f in items.items():
            e = int("".join(map(str, bits)), 2)
            ordered[e] = f
        if ordered[0] is not None:
            raise InputError("the cubic family is indexed by nonzero vertices only")
        functions = ordered[1:]
    n = len(functions)
    kk = (n + 1).bit_length() - 1
    if 2**kk - 1 != n or kk < 1:
        raise InputError(f"a cubic family needs 2^k - 1 functions, got {n}")
    if k is not None and k != kk:
        raise InputError(f"expected {2 ** k - 1} functions for k={k}, got {n}")
    if any(f is None for f in functions):
        raise InputError("cubic family is missing vertices")
    return list(functions), kk


CUBIC_CELL_CAP = 2 * 10**7


def cubic_average(source, functions, N: int, k: int | None = None) -> CesaroSeries:
    """(1/N^k) sum over n in [0, N)^k of prod_{eps != 0} f_eps(T^{n.eps} x).

    ``functions`` lists f_eps for eps = 0..01, ..., 1..1 (vertex index order)
    or is a dict keyed by vertex labels. The series holds A_M for every
    checkpoint M <= N, where A_M averages over the cube [0, M)^k.
    """
    fs, k = _cubic_family(functions, k)
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    bits = bit_matrix(k)[1:]
    grid = np.indices((N,) * k).reshape(k, -1).T
    shifts = grid @ bits.T  # (N^k, 2^k - 1): n.eps
    meta = {"mode": "cubic", "k": k}
    if isinstance(source, FiniteSystem):
        check_budget(N**k * source.M, CUBIC_CELL_CAP, what="cubic average grid")
        vals = _check_functions(source, fs)
        pows = source.powers(source.period)
        terms = np.ones((len(grid), source.M), dtype=np.complex128)
        for j, f in enumerate(vals):
            terms *= f[pows[shifts[:, j] % source.period]]
        partial = _cube_partials(terms.reshape((N,) * k + (source.M,)), k, N)
        return _series_from_partials(source, partial, meta)
    check_budget(N**k, CUBIC_CELL_CAP, what="cubic average grid")
    pts = source.points(k * (N - 1) + 1)
    terms = np.ones(len(grid), dtype=np.complex128)
    for j, f in enumerate(fs):
        terms *= _evaluate_on_orbit(f, pts)[shifts[:, j]]
    partial = _cube_partials(terms.reshape((N,) * k + (1,)), k, N)[:, 0]
    meta.update(source.metadata())
    cps = doubling_checkpoints(N)
    tails = []
    prev = 0
    for c in cps:
        tails.append(float(np.max(np.abs(partial[prev:c] - partial[c - 1]))))
        prev = c
    vals = partial[cps - 1]
    return CesaroSeries(cps, vals, np.abs(vals), np.array(tails), meta)


def _cube_partials(terms: np.ndarray, k: int, N: int) -> np.ndarray:
    """A_M for M = 1..N: means over [0, M)^k via cumulative sums along each axis."""
    S = terms
    for ax in range(k):
        S = np.cumsum(S, axis=ax)
    diag = S[(np.arange(N),) * k]
    return diag / (np.arange(1, N + 1) ** k)[:, None]


# finite-period bound checks

def _sup_check(sys: FiniteSystem, functions, what: str = "function") -> list[np.ndarray]:
    fs = _check_functions(sys, functions)
    for i, f in enumerate(fs):
        if np.max(np.abs(f)) > 1 + _SUP_TOL:
            raise InputError(f"{what} {i} violates the sup-norm bound 1")
    return fs


def full_period_linear(sys: FiniteSystem, functions) -> np.ndarray:
    return linear_average(sys, functions, sys.period).final


def semiprog_bound_check(sys: FiniteSystem, functions) -> float:
    """min_l (l * ||f_l||_k) - ||full-period average||_{L^2}, k = number of functions."""
    require_rotation(sys)
    fs = _sup_check(sys, functions)
    k = len(fs)
    bound = min((l + 1) * hk_seminorm_recursive(sys, f, k) for l, f in enumerate(fs))
    return bound - sys.l2_norm(full_period_linear(sys, fs))


def cubic_bound_check(sys: FiniteSystem, functions) -> float:
    """min_eps ||f_eps||_k - ||full-period cubic average||_{L^2}."""
    require_rotation(sys)
    fs, k = _cubic_family(functions, None)
    fs = _sup_check(sys, fs)
    bound = min(hk_seminorm_recursive(sys, f, k) for f in fs)
    avg = cubic_average(sys, fs, sys.period).final
    return bound - sys.l2_norm(avg)


def cubic_recurrence_value(sys: FiniteSystem, A, k: int) -> float:
    """Full-period average over n in [0, P)^k of mu(intersection over eps of T^{n.eps} A)."""
    require_rotation(sys)
    ind = np.zeros(sys.M)
    ind[np.asarray(list(A), dtype=np.int64)] = 1.0
    avg = cubic_average(sys, [ind] * (2**k - 1), sys.period, k).final
    return float(np.dot(sys.weights, ind * avg.real))


def cubic_recurrence_check(sys: FiniteSystem, A, k: int) -> float:
    """Full-period cubic recurrence average minus mu(A)^(2^k)."""
    A = list(A)
    if not A:
        raise InputError("A must be nonempty")
    ind = np.zeros(sys.M)
    ind[np.asarray(A, dtype=np.int64)] = 1.0
    measure = float(np.dot(sys.weights, ind))
    return cubic_recurrence_value(sys, A, k) - measure ** (2**k)


def vdc_finite(xi, weights=None) -> float:
    """Finite van der Corput gap for a P-periodic vector sequence.

    Returns (1/P) sum_h |(1/P) sum_n <xi_n | xi_{n+h}>| - ||(1/P) sum_n xi_n||^2,
    indices mod P. ``weights`` defines the inner product sum_j w_j u_j conj(v_j).
    """
    xi = np.asarray(xi, dtype=np.complex128)
    if xi.ndim == 1:
        xi = xi[:, None]
    P, d = xi.shape
    w = np.ones(d) if weights is None else np.asarray(weights, dtype=np.float64)
    norms = np.sqrt(np.abs(xi) ** 2 @ w)
    if np.any(norms > 1 + _SUP_TOL):
        raise InputError("vectors must have norm <= 1")
    gram = (xi * w) @ np.conj(xi).T  # gram[n, m] = <xi_n | xi_m>
    n = np.arange(P)
    corr = np.array([np.mean(gram[n, (n + h) % P]) for h in range(P)])
    rhs = float(np.mean(np.abs(corr)))
    mean_vec = xi.mean(axis=0)
    lhs = float(np.real(np.sum(w * np.abs(mean_vec) ** 2)))
    return rhs - lhs


def characteristic_projection_check(sys: FiniteSystem, functions, projections=None) -> float:
    """Worst slot of  i ||f_i - g_i||_k - ||avg(f) - avg(f with f_i -> g_i)||_{L^2}.

    ``g_i`` defaults to the constant E f_i. Full-period averages on a cyclic
    rotation; the inequality follows from the linear seminorm bound applied
    to the difference, which is multilinear in slot i.
    """
    require_rotation(sys)
    fs = _sup_check(sys, functions)
    k = len(fs)
    if projections is None:
        projections = [np.full(sys.M, sys.integrate(f)) for f in fs]
    gs = _sup_check(sys, projections, "projection")
    base = full_period_linear(sys, fs)
    worst = math.inf
    for i in range(k):
        swapped = list(fs)
        swapped[i] = gs[i]
        diff = sys.l2_norm(base - full_period_linear(sys, swapped))
        bound = (i + 1) * hk_seminorm_recursive(sys, fs[i] - gs[i], k)
        worst = min(worst, bound - diff)
    return worst


# serialization

def series_to_csv(series: CesaroSeries, path=None) -> str:
    """CSV with columns N,value_re,value_im,l2_norm,cauchy_tail.

    Function-valued averages are reported by their integral in value_*.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "value_re", "value_im", "l2_norm", "cauchy_tail"])
    vals = series.scalar_values()
    for N, v, l2, tail in zip(series.checkpoints, vals, series.l2_norms, series.cauchy_tail):
        w.writerow([int(N), format(v.real, ".17g"), format(v.imag, ".17g"),
                    format(float(l2), ".17g"), format(float(tail), ".17g")])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def vertex_label(e: int, k: int) -> str:
    return "".join(map(str, vertex_bits(e, k)))
