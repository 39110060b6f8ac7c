"""The two explicit 2-step nilsystems: the skew map on T^2 and the Heisenberg nilmanifold.

Skew system: T(x, y) = (x + a, y + 2x + a) on the 2-torus.

Heisenberg system: G = R^3 with (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y'),
lattice Z^3, X = G / Z^3, and T the left translation by a fixed element.
The fundamental domain is [0, 1)^3 reached by right multiplication with a
lattice element (see ``reduce_mod_lattice``); other domains are possible and
this one is a choice.

Parameters may be exact ``Fraction``s (periodic, reproducible cases) or
floats. Ergodicity is never inferred from a float: callers state it with
``declared_ergodic`` and the flag is carried into metadata.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InputError

SNAP = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_BLOCK = 4096


def frac(v):
    """v mod 1 in [0, 1); floats within SNAP of 1 are snapped to 0."""
    if isinstance(v, (Fraction, int)):
        return Fraction(v) - math.floor(v)
    r = v - math.floor(v)
    if r >= 1.0 - SNAP:
        r = 0.0
    return r


def floor_snap(v) -> int:
    """floor(v), counting floats within SNAP below an integer as that integer (matches ``frac``)."""
    n = math.floor(v)
    if not isinstance(v, (Fraction, int)) and v - n >= 1.0 - SNAP:
        n += 1
    return n


def frac_array(v: np.ndarray) -> np.ndarray:
    r = v - np.floor(v)
    r[r >= 1.0 - SNAP] = 0.0
    return r


def parse_rotation(value):
    """Accept 'golden', 'p/q', a float string, a Fraction or a float."""
    if isinstance(value, (Fraction, float, int)):
        return value
    text = str(value).strip().lower()
    if text in ("golden", "phi"):
        return GOLDEN
    if "/" in text:
        return Fraction(text)
    try:
        return float(text)
    except ValueError as exc:
        raise InputError(f"cannot parse rotation parameter {value!r}") from exc


# skew system

@dataclass(frozen=True)
class SkewPoint:
    x: float | Fraction
    y: float | Fraction

    def __post_init__(self):
        for v in (self.x, self.y):
            if not 0 <= v < 1:
                raise InputError(f"torus coordinates must lie in [0, 1), got {v!r}")


@dataclass(frozen=True)
class SkewParams:
    alpha: float | Fraction
    declared_ergodic: bool | None = None

    def __post_init__(self):
        a = self.alpha
        if isinstance(a, Fraction):
            if a.denominator < 1:
                raise InputError("rotation denominator must be >= 1")
        elif not math.isfinite(a):
            raise InputError("rotation number must be finite")

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, Fraction)

    def metadata(self) -> dict:
        return {"system": "skew", "alpha": str(self.alpha), "exact": self.exact,
                "declared_ergodic": self.declared_ergodic}


def skew_step(p: SkewPoint, alpha) -> SkewPoint:
    """T(x, y) = (x + alpha, y + 2x + alpha) mod 1."""
    return SkewPoint(frac(p.x + alpha), frac(p.y + 2 * p.x + alpha))


class SkewSystem:
    def __init__(self, alpha, declared_ergodic: bool | None = None):
        if isinstance(alpha, SkewParams):
            self.params = alpha
        else:
            self.params = SkewParams(parse_rotation(alpha), declared_ergodic)
        self.alpha = self.params.alpha

    def step(self, p: SkewPoint) -> SkewPoint:
        return skew_step(p, self.alpha)

    def orbit(self, start: SkewPoint, n: int) -> np.ndarray:
        """Coordinates of T^0 start, ..., T^(n-1) start as an (n, 2) float array.

        x_n = frac(x + n alpha); y is accumulated block-wise from the
        increments 2 x_j + alpha and reduced mod 1 at every block boundary.
        """
        a = float(self.alpha)
        x0, y0 = float(start.x), float(start.y)
        idx = np.arange(n, dtype=np.float64)
        xs = frac_array(x0 + idx * frac(a))
        inc = frac_array(2.0 * xs + a)
        ys = np.empty(n)
        carry = y0
        for lo in range(0, n, _BLOCK):
            blk = inc[lo:lo + _BLOCK]
            csum = np.cumsum(blk)
            ys[lo:lo + len(blk)] = carry + np.concatenate(([0.0], csum[:-1]))
            carry = frac(carry + csum[-1])
        return np.column_stack([xs, frac_array(ys)])

    def metadata(self) -> dict:
        return self.params.metadata()


# Heisenberg group

@dataclass(frozen=True)
class HeisenbergElement:
    x: float | Fraction
    y: float | Fraction
    z: float | Fraction

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not isinstance(v, Fraction) and not math.isfinite(v):
                raise InputError("Heisenberg coordinates must be finite")

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return heisenberg_mul(self, other)

    def as_tuple(self):
        return (self.x, self.y, self.z)


IDENTITY = HeisenbergElement(0, 0, 0)


@dataclass(frozen=True)
class HeisenbergPoint:
    """Canonical representative of a coset g Z^3, coordinates in [0, 1)."""
    x: float | Fraction
    y: float | Fraction
    z: float | Fraction

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not 0 <= v < 1:
                raise InputError(f"coset representative must lie in [0, 1)^3, got {v!r}")

    def element(self) -> HeisenbergElement:
        return HeisenbergElement(self.x, self.y, self.z)


def heisenberg_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(g.x + h.x, g.y + h.y, g.z + h.z + g.x * h.y)


def heisenberg_inverse(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.x, -g.y, -g.z + g.x * g.y)


def commutator(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    """[g, h] = g^-1 h^-1 g h."""
    gi, hi = heisenberg_inverse(g), heisenberg_inverse(h)
    return heisenberg_mul(heisenberg_mul(gi, hi), heisenberg_mul(g, h))


def reduce_mod_lattice(g: HeisenbergElement) -> HeisenbergPoint:
    """Right-multiply by (a, b, c) in Z^3 to land in [0, 1)^3.

    g (a, b, c) = (x + a, y + b, z + c + x b); a = -floor(x), b = -floor(y),
    c = -floor(z + x b). b follows the same snapping as ``frac`` so that the
    z correction matches the reported y.
    """
    b = -floor_snap(g.y)
    x = frac(g.x)
    y = frac(g.y)
    z = frac(g.z + g.x * b)
    return HeisenbergPoint(x, y, z)


def lattice_translate(g: HeisenbergElement, a: int, b: int, c: int) -> HeisenbergElement:
    return heisenberg_mul(g, HeisenbergElement(a, b, c))


def nil_step(p: HeisenbergPoint, t: HeisenbergElement) -> HeisenbergPoint:
    """Left translation t . p, reduced to the fundamental domain."""
    return reduce_mod_lattice(heisenberg_mul(t, p.element()))


class HeisenbergSystem:
    def __init__(self, t: HeisenbergElement, declared_ergodic: bool | None = None):
        self.t = t
        self.declared_ergodic = declared_ergodic

    def step(self, p: HeisenbergPoint) -> HeisenbergPoint:
        return nil_step(p, self.t)

    def orbit(self, start: HeisenbergPoint, n: int) -> np.ndarray:
        """(n, 3) array of T^j start. Coordinates reduced at every step.

        The x and y recursions are independent of z; z is advanced by
        t3 + t1 y_j + (x_j + t1) b_j mod 1 with b_j = -floor(y_j + t2),
        accumulated block-wise.
        """
        t1, t2, t3 = (float(v) for v in self.t.as_tuple())
        idx = np.arange(n, dtype=np.float64)
        x0, y0, z0 = float(start.x), float(start.y), float(start.z)
        xs = frac_array(x0 + idx * frac(t1))
        ys = frac_array(y0 + idx * frac(t2))
        # raw (unreduced) x before the right multiplication at each step
        raw_x = xs + t1
        # b_j is the lattice step that carries y_j + t2 to the reported y_{j+1}
        b = np.empty(n)
        b[:-1] = np.round(ys[1:] - ys[:-1] - t2)
        b[-1:] = np.round(frac_array(ys[-1:] + t2) - ys[-1:] - t2)
        inc = frac_array(t3 + t1 * ys + raw_x * b)
        zs = np.empty(n)
        carry = z0
        for lo in range(0, n, _BLOCK):
            blk = inc[lo:lo + _BLOCK]
            csum = np.cumsum(blk)
            zs[lo:lo + len(blk)] = carry + np.concatenate(([0.0], csum[:-1]))
            carry = frac(carry + csum[-1])
        return np.column_stack([xs, ys, frac_array(zs)])

    def metadata(self) -> dict:
        return {"system": "heisenberg", "t": [str(v) for v in self.t.as_tuple()],
                "declared_ergodic": self.declared_ergodic}


# Birkhoff averages

@dataclass
class CesaroSeries:
    """Partial Cesaro averages A_N at a doubling schedule of checkpoints.

    ``values`` holds scalars (orbit averages) or, for finite systems, one
    row per checkpoint with the average as a function on the system.
    ``cauchy_tail[j]`` is max |A_M - A_{N_j}| over M in (N_{j-1}, N_j]
    (M in [1, N_0] for the first checkpoint).
    """
    checkpoints: np.ndarray
    values: np.ndarray
    l2_norms: np.ndarray
    cauchy_tail: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        cp = np.asarray(self.checkpoints)
        if cp.size and np.any(np.diff(cp) <= 0):
            raise InputError("checkpoints must be strictly increasing")

    @property
    def final(self):
        return self.values[-1]

    @property
    def final_tail(self) -> float:
        return float(self.cauchy_tail[-1])

    def scalar_values(self) -> np.ndarray:
        """The averages themselves, or their integrals when function-valued."""
        v = np.asarray(self.values)
        if v.ndim == 1:
            return v
        w = self.metadata.get("weights")
        return v @ np.asarray(w) if w is not None else v.mean(axis=1)


def doubling_checkpoints(N: int) -> np.ndarray:
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    cps = [1]
    while cps[-1] * 2 <= N:
        cps.append(cps[-1] * 2)
    if cps[-1] != N:
        cps.append(N)
    return np.array(cps, dtype=np.int64)


def series_from_terms(terms: np.ndarray, N: int, metadata: dict | None = None) -> CesaroSeries:
    """Cesaro series of a scalar sequence terms[0..N-1]."""
    terms = np.asarray(terms, dtype=np.complex128)[:N]
    partial = np.cumsum(terms) / np.arange(1, N + 1)
    cps = doubling_checkpoints(N)
    tails = []
    prev = 0
    for c in cps:
        window = partial[prev:c]
        tails.append(float(np.max(np.abs(window - partial[c - 1]))))
        prev = c
    vals = partial[cps - 1]
    return CesaroSeries(cps, vals, np.abs(vals), np.array(tails), dict(metadata or {}))


def birkhoff_series(system, start, f: Callable, N: int) -> CesaroSeries:
    """Partial averages (1/n) sum_{j<n} f(T^j start) at doubling checkpoints up to N.

    ``system`` is a SkewSystem / HeisenbergSystem (vectorized orbit; ``f``
    receives coordinate arrays) or a plain step callable (``f`` receives
    one point at a time).
    """
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if hasattr(system, "orbit"):
        pts = system.orbit(start, N)
        terms = np.asarray(f(*pts.T), dtype=np.complex128)
        if terms.ndim == 0:
            terms = np.full(N, terms)
        meta = system.metadata()
    else:
        terms = np.empty(N, dtype=np.complex128)
        p = start
        for j in range(N):
            terms[j] = f(p)
            p = system(p)
        meta = {}
    return series_from_terms(terms, N, meta)


def e_y(x, y, *rest):
    return np.exp(2j * np.pi * np.asarray(y))


def e_x(x, *rest):
    return np.exp(2j * np.pi * np.asarray(x))


def e_z(x, y, z):
    return np.exp(2j * np.pi * np.asarray(z))


OBSERVABLES = {"e_x": e_x, "e_y": e_y, "e_z": e_z, "one": lambda *c: np.ones_like(c[0], dtype=complex)}


# serialization

def _emit(rows, header, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def orbit_to_csv(points: np.ndarray, path=None) -> str:
    """CSV n,x,y (skew) or n,x,y,z (Heisenberg), 17 significant digits."""
    points = np.asarray(points, dtype=np.float64)
    header = ["n", "x", "y", "z"][: points.shape[1] + 1]
    rows = ([n] + [format(v, ".17g") for v in row] for n, row in enumerate(points.tolist()))
    return _emit(rows, header, path)


def series_to_csv(series: CesaroSeries, path=None) -> str:
    """CSV N,re,im,abs of a scalar Cesaro series."""
    vals = series.scalar_values()
    rows = ([int(N), format(v.real, ".17g"), format(v.imag, ".17g"), format(abs(v), ".17g")]
            for N, v in zip(series.checkpoints, vals.tolist()))
    return _emit(rows, ["N", "re", "im", "abs"], path)
