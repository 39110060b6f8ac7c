"""Functions on Z/NZ with the uniform probability measure, and their Fourier analysis.

Fourier convention: the forward transform carries the 1/N,

    fhat(xi) = (1/N) * sum_x f(x) * exp(-2 pi i x xi / N),

so that inversion is a plain sum over frequencies, Parseval reads
``sum |fhat|^2 == mean |f|^2`` and the second Gowers norm is exactly the
l^4 norm of ``fhat``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class CyclicGroup:
    order: int

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise InputError(f"group order must be a positive integer, got {self.order!r}")

    def reduce(self, t: int) -> int:
        return int(t) % self.order

    def elements(self) -> np.ndarray:
        return np.arange(self.order)


class GroupFunction:
    """A complex-valued function on Z/NZ. Values are stored read-only."""

    __slots__ = ("group", "values")

    def __init__(self, values, group: CyclicGroup | None = None):
        arr = np.array(values, dtype=np.complex128).reshape(-1)
        if group is None:
            group = CyclicGroup(max(len(arr), 1))
        if arr.shape[0] != group.order:
            raise InputError(f"expected {group.order} values, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise InputError("function values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GroupFunction is immutable")

    @property
    def N(self) -> int:
        return self.group.order

    def __len__(self):
        return self.group.order

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __getitem__(self, x):
        return self.values[np.asarray(x) % self.N]

    def __eq__(self, other):
        if not isinstance(other, GroupFunction):
            return NotImplemented
        return self.group == other.group and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.N, self.values.tobytes()))

    def __repr__(self):
        return f"GroupFunction(N={self.N}, values={self.values!r})"

    def __add__(self, other):
        other = _coerce_like(other, self)
        return GroupFunction(self.values + other.values, self.group)

    def __sub__(self, other):
        other = _coerce_like(other, self)
        return GroupFunction(self.values - other.values, self.group)

    def __mul__(self, other):
        if np.isscalar(other):
            return GroupFunction(self.values * other, self.group)
        return pointwise_multiply(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return GroupFunction(-self.values, self.group)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.N else 0.0

    # constructors

    @classmethod
    def constant(cls, N: int, c: complex = 1.0):
        return cls(np.full(N, c, dtype=np.complex128))

    @classmethod
    def indicator(cls, N: int, subset):
        v = np.zeros(N, dtype=np.complex128)
        idx = np.asarray(list(subset), dtype=np.int64)
        if idx.size:
            v[idx % N] = 1.0
        return cls(v)

    @classmethod
    def character(cls, N: int, xi: int):
        """x -> exp(2 pi i x xi / N)."""
        x = np.arange(N)
        return cls(np.exp(2j * np.pi * ((x * xi) % N) / N))

    @classmethod
    def random(cls, N: int, rng: np.random.Generator, kind: str = "disk"):
        """Random function with |f| <= 1.

        kind: ``disk`` (uniform in the unit disk), ``sign`` (+-1),
        ``phase`` (unit modulus) or ``unit`` (real in [0, 1]).
        """
        if kind == "disk":
            r = np.sqrt(rng.random(N))
            v = r * np.exp(2j * np.pi * rng.random(N))
        elif kind == "sign":
            v = rng.choice([-1.0, 1.0], size=N).astype(np.complex128)
        elif kind == "phase":
            v = np.exp(2j * np.pi * rng.random(N))
        elif kind == "unit":
            v = rng.random(N).astype(np.complex128)
        else:
            raise InputError(f"unknown random kind {kind!r}")
        return cls(v)


RANDOM_KINDS = ("disk", "sign", "phase", "unit")


class FourierCoefficients:
    """Coefficients fhat(xi), xi in Z/NZ, under the 1/N-forward convention."""

    __slots__ = ("group", "coefficients")

    def __init__(self, coefficients, group: CyclicGroup | None = None):
        arr = np.array(coefficients, dtype=np.complex128).reshape(-1)
        if group is None:
            group = CyclicGroup(len(arr))
        if arr.shape[0] != group.order:
            raise InputError(f"expected {group.order} coefficients, got {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coefficients", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FourierCoefficients is immutable")

    def __array__(self, dtype=None, copy=None):
        return self.coefficients if dtype is None else self.coefficients.astype(dtype)

    def __getitem__(self, xi):
        return self.coefficients[np.asarray(xi) % self.group.order]

    def __len__(self):
        return self.group.order

    def __repr__(self):
        return f"FourierCoefficients(N={self.group.order}, coefficients={self.coefficients!r})"


def as_group_function(f, N: int | None = None) -> GroupFunction:
    if isinstance(f, GroupFunction):
        if N is not None and f.N != N:
            raise InputError(f"group mismatch: Z/{f.N} vs Z/{N}")
        return f
    gf = GroupFunction(f)
    if N is not None and gf.N != N:
        raise InputError(f"group mismatch: Z/{gf.N} vs Z/{N}")
    return gf


def _coerce_like(other, ref: GroupFunction) -> GroupFunction:
    if np.isscalar(other):
        return GroupFunction.constant(ref.N, other)
    other = as_group_function(other)
    if other.group != ref.group:
        raise InputError(f"group mismatch: Z/{ref.N} vs Z/{other.N}")
    return other


def mean(f) -> complex:
    f = as_group_function(f)
    return complex(np.mean(f.values))


def shift(f, t: int) -> GroupFunction:
    """x -> f(x + t)."""
    f = as_group_function(f)
    return GroupFunction(np.roll(f.values, -(int(t) % f.N)), f.group)


def conjugate(f) -> GroupFunction:
    f = as_group_function(f)
    return GroupFunction(np.conj(f.values), f.group)


def pointwise_multiply(f, g) -> GroupFunction:
    f = as_group_function(f)
    g = as_group_function(g)
    if f.group != g.group:
        raise InputError(f"group mismatch: Z/{f.N} vs Z/{g.N}")
    return GroupFunction(f.values * g.values, f.group)


def dft_matrix(N: int, inverse: bool = False) -> np.ndarray:
    x = np.arange(N)
    phase = np.outer(x, x) % N
    sign = 1.0 if inverse else -1.0
    return np.exp(sign * 2j * np.pi * phase / N)


def fourier_transform(f, naive: bool = False) -> FourierCoefficients:
    """Forward transform with the 1/N normalization.

    ``naive=True`` evaluates the O(N^2) sum directly; it is the oracle path
    for the FFT route.
    """
    f = as_group_function(f)
    if naive:
        coeffs = dft_matrix(f.N) @ f.values / f.N
    else:
        coeffs = np.fft.fft(f.values) / f.N
    return FourierCoefficients(coeffs, f.group)


def inverse_fourier_transform(fhat, naive: bool = False) -> GroupFunction:
    """f(x) = sum_xi fhat(xi) exp(2 pi i x xi / N)."""
    if not isinstance(fhat, FourierCoefficients):
        fhat = FourierCoefficients(fhat)
    N = fhat.group.order
    if naive:
        vals = dft_matrix(N, inverse=True) @ fhat.coefficients
    else:
        vals = np.fft.ifft(fhat.coefficients) * N
    return GroupFunction(vals, fhat.group)


# CSV: header index,re,im; rows in ascending index order.

def group_function_to_csv(f, path=None) -> str:
    f = as_group_function(f)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(f.values):
        w.writerow([i, format(v.real, ".17g"), format(v.imag, ".17g")])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def group_function_from_csv(source) -> GroupFunction:
    """Parse a GroupFunction from CSV text or a path.

    Raises InputError naming the offending row (1-based, header is row 1).
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["index", "re", "im"]:
        raise InputError("row 1: expected header 'index,re,im'")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise InputError(f"row {lineno}: expected 3 fields, got {len(row)}")
        try:
            idx = int(row[0])
            re, im = float(row[1]), float(row[2])
        except ValueError as exc:
            raise InputError(f"row {lineno}: {exc}") from exc
        if idx != len(values):
            raise InputError(f"row {lineno}: index {idx} out of order, expected {len(values)}")
        if not (np.isfinite(re) and np.isfinite(im)):
            raise InputError(f"row {lineno}: non-finite value")
        values.append(complex(re, im))
    if not values:
        raise InputError("no data rows")
    return GroupFunction(values)
