"""Progression-counting forms on Z/NZ.

Progressions are cyclic: x, x+y, ..., x+(l-1)y are read mod N. Counts of
genuine progressions inside the interval {0, ..., N-1} (no wrap-around) are
reported separately as ``interval_count``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InputError
from .gowers import gowers_norm_recursive
from .harmonic import GroupFunction, as_group_function, fourier_transform

_BOUND_TOL = 1e-12


class ProgressionForm:
    """The functions f_0, ..., f_{l-1} fed to the counting form."""

    def __init__(self, functions):
        functions = [as_group_function(f) for f in functions]
        if len(functions) < 2:
            raise InputError("a progression form needs at least 2 functions")
        N = functions[0].N
        if any(f.N != N for f in functions):
            raise InputError("progression form functions live on different groups")
        self.functions = tuple(functions)
        self.N = N

    @property
    def ell(self) -> int:
        return len(self.functions)

    @classmethod
    def diagonal(cls, f, ell: int) -> "ProgressionForm":
        return cls([f] * ell)


def _form(functions) -> ProgressionForm:
    return functions if isinstance(functions, ProgressionForm) else ProgressionForm(functions)


def ap_form(form) -> complex:
    """(1/N^2) sum_{x,y} prod_i f_i(x + i y), evaluated directly."""
    form = _form(form)
    N = form.N
    x = np.arange(N)[:, None]
    y = np.arange(N)[None, :]
    prod = np.ones((N, N), dtype=np.complex128)
    for i, f in enumerate(form.functions):
        prod *= f.values[(x + i * y) % N]
    return complex(prod.sum()) / N**2


def ap_form_fft3(f0, f1, f2) -> complex:
    """Three-term form via sum_xi f0^(xi) f1^(-2 xi) f2^(xi)."""
    form = ProgressionForm([f0, f1, f2])
    N = form.N
    h0, h1, h2 = (fourier_transform(f).coefficients for f in form.functions)
    xi = np.arange(N)
    return complex(np.sum(h0 * h1[(-2 * xi) % N] * h2))


@dataclass(frozen=True)
class APReport:
    N: int
    ell: int
    set_size: int
    nondegenerate_count: int
    inclusive_count: int
    lambda_value: float
    interval_count: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        d = self.to_dict()
        d["lambda_value"] = float(format(self.lambda_value, ".17g"))
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str) -> "APReport":
        return cls(**json.loads(text))


def _subset(A, N: int) -> np.ndarray:
    members = np.zeros(N, dtype=bool)
    for a in A:
        members[int(a) % N] = True
    return members


def count_aps(A, ell: int, N: int) -> APReport:
    """Exhaustive progression counts for A inside Z/NZ.

    ``nondegenerate_count`` counts pairs (a, d) with d in 1..N-1 and every
    a + i d (mod N) in A; ``inclusive_count`` adds d = 0 and equals
    N^2 * ap_form on indicators.
    """
    if ell < 2:
        raise InputError(f"progression length must be >= 2, got {ell}")
    members = _subset(A, N)
    a = np.arange(N)[:, None]
    d = np.arange(N)[None, :]
    ok = np.ones((N, N), dtype=bool)
    for i in range(ell):
        ok &= members[(a + i * d) % N]
    inclusive = int(ok.sum())
    nondegenerate = int(ok[:, 1:].sum())

    interval = 0
    for dd in range(1, N):
        span = (ell - 1) * dd
        if span > N - 1:
            break
        starts = np.arange(N - span)
        hit = np.ones(len(starts), dtype=bool)
        for i in range(ell):
            hit &= members[starts + i * dd]
        interval += int(hit.sum())

    ind = GroupFunction(members.astype(np.complex128))
    lam = ap_form(ProgressionForm.diagonal(ind, ell)).real
    return APReport(N=N, ell=ell, set_size=int(members.sum()), nondegenerate_count=nondegenerate,
                    inclusive_count=inclusive, lambda_value=lam, interval_count=interval)


def check_bounded(functions, what: str = "function") -> None:
    for i, f in enumerate(functions):
        f = as_group_function(f)
        if f.sup_norm() > 1 + _BOUND_TOL:
            raise InputError(f"{what} {i} violates |f| <= 1 (sup = {f.sup_norm():.17g})")


def von_neumann_gap(form) -> float:
    """min_i ||f_i||_{l-1} - |Lambda_l(f_0, ..., f_{l-1})|.

    Requires |f_i| <= 1 pointwise. For l = 2 the U^1 seminorm |E f| is used.
    """
    form = _form(form)
    check_bounded(form.functions)
    k = form.ell - 1
    bound = min(gowers_norm_recursive(f, k) for f in form.functions)
    return bound - abs(ap_form(form))


def mean_uniform_split(f) -> tuple[complex, GroupFunction]:
    """(E f, f - E f)."""
    f = as_group_function(f)
    m = complex(np.mean(f.values))
    return m, GroupFunction(f.values - m, f.group)


def empirical_min_density_form(N: int, ell: int, density: float, trials: int,
                               rng: np.random.Generator) -> dict:
    """Smallest Lambda_l(1_A) seen over random sets of the given density.

    Exploratory only: random sets say nothing normative about the extremal
    constants in Szemeredi's theorem.
    """
    size = max(1, int(round(density * N)))
    best = None
    for _ in range(trials):
        A = rng.choice(N, size=size, replace=False)
        lam = ap_form(ProgressionForm.diagonal(GroupFunction.indicator(N, A), ell)).real
        if best is None or lam < best[0]:
            best = (lam, sorted(int(a) for a in A))
    return {"N": N, "ell": ell, "density": size / N, "trials": trials,
            "min_lambda": best[0], "argmin_set": best[1], "normative": False}
