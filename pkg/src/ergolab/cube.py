"""Vertices of the discrete cube {0,1}^k and its isometry group.

Vertices are indexed by integers in epsilon-lexicographic order: the
vertex eps_1 eps_2 ... eps_k has index sum eps_i * 2**(k - i), so eps_1 is
the most significant bit and 00..0 comes first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class CubeVertex:
    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise InputError(f"invalid cube vertex {self.bits!r}")

    @property
    def k(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def index(self) -> int:
        return vertex_index(self.bits)

    def dot(self, t) -> int:
        return sum(b * ti for b, ti in zip(self.bits, t))

    def __str__(self):
        return "".join(map(str, self.bits))

    @classmethod
    def from_index(cls, index: int, k: int) -> "CubeVertex":
        return cls(vertex_bits(index, k))

    @classmethod
    def parse(cls, label: str) -> "CubeVertex":
        return cls(tuple(int(c) for c in label))


def vertex_bits(index: int, k: int) -> tuple[int, ...]:
    return tuple((index >> (k - 1 - i)) & 1 for i in range(k))


def vertex_index(bits) -> int:
    out = 0
    for b in bits:
        out = 2 * out + int(b)
    return out


def vertices(k: int) -> list[CubeVertex]:
    return [CubeVertex.from_index(e, k) for e in range(2**k)]


def bit_matrix(k: int) -> np.ndarray:
    """(2**k, k) array; row e holds the bits of vertex e."""
    e = np.arange(2**k)[:, None]
    return (e >> (k - 1 - np.arange(k))[None, :]) & 1


def popcounts(k: int) -> np.ndarray:
    return bit_matrix(k).sum(axis=1)


def cube_isometry(k: int, digit_perm=None, flips=None) -> np.ndarray:
    """The vertex permutation sigma given by a digit permutation and digit flips.

    sigma(eps)_i = eps_{digit_perm[i]} xor flips[i]. Returned as an index
    array ``sigma`` with ``sigma[e]`` the image of vertex ``e``.
    """
    digit_perm = tuple(range(k)) if digit_perm is None else tuple(digit_perm)
    flips = (0,) * k if flips is None else tuple(int(b) for b in flips)
    if sorted(digit_perm) != list(range(k)) or len(flips) != k or any(b not in (0, 1) for b in flips):
        raise InputError("digit_perm must permute range(k) and flips must be k bits")
    bits = bit_matrix(k)
    image = bits[:, list(digit_perm)] ^ np.array(flips)[None, :]
    weights = 2 ** (k - 1 - np.arange(k))
    return image @ weights


def all_cube_isometries(k: int) -> list[np.ndarray]:
    """All 2**k * k! isometries of the k-cube as vertex permutations."""
    out = []
    for perm in itertools.permutations(range(k)):
        for flips in itertools.product((0, 1), repeat=k):
            out.append(cube_isometry(k, perm, flips))
    return out


def is_cube_isometry(sigma, k: int) -> bool:
    """True iff the vertex permutation preserves Hamming distance."""
    sigma = np.asarray(sigma)
    if sigma.shape != (2**k,) or sorted(sigma.tolist()) != list(range(2**k)):
        return False
    bits = bit_matrix(k)
    dist = (bits[:, None, :] != bits[None, :, :]).sum(axis=2)
    return bool(np.array_equal(dist, dist[np.ix_(sigma, sigma)]))


def side(k: int, coordinate: int, bit: int) -> np.ndarray:
    """Boolean mask of the side {eps : eps_coordinate = bit}; coordinate is 1-based."""
    if not 1 <= coordinate <= k or bit not in (0, 1):
        raise InputError(f"invalid side ({coordinate}, {bit}) for k={k}")
    return bit_matrix(k)[:, coordinate - 1] == bit
