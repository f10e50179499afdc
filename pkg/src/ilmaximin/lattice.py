"""Interleaved lattices between the even lattice and the integer lattice.

A lattice L with 2Z^p inside L inside Z^p is fixed by its parity code
C = L mod 2, so :class:`Lattice` just wraps a :class:`~ilmaximin.gf2.Code`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .gf2 import Code, codewords, enumerate_subspaces, rref, unit_vector

DEFAULT_POINT_CAP = 10**7


@dataclass(frozen=True)
class Lattice:
    code: Code

    @classmethod
    def from_rows(cls, rows, p: int | None = None) -> "Lattice":
        return cls(rref(rows, p))

    @classmethod
    def full(cls, p: int) -> "Lattice":
        return cls(Code(p, tuple(unit_vector(k, p) for k in range(p))))

    @property
    def p(self) -> int:
        return self.code.p

    @cached_property
    def words(self) -> tuple[int, ...]:
        return tuple(codewords(self.code))

    @cached_property
    def unit_mask(self) -> int:
        """Bitmask of coordinates k with e_k in L."""
        word_set = set(self.words)
        mask = 0
        for k in range(self.p):
            e = unit_vector(k, self.p)
            if e in word_set:
                mask |= e
        return mask

    @property
    def is_standard(self) -> bool:
        return self.code.support == (1 << self.p) - 1

    def contains_unit(self, k: int) -> bool:
        return bool(self.unit_mask & unit_vector(k, self.p))

    def __repr__(self) -> str:
        return f"Lattice({self.code!r})"


def check_span(s: Sequence[int], p: int, minimum: int = 1) -> tuple[int, ...]:
    s = tuple(int(x) for x in s)
    if len(s) != p:
        raise InvalidInputError(f"span vector has length {len(s)}, expected {p}")
    if any(x < minimum for x in s):
        raise InvalidInputError(f"span entries must be >= {minimum}, got {s}")
    return s


def q_of(lat: Lattice) -> int:
    return lat.code.dim


def r_of(lat: Lattice) -> int:
    return lat.unit_mask.bit_count()


def l0_codewords(lat: Lattice) -> list[int]:
    """Codewords (zero included) whose support avoids every k with e_k in L."""
    units = lat.unit_mask
    return [c for c in lat.words if not c & units]


def standard_lattices(p: int) -> list[Lattice]:
    return [Lattice(c) for c in enumerate_subspaces(p) if c.support == (1 << p) - 1]


def point_count(lat: Lattice, s: Sequence[int]) -> int:
    """|L ∩ prod_k {0..s_k-1}| as a sum over parity classes.

    A coordinate with parity 0 has ceil(s/2) admissible values in 0..s-1, one
    with parity 1 has floor(s/2).
    """
    p = lat.p
    s = check_span(s, p)
    even = [(x + 1) // 2 for x in s]
    odd = [x // 2 for x in s]
    total = 0
    for c in lat.words:
        prod = 1
        for k in range(p):
            prod *= odd[k] if (c >> (p - 1 - k)) & 1 else even[k]
            if not prod:
                break
        total += prod
    return total


def point_count_bounds(lat: Lattice, s: Sequence[int]) -> tuple[int, int]:
    """Lower and upper size bounds for any L-based design with span ``s``."""
    p = lat.p
    s = check_span(s, p)
    lo = hi = 1
    for k in range(p):
        if lat.contains_unit(k):
            lo *= s[k]
            hi *= s[k]
        else:
            lo *= 2 * (s[k] // 2)
            hi *= 2 * ((s[k] + 1) // 2)
    shift = p - lat.code.dim
    # the 2**(q-p) factor divides exactly: each of the p-r non-unit coordinates contributes a factor 2
    return lo >> shift, hi >> shift


def points_in_box(lat: Lattice, s: Sequence[int], cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Integer points of L in prod_k {0..s_k-1}, lexicographically sorted, as an (m, p) array."""
    p = lat.p
    s = check_span(s, p)
    m = point_count(lat, s)
    if m > cap:
        raise ResourceLimitError(f"{m} lattice points exceed the cap of {cap}")
    blocks = []
    for c in lat.words:
        axes = []
        for k in range(p):
            start = (c >> (p - 1 - k)) & 1
            axes.append(np.arange(start, s[k], 2, dtype=np.int64))
        if any(a.size == 0 for a in axes):
            continue
        grid = np.meshgrid(*axes, indexing="ij")
        blocks.append(np.stack([g.ravel() for g in grid], axis=1))
    pts = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, p), dtype=np.int64)
    order = np.lexsort(pts.T[::-1])
    return pts[order]
