"""Linear algebra over GF(2) on bit-packed vectors.

A vector of length ``p`` is a plain ``int``. Coordinate ``k`` (0-based) lives
in bit ``p - 1 - k``, so ``format(v, f"0{p}b")`` reads dimension 1 first and
integer order coincides with lexicographic order of the bit strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidInputError, ResourceLimitError, UnsupportedDimensionError

MAX_LENGTH = 64
MAX_ENUM_LENGTH = 5
MAX_CODEWORDS_DIM = 24
# feasible_code works on 2**p-bit set masks
MAX_FEASIBLE_LENGTH = 12


def to_bitstring(v: int, p: int) -> str:
    return format(v, f"0{p}b")


def from_bitstring(text: str) -> int:
    if not text or any(ch not in "01" for ch in text):
        raise InvalidInputError(f"not a bit string: {text!r}")
    return int(text, 2)


def unit_vector(k: int, p: int) -> int:
    """e_k for 0-based ``k``."""
    return 1 << (p - 1 - k)


def support_bits(v: int, p: int) -> list[int]:
    """0-based coordinates where ``v`` is one."""
    return [k for k in range(p) if (v >> (p - 1 - k)) & 1]


def _check_length(p: int) -> None:
    if not isinstance(p, int) or p < 1 or p > MAX_LENGTH:
        raise InvalidInputError(f"vector length must be in 1..{MAX_LENGTH}, got {p}")


def _coerce_rows(rows, p: int | None) -> tuple[list[int], int]:
    ints = []
    for row in rows:
        if isinstance(row, str):
            if p is None:
                p = len(row)
            elif len(row) != p:
                raise InvalidInputError(f"mixed vector lengths: {len(row)} vs {p}")
            ints.append(from_bitstring(row))
        else:
            ints.append(int(row))
    if p is None:
        raise InvalidInputError("vector length p is required for integer rows")
    _check_length(p)
    for v in ints:
        if v < 0 or v >> p:
            raise InvalidInputError(f"vector {v} does not fit in {p} bits")
    return ints, p


@dataclass(frozen=True)
class Code:
    """A binary linear code held as its canonical RREF basis.

    Rows are sorted by decreasing pivot value (pivots left to right) and each
    pivot column has a single one, so equal subspaces compare equal.
    """

    p: int
    basis: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def support(self) -> int:
        acc = 0
        for b in self.basis:
            acc |= b
        return acc

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.dim, "basis": [to_bitstring(b, self.p) for b in self.basis]}

    @classmethod
    def from_json(cls, obj: dict) -> "Code":
        code = rref(obj["basis"], obj["p"])
        if code.dim != obj.get("q", code.dim) or list(code.basis) != [from_bitstring(b) for b in obj["basis"]]:
            raise InvalidInputError("serialized basis is not a canonical RREF basis")
        return code

    def __repr__(self) -> str:
        rows = ",".join(to_bitstring(b, self.p) for b in self.basis)
        return f"Code(p={self.p}, basis={{{rows}}})"


def _reduce(v: int, basis: Sequence[int]) -> int:
    for b in basis:
        if v >> (b.bit_length() - 1) & 1:
            v ^= b
    return v


def rref(rows, p: int | None = None) -> Code:
    """Canonical reduced row echelon basis of the span of ``rows``.

    ``rows`` may be bit strings (length inferred and checked) or ints (``p``
    required).
    """
    ints, p = _coerce_rows(rows, p)
    basis: list[int] = []
    for v in ints:
        v = _reduce(v, basis)
        if not v:
            continue
        pivot = v.bit_length() - 1
        basis = [b ^ v if (b >> pivot) & 1 else b for b in basis]
        basis.append(v)
    basis.sort(reverse=True)
    return Code(p, tuple(basis))


def member(code: Code, v) -> bool:
    if isinstance(v, str):
        if len(v) != code.p:
            raise InvalidInputError(f"vector length {len(v)} != code length {code.p}")
        v = from_bitstring(v)
    elif v < 0 or v >> code.p:
        raise InvalidInputError(f"vector {v} does not fit in {code.p} bits")
    return _reduce(v, code.basis) == 0


def enumerate_subspaces(p: int) -> Iterator[Code]:
    """Every linear subspace of GF(2)^p exactly once.

    Order: by dimension, then pivot columns (lexicographic), then the free
    entries as a binary counter.
    """
    if not isinstance(p, int) or p < 1 or p > MAX_ENUM_LENGTH:
        raise UnsupportedDimensionError(f"subspace enumeration supports 1 <= p <= {MAX_ENUM_LENGTH}, got {p}")
    for k in range(p + 1):
        for pivots in itertools.combinations(range(p), k):
            pivot_set = set(pivots)
            # free cells: (row index, column) right of the row pivot, not a pivot column
            free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, p) if c not in pivot_set]
            for fill in range(1 << len(free)):
                rows = [1 << (p - 1 - pc) for pc in pivots]
                for j, (i, c) in enumerate(free):
                    if (fill >> (len(free) - 1 - j)) & 1:
                        rows[i] |= 1 << (p - 1 - c)
                yield Code(p, tuple(rows))


def codewords(code: Code) -> list[int]:
    """All 2**dim codewords in increasing integer order.

    The order is lexicographic over coefficient vectors with the first basis
    row as most significant coefficient; for an RREF basis this is also
    increasing integer order.
    """
    if code.dim > MAX_CODEWORDS_DIM:
        raise ResourceLimitError(f"refusing to list 2**{code.dim} codewords")
    words = [0]
    for b in reversed(code.basis):
        words += [w ^ b for w in words]
    return words


# ---------------------------------------------------------------------------
# set-mask machinery for feasible_code: a set of vectors of GF(2)^p is an int
# whose bit v is set when vector v belongs to the set


@lru_cache(maxsize=None)
def _block_masks(p: int) -> tuple[int, ...]:
    size = 1 << p
    masks = []
    for i in range(p):
        m = 0
        for v in range(size):
            if not (v >> i) & 1:
                m |= 1 << v
        masks.append(m)
    return tuple(masks)


@lru_cache(maxsize=None)
def _coordinate_masks(p: int) -> tuple[int, ...]:
    """Entry k: the set of vectors with bit k (counted from the least significant) set."""
    full = (1 << (1 << p)) - 1
    return tuple(full & ~m for m in _block_masks(p))


def _translate(mask: int, v: int, p: int) -> int:
    """The set {x ^ v : x in mask}."""
    blocks = _block_masks(p)
    i = 0
    while v:
        if v & 1:
            step = 1 << i
            lo = blocks[i]
            mask = ((mask & lo) << step) | ((mask >> step) & lo)
        v >>= 1
        i += 1
    return mask


def _mask_of(vectors) -> int:
    m = 0
    for v in vectors:
        m |= 1 << v
    return m


def feasible_code(p: int, q: int, required=(), forbidden=(), full_support: bool = True) -> Code | None:
    """Some code of dimension ``q`` containing ``required`` and avoiding ``forbidden``.

    With ``full_support`` the code must also have a one in every coordinate.
    Returns None when no such code exists. The search is a depth-first basis
    extension that visits coset representatives in increasing order, so the
    answer is deterministic.
    """
    if not isinstance(p, int) or p < 1 or p > MAX_FEASIBLE_LENGTH:
        raise UnsupportedDimensionError(f"feasible_code supports 1 <= p <= {MAX_FEASIBLE_LENGTH}, got {p}")
    req, _ = _coerce_rows(required, p)
    forb, _ = _coerce_rows(forbidden, p)
    if not 0 <= q <= p:
        raise InvalidInputError(f"dimension q={q} outside 0..{p}")
    if set(req) & set(forb):
        return None
    return _feasible(p, q, rref(req, p).basis, _mask_of(forb), bool(full_support))


def feasible_code_masked(p: int, q: int, required_basis: tuple[int, ...], forbidden_mask: int,
                         full_support: bool = True) -> Code | None:
    """Unchecked variant of :func:`feasible_code` taking an RREF basis and a set mask."""
    return _feasible(p, q, required_basis, forbidden_mask, full_support)


@lru_cache(maxsize=1 << 16)
def _feasible(p: int, q: int, required_basis: tuple[int, ...], forbidden: int, full_support: bool) -> Code | None:
    if forbidden & 1:
        return None
    d0 = len(required_basis)
    if d0 > q:
        return None
    full = (1 << (1 << p)) - 1
    all_ones = (1 << p) - 1
    span = 1
    bad = forbidden
    sup = 0
    for b in required_basis:
        span |= _translate(span, b, p)
        bad |= _translate(bad, b, p)
        sup |= b
    if span & forbidden:
        return None
    if p - q < q - d0:
        return _feasible_dual(p, q, required_basis, forbidden, full_support)
    seen: set[int] = set()
    chosen: list[int] = list(required_basis)
    has_bit = _coordinate_masks(p)

    def extend(span: int, bad: int, sup: int, dim: int) -> bool:
        if dim == q:
            return not full_support or sup == all_ones
        if span in seen:
            return False
        seen.add(span)
        cand = full & ~(span | bad)
        if cand.bit_count() < (1 << q) - (1 << dim):
            return False
        if full_support:
            missing = all_ones & ~sup
            for k in range(p):
                if (missing >> k) & 1 and not cand & has_bit[k]:
                    return False
            if dim == q - 1:
                # the last coset must cover every missing coordinate
                for k in range(p):
                    if (missing >> k) & 1:
                        cand &= has_bit[k]
                if not cand:
                    return False
                chosen.append((cand & -cand).bit_length() - 1)
                return True
        while cand:
            v = (cand & -cand).bit_length() - 1
            coset = _translate(span, v, p)
            cand &= ~coset
            if dim + 1 < q and span | coset in seen:
                continue
            chosen.append(v)
            if extend(span | coset, bad | _translate(bad, v, p), sup | v, dim + 1):
                return True
            chosen.pop()
        return False

    if not extend(span, bad, sup, d0):
        return None
    return rref(chosen, p)


@lru_cache(maxsize=None)
def _parity_masks(p: int) -> tuple[int, ...]:
    """Entry f: the set of vectors v with an odd inner product v.f."""
    has_bit = _coordinate_masks(p)
    out = [0] * (1 << p)
    for f in range(1, 1 << p):
        low = f & -f
        out[f] = out[f ^ low] ^ has_bit[low.bit_length() - 1]
    return tuple(out)


def _feasible_dual(p: int, q: int, required_basis: tuple[int, ...], forbidden: int,
                   full_support: bool) -> Code | None:
    """Same question posed on the dual code D of dimension p - q.

    C = D-perp contains r iff D is orthogonal to r, misses f iff some element
    of D has odd product with f, and has full support iff D holds no unit
    vector.
    """
    full = (1 << (1 << p)) - 1
    odd = _parity_masks(p)
    target = p - q
    allowed = full
    for r in required_basis:
        allowed &= ~odd[r]
    units = 0
    for i in range(p):
        units |= 1 << (1 << i)
    uncovered = []
    f_mask = forbidden
    while f_mask:
        low = f_mask & -f_mask
        uncovered.append(low.bit_length() - 1)
        f_mask ^= low
    seen: set[int] = set()
    chosen: list[int] = []

    def extend(span: int, bad: int, uncovered: list[int], dim: int) -> bool:
        if dim == target:
            return not uncovered
        if span in seen:
            return False
        seen.add(span)
        cand = allowed & ~(span | bad)
        if dim == target - 1:
            for f in uncovered:
                cand &= odd[f]
            if not cand:
                return False
            chosen.append((cand & -cand).bit_length() - 1)
            return True
        for f in uncovered:
            if not cand & odd[f]:
                return False
        while cand:
            v = (cand & -cand).bit_length() - 1
            coset = _translate(span, v, p)
            cand &= ~coset
            if span | coset in seen:
                continue
            chosen.append(v)
            rest = [f for f in uncovered if not (v & f).bit_count() & 1]
            if extend(span | coset, bad | _translate(bad, v, p), rest, dim + 1):
                return True
            chosen.pop()
        return False

    if not extend(1, units if full_support else 0, uncovered, 0):
        return None
    members = full
    for d in chosen:
        members &= ~odd[d]
    words = []
    while members:
        low = members & -members
        words.append(low.bit_length() - 1)
        members ^= low
    return rref(words, p)


def halve_code(code: Code, order: Sequence[int]) -> tuple[Code, int]:
    """Split ``code`` into an index-2 subcode and a coset representative.

    Walks ``order`` (all nonzero codewords, each once) and sends every vector
    whose value under the partial linear functional is still free to the
    coset; vectors forced to zero by linearity form the subcode.
    """
    if code.dim < 1:
        raise InvalidInputError("cannot halve the zero code")
    order = [from_bitstring(x) if isinstance(x, str) else int(x) for x in order]
    words = codewords(code)
    if len(order) != len(words) - 1 or set(order) != set(words[1:]):
        raise InvalidInputError("order must list every nonzero codeword exactly once")
    # echelon rows of (vector, functional value) pairs keyed by pivot bit
    rows: dict[int, tuple[int, int]] = {}

    def evaluate(x: int) -> tuple[int, int, int]:
        val = 0
        while x:
            top = x.bit_length() - 1
            if top not in rows:
                return x, val, top
            vec, bit = rows[top]
            x ^= vec
            val ^= bit
        return 0, val, -1

    phi = {}
    for x in order:
        rest, val, top = evaluate(x)
        if rest:
            # free: choose phi(x) = 1
            rows[top] = (rest, val ^ 1)
            phi[x] = 1
        else:
            phi[x] = val
    sub = rref([x for x in order if phi[x] == 0], code.p)
    coset_rep = next(x for x in order if phi[x] == 1)
    return sub, coset_rep
