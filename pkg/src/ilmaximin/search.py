"""Searches over interleaved lattices and span vectors for maximin designs.

All distance comparisons run on squared distances; square roots appear only
in the reported ``rho``. Incumbent updates are strict, so ties keep the
first design found and the enumeration orders below are part of the result.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .design import Design, centered_design, check_weights, corner_design, rho_squared
from .errors import InvalidInputError, UnsupportedDimensionError
from .gf2 import Code, codewords, feasible_code_masked, halve_code, rref, unit_vector
from .lattice import Lattice, point_count, standard_lattices

log = logging.getLogger(__name__)

ALG2_DIMS = 8


@dataclass
class SearchStats:
    lattices_tried: int = 0
    spans_tried: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class SearchRequest:
    p: int
    n: int
    w: tuple[float, ...]
    algorithm: str = "auto"
    variant: str = "corner"

    def __post_init__(self):
        if self.p < 2 or self.n < 2:
            raise InvalidInputError(f"need p >= 2 and n >= 2, got p={self.p}, n={self.n}")
        object.__setattr__(self, "w", tuple(float(x) for x in check_weights(self.w, self.p)))
        if str(self.algorithm) not in {"auto", "1", "2", "3"}:
            raise InvalidInputError(f"unknown algorithm {self.algorithm!r}")
        object.__setattr__(self, "algorithm", str(self.algorithm))
        if self.variant not in {"corner", "centered"}:
            raise InvalidInputError(f"unknown variant {self.variant!r}")

    @property
    def resolved_algorithm(self) -> int:
        if self.algorithm != "auto":
            return int(self.algorithm)
        if self.p <= 5:
            return 1
        if self.p <= ALG2_DIMS:
            return 2
        return 3


@dataclass
class SearchOutcome:
    best_lattice: Lattice
    best_span: tuple[int, ...]
    rho: float
    m: int
    algorithm: int
    stats: SearchStats = field(default_factory=SearchStats)

    def design(self, w, variant: str = "corner") -> Design:
        build = corner_design if variant == "corner" else centered_design
        return build(self.best_lattice, self.best_span, w)


# ---------------------------------------------------------------------------
# span vector bookkeeping


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def last_span_alg1(lat: Lattice, s: Sequence[int], n: int) -> int:
    """Starting value of s_p for a lattice: the smallest value the size upper bound allows."""
    p = lat.p
    prod = 1
    for k in range(p - 1):
        prod *= s[k] if lat.contains_unit(k) else 2 * ((s[k] + 1) // 2)
    return _start_last(p, lat.code.dim, n, prod)


def last_span_alg2(p: int, q: int, s: Sequence[int], n: int) -> int:
    prod = 1
    for k in range(p - 1):
        prod *= 2 * ((s[k] + 1) // 2)
    return _start_last(p, q, n, prod)


def _start_last(p: int, q: int, n: int, prod: int) -> int:
    # 2 * ceil(2**(p-q-1) * n / prod) - 1, with 2**(p-q-1) possibly 1/2
    e = p - q - 1
    c = _ceil_div(n << e, prod) if e >= 0 else _ceil_div(n, 2 * prod)
    return max(2 * c - 1, 2)


def next_span(s: Sequence[int], w, rho_incumbent: float, n: int,
              lattice: Lattice | None = None, q: int | None = None) -> tuple[int, ...] | None:
    """Advance the span odometer, or None when the current lattice (or q) is exhausted.

    With ``lattice`` the pruning bound for coordinate k is w_k/s_k when e_k is
    in the lattice and 2w_k/s_k otherwise; with only ``q`` it is always
    2w_k/s_k. Trailing entries reset to 2 and s_p is recomputed.
    """
    if (lattice is None) == (q is None):
        raise InvalidInputError("pass exactly one of lattice or q")
    return _next_span(tuple(s), tuple(float(x) for x in w), rho_incumbent ** 2, n, lattice, q)


def _next_span(s, w, rho_b2, n, lattice, q):
    p = len(s)
    j = max((i for i in range(p) if s[i] > 2), default=-1)
    if j < 1:
        return None
    k = -1
    for i in range(j - 1, -1, -1):
        mult = 1.0 if lattice is not None and lattice.contains_unit(i) else 2.0
        if (mult * w[i] / s[i]) ** 2 > rho_b2:
            k = i
            break
    if k < 0:
        return None
    nxt = list(s)
    nxt[k] += 1
    for i in range(k + 1, p - 1):
        nxt[i] = 2
    nxt[p - 1] = last_span_alg1(lattice, nxt, n) if lattice is not None else last_span_alg2(p, q, nxt, n)
    return tuple(nxt)


# ---------------------------------------------------------------------------
# Algorithm 1: every standard lattice


def _split_counts(lat: Lattice, s: Sequence[int]) -> tuple[int, int]:
    """Point counts of the prefix box split by the parity of the last coordinate."""
    p = lat.p
    a = b = 0
    for c in lat.words:
        prod = 1
        for k in range(p - 1):
            prod *= s[k] // 2 if (c >> (p - 1 - k)) & 1 else (s[k] + 1) // 2
        if c & 1:
            b += prod
        else:
            a += prod
    return a, b


def _alg1_lattice(lat: Lattice, n: int, w: tuple[float, ...], rho_b2: float):
    """Run the span odometer on one lattice; returns (rho2, span, spans_tried) of its strict improvements."""
    p = lat.p
    s = [2] * (p - 1)
    s.append(last_span_alg1(lat, s, n))
    s = tuple(s)
    best = None
    tried = 0
    while s is not None:
        a, b = _split_counts(lat, s)
        z = s[-1]
        while a * ((z + 1) // 2) + b * (z // 2) < n:
            z += 1
        s = s[:-1] + (z,)
        tried += 1
        r2 = rho_squared(lat, s, w)
        if r2 > rho_b2:
            rho_b2 = r2
            best = (r2, s)
        s = _next_span(s, w, rho_b2, n, lat, None)
    return best, tried


def _alg1_worker(args):
    lat, n, w = args
    return _alg1_lattice(lat, n, w, 0.0)


def algorithm1(req: SearchRequest, threads: int = 1) -> SearchOutcome:
    if not 2 <= req.p <= 5:
        raise UnsupportedDimensionError(f"Algorithm 1 supports 2 <= p <= 5, got {req.p}")
    t0 = time.perf_counter()
    lattices = standard_lattices(req.p)
    stats = SearchStats(lattices_tried=len(lattices))
    best_rho2, best = 0.0, None
    if threads > 1:
        # each lattice searched from a zero incumbent; replaying in order with
        # strict improvement reproduces the sequential winner
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_alg1_worker, [(lat, req.n, req.w) for lat in lattices]))
        for lat, (found, tried) in zip(lattices, results):
            stats.spans_tried += tried
            if found is not None and found[0] > best_rho2:
                best_rho2, best = found[0], (lat, found[1])
    else:
        for lat in lattices:
            found, tried = _alg1_lattice(lat, req.n, req.w, best_rho2)
            stats.spans_tried += tried
            if found is not None:
                best_rho2, best = found[0], (lat, found[1])
    stats.elapsed = time.perf_counter() - t0
    lat, s = best
    return SearchOutcome(lat, s, math.sqrt(best_rho2), point_count(lat, s), 1, stats)


# ---------------------------------------------------------------------------
# Algorithm 2: one "best" lattice per (s, q, r)


class _SpanGeometry:
    """Squared scaled lengths of every 0/1 vector for one span vector."""

    def __init__(self, s: Sequence[int], w: Sequence[float]):
        p = len(s)
        self.p = p
        self.s = tuple(s)
        self.terms = [(w[k] / (s[k] - 1)) ** 2 for k in range(p)]
        # fsum keeps equal multisets of terms bit-identical regardless of position
        self.d2 = [math.fsum(self.terms[k] for k in range(p) if (v >> (p - 1 - k)) & 1) for v in range(1 << p)]
        # units ranked by decreasing w_k/(s_k-1), ties by coordinate
        self.ranked_units = sorted(range(p), key=lambda k: (-self.terms[k], k))
        self.by_length = sorted(range(1, 1 << p), key=lambda v: (self.d2[v], v))

    def close_mask(self, rho_b2: float) -> int:
        mask = 0
        for v in self.by_length:
            if self.d2[v] > rho_b2:
                break
            mask |= 1 << v
        return mask

    def third_term_ok(self, rho_b2: float) -> bool:
        return all(4.0 * t > rho_b2 for k, t in enumerate(self.terms) if self.s[k] > 2)


def _admissible_r(p: int, q: int, geo: _SpanGeometry, rho_b2: float) -> list[int]:
    top = [p] if q == p else list(range(min(q - 1, p), -1, -1))
    out = []
    for r in top:
        if r >= 1 and geo.terms[geo.ranked_units[r - 1]] <= rho_b2:
            continue
        out.append(r)
    return out


def _best_lattice(geo: _SpanGeometry, q: int, r: int) -> tuple[Code, int | None] | None:
    p = geo.p
    required_units = geo.ranked_units[:r]
    req_mask = 0
    for k in required_units:
        req_mask |= unit_vector(k, p)
    forbidden = 0
    for k in geo.ranked_units[r:]:
        forbidden |= 1 << unit_vector(k, p)
    required = rref([unit_vector(k, p) for k in required_units], p).basis
    witness = feasible_code_masked(p, q, required, forbidden, True)
    if witness is None:
        return None
    witness_words = set(codewords(witness))
    binding = None
    for x in geo.by_length:
        if x & req_mask or x.bit_count() < 2:
            continue
        if x not in witness_words:
            forbidden |= 1 << x
            continue
        trial = feasible_code_masked(p, q, required, forbidden | (1 << x), True)
        if trial is not None:
            forbidden |= 1 << x
            witness = trial
            witness_words = set(codewords(witness))
        else:
            if binding is None:
                binding = x
            required = rref(list(required) + [x], p).basis
    return witness, binding


def best_lattice_for(s: Sequence[int], q: int, r: int, w, rho_incumbent: float = 0.0) -> Lattice | None:
    """The lattice Algorithm 2 pairs with (s, q, r).

    Units e_k are ranked by w_k/(s_k-1); the top ``r`` are required and the
    rest forbidden. Vectors supported off the required coordinates are then
    walked from shortest to longest and forbidden whenever a code of
    dimension ``q`` with full support survives; the rest are forced in.
    ``rho_incumbent`` is accepted for interface symmetry with the search
    loop and does not change the construction.
    """
    s = tuple(int(x) for x in s)
    w = check_weights(w, len(s))
    p = len(s)
    if not 0 <= r <= q <= p or (q < p and r >= q) or (q == p and r != p):
        raise InvalidInputError(f"(q, r) = ({q}, {r}) violates the q,r law for p={p}")
    found = _best_lattice(_SpanGeometry(s, w), q, r)
    return None if found is None else Lattice(found[0])


def algorithm2(req: SearchRequest, budget_seconds: float | None = None) -> SearchOutcome:
    p, n, w = req.p, req.n, req.w
    if p > ALG2_DIMS:
        log.warning("Algorithm 2 at p=%d is slow; intended for p <= %d", p, ALG2_DIMS)
    t0 = time.perf_counter()
    stats = SearchStats()
    rho_b2 = 0.0
    best = None
    geo_cache: dict[tuple[int, ...], _SpanGeometry] = {}

    def geometry(s):
        g = geo_cache.get(s)
        if g is None:
            g = geo_cache[s] = _SpanGeometry(s, w)
        return g

    for q in range(p, 0, -1):
        s = [2] * (p - 1)
        s.append(last_span_alg2(p, q, s, n))
        s = tuple(s)
        while s is not None:
            if budget_seconds is not None and time.perf_counter() - t0 > budget_seconds:
                raise TimeoutError(f"Algorithm 2 exceeded its {budget_seconds} s budget")
            stats.spans_tried += 1
            geo = geometry(s)
            bumped = False
            if geo.third_term_ok(rho_b2) and feasible_code_masked(p, q, (), geo.close_mask(rho_b2), True) is not None:
                for r in _admissible_r(p, q, geo, rho_b2):
                    found = _best_lattice(geo, q, r)
                    stats.lattices_tried += 1
                    if found is None:
                        continue
                    lat = Lattice(found[0])
                    if point_count(lat, s) < n:
                        s = s[:-1] + (s[-1] + 1,)
                        bumped = True
                        break
                    r2 = rho_squared(lat, s, w)
                    if r2 > rho_b2:
                        rho_b2, best = r2, (lat, s)
            if not bumped:
                s = _next_span(s, w, rho_b2, n, None, q)
    stats.elapsed = time.perf_counter() - t0
    lat, s = best
    return SearchOutcome(lat, s, math.sqrt(rho_b2), point_count(lat, s), 2, stats)


# ---------------------------------------------------------------------------
# Algorithm 3: Algorithm 2 on the heaviest dimensions, then 0/1 layers


def _permute_bits(v: int, source: Sequence[int], p: int) -> int:
    """Move coordinate i of ``v`` to coordinate ``source[i]``."""
    out = 0
    for i in range(p):
        if (v >> (p - 1 - i)) & 1:
            out |= unit_vector(source[i], p)
    return out


def supplement(code: Code, s: Sequence[int], w: Sequence[float]) -> Code:
    """Append one two-level coordinate by halving ``code`` along its shortest vectors."""
    p = code.p
    geo_terms = [(w[k] / (s[k] - 1)) ** 2 for k in range(p)]
    words = [c for c in codewords(code) if c]
    words.sort(key=lambda v: (math.fsum(geo_terms[k] for k in range(p) if (v >> (p - 1 - k)) & 1), v))
    sub, rep = halve_code(code, words)
    return rref([b << 1 for b in sub.basis] + [(rep << 1) | 1], p + 1)


def algorithm3(req: SearchRequest, budget_seconds: float | None = None) -> SearchOutcome:
    p, n, w = req.p, req.n, req.w
    if p < 9:
        log.warning("Algorithm 3 requested at p=%d; it only differs from Algorithm 2 for p >= 9", p)
    t0 = time.perf_counter()
    order = sorted(range(p), key=lambda k: (-w[k], k))
    ws = tuple(w[k] for k in order)
    head = min(p, ALG2_DIMS)
    sub = algorithm2(SearchRequest(head, n, ws[:head], "2"), budget_seconds)
    code, s = sub.best_lattice.code, sub.best_span
    for j in range(head, p):
        code = supplement(code, s, ws[:j])
        s = s + (2,)
    lat = Lattice(rref([_permute_bits(b, order, p) for b in code.basis], p))
    span = [0] * p
    for i, k in enumerate(order):
        span[k] = s[i]
    span = tuple(span)
    stats = sub.stats
    stats.elapsed = time.perf_counter() - t0
    return SearchOutcome(lat, span, math.sqrt(rho_squared(lat, span, w)), point_count(lat, span), 3, stats)


def search(req: SearchRequest, threads: int = 1, budget_seconds: float | None = None) -> SearchOutcome:
    alg = req.resolved_algorithm
    if alg == 1:
        return algorithm1(req, threads)
    if alg == 2:
        return algorithm2(req, budget_seconds)
    return algorithm3(req, budget_seconds)
