"""Brute-force references for the closed forms and the searches.

Nothing here reuses the counting, distance or enumeration code of the modules
it checks: subspaces are built by closure over explicit vector sets, points
by scanning the whole box, and distances pair by pair.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import InvalidInputError, ResourceLimitError, UnsupportedDimensionError

BOX_LIMIT = 10**7
WORK_LIMIT = 10**8


@dataclass
class OracleReport:
    case: str
    reference: float
    tested: float
    abs_dev: float
    rel_dev: float
    tolerance: float
    passed: bool

    @classmethod
    def compare(cls, case: str, reference, tested, tolerance: float = 0.0) -> "OracleReport":
        reference, tested = float(reference), float(tested)
        abs_dev = abs(reference - tested)
        rel_dev = abs_dev / abs(reference) if reference else abs_dev
        return cls(case, reference, tested, abs_dev, rel_dev, tolerance, rel_dev <= tolerance)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _closure(vectors: Iterable[int]) -> frozenset[int]:
    span = {0}
    for v in vectors:
        span |= {x ^ v for x in span}
    return frozenset(span)


@lru_cache(maxsize=None)
def all_subspaces(p: int) -> tuple[frozenset[int], ...]:
    """Every subspace of GF(2)^p as a set of vectors, grown by closure from {0}."""
    if not 1 <= p <= 5:
        raise UnsupportedDimensionError(f"closure enumeration supports 1 <= p <= 5, got {p}")
    found = {frozenset([0])}
    frontier = list(found)
    while frontier:
        nxt = []
        for sub in frontier:
            for v in range(1 << p):
                if v not in sub:
                    grown = frozenset(sub | {x ^ v for x in sub})
                    if grown not in found:
                        found.add(grown)
                        nxt.append(grown)
        frontier = nxt
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))


def _full_support(sub: frozenset[int], p: int) -> bool:
    acc = 0
    for v in sub:
        acc |= v
    return acc == (1 << p) - 1


def count_standard_lattices(p: int) -> int:
    if not 2 <= p <= 5:
        raise UnsupportedDimensionError(f"lattice census supports 2 <= p <= 5, got {p}")
    return sum(_full_support(sub, p) for sub in all_subspaces(p))


def box_points_brute(words, s) -> np.ndarray:
    """All integer points of the box whose parity vector lies in ``words``."""
    p = len(s)
    total = math.prod(s)
    if total > BOX_LIMIT:
        raise ResourceLimitError(f"box of {total} points exceeds {BOX_LIMIT}")
    grid = np.indices(s).reshape(p, -1).T
    weights = 1 << np.arange(p - 1, -1, -1)
    parity = (grid % 2) @ weights
    keep = np.isin(parity, np.fromiter(words, dtype=np.int64))
    return grid[keep]


def count_points_brute(lat, s) -> int:
    """Count box points of ``lat`` (a Lattice or a set of codewords) by full scan."""
    words = _words_of(lat)
    return int(box_points_brute(words, tuple(int(x) for x in s)).shape[0])


def _words_of(lat) -> frozenset[int]:
    code = getattr(lat, "code", None)
    if code is not None:
        return _closure(code.basis)
    return frozenset(lat)


def min_pair_distance(points: np.ndarray, w) -> float:
    """Minimum weighted distance over all pairs, one point at a time."""
    x = np.asarray(points, dtype=float) * np.asarray(w, dtype=float)
    best = math.inf
    for i in range(len(x) - 1):
        d = x[i + 1:] - x[i]
        best = min(best, float(np.min(np.sum(d * d, axis=1))))
    return math.sqrt(best)


@dataclass
class ExhaustiveResult:
    rho: float
    m: int
    words: frozenset[int]
    span: tuple[int, ...]


@lru_cache(maxsize=64)
def _exhaustive_table(p: int, w: tuple[float, ...], s_max: int) -> tuple[tuple[float, int, frozenset[int], tuple[int, ...]], ...]:
    rows = []
    lattices = [sub for sub in all_subspaces(p) if _full_support(sub, p)]
    for sub in lattices:
        for s in itertools.product(range(2, s_max + 1), repeat=p):
            pts = box_points_brute(sub, s)
            if len(pts) < 2:
                continue
            rho = min_pair_distance(pts / (np.array(s) - 1.0), w)
            rows.append((rho, len(pts), sub, s))
    return tuple(rows)


def exhaustive_best(p: int, n: int, w, s_max: int) -> ExhaustiveResult:
    """Best separation over all standard lattices and all spans in {2..s_max}^p, by brute force."""
    if not 2 <= p <= 4:
        raise UnsupportedDimensionError(f"exhaustive search supports 2 <= p <= 4, got {p}")
    if s_max < 2:
        raise InvalidInputError("s_max must be at least 2")
    w = tuple(float(x) for x in w)
    if len(w) != p:
        raise InvalidInputError("weights length mismatch")
    n_lat = {2: 2, 3: 6, 4: 26}[p]
    work = n_lat * sum(s * s for s in range(2, s_max + 1)) ** p
    if work > WORK_LIMIT:
        raise ResourceLimitError(f"exhaustive search needs ~{work:.3g} steps (limit {WORK_LIMIT:.0e})")
    best = None
    for rho, m, words, s in _exhaustive_table(p, w, s_max):
        if m >= n and (best is None or rho > best.rho):
            best = ExhaustiveResult(rho, m, words, s)
    if best is None:
        raise InvalidInputError(f"no design with at least {n} points inside s_max={s_max}")
    return best


# ---------------------------------------------------------------------------
# suites


def _random_standard_code(rng: random.Random, p: int):
    from .gf2 import rref

    while True:
        rows = [rng.getrandbits(p) for _ in range(rng.randint(1, p))]
        code = rref(rows, p)
        if code.support == (1 << p) - 1:
            return code


def random_cases(seed: int = 0, count: int = 500, max_points: int = 5000):
    """(Lattice, span, weights) triples across p = 2..6 with at most ``max_points`` points."""
    from .lattice import Lattice, point_count, standard_lattices

    rng = random.Random(seed)
    pools = {p: standard_lattices(p) for p in range(2, 6)}
    cases = []
    while len(cases) < count:
        p = rng.randint(2, 6)
        lat = rng.choice(pools[p]) if p <= 5 else Lattice(_random_standard_code(rng, p))
        s = tuple(rng.randint(2, 6) for _ in range(p))
        if point_count(lat, s) > max_points:
            continue
        w = tuple(rng.uniform(0.1, 1.0) for _ in range(p))
        cases.append((lat, s, w))
    return cases


def suite_census() -> list[OracleReport]:
    from .lattice import standard_lattices

    out = []
    for p, expected in zip(range(2, 6), (2, 6, 26, 158)):
        out.append(OracleReport.compare(f"census/p={p}/closure", expected, count_standard_lattices(p)))
        out.append(OracleReport.compare(f"census/p={p}/rref", expected, len(standard_lattices(p))))
    return out


def suite_rho_and_count(seed: int = 0, count: int = 500) -> list[OracleReport]:
    from .design import brute_force_separation, corner_design, rho_formula
    from .lattice import point_count, point_count_bounds

    out = []
    for i, (lat, s, w) in enumerate(random_cases(seed, count)):
        tag = f"{lat.code!r}/s={s}"
        out.append(OracleReport.compare(f"rho[{i}]/{tag}", brute_force_separation(corner_design(lat, s, w)),
                                        rho_formula(lat, s, w), 1e-12))
        m = point_count(lat, s)
        out.append(OracleReport.compare(f"count[{i}]/{tag}", count_points_brute(lat, s), m))
        lo, hi = point_count_bounds(lat, s)
        out.append(OracleReport(f"bounds[{i}]/{tag}", float(lo), float(m), 0.0, 0.0, 0.0, lo <= m <= hi))
    return out


def suite_monotonicity(spans=(2, 3, 4)) -> list[OracleReport]:
    """max m over (q, r) = (z3, z2) dominates (z3, z1) for z1 <= z2 < z3 < p."""
    from .gf2 import enumerate_subspaces
    from .lattice import Lattice, point_count, q_of, r_of

    out = []
    for p in range(2, 6):
        lattices = [Lattice(c) for c in enumerate_subspaces(p)]
        groups: dict[tuple[int, int], list] = {}
        for lat in lattices:
            groups.setdefault((q_of(lat), r_of(lat)), []).append(lat)
        failures = 0
        checks = 0
        for s in itertools.product(spans, repeat=p):
            best = {key: max(point_count(l, s) for l in lats) for key, lats in groups.items()}
            for z3 in range(p):
                for z2 in range(z3):
                    for z1 in range(z2 + 1):
                        if (z3, z1) not in best:
                            continue
                        checks += 1
                        if best.get((z3, z2), -1) < best[(z3, z1)]:
                            failures += 1
        out.append(OracleReport(f"monotone/p={p}/checks={checks}", 0.0, float(failures), float(failures),
                                float(failures), 0.0, failures == 0))
    return out


def suite_halving(seed: int = 0, count: int = 200) -> list[OracleReport]:
    """Greedy halving keeps the earliest-listed vectors out of the subcode as long as any split can."""
    from .gf2 import codewords, halve_code, rref

    rng = random.Random(seed)
    out = []
    for i in range(count):
        p = rng.randint(2, 7)
        dim = rng.randint(1, min(p, 6))
        code = rref([rng.getrandbits(p) for _ in range(3 * dim)], p)
        if code.dim == 0:
            continue
        words = [c for c in codewords(code) if c]
        rng.shuffle(words)
        sub, rep = halve_code(code, words)
        sub_words = set(_closure(sub.basis))
        valid = (len(sub_words) * 2 == len(words) + 1 and rep not in sub_words
                 and sub_words.isdisjoint({x ^ rep for x in sub_words}))
        greedy_first = min((words.index(x) for x in sub_words if x), default=len(words))
        best_first = _best_first_subcode_position(words, code.basis)
        out.append(OracleReport(f"halve[{i}]/p={p}/dim={code.dim}", float(best_first), float(greedy_first),
                                abs(best_first - greedy_first), 0.0, 0.0, valid and best_first == greedy_first))
    return out


def _best_first_subcode_position(words: list[int], basis) -> int:
    """Over all index-2 subcodes, the latest possible position of the first listed member."""
    dim = len(basis)
    coeff = {}
    for c in range(1 << dim):
        word = 0
        for i in range(dim):
            if (c >> i) & 1:
                word ^= basis[i]
        coeff[word] = c
    best = -1
    for a in range(1, 1 << dim):
        # kernel of the functional c -> a.c
        first = min((i for i, x in enumerate(words) if not (coeff[x] & a).bit_count() & 1), default=len(words))
        best = max(best, first)
    return best


def suite_feasibility(seed: int = 0, count: int = 150) -> list[OracleReport]:
    """feasible_code against a scan of every subspace."""
    from .gf2 import codewords, feasible_code

    rng = random.Random(seed)
    out = []
    for i in range(count):
        p = rng.randint(2, 4)
        q = rng.randint(0, p)
        pool = list(range(1, 1 << p))
        rng.shuffle(pool)
        n_req = rng.randint(0, 2)
        n_forb = rng.randint(0, len(pool) - n_req)
        required, forbidden = pool[:n_req], pool[n_req:n_req + n_forb]
        full = rng.random() < 0.7
        exists = any(len(sub) == 1 << q and set(required) <= sub and sub.isdisjoint(forbidden)
                     and (not full or _full_support(sub, p)) for sub in all_subspaces(p))
        got = feasible_code(p, q, required, forbidden, full)
        ok = (got is not None) == exists
        if got is not None:
            words = set(codewords(got))
            ok = ok and got.dim == q and set(required) <= words and words.isdisjoint(forbidden)
            ok = ok and (not full or got.support == (1 << p) - 1)
        out.append(OracleReport(f"feasible[{i}]/p={p}/q={q}", float(exists), float(got is not None), 0.0, 0.0,
                                0.0, ok))
    return out


SUITES = {
    "census": suite_census,
    "rho_and_count": suite_rho_and_count,
    "monotonicity": suite_monotonicity,
    "halving": suite_halving,
    "feasibility": suite_feasibility,
}


def run_suite(name: str, seed: int = 0) -> list[OracleReport]:
    suite = SUITES[name]
    return suite() if name in {"census", "monotonicity"} else suite(seed)


def run_all(seed: int = 0) -> list[OracleReport]:
    reports = []
    for name in SUITES:
        reports.extend(run_suite(name, seed))
    return reports
