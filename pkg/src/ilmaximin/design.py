"""Designs built from a lattice and a span vector, and their separation distance."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .lattice import Lattice, check_span, l0_codewords, points_in_box

BRUTE_FORCE_CAP = 20000


def check_weights(w, p: int | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or (p is not None and w.size != p):
        raise InvalidInputError(f"weights must be a vector of length {p}, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InvalidInputError("weights must be finite and strictly positive")
    return w


@dataclass(frozen=True, eq=False)
class Design:
    """An m x p point set in [0,1]^p plus where it came from.

    ``lattice`` and ``span`` are None for designs not built from a lattice
    (the Latin hypercube baseline).
    """

    points: np.ndarray
    weights: np.ndarray
    variant: str = "corner"
    lattice: Lattice | None = None
    span: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{k + 1}" for k in range(self.p)])
        for row in self.points:
            writer.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue()


def read_design_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InvalidInputError("empty design file")
    header, body = rows[0], rows[1:]
    if header != [f"x{k + 1}" for k in range(len(header))]:
        raise InvalidInputError(f"unexpected header {header}")
    return np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))


def weighted_distance(x, y, w) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape != y.shape or x.shape != w.shape:
        raise InvalidInputError("x, y and w must have equal lengths")
    return math.sqrt(math.fsum(float(t) ** 2 for t in w * np.abs(x - y)))


def _check_lattice_args(lat: Lattice, s, w):
    if not lat.is_standard:
        raise InvalidInputError(f"{lat!r} is not a standard interleaved lattice")
    s = check_span(s, lat.p, minimum=2)
    return s, check_weights(w, lat.p)


def corner_design(lat: Lattice, s: Sequence[int], w, cap: int | None = None) -> Design:
    """Lattice points in the box scaled by 1/(s-1); contains the origin."""
    s, w = _check_lattice_args(lat, s, w)
    pts = points_in_box(lat, s, **({"cap": cap} if cap else {}))
    return Design(pts / (np.array(s, dtype=float) - 1.0), w, "corner", lat, s)


def centered_design(lat: Lattice, s: Sequence[int], w, cap: int | None = None) -> Design:
    """Half-cell shifted variant scaled by 1/s; no point touches the boundary."""
    s, w = _check_lattice_args(lat, s, w)
    pts = points_in_box(lat, s, **({"cap": cap} if cap else {}))
    return Design((pts + 0.5) / np.array(s, dtype=float), w, "centered", lat, s)


def squared_norm(v: int, terms: Sequence[float], p: int) -> float:
    """Weighted squared length of the scaled 0/1 vector ``v``; ``terms[k]`` is (w_k/scale_k)**2."""
    return math.fsum(terms[k] for k in range(p) if (v >> (p - 1 - k)) & 1)


def rho_squared(lat: Lattice, s: Sequence[int], w, scale_offset: int = 1) -> float:
    """Squared separation distance of the lattice design without building it.

    ``scale_offset`` is 1 for the corner design (scale s-1) and 0 for the
    centered one (scale s).
    """
    p = lat.p
    scale = [x - scale_offset for x in s]
    terms = [(w[k] / scale[k]) ** 2 for k in range(p)]
    best = math.inf
    for c in l0_codewords(lat):
        if c:
            best = min(best, squared_norm(c, terms, p))
    units = lat.unit_mask
    for k in range(p):
        if (units >> (p - 1 - k)) & 1:
            best = min(best, terms[k])
        if s[k] > 2:
            best = min(best, 4.0 * terms[k])
    return best


def rho_formula(lat: Lattice, s: Sequence[int], w) -> float:
    """Closed-form separation distance of :func:`corner_design`."""
    s, w = _check_lattice_args(lat, s, w)
    return math.sqrt(rho_squared(lat, s, w))


def rho_formula_centered(lat: Lattice, s: Sequence[int], w) -> float:
    s, w = _check_lattice_args(lat, s, w)
    return math.sqrt(rho_squared(lat, s, w, scale_offset=0))


def pairwise_min_sq(points: np.ndarray, w: np.ndarray) -> float:
    """Minimum squared weighted distance over distinct pairs, in row blocks."""
    x = points * w
    m, p = x.shape
    block = max(1, 2_000_000 // max(1, m * p))
    best = math.inf
    for start in range(0, m - 1, block):
        a = x[start:start + block]
        b = x[start + 1:]
        diff = a[:, None, :] - b[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # keep only pairs (i, j) with j > i in global indexing
        rows = np.arange(a.shape[0])[:, None]
        cols = np.arange(b.shape[0])[None, :]
        d2 = np.where(cols >= rows, d2, np.inf)
        best = min(best, float(d2.min()))
    return best


def brute_force_separation(d: Design, cap: int = BRUTE_FORCE_CAP) -> float:
    if d.m < 2:
        raise InvalidInputError("separation needs at least two points")
    if d.m > cap:
        raise ResourceLimitError(f"{d.m} points exceed the brute-force cap of {cap}")
    return math.sqrt(pairwise_min_sq(d.points, d.weights))
