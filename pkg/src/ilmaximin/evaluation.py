"""Gaussian-process prediction error and a Latin hypercube baseline for comparisons."""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .design import Design, brute_force_separation, check_weights
from .errors import ConditioningError, InvalidInputError
from .search import SearchRequest, search

log = logging.getLogger(__name__)

JITTER = 1e-10
MAX_CONDITION = 1e12
LHD_CHUNK = 1024


def derive_seed(seed: int, *labels) -> int:
    """A 64-bit seed for the stream named by ``labels`` under the master ``seed``."""
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for label in labels:
        words.append(zlib.crc32(str(label).encode()))
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class GpConfig:
    theta: float = 10.0
    v: tuple[float, ...] | None = None
    mc_samples: int = 4096
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise InvalidInputError("theta must be finite and positive")
        if self.v is not None:
            object.__setattr__(self, "v", tuple(float(x) for x in check_weights(self.v)))
        if self.mc_samples < 2:
            raise InvalidInputError("mc_samples must be at least 2")


@dataclass(frozen=True)
class PerturbationScheme:
    """Correlation weights v = w * u with u_k uniform on [1/2, 2]."""

    w: tuple[float, ...]
    replicates: int = 20
    seed: int = 0

    def draws(self) -> list[np.ndarray]:
        rng = np.random.default_rng(derive_seed(self.seed, "perturbation"))
        w = np.asarray(self.w, dtype=float)
        return [w * rng.uniform(0.5, 2.0, size=w.size) for _ in range(self.replicates)]


@dataclass
class ImspeEstimate:
    mean: float
    stderr: float
    jitter: bool


def _correlation(a: np.ndarray, b: np.ndarray, theta: float, v: np.ndarray) -> np.ndarray:
    diff = (a[:, None, :] - b[None, :, :]) * v
    return np.exp(-theta * np.einsum("ijk,ijk->ij", diff, diff))


def predictive_variance(points: np.ndarray, x: np.ndarray, theta: float, v) -> tuple[np.ndarray, bool, float]:
    """Kriging variance with an unknown constant mean at the rows of ``x``.

    sigma^2(x) = 1 - r'R^-1 r + (1 - 1'R^-1 r)^2 / (1'R^-1 1), the usual
    universal-kriging variance for a unit-variance process (Santner,
    Williams and Notz, ch. 3). Returns the variances, whether jitter was
    needed, and 1'R^-1 1.
    """
    v = np.asarray(v, dtype=float)
    R = _correlation(points, points, theta, v)
    eig = np.linalg.eigvalsh(R)
    cond = eig[-1] / eig[0] if eig[0] > 0 else math.inf
    if not cond <= MAX_CONDITION:
        raise ConditioningError(f"correlation matrix of a {len(points)}-point design has condition {cond:.3g}")
    jitter = False
    try:
        factor = linalg.cho_factor(R, lower=True)
    except linalg.LinAlgError:
        jitter = True
        factor = linalg.cho_factor(R + JITTER * np.eye(len(R)), lower=True)
    ones = np.ones(len(R))
    ri_one = linalg.cho_solve(factor, ones)
    denom = float(ones @ ri_one)
    out = np.empty(len(x))
    for start in range(0, len(x), 2048):
        r = _correlation(points, x[start:start + 2048], theta, v)
        ri_r = linalg.cho_solve(factor, r)
        quad = np.einsum("ij,ij->j", r, ri_r)
        out[start:start + 2048] = 1.0 - quad + (1.0 - ri_one @ r) ** 2 / denom
    return out, jitter, denom


def gp_imspe_estimate(d: Design, cfg: GpConfig) -> ImspeEstimate:
    pts = np.asarray(d.points, dtype=float)
    if pts.shape[0] < 2:
        raise InvalidInputError("IMSPE needs at least two design points")
    if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
        raise InvalidInputError("design has duplicate points")
    v = np.asarray(cfg.v if cfg.v is not None else d.weights, dtype=float)
    if v.size != pts.shape[1]:
        raise InvalidInputError("correlation weights do not match the design dimension")
    rng = np.random.default_rng(cfg.seed)
    x = rng.random((cfg.mc_samples, pts.shape[1]))
    var, jitter, denom = predictive_variance(pts, x, cfg.theta, v)
    upper = 1.0 + 1.0 / denom
    if var.min() < -1e-8 or var.max() > upper + 1e-8:
        raise ConditioningError(f"predictive variance left [0, {upper:.6g}]: [{var.min():.3g}, {var.max():.3g}]")
    if jitter:
        log.info("IMSPE: jitter %.0e added to a %d-point correlation matrix", JITTER, len(pts))
    var = np.clip(var, 0.0, None)
    return ImspeEstimate(float(var.mean()), float(var.std(ddof=1) / math.sqrt(var.size)), jitter)


def gp_imspe(d: Design, cfg: GpConfig) -> float:
    return gp_imspe_estimate(d, cfg).mean


def maximin_lhd(p: int, n: int, w, iters: int, seed: int) -> Design:
    """Latin hypercube on levels k/(n-1) improved by random within-column swaps.

    A swap is kept when the weighted separation does not drop. Proposals are
    drawn in fixed-size chunks, so a longer run extends a shorter one with the
    same seed.
    """
    if n < 2 or iters < 0:
        raise InvalidInputError("need n >= 2 and iters >= 0")
    w = check_weights(w, p)
    rng = np.random.default_rng(seed)
    levels = np.arange(n) / (n - 1)
    X = np.stack([levels[rng.permutation(n)] for _ in range(p)], axis=1)
    w2 = w * w

    def dist_row(row: np.ndarray) -> np.ndarray:
        diff = X - row
        return (diff * diff) @ w2

    D2 = np.stack([dist_row(X[i]) for i in range(n)])
    np.fill_diagonal(D2, np.inf)
    current = D2.min()
    done = 0
    while done < iters:
        cols = rng.integers(0, p, size=LHD_CHUNK)
        first = rng.integers(0, n, size=LHD_CHUNK)
        second = rng.integers(0, n - 1, size=LHD_CHUNK)
        for c, i, j in zip(cols[:iters - done], first, second):
            if n == 2 and p == 1:
                break
            j = j + (j >= i)
            X[i, c], X[j, c] = X[j, c], X[i, c]
            di, dj = dist_row(X[i]), dist_row(X[j])
            di[[i, j]] = np.inf
            dj[[i, j]] = np.inf
            if min(di.min(), dj.min()) >= current:
                keep_ij = D2[i, j]
                D2[i], D2[:, i] = di, di
                D2[j], D2[:, j] = dj, dj
                D2[i, j] = D2[j, i] = keep_ij
                current = D2.min()
            else:
                X[i, c], X[j, c] = X[j, c], X[i, c]
        done += min(LHD_CHUNK, iters - done)
    return Design(X, w, "lhd", meta={"iters": iters, "seed": seed})


def compare_designs(p: int, n_grid: Sequence[int], w, cfg: GpConfig | None = None,
                    scheme: PerturbationScheme | None = None, lhd_iters: int = 10**5, seed: int = 0,
                    algorithm: str = "auto") -> list[dict]:
    """One row per n: separation of the proposed and baseline designs, plus IMSPE when ``cfg`` is set.

    Separation uses the corner designs; IMSPE uses the centered variant of
    the proposed design against the same baseline.
    """
    if not n_grid:
        raise InvalidInputError("n_grid is empty")
    w = tuple(float(x) for x in check_weights(w, p))
    rows = []
    for n in n_grid:
        outcome = search(SearchRequest(p, int(n), w, algorithm))
        lhd = maximin_lhd(p, int(n), w, lhd_iters, derive_seed(seed, "lhd", n))
        row = {
            "n": int(n),
            "m": outcome.m,
            "exact_size": outcome.m == n,
            "rho_proposed": outcome.rho,
            "rho_lhd": brute_force_separation(lhd),
            "span": list(outcome.best_span),
            "q": outcome.best_lattice.code.dim,
        }
        if cfg is not None:
            centered = outcome.design(w, "centered")
            weight_sets = scheme.draws() if scheme is not None else [np.asarray(cfg.v or w)]
            prop, base = [], []
            for rep, v in enumerate(weight_sets):
                rep_cfg = GpConfig(cfg.theta, tuple(v), cfg.mc_samples, derive_seed(seed, "mc", n, rep))
                prop.append(gp_imspe_estimate(centered, rep_cfg))
                base.append(gp_imspe_estimate(lhd, rep_cfg))
            row.update({
                "imspe_proposed": float(np.mean([e.mean for e in prop])),
                "imspe_lhd": float(np.mean([e.mean for e in base])),
                "imspe_proposed_se": float(np.mean([e.stderr for e in prop])),
                "imspe_lhd_se": float(np.mean([e.stderr for e in base])),
                "replicates": len(weight_sets),
            })
        rows.append(row)
    return rows
