"""Command line entry point: ``ilmaximin generate|enumerate|compare|oracle-check``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import oracle
from .design import pairwise_min_sq, rho_formula, rho_formula_centered
from .errors import ConditioningError, InvalidInputError, ResourceLimitError
from .evaluation import GpConfig, PerturbationScheme, compare_designs
from .lattice import r_of, standard_lattices
from .search import SearchRequest, search

EXIT_OK, EXIT_ORACLE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

COMPARE_COLUMNS = ["n", "m", "exact_size", "q", "span", "rho_proposed", "rho_lhd",
                   "imspe_proposed", "imspe_lhd", "imspe_proposed_se", "imspe_lhd_se", "replicates"]


@dataclass
class CliConfig:
    subcommand: str
    p: int | None = None
    n: str | None = None
    weights: str = "equal"
    algorithm: str = "auto"
    variant: str = "corner"
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    trim: bool = False
    threads: int = 1
    budget_seconds: float | None = None
    theta: float = 10.0
    mc_samples: int = 4096
    lhd_iters: int = 10**5
    replicates: int = 0
    imspe: bool = False
    suite: str | None = None


def parse_weights(spec: str, p: int) -> tuple[float, ...]:
    spec = spec.strip()
    if spec == "equal":
        return (1.0,) * p
    if spec.startswith("geometric:"):
        try:
            ratio = float(spec.split(":", 1)[1])
        except ValueError:
            raise InvalidInputError(f"bad geometric ratio in {spec!r}") from None
        if not (math.isfinite(ratio) and ratio > 0):
            raise InvalidInputError("geometric ratio must be positive")
        return tuple(ratio ** k for k in range(p))
    try:
        w = tuple(float(x) for x in spec.split(","))
    except ValueError:
        raise InvalidInputError(f"cannot parse weights {spec!r}") from None
    if len(w) != p:
        raise InvalidInputError(f"{len(w)} weights given for p={p}")
    if not all(math.isfinite(x) and x > 0 for x in w):
        raise InvalidInputError("weights must be positive")
    return w


def parse_grid(spec: str) -> list[int]:
    """``148``, ``10,20,30`` or ``lo:hi[:step]`` (inclusive)."""
    out = []
    for part in spec.split(","):
        bits = part.split(":")
        try:
            if len(bits) == 1:
                out.append(int(bits[0]))
            elif len(bits) in (2, 3):
                lo, hi = int(bits[0]), int(bits[1])
                step = int(bits[2]) if len(bits) == 3 else 1
                if step < 1:
                    raise InvalidInputError("grid step must be positive")
                out.extend(range(lo, hi + 1, step))
            else:
                raise ValueError
        except ValueError:
            raise InvalidInputError(f"cannot parse n grid {spec!r}") from None
    if not out or min(out) < 2:
        raise InvalidInputError("n values must be >= 2")
    return out


def _require(cfg: CliConfig, *names):
    for name in names:
        if getattr(cfg, name) is None:
            raise InvalidInputError(f"--{name.replace('_', '-')} is required for {cfg.subcommand}")


def cmd_generate(cfg: CliConfig) -> int:
    _require(cfg, "p", "n")
    n = int(cfg.n)
    w = parse_weights(cfg.weights, cfg.p)
    t0 = time.perf_counter()
    req = SearchRequest(cfg.p, n, w, cfg.algorithm)
    outcome = search(req, threads=cfg.threads, budget_seconds=cfg.budget_seconds)
    design = outcome.design(w, cfg.variant)
    lat, s = outcome.best_lattice, outcome.best_span
    rho = (rho_formula if cfg.variant == "corner" else rho_formula_centered)(lat, s, w)
    points = design.points
    trimmed = False
    if cfg.trim and design.m > n:
        # rows are in lexicographic order, so this drops the lexicographically last ones
        points = points[:n]
        trimmed = True
        if math.sqrt(pairwise_min_sq(points, design.weights)) < rho * (1 - 1e-12):
            raise AssertionError("trimmed design lost separation")
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    meta = {
        "p": cfg.p,
        "n_requested": n,
        "m": int(points.shape[0]),
        "rho": rho,
        "variant": cfg.variant,
        "s": list(s),
        "q": lat.code.dim,
        "r": r_of(lat),
        "basis": lat.code.to_json()["basis"],
        "weights": list(w),
        "algorithm": req.resolved_algorithm,
        "runtime_ms": runtime_ms,
    }
    if trimmed:
        meta["trimmed_from"] = design.m
        meta["trim_note"] = "non-canonical: lexicographically last rows removed"
    prefix = Path(cfg.out or "design")
    csv_path = prefix.with_suffix(".csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(replace(design, points=points).to_csv())
    prefix.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"rho {rho:.10g}")
    print(f"m {meta['m']}")
    print(f"q {meta['q']}")
    print(f"r {meta['r']}")
    print("s " + ",".join(map(str, s)))
    print(f"runtime_ms {runtime_ms:.1f}")
    return EXIT_OK


def cmd_enumerate(cfg: CliConfig) -> int:
    _require(cfg, "p")
    if not 2 <= cfg.p <= 5:
        raise InvalidInputError("enumerate supports 2 <= p <= 5")
    lats = standard_lattices(cfg.p)
    path = Path(cfg.out or f"lattices_p{cfg.p}.jsonl")
    path.write_text("".join(json.dumps(lat.code.to_json()) + "\n" for lat in lats))
    print(f"count {len(lats)}")
    return EXIT_OK


def cmd_compare(cfg: CliConfig) -> int:
    _require(cfg, "p", "n")
    grid = parse_grid(cfg.n)
    w = parse_weights(cfg.weights, cfg.p)
    gp = GpConfig(cfg.theta, None, cfg.mc_samples, cfg.seed) if cfg.imspe else None
    scheme = PerturbationScheme(w, cfg.replicates, cfg.seed) if cfg.imspe and cfg.replicates > 0 else None
    rows = compare_designs(cfg.p, grid, w, gp, scheme, lhd_iters=cfg.lhd_iters, seed=cfg.seed,
                           algorithm=cfg.algorithm)
    path = Path(cfg.out or f"compare_p{cfg.p}.{cfg.format}")
    if cfg.format == "json":
        path.write_text(json.dumps({"p": cfg.p, "weights": list(w), "seed": cfg.seed, "rows": rows}, indent=2) + "\n")
    else:
        cols = [c for c in COMPARE_COLUMNS if c in rows[0]]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in cols])
    for row in rows:
        print(f"n {row['n']} m {row['m']} rho_proposed {row['rho_proposed']:.4f} rho_lhd {row['rho_lhd']:.4f}")
    return EXIT_OK


def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, list):
        return " ".join(map(str, v))
    return v


def cmd_oracle_check(cfg: CliConfig) -> int:
    names = [cfg.suite] if cfg.suite else list(oracle.SUITES)
    reports = []
    for name in names:
        if name not in oracle.SUITES:
            raise InvalidInputError(f"unknown suite {name!r}; choose from {sorted(oracle.SUITES)}")
        t0 = time.perf_counter()
        got = oracle.run_suite(name, cfg.seed)
        failed = sum(not r.passed for r in got)
        print(f"{name}: {len(got) - failed}/{len(got)} passed in {time.perf_counter() - t0:.1f}s")
        reports.extend(got)
    path = Path(cfg.out or "oracle_report.jsonl")
    path.write_text("".join(r.to_json() + "\n" for r in reports))
    bad = [r for r in reports if not r.passed]
    for r in bad[:20]:
        print(f"FAIL {r.case}: reference {r.reference} tested {r.tested}")
    return EXIT_ORACLE if bad else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "enumerate": cmd_enumerate,
    "compare": cmd_compare,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ilmaximin", description="Maximin designs from interleaved lattices.")
    ap.add_argument("subcommand", choices=sorted(COMMANDS))
    ap.add_argument("--p", type=int)
    ap.add_argument("--n", help="run size; for compare a grid like 10,20 or 10:100:10")
    ap.add_argument("--weights", default="equal", help="equal, geometric:RATIO or a comma list")
    ap.add_argument("--algorithm", default="auto", choices=["auto", "1", "2", "3"])
    ap.add_argument("--variant", default="corner", choices=["corner", "centered"])
    ap.add_argument("--format", default="csv", choices=["csv", "json"], help="compare table format")
    ap.add_argument("--out", help="output path (generate: prefix for .csv and .json)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trim", action="store_true", help="drop lexicographically last rows down to n")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--budget-seconds", type=float)
    ap.add_argument("--theta", type=float, default=10.0)
    ap.add_argument("--mc-samples", type=int, default=4096)
    ap.add_argument("--lhd-iters", type=int, default=10**5)
    ap.add_argument("--replicates", type=int, default=0, help="weight perturbation replicates for IMSPE")
    ap.add_argument("--imspe", action="store_true", help="add IMSPE columns to compare")
    ap.add_argument("--suite", help="run a single oracle suite")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args = vars(ns)
    args.pop("verbose")
    cfg = CliConfig(**args)
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, TimeoutError, ConditioningError, MemoryError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
