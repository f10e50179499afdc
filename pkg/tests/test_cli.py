import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ilmaximin.cli import main, parse_grid, parse_weights
from ilmaximin.design import pairwise_min_sq, read_design_csv
from ilmaximin.errors import InvalidInputError
from ilmaximin.gf2 import Code


def test_parse_weights():
    assert parse_weights("equal", 3) == (1.0, 1.0, 1.0)
    assert parse_weights("geometric:0.75", 3) == (1.0, 0.75, 0.5625)
    assert parse_weights("1,2.5", 2) == (1.0, 2.5)
    for bad in ("1,2", "1,-2,3", "geometric:x", "a,b,c"):
        with pytest.raises(InvalidInputError):
            parse_weights(bad, 3)


def test_parse_grid():
    assert parse_grid("148") == [148]
    assert parse_grid("10:30:10,50") == [10, 20, 30, 50]
    with pytest.raises(InvalidInputError):
        parse_grid("1")


def test_generate_corners(tmp_path):
    out = tmp_path / "d"
    assert main(["generate", "--p", "2", "--n", "4", "--out", str(out)]) == 0
    pts = read_design_csv((tmp_path / "d.csv").read_text())
    assert pts.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_generate_flagship(tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["generate", "--p", "3", "--n", "148", "--weights", "equal", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "f.json").read_text())
    assert round(meta["rho"], 4) == 0.2430
    assert set(meta) >= {"p", "n_requested", "m", "rho", "variant", "s", "q", "r", "basis", "weights",
                         "algorithm", "runtime_ms"}
    code = Code.from_json({"p": meta["p"], "q": meta["q"], "basis": meta["basis"]})
    assert code.dim == meta["q"]
    pts = read_design_csv((tmp_path / "f.csv").read_text())
    assert pts.shape == (148, 3)
    assert math.sqrt(pairwise_min_sq(pts, np.ones(3))) == pytest.approx(meta["rho"], rel=1e-12)
    printed = capsys.readouterr().out
    for key in ("rho", "m", "q", "r", "s"):
        assert any(line.startswith(key + " ") for line in printed.splitlines())


def test_generate_centered_reports_centered_rho(tmp_path):
    out = tmp_path / "c"
    assert main(["generate", "--p", "2", "--n", "5", "--variant", "centered", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "c.json").read_text())
    pts = read_design_csv((tmp_path / "c.csv").read_text())
    assert pts.min() > 0 and pts.max() < 1
    assert math.sqrt(pairwise_min_sq(pts, np.ones(2))) == pytest.approx(meta["rho"], rel=1e-12)


def test_trim(tmp_path):
    out = tmp_path / "t"
    assert main(["generate", "--p", "6", "--n", "100", "--trim", "--out", str(out)]) == 0
    meta = json.loads((tmp_path / "t.json").read_text())
    pts = read_design_csv((tmp_path / "t.csv").read_text())
    assert meta["m"] == 100 == len(pts) and meta["trimmed_from"] == 108
    assert math.sqrt(pairwise_min_sq(pts, np.ones(6))) >= meta["rho"] * (1 - 1e-12)


def test_enumerate(tmp_path, capsys):
    for p, count in ((2, 2), (3, 6), (4, 26)):
        path = tmp_path / f"l{p}.jsonl"
        assert main(["enumerate", "--p", str(p), "--out", str(path)]) == 0
        assert capsys.readouterr().out.strip() == f"count {count}"
        codes = [Code.from_json(json.loads(line)) for line in path.read_text().splitlines()]
        assert len(codes) == count
        assert all(c.support == (1 << p) - 1 for c in codes)


def test_usage_errors(tmp_path):
    assert main(["enumerate", "--p", "7", "--out", str(tmp_path / "x")]) == 2
    assert main(["generate", "--p", "3"]) == 2
    assert main(["generate", "--p", "3", "--n", "10", "--weights", "1,2"]) == 2
    assert main(["bogus"]) == 2


def test_resource_limit(tmp_path):
    args = ["generate", "--p", "8", "--n", "1000", "--budget-seconds", "1e-6", "--out", str(tmp_path / "r")]
    assert main(args) == 3


def test_compare_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["compare", "--p", "3", "--n", "148", "--lhd-iters", "300", "--imspe", "--mc-samples", "512"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, row = a.read_text().splitlines()
    cells = dict(zip(header.split(","), row.split(",")))
    assert round(float(cells["rho_proposed"]), 4) == 0.2430


def test_compare_json_p6(tmp_path):
    path = tmp_path / "c.json"
    assert main(["compare", "--p", "6", "--n", "16,32", "--lhd-iters", "1000", "--format", "json",
                 "--out", str(path)]) == 0
    rows = json.loads(path.read_text())["rows"]
    assert all(r["rho_proposed"] > r["rho_lhd"] for r in rows)


def test_oracle_check_single_suite(tmp_path):
    path = tmp_path / "o.jsonl"
    assert main(["oracle-check", "--suite", "census", "--out", str(path)]) == 0
    cases = [json.loads(line) for line in path.read_text().splitlines()]
    assert all(c["passed"] for c in cases)
    assert main(["oracle-check", "--suite", "nope", "--out", str(path)]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "ilmaximin.cli", "enumerate", "--p", "2",
                          "--out", str(tmp_path / "e.jsonl")], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "count 2"
