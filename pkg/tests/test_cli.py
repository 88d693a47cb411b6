import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_trig_poly
from pathfixtures import s_closed, same_base_path, zero_crossing_path
from warpedbundle.cli import main, read_path_csv, write_path_csv
from warpedbundle.cohomology import default_radii, delta_alpha, write_table
from warpedbundle.exceptions import MalformedCSV
from warpedbundle.quotient import SampledPath
from warpedbundle.rotation import make_rotation, small_divisor

LIOUVILLE = "cf:10,100,10000,100000000"


def run_json(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_solve_abs2_obstructed(tmp_path):
    code, d = run_json(tmp_path, "solve", "--alpha", "golden", "--f", "abs2")
    assert code == 0
    r = d["report"]
    assert r["status"] == "obstructed"
    assert np.max(np.abs(np.array(r["profile"]) - default_radii() ** 2)) < 1e-12


def test_solve_zero(tmp_path):
    code, d = run_json(tmp_path, "solve", "--f", "zero")
    assert code == 0 and d["report"]["status"] == "solved"
    assert d["report"]["residual"] == 0


def test_solve_liouville_contrast(tmp_path):
    _, g = run_json(tmp_path, "solve", "--alpha", "golden", "--f", "re", "--K", "32")
    code, lv = run_json(tmp_path, "solve", "--alpha", LIOUVILLE, "--f", "re", "--K", "32")
    assert code == 0
    ratio = lv["report"]["amplification"]["value"] / g["report"]["amplification"]["value"]
    assert ratio == pytest.approx(3.019, rel=1e-3)


def test_solve_overflow_exit_3(tmp_path, caplog):
    # alpha ~ 1e-14: |c_1| / d_1 ~ 0.5 / 6e-14 exceeds the 1e12 guard
    code = main(["solve", "--alpha", "cf:100000000000000", "--f", "re", "--K", "2",
                 "--out", str(tmp_path / "x.json")])
    assert code == 3
    assert "SmallDivisorOverflow" in caplog.text


def test_solve_csv(tmp_path):
    out = tmp_path / "out.csv"
    assert main(["solve", "--f", "re", "--J", "4", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,mean,sigma_norm" and len(lines) == 6


def test_class_verdicts(tmp_path, golden, rng):
    _, d = run_json(tmp_path, "class", "--f", "abs2")
    assert d["trivial"] is False
    assert np.allclose(d["profile"], default_radii() ** 2, atol=1e-12)
    assert d["radii"] == pytest.approx(default_radii().tolist())

    _, d = run_json(tmp_path, "class", "--f", "boundary")
    assert d["trivial"] is False and d["profile"] == [1.0]

    table = tmp_path / "f.csv"
    write_table(delta_alpha(golden, random_trig_poly(rng, 6)), table)
    _, d = run_json(tmp_path, "class", "--f", f"table:{table}")
    assert d["trivial"] is True and d["certificate"]["residual"] < 1e-12


def test_class_malformed_table_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    assert main(["class", "--f", f"table:{bad}", "--out", str(tmp_path / "o")]) == 1


def test_obstruction(tmp_path):
    code, d = run_json(tmp_path, "obstruction", "--n", "1", "--Ks", "8,16,32")
    assert code == 0 and d["holds"]
    assert [e["min_residual"] for e in d["entries"]] == pytest.approx([1.0] * 3, abs=1e-9)
    code, d = run_json(tmp_path, "obstruction", "--n", "2", "--Ks", "8")
    assert d["entries"][0]["min_residual"] == pytest.approx(2.0, abs=1e-9)


def test_obstruction_n_zero_exit_1(tmp_path):
    assert main(["obstruction", "--n", "0", "--out", str(tmp_path / "o")]) == 1


def test_divide_path_zero_crossing(tmp_path, golden):
    path, m = zero_crossing_path(golden, 200, s=lambda t: 0 * t)
    src = tmp_path / "p.csv"
    write_path_csv(src, path)
    out = tmp_path / "s.csv"
    assert main(["divide-path", str(src), "--out", str(out)]) == 0
    rows = np.genfromtxt(out, delimiter=",", names=True)
    assert np.max(np.abs(rows["s"])) < 1e-15
    assert rows["m"][0] == 0 and rows["m"][-1] == 1
    summary = json.loads((tmp_path / "s.csv.summary.json").read_text())
    assert [r["m"] for r in summary["branch_runs"]] == [0, 1]
    assert summary["max_ds_jump"] < 1e-12


def test_divide_path_smooth_nonzero(tmp_path, golden):
    path, _ = zero_crossing_path(golden, 200)
    src = tmp_path / "p.csv"
    write_path_csv(src, path)
    out = tmp_path / "s.json"
    assert main(["divide-path", str(src), "--format", "json", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert np.max(np.abs(np.array(d["s"]) - s_closed(path.ts))) < 1e-12


def test_divide_path_sine(tmp_path, golden):
    p = same_base_path()
    src = tmp_path / "p.csv"
    write_path_csv(src, p)
    out = tmp_path / "s.csv"
    summ = tmp_path / "summary.json"
    assert main(["divide-path", str(src), "--out", str(out), "--summary", str(summ)]) == 0
    rows = np.genfromtxt(out, delimiter=",", names=True)
    assert np.max(np.abs(rows["s"] - np.sin(rows["t"]))) < 1e-15
    assert json.loads(summ.read_text())["config"]["alpha"]["spec"] == "golden"


def test_divide_path_mismatch_exit_3(tmp_path):
    ts = np.linspace(0.1, 1, 5)
    src = tmp_path / "p.csv"
    write_path_csv(src, SampledPath(ts, 0.5 * ts, 0.3 * ts, ts, ts))
    assert main(["divide-path", str(src), "--out", str(tmp_path / "o.csv")]) == 3


@pytest.mark.parametrize("text", [
    "t,s\n0,1\n",
    "t,re_w1,im_w1,tau1,re_w2,im_w2,tau2\n0,0,0,0,0,0\n",
    "t,re_w1,im_w1,tau1,re_w2,im_w2,tau2\n0,a,0,0,0,0,0\n",
    "t,re_w1,im_w1,tau1,re_w2,im_w2,tau2\n1,0,0,0,0,0,0\n0,0,0,0,0,0,0\n",
    "",
])
def test_malformed_path_csv(tmp_path, text):
    src = tmp_path / "p.csv"
    src.write_text(text)
    with pytest.raises(MalformedCSV):
        read_path_csv(src)
    assert main(["divide-path", str(src), "--out", str(tmp_path / "o.csv")]) == 1


def test_path_csv_round_trip(tmp_path, golden):
    path, _ = zero_crossing_path(golden, 10)
    src = tmp_path / "p.csv"
    write_path_csv(src, path)
    back = read_path_csv(src)
    for name in ("ts", "w1", "w2", "tau1", "tau2"):
        assert np.array_equal(getattr(back, name), getattr(path, name))


def test_smalldiv(tmp_path, golden):
    out = tmp_path / "d.csv"
    assert main(["smalldiv", "--kmax", "5", "--out", str(out)]) == 0
    rows = np.genfromtxt(out, delimiter=",", names=True)
    assert rows["k"].tolist() == [1, 2, 3, 4, 5]
    assert np.all(rows["divisor"] > 0)
    assert np.allclose(rows["divisor"], 2 * np.abs(np.sin(np.pi * rows["k"] * golden.value)),
                       atol=1e-14)


def test_smalldiv_fibonacci_rows_are_local_minima(tmp_path, golden):
    out = tmp_path / "d.csv"
    assert main(["smalldiv", "--kmax", "400", "--out", str(out)]) == 0
    d = np.genfromtxt(out, delimiter=",", names=True)["divisor"]
    fib = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377]
    for q, q_next in zip(fib[1:], fib[2:]):
        assert np.argmin(d[: q_next - 1]) + 1 == q
    # scan oracle: running minima occur exactly at Fibonacci numbers
    record = [k for k in range(1, 401) if d[k - 1] < d[: k - 1].min(initial=np.inf)]
    assert record == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377]


@pytest.mark.parametrize("argv", [
    ["solve"],
    ["solve", "--f", "abs2", "--K", "0"],
    ["solve", "--f", "abs2", "--J", "1"],
    ["solve", "--f", "nope"],
    ["solve", "--f", "abs2", "--alpha", "float:0.375"],
    ["solve", "--f", "abs2", "--mean-tol", "-1"],
    ["smalldiv", "--kmax", "0"],
    ["bogus"],
    ["obstruction", "--Ks", "a,b"],
])
def test_usage_errors_exit_1(argv, tmp_path):
    try:
        code = main([*argv, "--out", str(tmp_path / "o")] if argv != ["bogus"] else argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_reports_embed_config(tmp_path):
    _, d = run_json(tmp_path, "solve", "--alpha", "cf:3,1,4", "--f", "re", "--K", "5", "--J", "4")
    cfg = d["config"]
    assert cfg["alpha"]["cf_prefix"] == [3, 1, 4]
    assert (cfg["K"], cfg["J"], cfg["n_max"]) == (5, 4, 1024)
    assert cfg["tolerances"]["mean_tol"] == 1e-10


@pytest.mark.parametrize("argv", [
    ["solve", "--f", "abs2"],
    ["class", "--f", "re"],
    ["obstruction", "--n", "3"],
    ["smalldiv", "--kmax", "50"],
])
def test_subprocess_deterministic(tmp_path, argv):
    outs = []
    for i in range(2):
        out = tmp_path / f"o{i}"
        proc = subprocess.run([sys.executable, "-m", "warpedbundle.cli", *argv, "--out", str(out)],
                              capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_subprocess_exit_codes_total(tmp_path):
    cases = [(["solve", "--f", "abs2"], 0), (["solve"], 1), (["obstruction", "--n", "0"], 1)]
    for argv, expected in cases:
        proc = subprocess.run([sys.executable, "-m", "warpedbundle.cli", *argv],
                              capture_output=True)
        assert proc.returncode == expected
