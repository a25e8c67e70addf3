"""CLI tests: each subcommand's JSON against the library call it fronts,
verdict exit codes, error paths, and the run/report file round trip."""

import json
import shutil
import subprocess

import pytest

from binform.cli import main
from binform.exponents import ExponentTable
from binform.expsums import sum_T, weyl_sum
from binform.forms import parse_form_literal
from binform.numerics import PrecReal
from binform.search import SearchBox, min_fracpart


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


FORM = "k=3 l=1 alpha_k=sqrt2 alphas=[pi,e]"


def test_smooth(capsys):
    out = _json(capsys, "smooth", "--Y", "20", "--R", "3")
    assert out == {"Y": 20, "R": 3, "count": 10,
                   "members": [1, 2, 3, 4, 6, 8, 9, 12, 16, 18]}
    out = _json(capsys, "smooth", "--Y", "20", "--R", "3", "--count-only")
    assert "members" not in out and out["count"] == 10


def test_dirichlet(capsys):
    out = _json(capsys, "dirichlet", "--alpha", "355/113", "--N", "10")
    assert (out["a"], out["q"]) == (22, 7)
    assert out["err"] == pytest.approx(abs(7 * 355 / 113 - 22))
    best = _json(capsys, "dirichlet", "--alpha", "355/113", "--N", "10",
                 "--exact-best")
    assert best["exact_best"] and best["q"] <= 10


def test_exponents_json_and_latex(capsys):
    out = _json(capsys, "exponents", "--k", "30", "--l", "1")
    want = ExponentTable.build(30, 1).to_dict()
    assert out == json.loads(json.dumps(want, sort_keys=True))
    code, text, _ = _run(capsys, "exponents", "--k", "10", "--latex")
    assert code == 0
    assert "tabular" in text and "2^{1-k}" in text


def test_expsum_weyl_matches_library(capsys):
    out = _json(capsys, "expsum", "weyl", "--alpha", "sqrt2", "--k", "3",
                "--X", "50", "--h", "2")
    want = weyl_sum(PrecReal.named("sqrt2"), 3, 50, 2)
    assert out["value"] == want
    assert out["params"]["h"] == 2 and out["elapsed_ms"] >= 0


def test_expsum_T_matches_library(capsys):
    out = _json(capsys, "expsum", "T", "--form", FORM, "--H", "3",
                "--X", "15", "--Y", "15")
    f = parse_form_literal(FORM)
    assert out["value"] == sum_T(f, 3, 15, 15).value
    assert out["params"]["kind"] == "T"


def test_expsum_xi(capsys):
    out = _json(capsys, "expsum", "xi", "--V", "2", "--U", "2", "--L", "300",
                "--k", "4", "--l", "1", "--beta", "golden")
    assert out["value"] > 0
    assert out["params"]["hypothesis_ok"] is True


def test_check_lemma21_drawn_and_explicit(capsys):
    out = _json(capsys, "check", "lemma21", "--H", "40", "--N", "100",
                "--seed", "3")
    assert out["passed"] and out["holds_hypothesis"]
    assert out["lhs"] >= out["rhs"] - 2 ** -30
    # explicit values violating the hypothesis: 1/100 < 1/40
    code, text, _ = _run(capsys, "check", "lemma21", "--H", "40",
                         "--values", "1/100,1/2")
    assert code == 1  # verdict failure exit code
    assert json.loads(text)["holds_hypothesis"] is False


def test_check_appendix(capsys):
    out = _json(capsys, "check", "appendixA", "--alpha", "1/1024",
                "--N", "500", "--m", "3")
    assert out["passed"]
    assert set(out["variants"]) == {"variant1", "variant2", "variant3"}
    for v in out["variants"].values():
        assert v["ratio"] == pytest.approx(v["sum"] / v["bound"])


def test_check_lemma31_trend(capsys):
    out = _json(capsys, "check", "lemma31-trend", "--form", FORM,
                "--X-grid", "20,40", "--eps", "0.1")
    assert out["passed"] and len(out["rows"]) == 2
    for row in out["rows"]:
        assert 0 < row["ratio"] <= 32
        assert row["H"] >= 2


def test_search_matches_library(capsys):
    out = _json(capsys, "search", "--form", FORM, "--X", "60", "--Y", "60")
    res = min_fracpart(parse_form_literal(FORM), SearchBox(60, 60))
    assert (out["best_x"], out["best_y"]) == (res.best_x, res.best_y)
    assert out["min_value"] == res.min_value
    assert out["evaluations"] == res.evaluations


def test_search_smooth_and_no_axes(capsys):
    out = _json(capsys, "search", "--form", FORM, "--X", "40", "--Y", "40",
                "--smooth-R", "5", "--no-axes")
    assert out["provenance"].startswith("smooth-y")
    assert out["box"]["include_axes"] is False
    assert out["best_x"] >= 1 and out["best_y"] >= 1


def test_reduce_trace(capsys):
    out = _json(capsys, "reduce", "--form", FORM, "--X", "500")
    assert out["mode"] == "t11" and len(out["steps"]) == 1
    assert out["final_diagonal"]["k"] == 3
    assert out["windows_ok"] is True


def test_find_small(capsys):
    out = _json(capsys, "find-small", "--form", FORM, "--X", "200")
    assert 0 <= out["result"]["min_value"] < 1
    assert out["trace"]["mode"] == "t11"
    assert out["result"]["provenance"].startswith(("constructive",
                                                   "exhaustive"))


def test_run_and_report_roundtrip(capsys, tmp_path):
    spec = {"id": "d", "kind": "diagonal-bound", "k": 2, "l": 0,
            "coefficient_source": "named constants", "X_grid": [20, 40],
            "epsilon": 0.1, "H_rule": "sqrt", "seed": 5}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out_path = tmp_path / "runs.jsonl"

    meta = _json(capsys, "run", "--spec", str(spec_path), "--out",
                 str(out_path), "--timestamp", "")
    assert meta["written"] == 1 and meta["timestamp"] == ""
    line1 = out_path.read_text()

    # replay appends a byte-identical second line
    _json(capsys, "run", "--spec", str(spec_path), "--out", str(out_path),
          "--timestamp", "")
    lines = out_path.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == lines[1] == line1.strip()

    code, table, _ = _run(capsys, "report", "--in", str(out_path),
                          "--format", "csv")
    assert code == 0
    rows = table.strip().split("\n")
    assert rows[0].startswith("id,kind,k,l,X")
    assert len(rows) == 1 + 4  # two records x two grid points
    assert rows[1].startswith("d,diagonal-bound,2,0,20,")


def test_run_default_timestamp_is_utc_now(capsys, tmp_path):
    spec = {"id": "t", "kind": "lemma21", "k": 3, "l": 1,
            "coefficient_source": "seeded uniform", "X_grid": [30],
            "epsilon": 0.1, "H_rule": "sqrt", "seed": 5}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    meta = _json(capsys, "run", "--spec", str(spec_path), "--out",
                 str(tmp_path / "o.jsonl"))
    assert meta["timestamp"].endswith("+00:00")


def test_error_paths(capsys, tmp_path):
    code, _, err = _run(capsys, "search", "--form", "k=3 l=9 alpha_k=pi "
                        "alphas=[e]", "--X", "10", "--Y", "10")
    assert code == 2 and "binform:" in err
    # integer-form literal refused where a real form is needed
    code, _, err = _run(capsys, "search", "--form", "coeffs=[1,0,0,2]",
                        "--X", "10", "--Y", "10")
    assert code == 2 and "real form" in err
    code, _, err = _run(capsys, "report", "--in",
                        str(tmp_path / "missing.jsonl"))
    assert code == 2
    code, _, err = _run(capsys, "search", "--form", FORM, "--X", "10000",
                        "--Y", "10000", "--budget", "100")
    assert code == 2 and "budget" in err.lower()


def test_console_script_installed():
    exe = shutil.which("binform")
    assert exe, "console script should be on PATH after editable install"
    proc = subprocess.run([exe, "exponents", "--k", "5"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["k"] == 5
