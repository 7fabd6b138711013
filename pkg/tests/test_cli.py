from __future__ import annotations

import contextlib
import csv
import io
import json
import os
from pathlib import Path

import pytest

from hermcurves.cli import EXIT_INVALID, EXIT_MISMATCH, EXIT_OK, main, render_table, table_rows

GOLDEN = Path(__file__).parent / "golden" / "v1"
REGEN = os.environ.get("HERMCURVES_REGEN") == "1"

GOLDEN_RUNS = {
    "table_q2.json": ["table", "--q", "2"],
    "table_q2.csv": ["table", "--q", "2", "--format", "csv"],
    "table_q4.json": ["table", "--q", "4"],
    "table_q5.json": ["table", "--q", "5"],
    "table_q5.csv": ["table", "--q", "5", "--format", "csv"],
    "verify_V_q5_d3.json": ["verify", "--q", "5", "--case", "V", "--d", "3"],
    "verify_III_q7_d3.json": ["verify", "--q", "7", "--case", "III", "--d", "3"],
    "verify_Sym4_q7.json": ["verify", "--q", "7", "--kind", "Sym4"],
    "verify_singer_q5_n7_b3_i1.json": ["verify", "--q", "5", "--n", "7", "--branch", "3", "--i", "1"],
    "semigroup_bounds_q11.json": ["semigroup", "--q", "11", "--kind", "bounds"],
    "semigroup_sfilter_q8.json": ["semigroup", "--q", "8", "--kind", "S-filter"],
    "semigroup_hyper_q7.json": ["semigroup", "--q", "7", "--kind", "hyper-identity"],
}


def run(argv: list[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_output(name):
    code, out, _ = run(GOLDEN_RUNS[name])
    assert code == EXIT_OK
    path = GOLDEN / name
    if REGEN:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()


@pytest.mark.parametrize("q", [2, 5])
def test_csv_and_json_carry_the_same_numbers(q):
    rows = table_rows(q)
    data = json.loads(render_table(q, rows, "json"))
    recs = list(csv.DictReader(io.StringIO(render_table(q, rows, "csv"))))
    assert list(recs[0]) == ["source", "q", "d", "genus", "verdict"]
    assert [(r["source"], int(r["q"]), r["d"], int(r["genus"]), r["verdict"]) for r in recs] == [
        (r["source"], r["q"], r["d"], r["genus"], r["verdict"]) for r in data["rows"]
    ]


def _rows(name: str) -> list[dict]:
    return json.loads((GOLDEN / name).read_text())["rows"]


def test_table_q5_examples():
    rows = {(r["source"], r["d"]): r for r in _rows("table_q5.json")}
    assert rows[("Thm2.1 I", "2")]["genus"] == 4
    assert rows[("Thm2.1 II1", "5")]["genus"] == 0
    assert rows[("Thm2.1 IV1", "3")]["genus"] == 2
    assert rows[("Thm2.1 IV2", "3")]["genus"] == 4
    assert rows[("Thm2.1 V", "3")]["genus"] == 3
    assert rows[("Thm2.1 V", "7")]["genus"] == 1
    assert not any(s.startswith("Thm2.1 III") for s, _ in rows)
    # wild rows beyond the enumeration cap stay partial, never mismatch
    assert rows[("Thm2.1 II1", "5")]["verdict"] == "partial"
    assert all(r["verdict"] != "mismatch" for r in rows.values())


def test_table_q4_examples():
    rows = {(r["source"], r["d"]): r for r in _rows("table_q4.json")}
    assert rows[("Thm2.1 II1", "2")]["genus"] == 2
    assert rows[("Thm2.1 V", "13")]["genus"] == 0
    for r in rows.values():
        assert set(r["verification"]) == {"formula", "rh", "count"}


def test_large_q_table_is_formula_only():
    code, out, _ = run(["table", "--q", "49"])
    assert code == EXIT_OK
    rows = json.loads(out)["rows"]
    assert rows and all(r["verdict"] == "partial" for r in rows)
    assert all(r["verification"] == {"formula": True, "rh": False, "count": False} for r in rows)


def test_verify_outputs():
    data = json.loads((GOLDEN / "verify_III_q7_d3.json").read_text())
    assert data["genus_formula"] == data["genus_rh"] == data["genus_count"] == 7
    data = json.loads((GOLDEN / "verify_Sym4_q7.json").read_text())
    assert data["genus_formula"] == 1 and data["verdict"] == "consistent"


@pytest.mark.parametrize("argv", [
    ["table", "--q", "6"],
    ["verify", "--q", "4", "--case", "I", "--d", "2"],
    ["verify", "--q", "5", "--case", "V"],
    ["verify", "--q", "5"],
    ["verify", "--q", "5", "--case", "V", "--d", "3", "--kind", "Sym4"],
    ["verify", "--q", "5", "--kind", "Sym4"],
    ["verify", "--q", "5", "--kind", "E(3)"],
    ["verify", "--q", "5", "--n", "7"],
    ["semigroup", "--q", "7", "--kind", "S-filter"],
    ["table"],
    ["frobnicate"],
])
def test_invalid_input_exits_2(argv):
    code, out, err = run(argv)
    assert code == EXIT_INVALID
    assert out == ""


def test_error_message_on_stderr():
    code, _, err = run(["table", "--q", "6"])
    assert code == EXIT_INVALID and "prime power" in err


def test_mismatch_exits_1(monkeypatch):
    import hermcurves.cli as cli

    monkeypatch.setitem(cli.SEMIGROUP_CHECKS, "bounds", lambda q: {"q": q, "pass": False})
    code, out, _ = run(["semigroup", "--q", "5", "--kind", "bounds"])
    assert code == EXIT_MISMATCH and json.loads(out)["pass"] is False


def test_semigroup_outputs():
    r = json.loads((GOLDEN / "semigroup_bounds_q11.json").read_text())
    assert (r["g1"], r["g2"], r["g3_candidate"], r["filter_genus"]) == (55, 25, 19, 18)
    r = json.loads((GOLDEN / "semigroup_sfilter_q8.json").read_text())
    assert r["genus"] == 9 and r["m1"] == 5
    r = json.loads((GOLDEN / "semigroup_hyper_q7.json").read_text())
    assert r["generators"] == [5, 7, 8] and r["genus"] == 7
