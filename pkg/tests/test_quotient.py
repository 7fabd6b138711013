from __future__ import annotations

import json

import pytest

from hermcurves.autos import ProjMap, closure, find_tame_sl2_subgroup, generator_T, singer_generators
from hermcurves.gf import FieldError
from hermcurves.hermitian import infinity_section, model
from hermcurves.quotient import (
    GenusReport,
    WildGroupError,
    admissible_cases,
    count_extension_degree,
    genus_formula,
    genus_from_count,
    orbits,
    quotient_point_count,
    rh_genus,
    singer_genus_formula,
    sl2_genus_formula,
    sl2_kinds,
    small_orbits_on_curve,
    substitution_check,
    untwist,
    verify_case,
    verify_singer,
    verify_sl2,
)


def test_orbits_on_infinity_section():
    G = find_tame_sl2_subgroup(5, "C(3,nonsplit)")
    C = model("M3", 5)
    rep = orbits(G, infinity_section(C))
    assert rep.lengths == [3, 3]

    G = find_tame_sl2_subgroup(7, "Sym4")
    rep = orbits(G, infinity_section(model("M3", 7)))
    assert rep.lengths == [8]
    assert rep.orbits[0].stabilizer == 6


def test_trivial_group_orbits():
    C = model("M3", 3)
    G = closure([ProjMap.identity(C.ctx)])
    rep = orbits(G, infinity_section(C))
    assert rep.lengths == [1, 1, 1, 1]
    assert rep.small_orbits == []


def test_orbit_field_mismatch():
    G = singer_generators(2, 3)
    with pytest.raises(FieldError):
        orbits(G, infinity_section(model("M3", 3)))


def test_small_orbits_examples():
    T, C = generator_T("III", 7, 3)
    assert small_orbits_on_curve(closure([T]), C).lengths == [1, 1]
    T, C = generator_T("IV2", 5, 3)
    assert small_orbits_on_curve(closure([T]), C).lengths == []
    G = singer_generators(5, 7, 1)
    assert small_orbits_on_curve(G, model("M4", 5)).lengths == [3, 7, 7, 7]


def test_small_orbits_refuse_wild_groups():
    T, C = generator_T("II1", 3, 3)
    with pytest.raises(WildGroupError):
        small_orbits_on_curve(closure([T]), C)


def test_sl2_small_orbits_lie_on_the_infinity_section():
    for q, kind in ((7, "Sym4"), (5, "D(3,nonsplit)"), (11, "Alt5"), (9, "C(4,split)")):
        C = model("M3", q)
        G = find_tame_sl2_subgroup(q, kind)
        rep = small_orbits_on_curve(G, C)
        inf = {P.coords for P in infinity_section(C)}
        for o in rep.orbits:
            assert G.order % o.length == 0
            assert o.length * o.stabilizer == G.order
            assert o.representative.coords in inf


def test_rh_genus_examples():
    assert rh_genus(21, 3, [1, 1]) == 7
    assert rh_genus(10, 3, []) == 4
    assert rh_genus(21, 48, [8]) == 1
    with pytest.raises(ValueError):
        rh_genus(10, 3, [1])


def test_genus_formula_examples():
    assert genus_formula("I", 5, 2) == 4
    assert genus_formula("II1", 9, 3) == 9
    assert genus_formula("V", 5, 3) == 3
    assert genus_formula("III", 7, 3) == 7
    assert genus_formula("IV1", 5, 3) == 2
    assert genus_formula("IV2", 5, 3) == 4
    assert genus_formula("II2", 3, 3) == 1
    with pytest.raises(ValueError):
        genus_formula("I", 4, 2)


@pytest.mark.parametrize("q", [5, 8, 11, 17, 23, 29])
def test_case_v_d3_landmark(q):
    assert genus_formula("V", q, 3) == (q * q - q - 2) // 6


def test_admissible_cases_q5_and_q4():
    rows = admissible_cases(5)
    assert ("I", 2) in rows and ("II1", 5) in rows and ("II2", 5) in rows
    assert ("IV1", 3) in rows and ("IV2", 3) in rows and ("V", 3) in rows and ("V", 7) in rows
    assert not any(c == "III" for c, _ in rows)
    assert genus_formula("V", 5, 7) == 1
    rows4 = admissible_cases(4)
    assert ("II1", 2) in rows4 and ("V", 13) in rows4
    assert genus_formula("II1", 4, 2) == 2 and genus_formula("V", 4, 13) == 0


def test_sl2_genus_formula_examples():
    assert sl2_genus_formula("Sym4", 7) == 1
    assert sl2_genus_formula("Alt5", 11) == 1
    assert sl2_genus_formula("C(3,nonsplit)", 5) == 4
    with pytest.raises(ValueError):
        sl2_genus_formula("Sym4", 5)


@pytest.mark.parametrize("q", [5, 11, 17, 23, 29])
def test_odd_cyclic_branch_agrees_with_case_iv2(q):
    # both closed forms apply when d is an odd prime dividing (q+1)/2
    for d in range(3, (q + 1) // 2 + 1, 2):
        if ((q + 1) // 2) % d == 0 and all(d % r for r in range(2, d)):
            assert sl2_genus_formula(f"C({d},nonsplit,odd)", q) == genus_formula("IV2", q, d)


def test_singer_genus_formula_examples():
    assert singer_genus_formula(5, 21, 1) == 0
    assert singer_genus_formula(5, 3, 2) == 1
    assert singer_genus_formula(5, 7, 3) == 0
    assert singer_genus_formula(5, 7, 3, i=0) == 1
    with pytest.raises(ValueError):
        singer_genus_formula(5, 7, 2)


def test_quotient_point_count_examples():
    for case, q, d, N in (("I", 5, 2, 66), ("V", 5, 3, 56), ("II1", 3, 3, 10)):
        T, C = generator_T(case, q, d)
        assert quotient_point_count(closure([T]), C) == N
    assert genus_from_count(66, 5) == 4


def test_quotient_point_count_rejects_composite_groups():
    G = singer_generators(5, 21)
    with pytest.raises(ValueError):
        quotient_point_count(G, model("M4", 5))
    T, C = generator_T("V", 3, 7)
    with pytest.raises(FieldError):
        quotient_point_count(closure([T]), C, cap=2**20)


def test_genus_from_count_is_exact():
    with pytest.raises(ArithmeticError):
        genus_from_count(67, 5)


@pytest.mark.parametrize("case,q,d", [("I", 5, 2), ("III", 7, 3), ("IV1", 5, 3), ("V", 5, 3), ("II1", 3, 3), ("V", 3, 7)])
def test_extension_degree_is_d(case, q, d):
    T, C = generator_T(case, q, d)
    G, Cu = untwist(closure([T]), C)
    assert Cu.twist is None
    assert count_extension_degree(Cu, G.generators[0], d) == d


@pytest.mark.parametrize("case,q,d,g", [("III", 7, 3, 7), ("IV1", 5, 3, 2), ("II2", 3, 3, 1)])
def test_verify_case_examples(case, q, d, g):
    rep = verify_case(case, q, d)
    assert rep.verdict == "consistent"
    assert rep.genus_formula == g
    assert rep.genus_count == g
    if case != "II2":
        assert rep.genus_rh == g
    else:
        assert rep.genus_rh is None


def test_verify_case_partial_when_cap_exceeded():
    rep = verify_case("IV1", 4, 5, cap=2**16)
    assert rep.genus_count is None and rep.genus_rh == rep.genus_formula
    assert rep.verdict == "consistent"
    rep = verify_case("II1", 5, 5, cap=2**16)
    assert rep.verdict == "partial" and rep.genus_rh is None and rep.genus_count is None


def test_genus_report_json_schema():
    rep = verify_case("V", 5, 3)
    d = json.loads(rep.to_json())
    assert list(d) == ["case", "q", "d", "genus_formula", "genus_rh", "genus_count", "verdict", "orbits"]
    assert d["orbits"] == [{"length": 1, "stabilizer": 3}] * 3
    rep = GenusReport("I", 5, 2, 4, diagnostics=["x"])
    assert "diagnostics" in rep.to_dict()


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_substitution_checks(q):
    for case, d in admissible_cases(q, max_d=60):
        assert substitution_check(case, q, d), (case, q, d)
        if case == "II2":
            assert substitution_check(case, q, d, form="proof")


def test_verify_sl2_reports_branch():
    r = verify_sl2("D(3,nonsplit)", 11)
    assert r.verdict == "consistent" and r.branch == "q=3 mod 4"
    r = verify_sl2("D(2,split)", 13)
    assert r.genus_rh == r.genus_formula and "q=1 mod 4" in r.branch


def test_sl2_kinds_lists_the_exceptional_groups():
    assert "Sym4" in sl2_kinds(7) and "Alt4" in sl2_kinds(7)
    assert "Alt5" in sl2_kinds(11)
    assert "Alt5" not in sl2_kinds(9) and "Alt4" not in sl2_kinds(9)
    assert all(k.startswith("C(") for k in sl2_kinds(8))


def test_verify_singer_examples():
    r = verify_singer(5, 7, 3)
    assert r.i == 1 and r.order == 21 and r.genus_rh == r.genus_formula == 0
    r = verify_singer(5, 7, 3, 0)
    assert r.genus_rh == r.genus_formula == 1
    r = verify_singer(4, 13, 2)
    assert r.verdict == "consistent"
