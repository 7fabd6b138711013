from __future__ import annotations

import numpy as np
import pytest

from hermcurves.autos import (
    CASES,
    ClosureCapExceeded,
    NotCoveredError,
    ProjMap,
    char_poly,
    closure,
    eigenvalues,
    ext6,
    find_tame_sl2_subgroup,
    fixed_points_on,
    generator_T,
    parse_kind,
    plane_fixed_points,
    preserves,
    psl2_order,
    psl_image_order,
    singer_generators,
    singer_h,
    singer_hi,
    sl2_elements,
    sl2_embed,
    sl2_kind_admissible,
    sl2_order,
    _fq,
)
from hermcurves.gf import FieldError, embedding, make_field, root_of_unity
from hermcurves.hermitian import ProjPoint, enumerate_points, infinity_section, model
from hermcurves.poly import UniPoly, roots_scan_codes
from hermcurves.quotient import admissible_cases


def test_projmap_normalization_and_equality():
    F = make_field(5, 2)
    A = ProjMap.make(F, ((2, 0, 0), (0, 4, 0), (0, 0, 2)))
    B = ProjMap.diag(F, 1, 2, 1)
    assert A == B
    assert A.matrix[0][0] == 1
    with pytest.raises(ValueError):
        ProjMap.make(F, ((1, 0, 0), (1, 0, 0), (0, 0, 1)))


def test_projmap_group_laws():
    F = make_field(3, 2)
    rng = np.random.default_rng(2)
    maps = []
    while len(maps) < 6:
        rows = rng.integers(0, F.order, (3, 3)).tolist()
        try:
            maps.append(ProjMap.make(F, rows))
        except ValueError:
            pass
    I = ProjMap.identity(F)
    for a in maps:
        assert a @ a.inverse() == I
        assert a ** 3 == a @ a @ a
        assert a ** -2 == (a.inverse()) ** 2
        for b in maps:
            P = ProjPoint.make(F, 1, 2, 1)
            assert (a @ b).apply(P) == a.apply(b.apply(P))


def test_generator_examples():
    T, C = generator_T("I", 5, 2)
    F = C.ctx
    assert C.id == "EQ11"
    assert T == ProjMap.diag(F, F.neg(1), 1, 1)
    assert T.order() == 2

    T, C = generator_T("III", 7, 3)
    F = C.ctx
    assert C.id == "M3" and T.is_diagonal()
    cubes = [a for a in range(2, F.order) if F.pow(a, 3) == 1]
    assert T in {ProjMap.diag(F, a, F.inv(a), 1) for a in cubes}

    T, C = generator_T("V", 5, 3)
    E = ext6(5)
    assert C.id == "M4" and T.ctx is E
    a = root_of_unity(E, 3).v
    assert T == ProjMap.diag(E, a, E.pow(a, 5), 1)
    assert len(fixed_points_on(C, T)) == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13])
def test_every_generator_preserves_its_model_with_order_d(q):
    for case, d in admissible_cases(q):
        if case == "V" and d > 200:
            continue
        T, C = generator_T(case, q, d)
        assert preserves(C, T), (case, q, d)
        assert T.order() == d


def test_generator_errors():
    with pytest.raises(ValueError):
        generator_T("I", 4, 2)
    with pytest.raises(ValueError):
        generator_T("III", 7, 5)
    with pytest.raises(ValueError):
        generator_T("IV1", 5, 2)
    with pytest.raises(ValueError):
        generator_T("VI", 5, 3)
    assert len(CASES) == 7


def test_sl2_embed_examples():
    q = 5
    I = sl2_embed(1, 0, 0, 1, q)
    assert I.is_identity()
    w = sl2_embed(0, 1, -1, 0, q)
    assert w.order() == 4
    K = _fq(q)
    assert psl2_order(K, (0, 1, K.neg(1), 0)) == 2
    assert sl2_order(K, (0, 1, K.neg(1), 0)) == 4
    minus = sl2_embed(-1, 0, 0, -1, q)
    F = minus.ctx
    assert minus == ProjMap.diag(F, F.neg(1), F.neg(1), 1)


def test_sl2_embed_errors():
    with pytest.raises(ValueError):
        sl2_embed(1, 1, 0, 2, 5)
    F = make_field(5, 2)
    t = F.gen  # not in F_5
    with pytest.raises(ValueError):
        sl2_embed(t, 0, 0, t.inverse(), 5)


def test_sl2_embed_preserves_m3():
    for q in (3, 4, 5, 7):
        C = model("M3", q)
        els = sl2_elements(q)
        rng = np.random.default_rng(q)
        assert len(els) == q * (q * q - 1)
        for i in rng.choice(len(els), size=min(100, len(els)), replace=False):
            assert preserves(C, sl2_embed(*els[i], q))


def test_preserves_negative():
    q = 5
    C = model("M1", q)
    F = C.ctx
    rho = root_of_unity(F, 8).v
    assert F.pow(rho, q + 1) != 1
    assert not preserves(C, ProjMap.diag(F, 1, 1, rho))


def test_closure_examples():
    T, _ = generator_T("I", 5, 2)
    assert closure([T]).order == 2
    G = find_tame_sl2_subgroup(7, "Alt4")  # the preimage is SL(2,3)
    assert G.order == 24
    h = singer_h(5)
    G = closure([h, singer_hi(5, 0)], cap=200)
    assert G.order == 63


def test_closure_cap_and_field_checks():
    h = singer_h(5)
    with pytest.raises(ClosureCapExceeded):
        closure([h], cap=10)
    with pytest.raises(FieldError):
        closure([h, ProjMap.identity(make_field(5, 2))])
    with pytest.raises(ValueError):
        closure([])


def test_closure_is_closed_and_deterministic():
    G = find_tame_sl2_subgroup(5, "D(3,nonsplit)")
    assert G.is_closed()
    again = find_tame_sl2_subgroup(5, "D(3,nonsplit)")
    assert [g.matrix for g in G.elements] == [g.matrix for g in again.elements]


def test_singer_examples():
    assert singer_generators(5, 21).order == 21
    G = singer_generators(5, 7, 1)
    assert G.order == 21 and G.is_closed()
    assert singer_generators(4, 13, 0).order == 39
    C = model("M4", 5)
    assert all(preserves(C, g) for g in G.generators)


def test_singer_errors():
    with pytest.raises(ValueError):
        singer_generators(5, 5)
    with pytest.raises(NotCoveredError):
        singer_generators(3, 7, 0)
    with pytest.raises(ValueError):
        singer_generators(4, 13, 1)
    assert singer_generators(3, 7).order == 7


@pytest.mark.parametrize("q,kind,order,image", [
    (5, "C(3,nonsplit)", 3, 3),
    (5, "C(3,nonsplit,full)", 6, 3),
    (7, "Sym4", 48, 24),
    (11, "Alt5", 120, 60),
    (5, "Alt4", 24, 12),
    (7, "D(3,split)", 12, 6),
    (8, "C(7,split)", 7, 7),
    (9, "D(5,nonsplit)", 20, 10),
])
def test_find_tame_sl2_subgroup(q, kind, order, image):
    G = find_tame_sl2_subgroup(q, kind)
    assert G.order == order
    assert psl_image_order(G) == image
    assert all(preserves(model("M3", q), g) for g in G.generators)


def test_sl2_kind_conditions():
    assert not sl2_kind_admissible(5, "Sym4")  # 25 != 1 mod 16
    assert sl2_kind_admissible(7, "Sym4")
    assert not sl2_kind_admissible(9, "Alt5")  # p = 3
    assert not sl2_kind_admissible(9, "Alt4")  # p >= 5 enforced
    assert not sl2_kind_admissible(5, "C(4,split)")
    assert not sl2_kind_admissible(8, "D(9,nonsplit)")  # dihedral kinds need p >= 3
    with pytest.raises(ValueError):
        parse_kind("E(3)")
    with pytest.raises(ValueError):
        find_tame_sl2_subgroup(5, "Sym4")


def test_fixed_points_examples():
    T, C = generator_T("III", 7, 3)
    E = ext6(7)
    assert {P.coords for P in fixed_points_on(C, T, E)} == {(1, 0, 0), (0, 1, 0)}

    T, C = generator_T("IV1", 5, 3)
    E = ext6(5)
    pts = fixed_points_on(C, T, E)
    assert len(pts) == 6
    for P in pts:
        # (0 : eta : 1) normalizes to (0 : 1 : eta^-1)
        x, y, z = P.coords
        assert (x, y) == (0, 1) and E.pow(z, 6) == E.neg(1)

    T, C = generator_T("IV2", 5, 3)
    assert fixed_points_on(C, T) == set()


def test_fixed_points_errors():
    T, C = generator_T("V", 5, 3)
    with pytest.raises(FieldError):
        fixed_points_on(C, T, C.ctx)
    with pytest.raises(ValueError):
        fixed_points_on(C, ProjMap.identity(T.ctx))


def test_fixed_points_match_brute_force():
    for case, q, d in (("V", 2, 3), ("IV1", 2, 3), ("III", 4, 3), ("V", 3, 7), ("I", 3, 2)):
        T, C = generator_T(case, q, d)
        E = ext6(q)
        pts = enumerate_points(C, E)
        brute = {P for P in pts if T.apply(P) == P}
        assert fixed_points_on(C, T, E) == brute


def test_eigenvalues_match_scan():
    E = make_field(3, 12)  # splits every cubic over F_9
    F = make_field(3, 2)
    rng = np.random.default_rng(4)
    done = 0
    while done < 30:
        try:
            M = ProjMap.make(F, rng.integers(0, F.order, (3, 3)).tolist())
        except ValueError:
            continue
        done += 1
        f = char_poly(M)
        emb = embedding(F, E)
        scan = sorted(roots_scan_codes(UniPoly(E, tuple(emb.code(c) for c in f.coeffs))))
        assert eigenvalues(M, E) == scan


def test_singer_fixed_point_inventory():
    for q in (2, 5, 8):
        C = model("M4", q)
        E = ext6(q)
        assert fixed_points_on(C, singer_hi(q, 0), E) == set()
        pts, lines = plane_fixed_points(singer_hi(q, 0), E)
        assert len(pts) == 3 and lines == 0
        for i in (1, 2):
            pts, lines = plane_fixed_points(singer_hi(q, i), E)
            assert lines == 0 and pts == fixed_points_on(C, singer_hi(q, i), E)
    # h fixes the coordinate triangle, which lies on M4
    C = model("M4", 5)
    assert {P.coords for P in fixed_points_on(C, singer_h(5))} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_kernel_fixes_infinity_section_pointwise():
    for q in (5, 7, 9):
        C = model("M3", q)
        k = sl2_embed(-1, 0, 0, -1, q)
        for P in infinity_section(C):
            assert k.apply(P) == P
        assert not any(k.apply(P) == P for P in [ProjPoint.make(C.ctx, 1, 1, 1)])
