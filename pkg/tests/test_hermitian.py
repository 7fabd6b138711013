from __future__ import annotations

import numpy as np
import pytest

from hermcurves.autos import ProjMap, ext6
from hermcurves.gf import FieldError, make_field
from hermcurves.hermitian import (
    HERMITIAN_IDS,
    ProjPoint,
    count_points,
    enumerate_points,
    equivalence_matrix,
    generic_points,
    infinity_section,
    iter_point_chunks,
    m4_transport,
    model,
    on_curve,
    point_arrays,
    rational_point_count,
)
from hermcurves.poly import TriPoly, inv3, matmul3, substitute_map


def test_model_eq11_q3():
    C = model("EQ11", 3)
    F = C.ctx
    assert C.poly == TriPoly(F, {(0, 3, 1): 1, (0, 1, 3): 1, (4, 0, 0): F.neg(1)})
    assert C.genus == 3


def test_model_m1_and_m4():
    for q in (2, 3, 4):
        C = model("M1", q)
        assert C.poly.terms == {(q + 1, 0, 0): 1, (0, q + 1, 0): 1, (0, 0, q + 1): 1}
    assert model("M4", 2).poly.terms == {(1, 2, 0): 1, (0, 1, 2): 1, (2, 0, 1): 1}


def test_model_rejects_bad_input():
    with pytest.raises(ValueError):
        model("EQ11", 6)
    with pytest.raises(ValueError):
        model("M9", 3)


def test_on_curve_examples():
    C = model("EQ11", 3)
    F = C.ctx
    assert on_curve(C, ProjPoint.make(F, 0, 1, 0))
    M3 = model("M3", 5)
    assert not on_curve(M3, ProjPoint.make(M3.ctx, 0, 0, 1))
    M1 = model("M1", 3)
    t = M1.ctx.gen  # t^2 = -1, so t^4 = 1 and 1 + t^4 != 0
    assert not on_curve(M1, ProjPoint.make(M1.ctx, 1, t, 0))
    u = t + 1  # order 8, u^4 = -1
    assert on_curve(M1, ProjPoint.make(M1.ctx, 1, u, 0))


def test_enumerate_examples():
    assert len(enumerate_points(model("EQ11", 3))) == 28
    assert len(enumerate_points(model("M1", 2))) == 9
    C = model("EQ11", 3)
    assert count_points(C, make_field(3, 6)) == 729 + 1 + 162


def test_enumerated_points_are_normalized_and_on_curve():
    C = model("M2", 3)
    for P in enumerate_points(C):
        first = next(c for c in P.coords if c)
        assert first == 1
        assert on_curve(C, P)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
def test_hermitian_is_maximal(q):
    C = model("EQ11", q)
    assert count_points(C, C.ctx) == q**3 + 1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_counts_agree_across_models(q):
    counts = {mid: count_points(model(mid, q), model(mid, q).ctx) for mid in ("EQ11", "M1", "M2", "M3")}
    assert set(counts.values()) == {q**3 + 1}


def test_m4_plain_count_differs_but_twisted_count_is_maximal():
    plain = {q: count_points(model("M4", q), model("M4", q).ctx) for q in (2, 3, 4, 5)}
    assert plain == {2: 9, 3: 10, 4: 17, 5: 36}
    for q in (2, 3, 4):
        assert rational_point_count(model("M4", q)) == q**3 + 1


@pytest.mark.parametrize("q", [2, 3])
def test_m4_and_m1_agree_over_fq6(q):
    E = ext6(q)
    assert count_points(model("M4", q), E) == count_points(model("M1", q), E)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
@pytest.mark.parametrize("target", ["M1", "M2", "M3"])
def test_equivalence_matrices(q, target):
    img = substitute_map(model("EQ11", q).poly, equivalence_matrix(target, q))
    assert img == model(target, q).poly.normalized()


@pytest.mark.parametrize("mid", HERMITIAN_IDS)
@pytest.mark.parametrize("q,ext_k", [(2, 2), (3, 2), (4, 4), (2, 6), (4, 8), (3, 6)])
def test_fast_path_matches_generic(mid, q, ext_k):
    C = model(mid, q)
    ext = make_field(C.ctx.p, ext_k)
    pts = point_arrays(C, ext)
    fast = set(zip(pts.X.tolist(), pts.Y.tolist(), pts.Z.tolist()))
    assert len(fast) == pts.X.size
    # the generic oracle uses (x:y:1), (1:y:0), (0:1:0), the same normalization
    assert fast == generic_points(C, ext)


def test_fast_path_matches_generic_at_the_cap():
    C = model("EQ11", 2)
    ext = make_field(2, 12)
    pts = point_arrays(C, ext)
    assert set(zip(pts.X.tolist(), pts.Y.tolist(), pts.Z.tolist())) == generic_points(C, ext)


def test_generic_cap():
    with pytest.raises(FieldError):
        generic_points(model("EQ11", 2), make_field(2, 14))


def test_enumeration_cap():
    with pytest.raises(FieldError):
        count_points(model("EQ11", 2), make_field(2, 12), cap=2**10)
    with pytest.raises(FieldError):
        enumerate_points(model("EQ11", 3), make_field(2, 2))


def test_jobs_do_not_change_points():
    C = model("EQ11", 4)
    E = make_field(2, 12)
    a = list(iter_point_chunks(C, E, jobs=1, chunk=256))
    b = list(iter_point_chunks(C, E, jobs=3, chunk=256))
    assert len(a) == len(b) == 17
    for ca, cb in zip(a, b):
        for name in "XYZ":
            assert np.array_equal(getattr(ca, name), getattr(cb, name))


def test_infinity_section():
    for q, n in ((3, 4), (5, 6), (4, 5)):
        C = model("M3", q)
        pts = infinity_section(C)
        assert len(pts) == n == q + 1
        assert all(on_curve(C, P) for P in pts)
    C = model("M3", 5)
    assert {P.coords for P in infinity_section(C)} == {(1, m, 0) for m in range(5)} | {(0, 1, 0)}
    with pytest.raises(ValueError):
        infinity_section(model("M1", 5))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_m4_transport(q):
    C4, C1 = model("M4", q), model("M1", q)
    E = ext6(q)
    A = m4_transport(q)
    assert substitute_map(C4.poly.lift(E), A) == C1.poly.lift(E).normalized()
    # A^-1 rho A^(q^2) is scalar: the twisted Frobenius becomes the plain one
    Aq = [[E.pow(c, q * q) for c in row] for row in A]
    R = matmul3(E, matmul3(E, inv3(E, A), [list(r) for r in C4.twist]), Aq)
    assert ProjMap.make(E, R).is_identity()
