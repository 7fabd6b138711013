from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermcurves.gf import (
    Element,
    FieldError,
    embedding,
    frobenius,
    is_irreducible,
    lift,
    make_field,
    norm_to,
    prime_power,
    root_of_unity,
    solve_unit_condition,
    trace_to,
)


def _brute_irreducible(f: tuple[int, ...], p: int) -> bool:
    # oracle: no monic factor of degree 1..k/2, found by trial polynomial division
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            r = list(f)
            for i in range(k - d, -1, -1):
                c = r[i + d]
                if c:
                    for j in range(d + 1):
                        r[i + j] = (r[i + j] - c * g[j]) % p
            if not any(r[:d]):
                return False
    return True


def test_make_field_f9_modulus():
    F = make_field(3, 2)
    assert F.modulus == (1, 0, 1)
    assert F.order == 9


def test_make_field_prime():
    F = make_field(2, 1)
    assert F.order == 2 and F.k == 1
    assert F.modulus == (0, 1)


def test_make_field_cardinality():
    assert make_field(5, 6).cardinality == 15625


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (2, 6), (7, 2)])
def test_modulus_is_smallest_irreducible(p, k):
    F = make_field(p, k)
    # low-degree-first lexicographic order over monic polynomials of degree k
    cands = sorted((tuple(t) + (1,) for t in itertools.product(range(p), repeat=k)))
    first = next(c for c in cands if _brute_irreducible(c, p))
    assert F.modulus == first
    assert is_irreducible(F.modulus, p)


def test_make_field_errors():
    with pytest.raises(FieldError):
        make_field(4, 1)
    with pytest.raises(FieldError):
        make_field(2, 40)


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(7) == (7, 1)
    with pytest.raises(ValueError):
        prime_power(6)


def test_frobenius_examples():
    F = make_field(3, 2)
    t = F.gen
    assert frobenius(t, 1) == -t
    assert frobenius(F.one, 5) == F.one


@given(st.integers(0, 5**4 - 1))
def test_frobenius_composition_law(v):
    F = make_field(5, 4)
    x = Element(F, v)
    assert frobenius(frobenius(x, 1), 1) == frobenius(x, 2)
    assert frobenius(x, 4) == x


def test_trace_examples():
    F, S = make_field(3, 2), make_field(3, 1)
    assert trace_to(F.gen, S) == S.zero
    F16, F4 = make_field(2, 4), make_field(2, 2)
    assert trace_to(F16.one, F4) == F4.zero  # 2 * 1 = 0
    F27 = make_field(3, 3)
    assert trace_to(F27.one, S) == S.zero  # 3 * 1 = 0
    F25, F5 = make_field(5, 2), make_field(5, 1)
    assert trace_to(F25.one, F5) == F5.element(2)


def test_trace_additive_and_norm_multiplicative():
    F, S = make_field(2, 6), make_field(2, 2)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, F.order, (100, 2)).tolist():
        x, y = Element(F, a), Element(F, b)
        assert trace_to(x + y, S) == trace_to(x, S) + trace_to(y, S)
        assert norm_to(x * y, S) == norm_to(x, S) * norm_to(y, S)


def test_norm_examples():
    F, S = make_field(3, 2), make_field(3, 1)
    assert norm_to(F.gen, S) == S.one
    assert norm_to(F.one, S) == S.one


def test_root_of_unity_examples():
    F4 = make_field(2, 2)
    assert root_of_unity(F4, 3) == F4.gen
    F9 = make_field(3, 2)
    w = root_of_unity(F9, 8)
    assert w == F9.gen + 1
    assert w**4 == -1
    with pytest.raises(FieldError):
        root_of_unity(F9, 5)


def test_root_of_unity_exact_order():
    F = make_field(5, 6)
    for d in (3, 7, 21, 63, 124):
        assert root_of_unity(F, d).order() == d


def test_solve_unit_condition():
    F9 = make_field(3, 2)
    assert solve_unit_condition(F9, 3, "q+1=-1") ** 4 == -1
    assert solve_unit_condition(F9, 3, "q-1=-1") == F9.gen  # t^2 = -1
    F25 = make_field(5, 2)
    w = solve_unit_condition(F25, 5, "q+1=-1")
    assert w**6 == -1 and w.order() == 12
    # 1 is a solution, but t sorts first under the low-degree-first order
    w = solve_unit_condition(F25, 5, "q+1=1")
    assert w**6 == 1 and w == F25.gen
    w = solve_unit_condition(F25, 5, "q-1=-1")
    assert w**4 == -1 and w.order() == 8
    with pytest.raises(FieldError):
        solve_unit_condition(make_field(5, 3), 5, "q+1=1")


def test_embedding_is_homomorphism():
    S, F = make_field(2, 2), make_field(2, 6)
    emb = embedding(S, F)
    for a in range(4):
        for b in range(4):
            assert emb(Element(S, a)) * emb(Element(S, b)) == emb(Element(S, a) * Element(S, b))
    assert emb.preimage(lift(S.gen, F)) == S.gen
    with pytest.raises(FieldError):
        embedding(make_field(2, 4), F)


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldError):
        make_field(3, 2).gen + make_field(3, 4).gen
