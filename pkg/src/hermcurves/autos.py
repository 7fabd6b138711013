"""Projective automorphisms of the Hermitian models and the subgroups built from them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .gf import Element, FieldCtx, FieldError, embedding, is_prime, make_field, prime_power, root_of_unity
from .hermitian import PlaneModel, ProjPoint, model, normalize, solve_fibers, vnormalize
from .poly import TriPoly, UniPoly, det3, roots_codes, substitute_map

Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]


class NotCoveredError(ValueError):
    """The requested configuration lies outside the cases treated in the source."""


def _normalize_matrix(ctx: FieldCtx, rows) -> Matrix:
    flat = [c for r in rows for c in r]
    lead = next((c for c in flat if c), 0)
    if not lead:
        raise ValueError("zero matrix")
    inv = ctx.inv(lead)
    return tuple(tuple(ctx.mul(c, inv) for c in r) for r in rows)  # type: ignore[return-value]


def _matmul(ctx: FieldCtx, A, B):
    mul, add = ctx.mul, ctx.add
    return tuple(
        tuple(add(add(mul(A[i][0], B[0][j]), mul(A[i][1], B[1][j])), mul(A[i][2], B[2][j])) for j in range(3))
        for i in range(3)
    )


IDENTITY_ROWS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass(frozen=True)
class ProjMap:
    """A 3 x 3 invertible matrix modulo scalars, acting on column vectors."""

    ctx: FieldCtx
    matrix: Matrix

    @classmethod
    def make(cls, ctx: FieldCtx, rows) -> "ProjMap":
        rows = tuple(tuple(c.v if isinstance(c, Element) else int(c) for c in r) for r in rows)
        if det3(ctx, rows) == 0:
            raise ValueError("singular matrix")
        return cls(ctx, _normalize_matrix(ctx, rows))

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "ProjMap":
        return cls(ctx, IDENTITY_ROWS)

    @classmethod
    def diag(cls, ctx: FieldCtx, a: int, b: int, c: int) -> "ProjMap":
        return cls.make(ctx, ((a, 0, 0), (0, b, 0), (0, 0, c)))

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        """Composition: (self @ other)(P) = self(other(P))."""
        return ProjMap(self.ctx, _normalize_matrix(self.ctx, _matmul(self.ctx, self.matrix, other.matrix)))

    def is_identity(self) -> bool:
        return self.matrix == IDENTITY_ROWS

    def inverse(self) -> "ProjMap":
        ctx, m = self.ctx, self.matrix
        mul, sub = ctx.mul, ctx.sub

        def cof(i, j):
            r = [x for x in range(3) if x != i]
            c = [x for x in range(3) if x != j]
            v = sub(mul(m[r[0]][c[0]], m[r[1]][c[1]]), mul(m[r[0]][c[1]], m[r[1]][c[0]]))
            return v if (i + j) % 2 == 0 else ctx.neg(v)

        adj = tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))
        return ProjMap(ctx, _normalize_matrix(ctx, adj))

    def __pow__(self, n: int) -> "ProjMap":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ProjMap.identity(self.ctx), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def order(self, limit: int = 10**6) -> int:
        g, n = self, 1
        while not g.is_identity():
            g = g @ self
            n += 1
            if n > limit:
                raise ValueError("order exceeds limit")
        return n

    def lift(self, sup: FieldCtx) -> "ProjMap":
        if sup is self.ctx:
            return self
        emb = embedding(self.ctx, sup)
        return ProjMap(sup, tuple(tuple(emb.code(c) for c in r) for r in self.matrix))  # type: ignore[arg-type]

    def frobenius(self, e: int) -> "ProjMap":
        """Entrywise x -> x^e (e a power of p)."""
        ctx = self.ctx
        return ProjMap(ctx, _normalize_matrix(ctx, tuple(tuple(ctx.pow(c, e) for c in r) for r in self.matrix)))

    def apply(self, P: ProjPoint) -> ProjPoint:
        M = self if P.ctx is self.ctx else self.lift(P.ctx)
        ctx = P.ctx
        v = [ctx.sum(ctx.mul(M.matrix[i][j], P.coords[j]) for j in range(3)) for i in range(3)]
        return ProjPoint(ctx, normalize(ctx, *v))

    def vapply(self, ext: FieldCtx, X, Y, Z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        M = self.lift(ext) if ext is not self.ctx else self
        cols = (np.asarray(X, dtype=np.int64), np.asarray(Y, dtype=np.int64), np.asarray(Z, dtype=np.int64))
        out = []
        for row in M.matrix:
            acc = np.zeros_like(cols[0])
            for c, v in zip(row, cols):
                if c:
                    acc = ext.vadd(acc, v if c == 1 else ext.vmul(v, c))
            out.append(acc)
        return vnormalize(ext, *out)

    def is_diagonal(self) -> bool:
        return all(self.matrix[i][j] == 0 for i in range(3) for j in range(3) if i != j)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(repr(Element(self.ctx, c)) for c in r) for r in self.matrix)
        return f"ProjMap[{rows}]"


# --- subgroups -------------------------------------------------------------


@dataclass
class Subgroup:
    elements: list[ProjMap]
    generators: list[ProjMap]
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def ctx(self) -> FieldCtx:
        return self.generators[0].ctx if self.generators else self.elements[0].ctx

    def non_identity(self) -> list[ProjMap]:
        return [g for g in self.elements if not g.is_identity()]

    def is_closed(self) -> bool:
        s = set(self.elements)
        return all((a @ b) in s for a in self.elements for b in self.elements) and all(a.inverse() in s for a in self.elements)


class ClosureCapExceeded(RuntimeError):
    pass


def closure(gens: Sequence[ProjMap], cap: int = 10080, label: str = "") -> Subgroup:
    """Group generated by gens, elements in breadth-first order from the identity."""
    if not gens:
        raise ValueError("need at least one generator")
    ctx = gens[0].ctx
    if any(g.ctx is not ctx for g in gens):
        raise FieldError("generators over different fields")
    ident = ProjMap.identity(ctx)
    seen = {ident}
    out = [ident]
    i = 0
    while i < len(out):
        g = out[i]
        i += 1
        for s in gens:
            h = g @ s
            if h not in seen:
                seen.add(h)
                out.append(h)
                if len(out) > cap:
                    raise ClosureCapExceeded(f"closure exceeds {cap} elements")
    return Subgroup(out, list(gens), label)


# --- prime-order generators ----------------------------------------------------

CASES = ("I", "II1", "II2", "III", "IV1", "IV2", "V")
CASE_MODEL = {"I": "EQ11", "II1": "M2", "II2": "EQ11", "III": "M3", "IV1": "M1", "IV2": "M1", "V": "M4"}


def case_admissible(case: str, q: int, d: int) -> bool:
    p, _ = prime_power(q)
    if not is_prime(d):
        return False
    if case == "I":
        return d == 2 and p != 2
    if case == "II1":
        return d == p
    if case == "II2":
        return d == p and p >= 3
    if case == "III":
        return d >= 3 and q % d == 1
    if case in ("IV1", "IV2"):
        return d >= 3 and (q + 1) % d == 0
    if case == "V":
        return d >= 3 and (q * q - q + 1) % d == 0
    raise ValueError(f"unknown case {case!r}")


def check_case(case: str, q: int, d: int) -> None:
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    prime_power(q)
    if not case_admissible(case, q, d):
        raise ValueError(f"(case {case}, q={q}, d={d}) violates the divisibility condition")


def ext6(q: int) -> FieldCtx:
    p, t = prime_power(q)
    return make_field(p, 6 * t)


def generator_T(case: str, q: int, d: int) -> tuple[ProjMap, PlaneModel]:
    """The generator T_d of the prime-order subgroup and the model it acts on."""
    check_case(case, q, d)
    C = model(CASE_MODEL[case], q)
    F = C.ctx
    if case == "I":
        return ProjMap.diag(F, F.neg(1), 1, 1), C
    if case == "II1":
        return ProjMap.make(F, ((1, 0, 0), (0, 1, 1), (0, 0, 1))), C
    if case == "II2":
        half = F.inv(F.from_int(2))
        return ProjMap.make(F, ((1, 0, 1), (1, 1, half), (0, 0, 1))), C
    if case == "V":
        E = ext6(q)
        a = root_of_unity(E, d).v
        return ProjMap.diag(E, a, E.pow(a, q), 1), C
    a = root_of_unity(F, d).v
    if case == "IV1":
        return ProjMap.diag(F, a, 1, 1), C
    return ProjMap.diag(F, a, F.inv(a), 1), C


def preserves(C: PlaneModel, M: ProjMap) -> bool:
    """True iff C.poly o M is a scalar multiple of C.poly."""
    ctx = M.ctx
    if ctx.p != C.ctx.p or ctx.k % C.ctx.k:
        raise FieldError("map and model over incompatible fields")
    F = C.poly.lift(ctx)
    return substitute_map(F, M.matrix) == F.normalized()


def cyclic_group(T: ProjMap, label: str = "") -> Subgroup:
    return closure([T], label=label)


# --- SL(2, q) -----------------------------------------------------------------

SL2 = tuple[int, int, int, int]


def _fq(q: int) -> FieldCtx:
    p, t = prime_power(q)
    return make_field(p, t)


def sl2_mul(K: FieldCtx, A: SL2, B: SL2) -> SL2:
    m, a = K.mul, K.add
    return (
        a(m(A[0], B[0]), m(A[1], B[2])),
        a(m(A[0], B[1]), m(A[1], B[3])),
        a(m(A[2], B[0]), m(A[3], B[2])),
        a(m(A[2], B[1]), m(A[3], B[3])),
    )


def sl2_order(K: FieldCtx, A: SL2) -> int:
    g, n = A, 1
    while g != (1, 0, 0, 1):
        g = sl2_mul(K, g, A)
        n += 1
    return n


def psl2_order(K: FieldCtx, A: SL2) -> int:
    minus = (K.neg(1), 0, 0, K.neg(1))
    g, n = A, 1
    while g != (1, 0, 0, 1) and g != minus:
        g = sl2_mul(K, g, A)
        n += 1
    return n


@lru_cache(maxsize=None)
def sl2_elements(q: int) -> tuple[SL2, ...]:
    """All of SL(2, F_q) as (a, b, c, d) code tuples in a fixed order."""
    K = _fq(q)
    out = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                if a:
                    d = K.div(K.add(1, K.mul(b, c)), a)
                    out.append((a, b, c, d))
                elif K.mul(b, c) == K.neg(1):
                    out.extend((a, b, c, d) for d in range(q))
    return tuple(out)


def sl2_embed(a, b, c, d, q: int) -> ProjMap:
    """(X, Y, Z) -> (aX + bY, cX + dY, Z) for a, b, c, d in F_q with ad - bc = 1."""
    K = _fq(q)
    F = make_field(K.p, 2 * K.k)
    vals = []
    for v in (a, b, c, d):
        if isinstance(v, Element):
            if v.ctx is K:
                vals.append(v.v)
                continue
            if v.ctx is F:
                r = embedding(K, F).preimage_code(v.v)
                if r is None:
                    raise ValueError("entry outside F_q")
                vals.append(r)
                continue
            raise FieldError("entry from an unrelated field")
        vals.append(K.from_int(v) if not isinstance(v, int) or v < 0 else v)
    a, b, c, d = vals
    if K.sub(K.mul(a, d), K.mul(b, c)) != 1:
        raise ValueError("determinant is not 1")
    emb = embedding(K, F)
    e = emb.code
    return ProjMap.make(F, ((e(a), e(b), 0), (e(c), e(d), 0), (0, 0, 1)))


@dataclass(frozen=True)
class SL2Kind:
    family: str  # C, D, Sym4, Alt4, Alt5
    d: int | None = None
    torus: str | None = None  # split | nonsplit
    lift: str = "auto"  # odd | full | auto

    @property
    def label(self) -> str:
        if self.family in ("C", "D"):
            extra = f",{self.lift}" if self.family == "C" and self.lift != "auto" else ""
            return f"{self.family}({self.d},{self.torus}{extra})"
        return self.family


def parse_kind(kind: str | SL2Kind) -> SL2Kind:
    if isinstance(kind, SL2Kind):
        return kind
    s = kind.replace(" ", "")
    if s in ("Sym4", "Alt4", "Alt5"):
        return SL2Kind(s)
    m = re.fullmatch(r"([CD])\((\d+),(split|nonsplit)(?:,(odd|full))?\)", s)
    if not m:
        raise ValueError(f"cannot parse kind {kind!r}")
    return SL2Kind(m.group(1), int(m.group(2)), m.group(3), m.group(4) or "auto")


def sl2_kind_admissible(q: int, kind: str | SL2Kind) -> bool:
    try:
        _resolve_kind(q, parse_kind(kind))
        return True
    except ValueError:
        return False


def _resolve_kind(q: int, k: SL2Kind) -> SL2Kind:
    p, _ = prime_power(q)
    if k.family in ("C", "D"):
        d = k.d or 0
        if d < 2:
            raise ValueError("d must be at least 2")
        base = q + 1 if k.torus == "nonsplit" else q - 1
        if p == 2:
            if k.family == "D":
                raise ValueError("dihedral kinds need p >= 3")
            if base % d:
                raise ValueError(f"d must divide {base}")
            return SL2Kind("C", d, k.torus, "odd")
        if (base // 2) % d:
            raise ValueError(f"d must divide {base // 2}")
        if k.family == "D":
            return SL2Kind("D", d, k.torus, "full")
        lift = k.lift
        if lift == "auto":
            lift = "odd" if d % 2 else "full"
        if lift == "odd" and d % 2 == 0:
            raise ValueError("an even-order cyclic image has no isomorphic lift")
        return SL2Kind("C", d, k.torus, lift)
    if k.family == "Sym4":
        if not (q * q % 16 == 1 and p >= 5):
            raise ValueError("Sym4 needs q^2 = 1 mod 16 and p >= 5")
    elif k.family == "Alt4":
        if p < 5:
            raise ValueError("Alt4 needs p >= 5")
    elif k.family == "Alt5":
        if not (q * q % 5 == 1 and p >= 7):
            raise ValueError("Alt5 needs q^2 = 1 mod 5 and p >= 7")
    else:
        raise ValueError(f"unknown family {k.family!r}")
    return k


def _sl2_closure(K: FieldCtx, gens: Sequence[SL2], cap: int) -> list[SL2] | None:
    ident = (1, 0, 0, 1)
    seen = {ident}
    out = [ident]
    i = 0
    while i < len(out):
        g = out[i]
        i += 1
        for s in gens:
            h = sl2_mul(K, g, s)
            if h not in seen:
                seen.add(h)
                out.append(h)
                if len(out) > cap:
                    return None
    return out


def _coords_over_fq(F: FieldCtx, K: FieldCtx, q: int, x: int, theta: int) -> tuple[int, int]:
    """(a, b) in F_q with x = a + b*theta."""
    emb = embedding(K, F)
    den = F.sub(theta, F.pow(theta, q))
    b = F.div(F.sub(x, F.pow(x, q)), den)
    a = F.sub(x, F.mul(b, theta))
    ra, rb = emb.preimage_code(a), emb.preimage_code(b)
    if ra is None or rb is None:  # pragma: no cover
        raise FieldError("coordinate outside F_q")
    return ra, rb


def _torus_generator(q: int, k: SL2Kind) -> SL2:
    K = _fq(q)
    p = K.p
    order = k.d if (p == 2 or k.lift == "odd") else 2 * k.d
    if k.torus == "split":
        u = root_of_unity(K, order).v
        return (u, 0, 0, K.inv(u))
    F = make_field(p, 2 * K.k)
    z = root_of_unity(F, order).v
    sub = set(embedding(K, F).table.tolist())
    theta = min((v for v in range(F.order) if v not in sub), key=F.sort_key)
    a0, c0 = _coords_over_fq(F, K, q, z, theta)
    a1, c1 = _coords_over_fq(F, K, q, F.mul(z, theta), theta)
    return (a0, a1, c0, c1)


def _psl_stats(K: FieldCtx, els: Sequence[SL2]) -> dict[int, int]:
    seen = set()
    stats: dict[int, int] = {}
    for g in els:
        key = min(g, tuple(K.neg(c) for c in g))
        if key in seen:
            continue
        seen.add(key)
        o = psl2_order(K, g)
        stats[o] = stats.get(o, 0) + 1
    return dict(sorted(stats.items()))


EXCEPTIONAL = {
    # (order of x, order of y, order of xy, |G|, PSL element-order statistics)
    "Sym4": (8, 6, 4, 48, {1: 1, 2: 9, 3: 8, 4: 6}),
    "Alt4": (6, 6, 4, 24, {1: 1, 2: 3, 3: 8}),
    "Alt5": (10, 6, 4, 120, {1: 1, 2: 15, 3: 20, 5: 24}),
}


def _to_subgroup(q: int, els: Sequence[SL2], gens: Sequence[SL2], label: str, meta: dict) -> Subgroup:
    maps = [sl2_embed(*g, q) for g in els]
    return Subgroup(maps, [sl2_embed(*g, q) for g in gens], label, meta)


def find_tame_sl2_subgroup(q: int, kind: str | SL2Kind) -> Subgroup:
    """A subgroup of the embedded SL(2, q) whose image in PSL(2, q) has the requested type."""
    k = _resolve_kind(q, parse_kind(kind))
    K = _fq(q)
    meta = {"kind": k.label, "family": k.family, "d": k.d, "torus": k.torus, "lift": k.lift}
    if k.family == "C":
        x = _torus_generator(q, k)
        els = _sl2_closure(K, [x], 4 * q)
        assert els is not None
        return _to_subgroup(q, els, [x], k.label, meta)
    if k.family == "D":
        x = _torus_generator(q, k)
        xinv = next(g for g in _sl2_closure(K, [x], 4 * q) or [] if sl2_mul(K, g, x) == (1, 0, 0, 1))
        for w in sl2_elements(q):
            if sl2_mul(K, sl2_mul(K, w, x), w) == sl2_mul(K, xinv, sl2_mul(K, w, w)):
                # w x w^-1 = x^-1
                els = _sl2_closure(K, [x, w], 4 * k.d)
                if els is not None and len(els) == 4 * k.d:
                    return _to_subgroup(q, els, [x, w], k.label, meta)
        raise RuntimeError("no inverting involution found")  # pragma: no cover
    ox, oy, oxy, target, stats = EXCEPTIONAL[k.family]
    by_order: dict[int, list[SL2]] = {}
    for g in sl2_elements(q):
        by_order.setdefault(sl2_order(K, g), []).append(g)
    for x in by_order.get(ox, [])[:1]:
        for y in by_order.get(oy, []):
            if sl2_order(K, sl2_mul(K, x, y)) != oxy:
                continue
            els = _sl2_closure(K, [x, y], target)
            if els is not None and len(els) == target and _psl_stats(K, els) == stats:
                return _to_subgroup(q, els, [x, y], k.label, meta)
    raise RuntimeError(f"search for {k.family} in SL(2,{q}) exhausted")


def sl2_subgroup_matrices(G: Subgroup, q: int) -> list[SL2]:
    K = _fq(q)
    F = G.ctx
    emb = embedding(K, F)
    return [tuple(emb.preimage_code(g.matrix[i][j]) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))) for g in G.elements]  # type: ignore[misc]


def psl_image_order(G: Subgroup) -> int:
    """Order of the image of G acting on the line Z = 0 (kernel is +-I)."""
    ctx = G.ctx
    minus = ProjMap.diag(ctx, ctx.neg(1), ctx.neg(1), 1)
    return G.order // 2 if (ctx.p != 2 and minus in set(G.elements)) else G.order


# --- Singer normalizer ---------------------------------------------------------


def singer_admissible(q: int, n: int, i: int | None) -> bool:
    try:
        _check_singer(q, n, i)
        return True
    except ValueError:
        return False


def _check_singer(q: int, n: int, i: int | None) -> str:
    m = q * q - q + 1
    if n < 1 or m % n:
        raise ValueError(f"n = {n} must divide q^2 - q + 1 = {m}")
    if i is None:
        return "I"
    if q % 3 == 0:
        raise NotCoveredError("normalizer subgroups for q = 0 mod 3: not covered")
    if i not in (0, 1, 2):
        raise ValueError("i must be 0, 1 or 2")
    if q % 3 == 1:
        if i != 0:
            raise ValueError("for q = 1 mod 3 only h_0 preserves the model")
        return "II1"
    if n % 3 == 0:
        return "II1"
    return "II2"


def singer_generators(q: int, n: int, i: int | None = None) -> Subgroup:
    """C_n = <h^((q^2-q+1)/n)>, or its extension by h_i, acting on M4 over F_{q^6}."""
    branch = _check_singer(q, n, i)
    E = ext6(q)
    m = q * q - q + 1
    a = root_of_unity(E, m).v
    h = ProjMap.diag(E, a, E.pow(a, q), 1)
    g = h ** (m // n)
    if i is None:
        return closure([g], cap=n, label=f"C{n}") if n > 1 else Subgroup([ProjMap.identity(E)], [g], f"C{n}")
    eps = root_of_unity(E, 3).v
    hi = ProjMap.make(E, ((0, E.pow(eps, i), 0), (0, 0, E.pow(eps, 2 * i)), (1, 0, 0)))
    G = closure([g, hi], cap=3 * n, label=f"Singer-normalizer n={n} i={i}")
    G.meta.update({"branch": branch, "i": i, "n": n})
    return G


def singer_h(q: int) -> ProjMap:
    E = ext6(q)
    a = root_of_unity(E, q * q - q + 1).v
    return ProjMap.diag(E, a, E.pow(a, q), 1)


def singer_hi(q: int, i: int) -> ProjMap:
    E = ext6(q)
    eps = root_of_unity(E, 3).v
    return ProjMap.make(E, ((0, E.pow(eps, i), 0), (0, 0, E.pow(eps, 2 * i)), (1, 0, 0)))


# --- fixed points ---------------------------------------------------------------------


def _nullspace(ctx: FieldCtx, rows: list[list[int]]) -> list[list[int]]:
    A = [list(r) for r in rows]
    n = len(A[0])
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = ctx.inv(A[r][c])
        A[r] = [ctx.mul(v, inv) for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [ctx.sub(v, ctx.mul(f, w)) for v, w in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(piv_cols):
            v[c] = ctx.neg(A[i][f])
        basis.append(v)
    return basis


def char_poly(M: ProjMap) -> UniPoly:
    """det(lambda I - M), coefficients low degree first."""
    ctx, m = M.ctx, M.matrix
    tr = ctx.sum(m[i][i] for i in range(3))
    minors = ctx.sum(
        ctx.sub(ctx.mul(m[i][i], m[j][j]), ctx.mul(m[i][j], m[j][i])) for i, j in ((0, 1), (0, 2), (1, 2))
    )
    det = det3(ctx, m)
    return UniPoly(ctx, (ctx.neg(det), minors, ctx.neg(tr), 1))


_ROOT_CACHE: dict[tuple, list[int]] = {}


def _cubic_roots(f: UniPoly, ext: FieldCtx) -> list[int]:
    """Distinct roots of f in ext (codes of ext); raise if f does not split there."""
    key = (id(f.ctx), f.coeffs, id(ext))
    if key in _ROOT_CACHE:
        return _ROOT_CACHE[key]
    emb = embedding(f.ctx, ext)
    fe = UniPoly(ext, tuple(emb.code(c) for c in f.coeffs))
    roots = roots_codes(fe)
    if _multiplicity_total(fe, roots) < fe.degree:
        raise FieldError(f"characteristic polynomial does not split over {ext!r}")
    _ROOT_CACHE[key] = roots
    return roots


def _multiplicity_total(f: UniPoly, roots: Iterable[int]) -> int:
    ctx = f.ctx
    total = 0
    for r in roots:
        g = list(f.coeffs)
        while len(g) > 1:
            # synthetic division by (x - r)
            out = [0] * (len(g) - 1)
            acc = 0
            for i in range(len(g) - 1, 0, -1):
                acc = ctx.add(ctx.mul(acc, r), g[i])
                out[i - 1] = acc
            rem = ctx.add(ctx.mul(acc, r), g[0])
            if rem != 0:
                break
            total += 1
            g = out
    return total


def eigenvalues(M: ProjMap, ext: FieldCtx) -> list[int]:
    m = M.lift(ext).matrix
    lower = all(m[i][j] == 0 for i in range(3) for j in range(3) if j > i)
    upper = all(m[i][j] == 0 for i in range(3) for j in range(3) if j < i)
    if lower or upper:
        return sorted({m[i][i] for i in range(3)})
    return sorted(set(_cubic_roots(char_poly(M), ext)))


def _line_points(F: TriPoly, ext: FieldCtx, v1: list[int], v2: list[int]) -> list[tuple[int, int, int]]:
    """Points of F = 0 on the line spanned by v1, v2."""
    # complete to a basis and pull F back, then read off F(v1 + s v2)
    for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
        cols = [v1, v2, e]
        M = [[cols[j][i] for j in range(3)] for i in range(3)]
        if det3(ext, M) != 0:
            break
    G = substitute_map(F, M, normalize=False)
    coeffs: dict[int, np.ndarray] = {}
    for (a, b, c), val in G.terms.items():
        if c == 0:
            coeffs[b] = np.array([val], dtype=np.int64)
    pts = []
    if any(np.any(v != 0) for v in coeffs.values()):
        if any(j > 0 and np.any(v != 0) for j, v in coeffs.items()):
            try:
                _, ss = solve_fibers(ext, coeffs, 1)
                svals = [int(s) for s in ss]
            except FieldError:
                f = UniPoly.from_terms(ext, {j: int(v[0]) for j, v in coeffs.items()})
                svals = roots_codes(f)
            for s in svals:
                pts.append(tuple(ext.add(a, ext.mul(s, b)) for a, b in zip(v1, v2)))
    else:
        raise FieldError("fixed line is a component of the curve")
    if G.evaluate(0, 1, 0) == 0:
        pts.append(tuple(v2))
    return [normalize(ext, *p) for p in pts]


def plane_fixed_points(M: ProjMap, ext: FieldCtx) -> tuple[set[ProjPoint], int]:
    """Isolated fixed points of M in the plane over ext, and the number of pointwise-fixed lines."""
    if M.is_identity():
        raise ValueError("every point is fixed by the identity")
    Me = M.lift(ext)
    pts: set[ProjPoint] = set()
    lines = 0
    for lam in eigenvalues(M, ext):
        rows = [[ext.sub(Me.matrix[i][j], lam if i == j else 0) for j in range(3)] for i in range(3)]
        basis = _nullspace(ext, rows)
        if len(basis) == 1:
            pts.add(ProjPoint(ext, normalize(ext, *basis[0])))
        else:
            lines += 1
    return pts, lines


def fixed_points_on(C: PlaneModel, M: ProjMap, ext: FieldCtx | None = None) -> set[ProjPoint]:
    """All points of C over ext fixed by M, via eigenspaces."""
    ext = ext or ext6(C.q)
    if ext.p != M.ctx.p or ext.k % M.ctx.k or ext.k % C.ctx.k:
        raise FieldError(f"{ext!r} does not contain the fields of the map and the model")
    if M.is_identity():
        raise ValueError("every point is fixed by the identity")
    Me = M.lift(ext)
    F = C.poly.lift(ext)
    out: set[ProjPoint] = set()
    for lam in eigenvalues(M, ext):
        rows = [[ext.sub(Me.matrix[i][j], lam if i == j else 0) for j in range(3)] for i in range(3)]
        basis = _nullspace(ext, rows)
        if len(basis) == 1:
            v = normalize(ext, *basis[0])
            if F.evaluate(*v) == 0:
                out.add(ProjPoint(ext, v))
        elif len(basis) == 2:
            for v in _line_points(F, ext, basis[0], basis[1]):
                out.add(ProjPoint(ext, v))
        elif len(basis) == 3:  # pragma: no cover
            raise ValueError("scalar matrix")
    return out
