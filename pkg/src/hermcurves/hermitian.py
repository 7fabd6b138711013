"""Plane models of the Hermitian curve and point enumeration over extensions."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .gf import Element, FieldCtx, FieldError, embedding, field_of_order, make_field, prime_power, solve_unit_condition
from .poly import TriPoly, inv3, matmul3, solve_binomial, solve_twisted, substitute_map

ENUM_CAP = 2**23
GENERIC_CAP = 2**12
CHUNK = 1 << 19

HERMITIAN_IDS = ("EQ11", "M1", "M2", "M3", "M4")


def _is_p_power(n: int, p: int) -> bool:
    while n > 1 and n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class ProjPoint:
    """A projective point with its first nonzero coordinate equal to 1."""

    ctx: FieldCtx
    coords: tuple[int, int, int]

    @classmethod
    def make(cls, ctx: FieldCtx, x, y, z) -> "ProjPoint":
        v = [c.v if isinstance(c, Element) else ctx.from_int(c) if not isinstance(c, int) else c for c in (x, y, z)]
        return cls(ctx, normalize(ctx, *v))

    @property
    def elements(self) -> tuple[Element, Element, Element]:
        return tuple(Element(self.ctx, c) for c in self.coords)

    def __repr__(self) -> str:
        return "({}:{}:{})".format(*(repr(e) for e in self.elements))


def normalize(ctx: FieldCtx, x: int, y: int, z: int) -> tuple[int, int, int]:
    for i, c in enumerate((x, y, z)):
        if c:
            inv = ctx.inv(c)
            return tuple(ctx.mul(v, inv) for v in (x, y, z))
    raise ValueError("(0:0:0) is not a projective point")


def vnormalize(ctx: FieldCtx, X, Y, Z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    X, Y, Z = (np.asarray(a, dtype=np.int64) for a in (X, Y, Z))
    piv = np.where(Z != 0, Z, np.where(X != 0, X, Y))
    if np.any(piv == 0):
        raise ValueError("(0:0:0) is not a projective point")
    inv = ctx.vinv(piv)
    return ctx.vmul(X, inv), ctx.vmul(Y, inv), ctx.vmul(Z, inv)


def point_keys(ctx: FieldCtx, X, Y, Z) -> np.ndarray:
    """Injective int64 keys for normalized points."""
    N = ctx.order
    X, Y, Z = (np.asarray(a, dtype=np.int64) for a in (X, Y, Z))
    return np.where(Z == 1, X * N + Y, np.where(X == 1, N * N + Y, N * N + N))


@dataclass
class PlaneModel:
    id: str
    q: int
    poly: TriPoly
    genus: int
    notes: str = ""
    omega: int | None = None
    # point permutation composed with the q^2-Frobenius giving the rational structure
    twist: tuple[tuple[int, ...], ...] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ctx(self) -> FieldCtx:
        return self.poly.ctx


def _q2(q: int) -> FieldCtx:
    p, t = prime_power(q)
    return make_field(p, 2 * t)


def model(mid: str, q: int) -> PlaneModel:
    """The Hermitian curve over F_{q^2} in one of its coordinate models."""
    p, t = prime_power(q)
    F = _q2(q)
    g = q * (q - 1) // 2
    m1 = F.neg(1)
    if mid == "EQ11":
        poly = TriPoly(F, {(0, q, 1): 1, (0, 1, q): 1, (q + 1, 0, 0): m1})
        return PlaneModel(mid, q, poly, g, "Y^qZ + YZ^q - X^(q+1)")
    if mid == "M1":
        poly = TriPoly(F, {(q + 1, 0, 0): 1, (0, q + 1, 0): 1, (0, 0, q + 1): 1})
        return PlaneModel(mid, q, poly, g, "X^(q+1) + Y^(q+1) + Z^(q+1)")
    if mid == "M2":
        w = solve_unit_condition(F, q, "q-1=-1").v
        poly = TriPoly.from_dict(F, {(0, q, 1): 1, (0, 1, q): m1, (q + 1, 0, 0): w})
        return PlaneModel(mid, q, poly, g, "Y^qZ - YZ^q + w X^(q+1), w^(q-1) = -1", omega=w)
    if mid == "M3":
        # w^(q-1) = -1: the printed w^(q+1) = -1 does not give a Hermitian curve
        w = solve_unit_condition(F, q, "q-1=-1").v
        poly = TriPoly.from_dict(F, {(1, q, 0): 1, (q, 1, 0): m1, (0, 0, q + 1): w})
        return PlaneModel(mid, q, poly, g, "XY^q - X^qY + w Z^(q+1), w^(q-1) = -1", omega=w)
    if mid == "M4":
        poly = TriPoly(F, {(1, q, 0): 1, (0, 1, q): 1, (q, 0, 1): 1})
        rho = ((0, 0, 1), (1, 0, 0), (0, 1, 0))
        return PlaneModel(mid, q, poly, g, "XY^q + YZ^q + ZX^q; rational structure twisted by (x:y:z) -> (z:x:y)", twist=rho)
    raise ValueError(f"unknown model {mid!r}")


def on_curve(C: PlaneModel, P: ProjPoint) -> bool:
    F = C.poly
    if P.ctx is not F.ctx:
        F = F.lift(P.ctx)
    return F.evaluate(*P.coords) == 0


def infinity_section(C: PlaneModel) -> list[ProjPoint]:
    """Points of M3 on the line Z = 0: (1:m:0) for m in F_q, and (0:1:0)."""
    if C.id != "M3":
        raise ValueError("infinity section is defined for model M3")
    F = C.ctx
    p, t = prime_power(C.q)
    sub = embedding(make_field(p, t), F)
    pts = [ProjPoint(F, (1, int(m), 0)) for m in sorted(sub.table.tolist())]
    pts.append(ProjPoint(F, (0, 1, 0)))
    return pts


# --- fiber solving --------------------------------------------------------


def _poly_in_y(F: TriPoly, ext: FieldCtx, xs: np.ndarray, zval: int) -> dict[int, np.ndarray]:
    """Coefficient vectors a_j(x) of F(x, y, zval) as a polynomial in y."""
    out: dict[int, np.ndarray] = {}
    for (i, j, k), c in F.terms.items():
        if zval == 0 and k:
            continue
        v = ext.vmul(ext.vpow(xs, i), c)
        out[j] = ext.vadd(out[j], v) if j in out else v
    return {j: v for j, v in out.items()}


def solve_fibers(ext: FieldCtx, a: dict[int, np.ndarray], n: int) -> tuple[np.ndarray, np.ndarray]:
    """All (index, y) with sum_j a_j[index] y^j = 0, for n parallel equations."""
    js = sorted(j for j, v in a.items() if np.any(v != 0))
    zero = np.zeros(n, dtype=np.int64)
    get = lambda j: a.get(j, zero)  # noqa: E731
    empty = (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    if not js:
        raise FieldError("curve contains a whole fiber line")
    nonzero_js = [j for j in js if j > 0]
    if not nonzero_js:
        return empty
    top = max(js)
    others = [j for j in js if j not in (0, top)]
    if top == 1 or (not others):
        # a_top y^top + a_0 = 0, with a linear special case
        at, a0 = get(top), get(0)
        if np.any((at == 0) & (a0 == 0)):
            raise FieldError("curve contains a whole fiber line")
        ok = np.nonzero(at != 0)[0]
        c = ext.vneg(ext.vmul(a0[ok], ext.vinv(at[ok])))
        idx, y = solve_binomial(ext, top, c) if top > 1 else (np.arange(ok.size), c)
        return ok[idx], y
    if others == [1] and _is_p_power(top, ext.p) and ext.k % prime_power(top)[1] == 0:
        aQ, a1, a0 = get(top), get(1), get(0)
        if np.any((aQ == 0) & (a1 == 0) & (a0 == 0)):
            raise FieldError("curve contains a whole fiber line")
        ok = np.nonzero(aQ != 0)[0]
        inv = ext.vinv(aQ[ok])
        idx, y = solve_twisted(ext, top, ext.vmul(a1[ok], inv), ext.vneg(ext.vmul(a0[ok], inv)))
        lin = np.nonzero((aQ == 0) & (a1 != 0))[0]
        ylin = ext.vneg(ext.vmul(a0[lin], ext.vinv(a1[lin])))
        return np.concatenate([ok[idx], lin]), np.concatenate([y, ylin])
    # generic fallback: evaluate every y
    if ext.order > GENERIC_CAP:
        raise FieldError(f"generic fiber scan over {ext!r} exceeds cap {GENERIC_CAP}")
    ys = ext.all_codes()
    acc = np.zeros((n, ys.size), dtype=np.int64)
    for j, v in a.items():
        acc = ext.vadd(acc, ext.vmul(v[:, None], ext.vpow(ys, j)[None, :]))
    ii, yy = np.nonzero(acc == 0)
    return ii.astype(np.int64), ys[yy]


@dataclass
class PointChunk:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    def __len__(self) -> int:
        return int(self.X.size)


def _affine_chunk(F: TriPoly, ext: FieldCtx, start: int, stop: int) -> PointChunk:
    xs = np.arange(start, stop, dtype=np.int64)
    idx, ys = solve_fibers(ext, _poly_in_y(F, ext, xs, 1), xs.size)
    order = np.lexsort((ys, idx))
    X = xs[idx][order]
    Y = ys[order]
    return PointChunk(X, Y, np.ones_like(X))


def _infinity_points(F: TriPoly, ext: FieldCtx) -> PointChunk:
    a = _poly_in_y(F, ext, np.array([1], dtype=np.int64), 0)
    if all(np.all(v == 0) for v in a.values()):
        raise FieldError("line Z = 0 is a component")
    idx, ys = solve_fibers(ext, a, 1) if any(j > 0 and np.any(v != 0) for j, v in a.items()) else (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    ys = np.sort(ys)
    X, Y = np.ones_like(ys), ys
    top = max(sum(e) for e in F.terms)
    if F.terms.get((0, top, 0), 0) == 0:
        X = np.concatenate([X, [0]])
        Y = np.concatenate([Y, [1]])
    return PointChunk(X, Y, np.zeros_like(X))


def iter_point_chunks(C: PlaneModel | TriPoly, ext: FieldCtx, cap: int = ENUM_CAP, jobs: int = 1, chunk: int = CHUNK) -> Iterator[PointChunk]:
    """Yield the points of C over ext in deterministic chunks (affine x-ranges, then Z = 0)."""
    F = C.poly if isinstance(C, PlaneModel) else C
    if ext.order > cap:
        raise FieldError(f"{ext!r} exceeds the enumeration cap {cap}")
    Fx = F.lift(ext)
    ranges = [(s, min(s + chunk, ext.order)) for s in range(0, ext.order, chunk)]
    if jobs > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            # map preserves input order, so output is independent of jobs
            yield from pool.map(lambda r: _affine_chunk(Fx, ext, *r), ranges)
    else:
        for r in ranges:
            yield _affine_chunk(Fx, ext, *r)
    yield _infinity_points(Fx, ext)


def point_arrays(C: PlaneModel | TriPoly, ext: FieldCtx, cap: int = ENUM_CAP, jobs: int = 1) -> PointChunk:
    parts = list(iter_point_chunks(C, ext, cap, jobs))
    return PointChunk(*(np.concatenate([getattr(p, a) for p in parts]) for a in "XYZ"))


def count_points(C: PlaneModel | TriPoly, ext: FieldCtx, cap: int = ENUM_CAP, jobs: int = 1) -> int:
    return sum(len(c) for c in iter_point_chunks(C, ext, cap, jobs))


def enumerate_points(C: PlaneModel, ext: FieldCtx | None = None, cap: int = ENUM_CAP, jobs: int = 1) -> list[ProjPoint]:
    """All points of C over ext (default F_{q^2}) as ProjPoint objects."""
    ext = ext or C.ctx
    if ext.p != C.ctx.p or ext.k % C.ctx.k:
        raise FieldError(f"{ext!r} does not extend {C.ctx!r}")
    pts = point_arrays(C, ext, cap, jobs)
    return [ProjPoint(ext, normalize(ext, int(x), int(y), int(z))) for x, y, z in zip(pts.X, pts.Y, pts.Z)]


def generic_points(C: PlaneModel, ext: FieldCtx) -> set[tuple[int, int, int]]:
    """Brute-force oracle: test every normalized point of the plane (cap 2^12)."""
    if ext.order > GENERIC_CAP:
        raise FieldError("generic enumeration cap exceeded")
    F = C.poly.lift(ext)
    N = ext.order
    xs = np.repeat(ext.all_codes(), N)
    ys = np.tile(ext.all_codes(), N)
    out = set()
    v = F.veval(xs, ys, np.ones_like(xs))
    out |= {(int(a), int(b), 1) for a, b in zip(xs[v == 0], ys[v == 0])}
    ys1 = ext.all_codes()
    v = F.veval(np.ones_like(ys1), ys1, np.zeros_like(ys1))
    out |= {(1, int(b), 0) for b in ys1[v == 0]}
    if F.evaluate(0, 1, 0) == 0:
        out.add((0, 1, 0))
    return out


# --- rational structure ------------------------------------------------------


def frobenius_points(C: PlaneModel, ext: FieldCtx, X, Y, Z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Image of normalized points under the F_{q^2}-Frobenius of C (twisted for M4)."""
    e = C.q * C.q
    FX, FY, FZ = ext.vpow(X, e), ext.vpow(Y, e), ext.vpow(Z, e)
    if C.twist is not None:
        cols = (FX, FY, FZ)
        FX, FY, FZ = (sum_rows(ext, row, cols) for row in C.twist)
        FX, FY, FZ = vnormalize(ext, FX, FY, FZ)
    return FX, FY, FZ


def sum_rows(ctx: FieldCtx, row: Sequence[int], cols) -> np.ndarray:
    acc = np.zeros_like(cols[0])
    for c, v in zip(row, cols):
        if c:
            acc = ctx.vadd(acc, ctx.vmul(v, c))
    return acc


def rational_point_count(C: PlaneModel, ext: FieldCtx | None = None) -> int:
    """#C over F_{q^2} for its rational structure; ext must contain the fixed points."""
    if C.twist is None:
        return count_points(C, C.ctx)
    ext = ext or make_field(C.ctx.p, 3 * C.ctx.k)
    pts = point_arrays(C, ext)
    FX, FY, FZ = frobenius_points(C, ext, pts.X, pts.Y, pts.Z)
    return int(np.sum((FX == pts.X) & (FY == pts.Y) & (FZ == pts.Z)))


# --- model equivalences -------------------------------------------------------


def _smallest_solution(F: FieldCtx, pred) -> int:
    xs = F.all_codes()
    sols = xs[pred(xs)]
    return int(sols[np.argmin(F.v_sort_key(sols))])


def equivalence_matrix(target: str, q: int, variant: str = "default") -> list[list[int]]:
    """A matrix M over F_{q^2} with EQ11 o M a scalar multiple of the target model.

    variant "order-p" for M2 is the substitution (w^-1 X, w^-1 Y, Z) from the
    order-p argument; it lands on M2 with parameter -w^-1 instead of w.
    """
    F = _q2(q)
    if target == "EQ11":
        return [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    if target == "M1":
        g = _smallest_solution(F, lambda x: F.vadd(x, F.vpow(x, q)) == F.neg(1))
        b = _smallest_solution(F, lambda x: F.vpow(x, q + 1) == F.neg(1))
        return [[1, 0, 0], [0, 1, b], [0, g, F.neg(F.mul(b, F.pow(g, q)))]]
    w = model("M2", q).omega
    if target == "M2":
        wi = F.inv(w)
        if variant == "order-p":
            return [[wi, 0, 0], [0, wi, 0], [0, 0, 1]]
        return [[1, 0, 0], [0, wi, 0], [0, 0, 1]]
    if target == "M3":
        # EQ11 o diag(1, w^-1, 1) ~ M2(w), and M2(w)(Z, Y, X) = M3(w)
        return [[0, 0, 1], [0, F.inv(w), 0], [1, 0, 0]]
    raise ValueError(f"no equivalence matrix to {target!r}")


def order_p_m2_parameter(q: int) -> int:
    F = _q2(q)
    return F.neg(F.inv(model("M2", q).omega))


def m2_with_parameter(q: int, w: int) -> TriPoly:
    F = _q2(q)
    return TriPoly(F, {(0, q, 1): 1, (0, 1, q): F.neg(1), (q + 1, 0, 0): w})


def transform_model(C: PlaneModel, M) -> TriPoly:
    return substitute_map(C.poly, M)


# --- transport of M4 to M1 -------------------------------------------------------


def _hermitian_matrix(F: TriPoly, q: int) -> list[list[int]]:
    """H with F = sum H[j][k] v_j v_k^q (F a Hermitian-type form of degree q+1)."""
    H = [[0] * 3 for _ in range(3)]
    for e, c in F.terms.items():
        j = next(i for i in range(3) if e[i] in (1, q + 1))
        k = j if e[j] == q + 1 else next(i for i in range(3) if e[i] == q)
        H[j][k] = c
    return H


def _sesq(F: FieldCtx, H, q: int, v, w) -> int:
    wq = [F.pow(x, q) for x in w]
    return F.sum(F.mul(F.mul(H[j][k], v[j]), wq[k]) for j in range(3) for k in range(3))


def hermitian_diagonalizer(poly: TriPoly, q: int) -> list[list[int]]:
    """B over F_{q^2} with poly o B a scalar multiple of X^(q+1) + Y^(q+1) + Z^(q+1)."""
    F = poly.ctx
    H = _hermitian_matrix(poly, q)
    # rescale so that H is Hermitian: H[k][j] = H[j][k]^q
    mus = [m for m in range(1, F.order)
           if all(F.mul(m, H[k][j]) == F.pow(F.mul(m, H[j][k]), q) for j in range(3) for k in range(3))]
    if not mus:
        raise FieldError("not a Hermitian form")
    mu = min(mus, key=F.sort_key)
    H = [[F.mul(mu, c) for c in row] for row in H]
    sub = lambda v, w, c: [F.sub(x, F.mul(c, y)) for x, y in zip(v, w)]  # noqa: E731
    rest = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    chosen: list[list[int]] = []
    while rest:
        cands = list(rest) + [[F.add(x, F.mul(t, y)) for x, y in zip(rest[0], r)] for r in rest[1:] for t in range(1, F.order)]
        v = next((c for c in cands if _sesq(F, H, q, c, c) != 0), None)
        if v is None:
            raise FieldError("degenerate Hermitian form")
        n = _sesq(F, H, q, v, v)
        chosen.append(v)
        proj = [sub(r, v, F.div(_sesq(F, H, q, r, v), n)) for r in rest]
        rest = []
        for r in proj:  # greedy basis of the orthogonal complement
            if _rank(F, rest + [r]) > len(rest):
                rest.append(r)
        rest = rest[: 3 - len(chosen)]
    cols = []
    for v in chosen:
        n = _sesq(F, H, q, v, v)
        s = next(s for s in range(1, F.order) if F.mul(F.pow(s, q + 1), n) == 1)
        cols.append([F.mul(s, x) for x in v])
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def _rank(F: FieldCtx, vs: list[list[int]]) -> int:
    A = [list(v) for v in vs]
    r = 0
    for c in range(3):
        pr = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        for i in range(r + 1, len(A)):
            if A[i][c]:
                f = F.div(A[i][c], A[r][c])
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        r += 1
    return r


def m4_transport(q: int) -> list[list[int]]:
    """A over F_{q^6} with M4 o A a scalar multiple of M1 and A^-1 F A the plain q^2-Frobenius.

    Rows of the Moore part are (u, u^(q^2), u^(q^4)) for u in 1, b, b^2, b outside
    F_{q^2}; this intertwines the twisted Frobenius of M4 with the standard one.
    """
    C = model("M4", q)
    p, t = prime_power(q)
    E = make_field(p, 6 * t)
    F = C.ctx
    emb = embedding(F, E)
    outside = np.ones(E.order, dtype=bool)
    outside[emb.table] = False
    cand = np.nonzero(outside)[0]
    b = int(cand[np.argmin(E.v_sort_key(cand))])
    e = q * q
    A0 = [[E.pow(u, 1), E.pow(u, e), E.pow(u, e * e)] for u in (1, b, E.mul(b, b))]
    A0i = inv3(E, A0)
    Cp = substitute_map(C.poly.lift(E), A0i).descend(F)
    B = hermitian_diagonalizer(Cp, q)
    Be = [[emb.code(c) for c in row] for row in B]
    return matmul3(E, A0i, Be)
