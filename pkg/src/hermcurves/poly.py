"""Polynomials over the fields of :mod:`hermcurves.gf`.

Coefficients are stored as field codes (ints), not Element objects, so the
hot loops stay in plain integers and numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf import Element, FieldCtx, FieldError, embedding, make_field, prime_power, root_of_unity

SCAN_CAP = 2**23

Exp = tuple[int, int, int]


def _code(ctx: FieldCtx, c) -> int:
    if isinstance(c, Element):
        if c.ctx is not ctx:
            return embedding(c.ctx, ctx).code(c.v)
        return c.v
    c = int(c)
    if not 0 <= c < ctx.order:
        raise ValueError(f"{c} is not a code of {ctx!r}")
    return c


# --- univariate ------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients low degree first."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_elements(cls, ctx: FieldCtx, coeffs: Iterable) -> "UniPoly":
        return cls(ctx, tuple(_code(ctx, c) for c in coeffs))

    @classmethod
    def from_terms(cls, ctx: FieldCtx, terms: Mapping[int, int]) -> "UniPoly":
        if not terms:
            return cls(ctx, ())
        cs = [0] * (max(terms) + 1)
        for e, c in terms.items():
            cs[e] = ctx.add(cs[e], c)
        return cls(ctx, tuple(cs))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> dict[int, int]:
        return {e: c for e, c in enumerate(self.coeffs) if c}

    def __call__(self, x: int) -> int:
        ctx = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, x), c)
        return acc

    def veval(self, xs: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        xs = np.asarray(xs, dtype=np.int64)
        terms = self.terms()
        if len(terms) <= 4 or self.degree > 4 * len(terms):
            acc = np.zeros_like(xs)
            for e, c in terms.items():
                acc = ctx.vadd(acc, ctx.vmul(ctx.vpow(xs, e), c))
            return acc
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = ctx.vadd(ctx.vmul(acc, xs), c)
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(self.ctx, tuple(self.ctx.add(x, y) for x, y in zip(a, b)))

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        ctx = self.ctx
        if self.is_zero() or other.is_zero():
            return UniPoly(ctx, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
        return UniPoly(ctx, tuple(out))


def roots_scan_codes(f: UniPoly, ctx: FieldCtx | None = None, cap: int = SCAN_CAP) -> list[int]:
    """Codes of the roots of f in ctx (default f.ctx), by exhaustive evaluation."""
    if f.is_zero():
        raise ValueError("zero polynomial has every element as a root")
    target = ctx or f.ctx
    if target.order > cap:
        raise FieldError(f"{target!r} exceeds the scan cap {cap}")
    if target is not f.ctx:
        emb = embedding(f.ctx, target)
        f = UniPoly(target, tuple(emb.code(c) for c in f.coeffs))
    if f.degree == 0:
        return []
    block = 1 << 20
    out: list[int] = []
    for start in range(0, target.order, block):
        xs = np.arange(start, min(start + block, target.order), dtype=np.int64)
        out.extend(int(v) for v in xs[f.veval(xs) == 0])
    return out


def roots_scan(f: UniPoly, cap: int = SCAN_CAP) -> set[Element]:
    """All roots of f in its coefficient field."""
    return {Element(f.ctx, v) for v in roots_scan_codes(f, cap=cap)}



# dense polynomial helpers over a FieldCtx, coefficient lists low degree first

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod_field(ctx: FieldCtx, a: list[int], m: list[int]) -> list[int]:
    a = _ptrim(list(a))
    inv = ctx.inv(m[-1])
    while len(a) >= len(m):
        c = ctx.mul(a[-1], inv)
        shift = len(a) - len(m)
        for i, v in enumerate(m):
            if v:
                a[shift + i] = ctx.sub(a[shift + i], ctx.mul(c, v))
        _ptrim(a)
    return a


def _pmul_field(ctx: FieldCtx, a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return _ptrim(out)


def _ppowmod(ctx: FieldCtx, base: list[int], e: int, m: list[int]) -> list[int]:
    result = [1]
    base = _pmod_field(ctx, base, m)
    while e:
        if e & 1:
            result = _pmod_field(ctx, _pmul_field(ctx, result, base), m)
        base = _pmod_field(ctx, _pmul_field(ctx, base, base), m)
        e >>= 1
    return result


def _pgcd_field(ctx: FieldCtx, a: list[int], b: list[int]) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod_field(ctx, a, b)
    if not a:
        return a
    inv = ctx.inv(a[-1])
    return [ctx.mul(c, inv) for c in a]


def _psub_field(ctx: FieldCtx, a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _ptrim([ctx.sub(x, y) for x, y in zip(a, b)])


def _split_linear(ctx: FieldCtx, g: list[int]) -> list[int]:
    """Roots of a monic g that is a product of distinct linear factors."""
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [ctx.neg(g[0])]
    Q = ctx.order
    for a in range(Q):
        if ctx.p == 2:
            # trace of a*x splits g for a suitable a
            beta = [0, a] if a else None
            if beta is None:
                continue
            acc: list[int] = []
            term = _pmod_field(ctx, beta, g)
            for _ in range(ctx.k):
                acc = _psub_field(ctx, acc, [ctx.neg(c) for c in term])
                term = _pmod_field(ctx, _pmul_field(ctx, term, term), g)
            h = _pgcd_field(ctx, g, acc)
        else:
            w = _ppowmod(ctx, [a, 1], (Q - 1) // 2, g)
            h = _pgcd_field(ctx, g, _psub_field(ctx, w, [1]))
        if 1 < len(h) < len(g):
            rest = _pdiv_exact(ctx, g, h)
            return _split_linear(ctx, h) + _split_linear(ctx, rest)
    raise FieldError("splitting failed")  # pragma: no cover


def _pdiv_exact(ctx: FieldCtx, a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    inv = ctx.inv(b[-1])
    for i in range(len(out) - 1, -1, -1):
        c = ctx.mul(a[i + len(b) - 1], inv)
        out[i] = c
        for j, v in enumerate(b):
            a[i + j] = ctx.sub(a[i + j], ctx.mul(c, v))
    if any(a[: len(b) - 1]):
        raise ArithmeticError("division is not exact")
    return out


def roots_codes(f: UniPoly, ctx: FieldCtx | None = None) -> list[int]:
    """Sorted distinct roots of f in ctx via gcd with x^Q - x and equal-degree splitting."""
    if f.is_zero():
        raise ValueError("zero polynomial has every element as a root")
    target = ctx or f.ctx
    coeffs = list(f.coeffs)
    if target is not f.ctx:
        emb = embedding(f.ctx, target)
        coeffs = [emb.code(c) for c in coeffs]
    g = _ptrim(coeffs)
    if len(g) <= 1:
        return []
    inv = target.inv(g[-1])
    g = [target.mul(c, inv) for c in g]
    roots: list[int] = []
    if g[0] == 0:
        roots.append(0)
        while g and g[0] == 0:
            g = g[1:]
    xq = _ppowmod(target, [0, 1], target.order, g) if len(g) > 1 else []
    lin = _pgcd_field(target, g, _psub_field(target, xq, [0, 1])) if len(g) > 1 else [1]
    roots.extend(_split_linear(target, lin))
    return sorted(set(roots))

# --- linearized maps -------------------------------------------------------


def _rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = A.copy() % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A, pivots


@dataclass(frozen=True, eq=False)
class LinearizedMap:
    """An F_p-linear endomorphism of a field, given by its k x k matrix on digit vectors."""

    ctx: FieldCtx
    matrix: np.ndarray
    _aux: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_additive(cls, ctx: FieldCtx, terms: Mapping[int, int]) -> "LinearizedMap":
        """L(y) = sum terms[e] * y**e, every exponent e a power of p."""
        for e in terms:
            r = e
            while r > 1 and r % ctx.p == 0:
                r //= ctx.p
            if r != 1:
                raise ValueError(f"exponent {e} is not a power of {ctx.p}")
        basis = np.array([ctx.p**i for i in range(ctx.k)], dtype=np.int64)
        img = np.zeros_like(basis)
        for e, c in terms.items():
            img = ctx.vadd(img, ctx.vmul(ctx.vpow(basis, e), c))
        return cls(ctx, ctx.vdigits(img).T.copy())

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "LinearizedMap":
        return cls(ctx, np.eye(ctx.k, dtype=np.int64))

    def apply(self, y: int) -> int:
        return int(self.vapply(np.array([y]))[0])

    def vapply(self, ys: np.ndarray) -> np.ndarray:
        d = self.ctx.vdigits(ys)
        return self.ctx.vencode((d @ self.matrix.T) % self.ctx.p)

    def _prepare(self) -> dict:
        if self._aux:
            return self._aux
        p, k = self.ctx.p, self.ctx.k
        aug = np.concatenate([self.matrix % p, np.eye(k, dtype=np.int64)], axis=1)
        R, piv = _rref_mod_p(aug, p)
        rank = sum(1 for c in piv if c < k)
        # rows of the left-transform that annihilate the image
        self._aux["image_test"] = R[rank:, k:].copy()
        T = R[:rank, k:]  # T @ matrix = reduced rows
        pivcols = [c for c in piv if c < k]
        P = np.zeros((k, k), dtype=np.int64)
        for r, c in enumerate(pivcols):
            P[c] = T[r]
        self._aux["particular"] = P
        red, pv = _rref_mod_p(self.matrix % p, p)
        free = [c for c in range(k) if c not in pv]
        basis = []
        for f in free:
            v = np.zeros(k, dtype=np.int64)
            v[f] = 1
            for r, c in enumerate(pv):
                v[c] = (-red[r, f]) % p
            basis.append(v)
        self._aux["kernel"] = np.array(basis, dtype=np.int64).reshape(len(basis), k)
        return self._aux

    @property
    def kernel_dim(self) -> int:
        return len(self._prepare()["kernel"])

    def kernel(self) -> list[int]:
        """All kernel elements as codes, sorted."""
        basis = self._prepare()["kernel"]
        p = self.ctx.p
        dim = len(basis)
        if dim == 0:
            return [0]
        coeffs = np.array(np.meshgrid(*[np.arange(p)] * dim, indexing="ij")).reshape(dim, -1).T
        vecs = (coeffs @ basis) % p
        return sorted(int(v) for v in self.ctx.vencode(vecs))

    def vparticular(self, cs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """For each c: (solvable mask, one solution y with L(y) = c where solvable)."""
        aux = self._prepare()
        d = self.ctx.vdigits(cs)
        p = self.ctx.p
        W = aux["image_test"]
        ok = np.all((d @ W.T) % p == 0, axis=-1) if W.size else np.ones(d.shape[:-1], dtype=bool)
        y = self.ctx.vencode((d @ aux["particular"].T) % p)
        return ok, y

    def solve(self, c: int) -> list[int]:
        ok, y = self.vparticular(np.array([c], dtype=np.int64))
        if not ok[0]:
            return []
        y0 = int(y[0])
        return sorted(self.ctx.add(y0, z) for z in self.kernel())


def linearized_solve(L: LinearizedMap, c: Element | int) -> set[Element]:
    """Full solution set of L(y) = c."""
    cv = c.v if isinstance(c, Element) else L.ctx.from_int(c)
    return {Element(L.ctx, v) for v in L.solve(cv)}


# --- vectorized fiber solvers ---------------------------------------------


def solve_twisted(ctx: FieldCtx, Q: int, u: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve y^Q + u*y = c elementwise over ctx, where ctx is an extension of F_Q.

    Returns (index, y): y[j] is a solution for the input at position index[j];
    every solution of every equation is listed once.
    """
    p, t = prime_power(Q)
    if p != ctx.p or ctx.k % t:
        raise FieldError(f"{ctx!r} is not an extension of F_{Q}")
    m = ctx.k // t
    u = np.asarray(u, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    A = np.zeros_like(c)
    B = np.ones_like(c)
    ui, ci = u, c
    for _ in range(m):
        A = ctx.vsub(ci, ctx.vmul(ui, A))
        B = ctx.vneg(ctx.vmul(ui, B))
        ui = ctx.vpow(ui, Q)
        ci = ctx.vpow(ci, Q)
    uniq = B != 1
    idx_u = np.nonzero(uniq)[0]
    y_u = ctx.vmul(A[uniq], ctx.vinv(ctx.vsub(1, B[uniq])))
    rest = np.nonzero(~uniq)[0]
    if rest.size == 0:
        return idx_u, y_u
    # kernel case: y = y0 * z with y0^(Q-1) = -u and z^Q - z = c / y0^Q
    nu = ctx.vneg(u[rest])
    logs = ctx.vlog(nu)
    y0 = ctx.vexp(logs // (Q - 1))
    w = ctx.vmul(c[rest], ctx.vinv(ctx.vpow(y0, Q)))
    L = _artin_schreier_map(ctx, Q)
    ok, z0 = L.vparticular(w)
    sub = embedding(make_field(p, t), ctx).table
    idx_k = np.repeat(rest[ok], Q)
    z = ctx.vadd(np.repeat(z0[ok], Q), np.tile(sub, int(ok.sum())))
    y_k = ctx.vmul(np.repeat(y0[ok], Q), z)
    return np.concatenate([idx_u, idx_k]), np.concatenate([y_u, y_k])


_AS_CACHE: dict[tuple[int, int, int], LinearizedMap] = {}


def _artin_schreier_map(ctx: FieldCtx, Q: int) -> LinearizedMap:
    key = (ctx.p, ctx.k, Q)
    if key not in _AS_CACHE:
        _AS_CACHE[key] = LinearizedMap.from_additive(ctx, {Q: 1, 1: ctx.neg(1)})
    return _AS_CACHE[key]


def solve_binomial(ctx: FieldCtx, m: int, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve y^m = c elementwise; same output convention as :func:`solve_twisted`."""
    c = np.asarray(c, dtype=np.int64)
    n1 = ctx.order - 1
    zero = np.nonzero(c == 0)[0]
    nz = np.nonzero(c != 0)[0]
    g = math.gcd(m, n1)
    L = ctx.vlog(c[nz])
    ok = L % g == 0
    base = nz[ok]
    mm, nn = m // g, n1 // g
    inv = pow(mm, -1, nn) if nn > 1 else 0
    r = ((L[ok] // g) * inv) % max(nn, 1)
    idx = np.repeat(base, g)
    logs = np.repeat(r, g) + np.tile(np.arange(g, dtype=np.int64) * nn, base.size)
    ys = ctx.vexp(logs)
    return np.concatenate([zero, idx]), np.concatenate([np.zeros_like(zero), ys])


# --- trivariate ------------------------------------------------------------


def _grlex_key(e: Exp) -> tuple[int, int, int, int]:
    return (sum(e), e[0], e[1], e[2])


@dataclass(frozen=True, eq=False)
class TriPoly:
    """Sparse polynomial in X, Y, Z: exponent triple -> nonzero coefficient code."""

    ctx: FieldCtx
    terms: Mapping[Exp, int]

    def __post_init__(self):
        clean = {tuple(e): c for e, c in self.terms.items() if c}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_dict(cls, ctx: FieldCtx, terms: Mapping[Exp, object]) -> "TriPoly":
        out: dict[Exp, int] = {}
        for e, c in terms.items():
            e = tuple(e)
            out[e] = ctx.add(out.get(e, 0), _code(ctx, c))
        return cls(ctx, out)

    @classmethod
    def var(cls, ctx: FieldCtx, i: int) -> "TriPoly":
        e = [0, 0, 0]
        e[i] = 1
        return cls(ctx, {tuple(e): 1})

    @classmethod
    def constant(cls, ctx: FieldCtx, c: int) -> "TriPoly":
        return cls(ctx, {(0, 0, 0): c})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading(self) -> tuple[Exp, int]:
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[Exp, int]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __eq__(self, other):
        if not isinstance(other, TriPoly):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ctx), frozenset(self.terms.items())))

    def __add__(self, other: "TriPoly") -> "TriPoly":
        ctx = self.ctx
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = ctx.add(out.get(e, 0), c)
        return TriPoly(ctx, out)

    def __neg__(self) -> "TriPoly":
        return self.scale(self.ctx.neg(1))

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self + (-other)

    def scale(self, c: int) -> "TriPoly":
        ctx = self.ctx
        return TriPoly(ctx, {e: ctx.mul(v, c) for e, v in self.terms.items()})

    def __mul__(self, other: "TriPoly") -> "TriPoly":
        ctx = self.ctx
        out: dict[Exp, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = ctx.add(out.get(e, 0), ctx.mul(c1, c2))
        return TriPoly(ctx, out)

    def frobenius_power(self, s: int) -> "TriPoly":
        """f^(p^s), computed termwise (char p)."""
        ctx = self.ctx
        ps = ctx.p**s
        return TriPoly(ctx, {(e[0] * ps, e[1] * ps, e[2] * ps): ctx.pow(c, ps) for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "TriPoly":
        if n < 0:
            raise ValueError("negative power")
        ctx = self.ctx
        result = TriPoly.constant(ctx, 1)
        s = 0
        while n:
            n, r = divmod(n, ctx.p)
            if r:
                f = self.frobenius_power(s)
                for _ in range(r):
                    result = result * f
            s += 1
        return result

    def normalized(self) -> "TriPoly":
        """Scale so the grlex-leading coefficient (X > Y > Z) is 1."""
        if self.is_zero():
            return self
        _, c = self.leading()
        return self.scale(self.ctx.inv(c))

    def is_scalar_multiple_of(self, other: "TriPoly") -> bool:
        return self.normalized() == other.normalized()

    def lift(self, sup: FieldCtx) -> "TriPoly":
        if sup is self.ctx:
            return self
        emb = embedding(self.ctx, sup)
        return TriPoly(sup, {e: emb.code(c) for e, c in self.terms.items()})

    def descend(self, sub: FieldCtx) -> "TriPoly":
        """Re-base coefficients into a subfield; raise if some coefficient is outside it."""
        emb = embedding(sub, self.ctx)
        out = {}
        for e, c in self.terms.items():
            r = emb.preimage_code(c)
            if r is None:
                raise FieldError(f"coefficient of {e} does not lie in {sub!r}")
            out[e] = r
        return TriPoly(sub, out)

    def evaluate(self, x: int, y: int, z: int = 1) -> int:
        ctx = self.ctx
        acc = 0
        for (i, j, k), c in self.terms.items():
            acc = ctx.add(acc, ctx.mul(c, ctx.mul(ctx.pow(x, i), ctx.mul(ctx.pow(y, j), ctx.pow(z, k)))))
        return acc

    def veval(self, X, Y, Z=None, ctx: FieldCtx | None = None) -> np.ndarray:
        """Evaluate at arrays of codes in ctx (default self.ctx; coefficients are lifted)."""
        ctx = ctx or self.ctx
        f = self.lift(ctx)
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        Z = np.ones_like(X) if Z is None else np.asarray(Z, dtype=np.int64)
        X, Y, Z = np.broadcast_arrays(X, Y, Z)
        acc = np.zeros(X.shape, dtype=np.int64)
        for (i, j, k), c in f.terms.items():
            t = ctx.vmul(ctx.vmul(ctx.vpow(X, i), ctx.vpow(Y, j)), ctx.vpow(Z, k))
            acc = ctx.vadd(acc, ctx.vmul(t, c))
        return acc

    def coeffs_in_y(self, chart: str = "Z") -> dict[int, dict[int, int]]:
        """Group terms by the Y exponent after dehomogenizing: {j: {x_exponent: coeff}}.

        chart "Z" sets Z = 1 (keeps X); chart "X" sets X = 1 and reads Z as the
        other variable (used only through :meth:`restrict`).
        """
        out: dict[int, dict[int, int]] = {}
        for (i, j, k), c in self.terms.items():
            xe = i if chart == "Z" else k
            d = out.setdefault(j, {})
            d[xe] = self.ctx.add(d.get(xe, 0), c)
        return out

    def __repr__(self) -> str:
        parts = []
        for (i, j, k), c in self.sorted_terms():
            mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip("XYZ", (i, j, k)) if e)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts) if parts else "0"


def _linear_form(ctx: FieldCtx, row: Sequence[int]) -> TriPoly:
    return TriPoly(ctx, {(1, 0, 0): row[0], (0, 1, 0): row[1], (0, 0, 1): row[2]})


def det3(ctx: FieldCtx, M: Sequence[Sequence[int]]) -> int:
    a, b, c = M[0]
    d, e, f = M[1]
    g, h, i = M[2]
    mul, add, sub = ctx.mul, ctx.add, ctx.sub
    t1 = mul(a, sub(mul(e, i), mul(f, h)))
    t2 = mul(b, sub(mul(d, i), mul(f, g)))
    t3 = mul(c, sub(mul(d, h), mul(e, g)))
    return add(sub(t1, t2), t3)


def matmul3(ctx: FieldCtx, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[ctx.sum(ctx.mul(A[i][k], B[k][j]) for k in range(3)) for j in range(3)] for i in range(3)]


def inv3(ctx: FieldCtx, M: Sequence[Sequence[int]]) -> list[list[int]]:
    det = det3(ctx, M)
    if det == 0:
        raise ValueError("matrix is singular")
    di = ctx.inv(det)
    out = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != j]
            c = [x for x in range(3) if x != i]
            m = ctx.sub(ctx.mul(M[r[0]][c[0]], M[r[1]][c[1]]), ctx.mul(M[r[0]][c[1]], M[r[1]][c[0]]))
            out[i][j] = ctx.mul(m if (i + j) % 2 == 0 else ctx.neg(m), di)
    return out


def substitute_map(F: TriPoly, M, normalize: bool = True) -> TriPoly:
    """F o M: replace (X, Y, Z) by M applied to the column vector (X, Y, Z)."""
    ctx = F.ctx
    rows = [[_code(ctx, v) for v in row] for row in M]
    if det3(ctx, rows) == 0:
        raise ValueError("substitution matrix is singular")
    forms = [_linear_form(ctx, r) for r in rows]
    cache: dict[tuple[int, int], TriPoly] = {}

    def pw(v: int, e: int) -> TriPoly:
        if (v, e) not in cache:
            cache[(v, e)] = forms[v] ** e
        return cache[(v, e)]

    out = TriPoly(ctx, {})
    for (i, j, k), c in F.terms.items():
        out = out + (pw(0, i) * pw(1, j) * pw(2, k)).scale(c)
    return out.normalized() if normalize else out


# --- the symmetric product of case V ---------------------------------------


def s_poly(q: int, d: int, big: FieldCtx | None = None) -> TriPoly:
    """prod over beta^d = 1 of (beta X + beta^q Y + Z), re-based over F_{q^2}."""
    p, t = prime_power(q)
    if d < 3 or (q * q - q + 1) % d:
        raise ValueError(f"d = {d} must be >= 3 and divide q^2 - q + 1 = {q * q - q + 1}")
    big = big or make_field(p, 6 * t)
    if (big.order - 1) % d or big.k % (2 * t):
        raise FieldError(f"{big!r} has no primitive {d}-th root of unity over F_{{{q}^2}}")
    beta = root_of_unity(big, d).v
    prod = TriPoly.constant(big, 1)
    for e in range(d):
        b = big.pow(beta, e)
        prod = prod * TriPoly(big, {(1, 0, 0): b, (0, 1, 0): big.pow(b, q), (0, 0, 1): 1})
    return prod.descend(make_field(p, 2 * t))


def s_substitute(s: TriPoly, q: int, d: int) -> TriPoly:
    """The bivariate f(X, Y) = s(X^{q/d}, Y^{1/d}, X^{1/d} Y^{q/d}), stored with Z-exponent 0.

    A term c X1^i X2^(j-i) X3^(d-j) becomes c X^((qi+d-j)/d) Y^((j-i+q(d-j))/d).
    """
    out: dict[Exp, int] = {}
    for (a, b, c3), c in s.terms.items():
        i, j = a, a + b
        if a + b + c3 != d:
            raise ValueError("s is not homogeneous of degree d")
        ex, ey = q * i + d - j, j - i + q * (d - j)
        if ex % d or ey % d:
            raise ValueError(f"non-integral exponent for term {(a, b, c3)}")
        e = (ex // d, ey // d, 0)
        out[e] = s.ctx.add(out.get(e, 0), c)
    return TriPoly(s.ctx, out)
