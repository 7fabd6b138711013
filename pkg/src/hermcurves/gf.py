"""Finite fields F_{p^k} in a fixed polynomial basis, with tower embeddings.

Elements are encoded as integers ``sum(c_i * p**i)`` where ``c_i`` is the
coefficient of ``t**i`` modulo the defining polynomial.  Arithmetic on codes
goes through Zech-logarithm tables built once per field; the :class:`Element`
wrapper is a thin convenience layer over the codes.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CARDINALITY_CAP = 2**26
TABLE_CAP = 2**24


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = 3
    while r * r <= n:
        if n % r == 0:
            return False
        r += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    r = 2
    while r * r <= n:
        if n % r == 0:
            out.append(r)
            while n % r == 0:
                n //= r
        r += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, t)`` with ``q == p**t``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise FieldError(f"{q} is not a prime power")
    p = fs[0]
    t = round(math.log(q, p))
    if p**t != q:
        raise FieldError(f"{q} is not a prime power")
    return p, t


# --- polynomials over F_p as coefficient lists, low degree first -----------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _xpow_mod(e: int, m: Sequence[int], p: int) -> list[int]:
    result, base = [1], _pmod([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    k = len(f) - 1
    if k == 1:
        return True
    if f[0] == 0:
        return False
    if _psub(_xpow_mod(p**k, f, p), [0, 1], p):
        return False
    for r in prime_factors(k):
        h = _psub(_xpow_mod(p ** (k // r), f, p), [0, 1], p)
        if len(_pgcd(list(f), h, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible (low-degree coefficient first)."""
    for n in range(p**k):
        low = [(n // p ** (k - 1 - i)) % p for i in range(k)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")  # pragma: no cover


# --- fields ----------------------------------------------------------------


class FieldCtx:
    """The field F_{p^k} = F_p[t]/(modulus)."""

    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        self.p = p
        self.k = k
        self.modulus = modulus
        self.order = p**k
        self._pw = [p**i for i in range(k)]
        self._tables_built = False

    # identity and display
    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (make_field, (self.p, self.k))

    @property
    def cardinality(self) -> int:
        return self.order

    # codes <-> coefficients
    def digits(self, v: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.k):
            v, r = divmod(v, p)
            out.append(r)
        return out

    def encode(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise FieldError("too many coefficients")
        return sum((c % self.p) * self._pw[i] for i, c in enumerate(coeffs))

    def sort_key(self, v: int) -> int:
        """Integer whose order is the low-degree-first lexicographic order."""
        key = 0
        for c in self.digits(v):
            key = key * self.p + c
        return key

    def v_sort_key(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        key = np.zeros_like(v)
        for i in range(self.k):
            key = key * self.p + (v // self._pw[i]) % self.p
        return key

    def smallest(self, codes: Iterable[int]) -> int:
        return min(codes, key=self.sort_key)

    def element(self, value: int | Sequence[int]) -> "Element":
        if isinstance(value, int):
            return Element(self, self.from_int(value))
        return Element(self, self.encode(value))

    def from_int(self, n: int) -> int:
        """Code of the prime-field element n * 1."""
        return n % self.p

    @property
    def zero(self) -> "Element":
        return Element(self, 0)

    @property
    def one(self) -> "Element":
        return Element(self, 1)

    @property
    def gen(self) -> "Element":
        """The class of t (zero when k == 1 and the modulus is t)."""
        return Element(self, self.p if self.k > 1 else (-self.modulus[0]) % self.p)

    def elements(self) -> list["Element"]:
        return [Element(self, v) for v in range(self.order)]

    # slow reference arithmetic (used to bootstrap the tables)
    def _slow_mul(self, a: int, b: int) -> int:
        prod = _pmul(self.digits(a), self.digits(b), self.p)
        return self.encode(_pmod(prod, self.modulus, self.p)) if prod else 0

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    def _mul_matrix(self, c: int) -> np.ndarray:
        """k x k matrix over F_p of multiplication by c (columns c * t^i)."""
        cols = [self.digits(self._slow_mul(c, self._pw[i])) for i in range(self.k)]
        return np.array(cols, dtype=np.int64).T

    def _find_primitive(self) -> int:
        n1 = self.order - 1
        if n1 == 1:
            return 1
        rs = prime_factors(n1)
        codes = np.arange(1, self.order, dtype=np.int64)
        cands = codes[np.argsort(self.v_sort_key(codes), kind="stable")]
        for g in cands.tolist():
            if all(self._slow_pow(g, n1 // r) != 1 for r in rs):
                return g
        raise FieldError("no primitive element")  # pragma: no cover

    def _build_tables(self) -> None:
        if self._tables_built:
            return
        if self.order > TABLE_CAP:
            raise FieldError(f"{self!r} exceeds the table cap {TABLE_CAP}")
        n1 = self.order - 1
        g = self._find_primitive()
        B = max(1, math.isqrt(n1) + 1)
        block = [1]
        for _ in range(B - 1):
            block.append(self._slow_mul(block[-1], g))
        pw = np.array(self._pw, dtype=np.int64)
        blk = np.array(block, dtype=np.int64)
        D = (blk[:, None] // pw[None, :]) % self.p
        G = self._slow_mul(block[-1], g)  # g^B
        exp = np.empty(2 * n1 + 1, dtype=np.int32)
        c = 1
        pos = 0
        while pos < n1:
            M = self._mul_matrix(c)
            codes = ((D @ M.T) % self.p) @ pw
            take = min(B, n1 - pos)
            exp[pos : pos + take] = codes[:take]
            pos += take
            c = self._slow_mul(c, G)
        exp[n1 : 2 * n1] = exp[:n1]
        exp[2 * n1] = exp[0]
        log = np.full(self.order, -1, dtype=np.int32)
        log[exp[:n1]] = np.arange(n1, dtype=np.int32)
        if np.any(log[1:] < 0):  # pragma: no cover
            raise FieldError("primitive element search failed")
        e = exp[:n1].astype(np.int64)
        d0 = e % self.p
        one_plus = np.where(d0 == self.p - 1, e - (self.p - 1), e + 1)
        zech = log[one_plus].astype(np.int32)
        self.primitive = g
        self.n1 = n1
        self.half = n1 // 2 if self.p != 2 else 0
        self.exp_np, self.log_np, self.zech_np = exp, log, zech
        self._exp = array("i", exp.tobytes())
        self._log = array("i", log.tobytes())
        self._zech = array("i", zech.tobytes())
        self._tables_built = True

    # scalar arithmetic on codes
    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        if not self._tables_built:
            self._build_tables()
        la = self._log[a]
        d = self._log[b] - la
        if d < 0:
            d += self.n1
        z = self._zech[d]
        if z < 0:
            return 0
        return self._exp[la + z]

    def neg(self, a: int) -> int:
        if a == 0 or self.p == 2:
            return a
        if not self._tables_built:
            self._build_tables()
        return self._exp[self._log[a] + self.half]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if not self._tables_built:
            self._build_tables()
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if not self._tables_built:
            self._build_tables()
        return self._exp[self.n1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 if e == 0 else 0
        if not self._tables_built:
            self._build_tables()
        return self._exp[(self._log[a] * e) % self.n1]

    def log(self, a: int) -> int:
        if not self._tables_built:
            self._build_tables()
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]

    def exp(self, i: int) -> int:
        if not self._tables_built:
            self._build_tables()
        return self._exp[i % self.n1]

    def order_of(self, a: int) -> int:
        """Multiplicative order, via divisor checks on p^k - 1."""
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.order - 1
        for r in prime_factors(n):
            while n % r == 0 and self.pow(a, n // r) == 1:
                n //= r
        return n

    def sum(self, codes: Iterable[int]) -> int:
        s = 0
        for c in codes:
            s = self.add(s, c)
        return s

    # vectorized arithmetic on int64 arrays of codes
    def tables(self) -> None:
        self._build_tables()

    def vmul(self, a, b) -> np.ndarray:
        self._build_tables()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log_np[a].astype(np.int64)
        lb = self.log_np[b].astype(np.int64)
        out = self.exp_np[np.maximum(la + lb, 0)].astype(np.int64)
        return np.where((la < 0) | (lb < 0), 0, out)

    def vadd(self, a, b) -> np.ndarray:
        self._build_tables()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        la = self.log_np[a].astype(np.int64)
        lb = self.log_np[b].astype(np.int64)
        d = np.mod(lb - la, self.n1)
        z = self.zech_np[d].astype(np.int64)
        out = self.exp_np[np.where(z < 0, 0, la + z) % (2 * self.n1)].astype(np.int64)
        out = np.where(z < 0, 0, out)
        out = np.where(la < 0, b, out)
        return np.where(lb < 0, a, out)

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        self._build_tables()
        la = self.log_np[a].astype(np.int64)
        return np.where(la < 0, 0, self.exp_np[np.maximum(la, 0) + self.half].astype(np.int64))

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vinv(self, a) -> np.ndarray:
        """Inverse with the convention 0 -> 0."""
        self._build_tables()
        a = np.asarray(a, dtype=np.int64)
        la = self.log_np[a].astype(np.int64)
        return np.where(la < 0, 0, self.exp_np[self.n1 - np.maximum(la, 0)].astype(np.int64))

    def vpow(self, a, e: int) -> np.ndarray:
        """Power with e >= 0 (0**0 == 1)."""
        self._build_tables()
        a = np.asarray(a, dtype=np.int64)
        la = self.log_np[a].astype(np.int64)
        out = self.exp_np[(np.maximum(la, 0) * (e % self.n1)) % self.n1].astype(np.int64)
        if e == 0:
            return np.ones_like(a)
        return np.where(la < 0, 0, out)

    def vlog(self, a) -> np.ndarray:
        self._build_tables()
        return self.log_np[np.asarray(a, dtype=np.int64)].astype(np.int64)

    def vexp(self, i) -> np.ndarray:
        self._build_tables()
        return self.exp_np[np.mod(np.asarray(i, dtype=np.int64), self.n1)].astype(np.int64)

    def vdigits(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        pw = np.array(self._pw, dtype=np.int64)
        return (v[..., None] // pw) % self.p

    def vencode(self, digits: np.ndarray) -> np.ndarray:
        pw = np.array(self._pw, dtype=np.int64)
        return (np.asarray(digits, dtype=np.int64) % self.p) @ pw

    def all_codes(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)


@lru_cache(maxsize=None)
def _make_field(p: int, k: int) -> FieldCtx:
    return FieldCtx(p, k, smallest_irreducible(p, k))


def make_field(p: int, k: int, cap: int = DEFAULT_CARDINALITY_CAP) -> FieldCtx:
    """Build F_{p^k} with the lexicographically smallest monic irreducible modulus."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if p**k > cap:
        raise FieldError(f"|F| = {p}^{k} exceeds cap {cap}")
    return _make_field(p, k)


def field_of_order(q: int, cap: int = DEFAULT_CARDINALITY_CAP) -> FieldCtx:
    p, t = prime_power(q)
    return make_field(p, t, cap)


class Element:
    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v: int):
        self.ctx = ctx
        self.v = v

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.ctx.digits(self.v))

    def _coerce(self, other) -> int:
        if isinstance(other, Element):
            if other.ctx is not self.ctx:
                raise FieldError(f"mixing {self.ctx!r} and {other.ctx!r}")
            return other.v
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.sub(self.v, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.sub(o, self.v))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.div(self.v, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Element(self.ctx, self.ctx.div(o, self.v))

    def __neg__(self):
        return Element(self.ctx, self.ctx.neg(self.v))

    def __pow__(self, e: int):
        return Element(self.ctx, self.ctx.pow(self.v, e))

    def inverse(self) -> "Element":
        return Element(self.ctx, self.ctx.inv(self.v))

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ctx is other.ctx and self.v == other.v
        if isinstance(other, int):
            return self.v == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.v))

    def __bool__(self):
        return self.v != 0

    def is_zero(self) -> bool:
        return self.v == 0

    def order(self) -> int:
        return self.ctx.order_of(self.v)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else (f"{c}*t" if i == 1 else f"{c}*t^{i}").replace("1*t", "t") if c == 1 else (f"{c}*t" if i == 1 else f"{c}*t^{i}"))
        return "+".join(terms) if terms else "0"


def frobenius(x: Element, s: int) -> Element:
    """x -> x^(p^s)."""
    ctx = x.ctx
    return Element(ctx, ctx.pow(x.v, pow(ctx.p, s % ctx.k, ctx.order - 1) if ctx.order > 2 else 1))


# --- towers ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TowerEmbed:
    """Field homomorphism sub -> sup determined by the image of t."""

    sub: FieldCtx
    sup: FieldCtx
    gen_image: int

    def __post_init__(self):
        if self.sub.p != self.sup.p or self.sup.k % self.sub.k:
            raise FieldError(f"{self.sub!r} does not embed in {self.sup!r}")
        acc = 0
        for c in reversed(self.sub.modulus):
            acc = self.sup.add(self.sup.mul(acc, self.gen_image), self.sup.from_int(c))
        if acc != 0:
            raise FieldError("image of the generator is not a root of the sub modulus")
        object.__setattr__(self, "_table", None)
        object.__setattr__(self, "_inverse", None)

    @property
    def table(self) -> np.ndarray:
        """Images of all codes of sub, indexed by code."""
        if self._table is None:
            sub, sup = self.sub, self.sup
            powers = [1]
            for _ in range(sub.k - 1):
                powers.append(sup.mul(powers[-1], self.gen_image))
            digits = sub.vdigits(sub.all_codes())
            out = np.zeros(sub.order, dtype=np.int64)
            for i, gi in enumerate(powers):
                for c in range(1, sub.p):
                    mask = digits[:, i] == c
                    if mask.any():
                        out[mask] = sup.vadd(out[mask], sup.mul(gi, sup.from_int(c)))
            object.__setattr__(self, "_table", out)
        return self._table

    def code(self, v: int) -> int:
        return int(self.table[v])

    def __call__(self, x: Element) -> Element:
        if x.ctx is not self.sub:
            raise FieldError("element is not in the source field")
        return Element(self.sup, self.code(x.v))

    def preimage_code(self, v: int) -> int | None:
        if self._inverse is None:
            object.__setattr__(self, "_inverse", {int(w): i for i, w in enumerate(self.table)})
        return self._inverse.get(int(v))

    def preimage(self, x: Element) -> Element:
        r = self.preimage_code(x.v)
        if r is None:
            raise FieldError("element is not in the image of the subfield")
        return Element(self.sub, r)


def roots_in(ctx: FieldCtx, coeffs: Sequence[int]) -> list[int]:
    """Codes of all roots in ctx of sum coeffs[i] x^i (exhaustive vectorized scan)."""
    xs = ctx.all_codes()
    acc = np.zeros_like(xs)
    for c in reversed(coeffs):
        acc = ctx.vadd(ctx.vmul(acc, xs), c)
    return [int(v) for v in xs[acc == 0]]


@lru_cache(maxsize=None)
def embedding(sub: FieldCtx, sup: FieldCtx) -> TowerEmbed:
    """Deterministic embedding: t maps to the smallest root of sub.modulus in sup."""
    if sub is sup:
        return TowerEmbed(sub, sup, sub.gen.v)
    if sub.p != sup.p or sup.k % sub.k:
        raise FieldError(f"{sub!r} does not embed in {sup!r}")
    if sub.k == 1:
        return TowerEmbed(sub, sup, sup.from_int(-sub.modulus[0]))
    roots = roots_in(sup, [sup.from_int(c) for c in sub.modulus])
    return TowerEmbed(sub, sup, sup.smallest(roots))


def lift(x: Element, sup: FieldCtx) -> Element:
    return embedding(x.ctx, sup)(x)


def in_subfield(ctx: FieldCtx, v: int, k_sub: int) -> bool:
    return ctx.pow(v, ctx.p**k_sub) == v


def trace_to(x: Element, sub: FieldCtx) -> Element:
    """Relative trace to sub, returned as an element of sub."""
    ctx = x.ctx
    emb = embedding(sub, ctx)
    Q = sub.order
    s, y = 0, x.v
    for _ in range(ctx.k // sub.k):
        s = ctx.add(s, y)
        y = ctx.pow(y, Q)
    return emb.preimage(Element(ctx, s))


def norm_to(x: Element, sub: FieldCtx) -> Element:
    """Relative norm to sub, returned as an element of sub."""
    ctx = x.ctx
    emb = embedding(sub, ctx)
    m = ctx.k // sub.k
    e = (ctx.order - 1) // (sub.order - 1)
    if m == 1:
        e = 1
    return emb.preimage(Element(ctx, ctx.pow(x.v, e)))


def root_of_unity(ctx: FieldCtx, d: int) -> Element:
    """The smallest element (low-degree-first order) of multiplicative order exactly d."""
    n1 = ctx.order - 1
    if d < 1 or n1 % d:
        raise FieldError(f"{d} does not divide |{ctx!r}*| = {n1}")
    if d == 1:
        return ctx.one
    js = np.arange(d, dtype=np.int64)
    mask = np.gcd(js, d) == 1
    vals = ctx.vexp(js[mask] * (n1 // d))
    keys = ctx.v_sort_key(vals)
    return Element(ctx, int(vals[np.argmin(keys)]))


UNIT_KINDS = ("q-1=-1", "q+1=-1", "q+1=1")


def solve_unit_condition(ctx: FieldCtx, q: int, kind: str) -> Element:
    """Smallest omega in F_{q^2} with omega^(q-1) = -1, omega^(q+1) = -1 or omega^(q+1) = 1."""
    p, t = prime_power(q)
    if ctx.p != p or ctx.k != 2 * t:
        raise FieldError(f"{ctx!r} is not F_{{{q}^2}}")
    if kind not in UNIT_KINDS:
        raise FieldError(f"unknown unit condition {kind!r}")
    e = q - 1 if kind.startswith("q-1") else q + 1
    target = ctx.neg(1) if kind.endswith("=-1") else 1
    xs = np.arange(1, ctx.order, dtype=np.int64)
    sols = xs[ctx.vpow(xs, e) == target]
    if sols.size == 0:  # pragma: no cover
        raise FieldError("no solution")
    return Element(ctx, int(sols[np.argmin(ctx.v_sort_key(sols))]))
