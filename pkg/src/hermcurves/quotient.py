"""Orbits, tame Riemann-Hurwitz, Frobenius-stable orbit counts and the closed genus forms."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .autos import (
    CASES,
    ProjMap,
    Subgroup,
    case_admissible,
    check_case,
    closure,
    ext6,
    find_tame_sl2_subgroup,
    fixed_points_on,
    generator_T,
    parse_kind,
    _resolve_kind,
    singer_generators,
)
from .gf import FieldCtx, FieldError, embedding, make_field, prime_power
from .hermitian import (
    ENUM_CAP,
    PlaneModel,
    ProjPoint,
    frobenius_points,
    iter_point_chunks,
    m4_transport,
    model,
    point_arrays,
    point_keys,
    vnormalize,
)
from .poly import TriPoly, s_poly, s_substitute


class WildGroupError(ValueError):
    """Riemann-Hurwitz in its tame form does not apply."""


# --- orbits -----------------------------------------------------------------


@dataclass
class Orbit:
    length: int
    representative: ProjPoint
    stabilizer: int


@dataclass
class OrbitReport:
    group: Subgroup
    ext: FieldCtx
    orbits: list[Orbit]

    @property
    def small_orbits(self) -> list[Orbit]:
        return [o for o in self.orbits if o.length < self.group.order]

    @property
    def lengths(self) -> list[int]:
        return [o.length for o in self.orbits]

    def as_json(self) -> list[dict]:
        return [{"length": o.length, "stabilizer": o.stabilizer} for o in self.orbits]


def _point_key(P: ProjPoint) -> int:
    # point_keys expects the Z-first normalization of the vectorized code paths
    X, Y, Z = vnormalize(P.ctx, *([c] for c in P.coords))
    return int(point_keys(P.ctx, X, Y, Z)[0])


def orbits(G: Subgroup, pts: Sequence[ProjPoint]) -> OrbitReport:
    """Partition pts into G-orbits (every orbit is completed, even if pts lists only part of it)."""
    pts = list(pts)
    ext = pts[0].ctx if pts else G.ctx
    if any(P.ctx is not ext for P in pts):
        raise FieldError("points over different fields")
    if ext.p != G.ctx.p or ext.k % G.ctx.k:
        raise FieldError(f"group over {G.ctx!r} cannot act on points over {ext!r}")
    maps = [g.lift(ext) for g in G.elements]
    seen: set[ProjPoint] = set()
    out: list[Orbit] = []
    for P in pts:
        if P in seen:
            continue
        images = [g.apply(P) for g in maps]
        orb = set(images)
        seen |= orb
        stab = sum(1 for Q in images if Q == P)
        rep = min(orb, key=_point_key)
        out.append(Orbit(len(orb), rep, stab))
    out.sort(key=lambda o: (o.length, _point_key(o.representative)))
    return OrbitReport(G, ext, out)


def _default_ext(C: PlaneModel, G: Subgroup) -> FieldCtx:
    # F_{q^2}-lines meet the Hermitian curve in 1 or q+1 rational points, so
    # F_{q^2} already carries every fixed point of a map defined over it
    if C.twist is None and G.ctx is C.ctx:
        return C.ctx
    return ext6(C.q)


def small_orbits_on_curve(G: Subgroup, C: PlaneModel, ext: FieldCtx | None = None) -> OrbitReport:
    """Orbits of length < |G|: G-orbits of fixed points of non-identity elements."""
    if G.order % C.ctx.p == 0:
        raise WildGroupError(f"|G| = {G.order} is divisible by p = {C.ctx.p}")
    ext = ext or _default_ext(C, G)
    pts: set[ProjPoint] = set()
    for g in G.non_identity():
        try:
            pts |= fixed_points_on(C, g, ext)
        except FieldError:
            if ext is C.ctx:
                ext = ext6(C.q)
                return small_orbits_on_curve(G, C, ext)
            raise
    ordered = sorted(pts, key=_point_key)
    rep = orbits(G, ordered)
    return OrbitReport(G, rep.ext, rep.small_orbits)


def rh_genus(g_top: int, n: int, small_lengths: Sequence[int]) -> int:
    """g' with 2g - 2 = n(2g' - 2) + sum(n - l_i)."""
    lhs = 2 * g_top - 2 - sum(n - l for l in small_lengths)
    if lhs % n:
        raise ValueError("Riemann-Hurwitz gives a non-integral genus")
    two_g = lhs // n + 2
    if two_g % 2 or two_g < 0:
        raise ValueError(f"Riemann-Hurwitz gives genus {two_g / 2}")
    return two_g // 2


def hermitian_genus(q: int) -> int:
    return q * (q - 1) // 2


# --- closed forms --------------------------------------------------------------------


def _exact(num: int, den: int) -> int:
    if num % den:
        raise ValueError(f"{num}/{den} is not an integer")
    return num // den


def genus_formula(case: str, q: int, d: int) -> int:
    check_case(case, q, d)
    p, _ = prime_power(q)
    if case == "I":
        return _exact((q - 1) ** 2, 4)
    if case == "II1":
        return _exact(q * (q // p - 1), 2)
    if case == "II2":
        return _exact(q * (q - 1), 2 * p)
    if case == "III":
        return _exact(q * (q - 1), 2 * d)
    if case == "IV1":
        return _exact((q - 1) * ((q + 1) // d - 1), 2)
    if case == "IV2":
        return _exact((q + 1) * (q - 2), 2 * d) + 1
    return _exact((q * q - q + 1) // d - 1, 2)


def admissible_cases(q: int, max_d: int | None = None) -> list[tuple[str, int]]:
    """All (case, d) with d prime satisfying the case condition, ordered by case then d."""
    p, _ = prime_power(q)
    bound = max_d or q * q - q + 1
    out = []
    for case in CASES:
        for d in range(2, bound + 1):
            if case_admissible(case, q, d):
                out.append((case, d))
    return out


def _sym4(q: int) -> int:
    c = {(1, 1): 1, (1, 2): 33, (3, 1): 61, (3, 2): 93}[(q % 4, q % 3)]
    return _exact(q * q - 2 * q + c, 96)


def _alt4(q: int) -> int:
    c = {(1, 1): 1, (1, 2): 33, (3, 1): 13, (3, 2): 45}[(q % 4, q % 3)]
    return _exact(q * q - 2 * q + c, 48)


def _alt5(q: int) -> int:
    c = {
        (1, 1, 1): 1, (1, 1, 2): 81, (1, 3, 1): 61, (1, 3, 2): 141,
        (4, 1, 1): 97, (4, 1, 2): 177, (4, 3, 1): 157, (4, 3, 2): 237,
    }[(q % 5, q % 4, q % 3)]
    return _exact(q * q - 2 * q + c, 240)


def dihedral_branches(q: int, d: int, torus: str) -> dict[str, int | None]:
    """Both alternatives of the dihedral forms, keyed by the q mod 4 class they belong to."""
    if torus == "nonsplit":
        a, b = (q + 1) * (q - 3), (q + 1) * (q - 3) + 4 * d
        forms = {"q=3 mod 4": (a + 8 * d, 8 * d), "q=1 mod 4": (b, 8 * d)}
    else:
        forms = {"q=3 mod 4": ((q - 1) ** 2 + 4 * d, 8 * d), "q=1 mod 4": ((q - 1) ** 2, 8 * d)}
    return {k: (n // m if n % m == 0 else None) for k, (n, m) in forms.items()}


def sl2_genus_formula(kind, q: int) -> int:
    k = _resolve_kind(q, parse_kind(kind))
    p, _ = prime_power(q)
    if k.family == "C":
        d = k.d
        if k.torus == "nonsplit":
            if k.lift == "odd":
                return _exact((q + 1) * (q - 2), 2 * d) + 1
            return _exact((q + 1) * (q - 3), 4 * d) + 1
        if k.lift == "odd":
            return _exact(q * (q - 1), 2 * d)
        return _exact((q - 1) ** 2, 4 * d)
    if k.family == "D":
        val = dihedral_branches(q, k.d, k.torus)["q=3 mod 4" if q % 4 == 3 else "q=1 mod 4"]
        if val is None:
            raise ValueError("dihedral form is not an integer")
        return val
    return {"Sym4": _sym4, "Alt4": _alt4, "Alt5": _alt5}[k.family](q)


def sl2_kinds(q: int) -> list[str]:
    """Every kind admissible for q, in a fixed order."""
    p, _ = prime_power(q)
    out = []
    for torus, base in (("split", q - 1), ("nonsplit", q + 1)):
        top = base if p == 2 else base // 2
        for d in range(2, top + 1):
            if top % d:
                continue
            if p == 2:
                out.append(f"C({d},{torus})")
                continue
            if d % 2:
                out.append(f"C({d},{torus},odd)")
            out.append(f"C({d},{torus},full)")
            out.append(f"D({d},{torus})")
    for fam in ("Sym4", "Alt4", "Alt5"):
        try:
            _resolve_kind(q, parse_kind(fam))
            out.append(fam)
        except ValueError:
            pass
    return out


def singer_branch_admissible(q: int, n: int, branch: int) -> bool:
    m = q * q - q + 1
    if n < 3 or m % n:
        return False
    if branch == 1:
        return True
    if branch == 2:
        return q % 3 == 1 or (q % 3 == 2 and n % 3 == 0)
    if branch == 3:
        return q % 3 == 2 and n % 3 != 0
    raise ValueError(f"unknown branch {branch}")


def singer_genus_formula(q: int, n: int, branch: int, i: int | None = None) -> int:
    """Closed form for the Singer-normalizer quotients; i = 0 in branch 3 selects G_0."""
    if not singer_branch_admissible(q, n, branch):
        raise ValueError(f"branch {branch} is not admissible for q={q}, n={n}")
    m = q * q - q + 1
    if branch == 1:
        return _exact(m // n - 1, 2)
    if branch == 2:
        return _exact(m - n, 6 * n)
    if i == 0:
        return _exact(q * q - q + 3 * n + 1, 6 * n)
    return _exact(m - 3 * n, 6 * n)


def singer_group_for(q: int, n: int, branch: int, i: int | None = None) -> Subgroup:
    if branch == 1:
        return singer_generators(q, n, None)
    if branch == 2:
        return singer_generators(q, n, 0)
    return singer_generators(q, n, 1 if i is None else i)


# --- Frobenius-stable orbit count ------------------------------------------------


def frobenius_conjugate(C: PlaneModel, T: ProjMap) -> ProjMap:
    """F T F^-1 for the F_{q^2}-Frobenius F of C."""
    e = C.q * C.q
    Tf = T.frobenius(e)
    if C.twist is None:
        return Tf
    rho = ProjMap.make(T.ctx, C.twist)
    return rho @ Tf @ rho.inverse()


def count_extension_degree(C: PlaneModel, T: ProjMap, d: int) -> int:
    """Least k with 1 + r + ... + r^(k-1) = 0 mod d and twist^k = 1, where F T F^-1 = T^r."""
    conj = frobenius_conjugate(C, T)
    r = next((r for r in range(1, d) if T**r == conj), None)
    if r is None:
        raise ValueError("Frobenius does not normalize the group")
    rho_order = 1
    if C.twist is not None:
        rho = ProjMap.make(T.ctx, C.twist)
        rho_order = rho.order()
    k, s, pw = 1, 1, 1
    while s % d or k % rho_order:
        pw = pw * r % d
        s += pw
        k += 1
    return k


def untwist(G: Subgroup, C: PlaneModel) -> tuple[Subgroup, PlaneModel]:
    """Carry a group on M4 to M1, where the F_{q^2}-structure is the plain Frobenius."""
    if C.twist is None:
        return G, C
    if C.id != "M4":
        raise ValueError(f"no transport known for {C.id}")
    E = ext6(C.q)
    A = ProjMap.make(E, m4_transport(C.q))
    Ai = A.inverse()
    M1 = model("M1", C.q)
    emb = embedding(M1.ctx, E)

    def down(g: ProjMap) -> ProjMap:
        h = Ai @ g.lift(E) @ A
        rows = tuple(tuple(emb.preimage_code(c) for c in r) for r in h.matrix)
        if any(c is None for r in rows for c in r):
            raise FieldError("conjugated map is not defined over F_{q^2}")
        return ProjMap(M1.ctx, rows)  # type: ignore[arg-type]

    H = Subgroup([down(g) for g in G.elements], [down(g) for g in G.generators], G.label, dict(G.meta))
    return H, M1


def quotient_point_count(G: Subgroup, C: PlaneModel, ext: FieldCtx | None = None, cap: int = ENUM_CAP, jobs: int = 1) -> int:
    """Number of G-orbits on C over ext that the F_{q^2}-Frobenius maps to themselves."""
    G, C = untwist(G, C)
    d = G.order
    if d < 2 or any(d % r == 0 for r in range(2, int(d**0.5) + 1)) or len(G.generators) != 1:
        raise ValueError("quotient_point_count needs a cyclic group of prime order")
    if ext is None:
        T = G.generators[0]
        k = count_extension_degree(C, T, d)
        ext = make_field(C.ctx.p, C.ctx.k * k)
    if ext.order > cap:
        raise FieldError(f"{ext!r} exceeds the enumeration cap {cap}")
    maps = [g.lift(ext) for g in G.elements]
    total = 0
    for chunk in iter_point_chunks(C, ext, cap=cap, jobs=jobs):
        if not len(chunk):
            continue
        X, Y, Z = chunk.X, chunk.Y, chunk.Z
        key = point_keys(ext, X, Y, Z)
        fkey = point_keys(ext, *frobenius_points(C, ext, X, Y, Z))
        stable = np.zeros(key.size, dtype=bool)
        stab = np.zeros(key.size, dtype=np.int64)
        for g in maps:
            gk = key if g.is_identity() else point_keys(ext, *g.vapply(ext, X, Y, Z))
            stable |= gk == fkey
            stab += gk == key
        total += int(stab[stable].sum())
    if total % d:
        raise ArithmeticError("stabilizer sum is not divisible by |G|")
    return total // d


def genus_from_count(N: int, q: int) -> int:
    num = N - q * q - 1
    if num % (2 * q) or num < 0:
        raise ArithmeticError(f"count {N} is not q^2 + 1 + 2qg for an integer g >= 0")
    return num // (2 * q)


# --- substitution checks ------------------------------------------------------------------


def _tr_poly(F: FieldCtx, q: int, p: int) -> dict[tuple[int, int, int], int]:
    t = prime_power(q)[1]
    return {(q // p**i, 0, 0): 1 for i in range(1, t + 1)}


def quotient_model(case: str, q: int, d: int, form: str = "theorem") -> TriPoly:
    """Affine plane model (in X, Y) of the quotient; Z is unused."""
    check_case(case, q, d)
    C = model({"I": "EQ11", "II1": "M2", "II2": "EQ11", "III": "M3", "IV1": "EQ11", "IV2": "M1", "V": "M4"}[case], q)
    F = C.ctx
    p = F.p
    m1 = F.neg(1)
    if case == "I":
        return TriPoly.from_dict(F, {(0, q, 0): 1, (0, 1, 0): 1, ((q + 1) // 2, 0, 0): m1})
    if case == "II1":
        terms = {(0, q // p**i, 0): 1 for i in range(1, prime_power(q)[1] + 1)}
        terms[(q + 1, 0, 0)] = C.omega
        return TriPoly.from_dict(F, terms)
    if case == "II2":
        tr = TriPoly.from_dict(F, _tr_poly(F, q, p))
        sq = tr * tr
        lin = TriPoly.from_dict(F, {(0, q, 0): 1, (0, 1, 0): 1})
        if form == "proof":
            return lin + sq.scale(F.inv(F.from_int(2)))
        return lin - sq
    if case == "III":
        e = (q - 1) // d
        return TriPoly.from_dict(F, {(0, q, 0): 1, (2 * e, 1, 0): m1, (e, 0, 0): C.omega})
    if case == "IV1":
        return TriPoly.from_dict(F, {(0, q, 0): 1, (0, 1, 0): 1, ((q + 1) // d, 0, 0): m1})
    if case == "IV2":
        e = (q + 1) // d
        return TriPoly.from_dict(F, {(e, 0, 0): 1, (2 * e, 0, 0): 1, (0, q + 1, 0): 1})
    f = s_substitute(s_poly(q, d), q, d)
    if f.ctx is not F:
        f = f.descend(F)
    return f


def substitution_map(case: str, q: int, d: int, X: np.ndarray, Y: np.ndarray, F: FieldCtx, form: str = "theorem"):
    p = F.p
    if case in ("I",):
        return F.vpow(X, 2), Y
    if case == "II1":
        return X, F.vsub(F.vpow(Y, p), Y)
    if case == "II2":
        x2 = F.vpow(X, 2)
        xp = F.vsub(F.vpow(X, p), X)
        if form == "proof":
            return xp, F.vsub(Y, F.vmul(x2, F.inv(F.from_int(2))))
        return xp, F.vsub(x2, F.vmul(Y, F.from_int(2)))
    if case in ("III", "IV2"):
        return F.vpow(X, d), F.vmul(X, Y)
    if case == "IV1":
        return F.vpow(X, d), Y
    return F.vpow(X, d), F.vpow(Y, d)


def substitution_check(case: str, q: int, d: int, samples: int = 200, seed: int = 0, form: str = "theorem") -> bool:
    """Random affine points of the covering model land on the quotient model."""
    check_case(case, q, d)
    C = model({"I": "EQ11", "II1": "M2", "II2": "EQ11", "III": "M3", "IV1": "EQ11", "IV2": "M1", "V": "M4"}[case], q)
    F = C.ctx
    pts = point_arrays(C, F)
    aff = np.nonzero(pts.Z == 1)[0]
    rng = np.random.default_rng(seed)
    pick = aff if aff.size <= samples else rng.choice(aff, size=samples, replace=False)
    X, Y = pts.X[pick], pts.Y[pick]
    xq, yq = substitution_map(case, q, d, X, Y, F, form)
    f = quotient_model(case, q, d, form)
    vals = f.veval(xq, yq, np.ones_like(xq))
    return bool(np.all(vals == 0))


# --- reports --------------------------------------------------------------------------------


@dataclass
class GenusReport:
    case: str
    q: int
    d: int
    genus_formula: int
    genus_rh: int | None = None
    genus_count: int | None = None
    verdict: str = "partial"
    orbits: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        if not self.diagnostics:
            out.pop("diagnostics")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def _verdict(values: Sequence[int | None], ok: bool = True) -> str:
    present = [v for v in values if v is not None]
    if not ok or len(set(present)) > 1:
        return "mismatch"
    if len(present) < 2:
        return "partial"
    return "consistent"


def verify_case(case: str, q: int, d: int, cap: int = ENUM_CAP, jobs: int = 1, substitution: bool = True) -> GenusReport:
    check_case(case, q, d)
    p, _ = prime_power(q)
    rep = GenusReport(case, q, d, genus_formula(case, q, d))
    T, C = generator_T(case, q, d)
    G = closure([T], label=f"C{d}")
    if d != p:
        orb = small_orbits_on_curve(G, C)
        rep.orbits = orb.as_json()
        rep.genus_rh = rh_genus(hermitian_genus(q), d, orb.lengths)
    Gc, Cc = untwist(G, C)
    k = count_extension_degree(Cc, Gc.generators[0], d)
    if (p ** (Cc.ctx.k * k)) <= cap:
        N = quotient_point_count(Gc, Cc, make_field(p, Cc.ctx.k * k), cap=cap, jobs=jobs)
        try:
            rep.genus_count = genus_from_count(N, q)
        except ArithmeticError as e:
            rep.diagnostics.append(str(e))
    ok = not rep.diagnostics
    if substitution:
        forms = ("theorem", "proof") if case == "II2" else ("theorem",)
        for form in forms:
            if not substitution_check(case, q, d, form=form):
                ok = False
                rep.diagnostics.append(f"substitution check ({form} form) failed")
    rep.verdict = _verdict([rep.genus_formula, rep.genus_rh, rep.genus_count], ok)
    return rep


@dataclass
class SL2Report:
    kind: str
    q: int
    order: int
    genus_formula: int
    genus_rh: int
    branch: str
    orbits: list[dict]

    @property
    def verdict(self) -> str:
        return "consistent" if self.genus_formula == self.genus_rh else "mismatch"


def verify_sl2(kind: str, q: int) -> SL2Report:
    k = _resolve_kind(q, parse_kind(kind))
    G = find_tame_sl2_subgroup(q, k)
    C = model("M3", q)
    orb = small_orbits_on_curve(G, C)
    g = rh_genus(hermitian_genus(q), G.order, orb.lengths)
    formula = sl2_genus_formula(k, q)
    if k.family == "D":
        matches = [b for b, v in dihedral_branches(q, k.d, k.torus).items() if v == g]
        branch = " / ".join(matches) if matches else "none"
    elif k.family == "C":
        branch = f"{k.lift} lift"
    else:
        branch = f"q={q % 4} mod 4, q={q % 3} mod 3" + (f", q={q % 5} mod 5" if k.family == "Alt5" else "")
    return SL2Report(k.label, q, G.order, formula, g, branch, orb.as_json())


@dataclass
class SingerReport:
    q: int
    n: int
    branch: int
    i: int | None
    order: int
    genus_formula: int
    genus_rh: int
    orbits: list[dict]

    @property
    def verdict(self) -> str:
        return "consistent" if self.genus_formula == self.genus_rh else "mismatch"


def verify_singer(q: int, n: int, branch: int, i: int | None = None) -> SingerReport:
    if branch == 3 and i is None:
        i = 1
    formula = singer_genus_formula(q, n, branch, i)
    G = singer_group_for(q, n, branch, i)
    C = model("M4", q)
    orb = small_orbits_on_curve(G, C)
    g = rh_genus(hermitian_genus(q), G.order, orb.lengths)
    return SingerReport(q, n, branch, i if branch != 1 else None, G.order, formula, g, orb.as_json())
