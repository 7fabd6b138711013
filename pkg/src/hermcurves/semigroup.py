"""Numerical semigroups: generators, gaps, the set S at non-rational points, and the divide filter."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from functools import reduce
from typing import Iterable, Sequence


class SemigroupError(ValueError):
    pass


@dataclass(frozen=True)
class NumSemigroup:
    """Members below the conductor plus the tail [conductor, oo)."""

    elements: tuple[int, ...]  # sorted, all members < conductor, then the conductor itself
    conductor: int
    generators: tuple[int, ...] | None = None

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        return n >= self.conductor or n in self._small

    @property
    def _small(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def gaps(self) -> list[int]:
        s = self._small
        return [n for n in range(1, self.conductor) if n not in s]

    @property
    def genus(self) -> int:
        return len(self.gaps)

    def members_upto(self, bound: int) -> list[int]:
        return [n for n in range(bound + 1) if n in self]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NumSemigroup):
            return NotImplemented
        return self.conductor == other.conductor and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.conductor, self.elements))

    def to_dict(self) -> dict:
        return {
            "small_elements": [n for n in self.elements if n < self.conductor],
            "conductor": self.conductor,
            "genus": self.genus,
            "gaps": self.gaps,
        }


def from_membership(members: Iterable[int], conductor: int, generators: Sequence[int] | None = None, check: bool = True) -> NumSemigroup:
    small = sorted({n for n in members if 0 <= n < conductor})
    if conductor > 0 and (not small or small[0] != 0):
        raise SemigroupError("0 must be a member")
    if conductor > 0 and (conductor - 1) in small:
        raise SemigroupError("conductor is not minimal")
    S = NumSemigroup(tuple(small) + (conductor,), conductor, tuple(generators) if generators else None)
    if check:
        verify_closure(S)
    return S


def verify_closure(S: NumSemigroup) -> None:
    """a, b in S implies a + b in S, checked for sums below 2 * conductor."""
    mem = S.members_upto(2 * S.conductor)
    for i, a in enumerate(mem):
        for b in mem[i:]:
            if a + b > 2 * S.conductor:
                break
            if a + b not in S:
                raise SemigroupError(f"{a} + {b} = {a + b} is not a member")


def from_generators(gens: Sequence[int]) -> NumSemigroup:
    gens = sorted({int(g) for g in gens})
    if not gens or gens[0] <= 0:
        raise SemigroupError("generators must be positive integers")
    if reduce(gcd, gens) != 1:
        raise SemigroupError("gcd of the generators is not 1")
    m = gens[0]
    member = [True]
    run = 1 if m == 1 else 0
    n = 0
    # grow until m consecutive members appear; then everything beyond is a member
    while run < m:
        n += 1
        ok = any(n >= g and member[n - g] for g in gens)
        member.append(ok)
        run = run + 1 if ok else 0
    conductor = n - m + 1
    return from_membership((i for i, v in enumerate(member) if v), conductor, _minimal_generators(gens), check=False)


def _minimal_generators(gens: Sequence[int]) -> list[int]:
    out: list[int] = []
    for g in sorted(gens):
        reach = {0}
        for x in range(1, g + 1):
            if any(x - h in reach for h in out if x >= h):
                reach.add(x)
        if g not in reach:
            out.append(g)
    return out


def semigroup_S(q: int) -> NumSemigroup:
    """S = union_{j=1}^{q-2} [jq - (j-1), jq], together with 0 and [q^2 - 2q + 2, oo)."""
    if q < 3:
        raise SemigroupError("S needs q >= 3")
    members = {0}
    for j in range(1, q - 1):
        members.update(range(j * q - (j - 1), j * q + 1))
    c = q * q - 2 * q + 2
    while c - 1 in members:
        c -= 1
    return from_membership(members, c)


def filter_divide(S: NumSemigroup, d: int) -> NumSemigroup:
    """{h / d : h in S, d | h}."""
    if d <= 0:
        raise SemigroupError("d must be positive")
    if d == 1:
        return S
    c = -(-S.conductor // d)
    members = [h // d for h in S.members_upto(c * d) if h % d == 0]
    while c > 0 and (c - 1) in members:
        c -= 1
    return from_membership(members, c, check=True)


def nongap(S: NumSemigroup, i: int) -> int:
    """The i-th smallest positive member."""
    if i < 1:
        raise SemigroupError("i must be at least 1")
    n = 0
    while i:
        n += 1
        if n in S:
            i -= 1
    return n


def genus_bound_checks(q: int) -> dict:
    """Genus landmarks for F_{q^2}-maximal curves and the orderings between them."""
    if q < 3:
        raise SemigroupError("bounds need q >= 3")
    g1 = q * (q - 1) // 2
    g2 = (q - 1) ** 2 // 4
    g3 = (q * q - q + 4) // 6
    lo = -(-(q - 1) * (q - 2) // 6)
    checks = {"g2 < g1": g2 < g1}
    if q >= 5:
        checks["interval (ceil((q-1)(q-2)/6), g2) nonempty"] = g2 - lo >= 2
    out = {
        "q": q,
        "g1": g1,
        "g2": g2,
        "g3_candidate": g3,
        "interval": [lo, g2],
    }
    if q % 2 == 0:
        out["even_family_genus"] = q * (q - 2) // 4
        checks["q(q-2)/4 equals g2"] = out["even_family_genus"] == g2
    if q % 3 == 2:
        out["family_genus"] = (q - 1) * (q - 2) // 6
        fg = filter_divide(semigroup_S(q), 3).genus
        out["filter_genus"] = fg
        checks["filter genus = (q^2-q-2)/6"] = fg == (q * q - q - 2) // 6
        checks["filter genus < g3"] = fg < g3
    out["degenerate"] = g3 >= g2
    out["checks"] = checks
    out["pass"] = all(checks.values())
    return out


def s_filter_report(q: int) -> dict:
    if q < 5 or q % 3 != 2:
        raise SemigroupError("the S filter applies to q = 2 mod 3, q >= 5")
    T = filter_divide(semigroup_S(q), 3)
    genus, m1 = T.genus, nongap(T, 1)
    ok = genus == (q * q - q - 2) // 6 and m1 == (2 * q - 1) // 3
    return {"q": q, "semigroup": T.to_dict(), "genus": genus, "m1": m1, "pass": ok}


def hyper_identity_report(q: int) -> dict:
    if q < 4 or q % 3 != 1:
        raise SemigroupError("the identity applies to q = 1 mod 3")
    lhs = filter_divide(from_generators([q, q + 1]), 3)
    rhs = from_generators([(2 * q + 1) // 3, q, q + 1])
    ok = lhs == rhs and lhs.genus == (q * q - q) // 6
    return {
        "q": q,
        "generators": [(2 * q + 1) // 3, q, q + 1],
        "semigroup": lhs.to_dict(),
        "match": lhs == rhs,
        "genus": lhs.genus,
        "m1": nongap(lhs, 1),
        "pass": ok,
    }
