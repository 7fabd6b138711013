"""Command-line front end: genus tables, per-case verification, semigroup checks."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

from .autos import CASES, parse_kind, sl2_kind_admissible
from .gf import FieldError, prime_power
from .hermitian import ENUM_CAP
from .quotient import (
    admissible_cases,
    genus_formula,
    singer_branch_admissible,
    singer_genus_formula,
    sl2_genus_formula,
    sl2_kinds,
    verify_case,
    verify_singer,
    verify_sl2,
)
from .semigroup import SemigroupError, genus_bound_checks, hyper_identity_report, s_filter_report

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2
FULL_VERIFY_MAX_Q = 13
CSV_HEADER = ["source", "q", "d", "genus", "verdict"]


class UsageError(ValueError):
    pass


@dataclass
class TableRow:
    source: str
    q: int
    param: str
    genus: int
    verification: dict = field(default_factory=dict)
    verdict: str = "partial"

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "q": self.q,
            "d": self.param,
            "genus": self.genus,
            "verification": self.verification,
            "verdict": self.verdict,
        }


def _check_q(q: int) -> None:
    try:
        prime_power(q)
    except ValueError as e:
        raise UsageError(str(e)) from e


def table_rows(q: int, cap: int = ENUM_CAP, jobs: int = 1, verify: bool | None = None) -> list[TableRow]:
    _check_q(q)
    full = q <= FULL_VERIFY_MAX_Q if verify is None else verify
    rows: list[TableRow] = []
    for case, d in admissible_cases(q):
        if full:
            rep = verify_case(case, q, d, cap=cap, jobs=jobs)
            flags = {"formula": True, "rh": rep.genus_rh is not None, "count": rep.genus_count is not None}
            rows.append(TableRow(f"Thm2.1 {case}", q, str(d), rep.genus_formula, flags, rep.verdict))
        else:
            g = genus_formula(case, q, d)
            rows.append(TableRow(f"Thm2.1 {case}", q, str(d), g, {"formula": True, "rh": False, "count": False}))
    for kind in sl2_kinds(q):
        label = parse_kind(kind).label
        if full:
            rep = verify_sl2(kind, q)
            rows.append(TableRow(f"Prop3.1 {rep.kind}", q, label, rep.genus_formula, {"formula": True, "rh": True, "count": False}, rep.verdict))
        else:
            rows.append(TableRow(f"Prop3.1 {label}", q, label, sl2_genus_formula(kind, q), {"formula": True, "rh": False, "count": False}))
    m = q * q - q + 1
    for n in range(3, m + 1):
        if m % n:
            continue
        for branch in (1, 2, 3):
            if not singer_branch_admissible(q, n, branch):
                continue
            for i in ((None,) if branch < 3 else (0, 1)):
                tag = f"Prop4.1 branch {branch}" + ("" if i is None else (" G0" if i == 0 else " G1"))
                param = f"n={n}"
                if full:
                    rep = verify_singer(q, n, branch, i)
                    rows.append(TableRow(tag, q, param, rep.genus_formula, {"formula": True, "rh": True, "count": False}, rep.verdict))
                else:
                    g = singer_genus_formula(q, n, branch, i)
                    rows.append(TableRow(tag, q, param, g, {"formula": True, "rh": False, "count": False}))
    return rows


def render_table(q: int, rows: list[TableRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"q": q, "rows": [r.to_dict() for r in rows]}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.source, r.q, r.param, r.genus, r.verdict])
    return buf.getvalue()


def cmd_table(args) -> int:
    rows = table_rows(args.q, cap=_cap(args), jobs=args.jobs)
    sys.stdout.write(render_table(args.q, rows, args.format))
    return EXIT_MISMATCH if any(r.verdict == "mismatch" for r in rows) else EXIT_OK


def cmd_verify(args) -> int:
    _check_q(args.q)
    chosen = [x is not None for x in (args.case, args.kind, args.n)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --case, --kind, --n")
    if args.case is not None:
        if args.d is None:
            raise UsageError("--case needs --d")
        try:
            rep = verify_case(args.case, args.q, args.d, cap=_cap(args), jobs=args.jobs)
        except FieldError:
            raise
        except ValueError as e:
            raise UsageError(str(e)) from e
        out = rep.to_dict()
        verdict = rep.verdict
    elif args.kind is not None:
        try:
            parse_kind(args.kind)
        except ValueError as e:
            raise UsageError(str(e)) from e
        if not sl2_kind_admissible(args.q, args.kind):
            raise UsageError(f"kind {args.kind} is not admissible for q={args.q}")
        r = verify_sl2(args.kind, args.q)
        out = {"kind": r.kind, "q": r.q, "order": r.order, "genus_formula": r.genus_formula,
               "genus_rh": r.genus_rh, "branch": r.branch, "verdict": r.verdict, "orbits": r.orbits}
        verdict = r.verdict
    else:
        branch = args.branch
        if branch is None:
            raise UsageError("--n needs --branch")
        if not singer_branch_admissible(args.q, args.n, branch):
            raise UsageError(f"branch {branch} is not admissible for q={args.q}, n={args.n}")
        r = verify_singer(args.q, args.n, branch, args.i)
        out = {"q": r.q, "n": r.n, "branch": r.branch, "i": r.i, "order": r.order,
               "genus_formula": r.genus_formula, "genus_rh": r.genus_rh, "verdict": r.verdict, "orbits": r.orbits}
        verdict = r.verdict
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_MISMATCH if verdict == "mismatch" else EXIT_OK


SEMIGROUP_CHECKS = {"S-filter": s_filter_report, "hyper-identity": hyper_identity_report, "bounds": genus_bound_checks}


def cmd_semigroup(args) -> int:
    try:
        rep = SEMIGROUP_CHECKS[args.which](args.q)
    except SemigroupError as e:
        raise UsageError(str(e)) from e
    sys.stdout.write(json.dumps(rep, indent=2) + "\n")
    return EXIT_OK if rep["pass"] else EXIT_MISMATCH


def _cap(args) -> int:
    return ENUM_CAP if args.max_ext_bits is None else 1 << args.max_ext_bits


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hermcurves", description="Genera of Hermitian quotient curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--q", type=int, required=True, help="prime power q (curves over F_{q^2})")
        p.add_argument("--max-ext-bits", type=int, default=None, help="enumeration cap as a power of two (default 23)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")

    t = sub.add_parser("table", help="genus table for one q")
    common(t)
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", help="verify one case, SL(2,q) kind or Singer subgroup")
    common(v)
    v.add_argument("--case", choices=CASES)
    v.add_argument("--d", type=int)
    v.add_argument("--kind", help="C(d,split|nonsplit[,odd|full]), D(d,split|nonsplit), Sym4, Alt4, Alt5")
    v.add_argument("--n", type=int)
    v.add_argument("--branch", type=int, choices=(1, 2, 3))
    v.add_argument("--i", type=int, choices=(0, 1, 2))
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("semigroup", help="semigroup checks")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kind", dest="which", choices=tuple(SEMIGROUP_CHECKS), required=True)
    s.set_defaults(func=cmd_semigroup)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FieldError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
