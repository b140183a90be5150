"""Command-line interface: `genforms <subcommand> ...`.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import classify as cl
from . import matrix as mx
from .assoc import (associated_form_direct, associated_matrix_via_T, det_relation_check, random_form)
from .genform import Integrality, classify_integrality, form_from_json, is_z_valued
from .genpoly import parse_genpoly, rewrite_in_generators
from .intform import (FIFTEEN, IntQuadForm, check_critical_set, load_critical_290, one_plus, parse_bhargava)
from .localglobal import DEFAULT_BUDGET, SearchBudgetExhausted, local_witnesses, represent_indefinite
from .qfield import QuadField
from .twoadic import canonical_symbol, jordan_2adic

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        print(text)


def _load_json(source: str) -> Any:
    try:
        raw = sys.stdin.read() if source == "-" else Path(source).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: invalid JSON: {exc}") from exc


def _matrix_arg(text: str) -> list[list[Fraction]]:
    data = _load_json(text) if Path(text).exists() or text == "-" else json.loads(text)
    return [[Fraction(str(x)) for x in row] for row in data]


# -- subcommands -------------------------------------------------------------------


def cmd_assoc(args: argparse.Namespace) -> int:
    if args.random:
        if args.D is None:
            raise UsageError("--random needs --D")
        rng = random.Random(args.seed)
        K = QuadField(args.D)
        bad = 0
        for _ in range(args.random):
            G = random_form(K, 2, rng)
            ok = associated_matrix_via_T(G).M_Q == associated_form_direct(G).M_Q and det_relation_check(G).holds
            bad += not ok
        _emit(args, {"D": args.D, "forms": args.random, "seed": args.seed, "failures": bad},
              f"D = {args.D}: {args.random} random forms (seed {args.seed}), {bad} failures")
        return FAILED if bad else OK
    if not args.form:
        raise UsageError("give a form file or --random N")
    G = form_from_json(_load_json(args.form))
    res = associated_matrix_via_T(G)
    direct = associated_form_direct(G)
    rel = det_relation_check(G)
    primes = cl.prime_divisors(G.field.D)
    cls = classify_integrality(G)
    ranks = {}
    if all(x.denominator == 1 for row in res.M_Q for x in row):
        ranks = {p: mx.rank_mod_p(res.M_Q, p) for p in primes}
    payload = {
        "D": G.field.D, "n": G.n, "integrality": cls.value, "z_valued": is_z_valued(G),
        "M_Q": res.M_Q, "Q": res.polynomial_text(), "paths_agree": res.M_Q == direct.M_Q,
        "det_M_Q": rel.det_MQ, "det_law_rhs": rel.det_MG_scaled, "det_law_holds": rel.holds,
        "ranks_mod_p": ranks,
    }
    text = "\n".join([
        f"D = {G.field.D}, n = {G.n}, integrality {cls.value}, Z-valued {payload['z_valued']}",
        "M_Q =", mx.format_matrix(res.M_Q),
        f"Q = {res.polynomial_text()}",
        f"det M_Q = {rel.det_MQ}; determinant law {'holds' if rel.holds else 'FAILS'} ({rel.det_MG_scaled})",
        f"substitution and T^T M_G T agree: {payload['paths_agree']}",
    ] + [f"rank(M_Q mod {p}) = {r}" for p, r in ranks.items()])
    _emit(args, payload, text)
    return OK if rel.holds and payload["paths_agree"] else FAILED


def cmd_check_universal(args: argparse.Namespace) -> int:
    if args.bhargava:
        _, L = parse_bhargava(args.bhargava)
        f, label = one_plus(L), f"1+({args.bhargava})"
    elif args.matrix:
        f, label = IntQuadForm.from_matrix(_matrix_arg(args.matrix)), "matrix"
    elif args.form:
        G = form_from_json(_load_json(args.form))
        if classify_integrality(G) is Integrality.NONINTEGRAL:
            raise UsageError("form is not integral")
        f, label = IntQuadForm.from_matrix(associated_matrix_via_T(G).M_Q), "associated form"
    else:
        raise UsageError("give --bhargava, --matrix or --form")
    crit = load_critical_290() if args.critical == "290" else FIFTEEN
    rep = check_critical_set(f, crit)
    payload = {"form": label, "critical_set": crit.label, "all_represented": rep.all_represented,
               "missing": rep.missing, "witnesses": {str(k): list(v) for k, v in rep.witnesses.items()}}
    lines = [f"{label}: critical set {crit.label}"]
    lines += [f"  {a:>4} = Q{tuple(rep.witnesses[a])}" for a in crit.values if a in rep.witnesses]
    lines.append("all represented" if rep.all_represented else f"missing: {rep.missing}")
    _emit(args, payload, "\n".join(lines))
    return OK if rep.all_represented else FAILED


def cmd_classify(args: argparse.Namespace) -> int:
    reg = cl.load_tables(args.data_dir)
    report = cl.classify_report(args.D, reg)
    _emit(args, report, cl.format_classify_text(report))
    return OK


def cmd_verify_witnesses(args: argparse.Namespace) -> int:
    reg = cl.load_tables(args.data_dir)
    recs = cl.verify_witnesses(args.D, reg)
    payload = {"D": args.D, "witnesses": [r.to_json() for r in recs], "failures": sum(not r.ok for r in recs)}
    lines = []
    for r in recs:
        status = "ok" if r.ok else "FAILED"
        lines.append(f"{r.source}: G = {r.sextuple} -> 1+({r.target}) {status}")
        if not r.ok:
            lines.append(f"    {json.dumps(_jsonable(r.to_json()))}")
    lines.append(f"{len(recs) - payload['failures']}/{len(recs)} witnesses verified")
    _emit(args, payload, "\n".join(lines))
    return FAILED if payload["failures"] else OK


def cmd_represent_indef(args: argparse.Namespace) -> int:
    if args.budget <= 0:
        raise UsageError("--budget must be positive")
    try:
        sol = represent_indefinite(args.D, args.a, args.budget)
    except SearchBudgetExhausted as exc:
        print(str(exc), file=sys.stderr)
        return FAILED
    x, y, z, w = sol
    value = x * x + y * y - args.D * (z * z + w * w)
    trace = [] if args.a == 0 else local_witnesses(args.D, args.a)
    payload = {"D": args.D, "a": args.a, "witness": list(sol), "verified": value == args.a,
               "local": [{"p": t.p, "modulus": t.modulus, "branch": t.branch, "k": t.k,
                          "tuple": list(t.tuple), "target": t.target} for t in trace]}
    lines = [f"x^2 + y^2 - {args.D}z^2 - {args.D}w^2 = {args.a} at (x, y, z, w) = {sol}"]
    lines += [f"  p = {t.p}: {t.branch}; residues {t.tuple} mod {t.modulus} (a = {t.p}^{2 * t.k} * {t.target})"
              for t in trace]
    _emit(args, payload, "\n".join(lines))
    return OK if payload["verified"] else FAILED


def cmd_rewrite(args: argparse.Namespace) -> int:
    g = parse_genpoly(_load_json(args.poly))
    h = rewrite_in_generators(g)
    ok = h.to_genpoly(g.field) == g
    payload = {"D": g.field.D, "n": g.n, "generators": str(h), "round_trip": ok}
    _emit(args, payload, f"{h}\nround trip: {'ok' if ok else 'FAILED'}")
    return OK if ok else FAILED


def cmd_two_adic(args: argparse.Namespace) -> int:
    if args.bhargava:
        _, L = parse_bhargava(args.bhargava)
        f: IntQuadForm | list = one_plus(L)
    elif args.matrix:
        f = _matrix_arg(args.matrix)
    else:
        raise UsageError("give --matrix or --bhargava")
    blocks = jordan_2adic(f)
    sym = canonical_symbol(f)
    payload = {"symbol": str(sym), "oddity": sym.oddity,
               "blocks": [{"scale": b.scale, "unit": b.unit, "precision": b.precision} for b in blocks]}
    lines = [f"scale {b.scale}: {list(map(list, b.unit))} (mod 2^{b.precision})" for b in blocks]
    lines.append(f"canonical symbol {sym}")
    _emit(args, payload, "\n".join(lines))
    return OK


# -- parser ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit with status 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def build_parser() -> argparse.ArgumentParser:
    def common(parser: argparse.ArgumentParser, default: Any) -> None:
        # accepted before or after the subcommand
        parser.add_argument("--data-dir", default=default if default is argparse.SUPPRESS else None,
                            help="directory with table files (default: $GENFORM_DATA_DIR or bundled data)")
        parser.add_argument("--seed", type=int, default=default if default is argparse.SUPPRESS else 0,
                            help="seed for randomized checks (default 0)")

    p = _Parser(prog="genforms", description="Generalized quadratic forms over real quadratic fields.")
    common(p, None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--format", choices=("text", "json"), default="text")
        common(sp, argparse.SUPPRESS)

    sp = sub.add_parser("assoc", help="associated form M_Q, determinant law and ranks")
    sp.add_argument("form", nargs="?", help="JSON form file ('-' for stdin)")
    sp.add_argument("--random", type=int, metavar="N", help="check N random binary forms instead")
    sp.add_argument("--D", type=int)
    fmt(sp)
    sp.set_defaults(func=cmd_assoc)

    sp = sub.add_parser("check-universal", help="critical-set test of a positive definite classical form")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--bhargava", help='ternary L as "det: a b c d e f"; the form tested is 1+L')
    g.add_argument("--matrix", help="matrix M_Q as JSON (inline or file)")
    g.add_argument("--form", help="generalized form JSON file; its associated form is tested")
    sp.add_argument("--critical", choices=("15", "290"), default="15")
    fmt(sp)
    sp.set_defaults(func=cmd_check_universal)

    sp = sub.add_parser("classify", help="run the elimination pipeline for D")
    sp.add_argument("--D", type=int, required=True, choices=cl.SUPPORTED_D)
    fmt(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify-witnesses", help="verify the shipped witness forms for D")
    sp.add_argument("--D", type=int, required=True, choices=cl.SUPPORTED_D)
    fmt(sp)
    sp.set_defaults(func=cmd_verify_witnesses)

    sp = sub.add_parser("represent-indef", help="solve x^2 + y^2 - D z^2 - D w^2 = a")
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search bound on z^2 + w^2")
    fmt(sp)
    sp.set_defaults(func=cmd_represent_indef)

    sp = sub.add_parser("rewrite", help="rewrite a Q-valued polynomial in the generators u_r, v_r")
    sp.add_argument("poly", help="JSON polynomial file ('-' for stdin)")
    fmt(sp)
    sp.set_defaults(func=cmd_rewrite)

    sp = sub.add_parser("two-adic", help="Jordan splitting and canonical 2-adic symbol")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--matrix", help="symmetric matrix as JSON (inline or file)")
    g.add_argument("--bhargava", help="ternary L; the form analysed is 1+L")
    fmt(sp)
    sp.set_defaults(func=cmd_two_adic)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"genforms {args.command}: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
