"""Classification of Z-universal binary generalized forms over Q(sqrt D), D in {2, 3, 5, 6, 7, 10}.

Candidate quaternary forms 1+L come from shipped tables of universal forms.
Each pipeline recomputes every attribute (ranks, determinant residues, the
2-adic test) and eliminates candidates rule by rule. Witness forms G are then
checked to realize every survivor.
"""

from __future__ import annotations

import enum
import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable

from sympy import factorint
from sympy.solvers.diophantine.diophantine import sum_of_four_squares

from . import matrix as mx
from .assoc import associated_form_direct, associated_matrix_via_T, binary_associated_matrix
from .genform import BinarySextuple, GenQuadForm, Integrality, classify_integrality, eval_form, from_sextuple, is_z_valued
from .intform import (FIFTEEN, IntQuadForm, check_critical_set, format_bhargava, is_positive_definite,
                      isometry_test, one_plus, parse_bhargava, verify_transform)
from .qfield import QuadField, is_squarefree
from .twoadic import d2_filter

SUPPORTED_D = (2, 3, 5, 6, 7, 10)
DATA_ENV = "GENFORM_DATA_DIR"
RANK_PRIMES = (2, 3, 5, 7)


class DataFormatError(ValueError):
    """A data file line could not be parsed."""


# -- data files -------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    table: str
    index: int  # one-based position in its file
    det: int
    coeffs: tuple[int, ...]
    L: IntQuadForm
    printed: dict[str, int] = field(default_factory=dict)

    @property
    def bhargava(self) -> str:
        return format_bhargava(self.det, self.coeffs)


@dataclass(frozen=True)
class WitnessRow:
    D: int
    sextuple: tuple[str, ...]
    target: TableRow
    printed_q: tuple[int, ...] | None = None
    printed_matrix: tuple[tuple[int, ...], ...] | None = None
    printed_transform: tuple[tuple[int, ...], ...] | None = None
    source: str = ""

    def sextuple_obj(self) -> BinarySextuple:
        return BinarySextuple.parse(list(self.sextuple), QuadField(self.D))


@dataclass(frozen=True)
class TableRegistry:
    table1: list[TableRow]
    table2: list[WitnessRow]
    table3: list[TableRow]
    table4: list[TableRow]
    d7: list[TableRow]
    witnesses: list[WitnessRow]

    def table(self, name: str) -> list[TableRow]:
        return getattr(self, name)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_attrs(text: str, where: str) -> dict[str, str]:
    out = {}
    for part in text.split("|"):
        part = part.strip()
        if not part:
            continue
        for tok in re.findall(r"(\w+)=(\[[^\s]*\]|\S+)", part):
            out[tok[0]] = tok[1]
        if not re.fullmatch(r"(\w+=(\[[^\s]*\]|\S+)\s*)+", part):
            raise DataFormatError(f"{where}: cannot parse attributes {part!r}")
    return out


def _parse_form(text: str, table: str, index: int, where: str) -> TableRow:
    try:
        det, L = parse_bhargava(text)
    except ValueError as exc:
        raise DataFormatError(f"{where}: {exc}") from exc
    coeffs = tuple(int(t) for t in text.split(":", 1)[1].split())
    return TableRow(table, index, det, coeffs, L)


def parse_table(text: str, table: str) -> list[TableRow]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        where = f"{table}:{lineno}"
        form_text, _, rest = line.partition("|")
        row = _parse_form(form_text.strip(), table, len(rows) + 1, where)
        attrs = _parse_attrs(rest, where)
        try:
            printed = {k: int(v) for k, v in attrs.items()}
        except ValueError as exc:
            raise DataFormatError(f"{where}: non-integer attribute") from exc
        rows.append(TableRow(row.table, row.index, row.det, row.coeffs, row.L, printed))
    return rows


def parse_witnesses(text: str, table: str) -> list[WitnessRow]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        where = f"{table}:{lineno}"
        parts = [p.strip() for p in line.split("|")]
        if len(parts) < 3:
            raise DataFormatError(f"{where}: expected `D | sextuple | det: a b c d e f`")
        try:
            D = int(parts[0])
        except ValueError as exc:
            raise DataFormatError(f"{where}: bad D {parts[0]!r}") from exc
        sext = tuple(s.strip() for s in parts[1].split(","))
        if len(sext) != 6:
            raise DataFormatError(f"{where}: sextuple needs 6 entries")
        try:
            BinarySextuple.parse(list(sext), QuadField(D))
        except ValueError as exc:
            raise DataFormatError(f"{where}: {exc}") from exc
        target = _parse_form(parts[2], table, len(rows) + 1, where)
        attrs = _parse_attrs(" | ".join(parts[3:]), where)
        try:
            q = json.loads(attrs["q"]) if "q" in attrs else None
            m = json.loads(attrs["m"]) if "m" in attrs else None
            A = json.loads(attrs["A"]) if "A" in attrs else None
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{where}: {exc}") from exc
        rows.append(WitnessRow(
            D, sext, target,
            tuple(q) if q is not None else None,
            tuple(tuple(r) for r in m) if m is not None else None,
            tuple(tuple(r) for r in A) if A is not None else None,
            f"{table} row {len(rows) + 1}",
        ))
    return rows


def _read(name: str, data_dir: str | Path | None) -> str:
    base = data_dir if data_dir is not None else os.environ.get(DATA_ENV)
    if base:
        return (Path(base) / name).read_text()
    return resources.files("genforms.data").joinpath(name).read_text()


def load_tables(data_dir: str | Path | None = None) -> TableRegistry:
    """Load all tables; `data_dir` (or $GENFORM_DATA_DIR) overrides the bundled files."""
    return TableRegistry(
        table1=parse_table(_read("table1.txt", data_dir), "table1"),
        table2=parse_witnesses(_read("table2.txt", data_dir), "table2"),
        table3=parse_table(_read("table3.txt", data_dir), "table3"),
        table4=parse_table(_read("table4.txt", data_dir), "table4"),
        d7=parse_table(_read("d7.txt", data_dir), "d7"),
        witnesses=parse_witnesses(_read("witnesses.txt", data_dir), "witnesses"),
    )


# -- pipelines ----------------------------------------------------------------------

class Verdict(enum.Enum):
    SURVIVES = "SURVIVES"
    ELIMINATED = "ELIMINATED"


@dataclass
class CandidateRecord:
    det: int
    coeffs: tuple[int, ...]
    source: str
    ranks: dict[int, int]
    det_quotient_mod4: int | None
    d2: bool | None = None
    verdict: Verdict = Verdict.SURVIVES
    eliminated_by: str | None = None

    @property
    def bhargava(self) -> str:
        return format_bhargava(self.det, self.coeffs)

    def to_json(self) -> dict:
        return {
            "L": self.bhargava,
            "source": self.source,
            "ranks": {str(p): r for p, r in self.ranks.items()},
            "det_quotient_mod4": self.det_quotient_mod4,
            "d2_filter": self.d2,
            "verdict": self.verdict.value,
            "eliminated_by": self.eliminated_by,
        }


SOURCE_TABLE = {2: "table1", 3: "table3", 5: "table4", 6: "table3", 7: "d7", 10: "table4"}


def prime_divisors(D: int) -> list[int]:
    return sorted(factorint(abs(D)))


def rules_for(D: int) -> list[str]:
    """Names of the elimination rules applied for D, in order."""
    rules = ["det_divisible"]
    if D % 4 in (2, 3):
        rules.append("det_mod4")
    rules += [f"rank_mod{p}" for p in prime_divisors(D)]
    if D % 4 == 3:
        rules.append("rank_mod2_even")
    if D == 2:
        rules.append("two_adic")
    return rules


def _check_D(D: int) -> None:
    if D not in SUPPORTED_D:
        raise ValueError(f"unsupported D = {D}; expected one of {SUPPORTED_D}")


def _rule_passes(rule: str, rec: CandidateRecord, D: int, F: IntQuadForm) -> bool:
    if rule == "det_divisible":
        return rec.det % (D * D) == 0
    if rule == "det_mod4":
        return rec.det_quotient_mod4 in (0, 1)
    if rule.startswith("rank_mod") and rule[8:].isdigit():
        return rec.ranks[int(rule[8:])] <= 2
    if rule == "rank_mod2_even":
        return rec.ranks[2] % 2 == 0
    if rule == "two_adic":
        rec.d2 = d2_filter(F)
        return rec.d2
    raise AssertionError(rule)


def classify(D: int, registry: TableRegistry | None = None, trust_printed: bool = False) -> list[CandidateRecord]:
    """Run the elimination pipeline for D over its candidate table.

    With `trust_printed` the rank columns of the data file are used where present
    instead of recomputed values (the verdicts must not change).
    """
    _check_D(D)
    reg = registry or load_tables()
    out = []
    for row in reg.table(SOURCE_TABLE[D]):
        F = one_plus(row.L)
        M = F.int_matrix()
        ranks = {p: mx.rank_mod_p(M, p) for p in RANK_PRIMES}
        if trust_printed:
            for p in RANK_PRIMES:
                if f"rank{p}" in row.printed:
                    ranks[p] = row.printed[f"rank{p}"]
        det = int(F.det())
        dq = (det // (D * D)) % 4 if det % (D * D) == 0 else None
        rec = CandidateRecord(det, row.coeffs, f"{row.table} row {row.index}", ranks, dq)
        for rule in rules_for(D):
            if not _rule_passes(rule, rec, D, F):
                rec.verdict, rec.eliminated_by = Verdict.ELIMINATED, rule
                break
        out.append(rec)
    return out


def survivors(records: Iterable[CandidateRecord]) -> list[CandidateRecord]:
    return [r for r in records if r.verdict is Verdict.SURVIVES]


@dataclass(frozen=True)
class RankMismatch:
    table: str
    index: int
    L: str
    prime: int
    printed: int
    computed: int


def data_integrity(registry: TableRegistry | None = None) -> list[RankMismatch]:
    """Printed rank columns that disagree with recomputation."""
    reg = registry or load_tables()
    out = []
    for name in ("table1", "table3", "table4", "d7"):
        for row in reg.table(name):
            M = one_plus(row.L).int_matrix()
            for key, val in row.printed.items():
                if key.startswith("rank"):
                    p = int(key[4:])
                    r = mx.rank_mod_p(M, p)
                    if r != val:
                        out.append(RankMismatch(name, row.index, row.bhargava, p, val, r))
    return out


# -- witnesses ----------------------------------------------------------------------

@dataclass
class WitnessRecord:
    D: int
    sextuple: str
    target: str
    source: str
    integrality: str = ""
    integrality_ok: bool = False
    z_valued: bool = False
    paths_agree: bool = False
    matrix_match: bool | None = None
    positive_definite: bool = False
    critical_missing: list[int] | None = None
    isometry: list[list[int]] | None = None
    printed_transform_ok: bool | None = None
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (not self.errors and self.integrality_ok and self.z_valued and self.paths_agree
                and self.matrix_match is not False and self.positive_definite
                and self.critical_missing == [] and self.isometry is not None
                and self.printed_transform_ok is not False)

    def to_json(self) -> dict:
        return {
            "D": self.D, "sextuple": self.sextuple, "target": self.target, "source": self.source,
            "integrality": self.integrality, "integrality_ok": self.integrality_ok,
            "z_valued": self.z_valued, "paths_agree": self.paths_agree,
            "matrix_match": self.matrix_match, "positive_definite": self.positive_definite,
            "critical_missing": self.critical_missing, "isometry": self.isometry,
            "printed_transform_ok": self.printed_transform_ok, "errors": self.errors, "ok": self.ok,
        }


def witness_rows(D: int, registry: TableRegistry | None = None) -> list[WitnessRow]:
    _check_D(D)
    reg = registry or load_tables()
    return list(reg.table2) if D == 2 else [w for w in reg.witnesses if w.D == D]


def _q_list(M: list[list[Fraction]]) -> tuple[Fraction, ...]:
    m = len(M)
    return tuple(M[k][l] if k == l else 2 * M[k][l] for k in range(m) for l in range(k, m))


def verify_witness(w: WitnessRow) -> WitnessRecord:
    s = w.sextuple_obj()
    rec = WitnessRecord(w.D, str(s), w.target.bhargava, w.source)
    try:
        G = from_sextuple(s)
        cls = classify_integrality(G)
        rec.integrality = cls.value
        need = Integrality.CLASSICAL if w.D % 4 == 1 else Integrality.INTEGRAL
        rec.integrality_ok = cls is Integrality.CLASSICAL or cls is need
        rec.z_valued = is_z_valued(G)
        via_T = associated_matrix_via_T(G).M_Q
        rec.paths_agree = via_T == associated_form_direct(G).M_Q == binary_associated_matrix(s).M_Q
        if w.printed_matrix is not None:
            rec.matrix_match = via_T == [[Fraction(x) for x in row] for row in w.printed_matrix]
        if w.printed_q is not None:
            ok = _q_list(via_T) == tuple(Fraction(x) for x in w.printed_q)
            rec.matrix_match = ok if rec.matrix_match is None else rec.matrix_match and ok
        Q = IntQuadForm.from_matrix(via_T)
        rec.positive_definite = is_positive_definite(Q)
        if not rec.positive_definite:
            rec.errors.append("associated form is not positive definite")
            return rec
        if not Q.is_classical:
            rec.errors.append("associated form is not classical")
            return rec
        rec.critical_missing = check_critical_set(Q, FIFTEEN).missing
        target = one_plus(w.target.L)
        rec.isometry = isometry_test(Q, target)
        if w.printed_transform is not None:
            rec.printed_transform_ok = verify_transform([list(r) for r in w.printed_transform], Q, target)
    except (ValueError, ArithmeticError) as exc:
        rec.errors.append(str(exc))
    return rec


def verify_witnesses(D: int, registry: TableRegistry | None = None) -> list[WitnessRecord]:
    """Run the full verification battery on every shipped witness for D; failures are reported, not raised."""
    return [verify_witness(w) for w in witness_rows(D, registry)]


# -- four variables -------------------------------------------------------------------

def four_var_form(D: int) -> GenQuadForm:
    """sum over i of z_i^2 - z_i tau(z_i) + tau(z_i)^2."""
    K = QuadField(D)
    return GenQuadForm.create(K, 4, alpha={(i, i): 1 for i in range(4)}, beta={(i, i): -1 for i in range(4)})


def four_var_check(D: int, values: Iterable[int] = range(1, 51)) -> bool:
    """The four-variable form represents each value at rational-integer arguments."""
    if not isinstance(D, int) or D < 2 or not is_squarefree(D):
        raise ValueError(f"D must be a squarefree integer >= 2, got {D!r}")
    G = four_var_form(D)
    K = G.field
    for a in values:
        pt = [K(x) for x in sum_of_four_squares(a)]
        if eval_form(G, pt) != a:
            return False
    return True


# -- reports ------------------------------------------------------------------------

def classify_report(D: int, registry: TableRegistry | None = None) -> dict:
    reg = registry or load_tables()
    recs = classify(D, reg)
    return {
        "D": D,
        "source_table": SOURCE_TABLE[D],
        "rules": rules_for(D),
        "candidates": [r.to_json() for r in recs],
        "survivors": [r.bhargava for r in survivors(recs)],
        "data_integrity": [m.__dict__ for m in data_integrity(reg) if m.table == SOURCE_TABLE[D]],
    }


def format_classify_text(report: dict) -> str:
    rows = [("L", "source", "ranks 2/3/5/7", "det/D^2 mod 4", "2-adic", "verdict")]
    for c in report["candidates"]:
        rk = "/".join(str(c["ranks"][str(p)]) for p in RANK_PRIMES)
        dq = "-" if c["det_quotient_mod4"] is None else str(c["det_quotient_mod4"])
        d2 = "-" if c["d2_filter"] is None else ("pass" if c["d2_filter"] else "fail")
        verdict = c["verdict"] if c["eliminated_by"] is None else f"{c['verdict']} ({c['eliminated_by']})"
        rows.append((c["L"], c["source"], rk, dq, d2, verdict))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [f"D = {report['D']}: rules {', '.join(report['rules'])}"]
    lines += ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.append(f"survivors ({len(report['survivors'])}): " + "; ".join(report["survivors"]))
    for m in report["data_integrity"]:
        lines.append(f"data integrity: {m['table']} row {m['index']} ({m['L']}) printed rank mod "
                     f"{m['prime']} = {m['printed']}, computed {m['computed']}")
    return "\n".join(lines)

