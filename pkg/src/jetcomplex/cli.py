"""Command line interface: ``jetcomplex analyze|complex|hp|verify-cf|wfamily``.

System files are JSON::

    {"schema_version": "1",
     "variables": ["x", "y"], "unknowns": ["u"],
     "equations": [{"terms": [{"unknown": "u", "variable": "x", "coeff": "1"}]}]}

Coefficients are integers or "p/q" strings.  A file may instead hold
``{"builtin": "cauchy-fueter"}``; builtin names are also accepted directly
in place of a path.

Exit codes: 0 pass, 1 a verdict failed, 2 input error, 3 cutoff under --strict.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .cauchyfueter import MODULAR_K_MAX, cf_system, degree7_certificate, exactness_dims
from .complexbuilder import (DEFAULT_MAX_DEG, DEFAULT_MODULAR_THRESHOLD, RationalFitError, SizeGuardError,
                             build_complex, hilbert_series, syzygy_generators, SymbolMatrix)
from .involution import is_involutive
from .jets import PDESystem, tableau_dim
from .wfamily import IndexSetError, formula_validated, make_wsystem, wdim_formula, wtorsion_conditions

SCHEMA_VERSION = "1"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_CUTOFF = 0, 1, 2, 3

log = logging.getLogger("jetcomplex")


class SystemParseError(ValueError):
    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position


# ---------------------------------------------------------------------------
# parsing and printing

_COEFF = re.compile(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*")
_WFAMILY = re.compile(r"^wfamily:\s*(\d+)\s*,\s*(\d+)\s*,\s*\[(.*)\]\s*$")
_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_pairs(text: str) -> List[Tuple[int, int]]:
    """Pairs written as "(j0,j);(j0,j)" or "(j0,j),(j0,j)"."""
    pairs = [(int(a), int(b)) for a, b in _PAIR.findall(text)]
    leftover = _PAIR.sub("", text).replace(",", "").replace(";", "").strip()
    if leftover or not pairs:
        raise SystemParseError(f"cannot read index pairs from {text!r}")
    return pairs


def builtin_system(name: str) -> PDESystem:
    name = name.strip()
    if name == "cauchy-fueter":
        return cf_system()
    m = _WFAMILY.match(name)
    if m:
        n, mm = int(m.group(1)), int(m.group(2))
        try:
            return make_wsystem(n, mm, parse_pairs(m.group(3))).base
        except IndexSetError as exc:
            raise SystemParseError(str(exc), "builtin") from exc
    raise SystemParseError(f"unknown builtin {name!r}", "builtin")


def parse_coeff(value: Any, position: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SystemParseError(f"coefficient must be an integer or a \"p/q\" string, got {value!r}", position)
    if isinstance(value, int):
        return Fraction(value)
    if not _COEFF.fullmatch(value):
        raise SystemParseError(f"malformed coefficient {value!r}", position)
    try:
        return Fraction(value.replace(" ", ""))
    except ZeroDivisionError:
        raise SystemParseError(f"zero denominator in coefficient {value!r}", position) from None


def _names(doc: Dict[str, Any], key: str) -> List[str]:
    names = doc.get(key)
    if not isinstance(names, list) or not names or not all(isinstance(x, str) and x for x in names):
        raise SystemParseError(f"'{key}' must be a non-empty list of names", key)
    dup = sorted({x for x in names if names.count(x) > 1})
    if dup:
        raise SystemParseError(f"duplicate names {dup}", key)
    return names


def system_from_document(doc: Any) -> PDESystem:
    if not isinstance(doc, dict):
        raise SystemParseError("top level must be a JSON object")
    if "builtin" in doc:
        return builtin_system(str(doc["builtin"]))
    version = doc.get("schema_version", SCHEMA_VERSION)
    if str(version) != SCHEMA_VERSION:
        raise SystemParseError(f"unsupported schema_version {version!r}", "schema_version")
    variables = _names(doc, "variables")
    unknowns = _names(doc, "unknowns")
    vpos = {v: j for j, v in enumerate(variables)}
    upos = {u: i for i, u in enumerate(unknowns)}
    eqs = doc.get("equations")
    if not isinstance(eqs, list):
        raise SystemParseError("'equations' must be a list", "equations")
    terms_out = []
    for m, eq in enumerate(eqs):
        where = f"equations[{m}]"
        terms = eq.get("terms") if isinstance(eq, dict) else None
        if not isinstance(terms, list) or not terms:
            raise SystemParseError("empty equation: at least one term required", where)
        out = []
        for t, term in enumerate(terms):
            tw = f"{where}.terms[{t}]"
            if not isinstance(term, dict):
                raise SystemParseError("term must be an object", tw)
            u, v = term.get("unknown"), term.get("variable")
            if u not in upos:
                raise SystemParseError(f"unknown name {u!r}", tw + ".unknown")
            if v not in vpos:
                raise SystemParseError(f"unknown variable {v!r}", tw + ".variable")
            out.append((upos[u], vpos[v], parse_coeff(term.get("coeff", "1"), tw + ".coeff")))
        terms_out.append(out)
    try:
        return PDESystem.from_terms(len(unknowns), len(variables), terms_out, label=doc.get("label", ""),
                                    variable_names=tuple(variables), unknown_names=tuple(unknowns))
    except ValueError as exc:
        raise SystemParseError(str(exc), "equations") from exc


def parse_system(source: str) -> PDESystem:
    """Builtin alias, path to a JSON file, or inline JSON text."""
    text = source.strip()
    if text == "cauchy-fueter" or text.startswith("wfamily:"):
        return builtin_system(text)
    if not text.startswith("{"):
        if not os.path.exists(source):
            raise SystemParseError(f"no such file or builtin: {source!r}")
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return system_from_document(doc)


def _coeff_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def system_to_document(sys: PDESystem) -> Dict[str, Any]:
    eqs = []
    for m in range(sys.equations):
        terms = [{"unknown": sys.unknown_names[i], "variable": sys.variable_names[j], "coeff": _coeff_text(c)}
                 for i in range(sys.unknowns) for j in range(sys.variables)
                 for c in [sys.coeffs[m][i][j]] if c]
        eqs.append({"terms": terms})
    doc = {"schema_version": SCHEMA_VERSION, "variables": list(sys.variable_names),
           "unknowns": list(sys.unknown_names), "equations": eqs}
    if sys.label:
        doc["label"] = sys.label
    return doc


def format_system(sys: PDESystem) -> str:
    return json.dumps(system_to_document(sys), indent=2)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Section:
    title: str
    data: Dict[str, Any]
    lines: List[str] = field(default_factory=list)


@dataclass
class ReportDocument:
    command: str
    meta: Dict[str, Any]
    sections: List[Section] = field(default_factory=list)
    failed: bool = False
    cutoff: bool = False

    def add(self, title: str, data: Dict[str, Any], lines: Sequence[str]) -> None:
        self.sections.append(Section(title, data, list(lines)))

    def to_json(self) -> Dict[str, Any]:
        return {"command": self.command, "meta": self.meta, "failed": self.failed, "cutoff": self.cutoff,
                "sections": {s.title: s.data for s in self.sections}}

    def render(self) -> str:
        out = [f"jetcomplex {self.command}  " + "  ".join(f"{k}={v}" for k, v in self.meta.items())]
        for s in self.sections:
            out.append("")
            out.append(f"== {s.title} ==")
            out.extend(s.lines)
        out.append("")
        out.append("RESULT: " + ("FAIL" if self.failed else "PASS") + ("  (cutoff reached)" if self.cutoff else ""))
        return "\n".join(out)

    def exit_code(self, strict: bool = False) -> int:
        if self.failed:
            return EXIT_FAIL
        if strict and self.cutoff:
            return EXIT_CUTOFF
        return EXIT_PASS


def _table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> List[str]:
    cols = [list(map(str, header))] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[c]) for r in cols) for c in range(len(header))]
    return ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cols]


def _meta(**kw) -> Dict[str, Any]:
    return {"version": __version__, **kw}


def _system_section(report: ReportDocument, sys: PDESystem) -> None:
    lines = [f"{sys.equations} equations, {sys.unknowns} unknowns, {sys.variables} variables"]
    lines += [f"  {sys.equation_text(m)}" for m in range(sys.equations)]
    report.add("system", {"label": sys.label, "equations": sys.equations, "unknowns": sys.unknowns,
                          "variables": sys.variables, "variable_names": list(sys.variable_names),
                          "unknown_names": list(sys.unknown_names)}, lines)


def cmd_analyze(sys: PDESystem, samples: int = 20, seed: int = 0, qmax: int = 3) -> ReportDocument:
    report = ReportDocument("analyze", _meta(seed=seed, samples=samples))
    _system_section(report, sys)
    dims = [tableau_dim(sys, q) for q in range(qmax + 1)]
    report.add("tableau dimensions", {"dims": dims}, _table(["q", "dim A^q"], list(enumerate(dims))))
    rep = is_involutive(sys, samples, seed)
    cartan_rows = [("A^0", rep.restricted_min[0])] + [(f"A^0_{j}", d) for j, d in enumerate(rep.restricted_min[1:], 1)]
    lines = _table(["space", "dim"], cartan_rows)
    lines += [f"lhs dim A^1 = {rep.lhs}; rhs_min = {rep.rhs_min} over {rep.samples} coordinate samples (seed {seed})",
              f"verdict: {rep.verdict}"]
    report.add("cartan test", {"lhs": rep.lhs, "rhs_min": rep.rhs_min, "restricted": list(rep.restricted_min),
                               "rhs_samples": [{"seed": s, "rhs": r} for s, r in rep.rhs_samples],
                               "involutive": rep.involutive, "verdict": rep.verdict}, lines)
    return report


def _component_names(stage: int, count: int, sys: PDESystem) -> List[str]:
    if stage == 0:
        return list(sys.unknown_names)
    return [f"F{stage}_{m + 1}" for m in range(count)]


def cmd_complex(sys: PDESystem, max_deg: int = DEFAULT_MAX_DEG, max_len: Optional[int] = None,
                seed: int = 0) -> ReportDocument:
    chain = build_complex(sys, max_deg=max_deg, max_len=max_len, seed=seed)
    report = ReportDocument("complex", _meta(seed=seed, max_degree=max_deg,
                                             max_length=max_len if max_len is not None else sys.variables + 1))
    _system_section(report, sys)
    lines = [f"sizes: {' -> '.join(map(str, chain.sizes))}", f"orders: {tuple(chain.orders)}"]
    ops = []
    for s, op in enumerate(chain.operators):
        names = _component_names(s, op.ncols, sys)
        rows = [op.row_text(m, sys.variable_names, names) for m in range(op.nrows)]
        lines.append(f"operator {s} (order {op.order()}): {op.ncols} -> {op.nrows} components "
                     f"F{s + 1}_1..F{s + 1}_{op.nrows}")
        lines += [f"  F{s + 1}_{m + 1}: {r}" for m, r in enumerate(rows)]
        ops.append({"order": op.order(), "inputs": op.ncols, "outputs": op.nrows, "rows": rows})
    lines += chain.notes
    report.cutoff = chain.cutoff_reached
    report.add("complex", {"sizes": chain.sizes, "orders": chain.orders, "operators": ops,
                           "terminated": chain.terminated, "cutoff_reached": chain.cutoff_reached,
                           "notes": chain.notes}, lines)
    return report


def cmd_hp(sys: PDESystem, terms: Optional[int] = None, override: bool = False) -> ReportDocument:
    n = sys.variables
    need = 2 * (n + 2)
    if terms is None:
        terms = need
    if terms < need and not override:
        raise ValueError(f"need at least {need} terms for {n} variables (use --allow-short-series to override)")
    if terms < 1:
        raise ValueError("need at least one term")
    report = ReportDocument("hp", _meta(terms=terms))
    _system_section(report, sys)
    dims = [tableau_dim(sys, q) for q in range(terms)]
    max_order = min(n + 1, terms // 2)
    lines = [f"dims: {', '.join(map(str, dims))}"]
    data: Dict[str, Any] = {"dims": dims, "max_order": max_order}
    try:
        series = hilbert_series(dims, max_order)
    except RationalFitError as exc:
        report.failed = True
        lines.append(str(exc))
        data["error"] = str(exc)
    else:
        lines.append(f"series: {series}")
        lines.append(f"verified terms: {series.verified_terms}")
        data.update(series=str(series), numerator=[str(c) for c in series.numerator],
                    denominator=[str(c) for c in series.denominator], verified_terms=series.verified_terms)
    report.add("hilbert-poincare series", data, lines)
    return report


def cmd_verify_cf(kmax: int = 3, modular_threshold: int = DEFAULT_MODULAR_THRESHOLD, prime_trials: int = 2,
                  seed: int = 0) -> ReportDocument:
    if not 0 <= kmax <= MODULAR_K_MAX:
        raise ValueError(f"kmax must lie in [0, {MODULAR_K_MAX}]; the certificate needs only k = 0..7")
    report = ReportDocument("verify-cf", _meta(seed=seed, kmax=kmax, modular_threshold=modular_threshold,
                                               prime_trials=prime_trials))
    rows, data = [], []
    for k in range(kmax + 1):
        t0 = time.time()
        r = exactness_dims(k, modular_threshold=modular_threshold, prime_trials=prime_trials, seed=seed)
        if not r.passed:
            report.failed = True
        method = "/".join("mod" if m else "Q" for m in r.modular)
        rows.append((k, " ".join(map(str, r.spaces)), " ".join(map(str, r.ranks)), r.kernels[0],
                     "yes" if all(r.exact_middle) else "NO", "yes" if r.surjective else "NO", method,
                     f"{time.time() - t0:.1f}s"))
        data.append({"k": k, "spaces": r.spaces, "ranks": r.ranks, "cf_kernel": r.kernels[0],
                     "exact_middle": r.exact_middle, "surjective": r.surjective,
                     "cf_kernel_matches_formula": r.cf_kernel_matches_formula, "modular": r.modular,
                     "prime_trials": prime_trials if any(r.modular) else 0})
    report.add("jet-level exactness", {"rows": data},
               _table(["k", "spaces", "ranks", "ker CF", "exact", "onto", "rank", "time"], rows))
    cert = degree7_certificate()
    report.add("degree-7 certificate", {"values": list(cert.values), "eighth_difference": cert.eighth_difference,
                                        "passed": cert.passed},
               [f"P(0..7) = {list(cert.values)}", f"8th finite difference = {cert.eighth_difference}",
                "P has degree <= 7 and eight zeros, so P = 0" if cert.passed else "certificate FAILED"])
    report.failed = report.failed or not cert.passed
    return report


def cmd_wfamily(n: int, m: int, pairs: Sequence[Tuple[int, int]], qmax: int = 3,
                max_deg: int = 2) -> ReportDocument:
    ws = make_wsystem(n, m, pairs)
    report = ReportDocument("wfamily", _meta(n=n, m=m, pairs=list(ws.index_set.pairs), qmax=qmax))
    _system_section(report, ws.base)
    t = ws.index_set.t
    validated = formula_validated(n, m, t)
    rows, data = [], []
    for q in range(qmax + 1):
        brute = tableau_dim(ws.base, q)
        formula = wdim_formula(n, m, t, q)
        ok = brute == formula
        if validated and not ok:
            report.failed = True
        rows.append((q, formula, brute, "yes" if ok else "no"))
        data.append({"q": q, "formula": formula, "kernel": brute, "equal": ok})
    lines = _table(["q", "formula", "kernel", "equal"], rows)
    if not validated:
        lines.append("closed form outside its validated range (m+n-2t-1 < 0); kernel values are authoritative")
    report.add("tableau dimensions", {"rows": data, "formula_validated": validated}, lines)
    conds = wtorsion_conditions(ws)
    stage = syzygy_generators(SymbolMatrix.from_system(ws.base), max_deg)
    found = stage.count(2) if max_deg >= 2 else None
    if found is not None and found != len(conds):
        report.failed = True
    lines = [f"{len(conds)} conditions (one per 3-subset of the j-set); degree-2 syzygies found: {found}"]
    lines += [f"  {c.triple}: {c.expression}" for c in conds]
    report.add("torsion conditions", {"count": len(conds), "syzygies_degree2": found,
                                      "conditions": [{"triple": c.triple, "expression": c.expression}
                                                     for c in conds]}, lines)
    return report


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--strict", action="store_true", help="exit 3 when a cutoff flag is raised")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="jetcomplex", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="tableau dimensions and the Cartan test")
    a.add_argument("system")
    a.add_argument("--samples", type=int, default=20)
    a.add_argument("--qmax", type=int, default=3)

    c = sub.add_parser("complex", parents=[common], help="compatibility complex via graded syzygies")
    c.add_argument("system")
    c.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEG)
    c.add_argument("--max-length", type=int, default=None)

    h = sub.add_parser("hp", parents=[common], help="Hilbert-Poincare series of the tableau dimensions")
    h.add_argument("system")
    h.add_argument("--terms", type=int, default=None)
    h.add_argument("--allow-short-series", action="store_true", help="accept fewer than 2(n+2) terms")

    v = sub.add_parser("verify-cf", parents=[common], help="jet-level exactness of the Cauchy-Fueter complex")
    v.add_argument("--kmax", type=int, default=3)
    v.add_argument("--modular-threshold", type=int, default=DEFAULT_MODULAR_THRESHOLD)
    v.add_argument("--prime-trials", type=int, default=2)

    w = sub.add_parser("wfamily", parents=[common], help="a member of the two-unknown family")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--pairs", required=True, help='e.g. "(1,1);(2,2)"')
    w.add_argument("--qmax", type=int, default=3)
    return p


def run(args: argparse.Namespace) -> ReportDocument:
    if args.command == "analyze":
        return cmd_analyze(parse_system(args.system), samples=args.samples, seed=args.seed, qmax=args.qmax)
    if args.command == "complex":
        return cmd_complex(parse_system(args.system), max_deg=args.max_degree, max_len=args.max_length,
                           seed=args.seed)
    if args.command == "hp":
        return cmd_hp(parse_system(args.system), terms=args.terms, override=args.allow_short_series)
    if args.command == "verify-cf":
        return cmd_verify_cf(kmax=args.kmax, modular_threshold=args.modular_threshold,
                             prime_trials=args.prime_trials, seed=args.seed)
    if args.command == "wfamily":
        return cmd_wfamily(args.n, args.m, parse_pairs(args.pairs), qmax=args.qmax)
    raise ValueError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        report = run(args)
    except (SystemParseError, IndexSetError, ValueError, SizeGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report.to_json(), indent=2, default=str))
    else:
        print(report.render())
    return report.exit_code(args.strict)
