"""File-driven command line: parse arrangements, run computations, render.

Input grammar (line oriented, `#` starts a comment, blank lines ignored):

    toric <n>        | hyperplane <n>      | strata <n>
    eq <i1> ... <in> : <p>/<q>             (toric, hyperplane)
    stratum <codim> <localdim> : <p>:<dim>:<weight> ...   (strata)

For toric files the fraction is the phase t of a = exp(2 pi i t); for
hyperplane files it is the constant term.  Fractions must be reduced with
positive denominator.  The `strata` kind feeds synthetic stratum data
straight into the purity and certificate machinery.

Exit codes: 0 success, 1 malformed input or usage, 2 mathematically
refused certificate.  All output goes to standard output and is
byte-reproducible; equations are canonicalized (sorted) before any
computation, so permuting input lines cannot change any result.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from stratiform.leraymodel import (
    DegenerationUnknown,
    FormalityCertificate,
    StrataData,
    Stratum,
    assemble_e2,
    betti_and_poincare,
    formality_certificate,
    purity_hypothesis_check,
    strata_data_from_hyperplanes,
    strata_data_from_toric,
)
from stratiform.matroidos import affine_intersection_poset
from stratiform.morganmodel import (
    build_model,
    builder_projective_line_marked,
    cohomology_of_model,
    extract_cokernel_model,
    extract_kernel_model,
    kunneth_product,
    negate_gysin_block,
    verify_cdga_axioms,
)
from stratiform.toriclayers import ToricHypersurface, build_layer_poset, mod1

INF = math.inf

_FRACTION = re.compile(r"^(-?\d+)/(\d+)$")
_COH_ENTRY = re.compile(r"^(\d+):(\d+):(\d+)$")


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__("line %d: %s" % (line_no, message))


@dataclass(frozen=True)
class Equation:
    coeffs: tuple[int, ...]
    constant: Fraction
    label: int


@dataclass(frozen=True)
class SyntheticStratum:
    codim: int
    local_dim: int
    cohomology: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class ArrangementFile:
    kind: str
    dim: int
    equations: tuple[Equation, ...] = ()
    strata: tuple[SyntheticStratum, ...] = field(default=())


def _parse_fraction(token: str, line_no: int) -> Fraction:
    m = _FRACTION.match(token)
    if not m:
        raise ParseError(line_no, "expected a fraction p/q, got %r" % token)
    p, q = int(m.group(1)), int(m.group(2))
    if q == 0:
        raise ParseError(line_no, "fraction with denominator 0")
    if gcd(abs(p), q) != 1:
        raise ParseError(line_no, "fraction %s is not reduced" % token)
    return Fraction(p, q)


def parse_arrangement_file(text: str) -> ArrangementFile:
    kind = None
    dim = 0
    equations: list[Equation] = []
    strata: list[SyntheticStratum] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if kind is None:
            if tokens[0] not in ("toric", "hyperplane", "strata") or len(tokens) != 2:
                raise ParseError(line_no, "expected header 'toric <n>', 'hyperplane <n>' or 'strata <n>'")
            kind = tokens[0]
            try:
                dim = int(tokens[1])
            except ValueError:
                raise ParseError(line_no, "ambient dimension must be an integer") from None
            if dim < 1:
                raise ParseError(line_no, "ambient dimension must be at least 1")
            continue
        if kind in ("toric", "hyperplane"):
            if tokens[0] != "eq":
                raise ParseError(line_no, "expected an 'eq' line")
            if ":" not in tokens:
                raise ParseError(line_no, "missing constant after ':'")
            sep = tokens.index(":")
            coeff_tokens, tail = tokens[1:sep], tokens[sep + 1:]
            if len(coeff_tokens) != dim:
                raise ParseError(
                    line_no, "expected %d coefficients, got %d" % (dim, len(coeff_tokens))
                )
            if len(tail) != 1:
                raise ParseError(line_no, "expected exactly one constant after ':'")
            try:
                coeffs = tuple(int(t) for t in coeff_tokens)
            except ValueError:
                raise ParseError(line_no, "coefficients must be integers") from None
            if all(c == 0 for c in coeffs):
                raise ParseError(line_no, "zero coefficient row")
            constant = _parse_fraction(tail[0], line_no)
            if kind == "toric":
                constant = mod1(constant)
            equations.append(Equation(coeffs, constant, len(equations)))
        else:
            if tokens[0] != "stratum":
                raise ParseError(line_no, "expected a 'stratum' line")
            if ":" not in tokens:
                raise ParseError(line_no, "missing ':' before cohomology entries")
            sep = tokens.index(":")
            head, tail = tokens[1:sep], tokens[sep + 1:]
            if len(head) != 2:
                raise ParseError(line_no, "expected 'stratum <codim> <localdim> : ...'")
            try:
                codim, local_dim = int(head[0]), int(head[1])
            except ValueError:
                raise ParseError(line_no, "codim and localdim must be integers") from None
            if codim < 0 or local_dim < 0:
                raise ParseError(line_no, "codim and localdim must be nonnegative")
            entries = []
            for tok in tail:
                m = _COH_ENTRY.match(tok)
                if not m:
                    raise ParseError(line_no, "expected cohomology entry p:dim:weight, got %r" % tok)
                entries.append((int(m.group(1)), int(m.group(2)), int(m.group(3))))
            if not entries:
                raise ParseError(line_no, "stratum needs at least one cohomology entry")
            strata.append(SyntheticStratum(codim, local_dim, tuple(sorted(entries))))
    if kind is None:
        raise ParseError(1, "empty file: missing header line")
    return ArrangementFile(kind, dim, tuple(equations), tuple(strata))


def canonicalize(af: ArrangementFile) -> ArrangementFile:
    """Sort equations (or strata) and relabel in canonical order."""
    if af.kind == "strata":
        return ArrangementFile(
            af.kind, af.dim, (), tuple(sorted(af.strata, key=lambda s: (s.codim, s.cohomology, s.local_dim)))
        )
    eqs = sorted(af.equations, key=lambda e: (e.coeffs, e.constant))
    return ArrangementFile(
        af.kind, af.dim, tuple(Equation(e.coeffs, e.constant, i) for i, e in enumerate(eqs)), ()
    )


def render_arrangement(af: ArrangementFile) -> str:
    """Canonical text form; parse(render(parse(t))) == parse(t)."""
    af = canonicalize(af)
    lines = ["%s %d" % (af.kind, af.dim)]
    for e in af.equations:
        lines.append(
            "eq %s : %d/%d"
            % (" ".join(map(str, e.coeffs)), e.constant.numerator, e.constant.denominator)
        )
    for s in af.strata:
        entries = " ".join("%d:%d:%d" % e for e in s.cohomology)
        lines.append("stratum %d %d : %s" % (s.codim, s.local_dim, entries))
    return "\n".join(lines) + "\n"


# -- computations -------------------------------------------------------------


def _toric_hypersurfaces(af: ArrangementFile) -> list[ToricHypersurface]:
    return [ToricHypersurface(e.coeffs, e.constant, e.label) for e in af.equations]


def _strata_data(af: ArrangementFile) -> StrataData:
    if af.kind == "toric":
        return strata_data_from_toric(af.dim, _toric_hypersurfaces(af))
    if af.kind == "hyperplane":
        return strata_data_from_hyperplanes(af.dim, [(e.coeffs, e.constant) for e in af.equations])
    return StrataData(
        tuple(
            Stratum("s%d" % i, s.codim, s.cohomology, s.local_dim)
            for i, s in enumerate(af.strata)
        )
    )


def _poset_nodes_and_covers(af: ArrangementFile):
    if af.kind == "toric":
        poset = build_layer_poset(af.dim, _toric_hypersurfaces(af))
        nodes = [(l.codim, l.dim, l.key) for l in poset.layers]
        return nodes, list(poset.covers)
    if af.kind == "hyperplane":
        poset = affine_intersection_poset(af.dim, [(e.coeffs, e.constant) for e in af.equations])
        nodes = [(f.codim, f.dim, f.name) for f in poset.flats]
        return nodes, list(poset.covers)
    raise ValueError("poset requires a toric or hyperplane file")


def render_poset_dot(nodes, covers) -> str:
    lines = ["digraph poset {"]
    for i, (codim, dim, key) in enumerate(nodes):
        lines.append('  n%d [label="%d/%d/%s"];' % (i, codim, dim, key))
    for i, j in covers:
        lines.append("  n%d -> n%d;" % (i, j))
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- structured reports --------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    command: str
    digest: str
    sections: tuple  # ordered (name, payload) pairs
    warnings: tuple[str, ...]


def _format_value(v) -> str:
    if isinstance(v, Fraction):
        return "%d/%d" % (v.numerator, v.denominator)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_format_value(x) for x in v)
    return str(v)


def render_structured(report: RunReport, fmt: str) -> str:
    lines: list[str] = []
    if fmt == "kv":
        lines.append("command = %s" % report.command)
        lines.append("digest = %s" % report.digest)
        for name, payload in report.sections:
            if isinstance(payload, list) and payload and isinstance(payload[0], dict):
                for i, row in enumerate(payload):
                    for k, v in row.items():
                        lines.append("%s.%d.%s = %s" % (name, i, k, _format_value(v)))
            else:
                lines.append("%s = %s" % (name, _format_value(payload)))
        for i, w in enumerate(report.warnings):
            lines.append("warning.%d = %s" % (i, w))
    else:
        lines.append("command: %s" % report.command)
        lines.append("digest: %s" % report.digest)
        for name, payload in report.sections:
            if isinstance(payload, list) and payload and isinstance(payload[0], dict):
                for row in payload:
                    parts = " ".join("%s=%s" % (k, _format_value(v)) for k, v in row.items())
                    lines.append("%s %s" % (name, parts))
            else:
                lines.append("%s: %s" % (name, _format_value(payload)))
        for w in report.warnings:
            lines.append("warning: %s" % w)
    return "\n".join(lines) + "\n"


_CANONICAL_NOTE = "equations canonicalized: sorted, labels renumbered"


def _digest(af: ArrangementFile) -> str:
    return "sha256:" + hashlib.sha256(render_arrangement(af).encode()).hexdigest()


def _e2_rows(table) -> list[dict]:
    return [
        {"p": p, "q": q, "weight": w, "dim": d}
        for (p, q, w, d) in table.rows()
    ]


def _purity_rows(report) -> list[dict]:
    return [
        {"stratum": key, "degree": k, "weight": w}
        for (key, k, w) in report.witnesses
    ]


def run_command(command: str, af: ArrangementFile | None, r: float = INF,
                fmt: str = "text", dot_path: str | None = None) -> tuple[int, str]:
    """Execute one command; returns (exit code, rendered output)."""
    if command == "model-selftest":
        return _model_selftest(fmt)
    assert af is not None
    af = canonicalize(af)
    digest = _digest(af)
    warnings = (_CANONICAL_NOTE,)
    sections: list = [("kind", af.kind), ("dim", af.dim)]
    code = 0

    if command == "strata":
        sd = _strata_data(af)
        rows = [
            {
                "codim": s.codim,
                "a": s.local_dim,
                "h": ",".join("%d:%d:%d" % e for e in s.cohomology),
                "key": s.key,
            }
            for s in sd.strata
        ]
        sections.append(("stratum", rows))
    elif command == "poset":
        nodes, covers = _poset_nodes_and_covers(af)
        sections.append(
            ("node", [{"index": i, "codim": c, "dim": d, "key": k} for i, (c, d, k) in enumerate(nodes)])
        )
        sections.append(("cover", [{"from": i, "to": j} for i, j in covers]))
        if dot_path:
            with open(dot_path, "w", encoding="utf-8") as fh:
                fh.write(render_poset_dot(nodes, covers))
            sections.append(("dot", dot_path))
    elif command == "e2":
        table = assemble_e2(_strata_data(af))
        sections.append(("e2", _e2_rows(table)))
        sections.append(("note", table.note))
    elif command == "betti":
        try:
            result = betti_and_poincare(assemble_e2(_strata_data(af)))
        except DegenerationUnknown as err:
            sections.append(("refused", str(err)))
            report = RunReport(command, digest, tuple(sections), warnings)
            return 2, render_structured(report, fmt)
        sections.append(("betti", list(result.betti)))
        sections.append(("poincare", result.poincare))
        sections.append(("weights", list(result.weights)))
    elif command == "purity":
        report_p = purity_hypothesis_check(_strata_data(af), r)
        sections.append(("r", r))
        sections.append(("purity", "pass" if report_p.passed else "fail"))
        if not report_p.passed:
            sections.append(("witness", _purity_rows(report_p)))
    elif command == "certificate":
        out = formality_certificate(_strata_data(af), r)
        sections.append(("r", r))
        if isinstance(out, FormalityCertificate):
            sections.append(("purity", "pass"))
            sections.append(
                ("degeneration", out.degeneration.verdict)
            )
            sections.append(("forced_zero_differentials", len(out.degeneration.forced_zero)))
            if out.betti is not None:
                sections.append(("betti", list(out.betti.betti)))
                sections.append(("poincare", out.betti.poincare))
            sections.append(("formal", True))
            for i, step in enumerate(out.reasoning):
                sections.append(("reasoning.%d" % i, step))
        else:
            sections.append(("purity", "fail"))
            sections.append(("witness", _purity_rows(out)))
            sections.append(("formal", "refused"))
            code = 2
    else:
        raise ValueError("unknown command %r" % command)

    report = RunReport(command, digest, tuple(sections), warnings)
    return code, render_structured(report, fmt)


# -- self test ----------------------------------------------------------------


def _dim1_toric_point_count(equations) -> int:
    hyps = [ToricHypersurface(chi, t, i) for i, (chi, t) in enumerate(equations)]
    poset = build_layer_poset(1, hyps)
    return len(poset.by_codim(1))


def _leray_graded_dims(ambient_dim, hyps) -> dict:
    sd = strata_data_from_toric(ambient_dim, hyps)
    betti = betti_and_poincare(assemble_e2(sd)).betti
    return {(k, 2 * k): b for k, b in enumerate(betti) if b}


def _model_selftest(fmt: str) -> tuple[int, str]:
    checks: list[tuple[str, bool]] = []

    for s in range(4):
        model = build_model(builder_projective_line_marked(s))
        checks.append(("axioms marked-line s=%d" % s, verify_cdga_axioms(model).passed))
    cd2 = builder_projective_line_marked(2)
    square = kunneth_product(cd2, cd2)
    model_sq = build_model(square)
    checks.append(("axioms kunneth square", verify_cdga_axioms(model_sq).passed))

    bad1 = verify_cdga_axioms(build_model(negate_gysin_block(square, (1, 3), 1, 0)))
    checks.append(("fault injection full flip detected", not bad1.passed))
    mixed = kunneth_product(cd2, builder_projective_line_marked(0))
    bad2 = verify_cdga_axioms(build_model(negate_gysin_block(mixed, (1,), 1, 0)))
    checks.append(
        ("fault injection block flip detected as leibniz", bad2.axioms_failing() == ("leibniz",))
    )

    for s in (2, 3):
        w = extract_kernel_model(build_model(builder_projective_line_marked(s)), INF)
        checks.append(("kernel witness s=%d" % s, w.quasi_iso.ok))
    checks.append(("kernel witness square", extract_kernel_model(model_sq, INF).quasi_iso.ok))
    c0 = builder_projective_line_marked(0)
    checks.append(
        ("cokernel witness compact line", extract_cokernel_model(build_model(c0), INF).quasi_iso.ok)
    )
    checks.append(
        (
            "cokernel witness compact square",
            extract_cokernel_model(build_model(kunneth_product(c0, c0)), INF).quasi_iso.ok,
        )
    )

    arrangements = [
        [((1,), Fraction(0))],
        [((2,), Fraction(0))],
        [((2,), Fraction(0)), ((1,), Fraction(1, 2))],
    ]
    for eqs in arrangements:
        hyps = [ToricHypersurface(chi, t, i) for i, (chi, t) in enumerate(eqs)]
        leray = _leray_graded_dims(1, hyps)
        points = _dim1_toric_point_count(eqs)
        morgan = cohomology_of_model(build_model(builder_projective_line_marked(points + 2)))
        checks.append(("cross-engine dim1 %d-pts" % points, leray == morgan))
    for eqs in arrangements[:2]:
        points = _dim1_toric_point_count(eqs)
        hyps2 = [ToricHypersurface(chi + (0,), t, i) for i, (chi, t) in enumerate(eqs)]
        hyps2 += [
            ToricHypersurface((0,) + chi, t, len(eqs) + i) for i, (chi, t) in enumerate(eqs)
        ]
        leray = _leray_graded_dims(2, hyps2)
        factor = builder_projective_line_marked(points + 2)
        morgan = cohomology_of_model(build_model(kunneth_product(factor, factor)))
        checks.append(("cross-engine square %d-pts" % points, leray == morgan))

    all_ok = all(ok for _, ok in checks)
    sections = [("check", [{"name": name, "ok": ok} for name, ok in checks])]
    sections.append(("selftest", "pass" if all_ok else "fail"))
    report = RunReport("model-selftest", "sha256:" + hashlib.sha256(b"").hexdigest(), tuple(sections), ())
    return (0 if all_ok else 2), render_structured(report, fmt)


# -- entry point ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stdout)
        sys.stdout.write("error: %s\n" % message)
        raise SystemExit(1)


def _parse_r(text: str) -> float:
    if text == "inf":
        return INF
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("r must be a nonnegative integer or 'inf'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("r must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stratiform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("strata", "poset", "e2", "betti", "purity", "certificate"):
        p = sub.add_parser(name)
        p.add_argument("file", help="arrangement file")
        p.add_argument("--format", choices=("text", "kv"), default="text")
        if name in ("purity", "certificate"):
            p.add_argument("--r", type=_parse_r, default=INF, help="formality level (integer or 'inf')")
        if name == "poset":
            p.add_argument("--dot", default=None, help="write a DOT rendering to this path")
    p = sub.add_parser("model-selftest")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "model-selftest":
        code, text = run_command("model-selftest", None, fmt=args.format)
        sys.stdout.write(text)
        return code
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            content = fh.read()
    except OSError as err:
        sys.stdout.write("error: %s\n" % err)
        return 1
    try:
        af = parse_arrangement_file(content)
        code, text = run_command(
            args.command,
            af,
            r=getattr(args, "r", INF),
            fmt=args.format,
            dot_path=getattr(args, "dot", None),
        )
    except ParseError as err:
        sys.stdout.write("error: %s\n" % err)
        return 1
    except ValueError as err:
        sys.stdout.write("error: %s\n" % err)
        return 1
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
