"""Command line front end.

Every command prints a report whose header lines start with ``#``; exit codes
are 0 when every check passes, 1 on a mathematical failure and 2 on usage or
parse errors.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .algebra import DecompositionError, MalformedElementError, format_rational, validate_superalgebra
from .linfty import (
    DGLAError,
    bernoulli_minus,
    check_linfty,
    compare_brackets,
    getzler_brackets,
    leibniz_identity_holds,
    leibniz_to_dgla,
    leibniz_to_theta,
    realised_brackets,
)
from .realisation import check_homomorphism, realise
from .specfile import (
    SpecFile,
    SpecSemanticError,
    SpecSyntaxError,
    build_algebra,
    build_decomposition,
    build_dgla,
    build_leibniz,
    dgla_to_spec,
    parse_element,
    parse_spec,
    render_spec,
)

PROG = "nlrealise"


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


@dataclass
class Report:
    command: str
    passed: bool = True
    sections: list[tuple[str, list[str]]] = field(default_factory=list)

    def add(self, title: str, lines: list[str]) -> None:
        self.sections.append((title, lines))

    def render(self) -> str:
        out = [f"# command: {self.command}", f"# status: {'pass' if self.passed else 'fail'}"]
        for title, lines in self.sections:
            if title:
                out.append(f"[{title}]")
            out.extend(lines)
        return "\n".join(out) + "\n"


def _load(path: str) -> SpecFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: cannot read file: {exc.strerror}") from exc
    try:
        return parse_spec(text)
    except SpecSyntaxError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _algebra_and_decomposition(path: str, spec: SpecFile):
    if spec.kind != "algebra":
        raise UsageError(f"{path}: expected an algebra file, got {spec.kind}")
    alg = build_algebra(spec)
    report = validate_superalgebra(alg)
    if not report.ok:
        raise DomainError("\n".join(["invalid Lie superalgebra:"] + report.lines()))
    try:
        dec = build_decomposition(spec, alg)
    except SpecSemanticError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return alg, dec


def cmd_validate(args, report: Report) -> None:
    spec = _load(args.file)
    if spec.kind == "dgla":
        problems = build_dgla(spec).problems()
        report.passed = not problems
        report.add("dgla", problems or ["all axioms hold"])
        return
    if spec.kind == "leibniz":
        ok = leibniz_identity_holds(build_leibniz(spec))
        report.passed = ok
        report.add("leibniz", ["leibniz identity holds" if ok else "leibniz identity fails"])
        return
    alg = build_algebra(spec)
    v = validate_superalgebra(alg)
    report.passed = v.ok
    report.add("algebra", v.lines() or ["all axioms hold"])
    if spec.subalgebra is not None and v.ok:
        try:
            build_decomposition(spec, alg)
            report.add("subalgebra", ["H is closed under the bracket"])
        except DecompositionError as exc:
            report.passed = False
            report.add("subalgebra", [str(exc)])


def cmd_realise(args, report: Report) -> None:
    spec = _load(args.file)
    alg, dec = _algebra_and_decomposition(args.file, spec)
    try:
        a = parse_element(alg, args.element)
    except ValueError as exc:
        raise UsageError(f"--element: {exc}") from exc
    name = args.element
    if name not in alg.ids:
        name = "a"
        while name in alg.ids:
            name += "'"
    result = realise(a, dec, args.max_order)
    for p in range(args.max_order + 1):
        part = result.part(p)
        report.add(f"{name}({p})", part.format_lines(f"{name}({p})") or ["0"])
    if result.finite_from is not None:
        report.add("termination", [f"{name}(p) vanishes on E-arguments for all p >= {result.finite_from}"])


def cmd_check_hom(args, report: Report) -> None:
    spec = _load(args.file)
    alg, dec = _algebra_and_decomposition(args.file, spec)
    ids = alg.ids
    if args.pair:
        parts = args.pair.split(",")
        if len(parts) != 2 or any(p not in ids for p in parts):
            raise UsageError(f"--pair: expected two basis ids separated by a comma, got {args.pair!r}")
        pairs = [(alg.index(parts[0]), alg.index(parts[1]))]
    else:
        # both sides are graded skew in (a, b), so unordered pairs cover everything
        pairs = [(i, j) for i in range(alg.dim) for j in range(i, alg.dim)]
    cache: dict = {}
    for i, j in pairs:
        res = check_homomorphism(alg.element(ids[i]), alg.element(ids[j]), dec, args.max_degree, cache)
        lines = []
        for d in res.results:
            lines.append(f"degree {d.degree}: {'pass' if d.passed else 'fail'}")
            if not d.passed:
                lines.extend("  residual " + s for s in d.residual.format_lines("r"))
        report.passed &= res.passed
        report.add(f"pair {ids[i]},{ids[j]}", lines)


def cmd_linfty(args, report: Report) -> None:
    spec = _load(args.file)
    if spec.kind != "dgla":
        raise UsageError(f"{args.file}: expected a dgla file, got {spec.kind}")
    dgla = build_dgla(spec)
    problems = dgla.problems()
    if problems:
        raise DomainError("\n".join(["invalid DGLA:"] + problems))
    s = getzler_brackets(dgla, args.max_arity)
    for p in range(1, args.max_arity + 1):
        report.add(f"Q{p}", s.bracket(p).format_lines(f"Q{p}") or ["0"])
    if args.cross_check:
        lines = []
        for p, diff in compare_brackets(s, realised_brackets(dgla, args.max_arity), args.max_arity):
            ok = diff.is_zero()
            report.passed &= ok
            lines.append(f"arity {p}: {'match' if ok else 'mismatch'}")
            if not ok:
                lines.extend("  difference " + x for x in diff.format_lines("d"))
        report.add("cross-check against Theta(p)", lines)
        lines = []
        for r in check_linfty(s, args.max_arity):
            report.passed &= r.passed
            lines.append(f"order {r.arity}: {'zero' if r.passed else 'nonzero'}")
            if not r.passed:
                lines.extend("  residual " + x for x in r.residual.format_lines("r"))
        report.add("[[Q,Q]] residuals", lines)


def cmd_leibniz2dgla(args, report: Report) -> None:
    spec = _load(args.file)
    if spec.kind != "leibniz":
        raise UsageError(f"{args.file}: expected a leibniz file, got {spec.kind}")
    table = build_leibniz(spec)
    _, ok = leibniz_to_theta(table)
    report.passed = ok
    report.add("verdict", ["Theta o Theta = 0: leibniz" if ok else "Theta o Theta != 0: not leibniz"])
    if ok:
        dgla = leibniz_to_dgla(table)
        report.add("dgla", render_spec(dgla_to_spec(dgla, spec.name)).splitlines())


def cmd_bernoulli(args, report: Report) -> None:
    report.add("", [format_rational(bernoulli_minus(n)) for n in range(args.n + 1)])


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = _non_negative(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Exact nonlinear realisations and L-infinity brackets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms of an algebra, dgla or leibniz file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("realise", help="tabulate a(p) for p up to --max-order")
    p.add_argument("file")
    p.add_argument("--element", required=True, help="basis id or combination like '2 e + -1/2 f'")
    p.add_argument("--max-order", type=_non_negative, required=True)
    p.set_defaults(func=cmd_realise)

    p = sub.add_parser("check-hom", help="verify the homomorphism identity degree by degree")
    p.add_argument("file")
    p.add_argument("--max-degree", type=_non_negative, required=True)
    p.add_argument("--pair", help="two basis ids separated by a comma (default: all pairs)")
    p.set_defaults(func=cmd_check_hom)

    p = sub.add_parser("linfty", help="L-infinity brackets of a dgla")
    p.add_argument("file")
    p.add_argument("--max-arity", type=_positive, required=True)
    p.add_argument("--cross-check", action="store_true",
                   help="compare with the realisation of Theta and check [[Q,Q]] = 0")
    p.set_defaults(func=cmd_linfty)

    p = sub.add_parser("leibniz2dgla", help="test the Leibniz identity and build the induced dgla")
    p.add_argument("file")
    p.set_defaults(func=cmd_leibniz2dgla)

    p = sub.add_parser("bernoulli", help="Bernoulli numbers B_0..B_N with B_1 = -1/2")
    p.add_argument("n", type=_non_negative, metavar="N")
    p.set_defaults(func=cmd_bernoulli)
    return parser


def run_command(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(" ".join([PROG, *argv]))
    try:
        args.func(args, report)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=err)
        return 2
    except (DomainError, DGLAError, DecompositionError, MalformedElementError, SpecSemanticError) as exc:
        print(f"{PROG}: {exc}", file=err)
        return 1
    out.write(report.render())
    return 0 if report.passed else 1


def main(argv: Sequence[str] | None = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)
