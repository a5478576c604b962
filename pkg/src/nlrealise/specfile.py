"""Line-oriented text format for algebras, DGLAs and Leibniz product tables.

::

    algebra sl2
    basis e parity=0 degree=-1
    basis h parity=0 degree=0
    basis f parity=0 degree=1
    bracket e h -> -2 e       # pairs in declaration order
    bracket e f -> 1 h
    bracket h f -> -2 f
    subalgebra h e

``dgla`` files give ``degree=`` instead of ``parity=`` and add ``differential``
lines; ``leibniz`` files give ``product`` lines for every ordered pair.  A right
hand side is ``0`` or terms ``<rational> <id>`` joined by ``+``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .algebra import BasisElement, Decomposition, Element, SuperAlgebra, format_rational
from .linfty import DGLA, LeibnizTable

KINDS = ("algebra", "dgla", "leibniz")

_TOKEN = re.compile(r"->|\+|[^\s+]+?(?=\s|\+|->|$)")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_RATIONAL = re.compile(r"-?\d+(/\d+)?\Z")
_INT = re.compile(r"-?\d+\Z")


class SpecSyntaxError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class SpecSemanticError(ValueError):
    """The file parses but cannot serve the requested purpose."""


@dataclass(frozen=True)
class Term:
    coef: Fraction
    id: str


@dataclass(frozen=True)
class BasisDecl:
    id: str
    parity: int
    degree: int | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BracketDecl:
    left: str
    right: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DifferentialDecl:
    source: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProductDecl:
    left: str
    right: str
    terms: tuple[Term, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SubalgebraDecl:
    ids: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SpecFile:
    kind: str
    name: str
    basis: tuple[BasisDecl, ...] = ()
    brackets: tuple[BracketDecl, ...] = ()
    differentials: tuple[DifferentialDecl, ...] = ()
    products: tuple[ProductDecl, ...] = ()
    subalgebra: SubalgebraDecl | None = None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.basis)


@dataclass
class _Tok:
    text: str
    col: int


def _tokens(text: str) -> list[_Tok]:
    return [_Tok(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.kind: str | None = None
        self.name = ""
        self.basis: list[BasisDecl] = []
        self.index: dict[str, int] = {}
        self.brackets: list[BracketDecl] = []
        self.differentials: list[DifferentialDecl] = []
        self.products: list[ProductDecl] = []
        self.subalgebra: SubalgebraDecl | None = None
        self.seen_pairs: set = set()
        self.graded: bool | None = None

    def fail(self, line: int, col: int, msg: str):
        raise SpecSyntaxError(line, col, msg)

    def lines(self) -> Iterator[tuple[int, list[_Tok], int]]:
        for n, raw in enumerate(self.text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            toks = _tokens(body)
            if toks:
                yield n, toks, len(body.rstrip()) + 1

    def parse(self) -> SpecFile:
        last = 0
        for n, toks, end in self.lines():
            last = n
            head = toks[0]
            if self.kind is None:
                if head.text not in KINDS:
                    self.fail(n, head.col, f"expected a header 'algebra', 'dgla' or 'leibniz', got {head.text!r}")
                if len(toks) != 2 or not _IDENT.match(toks[1].text):
                    col = toks[1].col if len(toks) > 1 else end
                    self.fail(n, col, "header needs exactly one name")
                self.kind, self.name = head.text, toks[1].text
                continue
            handler = {
                "basis": self.basis_line,
                "bracket": self.bracket_line,
                "differential": self.differential_line,
                "product": self.product_line,
                "subalgebra": self.subalgebra_line,
            }.get(head.text)
            if head.text in KINDS:
                self.fail(n, head.col, "header given twice")
            if handler is None:
                self.fail(n, head.col, f"unknown statement {head.text!r}")
            handler(n, toks, end)
        if self.kind is None:
            self.fail(last + 1, 1, "missing header")
        return SpecFile(self.kind, self.name, tuple(self.basis), tuple(self.brackets),
                        tuple(self.differentials), tuple(self.products), self.subalgebra)

    def require_kind(self, n: int, tok: _Tok, *kinds: str):
        if self.kind not in kinds:
            self.fail(n, tok.col, f"'{tok.text}' lines are not allowed in {'an' if self.kind == 'algebra' else 'a'} {self.kind} file")

    def declared(self, n: int, tok: _Tok) -> str:
        if not _IDENT.match(tok.text):
            self.fail(n, tok.col, f"expected an identifier, got {tok.text!r}")
        if tok.text not in self.index:
            self.fail(n, tok.col, f"undeclared id {tok.text!r}")
        return tok.text

    def basis_line(self, n: int, toks: list[_Tok], end: int):
        if len(toks) < 2:
            self.fail(n, end, "basis needs an id")
        tid = toks[1]
        if not _IDENT.match(tid.text):
            self.fail(n, tid.col, f"invalid id {tid.text!r}")
        if tid.text in self.index:
            self.fail(n, tid.col, f"duplicate basis id {tid.text!r}")
        if self.brackets or self.differentials or self.products or self.subalgebra:
            self.fail(n, toks[0].col, "basis lines must precede all other statements")
        attrs: dict[str, tuple[int, int]] = {}
        for tok in toks[2:]:
            key, eq, val = tok.text.partition("=")
            if not eq or key not in ("parity", "degree"):
                self.fail(n, tok.col, f"expected parity=<0|1> or degree=<int>, got {tok.text!r}")
            if key in attrs:
                self.fail(n, tok.col, f"{key} given twice")
            vcol = tok.col + len(key) + 1
            if key == "parity" and val not in ("0", "1"):
                self.fail(n, vcol, f"parity must be 0 or 1, got {val!r}")
            if key == "degree" and not _INT.match(val):
                self.fail(n, vcol, f"degree must be an integer, got {val!r}")
            attrs[key] = (int(val), tok.col)
        parity = attrs.get("parity", (None, 0))[0]
        degree = attrs.get("degree", (None, 0))[0]
        if self.kind == "algebra":
            if parity is None:
                self.fail(n, end, "parity=<0|1> is required")
            graded = degree is not None
            if self.graded is not None and graded != self.graded:
                self.fail(n, tid.col, "degree must be given for all basis elements or for none")
            self.graded = graded
        elif self.kind == "dgla":
            if degree is None:
                self.fail(n, end, "degree=<int> is required in a dgla file")
            if parity is not None and parity != degree % 2:
                self.fail(n, attrs["parity"][1], "parity must equal degree mod 2")
            parity = degree % 2
        else:
            if degree is not None:
                self.fail(n, attrs["degree"][1], "leibniz basis elements carry no degree")
            if parity == 0:
                self.fail(n, attrs["parity"][1], "leibniz spaces are all odd, parity must be 1")
            parity = 1
        self.index[tid.text] = len(self.basis)
        self.basis.append(BasisDecl(tid.text, parity, degree, n))

    def rhs(self, n: int, toks: list[_Tok], start: int, end: int) -> tuple[Term, ...]:
        if start >= len(toks) or toks[start].text != "->":
            col = toks[start].col if start < len(toks) else end
            self.fail(n, col, "expected '->'")
        rest = toks[start + 1:]
        if not rest:
            self.fail(n, end, "expected a right hand side after '->'")
        if len(rest) == 1 and rest[0].text == "0":
            return ()
        terms: list[Term] = []
        seen: set[str] = set()
        i = 0
        while True:
            if i >= len(rest):
                self.fail(n, end, "expected a term")
            coef = rest[i]
            if not _RATIONAL.match(coef.text):
                self.fail(n, coef.col, f"expected a rational coefficient, got {coef.text!r}")
            if "/" in coef.text and int(coef.text.split("/")[1]) == 0:
                self.fail(n, coef.col, "zero denominator")
            value = Fraction(coef.text)
            if i + 1 >= len(rest):
                self.fail(n, end, "expected an id after the coefficient")
            tid = rest[i + 1]
            ident = self.declared(n, tid)
            if ident in seen:
                self.fail(n, tid.col, f"id {ident!r} appears twice on the right hand side")
            seen.add(ident)
            terms.append(Term(value, ident))
            i += 2
            if i == len(rest):
                break
            if rest[i].text != "+":
                self.fail(n, rest[i].col, f"expected '+', got {rest[i].text!r}")
            i += 1
        return tuple(terms)

    def pair(self, n: int, toks: list[_Tok], end: int) -> tuple[str, str]:
        if len(toks) < 3:
            self.fail(n, end, f"{toks[0].text} needs two ids")
        return self.declared(n, toks[1]), self.declared(n, toks[2])

    def bracket_line(self, n: int, toks: list[_Tok], end: int):
        self.require_kind(n, toks[0], "algebra", "dgla")
        a, b = self.pair(n, toks, end)
        if self.index[a] > self.index[b]:
            self.fail(n, toks[1].col, f"bracket pair must follow declaration order: write 'bracket {b} {a}'")
        if ("bracket", a, b) in self.seen_pairs:
            self.fail(n, toks[1].col, f"bracket {a} {b} given twice")
        self.seen_pairs.add(("bracket", a, b))
        self.brackets.append(BracketDecl(a, b, self.rhs(n, toks, 3, end), n))

    def product_line(self, n: int, toks: list[_Tok], end: int):
        self.require_kind(n, toks[0], "leibniz")
        a, b = self.pair(n, toks, end)
        if ("product", a, b) in self.seen_pairs:
            self.fail(n, toks[1].col, f"product {a} {b} given twice")
        self.seen_pairs.add(("product", a, b))
        self.products.append(ProductDecl(a, b, self.rhs(n, toks, 3, end), n))

    def differential_line(self, n: int, toks: list[_Tok], end: int):
        self.require_kind(n, toks[0], "dgla")
        if len(toks) < 2:
            self.fail(n, end, "differential needs an id")
        a = self.declared(n, toks[1])
        if ("differential", a) in self.seen_pairs:
            self.fail(n, toks[1].col, f"differential of {a} given twice")
        self.seen_pairs.add(("differential", a))
        self.differentials.append(DifferentialDecl(a, self.rhs(n, toks, 2, end), n))

    def subalgebra_line(self, n: int, toks: list[_Tok], end: int):
        self.require_kind(n, toks[0], "algebra")
        if self.subalgebra is not None:
            self.fail(n, toks[0].col, "subalgebra given twice")
        ids = []
        for tok in toks[1:]:
            ident = self.declared(n, tok)
            if ident in ids:
                self.fail(n, tok.col, f"id {ident!r} listed twice")
            ids.append(ident)
        self.subalgebra = SubalgebraDecl(tuple(ids), n)


def parse_spec(text: str) -> SpecFile:
    return _Parser(text).parse()


def _render_terms(terms: tuple[Term, ...]) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{format_rational(t.coef)} {t.id}" for t in terms)


def render_spec(spec: SpecFile) -> str:
    lines = [f"{spec.kind} {spec.name}"]
    for b in spec.basis:
        if spec.kind == "dgla":
            lines.append(f"basis {b.id} degree={b.degree}")
        elif b.degree is None:
            lines.append(f"basis {b.id} parity={b.parity}")
        else:
            lines.append(f"basis {b.id} parity={b.parity} degree={b.degree}")
    for s in spec.brackets:
        lines.append(f"bracket {s.left} {s.right} -> {_render_terms(s.terms)}")
    for s in spec.differentials:
        lines.append(f"differential {s.source} -> {_render_terms(s.terms)}")
    for s in spec.products:
        lines.append(f"product {s.left} {s.right} -> {_render_terms(s.terms)}")
    if spec.subalgebra is not None:
        lines.append(" ".join(["subalgebra", *spec.subalgebra.ids]).rstrip())
    return "\n".join(lines) + "\n"


# -- conversion to and from domain objects ------------------------------------------

def _element(spec: SpecFile, terms: tuple[Term, ...]) -> Element:
    index = {b.id: i for i, b in enumerate(spec.basis)}
    return Element({index[t.id]: t.coef for t in terms})


def _terms(ids, x: Element) -> tuple[Term, ...]:
    return tuple(Term(c, ids[i]) for i, c in sorted(x.items()))


def build_algebra(spec: SpecFile) -> SuperAlgebra:
    if spec.kind not in ("algebra", "dgla"):
        raise SpecSemanticError(f"expected an algebra file, got {spec.kind}")
    basis = [BasisElement(b.id, b.parity, b.degree) for b in spec.basis]
    index = {b.id: i for i, b in enumerate(spec.basis)}
    structure = {(index[s.left], index[s.right]): _element(spec, s.terms) for s in spec.brackets}
    return SuperAlgebra(basis, structure, name=spec.name)


def build_decomposition(spec: SpecFile, alg: SuperAlgebra | None = None) -> Decomposition:
    """The decomposition declared by the ``subalgebra`` line."""
    if spec.subalgebra is None:
        raise SpecSemanticError("this command needs a 'subalgebra' line declaring H")
    alg = alg or build_algebra(spec)
    return Decomposition.from_ids(alg, spec.subalgebra.ids)


def build_dgla(spec: SpecFile) -> DGLA:
    if spec.kind != "dgla":
        raise SpecSemanticError(f"expected a dgla file, got {spec.kind}")
    alg = build_algebra(spec)
    index = {b.id: i for i, b in enumerate(spec.basis)}
    diff = {index[s.source]: _element(spec, s.terms) for s in spec.differentials}
    return DGLA(alg, diff)


def build_leibniz(spec: SpecFile) -> LeibnizTable:
    if spec.kind != "leibniz":
        raise SpecSemanticError(f"expected a leibniz file, got {spec.kind}")
    index = {b.id: i for i, b in enumerate(spec.basis)}
    products = {(index[s.left], index[s.right]): _element(spec, s.terms) for s in spec.products}
    return LeibnizTable(spec.ids, {k: v for k, v in products.items() if v}, spec.name)


def algebra_to_spec(alg: SuperAlgebra, dec: Decomposition | None = None, name: str | None = None) -> SpecFile:
    ids = alg.ids
    basis = tuple(BasisDecl(b.id, b.parity, b.zdegree) for b in alg.basis)
    brackets = tuple(BracketDecl(ids[i], ids[j], _terms(ids, v)) for (i, j), v in sorted(alg.structure.items()))
    sub = SubalgebraDecl(tuple(ids[i] for i in sorted(dec.h_indices))) if dec is not None else None
    return SpecFile("algebra", name or alg.name or "unnamed", basis, brackets, subalgebra=sub)


def dgla_to_spec(dgla: DGLA, name: str | None = None) -> SpecFile:
    alg = dgla.underlying
    ids = alg.ids
    basis = tuple(BasisDecl(b.id, b.parity, b.zdegree) for b in alg.basis)
    brackets = tuple(BracketDecl(ids[i], ids[j], _terms(ids, v)) for (i, j), v in sorted(alg.structure.items()))
    diffs = tuple(DifferentialDecl(ids[i], _terms(ids, v)) for i, v in sorted(dgla.differential.items()))
    return SpecFile("dgla", name or alg.name or "unnamed", basis, brackets, diffs)


def leibniz_to_spec(t: LeibnizTable, name: str | None = None) -> SpecFile:
    ids = t.ids
    basis = tuple(BasisDecl(i, 1) for i in ids)
    products = tuple(ProductDecl(ids[i], ids[j], _terms(ids, v)) for (i, j), v in sorted(t.products.items()) if v)
    return SpecFile("leibniz", name or t.name or "unnamed", basis, products=products)


def parse_element(alg: SuperAlgebra, text: str) -> Element:
    """An element written as ``<id>`` or ``[<rational>] <id> + ...``."""
    toks = _tokens(text)
    if not toks:
        raise ValueError("empty element")
    out: dict[int, Fraction] = {}
    i = 0
    while True:
        coef = Fraction(1)
        if i < len(toks) and _RATIONAL.match(toks[i].text):
            if "/" in toks[i].text and int(toks[i].text.split("/")[1]) == 0:
                raise ValueError(f"col {toks[i].col}: zero denominator")
            coef = Fraction(toks[i].text)
            i += 1
        if i >= len(toks):
            raise ValueError("expected an id at the end")
        tok = toks[i]
        if tok.text not in alg.ids:
            raise ValueError(f"col {tok.col}: unknown basis id {tok.text!r}")
        k = alg.index(tok.text)
        out[k] = out.get(k, Fraction(0)) + coef
        i += 1
        if i == len(toks):
            break
        if toks[i].text != "+":
            raise ValueError(f"col {toks[i].col}: expected '+', got {toks[i].text!r}")
        i += 1
    return Element(out)
