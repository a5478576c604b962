"""Exact scalars, elements and finite-dimensional Lie superalgebras.

Scalars are :class:`fractions.Fraction` throughout.  An algebra is given by an
ordered basis of parity-tagged elements and a sparse table of structure
constants stored only for index pairs ``i <= j``; the remaining brackets follow
from super skew-symmetry ``[x, y] = -(-1)^{|x||y|} [y, x]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

RationalLike = Union[int, Fraction, str]


class MalformedElementError(ValueError):
    """An element refers to basis indices the algebra does not have."""


class DecompositionError(ValueError):
    pass


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    """``n`` or ``n/d`` in lowest terms, sign on the numerator."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Element:
    """A finite linear combination of basis indices with rational coefficients.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[int, Fraction] = {}
        for i, v in items:
            v = as_rational(v)
            if v:
                c[int(i)] = c.get(int(i), 0) + v
        self._c = {i: v for i, v in c.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, c: dict[int, Fraction]) -> "Element":
        # trusted constructor: c has no zero values
        e = cls.__new__(cls)
        e._c = c
        e._hash = None
        return e

    @classmethod
    def basis(cls, i: int, coeff: RationalLike = 1) -> "Element":
        return cls({i: coeff})

    @property
    def coeffs(self) -> Mapping[int, Fraction]:
        return MappingProxyType(self._c)

    def items(self):
        return self._c.items()

    def support(self) -> frozenset[int]:
        return frozenset(self._c)

    def coeff(self, i: int) -> Fraction:
        return self._c.get(i, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self) -> Iterator[int]:
        return iter(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, Element):
            return self._c == other._c
        if other == 0:
            return not self._c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __add__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        c = dict(self._c)
        for i, v in other._c.items():
            w = c.get(i, 0) + v
            if w:
                c[i] = w
            else:
                c.pop(i, None)
        return Element._raw(c)

    def __neg__(self) -> "Element":
        return Element._raw({i: -v for i, v in self._c.items()})

    def __sub__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar: RationalLike) -> "Element":
        s = as_rational(scalar)
        if not s:
            return ZERO
        return Element._raw({i: v * s for i, v in self._c.items()})

    __rmul__ = __mul__

    def restrict(self, indices) -> "Element":
        return Element._raw({i: v for i, v in self._c.items() if i in indices})

    def __repr__(self) -> str:
        if not self._c:
            return "Element(0)"
        return "Element({" + ", ".join(f"{i}: {format_rational(v)}" for i, v in sorted(self._c.items())) + "})"


ZERO = Element()


def accumulate(target: dict[int, Fraction], x: Element, scale: Fraction = Fraction(1)) -> None:
    """In-place ``target += scale * x`` on a plain coefficient dict."""
    for i, v in x._c.items():
        w = target.get(i, 0) + v * scale
        if w:
            target[i] = w
        else:
            target.pop(i, None)


@dataclass(frozen=True)
class BasisElement:
    id: str
    parity: int
    zdegree: int | None = None

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError(f"parity of {self.id!r} must be 0 or 1, got {self.parity!r}")


class SuperAlgebra:
    """Finite-dimensional Lie superalgebra over Q with exact structure constants.

    ``structure`` maps index pairs ``(i, j)`` with ``i <= j`` to the element
    ``[e_i, e_j]``.  Nothing beyond the storage convention is enforced here;
    use :func:`validate_superalgebra` to check the axioms.
    """

    def __init__(self, basis: Sequence[BasisElement], structure: Mapping[tuple[int, int], Element] | None = None,
                 name: str = ""):
        self.name = name
        self.basis: tuple[BasisElement, ...] = tuple(basis)
        ids = [b.id for b in self.basis]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ValueError(f"duplicate basis id {dup!r}")
        graded = [b.zdegree is not None for b in self.basis]
        if any(graded) and not all(graded):
            raise ValueError("zdegree must be given for all basis elements or for none")
        self.dim = len(self.basis)
        self.parity: tuple[int, ...] = tuple(b.parity for b in self.basis)
        self.zdegree: tuple[int, ...] | None = tuple(b.zdegree for b in self.basis) if all(graded) and graded else None
        self._index = {b.id: i for i, b in enumerate(self.basis)}

        stored: dict[tuple[int, int], Element] = {}
        for (i, j), value in (structure or {}).items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise MalformedElementError(f"structure pair {(i, j)} out of range")
            if i > j:
                raise ValueError(f"structure constants are stored for i <= j only, got {(i, j)}")
            if not isinstance(value, Element):
                value = Element(value)
            self._check_element(value)
            if value:
                stored[(i, j)] = value
        self.structure: Mapping[tuple[int, int], Element] = MappingProxyType(stored)

        # full table including the skew-symmetric half
        table: dict[tuple[int, int], Element] = dict(stored)
        for (i, j), value in stored.items():
            if i != j:
                sign = 1 if self.parity[i] * self.parity[j] else -1
                table[(j, i)] = value * sign
        self._table = table

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.basis)

    def index(self, id_: str) -> int:
        try:
            return self._index[id_]
        except KeyError:
            raise KeyError(f"unknown basis id {id_!r}") from None

    def element(self, coeffs: Mapping[str, RationalLike] | str) -> Element:
        """Element from ids, e.g. ``alg.element({"e": 2, "f": "1/2"})`` or ``alg.element("h")``."""
        if isinstance(coeffs, str):
            return Element.basis(self.index(coeffs))
        return Element({self.index(k): v for k, v in coeffs.items()})

    def _check_element(self, x: Element) -> None:
        for i in x._c:
            if not 0 <= i < self.dim:
                raise MalformedElementError(f"basis index {i} out of range for dimension {self.dim}")

    def bracket_basis(self, i: int, j: int) -> Element:
        return self._table.get((i, j), ZERO)

    def bracket(self, x: Element, y: Element) -> Element:
        self._check_element(x)
        self._check_element(y)
        return self._bracket_unchecked(x, y)

    def _bracket_unchecked(self, x: Element, y: Element) -> Element:
        out: dict[int, Fraction] = {}
        table = self._table
        for i, a in x._c.items():
            for j, b in y._c.items():
                z = table.get((i, j))
                if z is not None:
                    accumulate(out, z, a * b)
        return Element._raw(out)

    def element_parity(self, x: Element) -> int | None:
        """Parity of a homogeneous element; ``None`` if mixed, 0 for zero."""
        ps = {self.parity[i] for i in x._c}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def split_parity(self, x: Element) -> list[Element]:
        even = Element._raw({i: v for i, v in x._c.items() if self.parity[i] == 0})
        odd = Element._raw({i: v for i, v in x._c.items() if self.parity[i] == 1})
        return [p for p in (even, odd) if p]

    def format_element(self, x: Element) -> str:
        if not x:
            return "0"
        return " + ".join(f"{format_rational(v)} {self.basis[i].id}" for i, v in sorted(x._c.items()))

    def __repr__(self) -> str:
        return f"SuperAlgebra({self.name or '?'}, dim={self.dim})"

    @classmethod
    def from_brackets(cls, basis: Sequence[BasisElement | tuple], brackets: Mapping[tuple[str, str], Mapping[str, RationalLike]],
                      name: str = "") -> "SuperAlgebra":
        """Build from id-keyed brackets; pairs in either order are accepted and canonicalised."""
        basis = [b if isinstance(b, BasisElement) else BasisElement(*b) for b in basis]
        index = {b.id: i for i, b in enumerate(basis)}
        structure: dict[tuple[int, int], Element] = {}
        for (a, b), value in brackets.items():
            i, j = index[a], index[b]
            elem = Element({index[k]: v for k, v in value.items()})
            if i > j:
                sign = 1 if basis[i].parity * basis[j].parity else -1
                i, j, elem = j, i, elem * sign
            if (i, j) in structure:
                raise ValueError(f"bracket [{a}, {b}] given twice")
            structure[(i, j)] = elem
        return cls(basis, structure, name=name)


def bracket_elements(alg: SuperAlgebra, x: Element, y: Element) -> Element:
    return alg.bracket(x, y)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of the basis into a subalgebra part H and a complement E."""

    algebra: SuperAlgebra
    h_indices: frozenset[int]
    e_indices: frozenset[int]

    def __post_init__(self):
        h, e = frozenset(self.h_indices), frozenset(self.e_indices)
        object.__setattr__(self, "h_indices", h)
        object.__setattr__(self, "e_indices", e)
        n = self.algebra.dim
        if h & e:
            raise DecompositionError(f"H and E overlap in {sorted(h & e)}")
        if h | e != frozenset(range(n)):
            raise DecompositionError("H and E must together cover the basis")
        ids = self.algebra.ids
        for i in sorted(h):
            for j in sorted(h):
                if i <= j:
                    leak = self.algebra.bracket_basis(i, j).restrict(e)
                    if leak:
                        raise DecompositionError(
                            f"H is not a subalgebra: [{ids[i]}, {ids[j]}] has E-component "
                            f"{self.algebra.format_element(leak)}")

    @classmethod
    def from_ids(cls, algebra: SuperAlgebra, h_ids: Iterable[str]) -> "Decomposition":
        h = frozenset(algebra.index(i) for i in h_ids)
        return cls(algebra, h, frozenset(range(algebra.dim)) - h)

    def indices(self, part: str) -> frozenset[int]:
        if part == "H":
            return self.h_indices
        if part == "E":
            return self.e_indices
        raise ValueError(f"part must be 'H' or 'E', got {part!r}")


def project_element(x: Element, dec: Decomposition, part: str) -> Element:
    return x.restrict(dec.indices(part))


@dataclass(frozen=True)
class Violation:
    kind: str  # "skew", "parity", "degree" or "jacobi"
    indices: tuple[int, ...]
    residual: Element | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    algebra: SuperAlgebra
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        ids = self.algebra.ids
        out = []
        for v in self.violations:
            names = "(" + ", ".join(ids[i] for i in v.indices) + ")"
            text = f"{v.kind} {names}"
            if v.residual is not None:
                text += f": residual {self.algebra.format_element(v.residual)}"
            if v.detail:
                text += f" [{v.detail}]"
            out.append(text)
        return out


def jacobiator(alg: SuperAlgebra, i: int, j: int, k: int) -> Element:
    """``[[x,y],z] - [x,[y,z]] - (-1)^{|y||z|} [[x,z],y]`` on basis elements."""
    x, y, z = Element.basis(i), Element.basis(j), Element.basis(k)
    br = alg._bracket_unchecked
    sign = -1 if alg.parity[j] * alg.parity[k] else 1
    return br(br(x, y), z) - br(x, br(y, z)) - br(br(x, z), y) * sign


def validate_superalgebra(alg: SuperAlgebra) -> ValidationReport:
    report = ValidationReport(alg)
    par, deg = alg.parity, alg.zdegree
    for (i, j), value in alg.structure.items():
        if i == j and par[i] == 0:
            report.violations.append(Violation("skew", (i, i), value, "bracket of an even element with itself"))
        bad = [k for k in value if par[k] != (par[i] + par[j]) % 2]
        if bad:
            report.violations.append(Violation("parity", (i, j), value.restrict(set(bad))))
        if deg is not None:
            bad = [k for k in value if deg[k] != deg[i] + deg[j]]
            if bad:
                report.violations.append(Violation("degree", (i, j), value.restrict(set(bad))))
    seen = set()
    for i, j, k in product(range(alg.dim), repeat=3):
        key = tuple(sorted((i, j, k)))
        if key in seen:
            continue
        r = jacobiator(alg, i, j, k)
        if r:
            seen.add(key)
            ids = alg.ids
            report.violations.append(Violation("jacobi", key, r, f"as [[{ids[i]},{ids[j]}],{ids[k]}]"))
    report.violations.sort(key=lambda v: (("skew", "parity", "degree", "jacobi").index(v.kind), v.indices))
    return report
