"""L-infinity brackets from differential graded Lie algebras, and Leibniz algebras.

A DGLA ``L`` (nonnegatively graded, differential of degree -1) is embedded in
``G = <Theta> + L`` with ``[Theta, x] = delta x``.  Splitting ``H = <Theta> + L_0``
and ``E = L_1 + L_2 + ...``, the realisation of ``Theta`` gives symmetric
brackets ``Q_p`` of degree -1 on E satisfying ``[[Q, Q]] = 0``.  They agree
with the closed Bernoulli-number formula of :func:`getzler_brackets`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb, factorial
from typing import Mapping, Sequence

import sympy

from .algebra import (
    ZERO,
    BasisElement,
    Decomposition,
    Element,
    SuperAlgebra,
    accumulate,
    format_rational,
    validate_superalgebra,
)
from .operators import (
    Operator,
    SymOperator,
    canonical_keys,
    circ,
    koszul_sort,
    super_commutator,
    zero_operator,
)
from .realisation import Realiser


class DGLAError(ValueError):
    pass


class LeibnizFormatError(ValueError):
    pass


# -- Bernoulli numbers and the coefficients C_p ---------------------------------

_BERNOULLI = [Fraction(1)]


def bernoulli_minus(n: int) -> Fraction:
    """Bernoulli number with ``B_1 = -1/2``, from ``sum_{k<=n} C(n+1,k) B_k = 0``."""
    if n < 0:
        raise ValueError("Bernoulli index must be >= 0")
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        s = sum(comb(m + 1, k) * _BERNOULLI[k] for k in range(m))
        _BERNOULLI.append(-s / (m + 1))
    return _BERNOULLI[n]


def _cp_ascending(p: int) -> Fraction:
    if p < 2:
        raise ValueError("the ascending form needs p >= 2")
    total = Fraction(1, factorial(p))
    inner = range(2, p)
    for k in range(1, p - 1):
        for ns in combinations(inner, k):
            term = Fraction(1, factorial(ns[0]))
            for a, b in zip(ns, ns[1:] + (p,)):
                term *= Fraction(-1, factorial(b - a + 1))
            total += term
    return total


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def _cp_composition(p: int) -> Fraction:
    if p < 2:
        raise ValueError("the composition form needs p >= 2")
    total = Fraction(0)
    for ms in _compositions(p - 1):
        term = Fraction(1)
        for m in ms:
            term *= Fraction(-1, factorial(m + 1))
        total += term
    return -total


def _cp_closed(p: int) -> Fraction:
    if p < 1:
        raise ValueError("the closed form needs p >= 1")
    return -bernoulli_minus(p - 1) / factorial(p - 1)


def coefficient_Cp(p: int, form: str = "closed") -> Fraction:
    """The coefficient ``C_p`` of the p-bracket, in one of three equivalent forms.

    ``ascending`` sums over ``1 < n_1 < ... < n_k < p``; ``composition`` sums over
    compositions of ``p - 1``; ``closed`` is ``-B_{p-1} / (p-1)!``.
    """
    forms = {"ascending": _cp_ascending, "composition": _cp_composition, "closed": _cp_closed}
    if form not in forms:
        raise ValueError(f"unknown form {form!r}")
    return forms[form](p)


# -- DGLAs --------------------------------------------------------------------

@dataclass
class DGLA:
    """Graded Lie superalgebra with consistent Z-grading and a degree -1 differential."""

    underlying: SuperAlgebra
    differential: Mapping[int, Element] = field(default_factory=dict)

    def __post_init__(self):
        alg = self.underlying
        if alg.zdegree is None:
            raise DGLAError("a DGLA needs a degree on every basis element")
        for i, b in enumerate(alg.basis):
            if b.parity != b.zdegree % 2:
                raise DGLAError(f"{b.id!r}: parity must equal degree mod 2")
            if b.zdegree < 0:
                raise DGLAError(f"{b.id!r}: negative degrees are not supported")
        clean = {}
        for i, v in dict(self.differential).items():
            alg._check_element(v)
            if v:
                clean[i] = v
        self.differential = clean

    def delta(self, x: Element) -> Element:
        out: dict[int, Fraction] = {}
        for i, c in x.items():
            d = self.differential.get(i)
            if d is not None:
                accumulate(out, d, c)
        return Element._raw(out)

    def problems(self) -> list[str]:
        """Every violated axiom, as readable lines; empty when valid."""
        alg = self.underlying
        ids = alg.ids
        deg = alg.zdegree
        out = validate_superalgebra(alg).lines()
        for i, v in self.differential.items():
            bad = [k for k in v if deg[k] != deg[i] - 1]
            if bad:
                out.append(f"differential of {ids[i]} is not of degree -1")
        for i in range(alg.dim):
            dd = self.delta(self.delta(Element.basis(i)))
            if dd:
                out.append(f"delta^2 {ids[i]} = {alg.format_element(dd)}")
        br = alg._bracket_unchecked
        for i, j in product(range(alg.dim), repeat=2):
            x, y = Element.basis(i), Element.basis(j)
            sign = -1 if alg.parity[i] else 1
            lhs = self.delta(br(x, y))
            rhs = br(self.delta(x), y) + br(x, self.delta(y)) * sign
            if lhs != rhs:
                out.append(f"delta is not a derivation on ({ids[i]}, {ids[j]}): "
                           f"residual {alg.format_element(lhs - rhs)}")
        return out

    def positive_part(self) -> list[int]:
        return [i for i, d in enumerate(self.underlying.zdegree) if d >= 1]


def _theta_id(ids: Sequence[str]) -> str:
    name = "Theta"
    while name in ids:
        name += "'"
    return name


def embed_dgla(dgla: DGLA) -> tuple[SuperAlgebra, Decomposition, Element]:
    """``G = <Theta> + L`` with ``[Theta, Theta] = 0`` and ``[Theta, x] = delta x``.

    Theta comes first in the basis, so the basis index of ``L``'s element i is i+1.
    """
    problems = dgla.problems()
    if problems:
        raise DGLAError("invalid DGLA: " + "; ".join(problems))
    L = dgla.underlying
    basis = [BasisElement(_theta_id(L.ids), 1, -1)] + list(L.basis)

    def shift(x: Element) -> Element:
        return Element._raw({i + 1: c for i, c in x.items()})

    structure = {(i + 1, j + 1): shift(v) for (i, j), v in L.structure.items()}
    for i, v in dgla.differential.items():
        structure[(0, i + 1)] = shift(v)
    G = SuperAlgebra(basis, structure, name=f"{L.name}+Theta" if L.name else "")
    h = frozenset([0] + [i + 1 for i, d in enumerate(L.zdegree) if d <= 0])
    dec = Decomposition(G, h, frozenset(range(G.dim)) - h)
    return G, dec, Element.basis(0)


@dataclass
class LInftyStructure:
    """Brackets ``Q_1, ..., Q_max`` on the positive part ``L_1 + L_2 + ...``.

    ``space`` is the sub-superalgebra on that part; ``index_map`` sends its
    basis indices back to those of the DGLA.
    """

    space: SuperAlgebra
    brackets: dict[int, SymOperator]
    max_arity: int
    index_map: tuple[int, ...]

    def bracket(self, p: int) -> SymOperator:
        if p > self.max_arity:
            raise ValueError(f"arity {p} beyond truncation {self.max_arity}")
        return self.brackets.get(p) or zero_operator(self.space, p)


def positive_subalgebra(dgla: DGLA) -> tuple[SuperAlgebra, tuple[int, ...]]:
    L = dgla.underlying
    keep = tuple(dgla.positive_part())
    pos = {old: new for new, old in enumerate(keep)}
    structure = {}
    for (i, j), v in L.structure.items():
        if i in pos and j in pos:
            structure[(pos[i], pos[j])] = Element._raw({pos[k]: c for k, c in v.items()})
    space = SuperAlgebra([L.basis[i] for i in keep], structure, name=L.name)
    return space, keep


def getzler_brackets(dgla: DGLA, pmax: int) -> LInftyStructure:
    """Brackets ``{x} = delta x - D x`` and ``{x_1..x_p} = -B_{p-1}/(p-1)! [D x_<1, x_2, ..., x_p>]``.

    ``D`` is ``delta`` on ``L_1`` and zero elsewhere; the nested bracket is
    graded-symmetrised over all arguments.
    """
    if pmax < 1:
        raise ValueError("pmax must be >= 1")
    L = dgla.underlying
    deg = L.zdegree
    par = L.parity
    space, keep = positive_subalgebra(dgla)
    pos = {old: new for new, old in enumerate(keep)}

    def to_space(x: Element) -> Element:
        if any(i not in pos for i in x):
            raise AssertionError("bracket left the positive part")
        return Element._raw({pos[i]: c for i, c in x.items()})

    D = {i: v for i, v in dgla.differential.items() if deg[i] == 1}
    brackets: dict[int, SymOperator] = {}
    q1 = {}
    for new, old in enumerate(keep):
        if deg[old] >= 2 and old in dgla.differential:
            q1[(new,)] = to_space(dgla.differential[old])
    brackets[1] = SymOperator._trusted(space, 1, q1)
    br = L._bracket_unchecked

    for p in range(2, pmax + 1):
        coef = coefficient_Cp(p, "closed")
        norm = Fraction(1, factorial(p))
        vals = {}
        for key in canonical_keys(space, p):
            orig = tuple(keep[k] for k in key)
            out: dict[int, Fraction] = {}
            for seq in set(permutations(orig)):
                first = D.get(seq[0])
                if first is None:
                    continue
                sign, _ = koszul_sort(seq, par)
                chain = first
                for x in seq[1:]:
                    chain = br(chain, Element.basis(x))
                    if not chain:
                        break
                if chain:
                    accumulate(out, chain, norm * sign)
            if out:
                # equal arguments give identical sequences; count them once per
                # ordering of positions
                mult = 1
                for k in set(orig):
                    mult *= factorial(orig.count(k))
                vals[key] = to_space(Element._raw(out)) * (coef * mult)
        brackets[p] = SymOperator._trusted(space, p, vals)
    return LInftyStructure(space, brackets, pmax, keep)


def realised_brackets(dgla: DGLA, pmax: int) -> LInftyStructure:
    """``Q_p = Theta(p)`` from the realisation, restricted to the positive part."""
    G, dec, theta = embed_dgla(dgla)
    space, keep = positive_subalgebra(dgla)
    g_to_space = {old + 1: new for new, old in enumerate(keep)}
    r = Realiser(theta, dec)
    brackets = {}
    for p in range(1, pmax + 1):
        vals = {}
        for key, val in r.part(p).items():
            if all(k in g_to_space for k in key):
                vals[tuple(g_to_space[k] for k in key)] = Element._raw({g_to_space[i]: c for i, c in val.items()})
        brackets[p] = SymOperator._trusted(space, p, vals)
    return LInftyStructure(space, brackets, pmax, keep)


@dataclass
class ArityResidual:
    arity: int
    residual: Operator

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()


def check_linfty(s: LInftyStructure, arity_max: int) -> list[ArityResidual]:
    """The order-r components ``sum_{p+q=r+1} [[Q_p, Q_q]]`` of ``[[Q, Q]]`` for ``r <= arity_max``."""
    if arity_max < 1:
        raise ValueError("arity_max must be >= 1")
    if arity_max > s.max_arity:
        raise ValueError(f"need brackets up to arity {arity_max}, structure has {s.max_arity}")
    out = []
    for r in range(1, arity_max + 1):
        total = zero_operator(s.space, r)
        for p in range(1, r + 1):
            q = r + 1 - p
            A, B = s.brackets.get(p), s.brackets.get(q)
            if A is None or B is None or A.is_zero() or B.is_zero():
                continue
            total = total + super_commutator(A, B)
        out.append(ArityResidual(r, total))
    return out


def compare_brackets(a: LInftyStructure, b: LInftyStructure, pmax: int) -> list[tuple[int, SymOperator]]:
    """Differences ``a.Q_p - b.Q_p``; both must live on the same basis."""
    if a.space.basis != b.space.basis:
        raise ValueError("structures live on different spaces")
    out = []
    for p in range(1, pmax + 1):
        other = SymOperator._trusted(a.space, p, dict(b.bracket(p).items()))
        out.append((p, a.bracket(p) - other))
    return out


# -- Leibniz algebras -------------------------------------------------------------

@dataclass
class LeibnizTable:
    ids: tuple[str, ...]
    products: dict[tuple[int, int], Element]
    name: str = ""

    def __post_init__(self):
        self.ids = tuple(self.ids)
        n = len(self.ids)
        for (i, j), v in self.products.items():
            if not (0 <= i < n and 0 <= j < n) or any(not 0 <= k < n for k in v):
                raise LeibnizFormatError(f"product entry {(i, j)} refers to indices outside a {n}x{n} table")

    @property
    def dim(self) -> int:
        return len(self.ids)

    @classmethod
    def from_matrix(cls, ids: Sequence[str], table: Sequence[Sequence[Element]], name: str = "") -> "LeibnizTable":
        n = len(ids)
        if len(table) != n or any(len(row) != n for row in table):
            raise LeibnizFormatError("product table must be square and match the basis")
        return cls(tuple(ids), {(i, j): table[i][j] for i in range(n) for j in range(n) if table[i][j]}, name)

    def mul(self, x: Element, y: Element) -> Element:
        out: dict[int, Fraction] = {}
        for i, a in x.items():
            for j, b in y.items():
                v = self.products.get((i, j))
                if v is not None:
                    accumulate(out, v, a * b)
        return Element._raw(out)

    def carrier(self) -> SuperAlgebra:
        """The all-odd space the product lives on (its own bracket is zero)."""
        return SuperAlgebra([BasisElement(i, 1) for i in self.ids], {}, name=self.name)


def leibniz_identity_holds(t: LeibnizTable) -> bool:
    """Brute force ``x(yz) = (xy)z + y(xz)`` over all basis triples."""
    n = t.dim
    e = [Element.basis(i) for i in range(n)]
    m = t.mul
    return all(m(e[i], m(e[j], e[k])) == m(m(e[i], e[j]), e[k]) + m(e[j], m(e[i], e[k]))
               for i, j, k in product(range(n), repeat=3))


def leibniz_to_theta(t: LeibnizTable) -> tuple[Operator, bool]:
    """The odd bilinear ``Theta(x, y) = x . y`` and whether ``Theta o Theta = 0``."""
    carrier = t.carrier()
    theta = Operator(carrier, 2, t.products)
    return theta, circ(theta, theta).is_zero()


def _sym(q: Fraction) -> sympy.Rational:
    return sympy.Rational(q.numerator, q.denominator)


def _frac(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def leibniz_to_dgla(t: LeibnizTable) -> DGLA:
    """The degree <= 1 DGLA of a Leibniz algebra.

    Degree 0 is spanned by the left multiplications ``L_x``, degree 1 is the
    algebra modulo the span of symmetrised products ``x.y + y.x``; the bracket is
    ``[L_x, L_y] = L_{x.y}``, ``[L_x, y] = x.y`` and the differential sends
    ``y`` to ``L_y``.  Raises :class:`DGLAError` if the table is not Leibniz.
    """
    _, ok = leibniz_to_theta(t)
    if not ok:
        raise DGLAError("the product does not satisfy the Leibniz identity")
    n = t.dim
    e = [Element.basis(i) for i in range(n)]

    def vec(x: Element) -> list:
        return [_sym(x.coeff(i)) for i in range(n)]

    def left_mult(x: Element) -> list:
        return [_sym(t.mul(x, e[j]).coeff(i)) for j in range(n) for i in range(n)]

    # degree 0: independent left multiplications among the generators
    lm = [left_mult(e[i]) for i in range(n)]
    gens: list[int] = []
    for i in range(n):
        cand = gens + [i]
        if sympy.Matrix([lm[g] for g in cand]).rank() == len(cand):
            gens = cand
    # degree 1: complement of the span of symmetrised products
    sym_rows = [vec(t.mul(e[i], e[j]) + t.mul(e[j], e[i])) for i in range(n) for j in range(i, n)]
    kbasis: list[list] = []
    for row in sym_rows:
        if sympy.Matrix(kbasis + [row]).rank() > len(kbasis):
            kbasis.append(row)
    comp: list[int] = []
    for i in range(n):
        rows = kbasis + [vec(e[c]) for c in comp + [i]]
        if sympy.Matrix(rows).rank() == len(rows):
            comp.append(i)
    full = sympy.Matrix(kbasis + [vec(e[c]) for c in comp])
    full_inv = full.inv() if full.rows else full

    def quotient(x: Element) -> Element:
        # coordinates along the complement after removing the symmetric part
        if not comp:
            return ZERO
        coords = sympy.Matrix([vec(x)]) * full_inv
        off = len(kbasis)
        return Element({len(gens) + k: _frac(coords[off + k]) for k in range(len(comp))})

    if gens:
        gen_mat = sympy.Matrix([lm[g] for g in gens]).T

    def lm_coords(x: Element) -> Element:
        target = sympy.Matrix(left_mult(x))
        if not any(target):
            return ZERO
        sol = gen_mat.solve_least_squares(target) if gen_mat.rows != gen_mat.cols else gen_mat.solve(target)
        if gen_mat * sol != target:
            raise AssertionError("left multiplication outside the generated span")
        return Element({k: _frac(sol[k]) for k in range(len(gens))})

    used = set(t.ids)

    def fresh(base: str) -> str:
        name = base
        while name in used:
            name += "'"
        used.add(name)
        return name

    basis = [BasisElement(fresh(f"L_{t.ids[g]}"), 0, 0) for g in gens]
    basis += [BasisElement(t.ids[c], 1, 1) for c in comp]
    structure: dict[tuple[int, int], Element] = {}
    for a, ga in enumerate(gens):
        for b in range(a, len(gens)):
            v = lm_coords(t.mul(e[ga], e[gens[b]]))
            if v:
                structure[(a, b)] = v
        for k, c in enumerate(comp):
            v = quotient(t.mul(e[ga], e[c]))
            if v:
                structure[(a, len(gens) + k)] = v
    differential = {}
    for k, c in enumerate(comp):
        v = lm_coords(e[c])
        if v:
            differential[len(gens) + k] = v
    alg = SuperAlgebra(basis, structure, name=t.name)
    return DGLA(alg, differential)


def format_operator_table(op: Operator, name: str) -> list[str]:
    return op.format_lines(name)


def format_rationals(values) -> list[str]:
    return [format_rational(v) for v in values]
