"""Standard test instances and seeded random generators.

Random Lie superalgebras are closures of homogeneous upper-triangular
supermatrices in gl(m|n); random DGLAs are tensor products ``g (x) A`` of a small
Lie algebra with a differential graded commutative algebra, followed by a random
change of basis in each degree.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

import sympy

from .algebra import BasisElement, Decomposition, Element, SuperAlgebra
from .operators import Operator, SymOperator, all_keys, canonical_keys
from .linfty import DGLA, LeibnizTable


def sl2() -> SuperAlgebra:
    return SuperAlgebra.from_brackets(
        [("e", 0, -1), ("h", 0, 0), ("f", 0, 1)],
        {("e", "h"): {"e": -2}, ("e", "f"): {"h": 1}, ("h", "f"): {"f": -2}},
        name="sl2",
    )


def sl2_decomposition() -> Decomposition:
    return Decomposition.from_ids(sl2(), ["h", "e"])


def gl11() -> SuperAlgebra:
    """gl(1|1) with even ``a, b`` and odd ``u, v``; ``[u, v] = a + b``."""
    return SuperAlgebra.from_brackets(
        [("a", 0), ("b", 0), ("u", 1), ("v", 1)],
        {("a", "u"): {"u": 1}, ("a", "v"): {"v": -1}, ("b", "u"): {"u": -1},
         ("b", "v"): {"v": 1}, ("u", "v"): {"a": 1, "b": 1}},
        name="gl11",
    )


def gl11_decomposition() -> Decomposition:
    return Decomposition.from_ids(gl11(), ["a", "b"])


def _q(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def _independent(vectors: Sequence[sympy.Matrix]) -> list[int]:
    """Indices of a maximal independent prefix-greedy subset."""
    chosen: list[int] = []
    cols: list[sympy.Matrix] = []
    for i, v in enumerate(vectors):
        if not any(v):
            continue
        trial = sympy.Matrix.hstack(*(cols + [v]))
        if trial.rank() == len(cols) + 1:
            chosen.append(i)
            cols.append(v)
    return chosen


class _Coordinates:
    """Exact coordinates with respect to a full-column-rank set of column vectors."""

    def __init__(self, columns: Sequence[sympy.Matrix]):
        self.A = sympy.Matrix.hstack(*columns)
        self.pinv = (self.A.T * self.A).inv() * self.A.T

    def __call__(self, v: sympy.Matrix) -> list[Fraction]:
        c = self.pinv * v
        if self.A * c != v:
            raise ValueError("vector outside the span")
        return [_q(x) for x in c]


# -- random Lie superalgebras ------------------------------------------------------

def _supermatrix(rng: random.Random, m: int, n: int, parity: int, strict: bool) -> sympy.Matrix:
    size = m + n
    M = sympy.zeros(size, size)
    for i in range(size):
        for j in range(size):
            if j < i or (strict and j == i):
                continue
            if ((i >= m) != (j >= m)) != bool(parity):
                continue
            if rng.random() < 0.6:
                M[i, j] = rng.randint(-2, 2)
    return M


def _super_commutator(X, px, Y, py):
    return X * Y - (-1) ** (px * py) * Y * X


def random_superalgebra(rng: random.Random, max_dim: int = 5, min_dim: int = 2, name: str = "") -> SuperAlgebra:
    """A random Lie superalgebra of dimension min_dim..max_dim.

    It is the span closed under brackets of two or three random homogeneous
    upper-triangular supermatrices.  Strictly upper-triangular generators
    give nilpotent algebras, otherwise the algebra is solvable.
    """
    while True:
        m = rng.randint(1, 3)
        n = rng.randint(0 if m > 1 else 1, 4 - m)
        strict = rng.random() < 0.6
        gens = []
        for _ in range(rng.randint(2, 3)):
            par = rng.randint(0, 1) if n else 0
            gens.append((_supermatrix(rng, m, n, par, strict), par))
        mats: list[tuple[sympy.Matrix, int]] = []
        flat: list[sympy.Matrix] = []

        def add(X, p) -> bool:
            v = X.reshape(len(X), 1)
            if not any(v):
                return False
            if flat and sympy.Matrix.hstack(*(flat + [v])).rank() == len(flat):
                return False
            mats.append((X, p))
            flat.append(v)
            return True

        for X, p in gens:
            add(X, p)
        i = 0
        too_big = False
        while i < len(mats):
            for j in range(i + 1):
                (X, px), (Y, py) = mats[i], mats[j]
                add(_super_commutator(X, px, Y, py), (px + py) % 2)
                if len(mats) > max_dim:
                    too_big = True
                    break
            if too_big:
                break
            i += 1
        if too_big or len(mats) < min_dim:
            continue
        coords = _Coordinates(flat)
        basis = [BasisElement(f"x{k}", p) for k, (_, p) in enumerate(mats)]
        structure = {}
        for a in range(len(mats)):
            for b in range(a, len(mats)):
                (X, px), (Y, py) = mats[a], mats[b]
                Z = _super_commutator(X, px, Y, py)
                c = coords(Z.reshape(len(Z), 1))
                v = Element({k: x for k, x in enumerate(c)})
                if v:
                    structure[(a, b)] = v
        return SuperAlgebra(basis, structure, name=name)


def change_basis(alg: SuperAlgebra, vectors: Sequence[Element], ids: Sequence[str]) -> SuperAlgebra:
    """The same algebra in a new homogeneous basis given in old coordinates."""
    n = alg.dim
    cols = [sympy.Matrix([sympy.Rational(v.coeff(i).numerator, v.coeff(i).denominator) for i in range(n)])
            for v in vectors]
    coords = _Coordinates(cols)
    if len(vectors) != n:
        raise ValueError("need a full basis")
    basis = []
    for v, id_ in zip(vectors, ids):
        p = alg.element_parity(v)
        if p is None:
            raise ValueError("basis vectors must be homogeneous")
        degs = {alg.zdegree[i] for i in v} if alg.zdegree is not None else {None}
        if len(degs) != 1:
            raise ValueError("basis vectors must be homogeneous in degree")
        basis.append(BasisElement(id_, p, degs.pop()))
    structure = {}
    for a in range(n):
        for b in range(a, n):
            w = alg.bracket(vectors[a], vectors[b])
            if not w:
                continue
            c = coords(sympy.Matrix([sympy.Rational(w.coeff(i).numerator, w.coeff(i).denominator) for i in range(n)]))
            structure[(a, b)] = Element({k: x for k, x in enumerate(c)})
    return SuperAlgebra(basis, structure, name=alg.name)


def _random_homogeneous(rng: random.Random, alg: SuperAlgebra, parity: int, density: float = 1.0) -> Element:
    idx = [i for i in range(alg.dim) if alg.parity[i] == parity]
    return Element({i: rng.randint(-2, 2) for i in idx if rng.random() < density})


def random_decomposition(rng: random.Random, alg: SuperAlgebra) -> Decomposition:
    """A random subalgebra H with E spanned by leftover old basis vectors.

    H is the bracket closure of one or two random homogeneous elements (a
    proper subalgebra, possibly zero); the
    algebra is rewritten in a basis ``h0, h1, ...`` of H followed by E.
    """
    n = alg.dim
    h_vecs: list[Element] = []

    def vec(x: Element) -> sympy.Matrix:
        return sympy.Matrix([sympy.Rational(x.coeff(i).numerator, x.coeff(i).denominator) for i in range(n)])

    def add(x: Element) -> None:
        if x and len(_independent([vec(v) for v in h_vecs + [x]])) == len(h_vecs) + 1:
            h_vecs.append(x)

    for _ in range(10):
        h_vecs.clear()
        for _ in range(rng.randint(1, 2)):
            x = _random_homogeneous(rng, alg, rng.randint(0, 1), 0.5)
            add(x or Element.basis(rng.randrange(n)))
        i = 0
        while i < len(h_vecs):
            for j in range(i + 1):
                add(alg.bracket(h_vecs[i], h_vecs[j]))
            i += 1
        if len(h_vecs) < n:
            break
    else:
        h_vecs.clear()
    e_vecs: list[Element] = []
    for i in range(n):
        trial = h_vecs + e_vecs + [Element.basis(i)]
        if len(_independent([vec(v) for v in trial])) == len(trial):
            e_vecs.append(Element.basis(i))
    ids = [f"h{k}" for k in range(len(h_vecs))] + [alg.ids[next(iter(v))] for v in e_vecs]
    new = change_basis(alg, h_vecs + e_vecs, ids)
    return Decomposition(new, frozenset(range(len(h_vecs))), frozenset(range(len(h_vecs), n)))


def random_instance(rng: random.Random, max_dim: int = 5) -> tuple[Decomposition, Element]:
    """A random decomposition together with a random homogeneous element."""
    dec = random_decomposition(rng, random_superalgebra(rng, max_dim))
    alg = dec.algebra
    par = rng.randint(0, 1) if any(alg.parity) else 0
    a = _random_homogeneous(rng, alg, par)
    if not a:
        a = Element.basis(rng.randrange(alg.dim))
    return dec, a


def random_operator(rng: random.Random, alg: SuperAlgebra, order: int, parity: int,
                    symmetric: bool = True, density: float = 0.5) -> Operator:
    """A random homogeneous operator with small integer values."""
    keys = canonical_keys(alg, order) if symmetric else all_keys(alg, order)
    vals = {}
    for key in keys:
        if rng.random() >= density:
            continue
        out = (parity + sum(alg.parity[k] for k in key)) % 2
        v = _random_homogeneous(rng, alg, out, 0.7)
        if v:
            vals[key] = v
    return (SymOperator if symmetric else Operator)(alg, order, vals)


# -- random DGLAs -------------------------------------------------------------------

# small graded Lie superalgebras g: basis (id, degree) with parity = degree mod 2
_LIE = {
    "r2": ([("p", 0), ("q", 0)], {("p", "q"): {"q": 1}}),
    "heis": ([("p", 0), ("q", 0), ("z", 0)], {("p", "q"): {"z": 1}}),
    "sl2": ([("e", 0), ("h", 0), ("f", 0)], {("e", "h"): {"e": -2}, ("e", "f"): {"h": 1}, ("h", "f"): {"f": -2}}),
    "ab2": ([("p", 0), ("q", 0)], {}),
    "ab1": ([("p", 0)], {}),
    # graded: h acts with the degree as weight, [u, u] = w
    "b3": ([("h", 0), ("u", 1), ("w", 2)], {("h", "u"): {"u": 1}, ("h", "w"): {"w": 2}, ("u", "u"): {"w": 1}}),
    "b2": ([("h", 0), ("u", 1)], {("h", "u"): {"u": 1}}),
    "n3": ([("p", 1), ("q", 1), ("z", 2)], {("p", "q"): {"z": 1}}),
    "u2": ([("u", 1), ("w", 2)], {("u", "u"): {"w": 1}}),
}


def lie_algebra(name: str) -> SuperAlgebra:
    basis, br = _LIE[name]
    return SuperAlgebra.from_brackets([(i, d % 2, d) for i, d in basis], br, name=name)


# graded commutative algebras: (basis (id, degree), products, differential)
# products (a, b) -> {c: coef} for all orderings; differential a -> {b: coef}
_CDGA = {
    # <1, xi>, d xi = c
    "A1": ([("1", 0), ("xi", 1)],
           {("1", "1"): {"1": 1}, ("1", "xi"): {"xi": 1}, ("xi", "1"): {"xi": 1}},
           {"xi": {"1": 1}}),
    # <xi, y>, d y = c xi, all products zero
    "A2": ([("xi", 1), ("y", 2)], {}, {"y": {"xi": 1}}),
    # <y, w>, d w = c y, all products zero
    "A3": ([("y", 2), ("w", 3)], {}, {"w": {"y": 1}}),
    # <1, xi, y, xi y>, d xi = c, d(xi y) = c y
    "A4": ([("1", 0), ("xi", 1), ("y", 2), ("xiy", 3)],
           {("1", "1"): {"1": 1}, ("1", "xi"): {"xi": 1}, ("xi", "1"): {"xi": 1},
            ("1", "y"): {"y": 1}, ("y", "1"): {"y": 1}, ("1", "xiy"): {"xiy": 1},
            ("xiy", "1"): {"xiy": 1}, ("xi", "y"): {"xiy": 1}, ("y", "xi"): {"xiy": 1}},
           {"xi": {"1": 1}, "xiy": {"y": 1}}),
}


def tensor_dgla(lie: str, cdga: str, c: Fraction | int = 1) -> DGLA:
    """``g (x) A`` for a graded Lie superalgebra g and a graded commutative A.

    ``[x (x) a, y (x) b] = (-1)^{|a||y|} [x, y] (x) ab`` and
    ``delta(x (x) a) = (-1)^{|x|} x (x) c da``; degrees add.
    """
    g = lie_algebra(lie)
    abasis, aprod, adiff = _CDGA[cdga]
    c = Fraction(c)
    ai = {a: k for k, (a, _) in enumerate(abasis)}
    adeg = [d for _, d in abasis]
    gdeg = g.zdegree
    order = sorted(((ka, kg) for ka in range(len(abasis)) for kg in range(g.dim)),
                   key=lambda t: (adeg[t[0]] + gdeg[t[1]], t[0], t[1]))
    pos = {t: k for k, t in enumerate(order)}
    basis = []
    for ka, kg in order:
        d = adeg[ka] + gdeg[kg]
        name = g.ids[kg] if abasis[ka][0] == "1" else f"{g.ids[kg]}{abasis[ka][0]}"
        basis.append(BasisElement(name, d % 2, d))
    structure = {}
    for s, (ka, kg) in enumerate(order):
        for t in range(s, len(order)):
            kb, kh = order[t]
            prod = aprod.get((abasis[ka][0], abasis[kb][0]))
            lie_v = g.bracket_basis(kg, kh)
            if not prod or not lie_v:
                continue
            sign = -1 if (adeg[ka] % 2) * g.parity[kh] else 1
            out = {}
            for a_id, ac in prod.items():
                for g_idx, gc in lie_v.items():
                    k = pos[(ai[a_id], g_idx)]
                    out[k] = out.get(k, 0) + sign * Fraction(ac) * gc
            v = Element(out)
            if v:
                structure[(s, t)] = v
    differential = {}
    for s, (ka, kg) in enumerate(order):
        d = adiff.get(abasis[ka][0])
        if d:
            sign = -1 if g.parity[kg] else 1
            differential[s] = Element({pos[(ai[b], kg)]: sign * c * w for b, w in d.items()})
    alg = SuperAlgebra(basis, structure, name=f"{lie}x{cdga}")
    return DGLA(alg, differential)


def transform_dgla(dgla: DGLA, vectors: Sequence[Element], ids: Sequence[str]) -> DGLA:
    alg = dgla.underlying
    new = change_basis(alg, vectors, ids)
    n = alg.dim
    cols = [sympy.Matrix([sympy.Rational(v.coeff(i).numerator, v.coeff(i).denominator) for i in range(n)])
            for v in vectors]
    coords = _Coordinates(cols)
    differential = {}
    for k, v in enumerate(vectors):
        w = dgla.delta(v)
        if w:
            c = coords(sympy.Matrix([sympy.Rational(w.coeff(i).numerator, w.coeff(i).denominator) for i in range(n)]))
            differential[k] = Element({j: x for j, x in enumerate(c)})
    return DGLA(new, differential)


def random_dgla(rng: random.Random, with_degree_zero: bool = True, max_dim: int = 6) -> DGLA:
    """A random DGLA ``g (x) A`` of dimension at most ``max_dim``, in a scrambled basis.

    With ``with_degree_zero`` false the result lives in degrees 1..3 only.
    """
    choices = []
    for lie, (gbasis, _) in _LIE.items():
        for cd, (abasis, _, _) in _CDGA.items():
            if len(gbasis) * len(abasis) > max_dim:
                continue
            degs = {dg + da for _, dg in gbasis for _, da in abasis}
            if (0 in degs) if with_degree_zero else (min(degs) >= 1 and max(degs) <= 3):
                choices.append((lie, cd))
    lie, cd = rng.choice(choices)
    c = Fraction(rng.choice([1, 2, -1, 3, Fraction(1, 2)]))
    base = tensor_dgla(lie, cd, c)
    alg = base.underlying
    vectors: list[Element] = []
    for d in sorted(set(alg.zdegree)):
        block = [i for i in range(alg.dim) if alg.zdegree[i] == d]
        while True:
            M = sympy.Matrix(len(block), len(block), lambda i, j: rng.randint(-1, 2) if i != j else rng.choice([1, -1, 2]))
            if M.det() != 0:
                break
        for r in range(len(block)):
            vectors.append(Element({block[j]: int(M[r, j]) for j in range(len(block))}))
    ids = [f"y{k}" for k in range(alg.dim)]
    return transform_dgla(base, vectors, ids)


# -- random Leibniz tables -----------------------------------------------------------

def _lie3(rng: random.Random) -> list[list[Element]]:
    ids, br = rng.choice([(["e", "h", "f"], _LIE["sl2"][1]), (["p", "q", "z"], _LIE["heis"][1]),
                          (["p", "q", "z"], {("p", "q"): {"q": 1}}),
                          (["p", "q", "z"], {("p", "q"): {"q": 1}, ("p", "z"): {"z": 1}}),
                          (["p", "q", "z"], {})])
    alg = SuperAlgebra.from_brackets([(i, 0) for i in ids], br)
    while True:
        M = sympy.Matrix(3, 3, lambda i, j: rng.randint(-2, 2))
        if M.det() != 0:
            break
    vecs = [Element({j: int(M[r, j]) for j in range(3)}) for r in range(3)]
    new = change_basis(alg, vecs, ["e1", "e2", "e3"])
    return [[new.bracket_basis(i, j) for j in range(3)] for i in range(3)]


def random_leibniz_table(rng: random.Random, kind: str | None = None) -> tuple[LeibnizTable, str]:
    """A random 3-dimensional product table and the family it was drawn from.

    Families: ``lie`` (Lie algebras in a random basis), ``central`` (products
    landing in a common annihilator, always Leibniz) and ``sparse`` (random).
    """
    kind = kind or rng.choice(["lie", "central", "sparse", "sparse"])
    ids = ("e1", "e2", "e3")
    if kind == "lie":
        return LeibnizTable.from_matrix(ids, _lie3(rng)), kind
    products = {}
    if kind == "central":
        for i in range(2):
            for j in range(2):
                if rng.random() < 0.6:
                    products[(i, j)] = Element({2: rng.randint(-2, 2)})
    elif kind == "sparse":
        for i in range(3):
            for j in range(3):
                if rng.random() < 0.3:
                    products[(i, j)] = Element({k: rng.randint(-1, 1) for k in range(3)})
    else:
        raise ValueError(f"unknown family {kind!r}")
    return LeibnizTable(ids, {k: v for k, v in products.items() if v}), kind
