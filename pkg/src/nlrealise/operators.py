"""Multilinear operators on a Lie superalgebra and their products and brackets.

Two storage forms share one interface (``value(key)`` on a tuple of basis
indices):

* :class:`Operator` keeps a value for every argument tuple and assumes no
  symmetry.  Composites such as ``A o B`` generally land here.
* :class:`SymOperator` is graded-symmetric and keeps one value per canonical
  (nondecreasing) multi-index.  Other orderings are recovered with the Koszul
  sign, which counts transpositions of two odd arguments.

Operators are curried from the left: ``A(x1, ..., xp) = A(x1)(x2)...(xp)``, so
partial application in the first slot carries no sign.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from math import factorial
from typing import Callable, Iterable, Mapping

from .algebra import ZERO, Decomposition, Element, SuperAlgebra, accumulate

Key = tuple[int, ...]


class ArityError(ValueError):
    pass


class CompositionError(ValueError):
    """Raised for ``x o y`` with two order-zero operands, which is left undefined."""


def koszul_sort(key: Key, parity: tuple[int, ...]) -> tuple[int, Key | None]:
    """Sort ``key`` and return ``(sign, sorted_key)``.

    The sign is ``(-1)^e`` with ``e`` the number of inverted pairs of odd
    entries.  A repeated odd index gives ``(0, None)``: graded symmetry forces
    the value there to vanish.
    """
    odd = [k for k in key if parity[k]]
    inv = 0
    for a in range(len(odd)):
        oa = odd[a]
        for b in range(a + 1, len(odd)):
            if oa > odd[b]:
                inv += 1
            elif oa == odd[b]:
                return 0, None
    return (-1 if inv & 1 else 1), tuple(sorted(key))


def canonical_keys(alg: SuperAlgebra, order: int, indices: Iterable[int] | None = None):
    pool = sorted(indices) if indices is not None else range(alg.dim)
    par = alg.parity
    for key in combinations_with_replacement(pool, order):
        if any(par[key[t]] and key[t] == key[t + 1] for t in range(order - 1)):
            continue
        yield key


def all_keys(alg: SuperAlgebra, order: int, indices: Iterable[int] | None = None):
    pool = sorted(indices) if indices is not None else range(alg.dim)
    return product(pool, repeat=order)


class Operator:
    """A p-linear map ``G^p -> G`` with a value stored for each argument tuple."""

    symmetric = False

    def __init__(self, algebra: SuperAlgebra, order: int, values: Mapping[Key, Element] | None = None):
        if order < 0:
            raise ValueError("operator order must be >= 0")
        self.algebra = algebra
        self.order = order
        clean: dict[Key, Element] = {}
        for key, val in (values or {}).items():
            key = tuple(key)
            if len(key) != order:
                raise ArityError(f"key {key} has length {len(key)}, expected {order}")
            if any(not 0 <= k < algebra.dim for k in key):
                raise ValueError(f"key {key} out of range")
            if not isinstance(val, Element):
                val = Element(val)
            algebra._check_element(val)
            if val:
                clean[self._check_key(key, val)] = val
        self._v = clean
        self._parity: int | None | str = "?"

    def _check_key(self, key: Key, val: Element) -> Key:
        return key

    @classmethod
    def _trusted(cls, algebra: SuperAlgebra, order: int, values: dict[Key, Element]):
        op = cls.__new__(cls)
        op.algebra = algebra
        op.order = order
        op._v = values
        op._parity = "?"
        return op

    # -- access -------------------------------------------------------------
    def value(self, key: Key) -> Element:
        return self._v.get(key, ZERO)

    def items(self):
        return self._v.items()

    def __len__(self) -> int:
        return len(self._v)

    def is_zero(self) -> bool:
        return not self._v

    @property
    def parity(self) -> int | None:
        """Parity of a homogeneous operator, 0 for zero, ``None`` if mixed."""
        if self._parity == "?":
            par = self.algebra.parity
            seen = set()
            for key, val in self._v.items():
                s = sum(par[k] for k in key)
                for out in val:
                    seen.add((par[out] + s) % 2)
            self._parity = None if len(seen) > 1 else (seen.pop() if seen else 0)
        return self._parity

    def homogeneous_parts(self) -> list["Operator"]:
        if self.parity is not None:
            return [self]
        par = self.algebra.parity
        parts: list[dict[Key, dict[int, Fraction]]] = [{}, {}]
        for key, val in self._v.items():
            s = sum(par[k] for k in key)
            for out, c in val.items():
                parts[(par[out] + s) % 2].setdefault(key, {})[out] = c
        return [type(self)._trusted(self.algebra, self.order, {k: Element._raw(v) for k, v in d.items()})
                for d in parts if d]

    def __call__(self, *args: Element) -> Element:
        return evaluate_operator(self, list(args))

    def partial(self, x: Element) -> "Operator":
        """``A(x)``: fill the first slot, leaving an operator of order p-1."""
        if self.order == 0:
            raise ArityError("cannot apply an order-0 operator")
        cls = type(self)
        keys = canonical_keys if self.symmetric else all_keys

        def fn(rest: Key) -> Element:
            out: dict[int, Fraction] = {}
            for c, coef in x.items():
                accumulate(out, self.value((c,) + rest), coef)
            return Element._raw(out)

        return _tabulate(self.algebra, self.order - 1, fn, cls is SymOperator, keys=keys)

    def to_raw(self) -> "Operator":
        return self

    # -- linear structure ---------------------------------------------------
    def _combine(self, other: "Operator", sign: int) -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise ValueError("operators live on different algebras")
        if other.order != self.order:
            # a zero operator has no meaningful order
            if other.is_zero():
                return self
            if self.is_zero():
                return other if sign > 0 else -other
            raise ValueError("operators must share order to be added")
        if self.symmetric and other.symmetric:
            a, b, cls = self, other, SymOperator
        else:
            a, b, cls = self.to_raw(), other.to_raw(), Operator
        vals = dict(a._v)
        for key, val in b._v.items():
            new = vals.get(key, ZERO) + (val if sign > 0 else -val)
            if new:
                vals[key] = new
            else:
                vals.pop(key, None)
        return cls._trusted(self.algebra, self.order, vals)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, scalar) -> "Operator":
        s = Fraction(scalar)
        if not s:
            return type(self)._trusted(self.algebra, self.order, {})
        return type(self)._trusted(self.algebra, self.order, {k: v * s for k, v in self._v.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Operator):
            return NotImplemented
        if other.algebra is not self.algebra:
            return False
        if other.order != self.order:
            return self.is_zero() and other.is_zero()
        if self.symmetric and other.symmetric:
            return self._v == other._v
        return self.to_raw()._v == other.to_raw()._v

    __hash__ = None  # mutable-looking container semantics; compare by value

    def __repr__(self) -> str:
        kind = "SymOperator" if self.symmetric else "Operator"
        return f"{kind}(order={self.order}, parity={self.parity}, entries={len(self._v)})"

    def format_lines(self, name: str = "") -> list[str]:
        ids = self.algebra.ids
        lines = []
        for key in sorted(self._v):
            args = ",".join(ids[k] for k in key)
            lines.append(f"{name}({args}) = {self.algebra.format_element(self._v[key])}")
        return lines


class SymOperator(Operator):
    """Graded-symmetric operator stored on canonical (nondecreasing) multi-indices."""

    symmetric = True

    def _check_key(self, key: Key, val: Element) -> Key:
        if list(key) != sorted(key):
            raise ValueError(f"multi-index {key} is not in canonical nondecreasing order")
        sign, _ = koszul_sort(key, self.algebra.parity)
        if sign == 0:
            raise ValueError(f"multi-index {key} repeats an odd basis index; its coefficient must be 0")
        return key

    def value(self, key: Key) -> Element:
        if self.order < 2:
            return self._v.get(key, ZERO)
        sign, canon = koszul_sort(key, self.algebra.parity)
        if sign == 0:
            return ZERO
        val = self._v.get(canon, ZERO)
        return val if sign > 0 or not val else -val

    def to_raw(self) -> Operator:
        vals: dict[Key, Element] = {}
        for key, val in self._v.items():
            for perm in set(permutations(key)):
                sign, _ = koszul_sort(perm, self.algebra.parity)
                vals[perm] = val if sign > 0 else -val
        return Operator._trusted(self.algebra, self.order, vals)


def _tabulate(alg: SuperAlgebra, order: int, fn: Callable[[Key], Element], symmetric: bool,
              keys=None) -> Operator:
    gen = (keys or (canonical_keys if symmetric else all_keys))(alg, order)
    vals = {}
    for key in gen:
        v = fn(key)
        if v:
            vals[key] = v
    return (SymOperator if symmetric else Operator)._trusted(alg, order, vals)


def zero_operator(alg: SuperAlgebra, order: int, symmetric: bool = True) -> Operator:
    return (SymOperator if symmetric else Operator)._trusted(alg, order, {})


def constant(alg: SuperAlgebra, x: Element) -> SymOperator:
    """An element viewed as an operator of order zero."""
    alg._check_element(x)
    return SymOperator._trusted(alg, 0, {(): x} if x else {})


def identity(alg: SuperAlgebra) -> SymOperator:
    return SymOperator._trusted(alg, 1, {(i,): Element.basis(i) for i in range(alg.dim)})


def as_operator(alg: SuperAlgebra, x) -> Operator:
    return x if isinstance(x, Operator) else constant(alg, x)


def evaluate_operator(A: Operator, args: list[Element]) -> Element:
    if len(args) != A.order:
        raise ArityError(f"operator of order {A.order} given {len(args)} arguments")
    for x in args:
        A.algebra._check_element(x)
    out: dict[int, Fraction] = {}
    supports = [list(x.items()) for x in args]
    for combo in product(*supports):
        coef = Fraction(1)
        for _, c in combo:
            coef *= c
        accumulate(out, A.value(tuple(i for i, _ in combo)), coef)
    return Element._raw(out)


def graded_symmetrize(raw: Operator) -> SymOperator:
    """``A(x<1, ..., xp>)``: average over argument orders weighted by Koszul signs."""
    alg, p = raw.algebra, raw.order
    par = alg.parity
    if p < 2:
        return SymOperator._trusted(alg, p, dict(raw.items()))
    norm = Fraction(1, factorial(p))
    perms = list(permutations(range(p)))

    def fn(key: Key) -> Element:
        out: dict[int, Fraction] = {}
        for perm in perms:
            # transpositions of two odd arguments needed to reach this order
            e = 0
            for a in range(p):
                if par[key[perm[a]]]:
                    for b in range(a + 1, p):
                        if perm[a] > perm[b] and par[key[perm[b]]]:
                            e += 1
            accumulate(out, raw.value(tuple(key[t] for t in perm)), -norm if e & 1 else norm)
        return Element._raw(out)

    return _tabulate(alg, p, fn, True)


def is_graded_symmetric(A: Operator) -> bool:
    return A.symmetric or graded_symmetrize(A).to_raw() == A


# -- products ------------------------------------------------------------------

def _circ_value(A: Operator, B: Operator, pB: int, xs: Key) -> Element:
    # B is fed a subset T of the arguments; arguments before max(T) that are not
    # in T go to A ahead of B's output and pick up the Koszul sign of moving
    # past B and the T-arguments already absorbed.
    par = A.algebra.parity
    n, q = len(xs), B.order
    out: dict[int, Fraction] = {}
    for T in combinations(range(n), q):
        y = B.value(tuple(xs[t] for t in T))
        if not y:
            continue
        m = T[-1]
        tset = set(T)
        e, cur = 0, pB
        prefix = []
        for k in range(m):
            if k in tset:
                cur ^= par[xs[k]]
            else:
                e ^= par[xs[k]] & cur
                prefix.append(xs[k])
        prefix = tuple(prefix)
        suffix = xs[m + 1:]
        sign = -1 if e else 1
        for c, coef in y.items():
            accumulate(out, A.value(prefix + (c,) + suffix), coef * sign)
    return Element._raw(out)


def _apply_first(A: Operator, y: Element, xs: Key, scale: Fraction) -> Element:
    out: dict[int, Fraction] = {}
    for c, coef in y.items():
        accumulate(out, A.value((c,) + xs), coef * scale)
    return Element._raw(out)


def _bullet_value(A: Operator, B: Operator, pB: int, xs: Key) -> Element:
    p, q = A.order, B.order
    if p == 0:
        return ZERO
    if q == 0:
        return _apply_first(A, B.value(()), xs, Fraction(p))
    scale = Fraction(factorial(p) * factorial(q), factorial(p + q - 1))
    v = _circ_value(A, B, pB, xs)
    return v * scale if v else v


def circ(A, B) -> Operator:
    """The composition ``A o B`` of order ``p + q - 1``.

    ``A o x = A(x)`` and ``x o A = 0``; ``x o y`` is undefined and raises
    :class:`CompositionError`.
    """
    A, B = _pair(A, B)
    alg, p, q = A.algebra, A.order, B.order
    if p == 0 and q == 0:
        raise CompositionError("composition of two order-0 operators is undefined")
    if p == 0:
        return zero_operator(alg, q - 1, symmetric=B.symmetric)
    if q == 0:
        return A.partial(B.value(()))
    result = zero_operator(alg, p + q - 1, symmetric=False)
    for Bh in B.homogeneous_parts():
        pB = Bh.parity
        result = result + _tabulate(alg, p + q - 1, lambda xs: _circ_value(A, Bh, pB, xs), False)
    return result


def bullet(A, B) -> Operator:
    """``A_p . B_q = p! q! / (p+q-1)! A_p o B_q``, with ``A . x = p A(x)`` and ``x . A = x . y = 0``.

    For ``x . y`` the zero operator of order 0 is returned.
    """
    A, B = _pair(A, B)
    alg, p, q = A.algebra, A.order, B.order
    if p == 0:
        return zero_operator(alg, max(q - 1, 0))
    if q == 0:
        return A.partial(B.value(())) * p
    return circ(A, B) * Fraction(factorial(p) * factorial(q), factorial(p + q - 1))


def _pair(A, B) -> tuple[Operator, Operator]:
    if isinstance(A, Operator):
        alg = A.algebra
    elif isinstance(B, Operator):
        alg = B.algebra
    else:
        raise TypeError("at least one operand must be an Operator")
    A, B = as_operator(alg, A), as_operator(alg, B)
    if A.algebra is not B.algebra:
        raise ValueError("operators live on different algebras")
    return A, B


def super_commutator(A, B) -> Operator:
    """``[[A, B]] = A . B - (-1)^{|A||B|} B . A``.

    Graded-symmetric operands give a :class:`SymOperator`; the values are read
    off at canonical multi-indices, which is exact because the commutator of
    symmetric operators is symmetric.
    """
    A, B = _pair(A, B)
    alg = A.algebra
    order = max(A.order + B.order - 1, 0)
    sym = A.symmetric and B.symmetric
    if A.order == 0 and B.order == 0:
        return zero_operator(alg, 0)
    result = zero_operator(alg, order, symmetric=sym)
    for Ah in A.homogeneous_parts():
        for Bh in B.homogeneous_parts():
            pa, pb = Ah.parity, Bh.parity
            sgn = -1 if pa * pb else 1

            def fn(xs, Ah=Ah, Bh=Bh, pa=pa, pb=pb, sgn=sgn):
                v = _bullet_value(Ah, Bh, pb, xs)
                w = _bullet_value(Bh, Ah, pa, xs)
                return v + w if sgn < 0 else v - w

            result = result + _tabulate(alg, order, fn, sym)
    return result


# -- the bracket extended from G ----------------------------------------------

def _bracket_value(A: Operator, B: Operator, pB: int, xs: Key) -> Element:
    # Unrolled recursion [A,B].x = [A,B.x] + (-1)^{|x||B|}[A.x,B]: every argument
    # goes either to A or to B, and an argument taken by A carries the sign of
    # passing B together with the arguments B has absorbed so far.
    alg = A.algebra
    par = alg.parity
    p, q = A.order, B.order
    n = p + q
    scale = Fraction(factorial(p) * factorial(q), factorial(n))
    out: dict[int, Fraction] = {}
    for S in combinations(range(n), p):
        sset = set(S)
        e, cur = 0, pB
        bargs = []
        for k in range(n):
            if k in sset:
                e ^= par[xs[k]] & cur
            else:
                cur ^= par[xs[k]]
                bargs.append(xs[k])
        a = A.value(tuple(xs[k] for k in S))
        if not a:
            continue
        b = B.value(tuple(bargs))
        if not b:
            continue
        accumulate(out, alg._bracket_unchecked(a, b), -scale if e else scale)
    return Element._raw(out)


def bracket(A, B) -> Operator:
    """The Lie superbracket ``[A, B]`` of order ``p + q`` extending the bracket of G."""
    A, B = _pair(A, B)
    alg = A.algebra
    order = A.order + B.order
    sym = A.symmetric and B.symmetric
    result = zero_operator(alg, order, symmetric=sym)
    for Bh in B.homogeneous_parts():
        pb = Bh.parity
        result = result + _tabulate(alg, order, lambda xs: _bracket_value(A, Bh, pb, xs), sym)
    return result


algebra_bracket_of_operators = bracket


def bracket_recursive(A, B) -> Operator:
    """``[A, B]`` straight from the defining recursion, as a raw operator.

    Exponential in the order; kept as an independent check of :func:`bracket`.
    """
    A, B = _pair(A, B)
    alg = A.algebra
    par = alg.parity

    def rec(a: Operator, ap: Key, b: Operator, bp: Key, pb: int, xs: Key) -> Element:
        oa, ob = a.order - len(ap), b.order - len(bp)
        n = oa + ob
        if n == 0:
            return alg._bracket_unchecked(a.value(ap), b.value(bp))
        x, rest = xs[0], xs[1:]
        out: dict[int, Fraction] = {}
        if ob:
            accumulate(out, rec(a, ap, b, bp + (x,), pb ^ par[x], rest), Fraction(ob, n))
        if oa:
            s = -1 if par[x] & pb else 1
            accumulate(out, rec(a, ap + (x,), b, bp, pb, rest), Fraction(s * oa, n))
        return Element._raw(out)

    order = A.order + B.order
    result = zero_operator(alg, order, symmetric=False)
    for Bh in B.homogeneous_parts():
        pb = Bh.parity
        result = result + _tabulate(alg, order, lambda xs: rec(A, (), Bh, (), pb, xs), False)
    return result


def multibracket_with_identity(A, k: int) -> Operator:
    """``[A, k] = [...[[A, 1], 1], ..., 1]`` with k copies of the identity; ``[A, 0] = A``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not isinstance(A, Operator):
        raise TypeError("A must be an Operator; wrap elements with constant()")
    one = identity(A.algebra)
    for _ in range(k):
        A = bracket(A, one)
    return A


def project_operator(A: Operator, dec: Decomposition, part: str) -> Operator:
    """Project every output onto H or E."""
    keep = dec.indices(part)
    vals = {}
    for key, val in A.items():
        r = val.restrict(keep)
        if r:
            vals[key] = r
    return type(A)._trusted(A.algebra, A.order, vals)


def restrict_arguments(A: Operator, indices) -> Operator:
    """Drop every entry with an argument outside ``indices``."""
    indices = frozenset(indices)
    vals = {k: v for k, v in A.items() if all(i in indices for i in k)}
    return type(A)._trusted(A.algebra, A.order, vals)


def phi(A: Operator) -> Operator:
    """``phi(A_p) = A_p / p!``, intertwining ``o`` with ``.``."""
    return A * Fraction(1, factorial(A.order))


class OperatorSum:
    """Finite sum of operators of mixed orders, keyed by order."""

    def __init__(self, parts: Mapping[int, Operator] | None = None):
        self.parts: dict[int, Operator] = {}
        for p, op in (parts or {}).items():
            if op.order != p:
                raise ValueError(f"part stored under order {p} has order {op.order}")
            if not op.is_zero():
                self.parts[p] = op

    def __getitem__(self, p: int) -> Operator:
        return self.parts[p]

    def get(self, p: int, default=None):
        return self.parts.get(p, default)

    def orders(self) -> list[int]:
        return sorted(self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self.parts.keys() == other.parts.keys() and all(self.parts[p] == other.parts[p] for p in self.parts)

    def __repr__(self) -> str:
        return f"OperatorSum(orders={self.orders()})"
