"""The nonlinear realisation ``a -> sum_p a(p)`` of G on the complement E.

For a decomposition ``G = H + E`` with H a subalgebra, each element ``a`` gives
E-valued graded-symmetric operators ``a(p)`` of order p, defined by the
recursion ``a(0) = a_E`` and

    a(p) = 1/p! [a, p]_E - sum_{q+r=p-1} 1/(r+2)! [a(q), r+1]_E .

The map is a Lie superalgebra homomorphism into operators with the bracket
``[[., .]]``; :func:`check_homomorphism` verifies this degree by degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .algebra import Decomposition, Element, accumulate
from .operators import (
    OperatorSum,
    SymOperator,
    bracket,
    canonical_keys,
    constant,
    identity,
    project_operator,
    restrict_arguments,
    super_commutator,
    zero_operator,
)


class Realiser:
    """Memoised computation of ``a(p)`` and ``~a(p)`` for one element."""

    def __init__(self, a: Element, dec: Decomposition):
        dec.algebra._check_element(a)
        self.a = a
        self.dec = dec
        self._one = identity(dec.algebra)
        self._parts: list[SymOperator] = []
        # chains[key][k] = [A, k] for A = a (key None) or A = a(q) (key q)
        self._chains: dict[int | None, list[SymOperator]] = {None: [constant(dec.algebra, a)]}

    def _multibracket(self, key: int | None, k: int) -> SymOperator:
        chain = self._chains.get(key)
        if chain is None:
            chain = self._chains[key] = [self.part(key)]
        while len(chain) <= k:
            chain.append(bracket(chain[-1], self._one))
        return chain[k]

    def part(self, p: int) -> SymOperator:
        while len(self._parts) <= p:
            self._parts.append(self._compute(len(self._parts)))
        return self._parts[p]

    def _compute(self, p: int) -> SymOperator:
        dec = self.dec
        if p == 0:
            return constant(dec.algebra, self.a.restrict(dec.e_indices))
        total = self._multibracket(None, p) * Fraction(1, factorial(p))
        for q in range(p):
            r = p - 1 - q
            total = total - self._multibracket(q, r + 1) * Fraction(1, factorial(r + 2))
        return project_operator(total, dec, "E")

    def tilde(self, p: int) -> SymOperator:
        total = self._multibracket(None, p) * Fraction(1, factorial(p))
        for q in range(p + 1):
            r = p - q
            total = total - self._multibracket(q, r) * Fraction(1, factorial(r + 1))
        return total


def realise_recursive(a: Element, p: int, dec: Decomposition) -> SymOperator:
    if p < 0:
        raise ValueError("order must be >= 0")
    return Realiser(a, dec).part(p)


def realise_tilde(a: Element, p: int, dec: Decomposition) -> SymOperator:
    """``~a(p) = 1/p! [a, p] - sum_{q+r=p} 1/(r+1)! [a(q), r]``, which is H-valued."""
    if p < 0:
        raise ValueError("order must be >= 0")
    return Realiser(a, dec).tilde(p)


def realise_closed(a: Element, p: int, dec: Decomposition) -> SymOperator:
    """``a(p)`` from the non-recursive closed formula.

    Shares no code with the recursion: every value is a graded average over
    argument orders of nested algebra brackets, projected to E at each cut
    ``0 <= m_1 < ... < m_k < p`` and weighted by
    ``1/m_1! * (-1)/(m_2-m_1+1)! * ... * (-1)/(p-m_k+1)!``.
    """
    if p < 0:
        raise ValueError("order must be >= 0")
    alg = dec.algebra
    alg._check_element(a)
    E = dec.e_indices
    if p == 0:
        return constant(alg, a.restrict(E))
    par = alg.parity
    br = alg._bracket_unchecked
    basis = [Element.basis(i) for i in range(alg.dim)]
    inv_fact = [Fraction(1, factorial(n)) for n in range(p + 2)]

    def close_weight(cut, t):
        # weight of the segment that started at `cut` and ends before position t
        return inv_fact[t] if cut is None else -inv_fact[t - cut + 1]

    def value(key):
        out: dict[int, Fraction] = {}
        counts: dict[int, int] = {}
        for k in key:
            counts[k] = counts.get(k, 0) + 1
        mult = 1
        for c in counts.values():
            mult *= factorial(c)
        norm = Fraction(mult, factorial(p))

        def dfs(t, states, placed_odd, inversions):
            if t == p:
                total: dict[int, Fraction] = {}
                for cut, el in states.items():
                    accumulate(total, el, close_weight(cut, p))
                w = -norm if inversions & 1 else norm
                accumulate(out, Element._raw(total).restrict(E), w)
                return
            cut_sum: dict[int, Fraction] = {}
            for cut, el in states.items():
                accumulate(cut_sum, el, close_weight(cut, t))
            with_cut = dict(states)
            with_cut[t] = Element._raw(cut_sum).restrict(E)
            for x in sorted(counts):
                if not counts[x]:
                    continue
                counts[x] -= 1
                extra = sum(1 for y in placed_odd if y > x) if par[x] else 0
                nxt = {c: br(el, basis[x]) for c, el in with_cut.items()}
                dfs(t + 1, nxt, placed_odd + ((x,) if par[x] else ()), inversions + extra)
                counts[x] += 1

        dfs(0, {None: a}, (), 0)
        return Element._raw(out)

    vals = {}
    for key in canonical_keys(alg, p):
        v = value(key)
        if v:
            vals[key] = v
    return SymOperator._trusted(alg, p, vals)


@dataclass
class Realisation:
    """The truncated realisation ``a(0), ..., a(max_order)``.

    ``finite_from`` is set when the series, restricted to E-arguments, is
    certified to vanish from that order on (see :func:`realise`).
    """

    source: Element
    dec: Decomposition
    parts: OperatorSum
    max_order: int
    finite_from: int | None = None

    def part(self, p: int) -> SymOperator:
        if p > self.max_order:
            raise ValueError(f"order {p} beyond truncation {self.max_order}")
        return self.parts.get(p) or zero_operator(self.dec.algebra, p)


def _graded(alg) -> bool:
    """True when every structure constant respects the Z-grading additively."""
    deg = alg.zdegree
    if deg is None:
        return False
    return all(deg[k] == deg[i] + deg[j] for (i, j), v in alg.structure.items() for k in v)


def termination_bound(a: Element, dec: Decomposition) -> int | None:
    """An order N with ``a(p)`` vanishing on E-arguments for every ``p >= N``.

    Needs a Z-grading respected by the bracket with E in strictly positive
    degrees.  A component of ``a`` of degree ``d`` evaluated on ``p`` arguments
    from E lands in degree at least ``d + p * min_E``, which must not exceed
    ``max_E``.  Returns ``None`` when the hypotheses fail.
    """
    alg = dec.algebra
    deg = alg.zdegree
    if not dec.e_indices or not _graded(alg):
        return None
    e_degs = [deg[i] for i in dec.e_indices]
    lo, hi = min(e_degs), max(e_degs)
    if lo <= 0:
        return None
    bound = 0
    for d in {deg[i] for i in a}:
        if hi >= d:
            bound = max(bound, (hi - d) // lo + 1)
    return bound


def realise(a: Element, dec: Decomposition, max_order: int) -> Realisation:
    """Truncated realisation of ``a``, with a termination certificate if one applies.

    ``finite_from`` is the first order ``N`` such that ``a(p)`` restricted to
    E-arguments is zero for all ``p >= N``.  It is only reported when the
    degree bound of :func:`termination_bound` proves it; computed parts that
    vanish just below the bound lower it.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    r = Realiser(a, dec)
    parts = {p: r.part(p) for p in range(max_order + 1)}
    finite_from = None
    bound = termination_bound(a, dec)
    if bound is not None:
        finite_from = bound
        E = dec.e_indices
        while 0 < finite_from <= max_order + 1 and restrict_arguments(parts[finite_from - 1], E).is_zero():
            finite_from -= 1
    return Realisation(a, dec, OperatorSum(parts), max_order, finite_from)


@dataclass
class DegreeResult:
    degree: int
    lhs: SymOperator
    rhs: SymOperator
    residual: SymOperator

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()


@dataclass
class HomomorphismReport:
    a: Element
    b: Element
    results: list[DegreeResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


def check_homomorphism(a: Element, b: Element, dec: Decomposition, rmax: int,
                       realisers: dict | None = None) -> HomomorphismReport:
    """Compare ``sum_{p+q=r+1} [[a(p), b(q)]]`` with ``[a,b](r)`` for ``r <= rmax``.

    ``realisers`` optionally caches :class:`Realiser` objects keyed by element.
    """
    if rmax < 0:
        raise ValueError("rmax must be >= 0")
    alg = dec.algebra
    cache = realisers if realisers is not None else {}

    def realiser(x: Element) -> Realiser:
        if x not in cache:
            cache[x] = Realiser(x, dec)
        return cache[x]

    ra, rb = realiser(a), realiser(b)
    rab = realiser(alg.bracket(a, b))
    report = HomomorphismReport(a, b)
    for r in range(rmax + 1):
        lhs = zero_operator(alg, r)
        for p in range(r + 2):
            q = r + 1 - p
            ap, bq = ra.part(p), rb.part(q)
            if ap.is_zero() or bq.is_zero():
                continue
            lhs = lhs + super_commutator(ap, bq)
        rhs = rab.part(r)
        report.results.append(DegreeResult(r, lhs, rhs, lhs - rhs))
    return report
