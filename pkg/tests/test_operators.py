import random
from fractions import Fraction
from itertools import permutations
from math import comb

import pytest

from nlrealise.algebra import Decomposition, Element
from nlrealise.operators import (
    ArityError,
    CompositionError,
    Operator,
    SymOperator,
    bracket,
    bracket_recursive,
    bullet,
    circ,
    constant,
    evaluate_operator,
    graded_symmetrize,
    identity,
    is_graded_symmetric,
    koszul_sort,
    multibracket_with_identity,
    phi,
    project_operator,
    restrict_arguments,
    super_commutator,
)
from nlrealise.samples import gl11, random_operator, sl2


def circ_oracle(A, B):
    """``A o B`` from ``(A o B)(x) = A o B(x) + (-1)^{|B||x|} A(x) o B`` applied argument by argument."""
    alg = A.algebra
    par = alg.parity
    pB = B.parity
    n = A.order + B.order - 1

    def rec(apre, bpre, pb, xs):
        if len(bpre) == B.order:
            y = B.value(bpre)
            out = Element()
            for c, coef in y.items():
                out = out + A.value(apre + (c,) + xs) * coef
            return out
        if len(apre) == A.order:
            return Element()
        x, rest = xs[0], xs[1:]
        sign = -1 if par[x] & pb else 1
        return rec(apre, bpre + (x,), pb ^ par[x], rest) + rec(apre + (x,), bpre, pb, rest) * sign

    from itertools import product
    vals = {}
    for xs in product(range(alg.dim), repeat=n):
        v = rec((), (), pB, xs)
        if v:
            vals[xs] = v
    return Operator(alg, n, vals)


def sign_of(p):
    return lambda a, b: -1 if (a * b) % 2 else 1


def random_pair(rng, alg, max_order=2):
    return (random_operator(rng, alg, rng.randint(0, max_order), rng.randint(0, 1)),
            random_operator(rng, alg, rng.randint(0, max_order), rng.randint(0, 1)))


def test_koszul_sort():
    par = (0, 1, 1)
    assert koszul_sort((2, 1), par) == (-1, (1, 2))
    assert koszul_sort((2, 0, 1), par) == (-1, (0, 1, 2))
    assert koszul_sort((0, 2, 0), par) == (1, (0, 0, 2))
    assert koszul_sort((1, 1), par) == (0, None)


def test_symmetric_operator_rejects_repeated_odd_slots():
    alg = gl11()
    u = alg.index("u")
    with pytest.raises(ValueError):
        SymOperator(alg, 2, {(u, u): alg.element("a")})


def test_evaluation_respects_koszul_signs(rng):
    alg = gl11()
    for _ in range(20):
        A = random_operator(rng, alg, 3, rng.randint(0, 1))
        for key, _ in A.items():
            for perm in permutations(range(3)):
                k2 = tuple(key[i] for i in perm)
                sign, _ = koszul_sort(k2, alg.parity)
                assert A(*(Element.basis(i) for i in k2)) == A.value(key) * sign


def test_evaluation_arity_error():
    alg = sl2()
    with pytest.raises(ArityError):
        evaluate_operator(identity(alg), [])


def test_graded_symmetrize_idempotent(rng):
    alg = gl11()
    for _ in range(10):
        raw = random_operator(rng, alg, 2, rng.randint(0, 1), symmetric=False)
        s = graded_symmetrize(raw)
        assert graded_symmetrize(s.to_raw()) == s
        assert is_graded_symmetric(s.to_raw())


def test_circ_matches_recursive_definition(rng):
    for alg in (sl2(), gl11()):
        for _ in range(12):
            A = random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1), symmetric=rng.random() < 0.5)
            B = random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1), symmetric=rng.random() < 0.5)
            assert circ(A, B) == circ_oracle(A, B)


def test_circ_with_linear_maps_is_composition(rng):
    alg = gl11()
    A = random_operator(rng, alg, 1, 0, symmetric=False)
    B = random_operator(rng, alg, 1, 0, symmetric=False)
    for i in range(alg.dim):
        x = Element.basis(i)
        assert circ(A, B)(x) == A(B(x))


def test_circ_order_zero_rules():
    alg = sl2()
    A = identity(alg) * 2
    e = alg.element("e")
    assert circ(A, e).order == 0 and circ(A, e).value(()) == e * 2
    assert circ(e, A).is_zero()
    with pytest.raises(CompositionError):
        circ(constant(alg, e), constant(alg, e))


def test_bullet_order_zero_rules(rng):
    alg = gl11()
    A = random_operator(rng, alg, 2, 0)
    x = alg.element("u")
    assert bullet(A, x) == A.partial(x) * 2
    assert bullet(x, A).is_zero()
    xy = bullet(constant(alg, x), alg.element("v"))
    assert xy.order == 0 and xy.is_zero()


def test_theta_circ_theta_is_leibniz_expression():
    from nlrealise.samples import random_leibniz_table
    from nlrealise.linfty import leibniz_to_theta

    r = random.Random(5)
    for _ in range(10):
        t, _ = random_leibniz_table(r, "sparse")
        theta, _ = leibniz_to_theta(t)
        tt = circ(theta, theta)
        m = t.mul
        e = [Element.basis(i) for i in range(t.dim)]
        for i in range(t.dim):
            for j in range(t.dim):
                for k in range(t.dim):
                    expected = m(m(e[i], e[j]), e[k]) + m(e[j], m(e[i], e[k])) - m(e[i], m(e[j], e[k]))
                    assert tt(e[i], e[j], e[k]) == expected


def test_circ_associative_with_linear_left_factor(rng):
    alg = gl11()
    for _ in range(20):
        A = random_operator(rng, alg, 1, rng.randint(0, 1))
        B, C = (random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1), density=0.4) for _ in range(2))
        assert circ(circ(A, B), C) == circ(A, circ(B, C))


def test_circ_associator_is_graded_symmetric(rng):
    # the associator (A o B) o C - A o (B o C) is symmetric in B, C up to the Koszul sign
    alg = gl11()
    for _ in range(20):
        A, B, C = (random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1), density=0.4) for _ in range(3))
        s = -1 if B.parity * C.parity else 1
        assoc_bc = circ(circ(A, B), C) - circ(A, circ(B, C))
        assoc_cb = circ(circ(A, C), B) - circ(A, circ(C, B))
        assert assoc_bc == assoc_cb * s


def test_circ_not_associative_for_bilinear_left_factor():
    from nlrealise.algebra import SuperAlgebra

    alg = SuperAlgebra.from_brackets([("x", 0)], {})
    x = alg.element("x")
    A = SymOperator(alg, 2, {(0, 0): x})
    one = identity(alg)
    # (A o 1) o 1 = 4 A while A o (1 o 1) = 2 A
    assert circ(circ(A, one), one) == A * 4
    assert circ(A, circ(one, one)) == A * 2


def test_right_leibniz_rule_for_order_zero(rng):
    alg = gl11()
    for _ in range(20):
        A = random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1))
        B = random_operator(rng, alg, rng.randint(1, 2), rng.randint(0, 1))
        x = Element.basis(rng.randrange(alg.dim))
        px = alg.element_parity(x)
        sign = -1 if B.parity * px else 1
        assert circ(circ(A, B), x) == circ(A, circ(B, x)) + circ(circ(A, x), B) * sign


def test_phi_intertwines_products(rng):
    alg = gl11()
    for _ in range(20):
        A = random_operator(rng, alg, rng.randint(1, 3), rng.randint(0, 1))
        B = random_operator(rng, alg, rng.randint(1, 3), rng.randint(0, 1))
        assert bullet(phi(A), phi(B)) == phi(circ(A, B))


def test_super_commutator_laws(rng):
    alg = gl11()
    for _ in range(20):
        A, B = random_pair(rng, alg)
        C = random_operator(rng, alg, rng.randint(0, 2), rng.randint(0, 1))
        pa, pb = A.parity, B.parity
        s = -1 if pa * pb else 1
        assert super_commutator(A, B) == super_commutator(B, A) * -s
        lhs = super_commutator(super_commutator(A, B), C)
        rhs = super_commutator(A, super_commutator(B, C)) - super_commutator(B, super_commutator(A, C)) * s
        assert lhs == rhs


def test_super_commutator_examples():
    alg = gl11()
    A = random_operator(random.Random(1), alg, 2, 0)
    assert super_commutator(A, A).is_zero()
    Q = random_operator(random.Random(2), alg, 2, 1)
    assert super_commutator(Q, Q) == bullet(Q, Q) * 2


def test_bracket_matches_recursion_and_is_symmetric(rng):
    for alg in (sl2(), gl11()):
        for _ in range(12):
            A, B = random_pair(rng, alg)
            direct = bracket(A, B)
            assert direct.to_raw() == bracket_recursive(A, B)
            assert bracket(A.to_raw(), B.to_raw()) == direct.to_raw()
            assert is_graded_symmetric(bracket(A.to_raw(), B.to_raw()))


def test_bracket_base_cases(rng):
    alg = gl11()
    x, y = alg.element("u"), alg.element("v")
    assert bracket(constant(alg, x), constant(alg, y)).value(()) == alg.bracket(x, y)
    A = random_operator(rng, alg, 2, 1)
    for i in range(alg.dim):
        xi = Element.basis(i)
        lhs = bullet(bracket(A, y), xi)
        sign = -1 if alg.parity[i] * 1 else 1
        assert lhs == bracket(bullet(A, xi), y) * sign


def test_bracket_skew_and_jacobi(rng):
    alg = gl11()
    for _ in range(20):
        A, B = random_pair(rng, alg)
        C = random_operator(rng, alg, rng.randint(0, 1), rng.randint(0, 1))
        pa, pb, pc = A.parity, B.parity, C.parity
        assert bracket(A, B) == bracket(B, A) * (1 if pa * pb else -1)
        lhs = bracket(bracket(A, B), C)
        rhs = bracket(A, bracket(B, C)) + bracket(bracket(A, C), B) * (-1 if pb * pc else 1)
        assert lhs == rhs


def test_bracket_vanishes_on_abelian_algebra(rng):
    from nlrealise.algebra import SuperAlgebra

    alg = SuperAlgebra.from_brackets([("x", 0), ("y", 1)], {})
    A, B = random_pair(rng, alg)
    assert bracket(A, B).is_zero()


def test_multibracket_examples():
    alg = sl2()
    e, f = alg.element("e"), alg.element("f")
    two = multibracket_with_identity(constant(alg, e), 2)
    assert two(f, f) == f * -2
    A = constant(alg, e)
    assert multibracket_with_identity(A, 0) == A
    assert multibracket_with_identity(multibracket_with_identity(A, 1), 2) == multibracket_with_identity(A, 3)
    with pytest.raises(ValueError):
        multibracket_with_identity(A, -1)


def _mb(A, k):
    return multibracket_with_identity(A, k)


def test_multibracket_expansion_identities(rng):
    alg = gl11()
    dec = Decomposition.from_ids(alg, ["a", "b"])
    for trial in range(20):
        n = 1 + trial % 4
        A = random_operator(rng, alg, rng.randint(0, 1), rng.randint(0, 1), density=0.6)
        B = random_operator(rng, alg, rng.randint(0, 1), rng.randint(0, 1), density=0.6)
        lhs = _mb(bracket(A, B), n)
        rhs = sum((bracket(_mb(A, k), _mb(B, n - k)) * comb(n, k) for k in range(n + 1)), lhs * 0)
        assert lhs == rhs
        assert project_operator(lhs, dec, "E") == project_operator(rhs, dec, "E")

        AB = bullet(A, B)
        lhs2 = bullet(_mb(A, n), B)
        rhs2 = _mb(AB, n) if not AB.is_zero() else lhs2 * 0
        for i in range(n):
            j = n - 1 - i
            rhs2 = rhs2 + bracket(_mb(A, i), _mb(B, j)) * comb(n, j + 1)
        assert lhs2 == rhs2

        # the E-projected form: project [A, n] before multiplying
        lhs3 = bullet(project_operator(_mb(A, n), dec, "E"), B)
        rhs3 = project_operator(rhs2, dec, "E")
        assert lhs3 == rhs3


def test_projection_splits_operators(rng):
    alg = sl2()
    dec = Decomposition.from_ids(alg, ["h", "e"])
    one_e = project_operator(identity(alg), dec, "E")
    assert one_e(alg.element("f")) == alg.element("f")
    assert one_e(alg.element("e")) == Element()
    for _ in range(5):
        A = random_operator(rng, alg, 2, 0)
        assert project_operator(A, dec, "H") + project_operator(A, dec, "E") == A
        H = [project_operator(random_operator(rng, alg, rng.randint(1, 2), 0), dec, "H") for _ in range(2)]
        assert project_operator(super_commutator(*H), dec, "E").is_zero()
    assert restrict_arguments(identity(alg), dec.e_indices).value((alg.index("e"),)) == Element()


def test_operator_parity(rng):
    alg = gl11()
    A = random_operator(rng, alg, 1, 0)
    B = random_operator(rng, alg, 1, 1)
    assert (A + B).parity is None or A.is_zero() or B.is_zero()
    assert len((A + B).homogeneous_parts()) == (not A.is_zero()) + (not B.is_zero())
