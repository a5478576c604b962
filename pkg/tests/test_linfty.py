import random
from fractions import Fraction
from importlib.resources import files
from math import factorial

import pytest

from nlrealise.algebra import BasisElement, Element, SuperAlgebra
from nlrealise.linfty import (
    DGLA,
    DGLAError,
    LeibnizFormatError,
    LeibnizTable,
    bernoulli_minus,
    check_linfty,
    coefficient_Cp,
    compare_brackets,
    embed_dgla,
    getzler_brackets,
    leibniz_identity_holds,
    leibniz_to_dgla,
    leibniz_to_theta,
    realised_brackets,
)
from nlrealise.samples import random_dgla, random_leibniz_table, tensor_dgla
from nlrealise.specfile import build_dgla, build_leibniz, parse_spec


def data(name):
    return parse_spec(files("nlrealise").joinpath("data", name).read_text())


def test_bernoulli_values():
    expected = [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0, Fraction(1, 42), 0, Fraction(-1, 30)]
    assert [bernoulli_minus(n) for n in range(9)] == expected
    assert bernoulli_minus(12) == Fraction(-691, 2730)
    with pytest.raises(ValueError):
        bernoulli_minus(-1)


def test_cp_forms_agree():
    for p in range(2, 13):
        values = {coefficient_Cp(p, f) for f in ("ascending", "composition", "closed")}
        assert values == {-bernoulli_minus(p - 1) / factorial(p - 1)}
    assert coefficient_Cp(2) == Fraction(1, 2)
    assert coefficient_Cp(3) == Fraction(-1, 12)
    assert coefficient_Cp(4) == 0
    assert coefficient_Cp(5) == Fraction(1, 720)


def test_cp_domains():
    with pytest.raises(ValueError):
        coefficient_Cp(1, "ascending")
    with pytest.raises(ValueError):
        coefficient_Cp(0)
    with pytest.raises(ValueError):
        coefficient_Cp(3, "bogus")


def _alg(basis, brackets=None):
    return SuperAlgebra.from_brackets(basis, brackets or {})


def test_dgla_construction_errors():
    with pytest.raises(DGLAError):
        DGLA(_alg([("x", 0)]))  # no degrees
    with pytest.raises(DGLAError):
        DGLA(_alg([("x", 0, 1)]))
    with pytest.raises(DGLAError):
        DGLA(_alg([("x", 1, -1)]))


def test_dgla_problems():
    alg = _alg([("x", 1, 1), ("y", 0, 2)])
    # wrong degree: delta x should land in degree 0
    bad = DGLA(alg, {0: Element.basis(1)})
    assert any("degree -1" in p for p in bad.problems())
    with pytest.raises(DGLAError):
        embed_dgla(bad)
    alg = _alg([("a", 0, 0), ("b", 1, 1), ("c", 0, 2)])
    sq = DGLA(alg, {2: Element.basis(1), 1: Element.basis(0)})
    assert any("delta^2" in p for p in sq.problems())
    # delta not a derivation of [a, b] = b
    alg = _alg([("a", 0, 0), ("b", 1, 1), ("z", 0, 0)], {("a", "b"): {"b": 1}})
    nd = DGLA(alg, {1: Element.basis(2)})
    assert nd.problems()


def test_sl2_cone_cross_check():
    dgla = build_dgla(data("sl2_cone.dgla"))
    assert dgla.problems() == []
    s = getzler_brackets(dgla, 4)
    assert all(d.is_zero() for _, d in compare_brackets(s, realised_brackets(dgla, 4), 4))
    assert all(r.passed for r in check_linfty(s, 4))


def test_embedding_places_theta_first():
    dgla = build_dgla(data("sl2_cone.dgla"))
    G, dec, theta = embed_dgla(dgla)
    assert G.basis[0].parity == 1 and G.basis[0].zdegree == -1
    assert 0 in dec.h_indices
    L = dgla.underlying
    for i in range(L.dim):
        assert G.bracket(theta, Element.basis(i + 1)) == Element({k + 1: c for k, c in dgla.delta(Element.basis(i)).items()})


@pytest.mark.parametrize("with_zero", [True, False])
def test_random_dgla_cross_check(with_zero):
    rng = random.Random(11 + with_zero)
    for _ in range(4):
        dgla = random_dgla(rng, with_degree_zero=with_zero)
        assert dgla.problems() == []
        s = getzler_brackets(dgla, 5)
        for p, diff in compare_brackets(s, realised_brackets(dgla, 5), 5):
            assert diff.is_zero(), p
        assert all(r.passed for r in check_linfty(s, 5))


@pytest.mark.parametrize("lie", ["r2", "b2"])
def test_higher_brackets_in_dimension_eight(lie):
    dgla = tensor_dgla(lie, "A4")
    s = getzler_brackets(dgla, 5)
    assert not s.bracket(3).is_zero()
    assert all(d.is_zero() for _, d in compare_brackets(s, realised_brackets(dgla, 5), 5))
    assert all(r.passed for r in check_linfty(s, 5))


def test_check_linfty_detects_a_wrong_bracket():
    s = getzler_brackets(tensor_dgla("r2", "A4"), 5)
    s.brackets[3] = s.brackets[3] * 2
    results = check_linfty(s, 5)
    assert not all(r.passed for r in results)
    assert not results[2].passed


def test_check_linfty_limits():
    s = getzler_brackets(tensor_dgla("r2", "A1"), 2)
    with pytest.raises(ValueError):
        check_linfty(s, 3)
    with pytest.raises(ValueError):
        s.bracket(3)
    with pytest.raises(ValueError):
        getzler_brackets(tensor_dgla("r2", "A1"), 0)


def test_compare_brackets_rejects_different_spaces():
    a = getzler_brackets(tensor_dgla("r2", "A1"), 2)
    b = getzler_brackets(tensor_dgla("b2", "A1"), 2)
    with pytest.raises(ValueError):
        compare_brackets(a, b, 2)


def test_leibniz_examples():
    good = build_leibniz(data("leftmult.leibniz"))
    assert leibniz_identity_holds(good)
    assert leibniz_to_theta(good)[1]
    bad = build_leibniz(data("nonleibniz.leibniz"))
    assert not leibniz_identity_holds(bad)
    assert not leibniz_to_theta(bad)[1]


def test_leibniz_verdict_matches_brute_force():
    rng = random.Random(3)
    seen = set()
    for _ in range(60):
        t, kind = random_leibniz_table(rng)
        verdict = leibniz_to_theta(t)[1]
        assert verdict == leibniz_identity_holds(t)
        if kind == "lie":
            assert verdict
        seen.add(verdict)
    assert seen == {True, False}


def test_leibniz_to_dgla_is_valid():
    rng = random.Random(8)
    for kind in ("lie", "central", "lie", "central"):
        t, _ = random_leibniz_table(rng, kind)
        dgla = leibniz_to_dgla(t)
        assert dgla.problems() == []
        # delta c = L_c lands in degree 0
        deg = dgla.underlying.zdegree
        for i, v in dgla.differential.items():
            assert deg[i] == 1 and all(deg[k] == 0 for k in v)
    dgla = leibniz_to_dgla(build_leibniz(data("leftmult.leibniz")))
    assert dgla.problems() == []


def test_leibniz_table_errors():
    with pytest.raises(LeibnizFormatError):
        LeibnizTable(("a",), {(0, 1): Element.basis(0)})
    with pytest.raises(LeibnizFormatError):
        LeibnizTable.from_matrix(("a", "b"), [[Element()]])
    with pytest.raises(ValueError):
        random_leibniz_table(random.Random(0), "nope")
