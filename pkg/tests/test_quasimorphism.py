import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shorthhg import RAAG, DefiningGraph, DomainError, InfeasibleError, ParseError
from shorthhg.quasimorphism import (
    BROOKS_DEFECT,
    ExtensionData,
    KleinElement,
    StraighteningInput,
    average_m_G,
    brooks_homogenized,
    brooks_raw,
    check_link_vanishing,
    conjugate_exponents,
    defect_lower_bound,
    exponent_hom,
    homogenize_numeric,
    klein_test_extension,
    parse_qm_spec,
    phi_lambda,
    random_words,
    straighten,
)

from oracles import homogenized_pattern_count, parse, raw_pattern_count


def free_words(G, radius):
    return [g for g in G.ball_enumerate(radius) if G.in_parabolic(g, {"a", "c"})]


def test_exponent_examples(G):
    m = exponent_hom(G, "b")
    assert m(G.parse("a b^3 c b^-1")) == 2
    assert m(G.identity) == 0
    assert m(G.parse("b a") ** 5) == 5


def test_brooks_examples(G):
    h = brooks_homogenized(G, "a c")
    assert h(G.parse("a c a c")) == 2
    assert h(G.parse("a")) == 0
    assert h(G.parse("c^-1 a^-1")) == -1
    assert h.defect_bound == BROOKS_DEFECT


def test_brooks_outside_free_parabolic(G):
    h = brooks_homogenized(G, "a c")
    with pytest.raises(DomainError):
        h(G.parse("b"))


def test_brooks_rejects_bad_patterns(G):
    for bad in ("a", "a a", "a b", "a c a"):
        with pytest.raises(ValueError):
            brooks_homogenized(G, bad)


def test_brooks_raw_matches_string_count(G):
    raw = brooks_raw(G, "a c")
    for g in free_words(G, 5):
        word = parse(str(g)) if g else ()
        assert raw(g) == raw_pattern_count(word, parse("a c"))


def test_brooks_homogenized_matches_power_slope(G):
    h = brooks_homogenized(G, "a c")
    for g in free_words(G, 5):
        word = parse(str(g)) if g else ()
        assert h(g) == homogenized_pattern_count(word, parse("a c"))


def test_homogenize_numeric_examples(G):
    raw = brooks_raw(G, "a c")
    g = G.parse("a (a c) a^-1")
    assert homogenize_numeric(raw, g, 10) == 1
    h = brooks_homogenized(G, "a c")
    for g in free_words(G, 3):
        assert homogenize_numeric(h, g, 7) == h(g)
    assert homogenize_numeric(raw, G.identity, 4) == 0


def test_defect_lower_bound(G):
    pairs = list(zip(random_words(G, 200, 5, seed=1), random_words(G, 200, 5, seed=2)))
    assert defect_lower_bound(exponent_hom(G, "b"), pairs) == 0
    a, c = G.parse("a"), G.parse("c")
    assert defect_lower_bound(brooks_homogenized(G, "a c"), [(a, c)]) >= 1
    assert defect_lower_bound(brooks_homogenized(G, "a c"), [(G.identity, G.identity)]) == 0


def test_configured_brooks_defect_dominates_sample(G):
    h = brooks_homogenized(G, "a c")
    gens = ["a", "c"]
    pairs = list(zip(random_words(G, 10_000, 8, seed=5, gens=gens), random_words(G, 10_000, 8, seed=6, gens=gens)))
    assert defect_lower_bound(h, pairs) <= h.defect_bound


def test_average_examples():
    m, ext = klein_test_extension()
    mG = average_m_G(m, ext)
    z = KleinElement(1, 0)
    assert mG(z) == m(z) == 1
    assert mG(KleinElement(3, 4)) == 3
    trivial = average_m_G(m, ExtensionData((KleinElement(0, 0),), (1,)))
    assert all(trivial(KleinElement(b, 2 * c)) == m(KleinElement(b, 2 * c)) for b in range(-3, 4) for c in range(-2, 3))


def test_average_conjugation_invariance():
    m, ext = klein_test_extension()
    mG = average_m_G(m, ext)
    rng = random.Random(0)
    for _ in range(300):
        h = KleinElement(rng.randint(-20, 20), 2 * rng.randint(-10, 10))
        for g in ext.coset_reps:
            assert abs(mG(g * h * g.inverse())) == abs(mG(h))


def test_extension_data_validation():
    with pytest.raises(ValueError):
        ExtensionData((KleinElement(0, 0), KleinElement(0, 1)), (1,))
    with pytest.raises(ValueError):
        ExtensionData((KleinElement(0, 0),), (-1,))


def test_phi_lambda_examples(G):
    phi, psi = exponent_hom(G, "b"), brooks_homogenized(G, "a c")
    m3 = phi_lambda(phi, psi, 3)
    assert m3(G.parse("b^2 (a c)^5")) == 17
    assert m3(G.parse("a^7")) == 0
    m0 = phi_lambda(phi, psi, 0)
    for g in G.ball_enumerate(3):
        assert m0(g) == phi(g)
    assert m3.defect_bound == 3 * BROOKS_DEFECT


def test_phi_lambda_linear_in_lambda(G):
    phi, psi = exponent_hom(G, "b"), brooks_homogenized(G, "a c")
    l1, l2 = Fraction(2, 3), Fraction(-5, 2)
    f = {lam: phi_lambda(phi, psi, lam) for lam in (0, l1, l2, l1 + l2)}
    for g in G.ball_enumerate(3):
        assert f[l1 + l2](g) + f[0](g) == f[l1](g) + f[l2](g)


def test_link_vanishing(G):
    phi = phi_lambda(exponent_hom(G, "b"), brooks_homogenized(G, "a c"), 3)
    xs = G.ball_enumerate(2)
    assert check_link_vanishing(phi, "b", xs).max_value == 0
    bad = check_link_vanishing(exponent_hom(G, "a"), "b", xs)
    assert bad.max_value > 0 and not bad.passed
    assert check_link_vanishing(phi, "b", []).passed


def constructed(G):
    phi, psi = exponent_hom(G, "b"), brooks_homogenized(G, "a c")
    return [exponent_hom(G, x) for x in G.names] + [psi, brooks_homogenized(G, "c a^-1"),
                                                    phi_lambda(phi, psi, 1), phi_lambda(phi, psi, Fraction(-7, 3))]


def test_exact_homogeneity(G):
    for m in constructed(G):
        for g in G.ball_enumerate(3):
            if not m.in_domain(g):
                continue
            for n in range(-5, 6):
                assert m(g**n) == n * m(g)


def test_conjugation_invariance(G):
    xs = G.ball_enumerate(2)
    for m in constructed(G):
        for g in G.ball_enumerate(3)[::3]:
            if not m.in_domain(g):
                continue
            for x in xs[::2]:
                c = G.conjugate(x, g)
                if m.in_domain(c):
                    assert m(c) == m(g)


@settings(max_examples=200, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_quasimorphism_defect_on_free_words(i, j, k, l):
    G = RAAG(DefiningGraph.path("a", "b", "c"))
    h = brooks_homogenized(G, "a c")
    g1 = G.parse(f"a^{i} c^{j}") if i and j else G.parse("a c")
    g2 = G.parse(f"c^{k} a^{l}") if k and l else G.parse("c^-1 a")
    assert abs(h(g1 * g2) - h(g1) - h(g2)) <= h.defect_bound


@pytest.mark.parametrize("rows, expected", [
    ((), (6, 0)),
    (((1, 1, 0),), (6, 0)),
    (((-1, 1, 5),), (12, -5)),
    (((1, -1, 5),), (12, 5)),
])
def test_straighten(rows, expected):
    data = StraighteningInput(3, rows)
    p, q = straighten(data)
    assert (p, q) == expected
    for row in rows:
        assert conjugate_exponents(3, row, p, q) in ((p, q), (-p, -q))


def test_straighten_infeasible():
    with pytest.raises(InfeasibleError):
        straighten(StraighteningInput(2, ((1, 1, 3),)))
    with pytest.raises(ValueError):
        StraighteningInput(0)


def test_parse_qm_spec(G):
    assert parse_qm_spec(G, "lam:3:exp:b:brooks:ac")(G.parse("b^2 (a c)^5")) == 17
    assert parse_qm_spec(G, "brooks:a,c")(G.parse("a c")) == 1
    assert parse_qm_spec(G, "exp:a")(G.parse("a^4 b")) == 4
    for bad in ("exp:", "nope:a", "exp:b junk", "brooks:aa"):
        with pytest.raises((ParseError, ValueError)):
            parse_qm_spec(G, bad)


def test_random_words_deterministic(G):
    assert random_words(G, 5, 4, seed=9) == random_words(G, 5, 4, seed=9)
