import pytest

from shorthhg import DomainError
from shorthhg.quasiline import (
    QuasilineChart,
    default_cutoff,
    in_tau,
    quasiline_coord,
    tau_distance_bounds,
    tau_distance_exact_ball,
)
from shorthhg.quasimorphism import brooks_homogenized, exponent_hom, phi_lambda

from oracles import exponent_tau_length


@pytest.fixture(scope="module")
def chart3(G):
    return QuasilineChart(exponent_hom(G, "b"), 3, "b", group=G)


@pytest.fixture(scope="module")
def phi3(G):
    return QuasilineChart(phi_lambda(exponent_hom(G, "b"), brooks_homogenized(G, "a c"), 3), None, "b", group=G)


def test_coordinates(G, chart3, phi3):
    assert quasiline_coord(G.parse("b^4"), chart3) == 4
    assert quasiline_coord(G.parse("(a c)^2"), phi3) == 6
    assert in_tau(G.parse("b^2"), chart3)
    assert not in_tau(G.parse("b^3"), chart3)


def test_default_cutoffs(G, chart3, phi3):
    assert default_cutoff(chart3.m, G.parse("b")) == 3
    assert phi3.C == 38


def test_chart_invariants_enforced(G):
    with pytest.raises(ValueError):
        QuasilineChart(brooks_homogenized(G, "a c"), 12, None, G.parse("a c"), group=G)
    with pytest.raises(ValueError):
        QuasilineChart(exponent_hom(G, "b"), 2, "b", group=G)


def test_bounds_examples(G, chart3):
    assert tau_distance_bounds(G.parse("b^10"), chart3) == (4, 5)
    assert tau_distance_bounds(G.identity, chart3) == (0, 0)
    assert tau_distance_bounds(G.parse("a c"), chart3) == (0, 1)


def test_exact_examples(G, chart3):
    assert tau_distance_exact_ball(G.parse("b^10"), chart3) == 5
    assert tau_distance_exact_ball(G.identity, chart3) == 0
    assert tau_distance_exact_ball(G.parse("b^2"), chart3) == 1


def test_exact_matches_formula_and_sandwich(G, chart3):
    for g in G.ball_enumerate(4):
        exact = tau_distance_exact_ball(g, chart3)
        lo, hi = tau_distance_bounds(g, chart3)
        if g.is_identity():
            assert exact == 0
            continue
        assert exact == exponent_tau_length(chart3.coord(g), chart3.C)
        assert lo <= exact <= hi


def test_exact_search_cap(G, chart3):
    assert tau_distance_exact_ball(G.parse("b^20"), chart3, search_cap=3) is None


def test_exact_outside_domain(G):
    chart = QuasilineChart(brooks_homogenized(G, "a c"), 13, None, G.parse("a c"), group=G)
    with pytest.raises(DomainError):
        tau_distance_exact_ball(G.parse("b"), chart)


def test_equivariance(G, phi3):
    m = phi3.m
    pts = G.ball_enumerate(2)
    for h in G.ball_enumerate(2)[::3]:
        for g in pts[::4]:
            for g2 in pts[::5]:
                drift = (m(h * g) - m(h * g2)) - (m(g) - m(g2))
                assert abs(drift) <= 2 * m.defect_bound


def test_central_direction_is_unbounded_and_link_bounded(G, phi3):
    z = G.parse("b")
    values = [phi3.coord(z**n) for n in range(-10, 11)]
    assert values == sorted(values) and len(set(values)) == len(values)
    for w in ("a", "c"):
        assert all(phi3.coord(G.parse(w) ** n) == 0 for n in range(-10, 11))


def test_upper_bound_with_defect(G, phi3):
    for g in G.ball_enumerate(3)[::5]:
        lo, hi = tau_distance_bounds(g, phi3)
        assert lo <= hi
    # lower: ceil(100 / (38 + 18)); upper: chunks of b^37, the largest power in τ
    assert tau_distance_bounds(G.parse("b^100"), phi3) == (2, 3)
