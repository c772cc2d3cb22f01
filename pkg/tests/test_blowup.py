import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest

from shorthhg import RAAG, DefiningGraph, NotASimplexError
from shorthhg.blowup import (
    SquidVertex,
    augmented_support_graph,
    blowup_ball,
    classify,
    delta_hyperbolicity_estimate,
    equivalent,
    is_point_or_join,
    link_and_classify,
    link_closed_form,
    link_generic,
    pr_member,
    realisation,
    saturation,
    saturation_closed_form,
    simplex_links,
    strong_bgi_check,
    w_adjacent,
)
from shorthhg.extension import ExtBall, adjacent, canonical_vertex, extension_ball, standard_vertex
from shorthhg.hierarchy import default_charts

from oracles import bfs_distances, four_point_delta


@pytest.fixture(scope="module")
def B(support1, exp_charts):
    return blowup_ball(support1, exp_charts, 1)


def sv(G, base, point=None, conj="1"):
    v = canonical_vertex(base, G.parse(conj))
    return SquidVertex(v, None if point is None else G.parse(point))


def test_single_edge_counts():
    H = RAAG(DefiningGraph.path("a", "b"))
    B = blowup_ball(extension_ball(standard_vertex(H, "a"), 0), default_charts(H), 1)
    edges = B.edges()
    join = [e for e in edges if e[0].support != e[1].support]
    squid = [e for e in edges if e[0].support == e[1].support]
    assert (len(B.vertices), len(join), len(squid)) == (8, 16, 6)


def test_empty_support(G, exp_charts):
    empty = ExtBall(standard_vertex(G, "b"), (), frozenset(), {}, 0)
    B = blowup_ball(empty, exp_charts, 1)
    assert B.vertices == [] and B.simplices() == [frozenset()]


def test_window_zero(G, exp_charts):
    B = blowup_ball(extension_ball(standard_vertex(G, "a"), 0), exp_charts, 0)
    for v in B.support.vertices:
        assert [str(p) for p, _ in B.squids[v]] == ["1"]


def test_coordinates(B):
    for x in B.vertices:
        if not x.is_apex:
            assert abs(B.coordinate(x)) <= 1


def test_simplex_counts(B):
    S = B.simplices()
    assert S[0] == frozenset() and len(S) == 344
    assert len(B.maximal_simplices()) == 54
    g = B.to_networkx()
    cliques = {frozenset(c) for c in nx.enumerate_all_cliques(g)}
    assert cliques | {frozenset()} == set(S)
    assert {frozenset(c) for c in nx.find_cliques(g)} == set(B.maximal_simplices())


def test_link_examples(G, B):
    b = standard_vertex(G, "b")
    edge = frozenset([sv(G, "b"), sv(G, "b", "1")])
    kind, lk = link_and_classify(edge, B)
    assert kind == "edge-type"
    assert lk == frozenset().union(*(B.squid(u) for u in B.support_neighbours(b)))
    tri = frozenset([sv(G, "a"), sv(G, "a", "1"), sv(G, "b")])
    kind, lk = link_and_classify(tri, B)
    assert kind == "triangle-type" and lk == B.lpoints(b)
    assert link_and_classify(frozenset(), B) == ("empty", B.vertex_set)


def test_links_agree_with_common_neighbours(B):
    g = B.to_networkx()
    for s in B.simplices():
        if not s:
            continue
        common = set.intersection(*(set(g.neighbors(x)) for x in s))
        assert link_generic(s, B) == common
        assert link_closed_form(s, B) == common
        assert link_and_classify(s, B)[1] == common


def test_classification_partitions(B):
    kinds = {}
    for s in B.simplices():
        kinds.setdefault(classify(s), []).append(s)
    assert set(kinds) == {"empty", "edge-type", "triangle-type", "maximal", "bounded-other"}
    assert sum(map(len, kinds.values())) == len(B.simplices())
    assert set(kinds["maximal"]) == set(B.maximal_simplices())


def test_not_a_simplex(G, B):
    with pytest.raises(NotASimplexError):
        link_generic([sv(G, "a", "1"), sv(G, "c", "1")], B)


def test_saturation_examples(G, B):
    b = standard_vertex(G, "b")
    tri = frozenset([sv(G, "a"), sv(G, "a", "1"), sv(G, "b")])
    expect = {SquidVertex(b)}
    for u in B.support_neighbours(b):
        expect |= B.squid(u)
    assert saturation(tri, B) == expect
    tri2 = frozenset([sv(G, "c"), sv(G, "c", "c"), sv(G, "b")])
    assert saturation(tri2, B) == saturation(tri, B)
    edge = frozenset([sv(G, "b"), sv(G, "b", "b^-1")])
    assert saturation(edge, B) == B.squid(b)


def test_saturation_closed_forms_everywhere(B):
    links = simplex_links(B)
    covered = 0
    for s in B.simplices():
        if classify(s) in ("edge-type", "triangle-type"):
            assert saturation_closed_form(s, B) == saturation(s, B, links)
            covered += 1
    assert covered == 57


def test_equivalence_is_link_determined(B):
    rng = random.Random(0)
    sample = rng.sample([s for s in B.simplices() if s], 40)
    for s1, s2 in itertools.product(sample, repeat=2):
        assert equivalent(s1, s2, B) == (link_generic(s1, B) == link_generic(s2, B))
        assert equivalent(s1, s2, B) == equivalent(s2, s1, B)


def test_point_or_join(G, B):
    b = standard_vertex(G, "b")
    assert is_point_or_join(B.squid(b), B)
    assert not is_point_or_join(B.lpoints(b), B)
    assert is_point_or_join([sv(G, "a")], B)


def test_pr_member(G, B):
    edge = frozenset([sv(G, "b"), sv(G, "b", "1")])
    assert all(pr_member(s, edge, B) for s in B.maximal_simplices())
    with pytest.raises(NotASimplexError):
        pr_member([sv(G, "a", "1"), sv(G, "c", "1")], edge, B)


def maximal(G, x, y):
    (bx, px), (by, py) = x, y
    return frozenset([sv(G, bx), sv(G, bx, px), sv(G, by), sv(G, by, py)])


def test_realisation_contains_identity(G, B):
    real = realisation(maximal(G, ("a", "1"), ("b", "1")), B)
    assert G.identity in real and not real.possibly_empty


def test_realisation_nonempty_on_all_maximal(B):
    for s in B.maximal_simplices():
        assert len(realisation(s, B)) > 0


def test_realisation_equivariant(G, B):
    s = maximal(G, ("a", "a"), ("b", "1"))
    base = realisation(s, B)
    for g in G.ball_enumerate(1)[1:]:
        moved = realisation(frozenset(x.translate(g) for x in s), B)
        for u in base:
            if len(u) <= 4:
                assert g * u in moved
        for u in moved:
            if len(u) <= 4:
                assert g.inverse() * u in base


def test_realisation_possibly_empty_in_tiny_ball(G, exp_charts):
    wide = blowup_ball(extension_ball(standard_vertex(G, "a"), 0), exp_charts, 5)
    real = realisation(maximal(G, ("a", "a^5"), ("b", "b^5")), wide, group_radius=0)
    assert len(real) == 0 and real.possibly_empty and real.truncated


def test_w_edges(G, B, exp_charts):
    s = maximal(G, ("a", "1"), ("b", "1"))
    assert 1 in w_adjacent(s, s, B).types
    t = maximal(G, ("a", "1"), ("b", "b"))
    assert w_adjacent(s, t, B).types == w_adjacent(t, s, B).types
    assert 2 in w_adjacent(s, t, B).types
    wide = blowup_ball(extension_ball(standard_vertex(G, "a"), 0), exp_charts, 5)
    far1 = maximal(G, ("a", "a^-5"), ("b", "b^-5"))
    far2 = maximal(G, ("a", "a^5"), ("b", "b^5"))
    assert not w_adjacent(far1, far2, wide)


def test_w_edges_equivariant(G, B):
    s = maximal(G, ("a", "1"), ("b", "1"))
    t = maximal(G, ("c", "c"), ("b", "b^-1"))
    g = G.parse("a")
    moved = [frozenset(x.translate(g) for x in u) for u in (s, t)]
    assert w_adjacent(s, t, B).types == w_adjacent(*moved, B).types


def test_augmented_support_graph_contains_support(B):
    g = augmented_support_graph(B)
    assert set(B.support_graph.edges) <= set(g.edges)


def oracle_delta(graph):
    nodes = list(graph.nodes)
    dist = {u: bfs_distances({x: list(graph.neighbors(x)) for x in nodes}, u) for u in nodes}
    return four_point_delta(dist, nodes)


def test_delta_examples():
    assert delta_hyperbolicity_estimate(nx.balanced_tree(2, 4)) == 0
    assert delta_hyperbolicity_estimate(nx.cycle_graph(5)) == oracle_delta(nx.cycle_graph(5)) > 0
    single = nx.Graph()
    single.add_node(0)
    assert delta_hyperbolicity_estimate(single) == 0


def test_delta_matches_oracle_on_random_graphs():
    for seed in range(6):
        g = nx.connected_watts_strogatz_graph(14, 4, 0.3, seed=seed)
        assert delta_hyperbolicity_estimate(g) == oracle_delta(g)


def test_delta_disconnected_gives_per_component():
    g = nx.disjoint_union(nx.cycle_graph(6), nx.path_graph(3))
    assert delta_hyperbolicity_estimate(g) == [Fraction(1), Fraction(0)]


def test_delta_of_extension_ball(G):
    g = extension_ball(standard_vertex(G, "b"), 3).to_networkx()
    assert delta_hyperbolicity_estimate(g) == 0


def test_strong_bgi_vacuous_when_threshold_large(G, B):
    b = standard_vertex(G, "b")
    verts = list(B.support.vertices)
    report = strong_bgi_check(B, b, itertools.combinations(verts, 2), threshold=100)
    assert report.checked == 0 and report.vacuous == len(verts) * (len(verts) - 1) // 2


def test_strong_bgi_star_separates_path():
    H = RAAG(DefiningGraph.path("a", "b", "c", "d", "e"))
    charts = default_charts(H, "c", 0)
    u = canonical_vertex("a", H.parse("c^5"))
    verts = (u,) + tuple(standard_vertex(H, x) for x in "bcde")
    edges = frozenset(frozenset(p) for p in itertools.combinations(verts, 2) if adjacent(*p))
    support = ExtBall(verts[2], verts, edges, {v: v.base for v in verts}, 0)
    B = blowup_ball(support, charts, 0)
    w, e = verts[2], verts[4]
    report = strong_bgi_check(B, w, [(u, e)], threshold=3, graph=support.to_networkx())
    assert (report.checked, report.passed, report.violations) == (1, 1, [])
