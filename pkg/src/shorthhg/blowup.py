"""Ball-scale blowups: squids, links, saturations, realisations and W-edges."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .errors import NotASimplexError
from .extension import ExtBall, ExtVertex, valence
from .raag import Word, cayley_ball

DEFAULT_R = 2
DEFAULT_T = 4
DEFAULT_GROUP_RADIUS = 6


@dataclass(frozen=True)
class SquidVertex:
    """The apex of Squid(v) when ``point`` is None, otherwise a point of L_v."""

    support: ExtVertex
    point: Word | None = None

    def __eq__(self, other):
        if not isinstance(other, SquidVertex):
            return NotImplemented
        if self.support != other.support:
            return False
        if self.point is None or other.point is None:
            return self.point is other.point
        return self.point.letters == other.point.letters

    def __hash__(self):
        return hash((self.support, None if self.point is None else self.point.letters))

    @property
    def is_apex(self) -> bool:
        return self.point is None

    def sort_key(self):
        return (self.support.sort_key(), self.point is not None, () if self.point is None else self.point.sort_key())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def translate(self, g: Word) -> "SquidVertex":
        return SquidVertex(self.support.translate(g), None if self.point is None else g * self.point)

    def __str__(self):
        return str(self.support) if self.point is None else f"{self.support}|{self.point}"

    def __repr__(self):
        return f"SquidVertex({self})"


def parts(simplex) -> dict:
    """Split a simplex into its pieces Δ_v, one per support vertex."""
    out = {}
    for x in simplex:
        out.setdefault(x.support, set()).add(x)
    return {v: frozenset(p) for v, p in out.items()}


class BlowupBall:
    """The blowup of a finite piece of the support graph, with truncated quasilines."""

    def __init__(self, support: ExtBall, charts: dict, coord_window, R=DEFAULT_R, T=DEFAULT_T):
        self.support = support
        self.charts = charts
        self.window = Fraction(coord_window)
        self.R = R
        self.T = T
        self.support_graph = support.to_networkx()
        self.squids = {}
        for v in support.vertices:
            if v.base not in charts:
                raise ValueError(f"no chart for vertex {v} (base {v.base})")
            self.squids[v] = self._truncate(v)
        self.vertices = []
        for v in support.vertices:
            self.vertices.append(SquidVertex(v))
            self.vertices.extend(SquidVertex(v, p) for p, _ in self.squids[v])
        self.vertex_set = frozenset(self.vertices)
        self._realisations = {}
        self._levels = {}

    def _truncate(self, v: ExtVertex):
        chart = self.charts[v.base]
        G = v.group
        z = G.generator(v.base)
        mz = chart.m(z)
        if mz == 0:
            return [(v.conjugator, Fraction(0))]
        top = math.floor(self.window / abs(mz))
        return [(v.conjugator * z**k, k * mz) for k in range(-top, top + 1)]

    # -- coordinates and structure

    def coordinate(self, x: SquidVertex) -> Fraction:
        v = x.support
        G = v.group
        return self.charts[v.base].m(G.multiply(G.inverse(v.conjugator), x.point))

    def adjacent(self, x: SquidVertex, y: SquidVertex) -> bool:
        if x == y:
            return False
        if x.support == y.support:
            return x.is_apex != y.is_apex
        return self.support_graph.has_edge(x.support, y.support)

    def squid(self, v: ExtVertex) -> frozenset:
        return frozenset([SquidVertex(v)] + [SquidVertex(v, p) for p, _ in self.squids[v]])

    def lpoints(self, v: ExtVertex) -> frozenset:
        return frozenset(SquidVertex(v, p) for p, _ in self.squids[v])

    def support_neighbours(self, v: ExtVertex):
        return sorted(self.support_graph.neighbors(v))

    def edges(self):
        out = []
        for x, y in itertools.combinations(self.vertices, 2):
            if self.adjacent(x, y):
                out.append((x, y))
        return out

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges())
        return g

    def is_simplex(self, simplex) -> bool:
        return all(x in self.vertex_set for x in simplex) and all(
            self.adjacent(x, y) for x, y in itertools.combinations(simplex, 2)
        )

    def simplices(self):
        """Every simplex of the ball, the empty one first."""
        local = {}
        for v in self.support.vertices:
            apex = SquidVertex(v)
            pts = sorted(self.lpoints(v))
            local[v] = [frozenset([apex])] + [frozenset([p]) for p in pts] + [frozenset([apex, p]) for p in pts]
        out = [frozenset()]
        for v in self.support.vertices:
            out.extend(local[v])
        for v, w in self.support.sorted_edges():
            for a in local[v]:
                for b in local[w]:
                    out.append(a | b)
        return out

    def maximal_simplices(self):
        out = []
        for v, w in self.support.sorted_edges():
            for x in sorted(self.lpoints(v)):
                for y in sorted(self.lpoints(w)):
                    out.append(frozenset([SquidVertex(v), x, SquidVertex(w), y]))
        return out

    # -- exports

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"id": str(x), "support": str(x.support), "apex": x.is_apex,
                 "coordinate": None if x.is_apex else str(self.coordinate(x))}
                for x in self.vertices
            ],
            "edges": [[str(x), str(y)] for x, y in self.edges()],
            "R": self.R,
            "T": self.T,
            "coord_window": str(self.window),
        }

    def to_dot(self, header=()) -> str:
        lines = [f"// {h}" for h in header]
        lines.append("graph blowup {")
        for x in self.vertices:
            label = "apex" if x.is_apex else f"coord={self.coordinate(x)}"
            lines.append(f'  "{x}" [color="{x.support.base}", label="{x}\\n{label}"];')
        for x, y in self.edges():
            lines.append(f'  "{x}" -- "{y}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def blowup_ball(support: ExtBall, charts: dict, coord_window, R=DEFAULT_R, T=DEFAULT_T) -> BlowupBall:
    return BlowupBall(support, charts, coord_window, R, T)


# -- links and saturations


def _check_simplex(simplex, B: BlowupBall):
    if not B.is_simplex(simplex):
        raise NotASimplexError("vertex set does not span a simplex of the blowup")


def link_generic(simplex, B: BlowupBall) -> frozenset:
    """Vertices outside the simplex adjacent to all of it (the link in a flag complex)."""
    simplex = frozenset(simplex)
    _check_simplex(simplex, B)
    return frozenset(x for x in B.vertices if x not in simplex and all(B.adjacent(x, y) for y in simplex))


def link_closed_form(simplex, B: BlowupBall) -> frozenset:
    """Link from its decomposition: p^-1 of the support link joined with the squid links."""
    simplex = frozenset(simplex)
    _check_simplex(simplex, B)
    pieces = parts(simplex)
    supp = set(pieces)
    if not supp:
        return B.vertex_set
    common = None
    for v in supp:
        nbrs = set(B.support_neighbours(v))
        common = nbrs if common is None else common & nbrs
    out = set()
    for u in common - supp:
        out |= B.squid(u)
    for v, piece in pieces.items():
        apex = SquidVertex(v)
        if len(piece) == 2:
            continue
        if apex in piece:
            out |= B.lpoints(v)
        else:
            out.add(apex)
    return frozenset(out)


def classify(simplex) -> str:
    pieces = parts(simplex)
    if not pieces:
        return "empty"
    shapes = sorted((len(p), any(x.is_apex for x in p)) for p in pieces.values())
    if shapes == [(2, True)]:
        return "edge-type"
    if shapes == [(1, True), (2, True)]:
        return "triangle-type"
    if shapes == [(2, True), (2, True)]:
        return "maximal"
    return "bounded-other"


def link_and_classify(simplex, B: BlowupBall):
    """(class, link) with the link given by the closed form for each class."""
    simplex = frozenset(simplex)
    kind = classify(simplex)
    if kind == "empty":
        _check_simplex(simplex, B)
        return kind, B.vertex_set
    if kind == "edge-type":
        _check_simplex(simplex, B)
        (v,) = parts(simplex)
        out = set()
        for u in B.support_neighbours(v):
            out |= B.squid(u)
        return kind, frozenset(out)
    if kind == "triangle-type":
        _check_simplex(simplex, B)
        (w,) = [v for v, p in parts(simplex).items() if len(p) == 1]
        return kind, B.lpoints(w)
    if kind == "maximal":
        _check_simplex(simplex, B)
        return kind, frozenset()
    return kind, link_closed_form(simplex, B)


def is_point_or_join(vertices, B: BlowupBall) -> bool:
    """True for a single vertex or a vertex set splitting as a nontrivial join."""
    vertices = list(vertices)
    if len(vertices) == 1:
        return True
    if len(vertices) < 2:
        return False
    # complement graph disconnected <=> nontrivial join
    comp = nx.Graph()
    comp.add_nodes_from(vertices)
    for x, y in itertools.combinations(vertices, 2):
        if not B.adjacent(x, y):
            comp.add_edge(x, y)
    return not nx.is_connected(comp)


def saturation(simplex, B: BlowupBall, links=None) -> frozenset:
    """Union of all simplices of the ball whose link equals that of the given simplex."""
    simplex = frozenset(simplex)
    if classify(simplex) == "maximal":
        raise ValueError("saturation needs a non-maximal simplex")
    target = link_generic(simplex, B)
    if links is None:
        links = simplex_links(B)
    out = set()
    for s, lk in links.items():
        if lk == target:
            out |= s
    return frozenset(out)


def simplex_links(B: BlowupBall) -> dict:
    return {s: link_generic(s, B) for s in B.simplices()}


def saturation_closed_form(simplex, B: BlowupBall) -> frozenset | None:
    """Closed form for triangle-type and edge-type simplices, or None for other classes."""
    simplex = frozenset(simplex)
    kind = classify(simplex)
    pieces = parts(simplex)
    if kind == "triangle-type":
        (w,) = [v for v, p in pieces.items() if len(p) == 1]
        out = {SquidVertex(w)}
        for u in B.support_neighbours(w):
            out |= B.squid(u)
        return frozenset(out)
    if kind == "edge-type":
        (v,) = pieces
        if valence(v) >= 2 and len(B.support_neighbours(v)) >= 2:
            return B.squid(v)
        if valence(v) == 1:
            # leaves hanging off the same vertex share their link, the squid of that vertex
            nbrs = set(B.support_neighbours(v))
            out = set()
            for u in B.support.vertices:
                if valence(u) == 1 and set(B.support_neighbours(u)) == nbrs:
                    out |= B.squid(u)
            return frozenset(out)
    return None


def equivalent(s1, s2, B: BlowupBall) -> bool:
    return link_generic(s1, B) == link_generic(s2, B)


def _maximal_in(clique, region, B: BlowupBall) -> bool:
    clique = frozenset(clique)
    if not clique <= region:
        return False
    if not all(B.adjacent(x, y) for x, y in itertools.combinations(clique, 2)):
        return False
    return not any(x not in clique and all(B.adjacent(x, y) for y in clique) for x in region)


def _link_of_set(vertices, B: BlowupBall) -> frozenset:
    vertices = frozenset(vertices)
    return frozenset(x for x in B.vertices if x not in vertices and all(B.adjacent(x, y) for y in vertices))


def pr_member(sigma, delta, B: BlowupBall) -> bool:
    """Whether a maximal simplex factors as Π1 ⋆ Π2 ⋆ Π3 for the product region of [Δ].

    Π1 maximal in Lk(Δ), Π2 maximal in Lk(Lk(Δ)), Π3 maximal in Lk(Π1 ⋆ Π2).
    """
    sigma, delta = frozenset(sigma), frozenset(delta)
    _check_simplex(sigma, B)
    lk = link_generic(delta, B)
    lklk = _link_of_set(lk, B)
    p1 = sigma & lk
    p2 = sigma & lklk
    p3 = sigma - p1 - p2
    if not _maximal_in(p1, lk, B) or not _maximal_in(p2, lklk, B):
        return False
    return _maximal_in(p3, _link_of_set(p1 | p2, B), B)


# -- realisations and W-edges


@dataclass(frozen=True)
class Realisation:
    elements: frozenset
    possibly_empty: bool
    truncated: bool = True

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return g in self.elements


def _lpoint_pair(simplex):
    pts = sorted(x for x in simplex if not x.is_apex)
    if len(pts) != 2 or len(simplex) != 4 or pts[0].support == pts[1].support:
        raise ValueError("realisation needs a maximal simplex {(v,x),(w,y)}")
    return pts


def level_set(x: SquidVertex, B: BlowupBall, group_radius=DEFAULT_GROUP_RADIUS) -> frozenset:
    """Indices in the Cayley ball of points of P_v whose L_v-distance to x is at most R."""
    key = (x, group_radius)
    if key in B._levels:
        return B._levels[key]
    v = x.support
    G = v.group
    ball = cayley_ball(G, group_radius + B.R)
    m = B.charts[v.base].m
    star = G.mask(G.graph.star(v.base))
    hinv = G.inverse(v.conjugator).letters
    xinv = G.inverse(x.point).letters
    out = []
    for i, t in enumerate(ball.elements):
        if not all((star >> (c >> 1)) & 1 for c in G._normal(hinv + t)):
            continue
        if abs(m(G.word(xinv + t))) <= B.R:
            out.append(i)
    B._levels[key] = frozenset(out)
    return B._levels[key]


def coarse_level_set(x: SquidVertex, B: BlowupBall, group_radius=DEFAULT_GROUP_RADIUS) -> frozenset:
    """N(x) ∩ B_group_radius as ball indices: the R-thickened level set."""
    ball = cayley_ball(x.support.group, group_radius + B.R)
    near = ball.thicken(level_set(x, B, group_radius), B.R)
    limit = ball.size(group_radius)
    return frozenset(i for i in near if i < limit)


def realisation(simplex, B: BlowupBall, group_radius=DEFAULT_GROUP_RADIUS) -> Realisation:
    """f(Δ) = N(x) ∩ N(y) inside the group ball."""
    simplex = frozenset(simplex)
    key = (simplex, group_radius)
    if key in B._realisations:
        return B._realisations[key]
    x, y = _lpoint_pair(simplex)
    G = x.support.group
    ball = cayley_ball(G, group_radius + B.R)
    idx = coarse_level_set(x, B, group_radius) & coarse_level_set(y, B, group_radius)
    elems = frozenset(ball.word(i) for i in idx)
    out = Realisation(elems, possibly_empty=not elems)
    B._realisations[key] = out
    return out


def _indices(real: Realisation, ball) -> set:
    return {ball.index[g.letters] for g in real.elements}


@dataclass(frozen=True)
class WEdge:
    types: frozenset
    truncated: bool = True

    def __bool__(self):
        return bool(self.types)


def w_adjacent(s1, s2, B: BlowupBall, group_radius=DEFAULT_GROUP_RADIUS) -> WEdge:
    """Which W-edge types join two maximal simplices, judged inside the group ball."""
    s1, s2 = frozenset(s1), frozenset(s2)
    p1, p2 = _lpoint_pair(s1), _lpoint_pair(s2)
    G = p1[0].support.group
    ball = cayley_ball(G, group_radius + B.R)
    types = set()
    f1 = _indices(realisation(s1, B, group_radius), ball)
    f2 = _indices(realisation(s2, B, group_radius), ball)
    if f1 & f2 or any(j in f2 for i in f1 for j in ball.nbrs[i]):
        types.add(1)
    shared = set(p1) & set(p2)
    for x in shared:
        (y,) = set(p1) - {x} or {x}
        (y2,) = set(p2) - {x} or {x}
        ny = coarse_level_set(y, B, group_radius)
        ny2 = coarse_level_set(y2, B, group_radius)
        near = ball.thicken(ny, B.T + 1)
        if any(j in near for j in ny2):
            types.add(2)
    return WEdge(frozenset(types))


def augmented_support_graph(B: BlowupBall, group_radius=DEFAULT_GROUP_RADIUS) -> nx.Graph:
    """Support graph plus an edge between the supports of every W-adjacent pair."""
    g = B.support.to_networkx()
    maxes = B.maximal_simplices()
    for s1, s2 in itertools.combinations(maxes, 2):
        sup1 = {x.support for x in s1}
        sup2 = {x.support for x in s2}
        new = [(u, w) for u in sup1 for w in sup2 if u != w and not g.has_edge(u, w)]
        if not new:
            continue
        if w_adjacent(s1, s2, B, group_radius):
            g.add_edges_from(new)
    return g


# -- hyperbolicity


def _delta_connected(dist: np.ndarray, cap: int, samples: int, seed: int) -> Fraction:
    n = len(dist)
    if n < 4:
        return Fraction(0)
    best = 0
    if n <= cap:
        for i in range(n):
            di = dist[i]
            s1 = di[:, None, None] + dist[None, :, :]
            s2 = di[None, :, None] + dist[:, None, :]
            s3 = di[None, None, :] + dist[:, :, None]
            s = np.sort(np.stack([s1, s2, s3]), axis=0)
            best = max(best, int((s[2] - s[1]).max()))
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            i, j, k, l = (rng.randrange(n) for _ in range(4))
            sums = sorted([dist[i, j] + dist[k, l], dist[i, k] + dist[j, l], dist[i, l] + dist[j, k]])
            best = max(best, int(sums[2] - sums[1]))
    return Fraction(best, 2)


def delta_hyperbolicity_estimate(graph: nx.Graph, cap: int = 80, samples: int = 200_000, seed: int = 0):
    """Four-point δ; exhaustive up to ``cap`` vertices, sampled above.

    Returns a Fraction for a connected graph and a list of Fractions, one per
    component (largest first), otherwise.
    """
    if graph.number_of_nodes() == 0:
        return Fraction(0)
    comps = sorted(nx.connected_components(graph), key=lambda c: (-len(c), sorted(map(str, c))))
    values = []
    for comp in comps:
        nodes = sorted(comp, key=str)
        pos = {u: i for i, u in enumerate(nodes)}
        dist = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
        for u, lengths in nx.all_pairs_shortest_path_length(graph.subgraph(nodes)):
            for w, d in lengths.items():
                dist[pos[u], pos[w]] = d
        values.append(_delta_connected(dist, cap, samples, seed))
    return values[0] if len(values) == 1 else values


# -- strong bounded geodesic image


@dataclass
class BGIReport:
    checked: int = 0
    vacuous: int = 0
    passed: int = 0
    violations: list = field(default_factory=list)


def strong_bgi_check(B: BlowupBall, w: ExtVertex, samples, threshold, rho_point=None,
                     graph: nx.Graph | None = None) -> BGIReport:
    """For sampled pairs (u, v) whose ρ-points in ℓ_w are at least ``threshold`` apart,
    check that every geodesic from u to v in the augmented support graph meets Star(w).

    ``rho_point(u, w)`` returns ρ^{ℓ_u}_{ℓ_w} or None when undefined.
    """
    if rho_point is None:
        from .hierarchy import rho_ell

        rho_point = rho_ell
    if graph is None:
        graph = augmented_support_graph(B)
    star = {w} | set(B.support_neighbours(w))
    rest = graph.subgraph([x for x in graph.nodes if x not in star])
    report = BGIReport()
    for u, v in samples:
        ru, rv = rho_point(u, w, B.charts), rho_point(v, w, B.charts)
        if ru is None or rv is None or abs(ru - rv) < threshold:
            report.vacuous += 1
            continue
        report.checked += 1
        try:
            d = nx.shortest_path_length(graph, u, v)
        except nx.NetworkXNoPath:
            report.passed += 1
            continue
        try:
            avoid = nx.shortest_path_length(rest, u, v) if u in rest and v in rest else math.inf
        except nx.NetworkXNoPath:
            avoid = math.inf
        if avoid > d:
            report.passed += 1
        else:
            report.violations.append((str(u), str(v), ru, rv))
    return report
