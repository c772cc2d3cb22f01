"""Finite pieces of the extension graph and the coned-off Cayley graph."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx

from .errors import EnumerationCapError
from .raag import RAAG, Word


@dataclass(frozen=True)
class ExtVertex:
    """The conjugate g a g^-1 of a standard generator a, keyed by the coset g C(a)."""

    base: str
    conjugator: Word

    def __eq__(self, other):
        if not isinstance(other, ExtVertex):
            return NotImplemented
        return self.base == other.base and self.conjugator.letters == other.conjugator.letters

    def __hash__(self):
        return hash((self.base, self.conjugator.letters))

    def sort_key(self):
        g = self.conjugator
        return (len(g.letters), g.group.graph.index[self.base], g.letters)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def group(self) -> RAAG:
        return self.conjugator.group

    def element(self) -> Word:
        G = self.group
        return G.conjugate(self.conjugator, G.generator(self.base))

    def translate(self, x: Word) -> "ExtVertex":
        return canonical_vertex(self.base, x * self.conjugator)

    def __str__(self):
        if not self.conjugator.letters:
            return self.base
        return f"{self.base}^({self.conjugator})"

    def __repr__(self):
        return f"ExtVertex({self})"


def canonical_vertex(base: str, g: Word) -> ExtVertex:
    G = g.group
    rep, _ = G.split_right(g, G.graph.star(base))
    return ExtVertex(base, rep)


def standard_vertex(G: RAAG, base: str) -> ExtVertex:
    return ExtVertex(base, G.identity)


def adjacent(v: ExtVertex, w: ExtVertex) -> bool:
    if v == w:
        raise ValueError("a vertex is not adjacent to itself")
    G = v.group
    if w.base not in G.graph.adj[v.base]:
        # the colouring map to the defining graph is a graph homomorphism
        return False
    x, y = v.element(), w.element()
    return G.equals(x * y, y * x)


def valence(v: ExtVertex) -> float:
    """Degree of v in the full extension graph."""
    deg = len(v.group.graph.adj[v.base])
    return deg if deg <= 1 else math.inf


@dataclass(frozen=True)
class ExtBall:
    center: ExtVertex
    vertices: tuple
    edges: frozenset
    colors: dict = field(hash=False)
    conj_radius: int = 0

    def neighbours(self, v: ExtVertex):
        out = []
        for e in self.edges:
            if v in e:
                (w,) = e - {v}
                out.append(w)
        return sorted(out)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    def sorted_edges(self):
        return sorted(tuple(sorted(e)) for e in self.edges)

    def to_json(self) -> dict:
        return {
            "vertices": [str(v) for v in self.vertices],
            "edges": [[str(u), str(w)] for u, w in self.sorted_edges()],
            "colors": {str(v): self.colors[v] for v in self.vertices},
            "center": str(self.center),
            "conj_radius": self.conj_radius,
        }

    def to_dot(self, header=()) -> str:
        lines = [f"// {h}" for h in header]
        lines.append("graph extension_ball {")
        for v in self.vertices:
            lines.append(f'  "{v}" [color="{self.colors[v]}"];')
        for u, w in self.sorted_edges():
            lines.append(f'  "{u}" -- "{w}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def extension_ball(v0: ExtVertex, conj_radius: int, cap: int | None = None) -> ExtBall:
    """Vertices whose conjugator, relative to that of v0, has length at most conj_radius."""
    G = v0.group
    cap = G.enumeration_cap if cap is None else cap
    found = set()
    for g in G.ball_enumerate(conj_radius, cap):
        h = v0.conjugator * g
        for a in G.names:
            found.add(canonical_vertex(a, h))
            if len(found) > cap:
                raise EnumerationCapError(f"extension ball exceeds cap {cap}")
    verts = tuple(sorted(found))
    by_base = {}
    for v in verts:
        by_base.setdefault(v.base, []).append(v)
    edges = set()
    for u, w in G.graph.sorted_edges():
        for x in by_base.get(u, ()):
            for y in by_base.get(w, ()):
                if adjacent(x, y):
                    edges.add(frozenset((x, y)))
    return ExtBall(v0, verts, frozenset(edges), {v: v.base for v in verts}, conj_radius)


class ConeOff:
    """Search in the Cayley graph coned off along every coset of every C(a)."""

    def __init__(self, G: RAAG, radius: int):
        self.G = G
        self.radius = radius
        self.elements = [t for layer in G.spheres(radius) for t in layer]
        self.index = {t: i for i, t in enumerate(self.elements)}
        self.stars = [G.mask(G.graph.star(a)) for a in G.names]
        self.cones = {}
        self.cones_of = []
        for i, t in enumerate(self.elements):
            keys = []
            for a, m in enumerate(self.stars):
                _, rest = G._split_left(t[::-1], m)
                key = (a, G._normal(tuple(rest[::-1])))
                self.cones.setdefault(key, []).append(i)
                keys.append(key)
            self.cones_of.append(keys)

    def distance_from_identity(self, target: tuple):
        goal = self.index.get(target)
        if goal is None:
            return None
        G = self.G
        dist = {("e", 0): 0}
        heap = [(0, 0, "e", 0)]
        tick = 1
        while heap:
            d, _, kind, node = heapq.heappop(heap)
            if dist.get((kind, node), math.inf) < d:
                continue
            if kind == "e" and node == goal:
                return d
            if kind == "e":
                t = self.elements[node]
                nbrs = []
                for c in range(2 * G.rank):
                    j = self.index.get(G._normal(t + (c,)))
                    if j is not None:
                        nbrs.append(("e", j))
                nbrs.extend(("c", key) for key in self.cones_of[node])
            else:
                nbrs = [("e", j) for j in self.cones[node]]
            for nb in nbrs:
                nd = d + 1
                if nd < dist.get(nb, math.inf):
                    dist[nb] = nd
                    heapq.heappush(heap, (nd, tick, nb[0], nb[1]))
                    tick += 1
        return None


@lru_cache(maxsize=16)
def _cone_off(G: RAAG, radius: int) -> ConeOff:
    return ConeOff(G, radius)


def coned_off_distance_ub(g: Word, h: Word, search_radius: int = 4):
    """Upper bound on the coned-off distance from g to h; None when the search is exhausted.

    Entering and leaving a cone point costs 1 each, so two points of one coset are at
    distance at most 2.
    """
    G = g.group
    t = G.multiply(G.inverse(g), h)
    if not t.letters:
        return 0
    if len(t.letters) == 1:
        return 1
    for a in G.names:
        if G.in_parabolic(t, G.graph.star(a)):
            return 2
    if len(t.letters) > search_radius:
        return None
    return _cone_off(G, search_radius).distance_from_identity(t.letters)
