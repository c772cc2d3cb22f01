"""Domains, projections, ρ-points and coordinatewise coarse medians for a RAAG."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError
from .extension import ExtVertex, adjacent, canonical_vertex, coned_off_distance_ub, standard_vertex, valence
from .quasiline import QuasilineChart
from .quasimorphism import brooks_homogenized, exponent_hom, phi_lambda
from .raag import RAAG, Word, gen_of


class Relation(enum.Enum):
    EQUAL = "equal"
    NESTED = "nested"  # first ⊑ second
    CONTAINS = "contains"  # second ⊑ first
    ORTHOGONAL = "orthogonal"
    TRANSVERSE = "transverse"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Domain:
    kind: str  # "top", "U" or "ell"
    vertex: ExtVertex | None = None
    chart: QuasilineChart | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in ("top", "U", "ell"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind != "top" and self.vertex is None:
            raise ValueError("U and ell domains need a vertex")
        if self.kind == "ell" and self.chart is None:
            raise ValueError("ell domains need a chart")

    def __str__(self):
        if self.kind == "top":
            return "S"
        return f"{'l' if self.kind == 'ell' else 'U'}[{self.vertex}]"

    def sort_key(self):
        order = {"top": 0, "ell": 1, "U": 2}[self.kind]
        return (order, () if self.vertex is None else self.vertex.sort_key())


TOP = Domain("top")


def ell(v: ExtVertex, charts: dict) -> Domain:
    return Domain("ell", v, charts[v.base])


def U(v: ExtVertex) -> Domain:
    return Domain("U", v)


def default_charts(G: RAAG, distinguished: str | None = None, lam=0, psi_pattern=None, cutoff=None) -> dict:
    """Exponent charts everywhere, with φ^λ = exp + λ ψ∘𝔭 at the distinguished vertex."""
    charts = {}
    for a in G.names:
        m = exponent_hom(G, a)
        if a == distinguished and Fraction(lam) != 0:
            m = phi_lambda(m, default_psi(G, a, psi_pattern), lam, vertex=None)
        C = cutoff if (cutoff is not None and a == distinguished) else None
        charts[a] = QuasilineChart(m, C, a, group=G)
    return charts


def default_psi(G: RAAG, v: str, pattern=None):
    if pattern is None:
        link = sorted(G.graph.link(v), key=G.graph.index.get)
        if len(link) < 2:
            raise DomainError(f"Lk({v}) has fewer than two vertices, so its parabolic is elementary")
        pattern = f"{link[0]} {link[1]}"
    psi = brooks_homogenized(G, pattern)
    if not psi.domain <= G.graph.link(v):
        raise DomainError(f"ψ pattern {pattern} does not lie in Lk({v})")
    return psi


# -- relations


def _distance_at_least_two(v: ExtVertex, w: ExtVertex) -> bool:
    return v != w and not adjacent(v, w)


def domain_relation(A: Domain, B: Domain, ball=None) -> Relation:
    if ball is not None:
        for D in (A, B):
            if D.vertex is not None and D.vertex not in ball.vertices:
                return Relation.UNKNOWN
    if A == B:
        return Relation.EQUAL
    if B.kind == "top":
        return Relation.NESTED
    if A.kind == "top":
        return Relation.CONTAINS
    v, w = A.vertex, B.vertex
    if A.kind == "ell" and B.kind == "ell":
        return Relation.ORTHOGONAL if adjacent(v, w) else Relation.TRANSVERSE
    if A.kind == "U" and B.kind == "ell":
        return _flip(domain_relation(B, A))
    if A.kind == "ell" and B.kind == "U":
        if v == w:
            return Relation.ORTHOGONAL
        if adjacent(v, w):
            return Relation.NESTED
        return Relation.TRANSVERSE if valence(w) > 1 else Relation.UNKNOWN
    # both U
    if valence(v) > 1 and valence(w) > 1:
        return Relation.TRANSVERSE
    return Relation.UNKNOWN


def _flip(rel: Relation) -> Relation:
    return {Relation.NESTED: Relation.CONTAINS, Relation.CONTAINS: Relation.NESTED}.get(rel, rel)


# -- projections


def standardize(g: Word, v: ExtVertex) -> Word:
    G = g.group
    return G.multiply(G.inverse(v.conjugator), g)


def gate_to_star(g: Word, v: ExtVertex) -> Word:
    """Gate of g onto P_v, written in the standard position of v."""
    G = g.group
    return G.parabolic_gate(standardize(g, v), G.graph.star(v.base))


def project(g: Word, D: Domain):
    if D.kind == "top":
        return g
    gate = gate_to_star(g, D.vertex)
    if D.kind == "ell":
        return D.chart.coord(gate)
    return g.group.delete_generators(gate, {D.vertex.base})


# -- ρ-points


def _transverse_gate(u: ExtVertex, w: ExtVertex):
    """Gate of the coset P_u onto C(w), as (gate of the coset representative, free directions)."""
    G = u.group
    r = canonical_vertex(u.base, standardize(u.conjugator, w)).conjugator
    star_w = G.graph.star(w.base)
    prefix, rest = G._split_left(r.letters, G.mask(star_w))
    free = set(star_w) & set(G.graph.star(u.base))
    for c in rest:
        free &= G.graph.link(G.names[gen_of(c)])
    return G.word(prefix), free


def rho_ell(u: ExtVertex, w: ExtVertex, charts: dict):
    """ρ^{ℓ_u}_{ℓ_w}, or None when ℓ_u and ℓ_w are not transverse."""
    if u == w or adjacent(u, w):
        return None
    gate, _ = _transverse_gate(u, w)
    return charts[w.base].coord(gate)


def rho(source: Domain, target: Domain):
    """ρ^source_target: the bounded set ``source`` leaves in ``target``'s coordinate space."""
    rel = domain_relation(source, target)
    if rel == Relation.ORTHOGONAL:
        raise DomainError("no ρ between orthogonal domains")
    if rel in (Relation.EQUAL, Relation.UNKNOWN):
        raise DomainError(f"ρ undefined for {rel.value} domains")
    if rel == Relation.CONTAINS:
        raise DomainError("ρ from a domain into one it contains is not modelled")
    if target.kind == "top":
        return source.vertex
    u, w = source.vertex, target.vertex
    G = w.group
    if rel == Relation.NESTED:
        # ℓ_u ⊑ U_w: the vertex u seen from w, i.e. a point of Lk(w)
        return canonical_vertex(u.base, standardize(u.conjugator, w))
    if target.kind == "ell":
        if source.kind == "ell":
            return rho_ell(u, w, {w.base: target.chart})
        gate, _ = _transverse_gate(u, w)
        return target.chart.coord(gate)
    gate, free = _transverse_gate(u, w)
    link_dirs = sorted(free & set(G.graph.link(w.base)), key=G.graph.index.get)
    if link_dirs:
        return canonical_vertex(link_dirs[0], gate)
    return G.delete_generators(gate, {w.base})


# -- consistency


@dataclass
class ConsistencyStat:
    value: Fraction
    witness: tuple | None
    pairs: int
    samples: int = 1


def transverse_ell_pairs(ball, charts: dict):
    out = []
    verts = list(ball.vertices)
    for i, u in enumerate(verts):
        for w in verts[i + 1:]:
            if not adjacent(u, w):
                out.append((ell(u, charts), ell(w, charts)))
    return out


def consistency_check(g: Word, pairs) -> ConsistencyStat:
    """max over pairs of min(|π_U(g) − ρ^V_U|, |π_V(g) − ρ^U_V|)."""
    best, witness = Fraction(0), None
    n = 0
    for A, B in pairs:
        n += 1
        a = abs(project(g, A) - rho(B, A))
        b = abs(project(g, B) - rho(A, B))
        val = min(a, b)
        if witness is None or val > best:
            best, witness = val, (str(g), str(A), str(B))
    return ConsistencyStat(best, witness, n)


def consistency_statistic(samples, pairs) -> ConsistencyStat:
    pairs = list(pairs)
    best = ConsistencyStat(Fraction(0), None, len(pairs), 0)
    count = 0
    for g in samples:
        count += 1
        stat = consistency_check(g, pairs)
        if best.witness is None or stat.value > best.value:
            best = ConsistencyStat(stat.value, stat.witness, len(pairs))
    best.samples = count
    return best


def sample_ball(G: RAAG, radius: int, count: int, seed: int = 0):
    """``count`` seeded uniform draws from B_radius."""
    ball = G.ball_enumerate(radius)
    rng = random.Random(seed)
    return [ball[rng.randrange(len(ball))] for _ in range(count)]


# -- medians


def median3(a, b, c):
    return sorted((a, b, c))[1]


def free_coned_distance(u: Word, w: Word) -> int:
    """Distance in a free parabolic coned off along the cyclic subgroups of its generators."""
    G = u.group
    t = G.multiply(G.inverse(u), w).letters
    total, i = 0, 0
    while i < len(t):
        j = i
        while j < len(t) and t[j] == t[i]:
            j += 1
        total += min(j - i, 2)
        i = j
    return total


def _top_distance(p: Word, q: Word) -> int:
    d = coned_off_distance_ub(p, q)
    return p.group.distance(p, q) if d is None else d


def _centre(points, dist):
    """The input minimising the Gromov product of the other two, ties by shortlex."""
    best = None
    for i, p in enumerate(points):
        q, r = [points[j] for j in range(3) if j != i]
        gp = Fraction(dist(p, q) + dist(p, r) - dist(q, r), 2)
        key = (gp, p.sort_key())
        if best is None or key < best[0]:
            best = (key, p)
    return best[1]


@dataclass
class MedianResult:
    tuple: dict
    quasiline_representatives: dict
    divergence_witnesses: dict = field(default_factory=dict)

    def ell_coordinates(self) -> dict:
        return {D: c for D, c in self.tuple.items() if D.kind == "ell"}


class ShortStructure:
    """Charts plus a finite support ball: enough data for projections and medians."""

    def __init__(self, G: RAAG, distinguished: str | None = None, lam=0, psi_pattern=None,
                 cutoff=None, support_radius: int = 1, charts: dict | None = None):
        self.group = G
        self.distinguished = distinguished if distinguished is not None else G.names[0]
        self.lam = Fraction(lam)
        self.charts = charts if charts is not None else default_charts(G, self.distinguished, lam, psi_pattern, cutoff)
        self.support_radius = support_radius
        self._ball = None

    @property
    def ball(self):
        if self._ball is None:
            from .extension import extension_ball

            self._ball = extension_ball(standard_vertex(self.group, self.distinguished), self.support_radius)
        return self._ball

    def ell(self, v: ExtVertex) -> Domain:
        return ell(v, self.charts)

    def domains(self):
        out = [TOP]
        for v in self.ball.vertices:
            out.append(self.ell(v))
        for v in self.ball.vertices:
            if valence(v) > 1:
                out.append(U(v))
        return out

    def median(self, x: Word, y: Word, z: Word, domains=None) -> MedianResult:
        pts = (x, y, z)
        coords, reps = {}, {}
        for D in domains if domains is not None else self.domains():
            if D.kind == "ell":
                vals = [project(p, D) for p in pts]
                med = median3(*vals)
                coords[D] = med
                reps[D] = min((p for p, val in zip(pts, vals) if val == med), key=Word.sort_key)
            elif D.kind == "U":
                images = [project(p, D) for p in pts]
                centre = _centre(images, free_coned_distance)
                coords[D] = centre
            else:
                coords[D] = _centre(list(pts), _top_distance)
        return MedianResult(coords, reps)


def median_tuple(x: Word, y: Word, z: Word, lam=0, structure: ShortStructure | None = None,
                 distinguished: str = "b") -> MedianResult:
    if structure is None:
        structure = ShortStructure(x.group, distinguished, lam)
    return structure.median(x, y, z)


def _ell_median_rep(chart: QuasilineChart, pts):
    vals = [chart.coord(p) for p in pts]
    med = median3(*vals)
    return min((p for p, val in zip(pts, vals) if val == med), key=Word.sort_key), vals


@dataclass
class DivergenceRow:
    l: int
    k: int
    lambda1: Fraction
    lambda2: Fraction
    phi1_of_triple: tuple
    phi2_of_triple: tuple
    x1: Word
    x2: Word
    divergence: Fraction
    divergence_lambda1: Fraction


def divergence_row(G: RAAG, lambda1, lambda2, k: int, l: int, v: str = "b", z: Word | None = None,
                   g: Word | None = None, psi_pattern=None) -> DivergenceRow:
    lambda1, lambda2 = Fraction(lambda1), Fraction(lambda2)
    psi = default_psi(G, v, psi_pattern)
    z = G.generator(v) if z is None else z
    g = G.parse(" ".join(sorted(psi.domain, key=G.graph.index.get))) if g is None else g
    if psi(G.delete_generators(g, {v})) == 0:
        raise DomainError("ψ vanishes on 𝔭(g); the triple cannot separate the medians")
    phi = exponent_hom(G, v)
    c1 = QuasilineChart(phi_lambda(phi, psi, lambda1, vertex=v), None, v, group=G)
    c2 = QuasilineChart(phi_lambda(phi, psi, lambda2, vertex=v), None, v, group=G)
    triple = (G.identity, z**k, g**l)
    x1, vals1 = _ell_median_rep(c1, triple)
    x2, vals2 = _ell_median_rep(c2, triple)
    div2 = abs(c2.coord(x1) - c2.coord(x2))
    div1 = abs(c1.coord(x1) - c1.coord(x2))
    return DivergenceRow(l, k, lambda1, lambda2, tuple(vals1), tuple(vals2), x1, x2, div2, div1)


def median_divergence(lambda1, lambda2, k: int, l: int, v: str, z: Word, g: Word, psi_pattern=None) -> Fraction:
    """|φ^{λ2}(x_1) − φ^{λ2}(x_2)| for the median representatives of the triple (1, z^k, g^l)."""
    return divergence_row(z.group, lambda1, lambda2, k, l, v, z, g, psi_pattern).divergence


@dataclass
class FourPointStat:
    per_chart: dict
    quadruples: int

    @property
    def value(self) -> Fraction:
        return max(self.per_chart.values(), default=Fraction(0))


def four_point_check(samples, lam=0, structure: ShortStructure | None = None) -> FourPointStat:
    """Chart distance between μ(μ(a,b,c),b,d) and μ(a,b,μ(c,b,d)), coordinatewise on ℓ-domains."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one quadruple")
    if structure is None:
        structure = ShortStructure(samples[0][0].group, "b", lam)
    doms = [D for D in structure.domains() if D.kind == "ell"]
    per = {str(D): Fraction(0) for D in doms}
    for a, b, c, d in samples:
        for D in doms:
            pa, pb, pc, pd = (project(p, D) for p in (a, b, c, d))
            lhs = median3(median3(pa, pb, pc), pb, pd)
            rhs = median3(pa, pb, median3(pc, pb, pd))
            per[str(D)] = max(per[str(D)], abs(lhs - rhs))
    return FourPointStat(per, len(samples))
