"""Quasiline charts: a quasimorphism m and a cutoff C define τ = {g : |m(g)| < C}."""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError
from .quasimorphism import Quasimorphism
from .raag import Word


def default_cutoff(m: Quasimorphism, z: Word) -> Fraction:
    # the second term keeps m(z) strictly inside (0, C/2) when the defect is small
    mz = abs(m(z))
    return max(2 * m.defect_bound + mz + 1, 2 * mz + 1)


class QuasilineChart:
    """The quasiline L_v of a vertex v, modelled by the coordinate m."""

    def __init__(self, m: Quasimorphism, C=None, vertex: str | None = None, z: Word | None = None,
                 group=None):
        G = group if group is not None else (z.group if z is not None else None)
        if z is None and vertex is not None and G is not None:
            z = G.generator(vertex)
        self.m = m
        self.vertex = vertex
        self.z = z
        self.C = Fraction(C) if C is not None else default_cutoff(m, z)
        self.group = G if G is not None else (z.group if z is not None else None)
        self._levels = {}
        self._check()

    def _check(self):
        D = self.m.defect_bound
        if not self.C > 2 * D:
            raise ValueError(f"cutoff {self.C} must exceed twice the defect {D}")
        probes = []
        if self.group is not None:
            probes = [g for g in self.group.generators() if self.m.in_domain(g)]
        if self.z is not None:
            probes.append(self.z)
        if not any(0 < abs(self.m(g)) < self.C / 2 for g in probes):
            raise ValueError("no probed value of m lies in (0, C/2)")

    def __repr__(self):
        return f"QuasilineChart({self.m.name}, C={self.C}, vertex={self.vertex})"

    def coord(self, g) -> Fraction:
        return self.m(g)

    def in_tau(self, g) -> bool:
        return abs(self.m(g)) < self.C

    def tau_levels(self, radius: int) -> "TauLevels":
        if radius not in self._levels:
            self._levels[radius] = TauLevels(self, radius)
        return self._levels[radius]

    def tau_elements(self, radius: int):
        G = self.group
        return [g for g in G.ball_enumerate(radius)[1:] if self.m.in_domain(g) and self.in_tau(g)]


def quasiline_coord(g: Word, chart: QuasilineChart) -> Fraction:
    return chart.coord(g)


def in_tau(g: Word, chart: QuasilineChart) -> bool:
    return chart.in_tau(g)


def tau_distance_bounds(g: Word, chart: QuasilineChart) -> tuple:
    """(lower, upper) for the word length of g over τ."""
    m, C, D = chart.m, chart.C, chart.m.defect_bound
    if g.is_identity():
        return 0, 0
    mg = m(g)
    lower = math.ceil(abs(mg) / (C + D))
    if abs(mg) < C:
        return lower, 1
    if chart.z is None:
        raise ValueError("chart needs its central element for the upper bound")
    mz = m(chart.z)
    if mz == 0:
        raise ValueError("m vanishes on the central element")
    n = round(mg / mz)
    first = g * chart.z ** (-n)
    if not chart.in_tau(first):
        raise ValueError(f"first factor {first} is not in τ; cutoff too small")
    step = math.ceil(C / abs(mz)) - 1
    if step < 1:
        raise ValueError("no nontrivial power of z lies in τ")
    chunks = math.ceil(abs(n) / step)
    return lower, (0 if first.is_identity() else 1) + chunks


def tau_distance_exact_ball(g: Word, chart: QuasilineChart, search_cap: int = 8, radius: int = 2):
    """τ-word length of g, or None when it exceeds search_cap.

    Intermediate points are products of τ-elements from the ball of the given radius;
    the last factor is any element of τ.  The answer is exact whenever some geodesic
    uses ball-sized steps before its last one, which holds for the fixture charts.
    """
    if not chart.m.in_domain(g):
        raise DomainError(f"{g} is outside the chart's domain")
    if g.is_identity():
        return 0
    G = g.group
    levels = chart.tau_levels(radius)
    m, C = chart.m, chart.C
    for k in range(1, search_cap + 1):
        # a point at τ-distance k - 1 followed by a single τ-letter
        for x in levels.shell(k - 1):
            if abs(m(G.multiply(G.inverse(x), g))) < C:
                return k
    return None


class TauLevels:
    """Spheres of the Cayley graph of the domain over τ ∩ B_radius."""

    def __init__(self, chart: QuasilineChart, radius: int):
        self.group = chart.group
        self.steps = [t.letters for t in chart.tau_elements(radius)]
        self.shells = [[()]]
        self.seen = {()}

    def shell(self, k: int):
        G = self.group
        while len(self.shells) <= k:
            new = []
            for w in self.shells[-1]:
                for s in self.steps:
                    t = G._normal(w + s)
                    if t not in self.seen:
                        self.seen.add(t)
                        new.append(t)
            self.shells.append(new)
        return [Word(G, t, canonical=True) for t in self.shells[k]]
