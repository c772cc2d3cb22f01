"""Right-angled Artin groups on triangle- and square-free graphs.

Letters are small integers: generator ``i`` is ``2*i`` and its inverse is
``2*i + 1``.  This code order is exactly the shortlex letter order
``a < a^-1 < b < b^-1 < ...`` so canonical words compare as plain tuples.
"""

from __future__ import annotations

import json
import re
from collections import deque
from functools import lru_cache
from itertools import combinations
from pathlib import Path

from .errors import EnumerationCapError, GraphValidationError, GroupMismatchError, ParseError

DEFAULT_ENUMERATION_CAP = 10**6

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def letter(gen: int, sign: int) -> int:
    return 2 * gen + (0 if sign > 0 else 1)


def gen_of(code: int) -> int:
    return code >> 1


def sign_of(code: int) -> int:
    return -1 if code & 1 else 1


class DefiningGraph:
    """A finite simplicial graph with no triangles and no squares."""

    def __init__(self, vertices, edges):
        vertices = list(vertices)
        for v in vertices:
            if not isinstance(v, str) or not _NAME.match(v):
                raise GraphValidationError(f"vertex name {v!r} is not an identifier")
        if len(set(vertices)) != len(vertices):
            raise GraphValidationError("duplicate vertex names")
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}

        seen = set()
        for e in edges:
            e = tuple(e)
            if len(e) != 2:
                raise GraphValidationError(f"edge {e!r} does not have two endpoints")
            u, w = e
            for x in e:
                if x not in self.index:
                    raise GraphValidationError(f"edge {u}-{w} uses unknown vertex {x!r}")
            if u == w:
                raise GraphValidationError(f"loop at {u}")
            key = frozenset(e)
            if key in seen:
                raise GraphValidationError(f"multi-edge {u}-{w}")
            seen.add(key)
        self.edges = frozenset(seen)

        self.adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, w = tuple(e)
            self.adj[u].add(w)
            self.adj[w].add(u)
        self.adj = {v: frozenset(ns) for v, ns in self.adj.items()}
        self._check_shape()

    def _check_shape(self):
        if len(self.vertices) > 1:
            lonely = [v for v in self.vertices if not self.adj[v]]
            if lonely:
                raise GraphValidationError(f"isolated vertex {lonely[0]}")
        for u in self.vertices:
            for w, x in combinations(sorted(self.adj[u], key=self.index.get), 2):
                if x in self.adj[w]:
                    raise GraphValidationError(f"triangle {u}-{w}-{x}")
        # with no triangles every 4-cycle is induced: two non-adjacent vertices
        # sharing two neighbours
        for u, w in combinations(self.vertices, 2):
            if w in self.adj[u]:
                continue
            common = sorted(self.adj[u] & self.adj[w], key=self.index.get)
            if len(common) >= 2:
                x, y = common[:2]
                raise GraphValidationError(f"square {u}-{x}-{w}-{y}")

    def require_connected(self, min_vertices: int = 3) -> None:
        if len(self.vertices) < min_vertices:
            raise GraphValidationError(f"graph needs at least {min_vertices} vertices")
        if len(self.components()) != 1:
            raise GraphValidationError("graph is not connected")

    def components(self):
        left = set(self.vertices)
        comps = []
        while left:
            start = min(left, key=self.index.get)
            comp = {start}
            todo = [start]
            while todo:
                for w in self.adj[todo.pop()]:
                    if w not in comp:
                        comp.add(w)
                        todo.append(w)
            left -= comp
            comps.append(comp)
        return comps

    def link(self, v: str) -> frozenset:
        return self.adj[v]

    def star(self, v: str) -> frozenset:
        return self.adj[v] | {v}

    def distance(self, u: str, w: str):
        if u == w:
            return 0
        dist = {u: 0}
        todo = deque([u])
        while todo:
            x = todo.popleft()
            for y in self.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    if y == w:
                        return dist[y]
                    todo.append(y)
        return None

    def sorted_edges(self):
        out = []
        for e in self.edges:
            u, w = sorted(e, key=self.index.get)
            out.append((u, w))
        return sorted(out, key=lambda p: (self.index[p[0]], self.index[p[1]]))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data) -> "DefiningGraph":
        if isinstance(data, (str, bytes)):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"graph file is not JSON: {exc}") from None
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise ParseError('graph JSON needs "vertices" and "edges"')
        return cls(data["vertices"], data["edges"])

    @classmethod
    def load(cls, path) -> "DefiningGraph":
        return cls.from_json(Path(path).read_text())

    @classmethod
    def path(cls, *names) -> "DefiningGraph":
        return cls(names, list(zip(names, names[1:])))

    def __eq__(self, other):
        return isinstance(other, DefiningGraph) and (self.vertices, self.edges) == (other.vertices, other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        es = " ".join(f"{u}-{w}" for u, w in self.sorted_edges())
        return f"DefiningGraph({' '.join(self.vertices)}; {es})"


_TOKEN = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<one>1)(?![0-9])|(?P<open>\()|(?P<close>\))"
    r"|\^\s*(?P<exp>[+-]?\s*\d+))"
)


class RAAG:
    """The right-angled Artin group of a defining graph."""

    def __init__(self, graph: DefiningGraph, enumeration_cap: int = DEFAULT_ENUMERATION_CAP):
        self.graph = graph
        self.names = graph.vertices
        self.rank = len(self.names)
        self.enumeration_cap = enumeration_cap
        n = self.rank
        # noncomm[i]: bitmask of generators that do not commute with i (i included)
        self.noncomm = []
        for i, v in enumerate(self.names):
            mask = 0
            for j, w in enumerate(self.names):
                if j == i or w not in graph.adj[v]:
                    mask |= 1 << j
            self.noncomm.append(mask)
        self.full_mask = (1 << n) - 1
        self._normal = lru_cache(maxsize=1 << 18)(self._normal_uncached)
        self.identity = Word(self, (), canonical=True)

    def __eq__(self, other):
        return isinstance(other, RAAG) and self.graph == other.graph

    def __hash__(self):
        return hash(self.graph)

    def __repr__(self):
        return f"RAAG({self.graph!r})"

    # -- letters and parsing

    def gen(self, name: str) -> int:
        try:
            return self.graph.index[name]
        except KeyError:
            raise ParseError(f"unknown generator {name!r}") from None

    def mask(self, names) -> int:
        m = 0
        for v in names:
            m |= 1 << self.gen(v)
        return m

    def commute(self, i: int, j: int) -> bool:
        return not (self.noncomm[i] >> j) & 1

    def generator(self, name: str, power: int = 1) -> "Word":
        g = self.gen(name)
        code = letter(g, power)
        return self.word((code,) * abs(power))

    def generators(self):
        return [self.generator(v) for v in self.names]

    def parse(self, text: str) -> "Word":
        """Parse ``name``, ``name^k`` and ``(word)^k`` tokens separated by whitespace."""
        if isinstance(text, Word):
            self._check(text)
            return text
        text = text.strip()
        if text in ("", "1", "e", "id"):
            return self.identity
        pos = 0
        stack = [[]]
        last = None  # the letters of the most recent atom, for exponents
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise ParseError(f"cannot parse word at {rest[:12]!r}")
            pos = m.end()
            if m.group("name"):
                atom = [letter(self.gen(m.group("name")), 1)]
                stack[-1].append(atom)
                last = atom
            elif m.group("one"):
                atom = []
                stack[-1].append(atom)
                last = atom
            elif m.group("open"):
                stack.append([])
                last = None
            elif m.group("close"):
                if len(stack) == 1:
                    raise ParseError("unbalanced ')'")
                inner = [c for atom in stack.pop() for c in atom]
                stack[-1].append(inner)
                last = inner
            else:
                if last is None:
                    raise ParseError("exponent with nothing to raise")
                k = int(m.group("exp").replace(" ", ""))
                base = list(last)
                if k < 0:
                    base = [c ^ 1 for c in reversed(base)]
                last[:] = base * abs(k)
                last = None
        if len(stack) != 1:
            raise ParseError("unbalanced '('")
        return self.word(tuple(c for atom in stack[0] for c in atom))

    def word(self, letters) -> "Word":
        return Word(self, self._normal(tuple(letters)), canonical=True)

    def format(self, letters) -> str:
        if not letters:
            return "1"
        parts = []
        i = 0
        while i < len(letters):
            j = i
            while j < len(letters) and letters[j] == letters[i]:
                j += 1
            run = j - i
            name = self.names[gen_of(letters[i])]
            k = run * sign_of(letters[i])
            parts.append(name if k == 1 else f"{name}^{k}")
            i = j
        return " ".join(parts)

    # -- normal form

    def _normal_uncached(self, letters: tuple) -> tuple:
        return self._sort(self._reduce(letters))

    def _reduce(self, letters) -> list:
        out = []
        for c in letters:
            g = c >> 1
            block = self.noncomm[g]
            j = len(out) - 1
            while j >= 0:
                h = out[j] >> 1
                if (block >> h) & 1:
                    break
                j -= 1
            if j >= 0 and out[j] == c ^ 1:
                del out[j]
            else:
                out.append(c)
        return out

    def _sort(self, letters) -> tuple:
        # lexicographically least linear extension of the letters' heap order
        rest = list(letters)
        res = []
        while rest:
            blocked = 0
            best = best_i = -1
            for i, c in enumerate(rest):
                g = c >> 1
                if not (blocked >> g) & 1 and (best < 0 or c < best):
                    best, best_i = c, i
                blocked |= self.noncomm[g]
            res.append(best)
            del rest[best_i]
        return tuple(res)

    def _check(self, *words):
        for w in words:
            if w.group is not self and w.group != self:
                raise GroupMismatchError("words belong to different groups")

    def normal_form(self, w) -> "Word":
        if isinstance(w, str):
            return self.parse(w)
        self._check(w)
        return w if w.canonical else self.word(w.letters)

    def multiply(self, *words) -> "Word":
        self._check(*words)
        return self.word(tuple(c for w in words for c in w.letters))

    def inverse(self, w) -> "Word":
        self._check(w)
        return Word(self, tuple(c ^ 1 for c in reversed(w.letters)), canonical=w.canonical)

    def equals(self, u, v) -> bool:
        self._check(u, v)
        return self.normal_form(u).letters == self.normal_form(v).letters

    def conjugate(self, x, g) -> "Word":
        """x g x^-1."""
        return self.multiply(x, g, self.inverse(x))

    # -- parabolic subgroups

    def in_parabolic(self, w, S) -> bool:
        m = self.mask(S) if not isinstance(S, int) else S
        return all((m >> (c >> 1)) & 1 for c in w.letters)

    def parabolic_gate(self, w, S) -> "Word":
        """Largest left divisor of w lying in the parabolic subgroup G_S."""
        m = self.mask(S) if not isinstance(S, int) else S
        prefix, _ = self._split_left(self.normal_form(w).letters, m)
        return self.word(prefix)

    def _split_left(self, letters, m):
        prefix, rest = [], []
        blocked = 0
        for c in letters:
            g = c >> 1
            if (m >> g) & 1 and not (blocked >> g) & 1:
                prefix.append(c)
            else:
                rest.append(c)
                blocked |= self.noncomm[g]
        return prefix, rest

    def split_right(self, w, S):
        """Write w = r d with d the largest right divisor of w in G_S."""
        m = self.mask(S) if not isinstance(S, int) else S
        suffix, rest = self._split_left(self.normal_form(w).letters[::-1], m)
        return self.word(rest[::-1]), self.word(suffix[::-1])

    def delete_generators(self, w, S) -> "Word":
        """Image under the retraction killing every generator in S."""
        m = self.mask(S) if not isinstance(S, int) else S
        return self.word(c for c in w.letters if not (m >> (c >> 1)) & 1)

    # -- balls

    def spheres(self, r: int, cap: int | None = None):
        """Spheres S_0..S_r of the Cayley graph as lists of canonical letter tuples."""
        cap = self.enumeration_cap if cap is None else cap
        layers = [[()]]
        seen = {()}
        total = 1
        codes = range(2 * self.rank)
        for _ in range(r):
            nxt = []
            for w in layers[-1]:
                for c in codes:
                    u = self._normal(w + (c,))
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            total += len(nxt)
            if total > cap:
                raise EnumerationCapError(f"ball exceeds enumeration cap {cap}")
            nxt.sort(key=lambda t: t)
            layers.append(nxt)
        return layers

    def ball_enumerate(self, r: int, cap: int | None = None):
        """All elements of word length at most r, in shortlex order."""
        if r < 0:
            raise ValueError("radius must be nonnegative")
        return tuple(Word(self, t, canonical=True) for layer in self.spheres(r, cap) for t in layer)

    def word_length(self, w) -> int:
        return len(self.normal_form(w).letters)

    def distance(self, u, v) -> int:
        return len(self.multiply(self.inverse(u), v).letters)


class Word:
    """A group element, stored by its letters."""

    __slots__ = ("group", "letters", "canonical")

    def __init__(self, group: RAAG, letters=(), canonical: bool = False):
        self.group = group
        self.letters = tuple(letters)
        self.canonical = canonical

    def normal(self) -> "Word":
        return self if self.canonical else self.group.word(self.letters)

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.group.multiply(self, other)

    def __pow__(self, n: int):
        base = self.letters if n >= 0 else tuple(c ^ 1 for c in reversed(self.letters))
        return self.group.word(base * abs(n))

    def inverse(self) -> "Word":
        return self.group.inverse(self)

    def __invert__(self):
        return self.inverse()

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        if self.group != other.group:
            return False
        return self.normal().letters == other.normal().letters

    def __hash__(self):
        return hash(self.normal().letters)

    def __len__(self):
        return len(self.normal().letters)

    def __bool__(self):
        return bool(self.normal().letters)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        n = self.normal().letters
        return (len(n), n)

    def is_identity(self) -> bool:
        return not self.normal().letters

    def __str__(self):
        return self.group.format(self.letters)

    def __repr__(self):
        return f"Word({self})"


class CayleyBall:
    """The ball B_r of the Cayley graph with integer-indexed neighbour lists.

    Elements are stored in shortlex order by sphere, so B_s for s <= r is the
    prefix ``elements[:ends[s]]``.
    """

    def __init__(self, G: RAAG, radius: int):
        self.group = G
        self.radius = radius
        layers = G.spheres(radius)
        self.elements = [t for layer in layers for t in layer]
        self.ends = []
        total = 0
        for layer in layers:
            total += len(layer)
            self.ends.append(total)
        self.index = {t: i for i, t in enumerate(self.elements)}
        self.nbrs = []
        codes = range(2 * G.rank)
        for t in self.elements:
            out = []
            for c in codes:
                j = self.index.get(G._normal(t + (c,)))
                if j is not None:
                    out.append(j)
            self.nbrs.append(out)

    def __len__(self):
        return len(self.elements)

    def word(self, i: int) -> Word:
        return Word(self.group, self.elements[i], canonical=True)

    def size(self, s: int) -> int:
        return self.ends[s]

    def thicken(self, sources, depth: int) -> dict:
        """Distances (at most depth) from a set of source indices."""
        dist = {i: 0 for i in sources}
        frontier = list(dist)
        for d in range(1, depth + 1):
            nxt = []
            for i in frontier:
                for j in self.nbrs[i]:
                    if j not in dist:
                        dist[j] = d
                        nxt.append(j)
            frontier = nxt
        return dist


@lru_cache(maxsize=8)
def cayley_ball(G: RAAG, radius: int) -> CayleyBall:
    return CayleyBall(G, radius)
