"""Quasimorphisms: exponent sums, Brooks counting, averaging and the φ^λ family."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import DomainError, InfeasibleError, ParseError
from .raag import RAAG, Word, gen_of

BROOKS_DEFECT = Fraction(6)


@dataclass(frozen=True)
class Quasimorphism:
    """An evaluatable map to the rationals together with a declared defect bound.

    ``domain`` names the generators of the parabolic subgroup the map lives on
    (None for the whole group); ``member`` overrides it for other subgroups.
    """

    func: Callable
    defect_bound: Fraction
    homogeneous: bool
    domain: frozenset | None = None
    member: Callable | None = field(default=None, compare=False)
    name: str = "m"

    def in_domain(self, g) -> bool:
        if self.member is not None:
            return self.member(g)
        if self.domain is None:
            return True
        return g.group.in_parabolic(g.normal(), self.domain)

    def __call__(self, g) -> Fraction:
        if not self.in_domain(g):
            raise DomainError(f"{g} is outside the domain of {self.name}")
        return Fraction(self.func(g))

    def __str__(self):
        return self.name


def exponent_hom(G: RAAG, name: str) -> Quasimorphism:
    """Exponent sum of one generator; a homomorphism on the whole group."""
    i = G.gen(name)

    def count(g):
        return sum(1 if c == 2 * i else -1 for c in g.letters if gen_of(c) == i)

    return Quasimorphism(count, Fraction(0), True, None, name=f"exp:{name}")


def _check_pattern(G: RAAG, pattern: Word) -> tuple:
    p = pattern.normal().letters
    if len(p) != 2:
        raise ValueError("Brooks patterns must have length 2")
    x, y = gen_of(p[0]), gen_of(p[1])
    if x == y:
        raise ValueError("Brooks patterns must use two different generators")
    if G.commute(x, y):
        raise ValueError("pattern generators commute, so they do not span a free subgroup")
    return p


def _free_count(letters, pattern, cyclic: bool) -> int:
    inv = (pattern[1] ^ 1, pattern[0] ^ 1)
    n = len(letters)
    stop = n if cyclic else n - 1
    total = 0
    for i in range(max(stop, 0)):
        pair = (letters[i], letters[(i + 1) % n])
        if pair == pattern:
            total += 1
        elif pair == inv:
            total -= 1
    return total


def cyclic_reduction(letters) -> tuple:
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == letters[j - 1] ^ 1:
        i += 1
        j -= 1
    return tuple(letters[i:j])


def brooks_raw(G: RAAG, pattern) -> Quasimorphism:
    """Occurrences of a length-2 pattern minus those of its inverse in the reduced word."""
    pattern = G.parse(pattern) if isinstance(pattern, str) else pattern
    p = _check_pattern(G, pattern)
    gens = frozenset(G.names[gen_of(c)] for c in p)
    return Quasimorphism(
        lambda g: _free_count(g.normal().letters, p, cyclic=False),
        Fraction(3),
        False,
        gens,
        name=f"brooks-raw:{pattern}",
    )


def brooks_homogenized(G: RAAG, pattern, defect_bound=BROOKS_DEFECT) -> Quasimorphism:
    """Homogenised Brooks quasimorphism, counted on the cyclic reduction."""
    pattern = G.parse(pattern) if isinstance(pattern, str) else pattern
    p = _check_pattern(G, pattern)
    gens = frozenset(G.names[gen_of(c)] for c in p)

    def count(g):
        w = cyclic_reduction(g.normal().letters)
        return _free_count(w, p, cyclic=True) if w else 0

    return Quasimorphism(count, Fraction(defect_bound), True, gens, name=f"brooks:{pattern}")


def homogenize_numeric(m: Quasimorphism, g: Word, N: int) -> Fraction:
    if N < 1:
        raise ValueError("N must be positive")
    return m(g**N) / N


def defect_lower_bound(m: Quasimorphism, samples) -> Fraction:
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample pair")
    return max(abs(m(g * h) - m(g) - m(h)) for g, h in samples)


@dataclass(frozen=True)
class ExtensionData:
    """Coset representatives g_1 = 1, ..., g_k of E in G with signs ε(g_i)."""

    coset_reps: tuple
    epsilon: tuple

    def __post_init__(self):
        if len(self.coset_reps) != len(self.epsilon) or not self.coset_reps:
            raise ValueError("need one sign per coset representative")
        if self.epsilon[0] != 1:
            raise ValueError("the first representative must carry sign +1")
        if any(e not in (1, -1) for e in self.epsilon):
            raise ValueError("signs must be +1 or -1")

    @property
    def index(self) -> int:
        return len(self.coset_reps)


def average_m_G(m: Quasimorphism, ext: ExtensionData) -> Quasimorphism:
    """m^G(h) = (1/k) Σ ε(g_i) m(g_i h g_i^-1)."""
    k = ext.index
    pairs = list(zip(ext.coset_reps, ext.epsilon))

    def avg(h):
        return sum(e * m(x * h * x.inverse()) for x, e in pairs) / Fraction(k)

    return Quasimorphism(avg, m.defect_bound, m.homogeneous, m.domain, m.member, name=f"avg({m.name})")


@dataclass(frozen=True)
class KleinElement:
    """z^b t^a in the Klein-bottle group <z, t | t z t^-1 = z^-1>."""

    b: int
    a: int

    def __mul__(self, other):
        sign = -1 if self.a % 2 else 1
        return KleinElement(self.b + sign * other.b, self.a + other.a)

    def inverse(self):
        sign = -1 if self.a % 2 else 1
        return KleinElement(-sign * self.b, -self.a)

    def __pow__(self, n: int):
        out = KleinElement(0, 0)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out


def klein_test_extension():
    """E = <z, t^2> of index 2, m(z^b t^(2c)) = b + c, reps {1, t} with ε(t) = -1."""
    m = Quasimorphism(
        lambda h: h.b + h.a // 2,
        Fraction(0),
        True,
        member=lambda h: h.a % 2 == 0,
        name="klein-m",
    )
    ext = ExtensionData((KleinElement(0, 0), KleinElement(0, 1)), (1, -1))
    return m, ext


def phi_lambda(phi: Quasimorphism, psi: Quasimorphism, lam, vertex: str | None = None) -> Quasimorphism:
    """φ + λ ψ∘𝔭, where 𝔭 deletes the letters of ``vertex``.

    Without a vertex, 𝔭 deletes every letter outside ψ's generators, which is the
    same map on the centraliser of the vertex and a homomorphism on the whole group.
    """
    lam = Fraction(lam)
    if psi.domain is None and vertex is None:
        raise ValueError("ψ needs a parabolic domain or an explicit vertex")

    def project(g):
        G = g.group
        if vertex is not None:
            return G.delete_generators(g, {vertex})
        return G.delete_generators(g, G.mask(set(G.names) - psi.domain))

    def value(g):
        if lam == 0:
            return phi(g)
        return phi(g) + lam * psi(project(g))

    return Quasimorphism(
        value,
        phi.defect_bound + abs(lam) * psi.defect_bound,
        phi.homogeneous and psi.homogeneous,
        phi.domain,
        phi.member,
        name=f"lam:{lam}:{phi.name}:{psi.name}",
    )


@dataclass
class VanishingReport:
    max_value: Fraction
    witness: tuple | None
    checked: int
    skipped: int

    @property
    def passed(self) -> bool:
        return self.max_value == 0


def check_link_vanishing(phi: Quasimorphism, v: str, sample_conjugators, group: RAAG | None = None,
                         max_power: int = 10) -> VanishingReport:
    """Largest |φ(x w^n x^-1)| over w in Lk(v), sampled x and 1 ≤ n ≤ max_power."""
    xs = list(sample_conjugators)
    G = group if group is not None else (xs[0].group if xs else None)
    best, witness, checked, skipped = Fraction(0), None, 0, 0
    if G is None:
        return VanishingReport(best, witness, checked, skipped)
    for w in sorted(G.graph.link(v), key=G.graph.index.get):
        for x in xs:
            for n in range(1, max_power + 1):
                elem = G.conjugate(x, G.generator(w, n))
                if not phi.in_domain(elem):
                    skipped += 1
                    continue
                checked += 1
                val = abs(phi(elem))
                if val > best:
                    best, witness = val, (w, str(x), n)
    return VanishingReport(best, witness, checked, skipped)


@dataclass(frozen=True)
class StraighteningInput:
    """Rows (sign_g, sign_z, M) encoding t g^(2N) t^-1 = g^(sign_g 2N) z^M and t z t^-1 = z^sign_z."""

    N: int
    rows: tuple = ()

    def __post_init__(self):
        if self.N <= 0:
            raise ValueError("N must be positive")
        for sg, sz, _ in self.rows:
            if sg not in (1, -1) or sz not in (1, -1):
                raise ValueError("row signs must be +1 or -1")


def conjugate_exponents(N: int, row, p: int, q: int) -> tuple:
    """Exponents of t (g^p z^q) t^-1 for p a multiple of 2N."""
    sg, sz, M = row
    return sg * p, Fraction(M * p, 2 * N) + sz * q


def straighten(data: StraighteningInput) -> tuple:
    """Exponents (p, q) with g^p z^q generating a subgroup normalised by every row."""
    N = data.N
    p, q = 2 * N, 0
    for sg, sz, M in data.rows:
        if sg == -1 and sz == 1:
            p, q = 4 * N, -M
            break
        if sg == 1 and sz == -1:
            p, q = 4 * N, M
            break
    for row in data.rows:
        image = conjugate_exponents(N, row, p, q)
        if image not in ((p, q), (-p, -q)):
            raise InfeasibleError(f"row {row} does not normalise g^{p} z^{q}")
    return p, q


def random_words(G: RAAG, count: int, max_len: int, seed: int = 0, gens=None):
    rng = random.Random(seed)
    codes = [2 * G.gen(v) + s for v in (gens or G.names) for s in (0, 1)]
    return [G.word(rng.choice(codes) for _ in range(rng.randint(0, max_len))) for _ in range(count)]


def parse_qm_spec(G: RAAG, text: str) -> Quasimorphism:
    """Parse ``exp:x``, ``brooks:ac``, ``avg(spec)`` and ``lam:r:phi:psi``."""
    m, pos = _parse_spec(G, text.strip(), 0)
    if pos != len(text.strip()):
        raise ParseError(f"trailing text in quasimorphism spec: {text[pos:]!r}")
    return m


def _read_until(text, pos, stops=":)|"):
    end = pos
    while end < len(text) and text[end] not in stops:
        end += 1
    return text[pos:end], end


def _pattern_word(G: RAAG, body: str) -> Word:
    body = body.strip()
    if "," in body or " " in body:
        return G.parse(body.replace(",", " "))
    if all(ch in G.graph.index for ch in body):
        return G.parse(" ".join(body))
    return G.parse(body)


def _parse_spec(G: RAAG, text: str, pos: int):
    if text.startswith("exp:", pos):
        name, pos = _read_until(text, pos + 4)
        return exponent_hom(G, name.strip()), pos
    if text.startswith("brooks:", pos):
        body, pos = _read_until(text, pos + 7)
        try:
            return brooks_homogenized(G, _pattern_word(G, body)), pos
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if text.startswith("avg(", pos):
        inner, pos = _parse_spec(G, text, pos + 4)
        reps, eps = [G.identity], [1]
        if pos < len(text) and text[pos] == "|":
            body, pos = _read_until(text, pos + 1, ")")
            for item in body.split(","):
                word, _, sign = item.rpartition("=")
                x = G.parse(word)
                if x.is_identity():
                    continue
                reps.append(x)
                eps.append(int(sign))
        if pos >= len(text) or text[pos] != ")":
            raise ParseError("avg( is missing its closing parenthesis")
        return average_m_G(inner, ExtensionData(tuple(reps), tuple(eps))), pos + 1
    if text.startswith("lam:", pos):
        raw, pos = _read_until(text, pos + 4)
        try:
            lam = Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {raw!r}") from None
        if pos >= len(text):
            raise ParseError("lam: needs φ and ψ specs")
        phi, pos = _parse_spec(G, text, pos + 1)
        if pos >= len(text) or text[pos] != ":":
            raise ParseError("lam: needs a ψ spec after φ")
        psi, pos = _parse_spec(G, text, pos + 1)
        return phi_lambda(phi, psi, lam), pos
    raise ParseError(f"unknown quasimorphism spec at {text[pos:]!r}")
