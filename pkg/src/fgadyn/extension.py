"""Elements of F ⋊ Q, commuting-pair certificates and (coned) Cayley balls.

The quotient side is modeled by reduced words in the lift symbols
``t1, t2, ...`` and ``Phi_q`` is the homomorphic extension
``Phi_{s1 s2 ... sk} = Phi_{s1} ∘ Phi_{s2} ∘ ... ∘ Phi_{sk}``, so that
``(w1, q1)(w2, q2) = (w1 Phi_{q1}(w2), q1 q2)`` is associative.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ._kernel import CapExceeded, PowerTable
from .freegroup import (
    EMPTY, Automorphism, CyclicWord, Word, apply, compose, conjugator, identity, invert,
    letter_key, power,
)
from .growth import canonical_classes, periodic_classes
from .stallings import CoreGraph, fold

__all__ = [
    "LiftAssignment", "ExtensionElement", "ext_mul", "ext_inverse", "ZZCertificate",
    "zz_search", "flare_probe", "Peripheral", "ConedBall", "cayley_ball",
    "hyperbolicity_stats", "q_words",
]

DEFAULT_RADIUS_CAP = 8
DEFAULT_VERTEX_CAP = 2_000_000


class LiftAssignment:
    """Named lifts ``t1..tk`` (all verified automorphisms of one rank)."""

    def __init__(self, lifts: Sequence[Automorphism], names: Sequence[str] | None = None):
        if not lifts:
            raise ValueError("at least one lift is required")
        ranks = {f.rank for f in lifts}
        if len(ranks) != 1:
            raise ValueError("lifts must have a common rank")
        self.rank = ranks.pop()
        self.lifts = [f if f.verified else invert(f).inverse for f in lifts]
        self.names = list(names) if names else [f"t{i + 1}" for i in range(len(lifts))]
        self._cache: dict[Word, Automorphism] = {EMPTY: identity(self.rank)}

    def __len__(self) -> int:
        return len(self.lifts)

    def symbol(self, x: int) -> Automorphism:
        f = self.lifts[abs(x) - 1]
        return f if x > 0 else f.inverse

    def phi(self, q: Word) -> Automorphism:
        got = self._cache.get(q)
        if got is None:
            got = compose(self.phi(q[:-1]), self.symbol(q[-1]))
            self._cache[q] = got
        return got

    def format_q(self, q: Word) -> str:
        if not q:
            return "1"
        return " ".join(self.names[abs(x) - 1] + ("^-1" if x < 0 else "") for x in q)

    def parse_q(self, text: str) -> Word:
        text = text.strip()
        if text in ("", "1"):
            return EMPTY
        out = []
        for tok in text.split():
            inv = tok.endswith("^-1")
            name = tok[:-3] if inv else tok
            if name not in self.names:
                raise ValueError(f"unknown lift symbol {name!r}")
            i = self.names.index(name) + 1
            out.append(-i if inv else i)
        return Word(out)


class ExtensionElement(NamedTuple):
    w: Word
    q: Word

    def describe(self, lifts: LiftAssignment | None = None) -> str:
        q = lifts.format_q(self.q) if lifts else str(self.q)
        return f"({self.w}, {q})"


def ext_mul(x: ExtensionElement, y: ExtensionElement, lifts: LiftAssignment) -> ExtensionElement:
    return ExtensionElement(x.w * apply(lifts.phi(x.q), y.w), x.q * y.q)


def ext_inverse(x: ExtensionElement, lifts: LiftAssignment) -> ExtensionElement:
    qi = ~x.q
    return ExtensionElement(apply(lifts.phi(qi), ~x.w), qi)


def q_words(k: int, length: int) -> list[Word]:
    """Nontrivial reduced words in k symbols, shortlex (t1 < t1^-1 < t2 ...)."""
    letters = sorted([i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)], key=letter_key)
    out, frontier = [], [()]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for x in letters:
                if not w or w[-1] != -x:
                    nxt.append(w + (x,))
        out.extend(Word._trusted(w) for w in nxt)
        frontier = nxt
    return out


@dataclass
class ZZCertificate:
    """``(w, 1)`` and ``(u^-1, q^p)`` commute; ``Phi_q^p(w) = u w u^-1``."""

    cls: CyclicWord
    q: Word
    period: int
    u: Word
    verified: bool

    def pair(self) -> tuple[ExtensionElement, ExtensionElement]:
        return (ExtensionElement(self.cls.letters, EMPTY),
                ExtensionElement(~self.u, self.q ** self.period))

    def to_dict(self, lifts: LiftAssignment) -> dict:
        a, b = self.pair()
        return {"fiber_word": str(self.cls), "q": lifts.format_q(self.q), "period": self.period,
                "correction": str(self.u), "commuting_pair": [a.describe(lifts), b.describe(lifts)],
                "verified": self.verified}


def zz_search(lifts: LiftAssignment, q_len: int, L: int, P: int) -> list[ZZCertificate]:
    """Periodic classes of every ``Phi_q`` (|q| <= q_len), each turned into a verified pair."""
    if q_len < 1 or L < 1 or P < 1:
        raise ValueError("bounds must be positive")
    certs = []
    for q in q_words(len(lifts), q_len):
        f = lifts.phi(q)
        for c, p in periodic_classes(f, L, P):
            w = c.letters
            img = apply(power(f, p), w)
            u = conjugator(w, img)
            if u is None:  # pragma: no cover - periodic_classes guarantees a return
                continue
            a = ExtensionElement(w, EMPTY)
            b = ExtensionElement(~u, q ** p)
            ok = ext_mul(a, b, lifts) == ext_mul(b, a, lifts)
            if ok:
                certs.append(ZZCertificate(c, q, p, u, True))
    return certs


def flare_probe(lifts: LiftAssignment, lam: float, m: int, L: int) -> dict:
    """Fraction of (class, lift) pairs with ``max |Phi^(+-m)(w)| >= lam |w|``."""
    if lam <= 1 or m < 1:
        raise ValueError("need lambda > 1 and m >= 1")
    classes = canonical_classes(lifts.rank, L)
    keys = [tuple(letter_key(x) for x in w) for w in classes]
    total = passed = 0
    worst = None
    for i, f in enumerate(lifts.lifts):
        fwd = PowerTable(f, m).cyclic_lengths(keys, m)[:, m]
        bwd = PowerTable(f.inverse, m).cyclic_lengths(keys, m)[:, m]
        for w, a, b in zip(classes, fwd, bwd):
            growth = max(int(a), int(b)) / len(w)
            ok = growth >= lam
            total += 1
            passed += ok
            if worst is None or growth < worst[2]:
                worst = (str(w), lifts.names[i], growth)
    return {"pass_fraction": passed / total if total else 1.0, "pairs": total,
            "worst": {"word": worst[0], "lift": worst[1], "growth": round(worst[2], 6)} if worst else None,
            "bounds": f"lambda={lam}, m={m}, L={L}"}


# balls


@dataclass
class Peripheral:
    """Fiber subgroup K with generators of its stabilizing q-subgroup (``Phi_s(K) = K``)."""

    subgroup: CoreGraph
    stabilizer: list = field(default_factory=list)

    @classmethod
    def from_words(cls, words, stabilizer=(), rank: int | None = None, lifts=None):
        stab = [lifts.parse_q(s) if isinstance(s, str) and lifts else s for s in stabilizer]
        return cls(fold(words, rank=rank), list(stab))


def _coset_key(graph: CoreGraph, v: Word) -> tuple:
    """Canonical key of the right coset H v (H the subgroup of ``graph``)."""
    p = graph.base
    i = 0
    while i < len(v):
        t = graph.step(p, v[i])
        if t is None:
            break
        p = t
        i += 1
    return (p, tuple(v[i:]))


@dataclass
class ConedBall:
    radius: int
    vertices: list                # ExtensionElement per ball vertex
    word_dist: np.ndarray        # doubled distance from the origin
    edges: list                  # (u, v, doubled length), cone vertices numbered after ball vertices
    n_cones: int
    achieved_radius: int
    cone_members: list = field(default_factory=list)

    @property
    def n_total(self) -> int:
        return len(self.vertices) + self.n_cones

    def matrix(self, cayley_only: bool = False) -> csr_matrix:
        n = self.n_total
        us, vs, ws = [], [], []
        for a, b, w in self.edges:
            if cayley_only and w != 2:
                continue
            us += [a, b]
            vs += [b, a]
            ws += [w, w]
        return csr_matrix((ws, (us, vs)), shape=(n, n))

    def distances(self, sources, cayley_only: bool = False) -> np.ndarray:
        return dijkstra(self.matrix(cayley_only), indices=list(sources))

    def to_tsv(self) -> str:
        lines = ["# src\tdst\tlength_doubled"]
        lines += [f"{a}\t{b}\t{w}" for a, b, w in self.edges]
        return "\n".join(lines) + "\n"


def cayley_ball(lifts: LiftAssignment | None, R: int, peripherals: Sequence[Peripheral] = (),
                rank: int | None = None, radius_cap: int = DEFAULT_RADIUS_CAP,
                vertex_cap: int = DEFAULT_VERTEX_CAP) -> ConedBall:
    """BFS ball of radius R in F ⋊ Q, optionally with peripheral cosets coned off.

    ``lifts`` may be None for the free group alone (then ``rank`` is needed).
    Cayley edges have doubled length 2 and cone edges doubled length 1.
    """
    if R > radius_cap:
        raise CapExceeded(f"radius {R} exceeds the cap {radius_cap}")
    if lifts is None:
        if rank is None:
            raise ValueError("rank is required without lifts")
        n_sym = 0
        phi = lambda q: None  # noqa: E731
    else:
        rank = lifts.rank
        n_sym = len(lifts)
        phi = lifts.phi
    gens = []
    for i in range(1, rank + 1):
        for x in (i, -i):
            gens.append(("f", x))
    for j in range(1, n_sym + 1):
        for x in (j, -j):
            gens.append(("t", x))

    origin = ExtensionElement(EMPTY, EMPTY)
    index = {origin: 0}
    verts = [origin]
    dist = [0]
    edges = []
    queue = deque([0])
    achieved = 0
    while queue:
        a = queue.popleft()
        if dist[a] >= R:
            continue
        g = verts[a]
        f = phi(g.q) if n_sym else None
        for kind, x in gens:
            if kind == "f":
                step = Word._trusted((x,))
                h = ExtensionElement(g.w * (apply(f, step) if f is not None else step), g.q)
            else:
                h = ExtensionElement(g.w, g.q * Word._trusted((x,)))
            b = index.get(h)
            if b is None:
                if len(verts) >= vertex_cap:
                    raise CapExceeded(f"vertex cap {vertex_cap} reached at radius {achieved}")
                b = len(verts)
                index[h] = b
                verts.append(h)
                dist.append(dist[a] + 1)
                achieved = max(achieved, dist[a] + 1)
                queue.append(b)
            if a < b:
                edges.append((a, b, 2))
    # edges between boundary vertices were skipped by the radius test; add them
    seen = {(a, b) for a, b, _ in edges}
    for a, g in enumerate(verts):
        if dist[a] != R:
            continue
        f = phi(g.q) if n_sym else None
        for kind, x in gens:
            if kind == "f":
                step = Word._trusted((x,))
                h = ExtensionElement(g.w * (apply(f, step) if f is not None else step), g.q)
            else:
                h = ExtensionElement(g.w, g.q * Word._trusted((x,)))
            b = index.get(h)
            if b is not None and (min(a, b), max(a, b)) not in seen:
                seen.add((min(a, b), max(a, b)))
                edges.append((min(a, b), max(a, b), 2))

    n_cones = 0
    members = []
    for per in peripherals:
        _check_invariant(per, lifts)
        groups: dict[tuple, list[int]] = {}
        qgraph = fold(per.stabilizer, rank=max(n_sym, 1)) if n_sym else None
        kgraphs: dict = {}
        for a, g in enumerate(verts):
            # coset g (K ⋊ S): q-part in the left coset q S, fiber part in w Phi_q(K)
            qkey = _coset_key(qgraph, ~g.q) if qgraph is not None else ()
            kg = kgraphs.get(qkey)
            if kg is None:
                f = phi(g.q) if n_sym else None
                gens_k = per.subgroup.basis()
                kg = fold([apply(f, w) for w in gens_k] if f is not None else gens_k, rank=rank)
                kgraphs[qkey] = kg
            groups.setdefault((qkey, _coset_key(kg, ~g.w)), []).append(a)
        for key in sorted(groups, key=lambda k: groups[k][0]):
            mem = groups[key]
            if len(mem) < 2:
                continue
            c = len(verts) + n_cones
            n_cones += 1
            members.append(mem)
            edges.extend((a, c, 1) for a in mem)
    return ConedBall(R, verts, np.array(dist, dtype=np.int64) * 2, edges, n_cones, achieved, members)


def _check_invariant(per: Peripheral, lifts: LiftAssignment | None):
    if lifts is None or not per.stabilizer:
        return
    code = per.subgroup.code()
    for s in per.stabilizer:
        f = lifts.phi(s)
        img = fold([apply(f, w) for w in per.subgroup.basis()], rank=lifts.rank)
        if img.code() != code:
            raise ValueError(f"stabilizer {lifts.format_q(s)} does not preserve the peripheral subgroup")


def _path(pred_row: np.ndarray, src: int, dst: int) -> list[int]:
    out = [dst]
    while out[-1] != src:
        p = int(pred_row[out[-1]])
        if p < 0:
            raise ValueError("disconnected ball")
        out.append(p)
    return out[::-1]


def hyperbolicity_stats(ball: ConedBall, samples: int = 2000, seed: int = 0) -> dict:
    """Slim-triangle estimate of delta on triangles with vertices in the inner half-ball.

    All triples are used when there are at most ``samples`` of them; otherwise
    ``samples`` triples are drawn with ``random.Random(seed)``.  Distances and
    delta are in true units (doubled lengths halved).
    """
    inner = [i for i in range(len(ball.vertices)) if ball.word_dist[i] <= 2 * (ball.radius // 2)]
    mat = ball.matrix()
    n_in = len(inner)
    if comb(n_in, 3) <= samples:
        triples = list(itertools.combinations(inner, 3))
    else:
        rng = random.Random(seed)
        triples = [tuple(rng.sample(inner, 3)) for _ in range(samples)]
    srcs = sorted({x for t in triples for x in t})
    dist, pred = dijkstra(mat, indices=srcs, return_predecessors=True)
    row = {s: i for i, s in enumerate(srcs)}
    cache: dict[int, np.ndarray] = {}

    def drow(v: int) -> np.ndarray:
        if v in row:
            return dist[row[v]]
        got = cache.get(v)
        if got is None:
            got = dijkstra(mat, indices=v)
            cache[v] = got
        return got

    hist: Counter = Counter()
    delta2 = 0
    for x, y, z in triples:
        sides = [_path(pred[row[x]], x, y), _path(pred[row[y]], y, z), _path(pred[row[z]], z, x)]
        worst = 0
        for k in range(3):
            others = sides[(k + 1) % 3] + sides[(k + 2) % 3]
            for p in sides[k]:
                d = drow(p)[others].min()
                worst = max(worst, int(d))
        hist[worst / 2] += 1
        delta2 = max(delta2, worst)
    return {"delta_estimate": delta2 / 2, "triangles": len(triples),
            "triangle_histogram": {str(k): v for k, v in sorted(hist.items())},
            "inner_vertices": n_in, "seed": seed, "samples": samples}


def electrified_vs_word(ball: ConedBall, sources) -> tuple[np.ndarray, np.ndarray]:
    """Doubled electrified and word distances from the given ball vertices."""
    return ball.distances(sources), ball.distances(sources, cayley_only=True)
