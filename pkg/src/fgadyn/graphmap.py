"""Topological representatives: strata, transition matrices, turns, RTT checks.

Edges of a graph are numbered 0..m-1; an edge path is a tuple of signed
letters where ``+(e+1)`` crosses edge e forwards and ``-(e+1)`` backwards.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import networkx as nx
import numpy as np

from .freegroup import Automorphism, Word, format_letter, invert

__all__ = [
    "Graph", "GraphMap", "Stratum", "Filtration", "Turn", "NonStabilizing", "ReducibleMatrix",
    "rose_map", "tighten_image", "filtration", "pf_eigenvalue", "turn_table",
    "check_rtt", "bcc_upper_bound", "critical_constant", "critical_value", "count_eg_strata",
]


class NonStabilizing(RuntimeError):
    """The bounded cancellation constant could not be certified."""


class ReducibleMatrix(ValueError):
    pass


def _reduce(path) -> tuple:
    out: list[int] = []
    for x in path:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _inv(path) -> tuple:
    return tuple(-x for x in reversed(path))


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    ends: tuple            # ends[e] = (from, to)
    names: tuple = ()      # edge ids for I/O

    @property
    def n_edges(self) -> int:
        return len(self.ends)

    def name(self, e: int) -> str:
        return self.names[e] if self.names else f"e{e}"

    def start(self, x: int) -> int:
        s, t = self.ends[abs(x) - 1]
        return s if x > 0 else t

    def end(self, x: int) -> int:
        s, t = self.ends[abs(x) - 1]
        return t if x > 0 else s

    def directions(self, v: int) -> list[int]:
        out = []
        for e, (s, t) in enumerate(self.ends):
            if s == v:
                out.append(e + 1)
            if t == v:
                out.append(-(e + 1))
        return out

    def valence(self, v: int) -> int:
        return len(self.directions(v))

    def format_path(self, path) -> str:
        return " ".join(("~" if x < 0 else "") + self.name(abs(x) - 1) for x in path)

    def parse_path(self, text: str) -> tuple:
        index = {n: i for i, n in enumerate(self.names)} if self.names else \
            {f"e{i}": i for i in range(self.n_edges)}
        tokens = text.split()
        if len(tokens) == 1 and tokens[0] not in index and tokens[0].lstrip("~") not in index:
            # contiguous single-character ids, e.g. "a~d"
            tokens, i, s = [], 0, tokens[0]
            while i < len(s):
                if s[i] == "~":
                    tokens.append(s[i:i + 2])
                    i += 2
                else:
                    tokens.append(s[i])
                    i += 1
        path = []
        for tok in tokens:
            rev = tok.startswith("~")
            name = tok[1:] if rev else tok
            if name not in index:
                raise ValueError(f"unknown edge id {name!r}")
            path.append(-(index[name] + 1) if rev else index[name] + 1)
        for x, y in zip(path, path[1:]):
            if self.end(x) != self.start(y):
                raise ValueError(f"path {text!r} is not connected")
        return tuple(path)


@dataclass(frozen=True)
class GraphMap:
    graph: Graph
    vertex_map: tuple
    edge_map: tuple
    automorphism: Automorphism | None = field(default=None, compare=False)

    def __post_init__(self):
        g = self.graph
        for e, img in enumerate(self.edge_map):
            if not img:
                raise ValueError(f"edge {g.name(e)} has an empty image")
            if _reduce(img) != tuple(img):
                raise ValueError(f"image of edge {g.name(e)} is not tight")
            s, t = g.ends[e]
            if g.start(img[0]) != self.vertex_map[s] or g.end(img[-1]) != self.vertex_map[t]:
                raise ValueError(f"image of edge {g.name(e)} does not respect endpoints")
            for x, y in zip(img, img[1:]):
                if g.end(x) != g.start(y):
                    raise ValueError(f"image of edge {g.name(e)} is not a path")

    def image(self, x: int) -> tuple:
        img = self.edge_map[abs(x) - 1]
        return tuple(img) if x > 0 else _inv(img)

    def to_dict(self) -> dict:
        g = self.graph
        return {
            "edges": [{"id": g.name(e), "from": s, "to": t} for e, (s, t) in enumerate(g.ends)],
            "map": {g.name(e): g.format_path(p) for e, p in enumerate(self.edge_map)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "GraphMap":
        edges = data["edges"]
        names = tuple(str(e["id"]) for e in edges)
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge ids")
        ends = tuple((int(e["from"]), int(e["to"])) for e in edges)
        nv = 1 + max(max(s, t) for s, t in ends)
        g = Graph(nv, ends, names)
        emap = tuple(g.parse_path(data["map"][n]) for n in names)
        vmap = [None] * nv
        for e, (s, t) in enumerate(ends):
            for v, w in ((s, g.start(emap[e][0])), (t, g.end(emap[e][-1]))):
                if vmap[v] is not None and vmap[v] != w:
                    raise ValueError(f"inconsistent vertex image for vertex {v}")
                vmap[v] = w
        vmap = tuple(v if v is not None else i for i, v in enumerate(vmap))
        return cls(g, vmap, emap)


def rose_map(f: Automorphism) -> GraphMap:
    """One vertex, one edge per generator, edges map to the generator images."""
    n = f.rank
    g = Graph(1, tuple((0, 0) for _ in range(n)), tuple(format_letter(i + 1) for i in range(n)))
    return GraphMap(g, (0,), tuple(tuple(w) for w in f.images), f)


def tighten_image(m: GraphMap, path, cyclic: bool = False) -> tuple:
    """``f_#`` of a tight path (or of a circuit with ``cyclic=True``)."""
    if isinstance(path, str):
        path = m.graph.parse_path(path)
    path = tuple(path)
    for x in path:
        if not 1 <= abs(x) <= m.graph.n_edges:
            raise ValueError(f"letter {x} is not an edge of the graph")
    for x, y in zip(path, path[1:]):
        if m.graph.end(x) != m.graph.start(y):
            raise ValueError("not a path in the graph")
    out = _reduce(itertools.chain.from_iterable(m.image(x) for x in path))
    if cyclic:
        i = 0
        while 2 * i + 1 < len(out) and out[i] == -out[-1 - i]:
            i += 1
        out = out[i: len(out) - i]
    return out


@dataclass
class Stratum:
    edges: list            # edge indices
    matrix: np.ndarray
    kind: str              # EG, NEG or zero
    pf: float | None = None

    def names(self, graph: Graph) -> list[str]:
        return [graph.name(e) for e in self.edges]

    def to_dict(self, graph: Graph) -> dict:
        d = {"edges": self.names(graph), "class": self.kind}
        if self.kind == "EG":
            d["lambda"] = round(self.pf, 6)
        return d


@dataclass
class Filtration:
    strata: list           # bottom first
    graph_map: GraphMap

    def level(self, r: int) -> set:
        """Edges of G_r (strata 0..r)."""
        out = set()
        for s in self.strata[: r + 1]:
            out.update(s.edges)
        return out

    def eg(self) -> list[tuple[int, Stratum]]:
        return [(r, s) for r, s in enumerate(self.strata) if s.kind == "EG"]


def _occurrence(m: GraphMap) -> np.ndarray:
    n = m.graph.n_edges
    M = np.zeros((n, n), dtype=np.int64)
    for j, img in enumerate(m.edge_map):
        for x in img:
            M[abs(x) - 1, j] += 1
    return M


def filtration(m: GraphMap) -> Filtration:
    """Maximal invariant filtration from the SCCs of the edge-occurrence digraph."""
    n = m.graph.n_edges
    M = _occurrence(m)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(n))
    for j in range(n):
        for i in range(n):
            if M[i, j]:
                dg.add_edge(j, i)
    cond = nx.condensation(dg)
    members = {c: sorted(cond.nodes[c]["members"]) for c in cond.nodes}
    order = list(nx.lexicographical_topological_sort(cond.reverse(copy=True),
                                                     key=lambda c: members[c][0]))
    strata = []
    for c in order:
        es = members[c]
        sub = M[np.ix_(es, es)]
        if len(es) == 1 and sub[0, 0] == 0:
            strata.append(Stratum(es, sub, "zero"))
            continue
        lam = pf_eigenvalue(sub)
        strata.append(Stratum(es, sub, "NEG" if lam == 1.0 else "EG", lam))
    return Filtration(strata, m)


def _irreducible(M: np.ndarray) -> bool:
    n = M.shape[0]
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((j, i) for i in range(n) for j in range(n) if M[i, j])
    return nx.is_strongly_connected(g) and (n > 1 or M[0, 0] > 0)


def pf_eigenvalue(M, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Perron-Frobenius eigenvalue of a nonnegative irreducible integer matrix."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or (M < 0).any():
        raise ValueError("expected a square nonnegative matrix")
    if not _irreducible(M):
        raise ReducibleMatrix("matrix is reducible")
    if ((M == 0) | (M == 1)).all() and (M.sum(axis=0) == 1).all() and (M.sum(axis=1) == 1).all():
        return 1.0
    A = M.astype(float)
    B = A + np.eye(len(A))  # aperiodic, same Perron vector
    v = np.ones(len(A))
    for _ in range(max_iter):
        w = B @ v
        mu = w.max()
        v = w / mu
        lam = mu - 1.0
        if np.abs(A @ v - lam * v).max() < tol:
            return float(lam)
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps")


def count_eg_strata(m: GraphMap, filt: Filtration | None = None) -> int:
    filt = filt or filtration(m)
    return len(filt.eg())


@dataclass(frozen=True, order=True)
class Turn:
    d1: int
    d2: int

    @classmethod
    def of(cls, a: int, b: int) -> "Turn":
        key = lambda x: (abs(x), x < 0)
        return cls(*sorted((a, b), key=key))

    @property
    def degenerate(self) -> bool:
        return self.d1 == self.d2

    def describe(self, graph: Graph) -> str:
        return "{" + ", ".join(graph.format_path((x,)) for x in (self.d1, self.d2)) + "}"


def _tf(m: GraphMap) -> dict[int, int]:
    return {x: m.image(x)[0] for e in range(m.graph.n_edges) for x in (e + 1, -(e + 1))}


def turn_table(m: GraphMap) -> dict[Turn, str]:
    """Legality of every turn (degenerate ones included)."""
    tf = _tf(m)
    g = m.graph
    table = {}
    for v in range(g.n_vertices):
        ds = g.directions(v)
        for a, b in itertools.combinations_with_replacement(ds, 2):
            t = Turn.of(a, b)
            if t.degenerate:
                table[t] = "degenerate"
                continue
            seen = set()
            cur = t
            verdict = "legal"
            while cur not in seen:
                seen.add(cur)
                cur = Turn.of(tf[cur.d1], tf[cur.d2])
                if cur.degenerate:
                    verdict = "illegal"
                    break
            table[t] = verdict
    return table


def _path_turns(path) -> list[Turn]:
    return [Turn.of(-x, y) for x, y in zip(path, path[1:])]


def check_rtt(m: GraphMap, filt: Filtration | None = None, path_bound: int = 12,
              path_cap: int = 200_000) -> list[dict]:
    """Per EG stratum, results for conditions (iii), (i) exactly and (ii) up to a bound."""
    filt = filt or filtration(m)
    g = m.graph
    table = turn_table(m)
    tf = _tf(m)
    reports = []
    for r, s in filt.eg():
        hr = set(s.edges)
        rep = {"stratum": r, "edges": s.names(g)}
        # (iii) directions in H_r map to directions in H_r
        bad = [x for e in sorted(hr) for x in (e + 1, -(e + 1)) if abs(tf[x]) - 1 not in hr]
        rep["iii"] = {"status": "fail", "witness": g.format_path((bad[0],))} if bad else {"status": "pass"}
        # (i) images of H_r edges contain no illegal turn inside H_r
        wit = None
        for e in sorted(hr):
            for t in _path_turns(m.edge_map[e]):
                if abs(t.d1) - 1 in hr and abs(t.d2) - 1 in hr and table[t] == "illegal":
                    wit = (g.name(e), t.describe(g))
                    break
            if wit:
                break
        rep["i"] = {"status": "fail", "witness": list(wit)} if wit else {"status": "pass"}
        rep["ii"] = _condition_ii(m, filt, r, path_bound, path_cap)
        reports.append(rep)
    return reports


def _condition_ii(m: GraphMap, filt: Filtration, r: int, bound: int, cap: int) -> dict:
    g = m.graph
    lower = filt.level(r - 1) if r > 0 else set()
    hr = set(filt.strata[r].edges)
    if not lower:
        return {"status": "pass", "note": "no lower filtration element"}
    touch = {v for e in hr for v in g.ends[e]} & {v for e in lower for v in g.ends[e]}
    if not touch:
        return {"status": "pass", "note": "no connecting vertices"}
    letters = [x for e in sorted(lower) for x in (e + 1, -(e + 1))]
    checked = 0
    stack = [(x,) for x in letters if g.start(x) in touch]
    while stack:
        p = stack.pop()
        if g.end(p[-1]) in touch:
            checked += 1
            if not tighten_image(m, p):
                return {"status": "fail", "witness": g.format_path(p)}
            if checked >= cap:
                return {"status": "bounded-pass", "bound": bound, "paths": checked, "capped": True}
        if len(p) < bound:
            for y in letters:
                if y != -p[-1] and g.start(y) == g.end(p[-1]):
                    stack.append(p + (y,))
    return {"status": "bounded-pass", "bound": bound, "paths": checked}


def bcc_upper_bound(m: GraphMap) -> int:
    """Certified bound on cancellation in ``f_#(alpha)·f_#(beta)``.

    For a rose map of an automorphism f with inverse g, every tight
    concatenation cancels at most ``floor(K_f * floor(K_f K_g / 2) + K_f / 2)``
    letters, where K_f, K_g are the longest generator images (the Lipschitz
    constants on the tree).  Maps without a verified inverse are rejected.
    """
    f = m.automorphism
    if f is None or m.graph.n_vertices != 1:
        raise NonStabilizing("a certified bound needs a rose map of an automorphism")
    try:
        g = invert(f)
    except ValueError as exc:
        raise NonStabilizing(str(exc)) from exc
    kf = max(len(w) for w in f.images)
    kg = max(len(w) for w in g.images)
    if kf == 1 and kg == 1:
        return 0
    return (2 * kf * (kf * kg // 2) + kf) // 2


def critical_value(bcc, lam):
    """``2 bcc / (lam - 1)``; exact Fraction when both inputs are rational."""
    if isinstance(lam, Rational) and isinstance(bcc, Rational):
        lam = Fraction(lam)
        if lam <= 1:
            raise ValueError(f"critical constant undefined: lambda = {lam} <= 1")
        return Fraction(2 * bcc) / (lam - 1)
    if lam <= 1:
        raise ValueError(f"critical constant undefined: lambda = {lam} <= 1")
    return 2 * float(bcc) / (float(lam) - 1)


def critical_constant(m: GraphMap | None, s: Stratum, bcc=None):
    """Critical constant of an EG stratum; non-EG strata raise ValueError."""
    if s.kind != "EG":
        raise ValueError(f"critical constant needs an EG stratum; this one is {s.kind} (λ = 1)")
    if bcc is None:
        bcc = bcc_upper_bound(m)
    return critical_value(bcc, s.pf)


def automorphism_of(m: GraphMap) -> Automorphism:
    if m.automorphism is not None:
        return m.automorphism
    if m.graph.n_vertices != 1:
        raise ValueError("not a rose map")
    return Automorphism(tuple(Word(p) for p in m.edge_map))
