"""Stallings graphs of finitely generated subgroups.

Every edge of a folded graph carries an expression: a word in the input
generators ``y1, y2, ...`` (encoded as letters ``±(j+1)``).  Reading a
closed loop at the basepoint and multiplying the expressions of the edges
crossed gives that loop's label as a product of the generators.  Folding
keeps this true by a gauge change at the vertex that disappears.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .freegroup import (
    EMPTY, Automorphism, Word, apply, format_letter, invert, letter_key, parse_letter,
    substitute,
)

__all__ = [
    "CoreGraph", "SubgroupSystem", "fold", "contains", "pullback", "meet",
    "is_malnormal", "Malnormality", "fiber_subgroup", "FiberResult",
    "index_and_rank", "subgroup",
]


def _letters(rank: int) -> list[int]:
    return sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)],
                  key=letter_key)


def _renumber(n: int, edges: Sequence[tuple[int, int, int]], start: int, rank: int):
    """BFS order from ``start`` following letters in key order.

    Returns the old->new map (only for vertices reachable from ``start``).
    """
    out: dict[int, dict[int, int]] = {}
    for s, d, g in edges:
        out.setdefault(s, {})[g] = d
        out.setdefault(d, {})[-g] = s
    order = {start: 0}
    queue = deque([start])
    letters = _letters(rank)
    while queue:
        v = queue.popleft()
        nbrs = out.get(v, {})
        for x in letters:
            t = nbrs.get(x)
            if t is not None and t not in order:
                order[t] = len(order)
                queue.append(t)
    return order


@dataclass(frozen=True, eq=False)
class CoreGraph:
    """Folded labeled graph; ``edges`` are ``(src, dst, gen)`` with gen > 0.

    ``generators`` are the words the graph was folded from and
    ``edge_exprs[i]`` the expression carried by edge i in terms of them.
    A graph without a basepoint stands for a conjugacy class.
    """

    n_vertices: int
    edges: tuple
    base: int | None
    rank: int
    generators: tuple = ()
    edge_exprs: tuple = ()
    _out: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out: list[dict[int, tuple[int, int]]] = [dict() for _ in range(self.n_vertices)]
        for eid, (s, d, g) in enumerate(self.edges):
            if g in out[s] or -g in out[d]:
                raise ValueError("graph is not folded")
            out[s][g] = (d, eid)
            out[d][-g] = (s, eid)
        object.__setattr__(self, "_out", out)

    # structure
    @property
    def subgroup_rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def degree(self, v: int) -> int:
        return len(self._out[v])

    def step(self, v: int, x: int) -> int | None:
        hit = self._out[v].get(x)
        return None if hit is None else hit[0]

    def is_trivial(self) -> bool:
        return not self.edges

    def code(self) -> tuple:
        """Canonical code of the basepointed graph (graphs are stored BFS-ordered)."""
        if self.base is None:
            return self.unbased_code()
        return (self.n_vertices, tuple(sorted(self.edges)))

    def core(self) -> "CoreGraph":
        """Strip the basepoint and every hair; the result has no basepoint."""
        deg = [self.degree(v) for v in range(self.n_vertices)]
        alive = [True] * self.n_vertices
        dead_edges = set()
        stack = [v for v in range(self.n_vertices) if deg[v] <= 1]
        while stack:
            v = stack.pop()
            if not alive[v] or deg[v] > 1:
                continue
            alive[v] = False
            for x, (t, eid) in self._out[v].items():
                if eid in dead_edges:
                    continue
                dead_edges.add(eid)
                deg[t] -= 1
                if alive[t] and deg[t] <= 1:
                    stack.append(t)
        keep = [v for v in range(self.n_vertices) if alive[v]]
        if not keep:
            return CoreGraph(1, (), None, self.rank)
        edges = [e for i, e in enumerate(self.edges) if i not in dead_edges]
        best = None
        for start in keep:
            order = _renumber(self.n_vertices, edges, start, self.rank)
            cand = tuple(sorted((order[s], order[d], g) for s, d, g in edges))
            if best is None or cand < best:
                best = cand
        return CoreGraph(len(keep), best, None, self.rank)

    def unbased_code(self) -> tuple:
        c = self.core()
        return (c.n_vertices, c.edges)

    def basis(self) -> list[Word]:
        """Free basis of the subgroup read off a BFS spanning tree at the basepoint."""
        if self.base is None:
            raise ValueError("basis needs a basepoint")
        path = {self.base: EMPTY}
        tree = set()
        queue = deque([self.base])
        letters = _letters(self.rank)
        while queue:
            v = queue.popleft()
            for x in letters:
                hit = self._out[v].get(x)
                if hit and hit[0] not in path:
                    path[hit[0]] = path[v] * Word._trusted((x,))
                    tree.add(hit[1])
                    queue.append(hit[0])
        out = []
        for eid, (s, d, g) in enumerate(self.edges):
            if eid not in tree:
                out.append(path[s] * Word._trusted((g,)) * ~path[d])
        return out

    def with_basis(self) -> "CoreGraph":
        """Same graph whose generators are its spanning-tree basis."""
        return fold(self.basis(), rank=self.rank)

    # serialization
    def to_dict(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "base": self.base,
            "edges": [[s, d, format_letter(g)] for s, d, g in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, rank: int | None = None) -> "CoreGraph":
        raw = [(int(s), int(d), parse_letter(lab)) for s, d, lab in data["edges"]]
        for s, d, g in raw:
            if g < 0:
                raise ValueError("edge labels must be lowercase generators")
        rank = rank or max((g for _, _, g in raw), default=1)
        n = int(data["vertices"])
        base = data.get("base")
        g = CoreGraph(n, tuple(raw), base if base is None else int(base), rank)
        if base is None:
            return g.core()
        return g.with_basis()

    def __str__(self) -> str:
        gens = ", ".join(str(w) for w in self.basis()) if self.base is not None else "?"
        return f"<{gens}>"


def fold(generators: Iterable, rank: int | None = None) -> CoreGraph:
    """Fold the wedge of loops labeled by ``generators`` into a Stallings graph.

    Folds are taken from a FIFO queue of vertices; at each vertex the first
    duplicated letter (in key order) is folded first.
    """
    gens = [w if isinstance(w, Word) else Word.parse(w) if isinstance(w, str) else Word(w)
            for w in generators]
    if rank is None:
        rank = max((w.max_index() for w in gens), default=1) or 1
    for w in gens:
        if w.max_index() > rank:
            raise ValueError(f"generator {w} does not live in rank {rank}")

    edges: list = []  # [src, dst, gen, sigma] or None
    adj: list[dict[int, list[int]]] = [dict()]
    alive = [True]

    def new_vertex() -> int:
        adj.append({})
        alive.append(True)
        return len(adj) - 1

    def add_edge(s: int, d: int, g: int, sigma: Word) -> int:
        edges.append([s, d, g, sigma])
        eid = len(edges) - 1
        adj[s].setdefault(g, []).append(eid)
        adj[d].setdefault(-g, []).append(eid)
        return eid

    def drop_edge(eid: int):
        s, d, g, _ = edges[eid]
        adj[s][g].remove(eid)
        if not adj[s][g]:
            del adj[s][g]
        adj[d][-g].remove(eid)
        if not adj[d][-g]:
            del adj[d][-g]
        edges[eid] = None

    for j, w in enumerate(gens):
        if not w:
            continue
        y = Word._trusted((j + 1,))
        cur = 0
        for k, x in enumerate(w):
            nxt = 0 if k == len(w) - 1 else new_vertex()
            sigma = y if k == 0 else EMPTY
            if x > 0:
                add_edge(cur, nxt, x, sigma)
            else:
                add_edge(nxt, cur, -x, ~sigma)
            cur = nxt

    def direction(eid: int, x: int):
        s, d, g, sigma = edges[eid]
        return (d, sigma) if x > 0 else (s, ~sigma)

    queue = deque(range(len(adj)))
    queued = set(queue)
    while queue:
        u = queue.popleft()
        queued.discard(u)
        if not alive[u]:
            continue
        dup = None
        for x in sorted(adj[u], key=letter_key):
            if len(adj[u][x]) >= 2:
                dup = x
                break
        if dup is None:
            continue
        e1, e2 = adj[u][dup][0], adj[u][dup][1]
        t1, s1 = direction(e1, dup)
        t2, s2 = direction(e2, dup)
        if t1 == t2:
            drop_edge(e2)
            keep = u
        else:
            if t2 == 0 or (t1 != 0 and t2 < t1):
                (e1, t1, s1), (e2, t2, s2) = (e2, t2, s2), (e1, t1, s1)
            keep, r = t1, t2
            c = ~s2 * s1
            if c:
                ci = ~c
                touched = set()
                for lst in adj[r].values():
                    touched.update(lst)
                for eid in touched:
                    e = edges[eid]
                    if e[0] == r:
                        e[3] = ci * e[3]
                    if e[1] == r:
                        e[3] = e[3] * c
            drop_edge(e2)
            for x, lst in list(adj[r].items()):
                for eid in lst:
                    e = edges[eid]
                    if e[0] == r:
                        e[0] = keep
                    if e[1] == r:
                        e[1] = keep
                    adj[keep].setdefault(x, []).append(eid)
            adj[r] = {}
            alive[r] = False
        for v in (u, keep):
            if alive[v] and v not in queued:
                queue.append(v)
                queued.add(v)

    # prune hairs away from the basepoint
    deg = [sum(len(l) for l in a.values()) for a in adj]
    stack = [v for v in range(len(adj)) if alive[v] and v != 0 and deg[v] <= 1]
    while stack:
        v = stack.pop()
        if not alive[v] or deg[v] > 1:
            continue
        alive[v] = False
        for lst in list(adj[v].values()):
            for eid in list(lst):
                if edges[eid] is None:
                    continue
                s, d, _, _ = edges[eid]
                t = d if s == v else s
                drop_edge(eid)
                deg[v] -= 1
                deg[t] -= 1
                if t != 0 and alive[t] and deg[t] <= 1:
                    stack.append(t)

    live = [(e[0], e[1], e[2], e[3]) for e in edges if e is not None]
    order = _renumber(len(adj), [(s, d, g) for s, d, g, _ in live], 0, rank)
    ren = sorted(((order[s], order[d], g), sigma) for s, d, g, sigma in live)
    return CoreGraph(
        len(order), tuple(e for e, _ in ren), 0, rank,
        tuple(gens), tuple(sig for _, sig in ren),
    )


def subgroup(words: Iterable, rank: int | None = None) -> CoreGraph:
    return fold(words, rank=rank)


def contains(g: CoreGraph, w) -> Word | None:
    """Expression of ``w`` in the generators of ``g`` if ``w`` lies in it, else None."""
    if g.base is None:
        raise ValueError("membership needs a basepointed graph")
    if isinstance(w, str):
        w = Word.parse(w)
    v = g.base
    out: list[int] = []
    for x in w:
        hit = g._out[v].get(x)
        if hit is None:
            return None
        v, eid = hit
        sigma = g.edge_exprs[eid] if g.edge_exprs else None
        if sigma is not None:
            piece = sigma if x > 0 else ~sigma
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
    if v != g.base:
        return None
    return Word._trusted(out)


def evaluate_expression(g: CoreGraph, expr: Word) -> Word:
    return substitute(list(g.generators), expr)


def index_and_rank(g: CoreGraph) -> tuple[int, int | None]:
    """``(rank, index)``; index is None unless the graph is a full cover."""
    full = all(g.degree(v) == 2 * g.rank for v in range(g.n_vertices))
    return g.subgroup_rank, (g.n_vertices if full else None)


def _geodesics(g: CoreGraph) -> dict[int, Word]:
    path = {g.base: EMPTY}
    queue = deque([g.base])
    letters = _letters(g.rank)
    while queue:
        v = queue.popleft()
        for x in letters:
            t = g.step(v, x)
            if t is not None and t not in path:
                path[t] = path[v] * Word._trusted((x,))
                queue.append(t)
    return path


def pullback(g1: CoreGraph, g2: CoreGraph) -> list[tuple[CoreGraph, Word]]:
    """Nontrivial intersections ``A ∩ w^-1 B w`` from the fiber product.

    Each component is reported once with the shortlex-least conjugator
    ``w = v_q u_p^-1`` over its vertices (u, v: BFS geodesics from the
    basepoints), and the returned graph is folded from loops conjugated back
    to the basepoint of ``g1`` so it is literally ``A ∩ B^w`` inside A.
    """
    if g1.base is None or g2.base is None:
        raise ValueError("pullback needs basepointed graphs")
    rank = max(g1.rank, g2.rank)
    by_gen: dict[int, list] = {}
    for s, d, g in g2.edges:
        by_gen.setdefault(g, []).append((s, d))
    n2 = g2.n_vertices
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pedges = []
    for s1, d1, g in g1.edges:
        for s2, d2 in by_gen.get(g, ()):
            a, b = s1 * n2 + s2, d1 * n2 + d2
            pedges.append((a, b, g))
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, list] = {}
    cverts: dict[int, set] = {}
    for e in pedges:
        r = find(e[0])
        comps.setdefault(r, []).append(e)
        cverts.setdefault(r, set()).update((e[0], e[1]))
    u = _geodesics(g1)
    v = _geodesics(g2)
    results = []
    for r, es in comps.items():
        verts = cverts[r]
        if len(es) - len(verts) + 1 <= 0:
            continue
        best = None
        for pq in verts:
            p, q = divmod(pq, n2)
            if p not in u or q not in v:
                continue
            w = v[q] * ~u[p]
            key = w.shortlex()
            if best is None or key < best[0]:
                best = (key, pq, w)
        _, start, w = best
        loops = _component_loops(es, start, rank)
        up = u[start // n2]
        graph = fold([up * l * ~up for l in loops], rank=rank)
        results.append((graph, w))
    results.sort(key=lambda gw: (gw[1].shortlex(), gw[0].code()))
    return results


def _component_loops(es, start: int, rank: int) -> list[Word]:
    out: dict[int, dict[int, tuple[int, int]]] = {}
    for eid, (a, b, g) in enumerate(es):
        out.setdefault(a, {})[g] = (b, eid)
        out.setdefault(b, {})[-g] = (a, eid)
    path = {start: EMPTY}
    tree = set()
    queue = deque([start])
    letters = _letters(rank)
    while queue:
        x = queue.popleft()
        for lt in letters:
            hit = out.get(x, {}).get(lt)
            if hit and hit[0] not in path:
                path[hit[0]] = path[x] * Word._trusted((lt,))
                tree.add(hit[1])
                queue.append(hit[0])
    return [path[a] * Word._trusted((g,)) * ~path[b]
            for eid, (a, b, g) in enumerate(es) if eid not in tree]


class SubgroupSystem:
    """Finite set of conjugacy classes of nontrivial f.g. subgroups.

    Components are kept as basepointed graphs (so they carry a generating
    set) and deduplicated up to conjugacy.  With ``dedup=False`` the given
    order and any conjugate repeats are kept, which is what malnormality
    tests over an explicit list need.  ``malnormal`` and
    ``free_factor_system`` are True, False or None (unknown).
    """

    def __init__(self, components: Iterable[CoreGraph] = (), rank: int | None = None,
                 malnormal: bool | None = None, free_factor_system: bool | None = None,
                 dedup: bool = True):
        seen = {}
        raw = []
        for g in components:
            if g.is_trivial():
                raise ValueError("subgroup system components must be nontrivial")
            if g.base is None:
                raise ValueError("components need a basepoint (generating set)")
            seen.setdefault(g.unbased_code(), g)
            raw.append(g)
        self.components: list[CoreGraph] = [seen[k] for k in sorted(seen)] if dedup else raw
        self.rank = rank if rank is not None else max((g.rank for g in self.components), default=0)
        self.malnormal = malnormal
        self.free_factor_system = free_factor_system

    @classmethod
    def from_words(cls, groups: Iterable[Iterable], rank: int | None = None, **flags):
        return cls([fold(ws, rank=rank) for ws in groups], rank=rank, **flags)

    def codes(self) -> list:
        return sorted(g.unbased_code() for g in self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return isinstance(other, SubgroupSystem) and self.codes() == other.codes()

    def __hash__(self):
        return hash(tuple(self.codes()))

    def generator_lists(self) -> list[list[str]]:
        return [[str(w) for w in g.basis()] for g in self.components]

    def carries(self, w) -> bool:
        """Whether the conjugacy class of ``w`` lies in some component."""
        if isinstance(w, str):
            w = Word.parse(w)
        return any(carries(g, w) for g in self.components)

    def __repr__(self) -> str:
        parts = ", ".join("[" + str(g) + "]" for g in self.components)
        return "{" + parts + "}"


def carries(g: CoreGraph, w) -> bool:
    """True if some conjugate of ``w`` lies in the subgroup of ``g``.

    A cyclically reduced word is carried iff it is read by a closed path in
    the core through some vertex.
    """
    from .freegroup import cyclic_reduce

    c = tuple(cyclic_reduce(w)[0].letters)
    if not c:
        return True
    core = g.core() if g.base is not None else g
    for v in range(core.n_vertices):
        x = v
        for y in c:
            x = core.step(x, y)
            if x is None:
                break
        if x == v:
            return True
    return False


def meet(s1: SubgroupSystem, s2: SubgroupSystem) -> SubgroupSystem:
    comps = []
    for a in s1.components:
        for b in s2.components:
            comps.extend(g for g, _ in pullback(a, b))
    return SubgroupSystem(comps, rank=max(s1.rank, s2.rank))


class Malnormality(NamedTuple):
    malnormal: bool
    witness: tuple | None  # (s, t, x), 1-based component indices

    def __bool__(self) -> bool:
        return self.malnormal


def is_malnormal(s: SubgroupSystem) -> Malnormality:
    """Check malnormality; a witness ``(s, t, x)`` has ``x^-1 K_s x ∩ K_t`` nontrivial.

    Component indices are 1-based in the order of ``s.components``.
    """
    comps = s.components
    for i, a in enumerate(comps):
        for j in range(i, len(comps)):
            b = comps[j]
            for graph, w in pullback(a, b):
                if i == j:
                    if not w:
                        continue  # the identity double coset
                    if contains(a, w) is not None:
                        continue
                    x = min(w, ~w, key=Word.shortlex)
                else:
                    x = ~w
                return Malnormality(False, (i + 1, j + 1, x))
    return Malnormality(True, None)


@dataclass
class FiberResult:
    graph: CoreGraph
    stabilized_at: int | None
    history: list = field(default_factory=list)  # (K, rank, vertices) per step

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    def contains_generators(self) -> dict[str, bool]:
        return {format_letter(i + 1): contains(self.graph, Word._trusted((i + 1,))) is not None
                for i in range(self.graph.rank)}


def fiber_subgroup(f: Automorphism, seeds: Sequence, K_max: int = 10) -> FiberResult:
    """Grow ``S_K = <f^k(s) : |k| <= K>`` until ``S_{K+1} == S_K`` or K_max."""
    if not seeds:
        raise ValueError("fiber_subgroup needs at least one seed")
    finv = invert(f)
    seeds = [Word.parse(s) if isinstance(s, str) else Word(s) for s in seeds]
    fwd = list(seeds)
    bwd = list(seeds)
    words = list(seeds)
    graph = fold(words, rank=f.rank)
    history = [(0, graph.subgroup_rank, graph.n_vertices)]
    for K in range(K_max):
        fwd = [apply(f, w) for w in fwd]
        bwd = [apply(finv, w) for w in bwd]
        # refold from the current basis to keep inputs small
        nxt = fold(graph.basis() + fwd + bwd, rank=f.rank)
        history.append((K + 1, nxt.subgroup_rank, nxt.n_vertices))
        if nxt.code() == graph.code():
            return FiberResult(graph.with_basis(), K, history)
        graph = nxt
    return FiberResult(graph.with_basis(), None, history)
