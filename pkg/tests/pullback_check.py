"""Brute-force double-coset comparison for pullbacks.

For subgroups A, B and every conjugator w with |w| <= 3, the intersection
A ∩ w^-1 B w is probed by brute force over words x with |x| <= 6.  The
pullback must agree:

* if some x != 1 has x in A and w x w^-1 in B, the intersection graph
  computed by the pullback of A with w^-1 B w is nontrivial and its core
  appears among the components of pullback(A, B);
* if no x is found but the pullback claims a nontrivial intersection, each
  claimed basis element is checked against both subgroups with an explicit
  expression (a membership certificate), so the claim is still verified.
"""
from __future__ import annotations

from fgadyn.freegroup import Word, substitute
from fgadyn.stallings import contains, fold, pullback
from oracles import inverse_str, reduce_str, reduced_words, subgroup_elements

CONJ_LEN = 3
X_LEN = 6


def certified_member(graph, w: Word) -> bool:
    expr = contains(graph, w)
    if expr is None:
        return False
    assert substitute(list(graph.generators), expr) == w
    return True


def check_pair(gens_a, gens_b, rank: int, probe) -> None:
    A = fold(gens_a, rank=rank)
    B = fold(gens_b, rank=rank)
    comps = pullback(A, B)
    codes = {g.unbased_code() for g, _ in comps}
    # claimed components are sound
    for g, w in comps:
        for y in g.basis():
            assert certified_member(A, y)
            assert certified_member(B, w * y * ~w)
    # every brute-force witness is seen by the pullback
    elems_a = subgroup_elements(gens_a, 4)
    elems_b = subgroup_elements(gens_b, 4)
    in_a = [x for x in probe if x in elems_a or certified_member(A, Word.parse(x))]
    conjs = [""] + reduced_words(rank, CONJ_LEN)
    for ws in conjs:
        w = Word.parse(ws)
        Bw = fold([~w * Word.parse(b) * w for b in gens_b], rank=rank)
        local = [(g, c) for g, c in pullback(A, Bw) if not c]
        hit = None
        wi = inverse_str(ws)
        for xs in in_a:
            z = reduce_str(ws + xs + wi)
            if z in elems_b or certified_member(B, Word.parse(z)):
                hit = xs
                break
        if hit is not None:
            assert local, (gens_a, gens_b, ws, hit)
            assert certified_member(local[0][0], Word.parse(hit))
            assert local[0][0].unbased_code() in codes
        elif local:
            for y in local[0][0].basis():
                assert certified_member(A, y)
                assert certified_member(B, w * y * ~w)


def probe_words(rank: int) -> list[str]:
    return reduced_words(rank, X_LEN)
