"""Whitehead automorphisms, cyclic-length minimization and primitivity."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ._kernel import CapExceeded
from .freegroup import (
    Automorphism, CyclicWord, Word, apply, canonical, cyclic_reduce, format_letter, letter_key,
)
from .growth import periodic_classes

__all__ = [
    "WhiteheadMove", "whitehead_moves", "type_one_moves", "type_two_moves",
    "minimize", "is_primitive", "fixed_rank1_factor_probe", "CapExceeded",
]

PRIMITIVE_CAP = 64


@dataclass(frozen=True)
class WhiteheadMove:
    """``kind`` is "I" (signed permutation) or "II" (multiplier, cut set)."""

    kind: str
    rank: int
    perm: tuple = ()          # type I: image of generator i is perm[i] (signed letter)
    multiplier: int = 0       # type II
    cut: frozenset = frozenset()

    def automorphism(self) -> Automorphism:
        return _auto(self)

    def __call__(self, w) -> Word:
        return apply(self.automorphism(), w)

    def describe(self) -> str:
        if self.kind == "I":
            return "I(" + ",".join(format_letter(x) for x in self.perm) + ")"
        cut = "".join(format_letter(x) for x in sorted(self.cut, key=letter_key))
        return f"II({format_letter(self.multiplier)};{cut})"


@lru_cache(maxsize=None)
def _auto(move: WhiteheadMove) -> Automorphism:
    n = move.rank
    if move.kind == "I":
        imgs = [Word._trusted((x,)) for x in move.perm]
    else:
        a, A = move.multiplier, move.cut
        imgs = []
        for i in range(1, n + 1):
            if i == abs(a):
                imgs.append(Word._trusted((i,)))
                continue
            left = (-a,) if -i in A else ()
            right = (a,) if i in A else ()
            imgs.append(Word(left + (i,) + right))
    return Automorphism(tuple(imgs))


def _letters(rank: int) -> list[int]:
    return sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)


@lru_cache(maxsize=None)
def type_one_moves(rank: int) -> tuple:
    out = []
    for perm in itertools.permutations(range(1, rank + 1)):
        for signs in itertools.product((1, -1), repeat=rank):
            out.append(WhiteheadMove("I", rank, perm=tuple(s * p for s, p in zip(signs, perm))))
    return tuple(out)


@lru_cache(maxsize=None)
def type_two_moves(rank: int) -> tuple:
    """Normalized type-II moves: a in A, a^-1 not in A, A not {a} nor L minus {a^-1}."""
    out = []
    letters = _letters(rank)
    for a in letters:
        rest = [x for x in letters if x not in (a, -a)]
        for mask in range(1 << len(rest)):
            chosen = frozenset([a] + [x for k, x in enumerate(rest) if mask >> k & 1])
            if len(chosen) == 1 or len(chosen) == len(letters) - 1:
                continue
            out.append(WhiteheadMove("II", rank, multiplier=a, cut=chosen))
    return tuple(out)


def whitehead_moves(rank: int) -> list[WhiteheadMove]:
    if rank < 1:
        raise ValueError("rank must be positive")
    return list(type_one_moves(rank)) + list(type_two_moves(rank))


def _cyclic_len(w: Word) -> int:
    return len(cyclic_reduce(w)[0])


def minimize(c, rank: int | None = None) -> tuple[CyclicWord, list[WhiteheadMove]]:
    """Greedy first-improvement descent over type-II moves.

    Returns the canonical minimal class and the moves applied in order.
    """
    if isinstance(c, CyclicWord):
        c = c.letters
    if isinstance(c, str):
        c = Word.parse(c)
    w = cyclic_reduce(c)[0].letters
    rank = rank or max(w.max_index(), 1)
    moves = type_two_moves(rank)
    applied = []
    improved = True
    while improved and len(w) > 1:
        improved = False
        for mv in moves:
            img = cyclic_reduce(apply(mv.automorphism(), w))[0].letters
            if len(img) < len(w):
                w = img
                applied.append(mv)
                improved = True
                break
    return canonical(w), applied


def is_primitive(w, rank: int | None = None, cap: int = PRIMITIVE_CAP) -> bool:
    """True iff the cyclic word of ``w`` is Whitehead-minimal of length 1.

    A conjugacy class is primitive exactly when it contains a basis element,
    so this is invariant under cyclic permutation and inversion.
    """
    if isinstance(w, str):
        w = Word.parse(w)
    if isinstance(w, CyclicWord):
        w = w.letters
    c = cyclic_reduce(w)[0].letters
    if not c:
        raise ValueError("the trivial word is not primitive (and not allowed)")
    if len(c) > cap:
        raise CapExceeded(f"primitivity test capped at length {cap}, word has {len(c)}")
    return len(minimize(c, rank)[0]) == 1


def fixed_rank1_factor_probe(f: Automorphism, L: int, P: int) -> list[CyclicWord]:
    """Primitive classes of length <= L that are periodic with period <= P."""
    return [c for c, _ in periodic_classes(f, L, P) if is_primitive(c, f.rank)]
