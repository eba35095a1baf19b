"""Independent reference implementations used only by the tests.

Everything here works on plain strings and brute force, sharing no code
with the package beyond the letter conventions (a..z, upper case inverse).
"""
from __future__ import annotations

import itertools

import numpy as np


def inv_letter(c: str) -> str:
    return c.lower() if c.isupper() else c.upper()


def reduce_str(s: str) -> str:
    out = []
    for c in s:
        if out and out[-1] == inv_letter(c):
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def inverse_str(s: str) -> str:
    return "".join(inv_letter(c) for c in reversed(s))


def cyclic_core(s: str) -> str:
    s = reduce_str(s)
    while len(s) > 1 and s[0] == inv_letter(s[-1]):
        s = s[1:-1]
    return s


def _key(s: str) -> list:
    return [2 * (ord(c.lower()) - 97) + c.isupper() for c in s]


def class_rep(s: str) -> str:
    """Least rotation of w or w^-1 in the order a < A < b < B < ..."""
    c = cyclic_core(s)
    if not c:
        return ""
    cands = [c[i:] + c[:i] for i in range(len(c))]
    ci = inverse_str(c)
    cands += [ci[i:] + ci[:i] for i in range(len(ci))]
    return min(cands, key=_key)


def apply_str(images: list[str], s: str) -> str:
    out = []
    for c in s:
        img = images[ord(c.lower()) - 97]
        out.append(inverse_str(img) if c.isupper() else img)
    return reduce_str("".join(out))


def alphabet(rank: int) -> list[str]:
    out = []
    for i in range(rank):
        out += [chr(97 + i), chr(65 + i)]
    return out


def reduced_words(rank: int, max_len: int) -> list[str]:
    """All reduced words of length 1..max_len."""
    out, layer = [], [""]
    letters = alphabet(rank)
    for _ in range(max_len):
        nxt = [w + c for w in layer for c in letters if not (w and w[-1] == inv_letter(c))]
        out += nxt
        layer = nxt
    return out


def classes(rank: int, max_len: int) -> set[str]:
    return {class_rep(w) for w in reduced_words(rank, max_len)} - {""}


def subgroup_elements(gens: list[str], factors: int) -> set[str]:
    """Reduced products of at most ``factors`` generators and inverses."""
    pool = [g for g in gens] + [inverse_str(g) for g in gens]
    seen = {""}
    layer = {""}
    for _ in range(factors):
        layer = {reduce_str(w + g) for w in layer for g in pool} - seen
        seen |= layer
    return seen


def image_lengths(images: list[str], s: str, n: int) -> list[int]:
    out = []
    for _ in range(n + 1):
        out.append(len(cyclic_core(s)))
        s = apply_str(images, s)
    return out


def bisect_root(coeffs, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Root of a polynomial (highest degree first) with a sign change on [lo, hi]."""
    p = np.poly1d(coeffs)
    flo = p(lo)
    for _ in range(200):
        mid = (lo + hi) / 2
        fm = p(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return (lo + hi) / 2


def whitehead_orbit(word: str, rank: int, cap: int, moves) -> set[str]:
    """Closure of a cyclic class under ``moves`` (callables on strings), length <= cap."""
    start = class_rep(word)
    seen = {start}
    todo = [start]
    while todo:
        w = todo.pop()
        for mv in moves:
            c = class_rep(mv(w))
            if c and len(c) <= cap and c not in seen:
                seen.add(c)
                todo.append(c)
    return seen


def nielsen_images(rank: int) -> list[list[str]]:
    """Images for x_i -> x_i x_j^{+-1}, x_i -> x_j^{+-1} x_i and inversions."""
    maps = []
    gens = [chr(97 + i) for i in range(rank)]
    for i, j in itertools.permutations(range(rank), 2):
        for right in (gens[j], inverse_str(gens[j])):
            imgs = list(gens)
            imgs[i] = gens[i] + right
            maps.append(imgs)
            imgs = list(gens)
            imgs[i] = right + gens[i]
            maps.append(imgs)
    for i in range(rank):
        imgs = list(gens)
        imgs[i] = inverse_str(gens[i])
        maps.append(imgs)
    return maps


def elementary_nielsen(rank: int) -> list:
    return [lambda w, m=m: apply_str(m, w) for m in nielsen_images(rank)]


def compose_images(f: list[str], g: list[str]) -> list[str]:
    """Images of x -> f(g(x))."""
    return [apply_str(f, w) for w in g]
