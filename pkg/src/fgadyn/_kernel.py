"""Fast iteration of an automorphism on many conjugacy classes.

Words are encoded as str with one code point per letter,
``chr(0x100 + letter_key(x))``, so string order is the letter order and
inversion is reverse + xor 1.  ``PowerTable`` stores ``f^i(x)`` for every
letter and every ``i <= n``; the cyclic length of ``f^i(w)`` is then
obtained by reducing the concatenation of the stored pieces with a stack of
segments (index ranges into one flat array), compiled with numba.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .freegroup import Automorphism, Word, letter_key

BASE = 0x100
DEFAULT_CAP = 4_000_000


class CapExceeded(RuntimeError):
    """A computation hit a configured resource cap."""


def key_letter(k: int) -> int:
    return (k >> 1) + 1 if not k & 1 else -((k >> 1) + 1)


_INV = {BASE + k: BASE + (k ^ 1) for k in range(2 * 4096)}


def encode(w) -> str:
    return "".join(chr(BASE + letter_key(x)) for x in w)


def decode(s: str) -> Word:
    return Word._trusted(key_letter(ord(c) - BASE) for c in s)


def inv(s: str) -> str:
    return s[::-1].translate(_INV)


def lcp(a: str, b: str) -> int:
    """Longest common prefix length, by galloping plus bisection on slices."""
    m = min(len(a), len(b))
    if not m or a[0] != b[0]:
        return 0
    hi = 1
    while hi < m and a[:hi * 2] == b[:hi * 2]:
        hi *= 2
    lo, hi = hi, min(hi * 2, m)
    if a[:hi] == b[:hi]:
        return hi
    # a[:lo] matches, a[:hi] does not
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid
    return lo


def reduce_concat(pieces) -> str:
    """Free reduction of a concatenation of reduced encoded words."""
    out = ""
    for q in pieces:
        if not out:
            out = q
            continue
        m = min(len(out), len(q))
        t = lcp(inv(out[-m:]), q)
        out = out[: len(out) - t] + q[t:]
    return out


def cyclic_core(s: str) -> str:
    t = lcp(s, inv(s))
    if 2 * t >= len(s):
        return ""
    return s[t: len(s) - t]


def min_rotation(s: str) -> str:
    """Least rotation (Booth's algorithm)."""
    if not s:
        return s
    d = s + s
    n = len(s)
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        i = f[j - k - 1]
        while i != -1 and d[j] != d[k + i + 1]:
            if d[j] < d[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if i == -1 and d[j] != d[k + i + 1]:
            if d[j] < d[k + i + 1]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return d[k: k + n]


def oriented_key(s: str) -> str:
    return min_rotation(cyclic_core(s))


def canonical_key(s: str) -> str:
    c = cyclic_core(s)
    return min(min_rotation(c), min_rotation(inv(c)))


class PowerTable:
    """``f^i(x)`` for all letters x and ``0 <= i <= n`` (encoded)."""

    def __init__(self, f: Automorphism, n: int, cap: int = DEFAULT_CAP):
        self.f = f
        self.n = n
        r = f.rank
        self.width = 2 * r
        level = [chr(BASE + k) for k in range(self.width)]
        images = [encode(f.image(key_letter(k))) for k in range(self.width)]
        img_keys = [[ord(c) - BASE for c in s] for s in images]
        self.levels = [level]
        for _ in range(n):
            nxt = [reduce_concat(level[k2] for k2 in img_keys[k]) for k in range(self.width)]
            if max(len(s) for s in nxt) > cap:
                raise CapExceeded(f"iterated image longer than {cap} letters")
            level = nxt
            self.levels.append(level)
        self.lengths = np.array([[len(s) for s in lv] for lv in self.levels], dtype=np.int64)
        self._flat_cache = None

    def image(self, i: int, keys) -> str:
        """Encoded reduced ``f^i(w)`` for w given as letter keys."""
        lv = self.levels[i]
        return reduce_concat(lv[k] for k in keys)

    def _flat(self):
        if self._flat_cache is None:
            parts, offs = [], np.zeros((self.n + 1, self.width), dtype=np.int64)
            pos = 0
            for i, lv in enumerate(self.levels):
                for k, piece in enumerate(lv):
                    offs[i, k] = pos
                    pos += len(piece)
                    parts.append(piece)
            flat = np.frombuffer("".join(parts).encode("utf-16-le"), dtype=np.uint16)
            self._flat_cache = ((flat.astype(np.int32) - BASE), offs)
        return self._flat_cache

    def cyclic_lengths(self, words, upto: int | None = None) -> np.ndarray:
        """Cyclic lengths of ``f^i(w)`` for ``0 <= i <= upto``.

        ``words`` is a list of letter-key tuples of cyclically reduced words.
        """
        upto = self.n if upto is None else upto
        N = len(words)
        m = max((len(w) for w in words), default=0)
        keys = np.zeros((N, max(m, 1)), dtype=np.int64)
        sizes = np.zeros(N, dtype=np.int64)
        for r, w in enumerate(words):
            keys[r, : len(w)] = w
            sizes[r] = len(w)
        flat, offs = self._flat()
        return _cyclic_lengths(flat, offs, self.lengths, keys, sizes, upto)


@njit(cache=True)
def _cyclic_lengths(flat, offs, lens, keys, sizes, upto):
    N = keys.shape[0]
    out = np.zeros((N, upto + 1), dtype=np.int64)
    cap = keys.shape[1]
    sp = np.empty(cap, dtype=np.int64)   # segment start (absolute in flat)
    se = np.empty(cap, dtype=np.int64)   # segment end (exclusive)
    for r in range(N):
        k = sizes[r]
        for i in range(upto + 1):
            top = 0
            for j in range(k):
                key = keys[r, j]
                qs = offs[i, key]
                qe = qs + lens[i, key]
                while top > 0 and qs < qe:
                    a = se[top - 1] - 1
                    lim = min(se[top - 1] - sp[top - 1], qe - qs)
                    t = 0
                    while t < lim and flat[a - t] == (flat[qs + t] ^ 1):
                        t += 1
                    se[top - 1] -= t
                    qs += t
                    if se[top - 1] == sp[top - 1]:
                        top -= 1
                    else:
                        break
                if qs < qe:
                    sp[top] = qs
                    se[top] = qe
                    top += 1
            total = 0
            for j in range(top):
                total += se[j] - sp[j]
            # cyclic peel with a cursor at each end
            fi, fp = 0, sp[0] if top > 0 else 0
            bi, bp = top - 1, se[top - 1] - 1 if top > 0 else 0
            peel = 0
            while total - 2 * peel >= 2:
                if flat[fp] != (flat[bp] ^ 1):
                    break
                peel += 1
                fp += 1
                if fp == se[fi]:
                    fi += 1
                    if fi < top:
                        fp = sp[fi]
                bp -= 1
                if bp < sp[bi]:
                    bi -= 1
                    if bi >= 0:
                        bp = se[bi] - 1
            out[r, i] = total - 2 * peel
    return out
