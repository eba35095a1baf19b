"""Growth of conjugacy classes under iteration of an automorphism."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._kernel import PowerTable, encode, key_letter, oriented_key
from .freegroup import Automorphism, CyclicWord, Word, cyclic_reduce, letter_key

__all__ = [
    "GrowthConfig", "GrowthReport", "Partition", "AtoroidalVerdict",
    "iterate_lengths", "classify_growth", "classify_many", "atoroidal_probe",
    "growth_partition", "canonical_classes", "periodic_classes",
]


@dataclass(frozen=True)
class GrowthConfig:
    window: int = 8
    eps: float = 0.05
    ratio_tol: float = 0.01
    n: int = 30

    def label(self, n: int | None = None) -> str:
        n = self.n if n is None else n
        return f"n={n}, window={self.window}, eps={self.eps}"


@dataclass
class GrowthReport:
    """Verdict for one class.

    ``kind`` is fixed, periodic, polynomial, exponential or inconclusive.
    Only fixed/periodic verdicts are exact; the others are heuristics at
    the scale recorded in ``bounds``.
    """

    kind: str
    lengths: list
    period: int | None = None
    degree: int | None = None
    rate: float | None = None
    certificate: dict = field(default_factory=dict)
    bounds: str = ""

    @property
    def exact(self) -> bool:
        return self.kind in ("fixed", "periodic")

    @property
    def exponential(self) -> bool:
        return self.kind == "exponential"

    def describe(self) -> str:
        if self.kind == "fixed":
            return "fixed (exact)"
        if self.kind == "periodic":
            return f"periodic({self.period}) (exact)"
        if self.kind == "polynomial":
            return f"polynomial(degree~{self.degree}) (heuristic, {self.bounds})"
        if self.kind == "exponential":
            return f"exponential(lambda~{self.rate:.4f}) (heuristic, {self.bounds})"
        return f"inconclusive ({self.bounds})"

    def to_dict(self) -> dict:
        d = {"class": self.kind, "lengths": [int(x) for x in self.lengths], "bounds": self.bounds}
        if self.period is not None:
            d["period"] = self.period
        if self.degree is not None:
            d["degree_estimate"] = self.degree
        if self.rate is not None:
            d["lambda_estimate"] = round(self.rate, 6)
        if self.certificate:
            d["certificate"] = self.certificate
        return d


def _keys(w) -> tuple:
    return tuple(letter_key(x) for x in w)


def _cyclic(w) -> Word:
    if isinstance(w, CyclicWord):
        w = w.letters
    if isinstance(w, str):
        w = Word.parse(w)
    return cyclic_reduce(w)[0].letters


def canonical_classes(rank: int, L: int, min_length: int = 1) -> list[Word]:
    """Canonical representatives of all nontrivial classes up to length L.

    Shortlex order.  Each length is generated as an array of cyclically
    reduced key rows and filtered by comparing its integer code with those
    of every rotation of the word and of its inverse.
    """
    W = 2 * rank
    out: list[Word] = []
    for k in range(max(min_length, 1), L + 1):
        for first in range(0, W, 2):
            rows = _rows_with_first(first, k, W)
            if rows.size == 0:
                continue
            # letters below the first generator are not allowed in a canonical word
            ok = (rows >= first).all(axis=1)
            # cyclically reduced
            ok &= rows[:, -1] != (rows[:, 0] ^ 1)
            rows = rows[ok]
            if rows.size == 0:
                continue
            weights = W ** np.arange(k - 1, -1, -1, dtype=np.int64)
            code = rows @ weights
            best = code.copy()
            invrows = (rows[:, ::-1] ^ 1)
            for src in (rows, invrows):
                for s in range(k):
                    rot = np.roll(src, -s, axis=1) @ weights
                    np.minimum(best, rot, out=best)
            keep = rows[code == best]
            keep = keep[np.argsort(keep @ weights, kind="stable")]
            for row in keep.tolist():
                out.append(Word._trusted(key_letter(x) for x in row))
    return out


def _rows_with_first(first: int, k: int, W: int) -> np.ndarray:
    """All reduced key rows of length k starting with ``first``."""
    rows = np.array([[first]], dtype=np.int64)
    for _ in range(k - 1):
        last = rows[:, -1]
        cand = np.arange(W, dtype=np.int64)
        nxt = np.repeat(rows, W, axis=0)
        letters = np.tile(cand, len(rows))
        good = letters != (np.repeat(last, W) ^ 1)
        rows = np.hstack([nxt[good], letters[good, None]])
    return rows


def _first_return(table: PowerTable, w: Word, lengths, limit: int) -> int | None:
    keys = _keys(w)
    target = oriented_key(encode(w))
    l0 = lengths[0]
    for i in range(1, limit + 1):
        if lengths[i] == l0 and oriented_key(table.image(i, keys)) == target:
            return i
    return None


def _verdict(lengths, period, config: GrowthConfig, n: int) -> GrowthReport:
    lengths = [int(x) for x in lengths]
    bounds = config.label(n)
    if period is not None:
        kind = "fixed" if period == 1 else "periodic"
        return GrowthReport(kind, lengths, period=period,
                            certificate={"return_iterate": period}, bounds=f"exact, {bounds}")
    W = config.window
    tail = lengths[n - W: n + 1]
    gm = (tail[-1] / tail[0]) ** (1.0 / W)
    half = W // 2
    first = (tail[half] / tail[0]) ** (1.0 / half)
    second = (tail[-1] / tail[half]) ** (1.0 / (W - half))
    window = {"iterates": [n - W, n], "ratio": round(gm, 6)}
    if gm > 1 + config.eps:
        if second >= first - config.ratio_tol:
            return GrowthReport("exponential", lengths, rate=gm, certificate=window, bounds=bounds)
        return GrowthReport("inconclusive", lengths, certificate=window, bounds=bounds)
    xs = [math.log(i) for i in range(max(n - W + 1, 1), n + 1)]
    ys = [math.log(lengths[i]) for i in range(max(n - W + 1, 1), n + 1)]
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else 0.0
    deg = max(0, int(round(slope)))
    return GrowthReport("polynomial", lengths, degree=deg, certificate=window, bounds=bounds)


def iterate_lengths(f: Automorphism, w, n: int) -> list[int]:
    """Cyclic lengths of ``f^i(w)`` for i = 0..n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    c = _cyclic(w)
    if not c:
        return [0] * (n + 1)
    table = PowerTable(f, n)
    return [int(x) for x in table.cyclic_lengths([_keys(c)])[0]]


def classify_growth(f: Automorphism, w, n: int | None = None,
                    config: GrowthConfig = GrowthConfig()) -> GrowthReport:
    n = config.n if n is None else n
    if n < config.window:
        raise ValueError(f"n={n} is smaller than the window {config.window}")
    return classify_many(f, [w], n, config)[0]


def classify_many(f: Automorphism, words: Iterable, n: int,
                  config: GrowthConfig = GrowthConfig(), table: PowerTable | None = None):
    words = [_cyclic(w) for w in words]
    if any(not w for w in words):
        raise ValueError("the trivial class has no growth")
    table = table or PowerTable(f, n)
    lens = table.cyclic_lengths([_keys(w) for w in words], n)
    out = []
    for w, row in zip(words, lens):
        period = None
        if (row[1:] == row[0]).any():
            period = _first_return(table, w, row, n)
        out.append(_verdict(row, period, config, n))
    return out


@dataclass
class AtoroidalVerdict:
    counterexample: CyclicWord | None
    period: int | None
    L: int
    P: int

    @property
    def atoroidal_at_scale(self) -> bool:
        return self.counterexample is None

    def describe(self) -> str:
        if self.counterexample is None:
            return f"no-periodic-up-to(L={self.L}, P={self.P})"
        return f"counterexample([{self.counterexample}], {self.period})"

    def to_dict(self) -> dict:
        if self.counterexample is None:
            return {"verdict": "no-periodic-up-to", "L": self.L, "P": self.P}
        return {"verdict": "counterexample", "class": str(self.counterexample),
                "period": self.period, "L": self.L, "P": self.P}


def periodic_classes(f: Automorphism, L: int, P: int, first_only: bool = False):
    """Canonical classes of length <= L with period <= P, shortlex order."""
    classes = canonical_classes(f.rank, L)
    table = PowerTable(f, P)
    hits = []
    if not classes:
        return hits
    lens = table.cyclic_lengths([_keys(w) for w in classes], P)
    same = (lens[:, 1:] == lens[:, :1]).any(axis=1)
    for idx in np.nonzero(same)[0]:
        w = classes[idx]
        p = _first_return(table, w, lens[idx], P)
        if p is not None:
            hits.append((CyclicWord(w, True), p))
            if first_only:
                break
    return hits


def atoroidal_probe(f: Automorphism, L: int, P: int) -> AtoroidalVerdict:
    """First periodic class (shortlex) of length <= L with period <= P, if any."""
    hits = periodic_classes(f, L, P, first_only=True)
    if hits:
        return AtoroidalVerdict(hits[0][0], hits[0][1], L, P)
    return AtoroidalVerdict(None, None, L, P)


@dataclass
class Partition:
    exponential: list  # (CyclicWord, GrowthReport)
    non_exponential: list
    inconclusive: list
    L: int
    n: int
    config: GrowthConfig

    def counts(self) -> dict:
        return {"exponential": len(self.exponential),
                "non_exponential": len(self.non_exponential),
                "inconclusive": len(self.inconclusive)}


def growth_partition(f: Automorphism, L: int, n: int | None = None,
                     config: GrowthConfig = GrowthConfig()) -> Partition:
    """Classify every canonical class of length <= L."""
    n = config.n if n is None else n
    if n < config.window:
        raise ValueError(f"n={n} is smaller than the window {config.window}")
    classes = canonical_classes(f.rank, L)
    table = PowerTable(f, n)
    reports = classify_many(f, classes, n, config, table=table)
    exp, non, inc = [], [], []
    for w, rep in zip(classes, reports):
        item = (CyclicWord(w, True), rep)
        if rep.kind == "exponential":
            exp.append(item)
        elif rep.kind == "inconclusive":
            inc.append(item)
        else:
            non.append(item)
    return Partition(exp, non, inc, L, n, config)
