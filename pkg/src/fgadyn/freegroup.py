"""Words, cyclic words and automorphisms of a free group of finite rank.

Letters are nonzero integers: ``+(i+1)`` is the i-th basis element and
``-(i+1)`` its inverse.  At the I/O layer generator ``i`` is the lowercase
ASCII letter ``chr(ord('a') + i)`` and its inverse the uppercase one; the
empty word is written ``1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

__all__ = [
    "Generator", "Word", "CyclicWord", "Automorphism",
    "RankMismatch", "NotInvertible", "EmptyImage",
    "reduce", "cyclic_reduce", "canonical", "oriented_canonical",
    "conjugator", "apply", "substitute", "compose", "invert", "power",
    "identity", "equal_outer", "OuterEquality", "words_up_to", "letter_key",
    "parse_letter", "format_letter", "random_word", "verify", "EMPTY",
]


class RankMismatch(ValueError):
    pass


class NotInvertible(ValueError):
    pass


class EmptyImage(ValueError):
    pass


class Generator(NamedTuple):
    index: int
    sign: int

    @property
    def letter(self) -> int:
        return self.sign * (self.index + 1)


def letter_key(x: int) -> int:
    """Sort key of a letter: generator index first, then positive < negative."""
    return 2 * (abs(x) - 1) + (x < 0)


def parse_letter(ch: str) -> int:
    if "a" <= ch <= "z":
        return ord(ch) - ord("a") + 1
    if "A" <= ch <= "Z":
        return -(ord(ch) - ord("A") + 1)
    raise ValueError(f"not a generator letter: {ch!r}")


def format_letter(x: int) -> str:
    i = abs(x) - 1
    if i >= 26:
        return f"x{i}" + ("'" if x < 0 else "")
    return chr((ord("a") if x > 0 else ord("A")) + i)


def _free_reduce(letters: Iterable[int]) -> list[int]:
    out: list[int] = []
    push, pop = out.append, out.pop
    for x in letters:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return out


class Word(tuple):
    """A freely reduced word, stored as a tuple of signed letters.

    ``Word(...)`` always reduces its input; ``u * v`` is the reduced product
    and ``~u`` the inverse.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        letters = list(letters)
        for x in letters:
            if not isinstance(x, int) or x == 0:
                raise ValueError(f"invalid letter {x!r}")
        return tuple.__new__(cls, _free_reduce(letters))

    @classmethod
    def _trusted(cls, letters: Iterable[int]) -> "Word":
        return tuple.__new__(cls, letters)

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        text = text.strip()
        if text in ("", "1"):
            return EMPTY
        letters = [parse_letter(ch) for ch in text]
        if rank is not None:
            for ch, x in zip(text, letters):
                if abs(x) > rank:
                    raise ValueError(f"unknown generator {ch!r} for rank {rank}")
        return cls(letters)

    def __mul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        i = 0
        n, m = len(self), len(other)
        while i < n and i < m and self[n - 1 - i] == -other[i]:
            i += 1
        return Word._trusted(self[: n - i] + tuple(other[i:]))

    def __rmul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return Word(other) * self

    def __invert__(self) -> "Word":
        return Word._trusted(-x for x in reversed(self))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return (~self) ** (-k)
        out = EMPTY
        for _ in range(k):
            out = out * self
        return out

    def __getitem__(self, item):
        got = tuple.__getitem__(self, item)
        if isinstance(item, slice):
            return Word._trusted(got)
        return got

    def generators(self) -> list[Generator]:
        return [Generator(abs(x) - 1, 1 if x > 0 else -1) for x in self]

    def max_index(self) -> int:
        return max((abs(x) for x in self), default=0)

    def shortlex(self) -> tuple:
        return (len(self), tuple(letter_key(x) for x in self))

    def __str__(self) -> str:
        return "".join(format_letter(x) for x in self) if self else "1"

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


EMPTY = Word._trusted(())


def reduce(letters: Iterable[int] | str) -> Word:
    """Freely reduce a raw letter sequence (or a word literal)."""
    if isinstance(letters, str):
        return Word.parse(letters)
    return Word(letters)


def _as_word(w) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    return Word(w)


def _min_rotation(seq: tuple) -> tuple:
    keys = tuple(letter_key(x) for x in seq)
    n = len(keys)
    best = 0
    for i in range(1, n):
        if keys[i:] + keys[:i] < keys[best:] + keys[:best]:
            best = i
    return best, keys[best:] + keys[:best]


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word standing for a conjugacy class.

    When ``canonical`` is set, ``letters`` is the lexicographically least
    rotation of the word and of its inverse, so two classes ``[w]`` and
    ``[w]^{-1}`` share one representative.
    """

    letters: Word
    canonical: bool = False

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return str(self.letters)

    def rotations(self) -> Iterator[Word]:
        w = tuple(self.letters)
        if not w:
            yield EMPTY
        for i in range(len(w)):
            yield Word._trusted(w[i:] + w[:i])

    def sort_key(self) -> tuple:
        return self.letters.shortlex()


def _peel(w: Word) -> tuple[int, int]:
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return i, j + 1


def oriented_canonical(w) -> Word:
    """Least rotation of the cyclic reduction of ``w`` (no inversion)."""
    w = _as_word(w)
    i, j = _peel(w)
    core = tuple(w[i:j])
    if not core:
        return EMPTY
    k, _ = _min_rotation(core)
    return Word._trusted(core[k:] + core[:k])


def canonical(w) -> CyclicWord:
    """Canonical representative of the unoriented conjugacy class of ``w``."""
    a = oriented_canonical(w)
    b = oriented_canonical(~a)
    ka = tuple(letter_key(x) for x in a)
    kb = tuple(letter_key(x) for x in b)
    return CyclicWord(a if ka <= kb else b, canonical=True)


def cyclic_reduce(w, canonical_form: bool = False) -> tuple[CyclicWord, Word]:
    """Split ``w = u c u^-1`` with ``c`` cyclically reduced.

    With ``canonical_form`` the returned class is canonical and ``u`` satisfies
    ``u c u^-1 == w`` or ``u c u^-1 == w^-1`` (the canonical form may be a
    rotation of the inverse).
    """
    w = _as_word(w)
    i, j = _peel(w)
    u = w[:i]
    c = w[i:j]
    if not canonical_form or not c:
        return CyclicWord(c, canonical=canonical_form and not c), u
    can = canonical(c).letters
    target = tuple(can)
    for base in (c, ~c):
        core = tuple(base)
        for k in range(len(core)):
            if core[k:] + core[:k] == target:
                # base = r s and can = s r, so u base u^-1 = (u r) can (u r)^-1
                return CyclicWord(can, True), u * Word._trusted(core[:k])
    raise AssertionError("canonical rotation not found")  # pragma: no cover


def conjugator(x, y) -> Word | None:
    """Return ``u`` with ``u x u^-1 == y``, or None if x, y are not conjugate."""
    x, y = _as_word(x), _as_word(y)
    cx, ux = cyclic_reduce(x)
    cy, uy = cyclic_reduce(y)
    a, b = tuple(cx.letters), tuple(cy.letters)
    if len(a) != len(b):
        return None
    if not a:
        return EMPTY
    for k in range(len(a)):
        if a[k:] + a[:k] == b:
            r = Word._trusted(a[:k])
            # b = r^-1 a r  =>  y = uy r^-1 ux^-1 x ux r uy^-1
            u = uy * ~r * ~ux
            if u * x * ~u == y:
                return u
    return None


def substitute(images: Sequence[Word], w) -> Word:
    """Image of ``w`` under the homomorphism sending generator i to images[i]."""
    out: list[int] = []
    push, pop = out.append, out.pop
    inv = {}
    for x in _as_word(w):
        if x > 0:
            img = images[x - 1]
        else:
            img = inv.get(x)
            if img is None:
                img = inv[x] = tuple(-y for y in reversed(images[-x - 1]))
        for y in img:
            if out and out[-1] == -y:
                pop()
            else:
                push(y)
    return Word._trusted(out)


UNVERIFIED = "unverified"
VERIFIED = "verified-with-inverse"
NOT_INVERTIBLE = "not-invertible"


@dataclass(frozen=True, eq=False)
class Automorphism:
    """Endomorphism of F_n given by the images of the basis.

    ``invertibility`` is one of ``unverified``, ``verified-with-inverse`` or
    ``not-invertible``; a verified instance holds its inverse.
    """

    images: tuple[Word, ...]
    invertibility: str = UNVERIFIED
    inverse: "Automorphism | None" = field(default=None, repr=False)
    _inv_images: tuple = field(default=(), repr=False, init=False)

    def __post_init__(self):
        imgs = tuple(_as_word(w) for w in self.images)
        n = len(imgs)
        if n < 1:
            raise ValueError("an automorphism needs at least one generator")
        for i, w in enumerate(imgs):
            if not w:
                raise EmptyImage(f"image of {format_letter(i + 1)} is trivial")
            if w.max_index() > n:
                raise RankMismatch(f"image {w} uses a generator outside rank {n}")
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "_inv_images", tuple(~w for w in imgs))

    @classmethod
    def from_strings(cls, images: Sequence[str] | dict, rank: int | None = None):
        if isinstance(images, dict):
            rank = rank or len(images)
            seq = [images[format_letter(i + 1)] for i in range(rank)]
        else:
            seq = list(images)
            rank = rank or len(seq)
        return cls(tuple(Word.parse(s, rank) for s in seq))

    @property
    def rank(self) -> int:
        return len(self.images)

    @property
    def verified(self) -> bool:
        return self.invertibility == VERIFIED

    def image(self, x: int) -> Word:
        return self.images[x - 1] if x > 0 else self._inv_images[-x - 1]

    def __call__(self, w) -> Word:
        return apply(self, w)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def is_identity(self) -> bool:
        return all(w == (i + 1,) for i, w in enumerate(self.images))

    def describe(self) -> str:
        return ", ".join(f"{format_letter(i + 1)}->{w}" for i, w in enumerate(self.images))


def _link(f_images, g_images) -> tuple[Automorphism, Automorphism]:
    f = Automorphism(f_images, VERIFIED)
    g = Automorphism(g_images, VERIFIED)
    object.__setattr__(f, "inverse", g)
    object.__setattr__(g, "inverse", f)
    return f, g


def identity(rank: int) -> Automorphism:
    imgs = tuple(Word._trusted((i + 1,)) for i in range(rank))
    return _link(imgs, imgs)[0]


def apply(f: Automorphism, w) -> Word:
    w = _as_word(w)
    if w.max_index() > f.rank:
        raise RankMismatch(f"word {w} does not live in rank {f.rank}")
    out: list[int] = []
    push, pop = out.append, out.pop
    image = f.image
    for x in w:
        for y in image(x):
            if out and out[-1] == -y:
                pop()
            else:
                push(y)
    return Word._trusted(out)


def compose(f: Automorphism, g: Automorphism) -> Automorphism:
    """``compose(f, g)(x) == f(g(x))``."""
    if f.rank != g.rank:
        raise RankMismatch(f"ranks differ: {f.rank} vs {g.rank}")
    images = tuple(apply(f, w) for w in g.images)
    if f.verified and g.verified:
        inv = tuple(apply(g.inverse, w) for w in f.inverse.images)
        return _link(images, inv)[0]
    return Automorphism(images)


def invert(f: Automorphism) -> Automorphism:
    """Inverse automorphism, computed by folding the images and verified.

    Raises NotInvertible when ``f`` is not onto.  The returned automorphism
    is verified and its ``inverse`` is a verified copy of ``f``.
    """
    if f.verified:
        return f.inverse
    from .stallings import fold, contains

    g = fold(list(f.images), rank=f.rank)
    if g.n_vertices != 1 or len(g.edges) != f.rank:
        raise NotInvertible(f"{f.describe()} is not onto (folded graph is not the rose)")
    inv_images = []
    for i in range(f.rank):
        expr = contains(g, Word._trusted((i + 1,)))
        if expr is None:  # pragma: no cover - rose contains everything
            raise NotInvertible(f.describe())
        inv_images.append(expr)
    fv, gv = _link(f.images, tuple(inv_images))
    for i in range(f.rank):
        x = Word._trusted((i + 1,))
        if apply(fv, apply(gv, x)) != x or apply(gv, apply(fv, x)) != x:
            raise NotInvertible(f"inverse check failed for {f.describe()}")
    return gv


def verify(f: Automorphism) -> Automorphism:
    """Return ``f`` marked verified-with-inverse (raises NotInvertible)."""
    return f if f.verified else invert(f).inverse


def power(f: Automorphism, k: int) -> Automorphism:
    if k < 0:
        return power(invert(f), -k)
    out = identity(f.rank)
    base = f
    while k:
        if k & 1:
            out = compose(out, base)
        base = compose(base, base)
        k >>= 1
    return out


def words_up_to(rank: int, length: int, min_length: int = 0) -> Iterator[Word]:
    """All reduced words of length in [min_length, length], in shortlex order."""
    letters = sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)],
                     key=letter_key)
    for n in range(min_length, length + 1):
        if n == 0:
            yield EMPTY
            continue
        stack = [(x,) for x in reversed(letters)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                yield Word._trusted(w)
                continue
            for x in reversed(letters):
                if x != -w[-1]:
                    stack.append(w + (x,))


class OuterEquality(NamedTuple):
    equal: bool
    witness: Word | None
    bound: int


def equal_outer(f: Automorphism, g: Automorphism, conjugator_bound: int) -> OuterEquality:
    """Search ``w`` with ``|w| <= bound`` and ``f(x) == w g(x) w^-1`` for all x."""
    if f.rank != g.rank:
        raise RankMismatch(f"ranks differ: {f.rank} vs {g.rank}")
    for w in words_up_to(f.rank, conjugator_bound):
        wi = ~w
        if all(w * gi * wi == fi for fi, gi in zip(f.images, g.images)):
            return OuterEquality(True, w, conjugator_bound)
    return OuterEquality(False, None, conjugator_bound)


def random_word(rng, rank: int, length: int) -> Word:
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    out: list[int] = []
    while len(out) < length:
        x = rng.choice(letters)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word._trusted(out)


def iter_product(*words) -> Word:
    out = EMPTY
    for w in words:
        out = out * _as_word(w)
    return out

