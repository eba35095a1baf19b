import pytest
from hypothesis import given, strategies as st

from fgadyn.freegroup import (
    EMPTY, Automorphism, EmptyImage, NotInvertible, RankMismatch, Word, apply, canonical,
    compose, conjugator, cyclic_reduce, equal_outer, identity, invert, letter_key,
    oriented_canonical, power, reduce, words_up_to,
)
from oracles import apply_str, class_rep, compose_images, cyclic_core, inverse_str, reduce_str, \
    reduced_words
from strategies import automorphism_images, nonempty_words, words


def W(s):
    return Word.parse(s)


class TestWords:
    @given(st.text("aAbBcC", max_size=20))
    def test_reduce_matches_stack_oracle(self, s):
        assert str(reduce(s)) == (reduce_str(s) or "1")

    @given(words(3), words(3))
    def test_product_is_reduced_concat(self, u, v):
        assert str(W(u) * W(v)) == (reduce_str(u + v) or "1")

    @given(words(3), words(3), words(3))
    def test_associative(self, u, v, w):
        assert (W(u) * W(v)) * W(w) == W(u) * (W(v) * W(w))

    @given(words(3))
    def test_inverse(self, u):
        assert W(u) * ~W(u) == EMPTY
        assert str(~W(u)) == (inverse_str(u) or "1")

    def test_letter_order(self):
        assert sorted([-2, 1, 2, -1], key=letter_key) == [1, -1, 2, -2]

    def test_parse_and_print(self):
        assert str(W("aAb")) == "b"
        assert str(W("1")) == "1"
        assert W("abc").generators()[2].index == 2
        with pytest.raises(ValueError):
            Word.parse("ad", rank=3)
        with pytest.raises(ValueError):
            Word.parse("a-b")

    def test_power(self):
        assert str(W("ab") ** 3) == "ababab"
        assert str(W("ab") ** -2) == "BABA"

    def test_words_up_to_is_shortlex_and_complete(self):
        ws = list(words_up_to(2, 4))
        assert ws == sorted(ws, key=Word.shortlex)
        assert {str(w) for w in ws if w} == set(reduced_words(2, 4))


class TestCyclic:
    @given(nonempty_words(3))
    def test_canonical_matches_oracle(self, s):
        c = canonical(W(s))
        assert str(c) == (class_rep(s) or "1")

    @given(nonempty_words(3), st.integers(0, 20))
    def test_canonical_invariant_under_rotation_and_inversion(self, s, k):
        core = cyclic_core(s)
        if not core:
            return
        k %= len(core)
        rot = core[k:] + core[:k]
        assert canonical(W(rot)) == canonical(W(s))
        assert canonical(~W(s)) == canonical(W(s))

    @given(words(3))
    def test_cyclic_reduce_conjugator(self, s):
        c, u = cyclic_reduce(W(s))
        assert u * c.letters * ~u == W(s)
        assert str(c.letters) == (cyclic_core(s) or "1")

    @given(nonempty_words(3))
    def test_canonical_form_conjugator(self, s):
        c, u = cyclic_reduce(W(s), canonical_form=True)
        x = u * c.letters * ~u
        assert x == W(s) or x == ~W(s)

    def test_oriented_canonical_keeps_direction(self):
        assert str(oriented_canonical(W("ba"))) == "ab"
        assert str(oriented_canonical(W("BA"))) == "AB"
        assert str(canonical(W("BA"))) == "ab"

    @given(nonempty_words(2, 8), words(2, 5))
    def test_conjugator_finds_witness(self, s, t):
        x = W(s)
        y = W(t) * x * ~W(t)
        u = conjugator(x, y)
        assert u is not None and u * x * ~u == y

    def test_conjugator_none(self):
        assert conjugator(W("ab"), W("aab")) is None


class TestAutomorphisms:
    def test_apply_example(self, auts):
        assert str(apply(auts["Phi"], "a")) == "ad"

    @given(automorphism_images(3), words(3))
    def test_apply_matches_substitution_oracle(self, imgs, s):
        f = Automorphism.from_strings(imgs)
        assert str(apply(f, s)) == (apply_str(imgs, s) or "1")

    @given(automorphism_images(3), automorphism_images(3))
    def test_compose_order(self, fi, gi):
        f, g = Automorphism.from_strings(fi), Automorphism.from_strings(gi)
        assert [str(w) for w in compose(f, g).images] == compose_images(fi, gi)

    def test_composite_fixes_b(self, auts):
        h = compose(invert(auts["Phi"]), auts["Psi"])
        assert str(h(W("b"))) == "b"

    def test_invert_phi(self, auts):
        g = invert(auts["Phi"])
        assert [str(w) for w in g.images] == ["b", "c", "d", "Ba"]
        assert compose(auts["Phi"], g).is_identity()
        assert compose(g, auts["Phi"]).is_identity()

    @given(automorphism_images(3, 8))
    def test_invert_random(self, imgs):
        f = Automorphism.from_strings(imgs)
        g = invert(f)
        assert g.verified and g.inverse == f
        assert compose(f, g).is_identity() and compose(g, f).is_identity()

    def test_not_invertible(self):
        with pytest.raises(NotInvertible):
            invert(Automorphism.from_strings(["aa", "b"]))
        with pytest.raises(NotInvertible):
            invert(Automorphism.from_strings(["ab", "ba"]))

    def test_errors(self):
        with pytest.raises(EmptyImage):
            Automorphism.from_strings(["aA", "b"])
        with pytest.raises(RankMismatch):
            Automorphism((W("c"), W("b")))
        with pytest.raises(RankMismatch):
            compose(identity(2), identity(3))
        with pytest.raises(RankMismatch):
            apply(identity(2), "c")

    def test_power(self, auts):
        f = auts["Phi"]
        assert power(f, 3) == compose(f, compose(f, f))
        assert compose(power(f, -2), power(f, 2)).is_identity()
        assert power(f, 0).is_identity()

    def test_equal_outer(self, auts):
        f = auts["Psi"]
        u = W("ab")
        g = Automorphism(tuple(u * w * ~u for w in f.images))
        got = equal_outer(g, f, 2)
        assert got.equal and got.witness == u
        assert not equal_outer(auts["Phi"], auts["Psi"], 2).equal

    def test_from_dict(self):
        f = Automorphism.from_strings({"a": "ab", "b": "b"})
        assert f.describe() == "a->ab, b->b"
