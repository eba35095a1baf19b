import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fgadyn.freegroup import Automorphism, Word, apply, random_word
from fgadyn.graphmap import (
    GraphMap, NonStabilizing, ReducibleMatrix, Stratum, bcc_upper_bound, check_rtt,
    critical_constant, critical_value, filtration, pf_eigenvalue, rose_map, tighten_image,
    turn_table,
)
from oracles import bisect_root
from strategies import automorphism_images

PSI_ROOT = bisect_root([1, -1, 0, -1], 1.0, 2.0)       # x^3 - x^2 - 1
PHI_ROOT = bisect_root([1, -1, 0, 0, -1], 1.0, 2.0)    # x^4 - x^3 - 1


def layout(m):
    return [({"class": s.kind, "edges": s.names(m.graph)}) for s in filtration(m).strata]


class TestStrata:
    def test_oracle_roots(self):
        assert abs(PHI_ROOT - 1.380278) < 1e-6
        assert abs(PSI_ROOT - 1.465571) < 1e-6

    def test_psi(self, auts):
        m = rose_map(auts["Psi"])
        assert m.graph.format_path(m.edge_map[3]) == "d b"
        strata = filtration(m).strata
        assert [(s.names(m.graph), s.kind) for s in strata] == [(["a", "b", "c"], "EG"), (["d"], "NEG")]
        assert abs(strata[0].pf - PSI_ROOT) < 1e-6

    def test_phi(self, auts):
        strata = filtration(rose_map(auts["Phi"])).strata
        assert len(strata) == 1 and strata[0].kind == "EG"
        assert abs(strata[0].pf - PHI_ROOT) < 1e-6

    def test_phi2(self, auts):
        m = rose_map(auts["Phi2"])
        assert layout(m) == [{"class": "EG", "edges": ["a", "b", "c", "d"]},
                             {"class": "NEG", "edges": ["e"]}]

    def test_filtration_is_invariant(self, auts):
        for f in auts.values():
            m = rose_map(f)
            filt = filtration(m)
            for r in range(len(filt.strata)):
                level = filt.level(r)
                for e in level:
                    assert all(abs(x) - 1 in level for x in m.edge_map[e])

    def test_to_dict(self, auts):
        m = rose_map(auts["Psi"])
        assert filtration(m).strata[0].to_dict(m.graph) == \
            {"edges": ["a", "b", "c"], "class": "EG", "lambda": 1.465571}


class TestPerronFrobenius:
    def test_permutation_is_exactly_one(self):
        assert pf_eigenvalue(np.array([[0, 1], [1, 0]])) == 1.0
        assert pf_eigenvalue(np.array([[1]])) == 1.0

    @settings(max_examples=40)
    @given(st.integers(2, 5).flatmap(
        lambda n: st.lists(st.integers(0, 3), min_size=n * n, max_size=n * n).map(
            lambda xs: np.array(xs).reshape(n, n))))
    def test_matches_numpy_eigvals(self, M):
        M = M + np.roll(np.eye(len(M), dtype=int), 1, axis=1)  # force irreducible
        want = max(abs(np.linalg.eigvals(M.astype(float))))
        assert abs(pf_eigenvalue(M) - want) < 1e-7

    def test_reducible(self):
        with pytest.raises(ReducibleMatrix):
            pf_eigenvalue(np.array([[1, 0], [1, 1]]))
        with pytest.raises(ValueError):
            pf_eigenvalue(np.array([[-1]]))


class TestTurns:
    def test_illegal_turn(self):
        m = rose_map(Automorphism.from_strings(["ab", "ab"]))
        table = turn_table(m)
        assert any(v == "illegal" for v in table.values())
        got = {t.describe(m.graph): v for t, v in table.items()}
        assert got["{a, b}"] == "illegal"

    def test_tighten(self):
        m = rose_map(Automorphism.from_strings(["ab", "A"]))
        assert tighten_image(m, (1, 2)) == tuple(Word.parse("ab") * Word.parse("A"))
        assert tighten_image(m, "b a") == (2,)
        assert tighten_image(m, (1, 2, 1, 2), cyclic=True) == (2, 2)

    def test_rtt_passes_on_examples(self, auts):
        for name in ("Phi", "Psi", "Phi2"):
            m = rose_map(auts[name])
            for rep in check_rtt(m):
                assert rep["i"]["status"] == "pass"
                assert rep["iii"]["status"] == "pass"
                assert rep["ii"]["status"] in ("pass", "bounded-pass")

    def test_rtt_reports_each_eg_stratum(self, auts):
        reps = check_rtt(rose_map(auts["Psi"]))
        assert [r["edges"] for r in reps] == [["a", "b", "c"]]


class TestGraphMapIO:
    def test_round_trip(self, auts):
        m = rose_map(auts["Psi"])
        back = GraphMap.from_dict(m.to_dict())
        assert back.edge_map == m.edge_map and back.graph.ends == m.graph.ends

    def test_contiguous_ids(self):
        data = {"edges": [{"id": "a", "from": 0, "to": 0}, {"id": "b", "from": 0, "to": 0}],
                "map": {"a": "a~b", "b": "a"}}
        m = GraphMap.from_dict(data)
        assert m.edge_map == ((1, -2), (1,))

    def test_rejections(self):
        with pytest.raises(ValueError):
            GraphMap.from_dict({"edges": [{"id": "a", "from": 0, "to": 0}], "map": {"a": "a~a"}})
        with pytest.raises(ValueError):
            GraphMap.from_dict({"edges": [{"id": "a", "from": 0, "to": 1},
                                          {"id": "b", "from": 1, "to": 0}],
                                "map": {"a": "a b", "b": "b"}})
        with pytest.raises(ValueError):
            GraphMap.from_dict({"edges": [{"id": "a", "from": 0, "to": 0}], "map": {"a": "z"}})


def _cancellation(f, a, b):
    fa, fb = apply(f, a), apply(f, b)
    return (len(fa) + len(fb) - len(apply(f, a * b))) // 2


class TestBoundedCancellation:
    def test_values(self, auts):
        assert bcc_upper_bound(rose_map(auts["Phi"])) == 5
        assert bcc_upper_bound(rose_map(auts["Psi"])) == 5
        assert bcc_upper_bound(rose_map(Automorphism.from_strings(["a", "b"]))) == 0

    def test_example_lower_bound(self):
        f = Automorphism.from_strings(["ab", "b"])
        assert _cancellation(f, Word.parse("a"), Word.parse("B")) == 1
        assert bcc_upper_bound(rose_map(f)) >= 1

    @pytest.mark.parametrize("name", ["Phi", "Psi", "Phi2"])
    def test_soundness_random_concatenations(self, auts, name):
        f = auts[name]
        bound = bcc_upper_bound(rose_map(f))
        rng = random.Random(11)
        worst = 0
        for _ in range(10_000 // 3 + 1):
            a = random_word(rng, f.rank, rng.randint(1, 12))
            b = random_word(rng, f.rank, rng.randint(1, 12))
            if a[-1] == -b[0]:
                continue
            worst = max(worst, _cancellation(f, a, b))
        assert worst <= bound

    @settings(max_examples=30)
    @given(automorphism_images(3, 5), st.randoms(use_true_random=False))
    def test_soundness_random_automorphisms(self, imgs, rng):
        f = Automorphism.from_strings(imgs)
        bound = bcc_upper_bound(rose_map(f))
        for _ in range(100):
            a = random_word(rng, 3, rng.randint(1, 10))
            b = random_word(rng, 3, rng.randint(1, 10))
            if a[-1] != -b[0]:
                assert _cancellation(f, a, b) <= bound

    def test_endomorphism_rejected(self):
        with pytest.raises(NonStabilizing):
            bcc_upper_bound(rose_map(Automorphism.from_strings(["aa", "b"])))


class TestCritical:
    def test_test_doubles(self):
        assert critical_value(3, 2) == 6
        assert isinstance(critical_value(3, 2), Fraction)
        assert critical_value(1, Fraction(3, 2)) == 4

    def test_neg_stratum(self, auts):
        m = rose_map(auts["Psi"])
        neg = filtration(m).strata[1]
        with pytest.raises(ValueError, match="λ = 1"):
            critical_constant(m, neg)

    def test_supplied_bcc(self):
        s = Stratum([0], np.array([[2]]), "EG", 2)
        assert critical_constant(None, s, bcc=3) == 6

    def test_phi_value(self, auts):
        m = rose_map(auts["Phi"])
        s = filtration(m).strata[0]
        assert abs(critical_constant(m, s) - 10 / (PHI_ROOT - 1)) < 1e-6

    def test_lambda_at_most_one(self):
        with pytest.raises(ValueError):
            critical_value(3, 1)
