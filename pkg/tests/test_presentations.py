from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstark.coding import (index_of_rational, nonempty_seq_index, nonempty_seq_of, pair,
                           rational_of, seq_index, seq_of, triple, unpair, untriple)
from cstark.presentations import (Answer, CeSubset, GpWord, KernelAnswer, SgWord,
                                  check_equivalence, index_word, integer_lattice, integers,
                                  kernel_of_map, positive_integers, product_presentation,
                                  rational_group, reduce, subgroup_presentation, word_index)


def test_pairing_is_a_bijection_on_a_square():
    seen = {pair(a, b) for a in range(40) for b in range(40)}
    assert len(seen) == 1600
    for n in range(500):
        assert pair(*unpair(n)) == n
        assert triple(*untriple(n)) == n


def test_sequence_codes_round_trip():
    for n in range(300):
        assert seq_index(seq_of(n)) == n
        assert nonempty_seq_index(nonempty_seq_of(n)) == n


def test_rational_enumeration_is_onto_small_fractions():
    hits = {rational_of(n) for n in range(4000)}
    for p in range(-5, 6):
        for q in range(1, 6):
            assert Fraction(p, q) in hits
            assert rational_of(index_of_rational(Fraction(p, q))) == Fraction(p, q)


@pytest.mark.parametrize("kind", ["semigroup", "group"])
def test_word_enumeration_is_bijective(kind):
    seen = set()
    for n in range(3000):
        w = index_word(n, kind)
        assert word_index(w) == n
        seen.add(w)
    assert len(seen) == 3000


letters = st.lists(st.tuples(st.integers(0, 6), st.sampled_from([1, -1])), max_size=8)


@given(letters)
def test_group_word_index_round_trip(ls):
    w = reduce(GpWord.free(ls))
    assert index_word(word_index(w), "group") == w


@given(st.lists(st.integers(0, 9), min_size=1, max_size=6))
def test_semigroup_word_index_round_trip(gens):
    w = SgWord(tuple(gens))
    assert index_word(word_index(w), "semigroup") == w


def test_free_reduction():
    w = GpWord.free([(1, 1), (2, 1), (2, -1), (1, -1), (3, 1)])
    assert reduce(w) == GpWord.gen(3)
    assert (GpWord.gen(1) * GpWord.gen(1).inverse()) == GpWord(())
    with pytest.raises(ValueError):
        GpWord(((1, 1), (1, -1)))


def test_positive_integer_kernel():
    N = positive_integers()
    assert N.kernel(SgWord((0, 2)), SgWord((1, 1)), 1) is KernelAnswer.IN_KERNEL
    assert N.kernel(SgWord((0,)), SgWord((1,)), 1) is KernelAnswer.NOT_IN_KERNEL
    assert N.label_map(SgWord((4,))) == 5


def test_kernels_are_equivalence_relations():
    words = [index_word(n, "group") for n in range(40)]
    assert check_equivalence(integers(), words) == []
    assert check_equivalence(integer_lattice(), words) == []
    assert check_equivalence(rational_group(), words) == []


def test_product_presentation_pairs():
    N = positive_integers()
    P = product_presentation(N, N)
    for a, b in product(range(1, 4), repeat=2):
        u, v = SgWord((a - 1,)), SgWord((b - 1,))
        w = P.pair_label(u, v)
        assert P.label_map(w) == (a, b)
        assert P.split(w) == (u, v)
    w = P.pair_label(SgWord((0,)), SgWord((1,))) * P.pair_label(SgWord((2,)), SgWord((0,)))
    assert P.label_map(w) == (1 + 3, 2 + 1)
    assert P.kernel(w, P.pair_label(SgWord((3,)), SgWord((2,))), 1) is KernelAnswer.IN_KERNEL


def test_ce_subset_enumeration_and_kernel_of_map():
    Z = integers()
    H = kernel_of_map(lambda w: GpWord(tuple((g, s) for g, s in w.letters for _ in range(1))), Z)
    # words with exponent sum 0 under the all-ones labelling
    first = H.first(6, 200)
    assert all(Z.label_map(w) == 0 for w in first)
    assert first[0] == GpWord(())
    S = subgroup_presentation(Z, H)
    x = S.member(3)
    assert Z.label_map(S.inclusion(GpWord.gen(3))) == Z.label_map(x) == 0
    assert S.kernel(GpWord.gen(2), GpWord(()), 50) is KernelAnswer.IN_KERNEL


def test_ce_subset_semidecision_reports_unknown():
    def contains(w, fuel):
        return Answer.YES if fuel > 3 and len(w) % 2 == 0 else Answer.UNKNOWN
    C = CeSubset(contains, "group")
    assert C.contains(GpWord(()), 1) is Answer.UNKNOWN
    assert C.contains(GpWord(()), 10) is Answer.YES


def test_group_words_need_group_presentations():
    with pytest.raises(TypeError):
        subgroup_presentation(positive_integers(), CeSubset(lambda w, f: Answer.YES, "semigroup"))
