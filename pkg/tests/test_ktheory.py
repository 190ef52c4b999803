from __future__ import annotations

import itertools
import random
from fractions import Fraction

from cstark.categoricity import iso_hom
from cstark.coding import index_of_rational
from cstark.concrete import Element
from cstark.cstar import StandardComplex, ZeroAlgebra, matrix_algebra
from cstark.exact import rank
from cstark.ktheory import (D_of_map, G_of_map, K0_of_map, align_D, build_D, cone_decide,
                            cone_semidecide, enumerate_projections, grothendieck,
                            groth_kernel_decide, identity_hom, k0, k0_nonunital, k0_to_rational, k0_value,
                            k1, scalar_hom, unit_label)
from cstark.presentations import (Answer, GpWord, KernelAnswer, SgWord, WordMap, positive_integers,
                                  rational_group)
from cstark.uhf import exact_trace, presentation_from_dims

IN, NOT = KernelAnswer.IN_KERNEL, KernelAnswer.NOT_IN_KERNEL


def uhf(base: int):
    return presentation_from_dims(lambda j: base ** j, f"{base}^inf")


def elem_rank(e: Element) -> int:
    # rank of a matrix-backed projection, computed from its exact matrix
    return sum(rank(p.mat) for p in e.parts)


def word_rank(D, w: SgWord) -> int:
    return sum(elem_rank(D.projection(g)) for g in w.gens)


def word_trace(D, w: SgWord) -> Fraction:
    # trace (Tr ⊗ τ), recomputed from the element of each letter
    return sum((exact_trace(D.projection(g)).re for g in w.gens), Fraction(0))


def random_word(rng, top: int, length: int = 3) -> SgWord:
    return SgWord(tuple(rng.randrange(top) for _ in range(rng.randint(1, length))))


# ---------------------------------------------------------------------------
# projections and D(A)


def test_enumeration_hits_all_classes():
    C = enumerate_projections(StandardComplex(), 1)
    assert {elem_rank(C.element(k)) for k in range(4)} == {0, 1}
    M = enumerate_projections(matrix_algebra(2), 1)
    assert {elem_rank(M.element(k)) for k in range(6)} == {0, 1, 2}
    A, _ = uhf(2)
    E = enumerate_projections(A, 1)
    traces = {exact_trace(E.element(k)).re for k in range(40)}
    assert {Fraction(a, 8) for a in range(9)} <= traces
    for k in range(40):
        e = E.element(k)
        assert e * e == e and e.adjoint() == e


def test_D_of_complex_numbers_is_rank_decided():
    D = build_D(StandardComplex())
    rng = random.Random(1)
    for _ in range(60):
        w1, w2 = random_word(rng, 12), random_word(rng, 12)
        expect = IN if word_rank(D, w1) == word_rank(D, w2) else NOT
        assert D.equal(w1, w2) is expect
    w = SgWord((5,))
    assert D.equal(w, w) is IN


def test_D_of_two_inf_is_trace_decided():
    A, _ = uhf(2)
    D = build_D(A)
    rng = random.Random(2)
    agree = 0
    for _ in range(50):
        w1, w2 = random_word(rng, 30), random_word(rng, 30)
        expect = IN if word_trace(D, w1) == word_trace(D, w2) else NOT
        assert D.equal(w1, w2) is expect
        agree += 1
    assert agree == 50


def test_chain_method_is_sound():
    D = build_D(StandardComplex(), method="chain")
    x = SgWord((3,))
    assert D.equal(x, x) is IN
    rng = random.Random(5)
    for _ in range(10):
        w1, w2 = random_word(rng, 6, 2), random_word(rng, 6, 2)
        got = D.equal(w1, w2, 100)
        if got is IN:
            assert word_rank(D, w1) == word_rank(D, w2)
        assert got is not NOT


def test_D_of_unital_map_sends_one_to_identity_matrix():
    C, M2 = StandardComplex(), matrix_algebra(2)
    D0, D1 = build_D(C), build_D(M2)
    one = next(g for g in range(10) if D0.generator(g)[0] == 1 and elem_rank(D0.projection(g)) == 1)
    img = D_of_map(scalar_hom(M2), D0, D1)(SgWord((one,)))
    assert word_rank(D1, img) == 2


def test_align_D_variants():
    A, _ = uhf(2)
    D0, D1 = build_D(A, variant="initial"), build_D(A, variant="final")
    F = align_D(D0, D1)
    rng = random.Random(8)
    for _ in range(20):
        w = random_word(rng, 25)
        assert word_trace(D1, F(w)) == word_trace(D0, w)
    F_same = align_D(D0, D0)
    for _ in range(20):
        w = random_word(rng, 25)
        assert D0.equal(F_same(w), w) is IN
    C0, C1 = build_D(StandardComplex()), build_D(StandardComplex(), variant="final")
    G = align_D(C0, C1)
    for _ in range(20):
        w = random_word(rng, 12)
        assert word_rank(C1, G(w)) == word_rank(C0, w)


# ---------------------------------------------------------------------------
# Grothendieck groups


def npos(a: int) -> SgWord:
    # x_i labels i + 1 in (N+, +)
    return SgWord((a - 1,))


def test_grothendieck_of_positive_integers_exhaustive():
    G = grothendieck(positive_integers(), cancellative=True)
    rng = range(1, 7)
    for a, b, c, d in itertools.product(rng, repeat=4):
        got = G.equal(G.pair_label(npos(a), npos(b)), G.pair_label(npos(c), npos(d)))
        assert got is (IN if a + d == b + c else NOT)


def test_grothendieck_search_mode_is_sound():
    G = grothendieck(positive_integers(), cancellative=False)
    assert G.kernel.mode == "ce"
    for a, b, c, d in itertools.product(range(1, 4), repeat=4):
        got = G.equal(G.pair_label(npos(a), npos(b)), G.pair_label(npos(c), npos(d)), 64)
        assert got is (IN if a + d == b + c else KernelAnswer.UNKNOWN)


def test_gamma_identities():
    G = grothendieck(positive_integers(), cancellative=True)
    g = G.gamma(npos(3))
    assert G.equal(g * g.inverse(), GpWord(())) is IN
    decide = groth_kernel_decide(positive_integers())
    lhs = G.gamma(npos(2)) * G.gamma(npos(1)).inverse()
    rhs = G.gamma(npos(3)) * G.gamma(npos(2)).inverse()
    assert decide(lhs, rhs) is IN
    assert decide(G.gamma(npos(1)) * G.gamma(npos(1)).inverse(), GpWord(())) is IN


def int_value(G, w: GpWord) -> int:
    a, b = G.components(w)
    return sum(g + 1 for g in a) - sum(g + 1 for g in b)


def test_G_of_doubling_map():
    S = positive_integers()
    G = grothendieck(S, cancellative=True)
    double = WordMap(lambda w: w * w, S, S, "double")
    F = G_of_map(double, G, G)
    ident = G_of_map(WordMap(lambda w: w, S, S, "id"), G, G)
    rng = random.Random(4)
    for _ in range(40):
        a, b = rng.randint(1, 9), rng.randint(1, 9)
        w = G.pair_label(npos(a), npos(b))
        if rng.random() < 0.5:
            w = w.inverse()
        assert int_value(G, F(w)) == 2 * int_value(G, w)
        assert G.equal(ident(w), w) is IN


def test_grothendieck_of_D_two_inf_matches_trace_differences():
    A, _ = uhf(2)
    K = k0(A)
    D = K.S
    rng = random.Random(6)
    for _ in range(100):
        u1, v1, u2, v2 = (random_word(rng, 30, 2) for _ in range(4))
        d1 = word_trace(D, u1) - word_trace(D, v1)
        d2 = word_trace(D, u2) - word_trace(D, v2)
        got = K.equal(K.pair_label(u1, v1), K.pair_label(u2, v2))
        assert got is (IN if d1 == d2 else NOT)


def test_universal_property_with_trace_map():
    A, _ = uhf(2)
    K = k0(A)
    D = K.S
    Q = rational_group()

    def phi(w: SgWord) -> GpWord:
        return GpWord.gen(index_of_rational(word_trace(D, w)))

    psi = K.universal(phi, Q)
    rng = random.Random(9)
    for _ in range(50):
        w = random_word(rng, 30)
        assert Q.equal(psi(K.gamma(w)), phi(w)) is IN


# ---------------------------------------------------------------------------
# K_0


def test_cone_on_complex_numbers():
    K = k0(StandardComplex())
    one = unit_label(K)
    assert cone_semidecide(K, one).answer is Answer.YES
    assert cone_decide(K, one.inverse()).answer is Answer.NO


def test_cone_on_matrix_algebra_exhaustive():
    M2 = matrix_algebra(2)
    K = k0(M2)
    D = K.S
    letters = {}
    for g in range(40):
        n, _ = D.generator(g)
        if n == 1:
            letters.setdefault(word_rank(D, SgWord((g,))), g)
    assert set(letters) == {0, 1, 2}
    for u_ranks in itertools.product((1, 2), repeat=2):
        for v_ranks in itertools.product((0, 1, 2), repeat=1):
            u = SgWord(tuple(letters[r] for r in u_ranks))
            v = SgWord(tuple(letters[r] for r in v_ranks))
            for w in (K.pair_label(u, v), K.pair_label(v, u)):
                a, b = K.components(w)
                diff = word_rank(D, SgWord(a)) - word_rank(D, SgWord(b))
                if abs(diff) > 4:
                    continue
                res = cone_decide(K, w)
                assert res.answer is (Answer.YES if diff >= 0 else Answer.NO)


def test_k0_to_rational_examples_and_homomorphism():
    A, cert = uhf(2)
    K = k0(A)
    D = K.S
    assert k0_to_rational(K, unit_label(K)).value == 1
    half = next(g for g in range(60) if D.generator(g)[0] == 1
                and D.projection(g) == cert.unit(1, 1, 1))
    assert k0_to_rational(K, K.gamma(SgWord((half,)))).value == Fraction(1, 2)
    p = K.gamma(SgWord((7,)))
    assert k0_to_rational(K, p * p.inverse()).value == 0
    rng = random.Random(10)
    for _ in range(100):
        w1 = K.pair_label(random_word(rng, 30, 2), random_word(rng, 30, 2))
        w2 = K.pair_label(random_word(rng, 30, 2), random_word(rng, 30, 2))
        assert k0_to_rational(K, w1 * w2).value == k0_to_rational(K, w1).value + k0_to_rational(K, w2).value
        same = k0_to_rational(K, w1).value == k0_to_rational(K, w2).value
        assert K.equal(w1, w2) is (IN if same else NOT)


def test_k0_functoriality():
    C = StandardComplex()
    A2, c2 = uhf(2)
    A4, c4 = uhf(4)
    KC, K2, K4 = k0(C), k0(A2), k0(A4)
    psi = scalar_hom(A2)
    phi = iso_hom(c2, c4, depth=8)
    both = K0_of_map(psi.then(phi), KC, K4)
    step = K0_of_map(psi, KC, K2)
    step2 = K0_of_map(phi, K2, K4)
    ident = K0_of_map(identity_hom(A2), K2, K2)
    rng = random.Random(11)
    for _ in range(30):
        w = KC.pair_label(random_word(rng, 6, 2), random_word(rng, 6, 2))
        assert K4.equal(both(w), step2(step(w))) is IN
        v = K2.pair_label(random_word(rng, 20, 2), random_word(rng, 20, 2))
        assert K2.equal(ident(v), v) is IN


# ---------------------------------------------------------------------------
# nonunital K_0 and K_1


def test_k0_nonunital_of_complex_numbers():
    G = k0_nonunital(StandardComplex())
    K = G.ambient
    # values are (A-part, scalar part) trace differences in K_0(C ⊕ C) ≅ Z^2
    for i in range(20):
        m = G.member(i)
        assert G.quotient.equal(G.projection(m), GpWord(())) is IN
        assert k0_value(K, m)[1] == 0
    # the kernel is infinite cyclic: a member with nonzero A-part value appears
    i = 0
    while not any(k0_value(K, G.member(i, 5000))):
        i += 1
    assert abs(k0_value(K, G.member(i)).__getitem__(0).re) == 1
    outside = next(GpWord.gen(g) for g in range(2000) if k0_value(K, GpWord.gen(g))[1] != 0)
    assert G.members.contains(outside) is Answer.NO


def test_k0_nonunital_of_zero_algebra_is_trivial():
    G = k0_nonunital(ZeroAlgebra())
    for i in range(3):
        assert G.ambient.equal(G.member(i), GpWord(())) is IN


def test_k0_nonunital_of_matrix_algebra():
    G = k0_nonunital(matrix_algebra(2))
    for i in range(4):
        m = G.member(i)
        assert G.quotient.equal(G.projection(m), GpWord(())) is IN


def test_k1_group_laws():
    G = k1(StandardComplex())
    e = GpWord(())
    assert G.presentation.kernel(e, e, 10) is IN
    w = GpWord.gen(3)
    assert G.presentation.kernel(w * w.inverse(), e, 10) is IN
    assert G.confirm_identity(0, 1000) is IN
