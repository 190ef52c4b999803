from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
import sympy

from cstark.concrete import DimChain
from cstark.cstar import StandardComplex, StarPoly, matrix_algebra
from cstark.errors import InputError
from cstark.exact import ExactMatrix
from cstark.ktheory import build_D
from cstark.machines import ALWAYS, EVENS, NEVER, BELOW_THREE, EnumerationCursor
from cstark.presentations import SgWord
from cstark.results import Unknown
from cstark.uhf import (QEpsilon, QEpsilonElement, Supernatural, exact_trace, extract_certificate,
                        find_unit, hard_supernatural, limit_norm, mvn_decide_uhf, nth_prime,
                        presentation_from_dims, presentation_from_supernatural,
                        supernatural_from_certificate, trace, valuation)


def two_inf():
    return presentation_from_supernatural(Supernatural.from_exponents({2: None}))


def u(A, j, r, s) -> StarPoly:
    return StarPoly.gen(A.unit_index(j, r, s))


def test_primes_and_valuations_against_sympy():
    for e in range(30):
        assert nth_prime(e) == sympy.prime(e + 1)
    for n in (1, 12, 1024, 3 ** 7 * 5, math.factorial(12)):
        for p in (2, 3, 5, 7):
            assert valuation(n, p) == sympy.multiplicity(p, n)


def test_presentation_dims():
    _, c = two_inf()
    assert c.dims(5) == [1, 2, 4, 8, 16]
    _, c = presentation_from_supernatural(Supernatural.from_exponents({}))
    assert c.dims(6) == [1] * 6
    _, c = presentation_from_supernatural(Supernatural.from_exponents({2: 1, 3: 1}))
    assert c.dims(6)[-1] == 6 and all(c.dims(8)[j + 1] % c.dims(8)[j] == 0 for j in range(7))


def test_supernatural_from_certificate_streams():
    _, c = two_inf()
    assert list(supernatural_from_certificate(c, 2, 6)) == [0, 1, 2, 3, 4, 5]
    assert list(supernatural_from_certificate(c, 3, 6)) == [0] * 6
    _, f = presentation_from_dims(lambda j: math.factorial(max(j, 1)), "factorial")
    stream = list(supernatural_from_certificate(f, 5, 11))
    assert stream[10] == sympy.multiplicity(5, math.factorial(10)) == 2
    assert stream == sorted(stream)


def test_monotonicity_is_enforced():
    bad = Supernatural(lambda j: {2: 3 - j if j < 3 else 0})
    with pytest.raises(InputError):
        bad.stage(1)


def test_limit_norms():
    A, c = two_inf()
    for j in range(4):
        assert limit_norm(c, u(A, j, 1, 1), 20).contains(1)
    assert limit_norm(c, u(A, 1, 1, 2) + u(A, 1, 2, 1), 20).contains(1)
    iv = limit_norm(c, u(A, 1, 1, 1) - u(A, 2, 1, 1), 20)
    assert iv.contains(1) and iv.width <= Fraction(1, 1 << 20)


def test_traces():
    A, c = two_inf()
    one = A.unit_point()
    assert trace(c, one, 10).contains(1)
    for j in range(11):
        iv = trace(c, u(A, j, 1, 1), 16)
        assert iv.contains(Fraction(1, 2 ** j)) and iv.width <= 3 * Fraction(1, 1 << 16)
    assert trace(c, u(A, 1, 1, 2), 10).contains(0)


def test_trace_additive_and_stage_valued():
    A, c = two_inf()
    rng = random.Random(3)
    for _ in range(20):
        j = rng.randint(0, 4)
        n = 2 ** j
        bits = [rng.randint(0, 1) for _ in range(n)]
        p = StarPoly.zero()
        for r, b in enumerate(bits, 1):
            if b:
                p = p + u(A, j, r, r)
        t = exact_trace(A.value(p))
        assert t == Fraction(sum(bits), n)
        q = u(A, j + 1, 1, 2)
        assert exact_trace(A.value(p + q)) == t + exact_trace(A.value(q))


def test_mvn_decide_uhf():
    A, c = two_inf()
    p = u(A, 2, 1, 1) + u(A, 2, 2, 2)
    assert mvn_decide_uhf(c, p, u(A, 1, 1, 1)).equivalent
    assert not mvn_decide_uhf(c, A.unit_point(), u(A, 1, 1, 1)).equivalent
    assert mvn_decide_uhf(c, p, p).equivalent
    # canonical re-staging: ψ_1(E11) equals ψ_2(E11 + E33)
    assert mvn_decide_uhf(c, u(A, 1, 1, 1), u(A, 2, 1, 1) + u(A, 2, 3, 3)).equivalent
    with pytest.raises(InputError):
        mvn_decide_uhf(c, u(A, 1, 1, 2), p)


def test_qepsilon():
    _, c = two_inf()
    Q = QEpsilon.of(c)
    m = Q.membership(Fraction(3, 8))
    assert isinstance(m, QEpsilonElement) and m.stage == 3
    assert isinstance(Q.membership(Fraction(1, 3), fuel=10 ** 4), Unknown)
    for x in (0, 1):
        assert isinstance(Q.membership(x), QEpsilonElement)
    a, b = Q.membership(Fraction(1, 4)), Q.membership(Fraction(-3, 8))
    assert Q.add(a, b).value == Fraction(-1, 8)
    assert Q.negate(b).value == Fraction(3, 8)
    assert Q.compare(a, b) == 1


def test_hard_supernatural_streams():
    eps = hard_supernatural([NEVER, ALWAYS, EVENS, BELOW_THREE])
    prev = {}
    for s in range(200):
        h = eps.stage(s)
        for p, e in prev.items():
            assert h.get(p, 0) >= e
        prev = h
    assert eps.stage(199).get(2, 0) == 0
    assert [eps.stage(s).get(3, 0) for s in range(6)] == [0, 1, 2, 3, 4, 5]
    cur = EnumerationCursor(EVENS)
    assert all(eps.stage(s).get(5, 0) == cur.count(s) for s in range(100))
    assert eps.stage(150).get(7, 0) == 3


def test_find_unit():
    A, c = two_inf()
    D = build_D(A)
    h = find_unit(A, _unit_word(D), D)
    assert A.value(h.approx(0)) == A.unit_element()
    C = StandardComplex()
    DC = build_D(C)
    hc = find_unit(C, _unit_word(DC), DC)
    assert C.value(hc.approx(3)) == C.unit_element()
    M2 = matrix_algebra(2)
    DM = build_D(M2)
    hm = find_unit(M2, _unit_word(DM), DM, fuel=4000)
    assert M2.value(hm.approx(0)) == M2.unit_element()


def _unit_word(D):
    # first generator whose projection is the unit of the algebra itself
    A = D.A
    for g in range(400):
        n, k = D.generator(g)
        if n == 1 and D.projection(g) == A.unit_element():
            return SgWord((g,))
    raise AssertionError("no unit generator")


def test_extract_certificate_two_inf():
    A, _ = two_inf()
    ext = extract_certificate(A, stages=5)
    assert ext.stages == 5
    assert all(math.log2(n).is_integer() for n in ext.dims)
    assert all(ext.dims[j + 1] % ext.dims[j] == 0 and ext.dims[j + 1] > ext.dims[j] for j in range(4))
    assert ext.verify_inv2() and ext.verify_matrix_units() and ext.verify_inv1()


def test_extract_certificate_finite_cases():
    ext = extract_certificate(StandardComplex(), stages=4)
    assert ext.complete and set(ext.to_certificate().dims(4)) == {1}
    ext = extract_certificate(matrix_algebra(2), stages=4)
    assert ext.dims[:2] == [1, 2] and ext.complete
    assert ext.verify_inv2() and ext.verify_matrix_units()


def test_dims_chain_rejects_non_divisibility():
    chain = DimChain(lambda j: [1, 2, 3][min(j, 2)], "bad")
    with pytest.raises(Exception):
        chain.n(2)
    assert ExactMatrix.unit(2, 1, 2)[0, 1] == 1
