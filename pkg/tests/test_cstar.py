from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import contains_mp, mp_opnorm
from cstark.coding import gaussian_of, index_of_gaussian, pair
from cstark.concrete import DimChain, Element, MatrixPart
from cstark.cstar import (ComputablePoint, DirectLimit, NormOracle, OraclePresentation,
                          StandardComplex, StarPoly, ZeroAlgebra, index_of_poly, matrix_algebra,
                          poly_of_index, polygonal_curve, product, suspend, unitize, weaker)
from cstark.errors import CauchyViolation, DimensionError
from cstark.exact import ExactMatrix, GaussianRational


def test_rational_point_enumeration_is_surjective():
    # several codes may name the same normalized polynomial; the index of a
    # polynomial always decodes back to it
    for n in range(400):
        p = poly_of_index(n)
        assert poly_of_index(index_of_poly(p)) == p


def test_star_poly_algebra():
    a, b = StarPoly.gen(1), StarPoly.gen(2)
    p = (a * b + a).scale(GaussianRational(0, 1))
    assert p.adjoint().adjoint() == p
    assert (a - a).is_zero()
    with pytest.raises(ValueError):
        StarPoly([(1, ())])


def test_complex_numbers():
    C = StandardComplex()
    for k in range(50):
        z = gaussian_of(k)
        iv = C.norm(StarPoly.gen(k), 20)
        assert iv.lo ** 2 <= z.abs2() <= iv.hi ** 2 or iv.lo == iv.hi
    one = C.unit_point()
    assert C.value(one).parts[0].mat == ExactMatrix.scalar(1)


def test_matrix_algebra_norms_match_svd():
    M2 = matrix_algebra(2)
    X = ExactMatrix.from_rows([[1, 2], [GaussianRational(0, 1), -1]])
    pt = M2.point_of(Element((MatrixPart(1, 2, X),), 1))
    iv = M2.norm(pt, 20)
    assert contains_mp(iv.lo, iv.hi, mp_opnorm(X))
    assert M2.matrix_of(M2.unit_point()) == ExactMatrix.identity(2)


def test_direct_limit_units_embed_blockwise():
    A = DirectLimit(DimChain(lambda j: 2 ** j), "2^inf")
    e11 = A.value(StarPoly.gen(A.unit_index(1, 1, 1)))
    e11_again = A.value(StarPoly.gen(A.unit_index(2, 1, 1)) + StarPoly.gen(A.unit_index(2, 3, 3)))
    assert e11 == e11_again
    diff = A.value(StarPoly.gen(A.unit_index(1, 1, 1)) - StarPoly.gen(A.unit_index(2, 1, 1)))
    assert diff.norm(10).contains(1)
    with pytest.raises(DimensionError):
        A.unit_index(1, 3, 1)


def test_products_unitization_and_suspension():
    C = StandardComplex()
    P = product(C, matrix_algebra(2))
    assert P.unital and len(P.zero_element().parts) == 2
    U = unitize(C)
    one = U.value(U.unit_point())
    assert one == one * one and not one.is_zero()
    S = suspend(C)
    assert not S.unital
    # f_m ⊗ a has norm max|curve| · |a|
    m = 5
    knots, vals = polygonal_curve(m)
    k = index_of_gaussian(GaussianRational(2))
    iv = S.norm(StarPoly.gen(pair(m, k)), 16)
    peak = max(v.abs2() for v in vals)
    assert iv.lo ** 2 <= 4 * peak <= iv.hi ** 2


def test_zero_algebra():
    Z = ZeroAlgebra()
    assert Z.value(StarPoly.gen(3)).is_zero()
    assert Z.norm(StarPoly.gen(3), 5).hi == 0


def test_mode_lattice():
    assert weaker("computable", "right_ce") == "right_ce"
    assert weaker("right_ce", "left_ce") == "none"


def test_oracle_presentation_uses_oracle():
    calls = []

    def q(p, k, fuel):
        calls.append(k)
        return Fraction(3)

    A = OraclePresentation(NormOracle("computable", q), "X")
    iv = A.norm(StarPoly.gen(0), 4)
    assert iv.contains(3) and calls
    B = OraclePresentation(NormOracle("right_ce", q), "Y")
    with pytest.raises(TypeError):
        B.norm(StarPoly.gen(0), 4)


def test_computable_point_cauchy_check():
    C = StandardComplex()
    half = index_of_gaussian(GaussianRational(Fraction(1, 2)))
    good = ComputablePoint.exact(C, StarPoly.gen(half))
    assert good.check_cauchy(6) == []
    bad = ComputablePoint(C, lambda k: StarPoly.gen(index_of_gaussian(GaussianRational(k % 2))))
    with pytest.raises(CauchyViolation):
        bad.check_cauchy(4)
