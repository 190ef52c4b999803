from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cstark.errors import DivisibilityError, OutOfBasinError
from cstark.exact import ExactMatrix, GaussianRational, certified_opnorm, rank
from cstark.matrix_fd import (CanonicalEmbedding, ExactProjection, FdPresentation,
                              canonical_embedding, diagonal_projection, mvn_decide_fd, projection_residual,
                              rank_trace, spectral_round_to_projection)


def sym_rank(M: ExactMatrix) -> int:
    def conv(z):
        return sympy.Rational(z.re.numerator, z.re.denominator) + sympy.I * sympy.Rational(
            z.im.numerator, z.im.denominator)
    return sympy.Matrix(M.rows, M.cols, lambda i, j: conv(M[i, j])).rank()


def rotated_projection(c: Fraction, s: Fraction) -> ExactMatrix:
    # rank-one projection onto (c, s) with c² + s² = 1
    return ExactMatrix.from_rows([[c * c, c * s], [c * s, s * s]])


def test_fd_presentation_round_trip():
    A = FdPresentation(3)
    M = ExactMatrix.from_rows([[1, 0, GaussianRational(0, 2)], [0, 0, 0], [Fraction(1, 3), 0, 1]])
    assert A.matrix(A.point(M)) == M


def test_exact_projection_rejects_non_projections():
    with pytest.raises(ValueError):
        ExactProjection(ExactMatrix.from_rows([[1, 1], [0, 0]]))


def test_canonical_embedding_blocks_and_composes():
    E = canonical_embedding(2, 6)
    X = ExactMatrix.from_rows([[1, 2], [3, 4]])
    Y = E(X)
    assert Y.rows == 6 and Y[0, 1] == 2 and Y[2, 3] == 2 and Y[4, 5] == 2 and Y[0, 3] == 0
    assert E.then(canonical_embedding(6, 12))(X) == canonical_embedding(2, 12)(X)
    with pytest.raises(DivisibilityError):
        CanonicalEmbedding(2, 5)


def test_rank_trace():
    p = diagonal_projection([1, 0, 1, 0])
    assert rank_trace(p) == (2, Fraction(1, 2))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=4), st.lists(st.integers(0, 1), min_size=1, max_size=4))
def test_mvn_decision_matches_rank_oracle(a, b):
    p, q = diagonal_projection(a), diagonal_projection(b)
    v = mvn_decide_fd(p, q)
    assert v.equivalent == (sum(a) == sum(b))
    if v.equivalent:
        n = max(len(a), len(b))
        assert v.witness.verify(p.matrix.pad(n), q.matrix.pad(n))


def test_mvn_witness_for_non_diagonal_projection():
    P = rotated_projection(Fraction(3, 5), Fraction(4, 5))
    Q = ExactMatrix.diag([0, 1])
    v = mvn_decide_fd(P, Q)
    assert v.equivalent and v.rank_p == 1 == sym_rank(P)
    assert v.witness.verify(P, Q)
    assert v.witness.matrix is not None


def test_spectral_rounding_exact_and_out_of_basin():
    P = rotated_projection(Fraction(3, 5), Fraction(4, 5))
    noisy = P + ExactMatrix.from_rows([[Fraction(1, 50), 0], [0, Fraction(-1, 40)]])
    r = spectral_round_to_projection(noisy)
    # eigenvectors are irrational here, so the result is an approximation
    proj = r.approx(20)
    assert proj.adjoint() == proj
    assert projection_residual(proj, 30) < Fraction(1, 1 << 20)
    assert certified_opnorm(proj - noisy, 30).hi <= r.distance_bound() + Fraction(1, 1 << 18)
    exact = spectral_round_to_projection(ExactMatrix.diag([Fraction(51, 50), Fraction(-1, 40)]))
    assert exact.exact is not None and exact.exact.matrix == ExactMatrix.diag([1, 0])
    with pytest.raises(OutOfBasinError):
        spectral_round_to_projection(ExactMatrix.scalar(Fraction(1, 2)).pad(2))


def test_spectral_rounding_random_perturbations():
    rng = random.Random(7)
    for _ in range(10):
        bits = [rng.randint(0, 1) for _ in range(3)]
        base = diagonal_projection(bits).matrix
        noise = ExactMatrix(3, 3, {(i, j): GaussianRational(Fraction(rng.randint(-3, 3), 200))
                                   for i in range(3) for j in range(3)})
        noise = (noise + noise.adjoint()).scale(GaussianRational(Fraction(1, 2)))
        r = spectral_round_to_projection(base + noise)
        X = r.approx(12)
        assert rank(X) == sum(bits) or r.exact is None
        if r.exact is not None:
            assert r.exact.matrix == base or rank(r.exact.matrix) == sum(bits)
