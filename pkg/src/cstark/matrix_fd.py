"""Exact finite-dimensional algebra M_n(C): projections, rank, trace,
canonical unital embeddings and decidable Murray-von Neumann equivalence."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .concrete import Element, MatrixPart, embed_blockwise
from .cstar import Amplified, StandardComplex, StarPoly
from .errors import DimensionError, DivisibilityError, InputError, OutOfBasinError
from .exact import (ExactMatrix, GaussianRational, _hermitian_charpoly, certified_opnorm,
                    exact_sqrt, rank, roots_above, sturm_sequence)


class FdPresentation(Amplified):
    """Standard presentation of M_n(C); rational points are realized exactly."""

    def __init__(self, n: int):
        super().__init__(StandardComplex(), n)
        self.name = f"M_{n}(C)" if n > 1 else "C"

    def matrix(self, x) -> ExactMatrix:
        return self.value(x).parts[0].mat

    def point(self, M: ExactMatrix) -> StarPoly:
        if M.shape != (self.n, self.n):
            raise DimensionError(f"expected a {self.n}x{self.n} matrix")
        return self.point_of(self.element(M))

    def element(self, M: ExactMatrix) -> Element:
        return Element((MatrixPart(1, self.n, M),), 1)


@dataclass(frozen=True)
class ExactProjection:
    matrix: ExactMatrix

    def __post_init__(self):
        if not self.matrix.is_square or not self.matrix.is_projection():
            raise InputError("matrix is not an exact projection (p = p* = p^2)")

    @property
    def n(self) -> int:
        return self.matrix.rows

    def padded(self, n: int) -> "ExactProjection":
        if n < self.n:
            raise DimensionError("cannot pad to a smaller size")
        return ExactProjection(self.matrix.pad(n))

    def __str__(self):
        return str(self.matrix)


def _as_projection(p) -> ExactProjection:
    if isinstance(p, ExactProjection):
        return p
    return ExactProjection(p)


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class CanonicalEmbedding:
    """The unital embedding M_m -> M_n, X -> X ⊕ X ⊕ ... ⊕ X (n/m copies)."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if self.n % self.m:
            raise DivisibilityError(f"{self.m} does not divide {self.n}")

    def __call__(self, X: ExactMatrix) -> ExactMatrix:
        if X.shape != (self.m, self.m):
            raise DimensionError(f"expected a {self.m}x{self.m} matrix")
        return embed_blockwise(X, self.m, self.n)

    def then(self, other: "CanonicalEmbedding") -> "CanonicalEmbedding":
        if other.m != self.n:
            raise DimensionError("embeddings do not compose")
        return CanonicalEmbedding(self.m, other.n)


def canonical_embedding(m: int, n: int) -> CanonicalEmbedding:
    return CanonicalEmbedding(m, n)


# ---------------------------------------------------------------------------
# rank, trace, equivalence


def rank_trace(p) -> tuple[int, Fraction]:
    p = _as_projection(p)
    r = rank(p.matrix)
    return r, Fraction(r, p.n)


def _column(M: ExactMatrix, j: int) -> list[GaussianRational]:
    return [M[i, j] for i in range(M.rows)]


def _inner(u, v) -> GaussianRational:
    """u* v."""
    total = GaussianRational(0)
    for a, b in zip(u, v):
        if a and b:
            total = total + a.conj() * b
    return total


def orthogonal_basis(M: ExactMatrix) -> list[list[GaussianRational]]:
    """Rational Gram-Schmidt on the columns of M (no normalization)."""
    basis: list[list[GaussianRational]] = []
    norms: list[Fraction] = []
    for j in range(M.cols):
        v = _column(M, j)
        for u, nu in zip(basis, norms):
            c = _inner(u, v) / nu
            if c:
                v = [a - c * b for a, b in zip(v, u)]
        nv = _inner(v, v).re
        if nv:
            basis.append(v)
            norms.append(nv)
    return basis


def _outer(u, w) -> ExactMatrix:
    """u w*."""
    d = {}
    for i, a in enumerate(u):
        if not a:
            continue
        for j, b in enumerate(w):
            if b:
                d[(i, j)] = a * b.conj()
    return ExactMatrix(len(u), len(w), d)


@dataclass
class PartialIsometryWitness:
    """v = Σ_i d_i^{-1/2} M_i with M_i = u_i w_i*, the u_i (w_i) orthogonal.

    ``matrix`` holds v itself when every d_i is a rational square; otherwise
    v has irrational entries and only the exact term data is stored.
    """

    terms: list  # (d_i, M_i)
    matrix: ExactMatrix | None = None

    def vv_star(self) -> ExactMatrix:
        n = self.terms[0][1].rows if self.terms else 0
        out = ExactMatrix.zeros(n)
        for d, M in self.terms:
            out = out + (M @ M.adjoint()).scale(GaussianRational(1 / d))
        return out

    def v_star_v(self) -> ExactMatrix:
        n = self.terms[0][1].cols if self.terms else 0
        out = ExactMatrix.zeros(n)
        for d, M in self.terms:
            out = out + (M.adjoint() @ M).scale(GaussianRational(1 / d))
        return out

    def verify(self, p: ExactMatrix, q: ExactMatrix) -> bool:
        """Exact check of vv* = p and v*v = q (cross terms must vanish)."""
        for a, (_, Ma) in enumerate(self.terms):
            for b, (_, Mb) in enumerate(self.terms):
                if a != b and not ((Ma @ Mb.adjoint()).is_zero() and (Ma.adjoint() @ Mb).is_zero()):
                    return False
        if not self.terms:
            return p.is_zero() and q.is_zero()
        if self.matrix is not None:
            v = self.matrix
            if v @ v.adjoint() != p or v.adjoint() @ v != q:
                return False
        return self.vv_star() == p and self.v_star_v() == q


@dataclass
class FdVerdict:
    equivalent: bool
    rank_p: int
    rank_q: int
    witness: PartialIsometryWitness | None = None

    @property
    def verdict(self) -> str:
        return "equivalent" if self.equivalent else "inequivalent"


def mvn_decide_fd(p, q) -> FdVerdict:
    """p ~ q in M_n(C) iff the ranks agree; equal sizes after zero padding."""
    p, q = _as_projection(p), _as_projection(q)
    n = max(p.n, q.n)
    P, Q = p.matrix.pad(n), q.matrix.pad(n)
    rp, rq = rank(P), rank(Q)
    if rp != rq:
        return FdVerdict(False, rp, rq)
    if P == Q:
        us = orthogonal_basis(P)
        ws = us
    else:
        us, ws = orthogonal_basis(P), orthogonal_basis(Q)
    terms = []
    exact = ExactMatrix.zeros(n)
    rational = True
    for u, w in zip(us, ws):
        d = _inner(u, u).re * _inner(w, w).re
        M = _outer(u, w)
        terms.append((d, M))
        root = exact_sqrt(d)
        if root is None:
            rational = False
        else:
            exact = exact + M.scale(GaussianRational(1 / root))
    return FdVerdict(True, rp, rq, PartialIsometryWitness(terms, exact if rational else None))


# ---------------------------------------------------------------------------
# spectral rounding


def projection_residual(M: ExactMatrix, k: int = 20) -> Fraction:
    """Certified upper bound for max(‖M − M*‖, ‖M² − M‖)."""
    a = certified_opnorm(M - M.adjoint(), k).hi
    b = certified_opnorm(M @ M - M, k).hi
    return max(a, b)


def _matrix_poly(coeffs: Sequence[Fraction], H: ExactMatrix) -> ExactMatrix:
    n = H.rows
    out = ExactMatrix.zeros(n)
    for c in reversed(list(coeffs)):
        out = out @ H + ExactMatrix.identity(n).scale(GaussianRational(c))
    return out


def _poly_to_sympy(coeffs, x):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x,
                      domain="QQ")


def _sympy_to_fracs(poly) -> list[Fraction]:
    out = []
    for c in reversed(poly.all_coeffs()):
        c = sympy.Rational(c)
        out.append(Fraction(int(c.p), int(c.q)))
    return out


def _exact_spectral_projection(H: ExactMatrix) -> ExactMatrix | None:
    """Spectral projection of Hermitian H onto eigenvalues > 1/2, if rationally expressible.

    Succeeds when every irreducible factor of the characteristic polynomial
    has all its roots on one side of 1/2; the projection is a(H)·f_lo(H) for
    a Bezout identity a·f_lo + b·f_hi = 1.
    """
    x = sympy.Symbol("x")
    cp = _poly_to_sympy(_hermitian_charpoly(H), x)
    _, factors = sympy.factor_list(cp)
    half = Fraction(1, 2)
    hi = sympy.Poly(1, x, domain="QQ")
    lo = sympy.Poly(1, x, domain="QQ")
    for f, _ in factors:
        f = sympy.Poly(f, x, domain="QQ")
        fr = _sympy_to_fracs(f)
        deg = len(fr) - 1
        above = roots_above(sturm_sequence(fr), half)
        if sympy.Poly(f, x).eval(sympy.Rational(1, 2)) == 0:
            return None
        if above == deg:
            hi = hi * f
        elif above == 0:
            lo = lo * f
        else:
            return None
    if hi.degree() == 0:
        return ExactMatrix.zeros(H.rows)
    if lo.degree() == 0:
        return ExactMatrix.identity(H.rows)
    a, _, g = sympy.gcdex(lo, hi)
    if g.degree() != 0:  # pragma: no cover - distinct roots by construction
        return None
    a = sympy.Poly(a, x, domain="QQ") * (1 / g.LC())
    return _matrix_poly(_sympy_to_fracs(a), H) @ _matrix_poly(_sympy_to_fracs(lo), H)


def _round_dyadic(M: ExactMatrix, bits: int) -> ExactMatrix:
    scale = 1 << bits

    def r(x: Fraction) -> Fraction:
        return Fraction(round(x * scale), scale)

    d = {}
    for (i, j), v in M.items():
        z = GaussianRational(r(v.re), r(v.im))
        if z:
            d[(i, j)] = z
    return ExactMatrix(M.rows, M.cols, d)


@dataclass
class RoundedProjection:
    """A projection near the input: exact when possible, otherwise by approximation."""

    source: ExactMatrix
    residual: Fraction
    exact: ExactProjection | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def approx(self, k: int) -> ExactMatrix:
        """A rational Hermitian matrix within 2^-k of the projection."""
        if self.exact is not None:
            return self.exact.matrix
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        H = (self.source + self.source.adjoint()).scale(GaussianRational(Fraction(1, 2)))
        X = H
        bits = k + 12
        target = Fraction(1, 1 << (k + 3))
        for _ in range(200):
            if certified_opnorm(X @ X - X, k + 6).hi < target:
                break
            X2 = X @ X
            X = X2.scale(GaussianRational(3)) - (X2 @ X).scale(GaussianRational(2))
            X = _round_dyadic((X + X.adjoint()).scale(GaussianRational(Fraction(1, 2))), bits)
        self._cache[k] = X
        return X

    def distance_bound(self) -> Fraction:
        return 2 * self.residual


def spectral_round_to_projection(M: ExactMatrix, residual_precision: int = 20) -> RoundedProjection:
    """Round a near-projection to a projection.

    Requires max(‖M − M*‖, ‖M² − M‖) < 1/4 (certified); the result is within
    twice that residual of M.  Raises OutOfBasinError otherwise.
    """
    if not M.is_square:
        raise DimensionError("square matrix required")
    res = projection_residual(M, residual_precision)
    if res >= Fraction(1, 4):
        lo = max(certified_opnorm(M - M.adjoint(), residual_precision).lo,
                 certified_opnorm(M @ M - M, residual_precision).lo)
        if lo >= Fraction(1, 4) or res >= Fraction(1, 4):
            raise OutOfBasinError(f"residual {float(res):.6g} is not below 1/4")
    if M.is_projection():
        return RoundedProjection(M, Fraction(0), ExactProjection(M))
    H = (M + M.adjoint()).scale(GaussianRational(Fraction(1, 2)))
    P = _exact_spectral_projection(H)
    exact = ExactProjection(P) if P is not None else None
    return RoundedProjection(M, res, exact)


def diagonal_projection(bits: Sequence[int]) -> ExactProjection:
    return ExactProjection(ExactMatrix.diag([1 if b else 0 for b in bits]))
