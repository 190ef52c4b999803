"""Presentations of C*-algebras and their rational points.

A presentation is a sequence of special points a_0, a_1, ...; rational points
are *-polynomials without constant term and with Q(i) coefficients in them.
Presentations shipped here are *element backed*: every special point has an
exact realization (see :mod:`cstark.concrete`), so norms are computable to any
precision.  :class:`OraclePresentation` wraps user-supplied norm oracles.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Iterator, Sequence

from .coding import (gaussian_of, index_of_gaussian, nonempty_seq_index,
                     nonempty_seq_of, pair, seq_index, seq_of, triple, unpair,
                     untriple)
from .concrete import DimChain, Element, MatrixPart, PathPart, StagedPart
from .errors import CauchyViolation, DimensionError, InputError
from .exact import ONE, DyadicInterval, ExactMatrix, GaussianRational

Letter = tuple  # (generator index, starred?)


# ---------------------------------------------------------------------------
# *-polynomials


class StarPoly:
    """Constant-free *-polynomial with Q(i) coefficients.

    ``terms`` is a tuple of (coefficient, monomial) where a monomial is a
    nonempty tuple of (generator, starred) letters.  Terms are normalized:
    like monomials merged, zero coefficients dropped, monomials sorted.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        acc: dict[tuple, GaussianRational] = {}
        for c, mono in terms:
            mono = tuple((int(g), bool(st)) for g, st in mono)
            if not mono:
                raise ValueError("rational points have no constant term")
            c = GaussianRational.of(c)
            acc[mono] = acc.get(mono, GaussianRational(0)) + c
        self.terms = tuple((c, m) for m, c in sorted(acc.items()) if c)
        self._hash = None

    @classmethod
    def gen(cls, g: int, star: bool = False) -> "StarPoly":
        return cls([(ONE, ((g, star),))])

    @classmethod
    def zero(cls) -> "StarPoly":
        return cls(())

    def __add__(self, other: "StarPoly") -> "StarPoly":
        return StarPoly(self.terms + other.terms)

    def __neg__(self) -> "StarPoly":
        return StarPoly((-c, m) for c, m in self.terms)

    def __sub__(self, other: "StarPoly") -> "StarPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, StarPoly):
            return StarPoly((a * b, m + n) for a, m in self.terms for b, n in other.terms)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "StarPoly":
        c = GaussianRational.of(c)
        return StarPoly((c * a, m) for a, m in self.terms)

    def adjoint(self) -> "StarPoly":
        return StarPoly((c.conj(), tuple((g, not st) for g, st in reversed(m)))
                        for c, m in self.terms)

    @property
    def star(self) -> "StarPoly":
        return self.adjoint()

    def generators(self) -> set[int]:
        return {g for _, m in self.terms for g, _ in m}

    def degree(self) -> int:
        return max((len(m) for _, m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def substitute(self, mapping: Callable[[int], "StarPoly"]) -> "StarPoly":
        """Replace each generator g by the polynomial mapping(g)."""
        out = StarPoly.zero()
        cache: dict[tuple, StarPoly] = {}
        for c, mono in self.terms:
            acc = None
            for g, st in mono:
                key = (g, st)
                p = cache.get(key)
                if p is None:
                    p = mapping(g)
                    p = p.adjoint() if st else p
                    cache[key] = p
                acc = p if acc is None else acc * p
            out = out + acc.scale(c)
        return out

    def evaluate(self, value: Callable[[int], Element], zero: Element) -> Element:
        total = None
        cache: dict[tuple, Element] = {}
        for c, mono in self.terms:
            acc = None
            for g, st in mono:
                key = (g, st)
                v = cache.get(key)
                if v is None:
                    v = value(g)
                    v = v.adjoint() if st else v
                    cache[key] = v
                acc = v if acc is None else acc * v
            term = acc.scale(c)
            total = term if total is None else total + term
        return zero if total is None else total

    def __eq__(self, other):
        return isinstance(other, StarPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self):
        return f"StarPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, m in self.terms:
            mono = "*".join(f"a{g}^*" if st else f"a{g}" for g, st in m)
            if c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def poly_of_index(n: int) -> StarPoly:
    """The n-th rational point in the fixed (surjective) enumeration."""
    terms = []
    for t in seq_of(n):
        c, mcode = unpair(t)
        mono = tuple((L // 2, L % 2 == 1) for L in nonempty_seq_of(mcode))
        terms.append((gaussian_of(c), mono))
    return StarPoly(terms)


def index_of_poly(p: StarPoly) -> int:
    codes = []
    for c, m in p.terms:
        mcode = nonempty_seq_index([2 * g + (1 if st else 0) for g, st in m])
        codes.append(pair(index_of_gaussian(c), mcode))
    return seq_index(codes)


def enumerate_rational_points(A: "CPresentation | None" = None, start: int = 0) -> Iterator[StarPoly]:
    """All rational points, by index; the order does not depend on ``A``."""
    n = start
    while True:
        yield poly_of_index(n)
        n += 1


# ---------------------------------------------------------------------------
# norm oracles


MODES = ("computable", "right_ce", "left_ce", "none")


def weaker(a: str, b: str) -> str:
    """Meet in the mode lattice computable > {right_ce, left_ce} > none."""
    if a == b:
        return a
    if a == "computable":
        return b
    if b == "computable":
        return a
    return "none"


@dataclass(frozen=True)
class NormOracle:
    """``query(point, k_or_stage, fuel)`` -> rational or None (Unknown)."""

    mode: str
    query: Callable[[StarPoly, int, int], Fraction | None]

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown norm mode {self.mode!r}")

    def __call__(self, point, k: int, fuel: int = 10**6):
        if isinstance(point, int):
            point = poly_of_index(point)
        return self.query(point, k, fuel)


# ---------------------------------------------------------------------------
# presentations


class CPresentation:
    """Base class.  Element-backed subclasses implement ``special_point``."""

    name = "A"
    mode = "computable"
    element_backed = True
    unital = False

    def __init__(self):
        self._cache: dict[StarPoly, Element] = {}
        self._special: dict[int, Element] = {}

    # -- element-backed interface
    def _special_point(self, k: int) -> Element:  # pragma: no cover - abstract
        raise NotImplementedError

    def special_point(self, k: int) -> Element:
        v = self._special.get(k)
        if v is None:
            v = self._special_point(k)
            if len(self._special) > 50000:
                self._special.clear()
            self._special[k] = v
        return v

    def zero_element(self, amp: int = 1) -> Element:
        return self.special_point(0).zero_like(amp)

    def zero_index(self) -> int | None:
        """Index of a special point equal to 0, if there is one."""
        return 0

    def evaluate(self, p: StarPoly) -> Element:
        if not self.element_backed:
            raise TypeError(f"{self.name} has no exact realization")
        v = self._cache.get(p)
        if v is None:
            v = p.evaluate(self.special_point, self.zero_element())
            if len(self._cache) > 20000:
                self._cache.clear()
            self._cache[p] = v
        return v

    def value(self, x) -> Element:
        """Element for a StarPoly, a rational-point index or an Element."""
        if isinstance(x, Element):
            return x
        if isinstance(x, int):
            x = poly_of_index(x)
        return self.evaluate(x)

    def norm(self, x, k: int) -> DyadicInterval:
        """Certified interval of width <= 2^-k containing the norm."""
        return self.value(x).norm(k)

    @property
    def norm_oracle(self) -> NormOracle:
        def query(p, k, fuel):
            iv = self.norm(p, k + 1)
            return iv.mid
        return NormOracle(self.mode, query)

    def distance(self, x, y, k: int) -> DyadicInterval:
        return (self.value(x) - self.value(y)).norm(k)

    # -- unit
    def unit_point(self) -> StarPoly | None:
        return None

    def unit_element(self, amp: int = 1) -> Element:
        if not self.unital:
            raise TypeError(f"{self.name} is not unital")
        return self.evaluate(self.unit_point()).unit_like(amp)

    # -- structure used by searches
    def coupling(self) -> tuple:
        """Groups of part indices that unitary moves must treat together.

        Each entry is (part indices, level); level 'flat' allows rotations of
        individual matrix coordinates, 'amp' only of amplification indices.
        """
        return ()

    def dense_points(self) -> Iterator[StarPoly]:
        """A dense sequence of rational points suited to searches."""
        n = 0
        while True:
            terms = []
            for t in seq_of(n):
                c, s = unpair(t)
                terms.append((gaussian_of(c), ((s, False),)))
            yield StarPoly(terms)
            n += 1

    def point_of(self, e: Element) -> StarPoly | None:
        """A rational point with value e, when one is easy to write down."""
        return None

    def finite_dimension(self) -> int | None:
        """Complex dimension when finite and known."""
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _scalar_element(z) -> Element:
    return Element((MatrixPart(1, 1, ExactMatrix.scalar(z)),), 1)


class StandardComplex(CPresentation):
    """C with a_k = the k-th Gaussian rational."""

    name = "C"
    unital = True

    def _special_point(self, k):
        return _scalar_element(gaussian_of(k))

    def unit_point(self):
        return StarPoly.gen(index_of_gaussian(1))

    def coupling(self):
        return (((0,), "flat"),)

    def point_of(self, e):
        z = e.parts[0].mat[0, 0]
        return StarPoly.gen(index_of_gaussian(z)) if z else StarPoly.zero()

    def dense_points(self):
        k = 0
        while True:
            yield StarPoly.gen(k) if k else StarPoly.zero()
            k += 1

    def finite_dimension(self):
        return 1


@dataclass(frozen=True)
class MatrixPointCode:
    """Decoding of a special-point index k of M_n(A): (point, row, col), 1-based rows."""

    k: int
    n: int
    point: int
    row: int
    col: int

    @classmethod
    def decode(cls, n: int, k: int) -> "MatrixPointCode":
        a, b, c = untriple(k)
        return cls(k, n, a, 1 + b % n, 1 + c % n)

    @staticmethod
    def encode(n: int, point: int, row: int, col: int) -> int:
        if not (1 <= row <= n and 1 <= col <= n):
            raise DimensionError(f"position ({row},{col}) outside M_{n}")
        return triple(point, row - 1, col - 1)


class Amplified(CPresentation):
    """M_n(A) with special points a_{φ0(k)} E_{φ1(n,k), φ2(n,k)}."""

    def __init__(self, base: CPresentation, n: int):
        super().__init__()
        if n < 1:
            raise ValueError("amplification needs n >= 1")
        self.base = base
        self.n = n
        self.mode = base.mode
        self.element_backed = base.element_backed
        self.unital = base.unital
        self.name = f"M_{n}({base.name})" if n > 1 else base.name

    def _special_point(self, k):
        code = MatrixPointCode.decode(self.n, k)
        return self.base.special_point(code.point).place(self.n, code.row - 1, code.col - 1).reblock()

    def zero_element(self, amp=1):
        z = self.base.zero_element(self.n).reblock()
        return z if amp == 1 else z.zero_like(amp * z.amp)

    def zero_index(self):
        z = self.base.zero_index()
        return None if z is None else triple(z, 0, 0)

    def lift(self, p: StarPoly, row: int, col: int) -> StarPoly:
        """Rational point of M_n(A) equal to p ⊗ E_{row,col} (1-based)."""
        terms = []
        for c, mono in p.terms:
            letters = []
            for pos, (g, st) in enumerate(mono):
                r, s = (row, col) if pos == 0 else (col, col)
                if st:
                    letters.append((MatrixPointCode.encode(self.n, g, s, r), True))
                else:
                    letters.append((MatrixPointCode.encode(self.n, g, r, s), False))
            terms.append((c, tuple(letters)))
        return StarPoly(terms)

    def unit_point(self):
        u = self.base.unit_point()
        out = StarPoly.zero()
        for r in range(1, self.n + 1):
            out = out + self.lift(u, r, r)
        return out

    def coupling(self):
        return self.base.coupling()

    def norm(self, x, k):
        if not self.element_backed:
            raise TypeError("amplification of an oracle-only presentation has no exact norm")
        return super().norm(x, k)

    def _is_matrix_algebra(self):
        return isinstance(self.base, StandardComplex)

    def point_of(self, e):
        if not self._is_matrix_algebra():
            return None
        M = e.parts[0].mat
        if M.rows != self.n:
            return None
        terms = []
        for (i, j), v in sorted(M.items()):
            terms.append((v, ((MatrixPointCode.encode(self.n, index_of_gaussian(1), i + 1, j + 1), False),)))
        return StarPoly(terms)

    def matrix_of(self, p) -> ExactMatrix:
        return self.value(p).parts[0].mat

    def dense_points(self):
        if not self._is_matrix_algebra():
            yield from super().dense_points()
            return
        n2 = self.n * self.n
        yield StarPoly.zero()
        h = 1
        while True:
            # all matrices whose largest entry index is exactly h
            for idxs in iproduct(range(h + 1), repeat=n2):
                if max(idxs) != h:
                    continue
                M = ExactMatrix.from_entries(self.n, self.n, [gaussian_of(i) for i in idxs])
                yield self.point_of(Element((MatrixPart(1, self.n, M),), 1))
            h += 1

    def finite_dimension(self):
        d = self.base.finite_dimension()
        return None if d is None else d * self.n * self.n


def amplify(A: CPresentation, n: int) -> CPresentation:
    return A if n == 1 else Amplified(A, n)


def matrix_algebra(m: int) -> Amplified:
    """Standard presentation of M_m(C) (also for m = 1)."""
    return Amplified(StandardComplex(), m)


class ProductPresentation(CPresentation):
    """A × B with special points (a_i, b_j) indexed by <i, j>."""

    def __init__(self, A: CPresentation, B: CPresentation):
        super().__init__()
        self.A, self.B = A, B
        self.mode = weaker(A.mode, B.mode)
        self.element_backed = A.element_backed and B.element_backed
        self.unital = A.unital and B.unital
        self.name = f"{A.name} x {B.name}"

    def _special_point(self, k):
        i, j = unpair(k)
        a = self.A.special_point(i)
        b = self.B.special_point(j)
        return Element(a.parts + b.parts, 1)

    def zero_index(self):
        a, b = self.A.zero_index(), self.B.zero_index()
        return None if a is None or b is None else pair(a, b)

    def components(self, p: StarPoly) -> tuple[StarPoly, StarPoly]:
        left = p.substitute(lambda g: StarPoly.gen(unpair(g)[0]))
        right = p.substitute(lambda g: StarPoly.gen(unpair(g)[1]))
        return left, right

    def unit_point(self):
        ua, ub = self.A.unit_point(), self.B.unit_point()
        single = [p.terms[0][1][0][0] for p in (ua, ub)
                  if len(p.terms) == 1 and p.terms[0][0] == 1 and len(p.terms[0][1]) == 1
                  and not p.terms[0][1][0][1]]
        if len(single) == 2:
            return StarPoly.gen(pair(single[0], single[1]))
        # (1, 0) + (0, 1) using zero special points on the other side
        za, zb = self.A.zero_index(), self.B.zero_index()
        if za is None or zb is None:
            raise NotImplementedError("unit of this product has no simple rational point")
        left = ua.substitute(lambda g: StarPoly.gen(pair(g, zb)))
        right = ub.substitute(lambda g: StarPoly.gen(pair(za, g)))
        return left + right

    def coupling(self):
        na = len(self.A.zero_element().parts)
        out = list(self.A.coupling())
        for idx, level in self.B.coupling():
            out.append((tuple(i + na for i in idx), level))
        return tuple(out)

    def norm(self, x, k):
        if self.element_backed:
            return super().norm(x, k)
        raise TypeError("use norm_oracle for oracle-backed products")

    @property
    def norm_oracle(self) -> NormOracle:
        if self.element_backed:
            return super().norm_oracle
        oa, ob = self.A.norm_oracle, self.B.norm_oracle

        def query(p, k, fuel):
            left, right = self.components(p)
            ra, rb = oa(left, k, fuel), ob(right, k, fuel)
            if ra is None or rb is None:
                return None
            return max(ra, rb)
        return NormOracle(self.mode, query)

    def finite_dimension(self):
        a, b = self.A.finite_dimension(), self.B.finite_dimension()
        return None if a is None or b is None else a + b


def product(A: CPresentation, B: CPresentation) -> ProductPresentation:
    return ProductPresentation(A, B)


class Unitized(CPresentation):
    """Ã with special points (a_m, α_k) indexed by <m, k>.

    Realized as A ⊕ C via (a, α) -> (a + α1, α); for a nonunital A this is
    only available when every part can absorb scalars (paths, zero algebra).
    """

    def __init__(self, A: CPresentation):
        super().__init__()
        if not A.element_backed:
            raise NotImplementedError("unitization needs an element-backed presentation")
        self.A = A
        self.mode = A.mode
        self.unital = True
        self.name = f"({A.name})~"
        self._nparts = len(A.zero_element().parts)

    def _special_point(self, k):
        m, j = unpair(k)
        a = self.A.special_point(m)
        alpha = ExactMatrix.identity(a.amp).scale(gaussian_of(j))
        shifted = a.add_scalar(alpha)
        return Element(shifted.parts + (MatrixPart(a.amp, 1, alpha),), a.amp)

    def zero_element(self, amp=1):
        z = self.A.zero_element(amp)
        return Element(z.parts + (MatrixPart(z.amp, 1, ExactMatrix.zeros(z.amp)),), z.amp)

    def zero_index(self):
        z = self.A.zero_index()
        return None if z is None else pair(z, 0)

    def embed(self, p: StarPoly) -> StarPoly:
        """ι: A -> Ã on rational points, a -> (a, 0)."""
        return p.substitute(lambda g: StarPoly.gen(pair(g, 0)))

    def unit_point(self):
        m = self.A.zero_index()
        one = index_of_gaussian(1)
        if m is not None:
            return StarPoly.gen(pair(m, one))
        return StarPoly.gen(pair(0, one)) - StarPoly.gen(pair(0, 0))

    def scalar_part(self, e: Element) -> Element:
        """π: Ã -> C, (a, α) -> α."""
        return Element((e.parts[-1],), e.amp)

    def coupling(self):
        if self.A.unital or self._nparts == 0:
            return tuple(self.A.coupling()) + (((self._nparts,), "flat"),)
        return ((tuple(range(self._nparts + 1)), "amp"),)

    def finite_dimension(self):
        d = self.A.finite_dimension()
        return None if d is None else d + 1


def unitize(A: CPresentation) -> Unitized:
    return Unitized(A)


def polygonal_curve(m: int) -> tuple[tuple[Fraction, ...], tuple[GaussianRational, ...]]:
    """The m-th rational polygonal curve vanishing at 0 and 1.

    seq_of(m) = (v_1..v_L) gives values gaussian_of(v_i) at the knots i/(L+1).
    """
    vals = seq_of(m)
    L = len(vals)
    knots = tuple(Fraction(i, L + 1) for i in range(L + 2))
    values = (GaussianRational(0),) + tuple(gaussian_of(v) for v in vals) + (GaussianRational(0),)
    return knots, values


def curve_index(values: Sequence) -> int:
    """Index of the curve with the given interior values on an even grid."""
    return seq_index([index_of_gaussian(v) for v in values])


class Suspension(CPresentation):
    """SA = C_0((0,1), A) with special points f_m ⊗ a_k indexed by <m, k>."""

    def __init__(self, A: CPresentation):
        super().__init__()
        z = A.zero_element()
        if not A.element_backed or any(not isinstance(p, MatrixPart) for p in z.parts):
            raise NotImplementedError("suspension is shipped for matrix-backed algebras")
        self.A = A
        self.mode = A.mode
        self.unital = False
        self.name = f"S({A.name})"

    def _special_point(self, k):
        m, j = unpair(k)
        a = self.A.special_point(j)
        knots, vals = polygonal_curve(m)
        parts = []
        for p in a.parts:
            values = [p.mat.scale(v) for v in vals]
            parts.append(PathPart.polygonal(p.amp, p.block, knots, values))
        return Element(tuple(parts), a.amp)

    def zero_element(self, amp=1):
        z = self.A.zero_element(amp)
        return Element(tuple(PathPart.constant(p.amp, p.block, p.mat) for p in z.parts), amp)

    def coupling(self):
        n = len(self.A.zero_element().parts)
        return ((tuple(range(n)), "amp"),)


def suspend(A: CPresentation) -> Suspension:
    return Suspension(A)


class DirectLimit(CPresentation):
    """lim M_{n_j} along canonical embeddings; special points are stage matrix units.

    Index k = <j, <b, c>> names E_{1+b mod n_j, 1+c mod n_j} at stage j.
    """

    def __init__(self, chain: DimChain, name: str = "UHF"):
        super().__init__()
        self.chain = chain
        self.name = name
        self.unital = True

    def _special_point(self, k):
        j, b, c = untriple(k)
        n = self.chain.n(j)
        return Element((StagedPart(self.chain, j, 1, ExactMatrix.unit(n, 1 + b % n, 1 + c % n)),), 1)

    def unit_index(self, j: int, r: int, s: int) -> int:
        """Index of ψ_j(E_{r,s}) (1-based r, s)."""
        n = self.chain.n(j)
        if not (1 <= r <= n and 1 <= s <= n):
            raise DimensionError(f"E_{r},{s} not in stage {j} of size {n}")
        return triple(j, r - 1, s - 1)

    def zero_element(self, amp=1):
        return Element((StagedPart(self.chain, 0, amp, ExactMatrix.zeros(amp * self.chain.n(0))),), amp)

    def zero_index(self):
        return None

    def unit_point(self):
        out = StarPoly.zero()
        for r in range(1, self.chain.n(0) + 1):
            out = out + StarPoly.gen(self.unit_index(0, r, r))
        return out

    def coupling(self):
        return (((0,), "flat"),)

    def point_of(self, e):
        part = e.parts[0]
        if e.amp != 1:
            return None
        terms = []
        for (i, j), v in sorted(part.mat.items()):
            terms.append((v, ((self.unit_index(part.stage, i + 1, j + 1), False),)))
        return StarPoly(terms)

    def stage_point(self, j: int, M: ExactMatrix) -> StarPoly:
        return self.point_of(Element((StagedPart(self.chain, j, 1, M),), 1))

    def finite_dimension(self):
        return None


class ZeroAlgebra(CPresentation):
    """The zero algebra; every special point is 0."""

    name = "0"
    unital = True

    def _special_point(self, k):
        return Element((), 1)

    def zero_element(self, amp=1):
        return Element((), amp)

    def unit_point(self):
        return StarPoly.gen(0)

    def finite_dimension(self):
        return 0


class OraclePresentation(CPresentation):
    """A presentation known only through a user-supplied norm oracle."""

    element_backed = False

    def __init__(self, oracle: NormOracle, name: str = "A", unit: StarPoly | None = None):
        super().__init__()
        self.oracle = oracle
        self.mode = oracle.mode
        self.name = name
        self._unit = unit
        self.unital = unit is not None

    @property
    def norm_oracle(self):
        return self.oracle

    def norm(self, x, k):
        if self.mode != "computable":
            raise TypeError(f"norms of a {self.mode} presentation are not computable")
        if isinstance(x, int):
            x = poly_of_index(x)
        r = self.oracle(x, k + 1)
        if r is None:
            raise InputError("norm oracle returned Unknown")
        eps = Fraction(1, 1 << (k + 1))
        return DyadicInterval(max(r - eps, Fraction(0)), r + eps)

    def unit_point(self):
        return self._unit


# ---------------------------------------------------------------------------
# computable points


class ComputablePoint:
    """A point given by approximations: ``approx(k)`` within 2^-k of the point.

    Approximations may be StarPolys, rational-point indices, or Elements.
    """

    def __init__(self, presentation: CPresentation, approximator: Callable[[int], object],
                 name: str = ""):
        self.presentation = presentation
        self._approx = approximator
        self._memo: dict[int, object] = {}
        self.name = name

    @classmethod
    def exact(cls, presentation: CPresentation, point, name: str = "") -> "ComputablePoint":
        return cls(presentation, lambda k: point, name)

    def approx(self, k: int):
        v = self._memo.get(k)
        if v is None:
            v = self._approx(k)
            if isinstance(v, int) and not isinstance(v, bool):
                v = poly_of_index(v)
            self._memo[k] = v
        return v

    def value(self, k: int) -> Element:
        return self.presentation.value(self.approx(k))

    def check_cauchy(self, k_max: int, precision: int | None = None) -> list[int]:
        """Raise CauchyViolation at the first certified violation below k_max.

        Returns the levels where the comparison stayed undecided at the
        working precision (empty when everything was certified).
        """
        undecided = []
        for k in range(k_max):
            bound = Fraction(1, 1 << k) + Fraction(1, 1 << (k + 1))
            prec = precision if precision is not None else k + 4
            d = (self.value(k) - self.value(k + 1)).norm(prec)
            if d.lo > bound:
                raise CauchyViolation(k, d.lo, bound)
            if d.hi > bound:
                undecided.append(k)
        return undecided

    def __repr__(self):
        return f"<ComputablePoint {self.name or ''} of {self.presentation.name}>"


def computable_point(A: CPresentation, approximator: Callable[[int], object]) -> ComputablePoint:
    return ComputablePoint(A, approximator)
