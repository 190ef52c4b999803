"""Concrete realizations of elements of the shipped C*-algebras.

An :class:`Element` of M_amp(A) is a tuple of parts, one per direct summand of
a faithful realization of A:

* :class:`MatrixPart` -- a constant matrix, for summands M_block(C);
* :class:`StagedPart` -- a matrix at some stage of a chain M_{n_0} ⊂ M_{n_1} ⊂ ...;
* :class:`PathPart`   -- a piecewise polynomial matrix-valued function on [0, 1].

The norm of an element is the maximum of the part norms, each certified.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DimensionError, DivisibilityError
from .exact import (DyadicInterval, ExactMatrix, GaussianRational,
                    certified_opnorm, sqrt_upper)


class DimChain:
    """A divisibility chain n_0 | n_1 | ... given by a rule, memoized."""

    def __init__(self, rule: Callable[[int], int], name: str = ""):
        self._rule = rule
        self._memo: dict[int, int] = {}
        self.name = name

    def n(self, j: int) -> int:
        v = self._memo.get(j)
        if v is None:
            v = int(self._rule(j))
            if v < 1:
                raise ValueError(f"stage {j} has nonpositive dimension {v}")
            if j > 0 and v % self.n(j - 1):
                raise DivisibilityError(f"n_{j - 1} = {self.n(j - 1)} does not divide n_{j} = {v}")
            self._memo[j] = v
        return v

    def ratio(self, j: int, J: int) -> int:
        if J < j:
            raise ValueError("cannot embed into an earlier stage")
        return self.n(J) // self.n(j)

    def prefix(self, count: int) -> list[int]:
        return [self.n(j) for j in range(count)]


def embed_blockwise(X: ExactMatrix, small: int, big: int) -> ExactMatrix:
    """Apply the canonical unital embedding M_small -> M_big to each block of X.

    X is an amp x amp array of small x small blocks.
    """
    if big % small:
        raise DivisibilityError(f"{small} does not divide {big}")
    if small == big:
        return X
    amp = X.rows // small
    copies = big // small
    d = {}
    for (i, j), v in X.items():
        p, u = divmod(i, small)
        q, w = divmod(j, small)
        for ell in range(copies):
            d[(p * big + ell * small + u, q * big + ell * small + w)] = v
    return ExactMatrix._raw(amp * big, amp * big, d)


class Part:
    """Common interface of part types."""

    amp: int

    def norm(self, k: int) -> DyadicInterval:  # pragma: no cover - abstract
        raise NotImplementedError

    def slot(self):
        """Data that must agree for two parts to be combined."""
        raise NotImplementedError


@dataclass(frozen=True)
class MatrixPart(Part):
    amp: int
    block: int
    mat: ExactMatrix

    def __post_init__(self):
        if self.mat.shape != (self.amp * self.block, self.amp * self.block):
            raise DimensionError("matrix part has wrong size")

    def slot(self):
        return ("matrix", self.block)

    def _new(self, mat, amp=None):
        return MatrixPart(self.amp if amp is None else amp, self.block, mat)

    def add(self, other):
        return self._new(self.mat + other.mat)

    def sub(self, other):
        return self._new(self.mat - other.mat)

    def mul(self, other):
        return self._new(self.mat @ other.mat)

    def scale(self, c):
        return self._new(self.mat.scale(c))

    def adjoint(self):
        return self._new(self.mat.adjoint())

    def add_scalar(self, alpha: ExactMatrix):
        return self._new(self.mat + alpha.kron_right_identity(self.block))

    def place(self, n, r, s):
        size = self.amp * self.block
        return self._new(self.mat.place(n * size, n * size, r * size, s * size), self.amp * n)

    def pad(self, extra):
        size = (self.amp + extra) * self.block
        return self._new(self.mat.pad(size), self.amp + extra)

    def direct_sum(self, other):
        return self._new(ExactMatrix.block_diag(self.mat, other.mat), self.amp + other.amp)

    def zero_like(self, amp):
        return MatrixPart(amp, self.block, ExactMatrix.zeros(amp * self.block))

    def unit_like(self, amp):
        return MatrixPart(amp, self.block, ExactMatrix.identity(amp * self.block))

    def matrix(self) -> ExactMatrix:
        return self.mat

    def norm(self, k):
        return certified_opnorm(self.mat, k)

    def trace(self) -> GaussianRational:
        """Unnormalized over the amplification, normalized on each block."""
        return self.mat.trace_sum() / self.block

    def key(self):
        return ("M", self.block, self.mat.key())

    def rotated(self, planes, c, s):
        m = self.mat
        for i, j in planes:
            m = m.rotate_plane(i, j, c, s)
        return self._new(m)

    def index_size(self, level: str) -> int:
        return self.amp * self.block if level == "flat" else self.amp

    def flat_planes(self, i, j, level):
        if level == "flat":
            return [(i, j)]
        b = self.block
        return [(i * b + u, j * b + u) for u in range(b)]

    def diagonal_support(self) -> set[int]:
        return {i for (i, _), _v in self.mat.items()} | {j for (_, j), _v in self.mat.items()}


@dataclass(frozen=True)
class StagedPart(Part):
    chain: DimChain
    stage: int
    amp: int
    mat: ExactMatrix

    def __post_init__(self):
        n = self.chain.n(self.stage) * self.amp
        if self.mat.shape != (n, n):
            raise DimensionError("staged part has wrong size")

    def slot(self):
        return ("staged", id(self.chain))

    @property
    def block(self) -> int:
        return self.chain.n(self.stage)

    def at(self, J: int) -> "StagedPart":
        if J == self.stage:
            return self
        return StagedPart(self.chain, J, self.amp,
                          embed_blockwise(self.mat, self.block, self.chain.n(J)))

    def _aligned(self, other):
        J = max(self.stage, other.stage)
        return self.at(J), other.at(J)

    def _new(self, mat, stage=None, amp=None):
        return StagedPart(self.chain, self.stage if stage is None else stage,
                          self.amp if amp is None else amp, mat)

    def add(self, other):
        a, b = self._aligned(other)
        return a._new(a.mat + b.mat)

    def sub(self, other):
        a, b = self._aligned(other)
        return a._new(a.mat - b.mat)

    def mul(self, other):
        a, b = self._aligned(other)
        return a._new(a.mat @ b.mat)

    def scale(self, c):
        return self._new(self.mat.scale(c))

    def adjoint(self):
        return self._new(self.mat.adjoint())

    def add_scalar(self, alpha: ExactMatrix):
        return self._new(self.mat + alpha.kron_right_identity(self.block))

    def place(self, n, r, s):
        size = self.amp * self.block
        return self._new(self.mat.place(n * size, n * size, r * size, s * size), amp=self.amp * n)

    def pad(self, extra):
        return self._new(self.mat.pad((self.amp + extra) * self.block), amp=self.amp + extra)

    def direct_sum(self, other):
        a, b = self._aligned(other)
        return a._new(ExactMatrix.block_diag(a.mat, b.mat), amp=a.amp + b.amp)

    def zero_like(self, amp):
        return StagedPart(self.chain, 0, amp, ExactMatrix.zeros(amp * self.chain.n(0)))

    def unit_like(self, amp):
        return StagedPart(self.chain, 0, amp, ExactMatrix.identity(amp * self.chain.n(0)))

    def matrix(self) -> ExactMatrix:
        return self.mat

    def norm(self, k):
        return certified_opnorm(self.mat, k)

    def trace(self) -> GaussianRational:
        return self.mat.trace_sum() / self.block

    def key(self):
        # canonical form: lowest stage from which the matrix is an embedding
        low = self.lowest()
        return ("S", id(self.chain), low.stage, low.mat.key())

    def lowest(self) -> "StagedPart":
        """The same element written at the earliest stage possible."""
        for j in range(self.stage):
            small = self.chain.n(j)
            cand = _restrict_blockwise(self.mat, small, self.block)
            if cand is not None:
                return StagedPart(self.chain, j, self.amp, cand)
        return self

    def rotated(self, planes, c, s):
        m = self.mat
        for i, j in planes:
            m = m.rotate_plane(i, j, c, s)
        return self._new(m)

    def index_size(self, level):
        return self.amp * self.block if level == "flat" else self.amp

    def flat_planes(self, i, j, level):
        if level == "flat":
            return [(i, j)]
        b = self.block
        return [(i * b + u, j * b + u) for u in range(b)]

    def diagonal_support(self) -> set[int]:
        return {i for (i, _), _v in self.mat.items()} | {j for (_, j), _v in self.mat.items()}


def _restrict_blockwise(X: ExactMatrix, small: int, big: int) -> ExactMatrix | None:
    """Inverse of :func:`embed_blockwise` when X lies in its range."""
    copies = big // small
    amp = X.rows // big
    d = {}
    for (i, j), v in X.items():
        p, rest_i = divmod(i, big)
        q, rest_j = divmod(j, big)
        li, u = divmod(rest_i, small)
        lj, w = divmod(rest_j, small)
        if li != lj:
            return None
        d.setdefault((p * small + u, q * small + w), {})[li] = v
    out = {}
    for key, copies_seen in d.items():
        vals = set(copies_seen.values())
        if len(copies_seen) != copies or len(vals) != 1:
            return None
        out[key] = vals.pop()
    return ExactMatrix(amp * small, amp * small, out)


def _poly_mul(p: Sequence[ExactMatrix], q: Sequence[ExactMatrix]) -> tuple[ExactMatrix, ...]:
    out: list[ExactMatrix | None] = [None] * (len(p) + len(q) - 1)
    for a, x in enumerate(p):
        if x.is_zero():
            continue
        for b, y in enumerate(q):
            if y.is_zero():
                continue
            t = x @ y
            out[a + b] = t if out[a + b] is None else out[a + b] + t
    size = p[0].rows
    return _poly_trim(tuple(ExactMatrix.zeros(size) if m is None else m for m in out))


def _poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1].is_zero():
        p.pop()
    return tuple(p)


def _poly_add(p, q, sign=1):
    n = max(len(p), len(q))
    size = p[0].rows
    z = ExactMatrix.zeros(size)
    out = []
    for d in range(n):
        a = p[d] if d < len(p) else z
        b = q[d] if d < len(q) else z
        out.append(a + b if sign > 0 else a - b)
    return _poly_trim(out)


@dataclass(frozen=True)
class PathPart(Part):
    """t -> sum_d coeffs[i][d] t^d on [knots[i], knots[i+1]]."""

    amp: int
    block: int
    knots: tuple[Fraction, ...]
    pieces: tuple[tuple[ExactMatrix, ...], ...]

    def __post_init__(self):
        if self.knots[0] != 0 or self.knots[-1] != 1 or len(self.pieces) != len(self.knots) - 1:
            raise ValueError("path knots must run from 0 to 1 with one piece per segment")

    @classmethod
    def polygonal(cls, amp: int, block: int, knots: Sequence[Fraction],
                  values: Sequence[ExactMatrix]) -> "PathPart":
        """Linear interpolation of matrix values at the knots."""
        knots = tuple(Fraction(t) for t in knots)
        pieces = []
        for i in range(len(knots) - 1):
            t0, t1 = knots[i], knots[i + 1]
            v0, v1 = values[i], values[i + 1]
            slope = (v1 - v0).scale(Fraction(1) / (t1 - t0))
            const = v0 - slope.scale(t0)
            pieces.append(_poly_trim((const, slope)))
        return cls(amp, block, knots, tuple(pieces))

    @classmethod
    def constant(cls, amp: int, block: int, value: ExactMatrix) -> "PathPart":
        return cls(amp, block, (Fraction(0), Fraction(1)), ((value,),))

    def slot(self):
        return ("path", self.block)

    def _refine_to(self, knots):
        pieces = []
        for i in range(len(knots) - 1):
            mid = (knots[i] + knots[i + 1]) / 2
            seg = min(bisect_right(self.knots, mid) - 1, len(self.pieces) - 1)
            pieces.append(self.pieces[seg])
        return pieces

    def _merge(self, other, op):
        knots = tuple(sorted(set(self.knots) | set(other.knots)))
        a = self._refine_to(knots)
        b = other._refine_to(knots)
        return PathPart(self.amp, self.block, knots, tuple(op(x, y) for x, y in zip(a, b)))

    def add(self, other):
        return self._merge(other, lambda x, y: _poly_add(x, y))

    def sub(self, other):
        return self._merge(other, lambda x, y: _poly_add(x, y, -1))

    def mul(self, other):
        return self._merge(other, _poly_mul)

    def _map(self, f, amp=None):
        return PathPart(self.amp if amp is None else amp, self.block, self.knots,
                        tuple(tuple(f(c) for c in piece) for piece in self.pieces))

    def scale(self, c):
        return self._map(lambda m: m.scale(c))

    def adjoint(self):
        # coefficients are matrices; t is real so the adjoint acts coefficientwise
        return self._map(lambda m: m.adjoint())

    def add_scalar(self, alpha: ExactMatrix):
        shift = alpha.kron_right_identity(self.block)
        return PathPart(self.amp, self.block, self.knots,
                        tuple((piece[0] + shift,) + piece[1:] for piece in self.pieces))

    def place(self, n, r, s):
        size = self.amp * self.block
        return self._map(lambda m: m.place(n * size, n * size, r * size, s * size), self.amp * n)

    def pad(self, extra):
        return self._map(lambda m: m.pad((self.amp + extra) * self.block), self.amp + extra)

    def direct_sum(self, other):
        knots = tuple(sorted(set(self.knots) | set(other.knots)))
        a = self._refine_to(knots)
        b = other._refine_to(knots)
        pieces = []
        for x, y in zip(a, b):
            n = max(len(x), len(y))
            zx = ExactMatrix.zeros(x[0].rows)
            zy = ExactMatrix.zeros(y[0].rows)
            pieces.append(_poly_trim(tuple(
                ExactMatrix.block_diag(x[d] if d < len(x) else zx, y[d] if d < len(y) else zy)
                for d in range(n))))
        return PathPart(self.amp + other.amp, self.block, knots, tuple(pieces))

    def zero_like(self, amp):
        return PathPart.constant(amp, self.block, ExactMatrix.zeros(amp * self.block))

    def unit_like(self, amp):
        return PathPart.constant(amp, self.block, ExactMatrix.identity(amp * self.block))

    def at(self, t) -> ExactMatrix:
        t = Fraction(t)
        seg = min(max(bisect_right(self.knots, t) - 1, 0), len(self.pieces) - 1)
        acc = None
        for c in reversed(self.pieces[seg]):
            acc = c if acc is None else acc.scale(t) + c
        return acc

    def is_piecewise_affine(self) -> bool:
        return all(len(p) <= 2 for p in self.pieces)

    def norm(self, k):
        eps = Fraction(1, 1 << k)
        if self.is_piecewise_affine():
            # convexity on each affine segment: the sup is attained at a knot
            ivs = [certified_opnorm(self.at(t), k) for t in self.knots]
            return DyadicInterval(max(iv.lo for iv in ivs), max(iv.hi for iv in ivs))
        return self._branch_and_bound(k, eps)

    def _branch_and_bound(self, k, eps):
        lower = Fraction(0)
        work = []
        for i, piece in enumerate(self.pieces):
            work.append((self.knots[i], self.knots[i + 1], piece))
        upper = Fraction(0)
        prec = k + 2
        while True:
            next_work = []
            upper = Fraction(0)
            for a, b, piece in work:
                m = (a + b) / 2
                iv = certified_opnorm(self.at(m), prec)
                lower = max(lower, iv.lo)
                lip = _lipschitz_bound(piece, max(abs(a), abs(b)))
                ub = iv.hi + lip * (b - a) / 2
                if ub > lower + eps / 2:
                    next_work.append((a, m, piece))
                    next_work.append((m, b, piece))
                upper = max(upper, ub)
            upper = max(upper, lower)
            if upper - lower <= eps or not next_work:
                return DyadicInterval(lower, max(upper, lower))
            work = next_work

    def trace_at(self, t) -> GaussianRational:
        return self.at(t).trace_sum() / self.block

    def key(self):
        return ("P", self.block, self.knots,
                tuple(tuple(c.key() for c in piece) for piece in self.pieces))

    def rotated(self, planes, c, s):
        def rot(m):
            for i, j in planes:
                m = m.rotate_plane(i, j, c, s)
            return m
        return self._map(rot)

    def index_size(self, level):
        return self.amp * self.block if level == "flat" else self.amp

    def flat_planes(self, i, j, level):
        if level == "flat":
            return [(i, j)]
        b = self.block
        return [(i * b + u, j * b + u) for u in range(b)]

    def diagonal_support(self) -> set[int]:
        out = set()
        for piece in self.pieces:
            for m in piece:
                for (i, j), _v in m.items():
                    out.add(i)
                    out.add(j)
        return out

    def endpoint_values(self) -> tuple[ExactMatrix, ExactMatrix]:
        return self.at(0), self.at(1)


def _lipschitz_bound(piece, radius: Fraction) -> Fraction:
    total = Fraction(0)
    for d in range(1, len(piece)):
        fro = piece[d].frobenius2()
        if fro:
            total += d * sqrt_upper(fro, 16) * radius ** (d - 1)
    return total


@dataclass(frozen=True)
class Element:
    """An element of M_amp(A), realized part by part."""

    parts: tuple
    amp: int = 1

    def _zip(self, other, op):
        if len(self.parts) != len(other.parts) or self.amp != other.amp:
            raise DimensionError("elements of different algebras or sizes")
        return Element(tuple(op(a, b) for a, b in zip(self.parts, other.parts)), self.amp)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a.add(b))

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a.sub(b))

    def __mul__(self, other):
        return self._zip(other, lambda a, b: a.mul(b))

    __matmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Element":
        return Element(tuple(p.scale(c) for p in self.parts), self.amp)

    def adjoint(self) -> "Element":
        return Element(tuple(p.adjoint() for p in self.parts), self.amp)

    def add_scalar(self, alpha: ExactMatrix) -> "Element":
        """self + alpha ⊗ 1 for a scalar amp x amp matrix alpha."""
        return Element(tuple(p.add_scalar(alpha) for p in self.parts), self.amp)

    def place(self, n: int, r: int, s: int) -> "Element":
        """Element of M_{n*amp}(A) with self in block (r, s) (0-based)."""
        return Element(tuple(p.place(n, r, s) for p in self.parts), self.amp * n)

    def pad(self, extra: int) -> "Element":
        """self ⊕ 0_extra."""
        if extra == 0:
            return self
        return Element(tuple(p.pad(extra) for p in self.parts), self.amp + extra)

    def direct_sum(self, other: "Element") -> "Element":
        return Element(tuple(a.direct_sum(b) for a, b in zip(self.parts, other.parts)),
                       self.amp + other.amp)

    def reblock(self) -> "Element":
        """View an element of M_amp(A) as an amp-1 element of the algebra M_amp(A).

        Staged parts keep their amplification (their block size is tied to
        the chain), so elements containing them are returned unchanged.
        """
        if self.amp == 1 or any(isinstance(p, StagedPart) for p in self.parts):
            return self
        out = []
        for p in self.parts:
            if isinstance(p, MatrixPart):
                out.append(MatrixPart(1, p.amp * p.block, p.mat))
            else:
                out.append(PathPart(1, p.amp * p.block, p.knots, p.pieces))
        return Element(tuple(out), 1)

    def zero_like(self, amp: int | None = None) -> "Element":
        amp = self.amp if amp is None else amp
        return Element(tuple(p.zero_like(amp) for p in self.parts), amp)

    def unit_like(self, amp: int | None = None) -> "Element":
        amp = self.amp if amp is None else amp
        return Element(tuple(p.unit_like(amp) for p in self.parts), amp)

    def norm(self, k: int) -> DyadicInterval:
        if not self.parts:
            return DyadicInterval(0, 0)
        ivs = [p.norm(k) for p in self.parts]
        return DyadicInterval(max(iv.lo for iv in ivs), max(iv.hi for iv in ivs))

    def is_zero(self) -> bool:
        return all(_part_is_zero(p) for p in self.parts)

    def key(self):
        return (self.amp, tuple(p.key() for p in self.parts))

    def __eq__(self, other):
        return isinstance(other, Element) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def frobenius2(self) -> Fraction:
        """Sum over constant parts of squared Frobenius norms (path parts at knots)."""
        total = Fraction(0)
        for p in self.parts:
            if isinstance(p, PathPart):
                total += sum((p.at(t).frobenius2() for t in p.knots), Fraction(0))
            else:
                total += p.mat.frobenius2()
        return total

    def trace_vector(self) -> tuple:
        """Per-part traces; defined when no part is a path."""
        out = []
        for p in self.parts:
            if isinstance(p, PathPart):
                raise TypeError("no trace vector for path parts")
            out.append(p.trace())
        return tuple(out)


def _part_is_zero(p) -> bool:
    if isinstance(p, PathPart):
        return all(m.is_zero() for piece in p.pieces for m in piece)
    return p.mat.is_zero()
