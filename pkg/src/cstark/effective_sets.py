"""Rational balls, c.e. open and closed sets, weakly stable relation systems,
and the Murray-von Neumann chain search.

All strict inequalities are certified with interval arithmetic; when an
interval straddles a threshold the procedure refines, and gives up with an
``Unknown`` (never a guess) once its fuel is gone.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2
from typing import Callable, Iterator, Sequence

from .concrete import Element, PathPart
from .cstar import ComputablePoint, CPresentation, StarPoly
from .errors import InputError
from .exact import DyadicInterval, GaussianRational, norm_bounds
from .presentations import Answer
from .results import FuelMeter, Unknown


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << (-k))


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class RationalBall:
    """Open ball B(center; radius).  A tuple center lives in a power (A#)^N."""

    center: object
    radius: Fraction

    def __post_init__(self):
        r = Fraction(self.radius)
        if r <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", r)


def _as_tuple(center) -> tuple:
    return center if isinstance(center, tuple) else (center,)


def center_value(A: CPresentation, center) -> tuple[Element, ...]:
    return tuple(A.value(c) for c in _as_tuple(center))


def center_distance(A: CPresentation, c0, c1, k: int) -> DyadicInterval:
    """Certified max-distance between two (tuple) centers."""
    v0, v1 = center_value(A, c0), center_value(A, c1)
    if len(v0) != len(v1):
        raise ValueError("centers of different arity")
    ivs = [(a - b).norm(k) for a, b in zip(v0, v1)]
    return DyadicInterval(max(iv.lo for iv in ivs), max(iv.hi for iv in ivs))


def ball_subset(A: CPresentation, b0: RationalBall, b1: RationalBall, fuel: int = 8) -> Answer:
    """Formal inclusion: ‖c0 − c1‖ + r0 < r1, refined up to ``fuel`` times."""
    for step in range(max(fuel, 1)):
        k = 4 + 6 * step
        d = center_distance(A, b0.center, b1.center, k)
        if d.hi + b0.radius < b1.radius:
            return Answer.YES
        if d.lo + b0.radius >= b1.radius:
            return Answer.NO
    return Answer.UNKNOWN


class CeOpenSet:
    """Union of an enumerated family of rational balls."""

    def __init__(self, balls: Callable[[], Iterator[RationalBall]], name: str = ""):
        self._balls = balls
        self.name = name

    def balls(self) -> Iterator[RationalBall]:
        return self._balls()

    @classmethod
    def from_balls(cls, balls: Sequence[RationalBall], name: str = "") -> "CeOpenSet":
        items = list(balls)
        return cls(lambda: iter(items), name)

    @classmethod
    def whole_space(cls, arity: int = 1) -> "CeOpenSet":
        zero = tuple(StarPoly.zero() for _ in range(arity)) if arity > 1 else StarPoly.zero()

        def gen():
            m = 1
            while True:
                yield RationalBall(zero, Fraction(1 << m))
                m += 1
        return cls(gen, "whole space")


class CeClosedSet:
    """A closed set given by an enumeration of rational balls that meet it."""

    def __init__(self, balls: Callable[[], Iterator[RationalBall]], presentation: CPresentation,
                 arity: int = 1, name: str = ""):
        self._balls = balls
        self.presentation = presentation
        self.arity = arity
        self.name = name

    def balls(self) -> Iterator[RationalBall]:
        return self._balls()


# ---------------------------------------------------------------------------
# relation systems


@dataclass(frozen=True)
class Relation:
    """p(x_0..x_{N-1}) + constant·1 = 0."""

    poly: StarPoly
    constant: GaussianRational = GaussianRational(0)

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(self.poly.generators()))


@dataclass
class RelationSystem:
    relations: list
    bounds: list  # per-variable norm cap, or None
    modulus: Callable[[int], int]
    name: str = ""

    @property
    def arity(self) -> int:
        return len(self.bounds)


def projection_relations(modulus: Callable[[int], int] | None = None) -> RelationSystem:
    """x = x*, x² = x, ‖x‖ ≤ 1; default modulus g(k) = k + 3."""
    x = StarPoly.gen(0)
    rels = [Relation(x - x.adjoint()), Relation(x * x - x)]
    return RelationSystem(rels, [Fraction(1)], modulus or (lambda k: k + 3), "projections")


def matrix_unit_relations(n: int, unital: bool = True,
                          modulus: Callable[[int], int] | None = None) -> RelationSystem:
    """Relations of a system (x_rs) of n×n matrix units, variable (r,s) -> (r-1)n + (s-1).

    With ``unital`` the extra relation Σ x_rr = 1 is included.  Default modulus
    g(k) = k + 3 + ⌈log2(n + 1)⌉.
    """
    def v(r, s):
        return StarPoly.gen((r - 1) * n + (s - 1))

    rels = []
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            rels.append(Relation(v(r, s).adjoint() - v(s, r)))
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            for r2 in range(1, n + 1):
                for s2 in range(1, n + 1):
                    lhs = v(r, s) * v(r2, s2)
                    if s == r2:
                        lhs = lhs - v(r, s2)
                    rels.append(Relation(lhs))
    if unital:
        total = StarPoly.zero()
        for r in range(1, n + 1):
            total = total + v(r, r)
        rels.append(Relation(total, GaussianRational(-1)))
    extra = ceil(log2(n + 1))
    g = modulus or (lambda k: k + 3 + extra)
    return RelationSystem(rels, [Fraction(1)] * (n * n), g, f"matrix units {n}x{n}")


def relation_value(A: CPresentation, rel: Relation, values: Sequence[Element]) -> Element:
    zero = values[0].zero_like() if values else A.zero_element()
    e = rel.poly.evaluate(lambda j: values[j], zero)
    if rel.constant:
        e = e + A.unit_element(e.amp).scale(rel.constant)
    return e


class _Residual:
    """Lazily refined certified norm of a fixed element."""

    __slots__ = ("element", "zero", "iv", "prec", "lower")

    def __init__(self, element: Element):
        self.element = element
        self.zero = element.is_zero()
        self.iv = None
        self.prec = -1
        self.lower = Fraction(0)
        if not self.zero:
            for p in element.parts:
                if not isinstance(p, PathPart):
                    self.lower = max(self.lower, norm_bounds(p.mat, 32)[0])

    def below(self, bound: Fraction, max_prec: int = 80) -> bool | None:
        """Certified ‖e‖ < bound (True/False) or None when unresolved."""
        if self.zero:
            return True
        if self.lower >= bound:
            return False
        prec = max(self.prec, 4)
        while prec <= max_prec:
            if prec > self.prec:
                self.iv = self.element.norm(prec)
                self.prec = prec
            if self.iv.hi < bound:
                return True
            if self.iv.lo >= bound:
                return False
            prec += 8
        return None


class _TupleCheck:
    """The S_0 test for one tuple, with per-relation memoization."""

    def __init__(self, owner: "_SystemEvaluator", idx: tuple[int, ...]):
        self.owner = owner
        self.idx = idx

    def passes(self, k: int) -> bool:
        o = self.owner
        tol = _pow2(o.system.modulus(k))
        for j, cap in enumerate(o.system.bounds):
            if cap is None:
                continue
            if not o.bound_residual(j, self.idx[j]).below(cap + tol):
                return False
        for r, rel in enumerate(o.system.relations):
            sub = tuple(self.idx[v] for v in o.vars[r])
            if o.relation_residual(r, sub).below(tol) is not True:
                return False
        return True


class _SystemEvaluator:
    def __init__(self, A: CPresentation, system: RelationSystem, points: list):
        self.A = A
        self.system = system
        self.points = points
        self.vars = [rel.variables() for rel in system.relations]
        self._rel_cache: dict = {}
        self._bound_cache: dict = {}

    def value(self, i: int) -> Element:
        return self.A.value(self.points[i])

    def relation_residual(self, r: int, sub: tuple[int, ...]) -> _Residual:
        key = (r, sub)
        hit = self._rel_cache.get(key)
        if hit is None:
            rel = self.system.relations[r]
            vals = {v: self.value(i) for v, i in zip(self.vars[r], sub)}
            arity = self.system.arity
            zero = self.A.zero_element()
            values = [vals.get(j, zero) for j in range(arity)]
            hit = _Residual(relation_value(self.A, rel, values))
            self._rel_cache[key] = hit
        return hit

    def bound_residual(self, j: int, i: int) -> _Residual:
        key = i
        hit = self._bound_cache.get(key)
        if hit is None:
            hit = _Residual(self.value(i))
            self._bound_cache[key] = hit
        return hit


class _PointCursor:
    """Shared growing prefix of a presentation's dense point stream."""

    def __init__(self, A: CPresentation):
        self._it = A.dense_points()
        self.items: list = []

    def upto(self, h: int) -> list:
        while len(self.items) <= h:
            self.items.append(next(self._it))
        return self.items


def _shell(arity: int, h: int) -> Iterator[tuple[int, ...]]:
    for idx in itertools.product(range(h + 1), repeat=arity):
        if max(idx) == h:
            yield idx


def ce_closed_from_relations(A: CPresentation, R: RelationSystem, arity: int | None = None,
                             candidates: Sequence | None = None) -> CeClosedSet:
    """Balls B(ā; 2^-k) passing the S_0 test of a weakly stable system.

    Tuples range over the presentation's dense points (or ``candidates``);
    stage s tests new tuples of height s at precisions 0..s and all earlier
    tuples at precision s, so every (tuple, k) pair is tried exactly once.
    """
    N = R.arity if arity is None else arity
    if N != R.arity:
        raise ValueError("arity does not match the relation system")

    def gen():
        cursor = _PointCursor(A) if candidates is None else None
        pts = list(candidates) if candidates is not None else cursor.items
        ev = _SystemEvaluator(A, R, pts)
        seen: list[tuple[int, ...]] = []
        s = 0
        while True:
            if cursor is not None:
                cursor.upto(s)
            elif s >= len(pts):
                # finite candidate list: keep raising precision on old tuples
                for idx in seen:
                    chk = _TupleCheck(ev, idx)
                    if chk.passes(s):
                        yield RationalBall(_center(pts, idx), _pow2(s))
                s += 1
                continue
            for idx in seen:
                chk = _TupleCheck(ev, idx)
                if chk.passes(s):
                    yield RationalBall(_center(pts, idx), _pow2(s))
            for idx in _shell(N, s):
                seen.append(idx)
                chk = _TupleCheck(ev, idx)
                for k in range(s + 1):
                    if chk.passes(k):
                        yield RationalBall(_center(pts, idx), _pow2(k))
            s += 1

    return CeClosedSet(gen, A, N, R.name)


def _center(pts, idx):
    if len(idx) == 1:
        return pts[idx[0]]
    return tuple(pts[i] for i in idx)


def residual_check(A: CPresentation, R: RelationSystem, ball: RationalBall, k: int) -> bool:
    """Independent recomputation of the S_0 test for an emitted ball."""
    vals = center_value(A, ball.center)
    tol = _pow2(R.modulus(k))
    for rel in R.relations:
        e = relation_value(A, rel, vals)
        if not e.is_zero() and e.norm(R.modulus(k) + 4).hi >= tol:
            return False
    for v, cap in zip(vals, R.bounds):
        if cap is not None and v.norm(R.modulus(k) + 4).hi >= cap + tol:
            return False
    return True


def projections_closed(A: CPresentation, modulus=None, candidates=None) -> CeClosedSet:
    return ce_closed_from_relations(A, projection_relations(modulus), 1, candidates)


# ---------------------------------------------------------------------------
# nested-ball search


def find_point_in_intersection(U: CeOpenSet, C: CeClosedSet, k: int = 8,
                               fuel: int = 100000) -> ComputablePoint | Unknown:
    """Nested balls B_0 ⊇ B_1 ⊇ ... from C's enumeration, B_0 inside a ball of U.

    B_i has radius < 2^-i, so the centers converge; approximation j of the
    returned handle is the center of B_{j+1}.  Balls up to B_{k+1} are found
    eagerly; later ones lazily with a fresh budget of the same size.
    """
    A = C.presentation
    meter = FuelMeter(fuel)
    c_cache: list[RationalBall] = []
    c_iter = C.balls()

    def c_ball(i: int) -> RationalBall | None:
        while len(c_cache) <= i:
            if not meter.take():
                return None
            try:
                c_cache.append(next(c_iter))
            except StopIteration:
                return None
        return c_cache[i]

    chain: list[RationalBall] = []

    def first_ball() -> RationalBall | None:
        u_cache: list[RationalBall] = []
        u_iter = U.balls()
        s = 0
        while not meter.exhausted():
            # dovetail: C-ball i against U-ball s - i
            try:
                while len(u_cache) <= s:
                    u_cache.append(next(u_iter))
            except StopIteration:
                pass
            for i in range(s + 1):
                j = s - i
                if j >= len(u_cache):
                    continue
                b = c_ball(i)
                if b is None:
                    return None
                if b.radius >= 1:
                    continue
                if not meter.take():
                    return None
                if ball_subset(A, b, u_cache[j]) is Answer.YES:
                    return b
            s += 1
        return None

    def next_ball(prev: RationalBall, level: int) -> RationalBall | None:
        i = 0
        bound = _pow2(level)
        while True:
            b = c_ball(i)
            if b is None:
                return None
            i += 1
            if b.radius >= bound:
                continue
            if not meter.take():
                return None
            if ball_subset(A, b, prev) is Answer.YES:
                return b

    b0 = first_ball()
    if b0 is None:
        return Unknown(meter.spent, "no ball of C found inside U")
    chain.append(b0)
    while len(chain) <= k + 1:
        b = next_ball(chain[-1], len(chain))
        if b is None:
            return Unknown(meter.spent, f"found {len(chain)} nested balls")
        chain.append(b)

    def approx(j: int):
        while len(chain) <= j + 1:
            meter.budget += fuel
            b = next_ball(chain[-1], len(chain))
            if b is None:
                raise RuntimeError(f"nested-ball search stalled at level {len(chain)}")
            chain.append(b)
        c = chain[j + 1].center
        return c[0] if isinstance(c, tuple) and len(c) == 1 else c

    handle = ComputablePoint(A, approx, "intersection point")
    handle.chain = chain
    handle.fuel_spent = meter.spent
    return handle


# ---------------------------------------------------------------------------
# Murray-von Neumann chain search


# (cos, sin) pairs with rational entries; 36.87° + 53.13° = 90°
_ROTATIONS = ((Fraction(4, 5), Fraction(3, 5)), (Fraction(3, 5), Fraction(4, 5)),
              (Fraction(4, 5), Fraction(-3, 5)), (Fraction(3, 5), Fraction(-4, 5)))


def projection_residual(e: Element, k: int) -> DyadicInterval:
    """Certified max(‖e − e*‖, ‖e² − e‖)."""
    a = (e - e.adjoint()).norm(k)
    b = (e * e - e).norm(k)
    return DyadicInterval(max(a.lo, b.lo), max(a.hi, b.hi))


def _certify_below(e: Element, bound: Fraction, meter: FuelMeter | None = None,
                   max_prec: int = 60) -> bool | None:
    """‖e‖ < bound certified; Frobenius (of constant parts) first, then spectral."""
    if e.is_zero():
        return bound > 0
    if all(not isinstance(p, PathPart) for p in e.parts):
        if e.frobenius2() < bound * bound:
            return True
    prec = 6
    while prec <= max_prec:
        iv = e.norm(prec)
        if iv.hi < bound:
            return True
        if iv.lo >= bound:
            return False
        prec += 10
    return None


@dataclass
class ChainCertificate:
    """Balls B_0..B_m of common radius in M_{4n}(A) witnessing p ~ q."""

    presentation: CPresentation
    n: int
    radius: Fraction
    precision: int
    centers: list
    start: Element
    target: Element

    def ball_codes(self) -> list[str]:
        """Exact center entries; enumeration indices grow too fast to print."""
        return [element_text(c) for c in self.centers]

    def to_text(self) -> str:
        lines = ["# mvn chain certificate",
                 f"algebra {self.presentation.name}",
                 f"n {self.n}",
                 f"radius {self.radius}",
                 f"precision {self.precision}",
                 f"length {len(self.centers)}"]
        for i, code in enumerate(self.ball_codes()):
            lines.append(f"ball {i} {code}")
        return "\n".join(lines) + "\n"

    def verify(self) -> bool:
        """Re-check conditions (1)-(4) from the stored data."""
        r = self.radius
        eps = _pow2(self.precision)
        if _certify_below(self.centers[0] - self.start, 1 - r - eps) is not True:
            return False
        if _certify_below(self.centers[-1] - self.target, 1 - r - eps) is not True:
            return False
        for a, b in zip(self.centers, self.centers[1:]):
            if _certify_below(a - b, 1 - 2 * r) is not True:
                return False
        tol = _pow2(self.precision - 8 + 3)
        for c in self.centers[:1]:
            if projection_residual(c, self.precision + 2).hi >= tol:
                return False
        return True


def element_text(e: Element) -> str:
    chunks = []
    for p in e.parts:
        if isinstance(p, PathPart):
            chunks.append("path" + str([str(m) for m in p.endpoint_values()]))
        else:
            chunks.append(str(p.mat))
    return "|".join(chunks)


@dataclass
class MvnResult:
    verdict: str  # "equivalent" or "unknown"
    fuel_spent: int
    certificate: ChainCertificate | None = None
    progress: str = ""

    @property
    def equivalent(self) -> bool:
        return self.verdict == "equivalent"


def _moves(A: CPresentation, e: Element):
    """Exact unitary conjugates of e by rational plane rotations and phases."""
    groups = A.coupling() or ((tuple(range(len(e.parts))), "amp"),)
    for idx, level in groups:
        parts = [e.parts[i] for i in idx]
        size = parts[0].index_size(level)
        support = set()
        for p in parts:
            sup = p.diagonal_support()
            if level == "amp":
                sup = {x // p.block for x in sup}
            support |= sup
        if not support:
            continue
        for i in range(size):
            for j in range(i + 1, size):
                if i not in support and j not in support:
                    continue
                for c, s in _ROTATIONS:
                    new_parts = list(e.parts)
                    for pi, p in zip(idx, parts):
                        new_parts[pi] = p.rotated(p.flat_planes(i, j, level), c, s)
                    yield ("rot", idx, i, j, c, s), Element(tuple(new_parts), e.amp)


def mvn_semidecide(A: CPresentation, n: int, p_handle: ComputablePoint, q_handle: ComputablePoint,
                   fuel: int = 10000, s: int = 4) -> MvnResult:
    """Search for a chain of balls in M_{4n}(A) from ι(p) to ι(q).

    Conditions, with radius r = 2^-s and input precision k = s + 8:
    (1) consecutive centers at distance < 1 − 2r;
    (2) the first center passes the projection S_0 test at scale s (the
        other centers are exact unitary conjugates of it, so they inherit it);
    (3), (4) ‖c_0 − ι(p_k)‖ and ‖c_m − ι(q_k)‖ below 1 − r − 2^-k.
    Fuel counts certified distance checks.  Equivalent is returned only with a
    certificate; exhausting fuel or the finite move graph gives Unknown.
    """
    k = s + 8
    r = _pow2(s)
    eps = _pow2(k)
    meter = FuelMeter(fuel)
    p = p_handle.value(k)
    q = q_handle.value(k)
    if p.amp != n or q.amp != n:
        raise InputError(f"projections must lie in M_{n}(A)")
    for name, e in (("p", p), ("q", q)):
        res = projection_residual(e, k + 2)
        if res.lo > 4 * eps:
            raise InputError(f"{name} is not a projection: relation residual >= {res.lo}")
    start = p.pad(3 * n)
    target = q.pad(3 * n)
    # condition (2) at the first center
    g = s + 3
    res = projection_residual(start, g + 4)
    if res.hi >= _pow2(g) or start.norm(g + 4).hi >= 1 + _pow2(g):
        return MvnResult("unknown", meter.spent, progress="start ball fails the projection test")
    goal_bound = 1 - r - eps
    step_bound = 1 - 2 * r

    def h(e: Element) -> Fraction:
        return (e - target).frobenius2()

    counter = itertools.count()
    frontier = [(h(start), 0, next(counter), start, None)]
    parent: dict = {start.key(): None}
    nodes: dict = {start.key(): start}
    while frontier:
        _, depth, _, node, _ = heapq.heappop(frontier)
        if not meter.take():
            return MvnResult("unknown", meter.spent, progress=f"{len(nodes)} balls explored")
        if _certify_below(node - target, goal_bound) is True:
            path = []
            key = node.key()
            while key is not None:
                path.append(nodes[key])
                key = parent[key]
            path.reverse()
            cert = ChainCertificate(A, n, r, k, path, start, target)
            return MvnResult("equivalent", meter.spent, cert)
        for _, nxt in _moves(A, node):
            key = nxt.key()
            if key in parent:
                continue
            if not meter.take():
                return MvnResult("unknown", meter.spent, progress=f"{len(nodes)} balls explored")
            if _certify_below(nxt - node, step_bound) is not True:
                continue
            parent[key] = node.key()
            nodes[key] = nxt
            heapq.heappush(frontier, (h(nxt), depth + 1, next(counter), nxt, None))
    return MvnResult("unknown", meter.spent, progress="move graph exhausted")
