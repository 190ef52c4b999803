"""Murray-von Neumann semigroups, Grothendieck groups, K_0 and K_1.

Pipeline: projections of M_n(A) are enumerated as p_{n,k}; the semigroup
D(A) is presented with x_{<m,k>} labelling the class of p_{m+1,k} and words
labelling direct sums; the Grothendieck group of a semigroup presentation is
presented over the product presentation S x S; K_0 = G(D(A)).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .coding import pair, unpair
from .concrete import Element, MatrixPart, PathPart, StagedPart
from .cstar import (ComputablePoint, CPresentation, StandardComplex, suspend, unitize)
from .effective_sets import mvn_semidecide
from .exact import ONE, ZERO, ExactMatrix, GaussianRational
from .presentations import (AlgPresentation, Answer, GpWord, KernelAnswer, KernelOracle,
                            ProductPresentation, SgWord, WordMap, index_word, kernel_of_map,
                            subgroup_presentation)
from .results import FuelMeter, Unknown

# ---------------------------------------------------------------------------
# projection enumeration


class ProjectionEnumeration:
    """p_{n,0}, p_{n,1}, ... : diagonal projections of M_n(A) for each coupling group.

    Every group of parts gets a rank; for presentations with staged parts the
    ranks are taken at stage J = 0, 1, 2, ... in turn, so every diagonal
    projection of every stage appears.  ``variant`` 'initial' fills the
    leading diagonal slots, 'final' the trailing ones.  Nonunital
    presentations only get the zero projection.
    """

    def __init__(self, A: CPresentation, n: int, variant: str = "initial"):
        if variant not in ("initial", "final"):
            raise ValueError(f"unknown enumeration variant {variant!r}")
        self.A = A
        self.n = n
        self.variant = variant
        self.zero = A.zero_element(n)
        self.groups = tuple(A.coupling()) if A.unital else ()
        self.staged = any(isinstance(p, StagedPart) for p in self.zero.parts)
        self._cache: dict[int, tuple] = {}

    def _parts_at(self, J: int) -> list:
        out = []
        for p in self.zero.parts:
            if isinstance(p, StagedPart):
                out.append(StagedPart(p.chain, J, p.amp, ExactMatrix.zeros(p.amp * p.chain.n(J))))
            else:
                out.append(p)
        return out

    def _sizes(self, parts) -> list[int]:
        return [parts[idx[0]].index_size(level) for idx, level in self.groups]

    def _count(self, J: int) -> int:
        total = 1
        for s in self._sizes(self._parts_at(J)):
            total *= s + 1
        return total

    def locate(self, k: int) -> tuple[int, tuple[int, ...]]:
        """(stage, rank per coupling group) of p_{n,k}."""
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        J = 0
        rest = k
        if self.staged:
            while rest >= self._count(J):
                rest -= self._count(J)
                J += 1
        else:
            rest %= self._count(0)
        ranks = []
        for s in self._sizes(self._parts_at(J)):
            rest, r = divmod(rest, s + 1)
            ranks.append(r)
        out = (J, tuple(ranks))
        self._cache[k] = out
        return out

    def _slots(self, size: int, r: int) -> range:
        return range(r) if self.variant == "initial" else range(size - r, size)

    def element(self, k: int) -> Element:
        if not self.groups:
            return self.zero
        J, ranks = self.locate(k)
        parts = self._parts_at(J)
        for (idx, level), r in zip(self.groups, ranks):
            for i in idx:
                p = parts[i]
                size = p.index_size(level)
                if level == "flat":
                    flat = list(self._slots(size, r))
                else:
                    b = p.block
                    flat = [a * b + u for a in self._slots(size, r) for u in range(b)]
                dim = p.amp * p.block
                mat = ExactMatrix._raw(dim, dim, {(f, f): ONE for f in flat})
                if isinstance(p, MatrixPart):
                    parts[i] = MatrixPart(p.amp, p.block, mat)
                elif isinstance(p, StagedPart):
                    parts[i] = StagedPart(p.chain, J, p.amp, mat)
                else:
                    parts[i] = PathPart.constant(p.amp, p.block, mat)
        return Element(tuple(parts), self.n)

    def trace_vector(self, k: int) -> tuple:
        """Per-part traces of p_{n,k}, computed from the ranks."""
        zero = tuple(ZERO for _ in self.zero.parts)
        if not self.groups:
            return zero
        J, ranks = self.locate(k)
        parts = self._parts_at(J)
        out = list(zero)
        for (idx, level), r in zip(self.groups, ranks):
            for i in idx:
                out[i] = GaussianRational(Fraction(r, parts[i].block) if level == "flat" else r)
        return tuple(out)

    def stage(self, k: int) -> int:
        return self.locate(k)[0] if self.groups else 0

    def handle(self, k: int) -> ComputablePoint:
        return ComputablePoint.exact(self.A, self.element(k), f"p_{self.n},{k}")

    def __call__(self, k: int) -> ComputablePoint:
        return self.handle(k)

    def __iter__(self):
        k = 0
        while True:
            yield self.handle(k)
            k += 1


def enumerate_projections(A: CPresentation, n: int, variant: str = "initial") -> ProjectionEnumeration:
    return ProjectionEnumeration(A, n, variant)


def _has_paths(A: CPresentation) -> bool:
    return any(isinstance(p, PathPart) for p in A.zero_element().parts)


def mvn_equivalent(A: CPresentation, n: int, p: Element, q: Element, fuel: int = 200,
                   method: str = "auto") -> Answer:
    """p ~ q in M_n(A): decided by per-part traces when every part is a factor
    (matrix or staged), otherwise semidecided by a chain search."""
    size = max(p.amp, q.amp, n)
    p = p.pad(size - p.amp)
    q = q.pad(size - q.amp)
    if p == q:
        return Answer.YES
    if method == "auto":
        method = "chain" if _has_paths(A) else "trace"
    if method == "trace":
        return Answer.YES if p.trace_vector() == q.trace_vector() else Answer.NO
    res = mvn_semidecide(A, size, ComputablePoint.exact(A, p), ComputablePoint.exact(A, q), fuel=fuel)
    return Answer.YES if res.equivalent else Answer.UNKNOWN


# ---------------------------------------------------------------------------
# D(A)


class DPresentation(AlgPresentation):
    """Presentation of D(A): x_{<m,k>} labels [p_{m+1,k}], words label direct sums.

    The kernel compares per-part traces ('trace', computable) or searches
    for chains of balls between the padded sums ('chain', c.e.).
    """

    def __init__(self, A: CPresentation, method: str = "auto", variant: str = "initial",
                 mvn_fuel: int | None = None):
        if method == "auto":
            method = "chain" if _has_paths(A) else "trace"
        if method not in ("trace", "chain"):
            raise ValueError(f"unknown kernel method {method!r}")
        self.A = A
        self.method = method
        self.variant = variant
        self.mvn_fuel = mvn_fuel
        self._enums: dict[int, ProjectionEnumeration] = {}
        self._traces: dict[int, tuple] = {}
        mode = "computable" if method == "trace" else "ce"
        super().__init__("semigroup", self._label, KernelOracle(mode, self._decide), f"D({A.name})")

    def enumeration(self, n: int) -> ProjectionEnumeration:
        e = self._enums.get(n)
        if e is None:
            e = self._enums[n] = ProjectionEnumeration(self.A, n, self.variant)
        return e

    @staticmethod
    def generator(g: int) -> tuple[int, int]:
        """(n, k) with x_g labelling [p_{n,k}]."""
        m, k = unpair(g)
        return m + 1, k

    @staticmethod
    def generator_index(n: int, k: int) -> int:
        return pair(n - 1, k)

    def projection(self, g: int) -> Element:
        n, k = self.generator(g)
        return self.enumeration(n).element(k)

    def generator_trace(self, g: int) -> tuple:
        t = self._traces.get(g)
        if t is None:
            n, k = self.generator(g)
            t = self._traces[g] = self.enumeration(n).trace_vector(k)
        return t

    def trace(self, w: SgWord) -> tuple:
        out = None
        for g in w.gens:
            t = self.generator_trace(g)
            out = t if out is None else tuple(a + b for a, b in zip(out, t))
        return out

    def support(self, w: SgWord) -> tuple[int, Element]:
        """(n_w, p_w) with p_w the direct sum of the letters' projections."""
        e = None
        for g in w.gens:
            p = self.projection(g)
            e = p if e is None else e.direct_sum(p)
        return e.amp, e

    def handle(self, w: SgWord) -> ComputablePoint:
        return ComputablePoint.exact(self.A, self.support(w)[1], str(w))

    def _label(self, w: SgWord):
        if self.method == "trace":
            return self.trace(w)
        return self.support(w)[1]

    def _decide(self, w1: SgWord, w2: SgWord, fuel: int) -> KernelAnswer:
        if sorted(w1.gens) == sorted(w2.gens):
            return KernelAnswer.IN_KERNEL
        if self.method == "trace":
            same = self.trace(w1) == self.trace(w2)
            return KernelAnswer.IN_KERNEL if same else KernelAnswer.NOT_IN_KERNEL
        n1, p = self.support(w1)
        n2, q = self.support(w2)
        n = max(n1, n2)
        ans = mvn_equivalent(self.A, n, p, q, fuel=self.mvn_fuel or fuel, method="chain")
        return KernelAnswer.IN_KERNEL if ans is Answer.YES else KernelAnswer.UNKNOWN


def build_D(A: CPresentation, method: str = "auto", variant: str = "initial") -> DPresentation:
    return DPresentation(A, method, variant)


# ---------------------------------------------------------------------------
# *-homomorphisms and the induced semigroup maps


@dataclass
class StarHom:
    """A computable *-homomorphism given on elements of every M_n(source)."""

    source: CPresentation
    target: CPresentation
    apply: Callable[[Element], Element]
    name: str = ""

    def __call__(self, e: Element) -> Element:
        return self.apply(e)

    def then(self, other: "StarHom") -> "StarHom":
        return StarHom(self.source, other.target, lambda e: other(self(e)),
                       f"{other.name}∘{self.name}")


def identity_hom(A: CPresentation) -> StarHom:
    return StarHom(A, A, lambda e: e, "id")


def scalar_hom(target: CPresentation) -> StarHom:
    """The unital map C -> target, z -> z1."""
    one = target.unit_element()

    def apply(e: Element) -> Element:
        alpha = e.parts[0].mat
        return target.zero_element(e.amp).add_scalar(alpha) if not alpha.is_zero() else \
            target.zero_element(e.amp)

    del one
    return StarHom(StandardComplex(), target, apply, f"C->{target.name}")


def scalar_part_hom(At) -> StarHom:
    """π: Ã -> C."""
    return StarHom(At, StandardComplex(), At.scalar_part, "π")


def D_of_map(phi: StarHom, D0: DPresentation, D1: DPresentation, fuel: int = 5000,
             mvn_fuel: int = 200) -> WordMap:
    """Semigroup map on labels: each letter x_g goes to some x_h of the same size
    with p_h ~ φ(p_g), found by search; Unknown when the search runs dry."""
    letters: dict[int, int | Unknown] = {}

    def image_letter(g: int):
        hit = letters.get(g)
        if hit is not None:
            return hit
        n, _k = D0.generator(g)
        img = phi(D0.projection(g))
        enum = D1.enumeration(n)
        found: int | Unknown = Unknown(fuel, f"no match for x{g} among {fuel} projections")
        use_trace = D1.method == "trace"
        target_trace = img.trace_vector() if use_trace else None
        for k in range(fuel):
            if use_trace:
                ok = enum.trace_vector(k) == target_trace
            else:
                ok = mvn_equivalent(D1.A, n, img, enum.element(k), fuel=mvn_fuel) is Answer.YES
            if ok:
                found = D1.generator_index(n, k)
                break
        letters[g] = found
        return found

    def apply(w: SgWord):
        out = []
        for g in w.gens:
            h = image_letter(g)
            if isinstance(h, Unknown):
                return h
            out.append(h)
        return SgWord(tuple(out))

    return WordMap(apply, D0, D1, f"D({phi.name})")


def align_D(D0: DPresentation, D1: DPresentation, fuel: int = 5000, mvn_fuel: int = 200) -> WordMap:
    """Computable isomorphism between two D-presentations of the same algebra."""
    return D_of_map(identity_hom(D0.A), D0, D1, fuel, mvn_fuel)


# ---------------------------------------------------------------------------
# Grothendieck groups


def _join(*sides) -> tuple[int, ...]:
    out: tuple[int, ...] = ()
    for s in sides:
        out += s
    return out


class GrothendieckPresentation(AlgPresentation):
    """G(S): x_n labels [(u, v)] where (u, v) is the pair of S-words coded by n.

    A group word w has components (a, b), the sums of its positive pairs plus
    the swapped negative pairs; w1 ~ w2 iff a1 + b2 + z = a2 + b1 + z in S
    for some z.  With ``cancellative`` and a computable S the single test
    z = x_0 decides the kernel.
    """

    def __init__(self, S: AlgPresentation, cancellative: bool = False, name: str | None = None):
        if S.kind != "semigroup":
            raise TypeError("the Grothendieck construction takes a semigroup presentation")
        self.S = S
        self.product = ProductPresentation(S, S)
        self.cancellative = cancellative and S.kernel.mode == "computable"
        mode = "computable" if self.cancellative else "ce"
        decide = self._decide_cancellative if self.cancellative else self._decide_search
        super().__init__("group", self._label, KernelOracle(mode, decide),
                         name or f"G({S.name})")

    # -- words
    def components(self, w: GpWord) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Letters of the two S-sums (possibly empty)."""
        a: tuple[int, ...] = ()
        b: tuple[int, ...] = ()
        for g, s in w.letters:
            u, v = self.product.generator_pair(g)
            if s > 0:
                a, b = a + u.gens, b + v.gens
            else:
                a, b = a + v.gens, b + u.gens
        return a, b

    def pair_label(self, u: SgWord, v: SgWord) -> GpWord:
        """Label of [(u, v)]."""
        return GpWord.gen(self.product.pair_label(u, v).gens[0])

    def gamma(self, a: SgWord) -> GpWord:
        """γ(a) = [(a + x_0, x_0)]."""
        z = SgWord((0,))
        return self.pair_label(a * z, z)

    def normal_pair(self, w: GpWord) -> tuple[SgWord, SgWord]:
        """S-words (u, v) with w ~ [(u, v)].

        Letters common to both sides are cancelled and x_0 is added to both
        sides if one becomes empty.
        """
        a, b = self.components(w)
        rest = list(b)
        left = []
        for g in a:
            if g in rest:
                rest.remove(g)
            else:
                left.append(g)
        a, b = tuple(left), tuple(rest)
        if not a or not b:
            a, b = a + (0,), b + (0,)
        return SgWord(a), SgWord(b)

    def universal(self, phi: Callable[[SgWord], GpWord], H: AlgPresentation | None = None) -> WordMap:
        """ψ_φ: x_n -> φ(u) φ(v)^-1 for a semigroup map φ into a group presentation."""

        def apply(w: GpWord) -> GpWord:
            out = GpWord(())
            for g, s in w.letters:
                u, v = self.product.generator_pair(g)
                img = phi(u) * phi(v).inverse()
                out = out * (img if s > 0 else img.inverse())
            return out

        return WordMap(apply, self, H, "ψ_φ")

    # -- kernel
    def _label(self, w: GpWord):
        u, v = self.normal_pair(w)
        return (self.S.label_map(u), self.S.label_map(v))

    def _sides(self, w1: GpWord, w2: GpWord):
        a1, b1 = self.components(w1)
        a2, b2 = self.components(w2)
        return _join(a1, b2), _join(a2, b1)

    def _decide_cancellative(self, w1, w2, fuel):
        if isinstance(w1, Unknown) or isinstance(w2, Unknown):
            return KernelAnswer.UNKNOWN
        left, right = self._sides(w1, w2)
        if sorted(left) == sorted(right):
            return KernelAnswer.IN_KERNEL
        return self.S.kernel(SgWord(left + (0,)), SgWord(right + (0,)), fuel)

    def _decide_search(self, w1, w2, fuel):
        if isinstance(w1, Unknown) or isinstance(w2, Unknown):
            return KernelAnswer.UNKNOWN
        left, right = self._sides(w1, w2)
        if sorted(left) == sorted(right):
            return KernelAnswer.IN_KERNEL
        if left and right and self.S.kernel(SgWord(left), SgWord(right), fuel) is KernelAnswer.IN_KERNEL:
            return KernelAnswer.IN_KERNEL
        # every (z, fuel) pair is reached as fuel grows
        for i in range(max(1, fuel.bit_length())):
            z = index_word(i, "semigroup").gens
            if self.S.kernel(SgWord(left + z), SgWord(right + z), fuel) is KernelAnswer.IN_KERNEL:
                return KernelAnswer.IN_KERNEL
        return KernelAnswer.UNKNOWN


def grothendieck(S: AlgPresentation, cancellative: bool | None = None) -> GrothendieckPresentation:
    """G(S); ``cancellative`` defaults to True for trace-decided D-presentations."""
    if cancellative is None:
        cancellative = isinstance(S, DPresentation) and S.method == "trace"
    return GrothendieckPresentation(S, cancellative)


def groth_kernel_decide(S: AlgPresentation) -> KernelOracle:
    """Decision of the G(S) kernel for computable cancellative S (caller asserts)."""
    if S.kernel.mode != "computable":
        raise TypeError("a computable semigroup kernel is required")
    return GrothendieckPresentation(S, cancellative=True).kernel


def G_of_map(phi: WordMap, G0: GrothendieckPresentation, G1: GrothendieckPresentation) -> WordMap:
    """x_n with pair (a, b) goes to γ(φ(a)) - γ(φ(b))."""

    def apply(w: GpWord):
        out = GpWord(())
        for g, s in w.letters:
            u, v = G0.product.generator_pair(g)
            fu, fv = phi(u), phi(v)
            for f in (fu, fv):
                if isinstance(f, Unknown):
                    return f
            img = G1.gamma(fu) * G1.gamma(fv).inverse()
            out = out * (img if s > 0 else img.inverse())
        return out

    return WordMap(apply, G0, G1, f"G({phi.name})")


# ---------------------------------------------------------------------------
# K_0


def k0(A: CPresentation, method: str = "auto", variant: str = "initial") -> GrothendieckPresentation:
    K = grothendieck(build_D(A, method, variant))
    K.name = f"K0({A.name})"
    return K


def K0_of_map(phi: StarHom, K0: GrothendieckPresentation, K1: GrothendieckPresentation,
              fuel: int = 5000) -> WordMap:
    return G_of_map(D_of_map(phi, K0.S, K1.S, fuel), K0, K1)


@dataclass(frozen=True)
class ConeResult:
    answer: Answer
    fuel_spent: int
    witness: SgWord | None = None

    def __bool__(self):
        return self.answer is Answer.YES


def _cone_candidates():
    """Single generators interleaved with all words (both fair)."""
    i = 0
    while True:
        yield SgWord((i,))
        yield index_word(i, "semigroup")
        i += 1


def cone_semidecide(K: GrothendieckPresentation, w: GpWord, fuel: int = 20000,
                    check_fuel: int = 200) -> ConeResult:
    """Search w' in D with w ~ γ(w'); fuel counts candidates tried."""
    meter = FuelMeter(fuel)
    for cand in _cone_candidates():
        if not meter.take():
            break
        if K.kernel(w, K.gamma(cand), check_fuel) is KernelAnswer.IN_KERNEL:
            return ConeResult(Answer.YES, meter.spent, cand)
    return ConeResult(Answer.UNKNOWN, meter.spent)


def cone_decide(K: GrothendieckPresentation, w: GpWord, fuel: int = 20000,
                check_fuel: int = 200) -> ConeResult:
    """Positivity in a linearly ordered K_0: searches for w and -w in parallel."""
    neg = w.inverse()
    meter = FuelMeter(fuel)
    negative_seen = False
    for cand in _cone_candidates():
        if not meter.take():
            break
        g = K.gamma(cand)
        if K.kernel(w, g, check_fuel) is KernelAnswer.IN_KERNEL:
            return ConeResult(Answer.YES, meter.spent, cand)
        if not negative_seen and K.kernel(neg, g, check_fuel) is KernelAnswer.IN_KERNEL:
            negative_seen = True
            zero = K.kernel(w, GpWord(()), check_fuel)
            if zero is KernelAnswer.IN_KERNEL:
                return ConeResult(Answer.YES, meter.spent, SgWord((0,)))
            if zero is KernelAnswer.NOT_IN_KERNEL:
                return ConeResult(Answer.NO, meter.spent, cand)
    return ConeResult(Answer.UNKNOWN, meter.spent)


def k0_value(K: GrothendieckPresentation, w: GpWord) -> tuple:
    """Per-part trace difference of a label (trace-decided K only)."""
    D = K.S
    if not isinstance(D, DPresentation) or D.method != "trace":
        raise TypeError("trace values need a trace-decided D-presentation")
    a, b = K.components(w)
    zero = tuple(ZERO for _ in D.A.zero_element().parts)
    ta = D.trace(SgWord(a)) if a else zero
    tb = D.trace(SgWord(b)) if b else zero
    return tuple(x - y for x, y in zip(ta, tb))


def k0_to_rational(K: GrothendieckPresentation, w: GpWord):
    """Exact rational image of a label in Q(ε) for a UHF (or single-factor) algebra."""
    from .uhf import QEpsilonElement

    v = k0_value(K, w)
    if len(v) != 1:
        raise TypeError("rational values need an algebra with a single factor")
    a, b = K.components(w)
    D = K.S
    stage = 0
    for g in a + b:
        n, k = D.generator(g)
        stage = max(stage, D.enumeration(n).stage(k))
    return QEpsilonElement(v[0].re, stage)


def unit_label(K: GrothendieckPresentation) -> GpWord:
    """γ of the letter labelling [1_A] in the 'initial' enumeration: p_{1,k} with full ranks."""
    D = K.S
    enum = D.enumeration(1)
    target = tuple(p.trace() for p in D.A.unit_element(1).parts)
    k = 0
    while enum.trace_vector(k) != target:
        k += 1
    return K.gamma(SgWord((D.generator_index(1, k),)))


# ---------------------------------------------------------------------------
# nonunital K_0 and K_1


def k0_nonunital(A: CPresentation, fuel: int = 200, map_fuel: int = 5000) -> "KernelGroup":
    """ker K_0(π) ⊂ K_0(Ã) as a c.e. subgroup presentation."""
    At = unitize(A)
    K = k0(At)
    Kc = k0(StandardComplex())
    f = K0_of_map(scalar_part_hom(At), K, Kc, map_fuel)
    H = kernel_of_map(f, Kc)
    sub = subgroup_presentation(K, H, fuel)
    sub.name = f"K0({A.name})"
    return KernelGroup(sub, K, Kc, f)


@dataclass
class KernelGroup:
    """A subgroup presentation together with the data it came from."""

    presentation: object
    ambient: GrothendieckPresentation
    quotient: GrothendieckPresentation
    projection: WordMap

    def __getattr__(self, item):
        return getattr(self.presentation, item)

    def confirm_identity(self, n: int, fuel: int) -> KernelAnswer | Unknown:
        """Decide whether the n-th generator equals the identity, within ``fuel``."""
        m = self.presentation.try_member(n, fuel)
        if m is None:
            return Unknown(fuel, f"member {n} not enumerated")
        return self.presentation.kernel(GpWord.gen(n), GpWord(()), fuel)


def k1(A: CPresentation, fuel: int = 200, map_fuel: int = 5000) -> KernelGroup:
    """K_1(A) = K_0(SA)."""
    out = k0_nonunital(suspend(A), fuel, map_fuel)
    out.presentation.name = f"K1({A.name})"
    return out
