"""Free semigroup / free group words and (semi)group presentations.

A presentation labels elements of a (semi)group by words; all the algebra
lives in the kernel relation, which is either decided or only semidecided
under an explicit fuel budget.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterator, Sequence

from .coding import (nonempty_seq_index, nonempty_seq_of, pair, rational_of,
                     unpair)
from .errors import StagingError


class KernelAnswer(enum.Enum):
    IN_KERNEL = "in_kernel"
    NOT_IN_KERNEL = "not_in_kernel"
    UNKNOWN = "unknown"


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class SgWord:
    """Nonempty word x_{g0} x_{g1} ... of the free semigroup."""

    gens: tuple[int, ...]

    def __post_init__(self):
        gens = tuple(int(g) for g in self.gens)
        if not gens:
            raise ValueError("semigroup words are nonempty")
        if any(g < 0 for g in gens):
            raise ValueError("generator indices are natural numbers")
        object.__setattr__(self, "gens", gens)

    def __mul__(self, other: "SgWord") -> "SgWord":
        return SgWord(self.gens + other.gens)

    def __len__(self):
        return len(self.gens)

    def __str__(self):
        return "*".join(f"x{g}" for g in self.gens)


def _check_reduced(letters) -> None:
    for (g0, s0), (g1, s1) in zip(letters, letters[1:]):
        if g0 == g1 and s0 == -s1:
            raise ValueError("group word is not freely reduced")


@dataclass(frozen=True)
class GpWord:
    """Freely reduced word of the free group; letters are (generator, ±1)."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), 1 if s > 0 else -1) for g, s in self.letters)
        if any(g < 0 for g, _ in letters):
            raise ValueError("generator indices are natural numbers")
        _check_reduced(letters)
        object.__setattr__(self, "letters", letters)

    @classmethod
    def free(cls, letters) -> "GpWord":
        """Reduce an arbitrary letter sequence."""
        return reduce(letters)

    @classmethod
    def gen(cls, g: int, sign: int = 1) -> "GpWord":
        return cls(((g, sign),))

    @classmethod
    def from_sg(cls, w: SgWord) -> "GpWord":
        return cls.free((g, 1) for g in w.gens)

    def __mul__(self, other: "GpWord") -> "GpWord":
        return reduce(self.letters + other.letters)

    def inverse(self) -> "GpWord":
        return GpWord(tuple((g, -s) for g, s in reversed(self.letters)))

    def exponent_sum(self, g: int | None = None) -> int:
        return sum(s for h, s in self.letters if g is None or h == g)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return "*".join(f"x{g}" if s > 0 else f"x{g}^-1" for g, s in self.letters)


def reduce(w) -> GpWord:
    """Free reduction by a single stack pass."""
    letters = w.letters if isinstance(w, GpWord) else w
    out: list[tuple[int, int]] = []
    for g, s in letters:
        s = 1 if s > 0 else -1
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((int(g), s))
    return GpWord(tuple(out))


# Group words are ranked by weight sum(code + 1), code = 2g + (0 for +, 1 for -);
# within a weight lexicographically by codes, skipping adjacent inverse pairs.

@lru_cache(maxsize=None)
def _gp_count(weight: int, prev: int) -> int:
    if weight == 0:
        return 1
    total = 0
    for c in range(weight):
        if prev >= 0 and c == (prev ^ 1):
            continue
        total += _gp_count(weight - c - 1, c)
    return total


def _gp_offset(weight: int) -> int:
    return sum(_gp_count(w, -1) for w in range(weight))


def _gp_codes(w: GpWord) -> list[int]:
    return [2 * g + (0 if s > 0 else 1) for g, s in w.letters]


def word_index(w: SgWord | GpWord) -> int:
    """Position of a word in the fixed enumeration of its free object."""
    if isinstance(w, SgWord):
        return nonempty_seq_index(w.gens)
    codes = _gp_codes(w)
    weight = sum(c + 1 for c in codes)
    idx = _gp_offset(weight)
    remaining = weight
    prev = -1
    for c in codes:
        for smaller in range(c):
            if prev >= 0 and smaller == (prev ^ 1):
                continue
            idx += _gp_count(remaining - smaller - 1, smaller)
        remaining -= c + 1
        prev = c
    return idx


def index_word(n: int, kind: str = "semigroup") -> SgWord | GpWord:
    """Inverse of :func:`word_index`; ``kind`` is 'semigroup' or 'group'."""
    if n < 0:
        raise ValueError("index must be a natural number")
    if kind == "semigroup":
        return SgWord(nonempty_seq_of(n))
    if kind != "group":
        raise ValueError(f"unknown word kind {kind!r}")
    weight = 0
    while True:
        cnt = _gp_count(weight, -1)
        if n < cnt:
            break
        n -= cnt
        weight += 1
    codes = []
    prev = -1
    remaining = weight
    while remaining > 0:
        for c in range(remaining):
            if prev >= 0 and c == (prev ^ 1):
                continue
            cnt = _gp_count(remaining - c - 1, c)
            if n < cnt:
                codes.append(c)
                remaining -= c + 1
                prev = c
                break
            n -= cnt
    return GpWord(tuple((c // 2, 1 if c % 2 == 0 else -1) for c in codes))


def words(kind: str = "semigroup", start: int = 0) -> Iterator[SgWord | GpWord]:
    n = start
    while True:
        yield index_word(n, kind)
        n += 1


# ---------------------------------------------------------------------------
# kernel oracles and presentations


KernelDecide = Callable[[Any, Any, int], KernelAnswer]


@dataclass(frozen=True)
class KernelOracle:
    """Decision (mode 'computable') or semidecision (mode 'ce') of the kernel."""

    mode: str
    decide: KernelDecide

    def __post_init__(self):
        if self.mode not in ("computable", "ce"):
            raise ValueError(f"unknown kernel mode {self.mode!r}")

    def __call__(self, w1, w2, fuel: int = 1000) -> KernelAnswer:
        return self.decide(w1, w2, fuel)


def weaker_mode(a: str, b: str) -> str:
    return "computable" if a == b == "computable" else "ce"


@dataclass
class AlgPresentation:
    """A semigroup or group together with its labeling by words."""

    kind: str
    label_map: Callable[[Any], Any]
    kernel: KernelOracle
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("semigroup", "group"):
            raise ValueError(f"unknown presentation kind {self.kind!r}")

    @property
    def word_kind(self) -> str:
        return self.kind

    def word(self, n: int):
        return index_word(n, self.kind)

    def equal(self, w1, w2, fuel: int = 1000) -> KernelAnswer:
        return self.kernel(w1, w2, fuel)

    def identity(self) -> GpWord:
        if self.kind != "group":
            raise TypeError("semigroup presentations have no identity label")
        return GpWord(())

    def describe(self, w):
        return self.label_map(w)


def exact_kernel(value: Callable[[Any], Any]) -> KernelOracle:
    """Computable kernel comparing exact descriptors."""
    return KernelOracle("computable", lambda a, b, fuel: (
        KernelAnswer.IN_KERNEL if value(a) == value(b) else KernelAnswer.NOT_IN_KERNEL))


def positive_integers() -> AlgPresentation:
    """(N+, +) with x_i labelling i + 1."""
    value = lambda w: sum(g + 1 for g in w.gens)  # noqa: E731
    return AlgPresentation("semigroup", value, exact_kernel(value), "(N+,+)")


def integers(weights: Callable[[int], int] | None = None) -> AlgPresentation:
    """(Z, +); by default every generator labels 1."""
    wt = weights or (lambda g: 1)

    def value(w: GpWord) -> int:
        return sum(s * wt(g) for g, s in w.letters)

    return AlgPresentation("group", value, exact_kernel(value), "(Z,+)")


def integer_lattice() -> AlgPresentation:
    """Z^2 with x_{2i} labelling (1,0) and x_{2i+1} labelling (0,1)."""

    def value(w: GpWord) -> tuple[int, int]:
        a = sum(s for g, s in w.letters if g % 2 == 0)
        b = sum(s for g, s in w.letters if g % 2 == 1)
        return (a, b)

    return AlgPresentation("group", value, exact_kernel(value), "Z^2")


def trivial_group() -> AlgPresentation:
    return AlgPresentation("group", lambda w: 0, exact_kernel(lambda w: 0), "trivial")


def rational_group() -> AlgPresentation:
    """(Q, +) with x_n labelling the n-th rational."""

    def value(w: GpWord) -> Fraction:
        return sum((s * rational_of(g) for g, s in w.letters), Fraction(0))

    return AlgPresentation("group", value, exact_kernel(value), "(Q,+)")


# ---------------------------------------------------------------------------
# c.e. sets of labels


class CeSubset:
    """A c.e. set of words given by a fuel-bounded membership semidecision.

    ``enumerate`` dovetails over (word index, fuel) so every member is
    eventually emitted; members are emitted once, in discovery order.
    """

    def __init__(self, contains: Callable[[Any, int], Answer], kind: str,
                 decidable: bool = False, name: str = ""):
        self._contains = contains
        self.kind = kind
        self.decidable = decidable
        self.name = name

    def contains(self, w, fuel: int = 1000) -> Answer:
        return self._contains(w, fuel)

    def enumerate(self) -> Iterator:
        for _, found in self._stages():
            yield from found

    def first(self, count: int, fuel: int) -> list:
        """First ``count`` members, scanning at most ``fuel`` dovetail stages."""
        out = []
        gen = self._stages()
        for stage, members in gen:
            out.extend(members)
            if len(out) >= count:
                return out[:count]
            if stage >= fuel:
                break
        raise StagingError(f"only {len(out)} of {count} members found", fuel)

    def _stages(self):
        settled: set[int] = set()
        stage = 0
        while True:
            found = []
            for i in range(stage + 1):
                if i in settled:
                    continue
                w = index_word(i, self.kind)
                ans = self._contains(w, stage + 1)
                if ans is Answer.YES:
                    settled.add(i)
                    found.append(w)
                elif ans is Answer.NO:
                    settled.add(i)
            yield stage, found
            stage += 1


def kernel_of_map(f: Callable[[GpWord], GpWord], target: AlgPresentation,
                  identity_label: GpWord | None = None) -> CeSubset:
    """Labels w with f(w) equal to the identity of ``target``."""
    e = identity_label if identity_label is not None else GpWord(())

    def contains(w, fuel):
        ans = target.kernel(f(w), e, fuel)
        if ans is KernelAnswer.IN_KERNEL:
            return Answer.YES
        if ans is KernelAnswer.NOT_IN_KERNEL:
            return Answer.NO
        return Answer.UNKNOWN

    return CeSubset(contains, "group", target.kernel.mode == "computable",
                    f"ker({target.name})")


class SubgroupPresentation(AlgPresentation):
    """Presentation of a c.e. subgroup H of G: x_n labels the n-th member of H."""

    def __init__(self, ambient: AlgPresentation, members: CeSubset, fuel: int = 200):
        self.ambient = ambient
        self.members = members
        self.fuel = fuel
        self._found: list[GpWord] = []
        self._cursor = members._stages()
        self._stage = -1
        super().__init__("group", self._label, KernelOracle("ce", self._decide),
                         f"subgroup of {ambient.name}")
        # nonemptiness check within the declared fuel
        self.member(0, fuel)

    def _advance(self, budget: int) -> bool:
        if self._stage >= budget:
            return False
        stage, found = next(self._cursor)
        self._stage = stage
        self._found.extend(found)
        return True

    def member(self, n: int, fuel: int | None = None) -> GpWord:
        """G-label of the n-th member of H, searching up to ``fuel`` stages."""
        budget = self.fuel if fuel is None else fuel
        while len(self._found) <= n:
            if not self._advance(budget):
                raise StagingError(f"member {n} of the subgroup not enumerated", budget)
        return self._found[n]

    def try_member(self, n: int, fuel: int) -> GpWord | None:
        try:
            return self.member(n, fuel)
        except StagingError:
            return None

    def inclusion(self, w: GpWord, fuel: int | None = None) -> GpWord:
        """Computable inclusion map H -> G on labels."""
        out = GpWord(())
        for g, s in w.letters:
            m = self.member(g, fuel)
            out = out * (m if s > 0 else m.inverse())
        return out

    def _label(self, w: GpWord):
        return self.ambient.label_map(self.inclusion(w))

    def _decide(self, a: GpWord, b: GpWord, fuel: int) -> KernelAnswer:
        try:
            ia = self.inclusion(a, fuel)
            ib = self.inclusion(b, fuel)
        except StagingError:
            return KernelAnswer.UNKNOWN
        return self.ambient.kernel(ia, ib, fuel)


def subgroup_presentation(G: AlgPresentation, H: CeSubset, fuel: int = 200) -> SubgroupPresentation:
    if G.kind != "group":
        raise TypeError("subgroup presentations need a group")
    return SubgroupPresentation(G, H, fuel)


# ---------------------------------------------------------------------------
# products


def _component_words(n: int, kind: str):
    a, b = unpair(n)
    return index_word(a, kind), index_word(b, kind)


def _combine(a: KernelAnswer, b: KernelAnswer) -> KernelAnswer:
    if a is KernelAnswer.NOT_IN_KERNEL or b is KernelAnswer.NOT_IN_KERNEL:
        return KernelAnswer.NOT_IN_KERNEL
    if a is KernelAnswer.IN_KERNEL and b is KernelAnswer.IN_KERNEL:
        return KernelAnswer.IN_KERNEL
    return KernelAnswer.UNKNOWN


class ProductPresentation(AlgPresentation):
    """S0 × S1: generator x_n labels the pair of words (τ0(n), τ1(n)).

    n is the Cantor pair of the two component word indices, so every pair of
    (nonempty, in the semigroup case) words is the image of one generator.
    """

    def __init__(self, left: AlgPresentation, right: AlgPresentation):
        if left.kind != right.kind:
            raise TypeError("product of presentations of different kinds")
        self.left = left
        self.right = right
        super().__init__(left.kind, self._label,
                         KernelOracle(weaker_mode(left.kernel.mode, right.kernel.mode), self._decide),
                         f"{left.name} x {right.name}")

    def generator_pair(self, n: int):
        return _component_words(n, self.kind)

    def split(self, w):
        """Component words (φ0(w), φ1(w))."""
        if self.kind == "semigroup":
            parts = [self.generator_pair(g) for g in w.gens]
            a = parts[0][0]
            b = parts[0][1]
            for u, v in parts[1:]:
                a, b = a * u, b * v
            return a, b
        a = GpWord(())
        b = GpWord(())
        for g, s in w.letters:
            u, v = self.generator_pair(g)
            if s < 0:
                u, v = u.inverse(), v.inverse()
            a, b = a * u, b * v
        return a, b

    def pair_label(self, u, v):
        """Single-generator word labelling (u, v)."""
        n = pair(word_index(u), word_index(v))
        return SgWord((n,)) if self.kind == "semigroup" else GpWord.gen(n)

    def project(self, w, side: int):
        return self.split(w)[side]

    def inject(self, u, side: int, other):
        """Label of (u, other) or (other, u) depending on ``side``."""
        return self.pair_label(u, other) if side == 0 else self.pair_label(other, u)

    def _label(self, w):
        a, b = self.split(w)
        return (self.left.label_map(a), self.right.label_map(b))

    def _decide(self, w1, w2, fuel):
        a1, b1 = self.split(w1)
        a2, b2 = self.split(w2)
        first = self.left.kernel(a1, a2, fuel)
        if first is KernelAnswer.NOT_IN_KERNEL:
            return first
        return _combine(first, self.right.kernel(b1, b2, fuel))


def product_presentation(S0: AlgPresentation, S1: AlgPresentation) -> ProductPresentation:
    return ProductPresentation(S0, S1)


def check_equivalence(P: AlgPresentation, sample: Sequence, fuel: int = 1000) -> list[str]:
    """Reflexivity/symmetry/transitivity violations of a decided kernel on a sample."""
    problems = []
    rel = {}
    for a in sample:
        for b in sample:
            rel[(a, b)] = P.kernel(a, b, fuel) is KernelAnswer.IN_KERNEL
    for a in sample:
        if not rel[(a, a)]:
            problems.append(f"not reflexive at {a}")
        for b in sample:
            if rel[(a, b)] != rel[(b, a)]:
                problems.append(f"not symmetric at {a}, {b}")
            if rel[(a, b)]:
                for c in sample:
                    if rel[(b, c)] and not rel[(a, c)]:
                        problems.append(f"not transitive at {a}, {b}, {c}")
    return problems


@dataclass
class WordMap:
    """A computable map between presentations given on words."""

    apply: Callable[[Any], Any]
    source: AlgPresentation | None = None
    target: AlgPresentation | None = None
    name: str = ""
    cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, w):
        hit = self.cache.get(w)
        if hit is None:
            hit = self.apply(w)
            self.cache[w] = hit
        return hit
