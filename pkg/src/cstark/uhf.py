"""UHF algebras: supernatural numbers, certificates, direct-limit presentations,
traces, decidable Murray-von Neumann equivalence and certificate extraction."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Sequence

import sympy

from .concrete import DimChain, Element, MatrixPart, StagedPart, embed_blockwise
from .cstar import (Amplified, ComputablePoint, CPresentation, DirectLimit, StandardComplex,
                    poly_of_index)
from .errors import InputError, StagingError
from .exact import DyadicInterval, ExactMatrix, GaussianRational
from .machines import CounterMachine, EnumerationCursor
from .presentations import Answer
from .results import FuelMeter, Unknown


@lru_cache(maxsize=None)
def nth_prime(e: int) -> int:
    """p_0 = 2, p_1 = 3, ..."""
    return int(sympy.prime(e + 1))


@lru_cache(maxsize=None)
def prime_index(p: int) -> int:
    if not sympy.isprime(p):
        raise InputError(f"{p} is not prime")
    return int(sympy.primepi(p)) - 1


def valuation(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# supernatural numbers


class Supernatural:
    """A lower semicomputable supernatural number: monotone stages h_j.

    ``stage(j)`` maps primes to exponents and is memoized; monotonicity is
    checked as stages are produced.
    """

    def __init__(self, stage_fn: Callable[[int], Mapping[int, int]], name: str = "",
                 description: list | None = None):
        self._fn = stage_fn
        self._memo: dict[int, dict[int, int]] = {}
        self.name = name
        self.description = description or []

    def stage(self, j: int) -> dict[int, int]:
        hit = self._memo.get(j)
        if hit is not None:
            return hit
        h = {p: int(e) for p, e in self._fn(j).items() if e}
        if j > 0:
            prev = self.stage(j - 1)
            for p, e in prev.items():
                if h.get(p, 0) < e:
                    raise InputError(f"stage {j} is not monotone at prime {p}")
        self._memo[j] = h
        return h

    def truncated(self, j: int) -> dict[int, int]:
        """g_j = h_j restricted to the primes p_0, ..., p_j."""
        return {p: e for p, e in self.stage(j).items() if prime_index(p) <= j}

    def dimension(self, j: int) -> int:
        n = 1
        for p, e in self.truncated(j).items():
            n *= p ** e
        return n

    def chain(self) -> DimChain:
        return DimChain(self.dimension, self.name or "supernatural")

    def exponent_stream(self, p: int, count: int) -> list[int]:
        return [self.truncated(j).get(p, 0) for j in range(count)]

    def truncation_equal(self, other: "Supernatural", j: int) -> bool:
        """Equality of the stage-j truncations; full equality is only semidecidable."""
        return self.truncated(j) == other.truncated(j)

    @classmethod
    def from_exponents(cls, exps: Mapping[int, int | None], name: str = "") -> "Supernatural":
        """Finite exponents e give h_j(p) = min(e, j); None (infinity) gives h_j(p) = j."""
        for p in exps:
            prime_index(p)
        items = dict(exps)

        def fn(j):
            return {p: (j if e is None else min(e, j)) for p, e in items.items()}
        desc = [("exp", p, e) for p, e in sorted(items.items())]
        return cls(fn, name or _exps_name(items), desc)

    def __repr__(self):
        return f"<Supernatural {self.name}>"


def _exps_name(exps) -> str:
    if not exps:
        return "1"
    return "*".join(f"{p}^{'inf' if e is None else e}" for p, e in sorted(exps.items()))


def hard_supernatural(machines: Sequence[CounterMachine] | Mapping[int, CounterMachine],
                      extra: Supernatural | None = None) -> Supernatural:
    """h_s(p_e) = #W_{e,s}, with machine e attached to the e-th prime."""
    table = dict(machines) if isinstance(machines, Mapping) else dict(enumerate(machines))
    cursors = {e: EnumerationCursor(m) for e, m in table.items()}

    def fn(s):
        out = {nth_prime(e): c.count(s) for e, c in cursors.items()}
        if extra is not None:
            for p, v in extra.stage(s).items():
                if p in out:
                    raise InputError(f"prime {p} specified twice")
                out[p] = v
        return out
    desc = [("machine", e, str(m)) for e, m in sorted(table.items())]
    if extra is not None:
        desc = list(extra.description) + desc
    return Supernatural(fn, "hard", desc)


# ---------------------------------------------------------------------------
# certificates and presentations


@dataclass
class UhfCertificate:
    """Dims n_0 | n_1 | ... and unital embeddings psi_j: M_{n_j} -> A."""

    chain: DimChain
    presentation: CPresentation
    embed: Callable[[int, ExactMatrix], Element]
    name: str = ""
    stages: int | None = None  # None: defined at every stage

    def n(self, j: int) -> int:
        self._check_stage(j)
        return self.chain.n(j)

    def dims(self, count: int) -> list[int]:
        return [self.n(j) for j in range(count)]

    def psi(self, j: int, X: ExactMatrix) -> Element:
        self._check_stage(j)
        if X.shape != (self.chain.n(j), self.chain.n(j)):
            raise InputError(f"stage {j} matrices are {self.chain.n(j)}x{self.chain.n(j)}")
        return self.embed(j, X)

    def unit(self, j: int, r: int, s: int) -> Element:
        return self.psi(j, ExactMatrix.unit(self.chain.n(j), r, s))

    def _check_stage(self, j: int):
        if j < 0 or (self.stages is not None and j >= self.stages):
            raise StagingError(f"certificate has no stage {j}", 0)

    def __repr__(self):
        return f"<UhfCertificate {self.name}>"


def certificate_from_chain(chain: DimChain, name: str = "UHF") -> UhfCertificate:
    """Direct-limit presentation of a dims chain and its canonical certificate."""
    A = DirectLimit(chain, name)

    def embed(j, X):
        return Element((StagedPart(chain, j, 1, X),), 1)
    return UhfCertificate(chain, A, embed, name)


def presentation_from_supernatural(eps: Supernatural) -> tuple[DirectLimit, UhfCertificate]:
    """n_j = prod p^{g_j(p)} with g_j = h_j truncated to p_0..p_j."""
    cert = certificate_from_chain(eps.chain(), eps.name or "UHF")
    return cert.presentation, cert


def presentation_from_dims(rule: Callable[[int], int], name: str = "UHF") -> tuple[DirectLimit, UhfCertificate]:
    cert = certificate_from_chain(DimChain(rule, name), name)
    return cert.presentation, cert


def supernatural_from_certificate(cert: UhfCertificate, p: int, fuel: int = 32) -> Iterator[int]:
    """Nondecreasing lower bounds max_{k <= j} v_p(n_k) for j < fuel."""
    best = 0
    for j in range(fuel):
        if cert.stages is not None and j >= cert.stages:
            return
        best = max(best, valuation(cert.chain.n(j), p))
        yield best


def exponents_from_certificate(cert: UhfCertificate, primes: Sequence[int], stage: int) -> dict[int, int]:
    return {p: valuation(cert.chain.n(stage), p) for p in primes}


# ---------------------------------------------------------------------------
# norms, traces, equivalence


def _element(cert: UhfCertificate, pt) -> Element:
    return cert.presentation.value(pt)


def limit_norm(cert: UhfCertificate, pt, k: int) -> DyadicInterval:
    """Certified norm: all units are pushed to the largest referenced stage."""
    return _element(cert, pt).norm(k)


def exact_trace(e: Element) -> GaussianRational:
    """τ ⊗ Tr of a single-part element (normalized for amp 1)."""
    if len(e.parts) != 1:
        raise InputError("trace needs a single-part (factor) element")
    return e.parts[0].trace()


def trace(cert: UhfCertificate, pt, k: int) -> DyadicInterval:
    """Interval of width 3·2^-k around the real part of the trace."""
    t = exact_trace(_element(cert, pt))
    half = Fraction(3, 1 << (k + 1))
    return DyadicInterval(t.re - half, t.re + half)


def trace_disk(cert: UhfCertificate, pt, k: int) -> tuple[GaussianRational, Fraction]:
    """Center and radius 3·2^-k of a disk containing the (complex) trace."""
    return exact_trace(_element(cert, pt)), Fraction(3, 1 << k)


def is_exact_projection(e: Element) -> bool:
    return e.adjoint() == e and e * e == e


@dataclass
class UhfVerdict:
    equivalent: bool
    trace_p: Fraction
    trace_q: Fraction

    @property
    def verdict(self) -> str:
        return "equivalent" if self.equivalent else "inequivalent"


def mvn_decide_uhf(cert: UhfCertificate, p_pt, q_pt) -> UhfVerdict:
    """p ~ q iff τ(p) = τ(q), for exact stage projections (padded to equal size)."""
    p, q = _element(cert, p_pt), _element(cert, q_pt)
    for name, e in (("p", p), ("q", q)):
        if not is_exact_projection(e):
            raise InputError(f"{name} is not an exact projection at any stage")
    n = max(p.amp, q.amp)
    tp, tq = exact_trace(p.pad(n - p.amp)), exact_trace(q.pad(n - q.amp))
    return UhfVerdict(tp == tq, tp.re, tq.re)


# ---------------------------------------------------------------------------
# Q(eps)


@dataclass(frozen=True)
class QEpsilonElement:
    value: Fraction
    stage: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self):
        return str(self.value)


class QEpsilon:
    """The subgroup of Q generated by p^-m, m <= eps(p), via the dims n_j."""

    def __init__(self, dims: Callable[[int], int]):
        self._dims = dims

    @classmethod
    def of(cls, source) -> "QEpsilon":
        if isinstance(source, Supernatural):
            return cls(source.dimension)
        if isinstance(source, UhfCertificate):
            return cls(source.chain.n)
        if isinstance(source, DimChain):
            return cls(source.n)
        raise TypeError("expected a Supernatural, UhfCertificate or DimChain")

    def membership(self, x, fuel: int = 64) -> QEpsilonElement | Unknown:
        """Semidecision: a/b is a member once b | n_j at some explored stage j < fuel."""
        x = Fraction(x)
        b = x.denominator
        for j in range(fuel):
            if self._dims(j) % b == 0:
                return QEpsilonElement(x, j)
        return Unknown(fuel, f"denominator {b} divides no n_j with j < {fuel}")

    @staticmethod
    def add(a: QEpsilonElement, b: QEpsilonElement) -> QEpsilonElement:
        st = None if a.stage is None or b.stage is None else max(a.stage, b.stage)
        return QEpsilonElement(a.value + b.value, st)

    @staticmethod
    def negate(a: QEpsilonElement) -> QEpsilonElement:
        return QEpsilonElement(-a.value, a.stage)

    @staticmethod
    def compare(a: QEpsilonElement, b: QEpsilonElement) -> int:
        return (a.value > b.value) - (a.value < b.value)


# ---------------------------------------------------------------------------
# unit finding


def find_unit(A: CPresentation, unit_label, D=None, fuel: int = 2000, mvn_fuel: int = 200):
    """Locate 1_A from a D(A)-label of its class.

    Projections of A form a c.e. closed set; its balls are enumerated and each
    exact projection center c is compared with the labelled class, c ⊕ 0 ~ p_w.
    In the (stably) finite algebras this applies to, the only projection
    equivalent to 1 is 1 itself.
    """
    from .effective_sets import projections_closed
    from .ktheory import build_D, mvn_equivalent

    D = D if D is not None else build_D(A)
    n_w, target = D.support(unit_label)
    meter = FuelMeter(fuel)
    seen = set()
    for ball in projections_closed(A).balls():
        if not meter.take():
            break
        c = ball.center
        if c in seen:
            continue
        seen.add(c)
        e = A.value(c)
        if not is_exact_projection(e) or e.is_zero():
            continue
        padded = e.pad(n_w - 1) if n_w > 1 else e
        if mvn_equivalent(A, n_w, padded, target, fuel=mvn_fuel) is Answer.YES:
            return ComputablePoint.exact(A, c, "unit")
    return Unknown(meter.spent, f"{len(seen)} projection centers examined")


# ---------------------------------------------------------------------------
# certificate extraction


class _Ambient:
    """Stage structure of a matrix-backed presentation used to build candidates."""

    def __init__(self, A: CPresentation):
        self.A = A
        if isinstance(A, DirectLimit):
            self.chain = A.chain
            self.finite = False
        elif isinstance(A, StandardComplex) or (isinstance(A, Amplified) and isinstance(A.base, StandardComplex)):
            m = A.n if isinstance(A, Amplified) else 1
            self.chain = DimChain(lambda j, m=m: m, A.name)
            self.finite = True
        else:
            raise TypeError("certificate extraction needs a matrix-backed presentation "
                            "(M_m(C) or a direct limit of matrix algebras)")

    def size(self, J: int) -> int:
        return self.chain.n(J)

    def element(self, J: int, M: ExactMatrix) -> Element:
        if self.finite:
            return Element((MatrixPart(1, M.rows, M),), 1)
        return Element((StagedPart(self.chain, J, 1, M),), 1)

    def stage_of(self, e: Element) -> int:
        return 0 if self.finite else e.parts[0].stage

    def matrix(self, e: Element, J: int) -> ExactMatrix:
        part = e.parts[0]
        if self.finite:
            return part.mat
        if part.stage > J:
            low = part.lowest()
            if low.stage > J:
                raise ValueError("element lives beyond the requested stage")
            part = low
        return part.at(J).mat


def _ceil_log2(x: Fraction) -> int:
    """Least integer k with 2^k >= x (x > 0)."""
    k = max(x.numerator.bit_length() - x.denominator.bit_length() - 1, 0)
    while Fraction(1 << k) < x:
        k += 1
    return k


@dataclass
class ExtractedCertificate:
    """Stagewise output of :func:`extract_certificate`."""

    presentation: CPresentation
    dims: list
    systems: list            # systems[j][(r, s)] -> Element (1-based r, s)
    alphas: dict             # (n, t) -> ExactMatrix of coefficients
    residuals: dict          # (n, t) -> certified upper bound of the INV-1 residual
    precisions: list         # k_t used at stage t
    diagnostics: list
    complete: bool = False

    @property
    def stages(self) -> int:
        return len(self.dims)

    def psi(self, j: int, X: ExactMatrix) -> Element:
        if j >= len(self.dims):
            if not self.complete:
                raise StagingError(f"stage {j} was not constructed", 0)
            j = len(self.dims) - 1
        sys = self.systems[j]
        out = self.presentation.zero_element()
        for (r, s), v in X.items():
            out = out + sys[(r + 1, s + 1)].scale(v)
        return out

    def to_certificate(self) -> UhfCertificate:
        dims = list(self.dims)
        chain = DimChain(lambda j: dims[min(j, len(dims) - 1)], "extracted")
        return UhfCertificate(chain, self.presentation, self.psi, "extracted",
                              None if self.complete else len(dims))

    def verify_inv2(self) -> bool:
        """g^{(j)}_{rs} = Σ_ℓ g^{(j+1)}_{r+ℓn_j, s+ℓn_j}, checked exactly."""
        for j in range(len(self.dims) - 1):
            n, n2 = self.dims[j], self.dims[j + 1]
            for r in range(1, n + 1):
                for s in range(1, n + 1):
                    total = self.presentation.zero_element()
                    for ell in range(n2 // n):
                        total = total + self.systems[j + 1][(r + ell * n, s + ell * n)]
                    if total != self.systems[j][(r, s)]:
                        return False
        return True

    def verify_matrix_units(self) -> bool:
        """Exact matrix-unit relations and Σ g_rr = 1 at every stage."""
        unit = self.presentation.unit_element()
        for j, n in enumerate(self.dims):
            g = self.systems[j]
            total = self.presentation.zero_element()
            for r in range(1, n + 1):
                total = total + g[(r, r)]
                for s in range(1, n + 1):
                    if g[(r, s)].adjoint() != g[(s, r)]:
                        return False
                    for s2 in range(1, n + 1):
                        if g[(r, s)] * g[(s, s2)] != g[(r, s2)]:
                            return False
                        for r2 in range(1, n + 1):
                            if r2 != s and not (g[(r, s)] * g[(r2, s2)]).is_zero():
                                return False
            if total != unit:
                return False
        return True

    def verify_inv1(self, k: int = 24) -> bool:
        """‖ρ_n − Σ α^{(n,t')} g^{(t')}‖ < 2^-t' for n < t' (recomputed)."""
        A = self.presentation
        for (n, t), alpha in self.alphas.items():
            if not n < t:
                continue
            approx = self.psi(t, alpha)
            d = (A.value(poly_of_index(n)) - approx).norm(max(k, t + 4))
            if d.hi >= Fraction(1, 1 << t):
                return False
        return True


def extract_certificate(A: CPresentation, stages: int = 5, max_ambient_stage: int = 12,
                        glimm_delta: Callable[[Fraction, int], Fraction] | None = None,
                        unit: Element | None = None) -> ExtractedCertificate:
    """Build (n_t, g^{(t)}) stage by stage so that INV-1 and INV-2 hold.

    At stage t+1 the candidates for the new n_{t+1} x n_{t+1} system are
    canonical matrix-unit systems of the ambient (size m a proper multiple of
    n_t dividing an ambient stage size), tried in order of ambient stage and
    then m; each candidate must pass the unital matrix-unit relations exactly,
    the unit condition (3), and the distance condition (2) at precision
    k_{t+1}.  When the ambient is finite-dimensional and already exhausted
    (n_t^2 = dim A) the construction is complete and the dims stabilize.
    """
    from .effective_sets import matrix_unit_relations, residual_check, RationalBall

    amb = _Ambient(A)
    delta = glimm_delta or (lambda e, n: e / (8 * n * n))
    unit = unit if unit is not None else A.unit_element()
    dims = [1]
    systems = [{(1, 1): unit}]
    alphas: dict = {}
    residuals: dict = {}
    precisions = [0]
    diags: list = []
    dim_A = A.finite_dimension()
    complete = dim_A == 1
    rhos: dict[int, Element] = {}

    def rho(n):
        if n not in rhos:
            rhos[n] = A.value(poly_of_index(n))
        return rhos[n]

    for t in range(stages - 1):
        if complete:
            break
        n_t = dims[t]
        # k_{t+1}
        X = Fraction(1 << (t + 1)) * n_t
        for n in range(t + 1):
            for tp in range(n + 1, t + 1):
                num = n_t * dims[tp] * (rho(n).norm(8).hi + Fraction(1, 1 << tp) + 1)
                gap = Fraction(1, 1 << tp) - residuals[(n, tp)]
                X *= num / gap
        k = _ceil_log2(X)
        tol = Fraction(1, 1 << k)
        found = None
        tried = 0
        for J in range(max_ambient_stage + 1):
            N = amb.size(J)
            for m in range(2 * n_t, N + 1, n_t):
                if N % m:
                    continue
                tried += 1
                f = {(r, s): amb.element(J, embed_blockwise(ExactMatrix.unit(m, r, s), m, N))
                     for r in range(1, m + 1) for s in range(1, m + 1)}
                if _candidate_ok(A, amb, J, m, f, systems[t], n_t, [rho(n) for n in range(t + 1)], tol):
                    found = (J, m, f)
                    break
            if found or amb.finite:
                break
        if found is None:
            if dim_A is not None and n_t * n_t == dim_A:
                complete = True
                diags.append(f"stage {t + 1}: ambient exhausted at n = {n_t}; dims stabilize")
                break
            diags.append(f"stage {t + 1}: no extension among {tried} candidates "
                         f"(ambient stages <= {max_ambient_stage}, k = {k})")
            break
        J, m, f = found
        # the S_0 test of the unital matrix-unit relations, recomputed at the tolerance
        R = matrix_unit_relations(m, unital=True)
        ball = RationalBall(tuple(f[(r, s)] for r in range(1, m + 1) for s in range(1, m + 1)),
                            Fraction(1, 1 << k))
        if not residual_check(A, R, ball, 0):
            diags.append(f"stage {t + 1}: candidate failed the matrix-unit relation check")
            break
        dims.append(m)
        systems.append(f)
        precisions.append(k)
        # backwards recursion: with canonical systems the lower stages are unchanged
        for n in range(t + 1):
            alpha, res = _coefficients(amb, J, m, rho(n), t + 1)
            alphas[(n, t + 1)] = alpha
            residuals[(n, t + 1)] = res
            if res >= Fraction(1, 1 << (t + 1)):
                diags.append(f"stage {t + 1}: rho_{n} residual {res} not below 2^-{t + 1}")
        diags.append(f"stage {t + 1}: n = {m} at ambient stage {J}, k = {k}, "
                     f"glimm delta = {delta(tol, m)}")
    if dim_A is not None and dims[-1] ** 2 == dim_A:
        complete = True
    return ExtractedCertificate(A, dims, systems, alphas, residuals, precisions, diags, complete)


def _coefficients(amb: _Ambient, J: int, m: int, x: Element, t: int) -> tuple[ExactMatrix, Fraction]:
    """α_rs = m·τ(f_sr x) for the canonical system of size m at stage J, and the residual bound."""
    Jx = max(J, amb.stage_of(x))
    N = amb.size(Jx)
    M = amb.matrix(x, Jx)
    copies = N // m
    d = {}
    for r in range(m):
        for s in range(m):
            total = GaussianRational(0)
            for ell in range(copies):
                v = M[ell * m + r, ell * m + s]
                if v:
                    total = total + v
            if total:
                d[(r, s)] = total / copies
    alpha = ExactMatrix(m, m, d)
    approx = embed_blockwise(alpha, m, N)
    diff = M - approx
    if diff.is_zero():
        return alpha, Fraction(0)
    from .exact import certified_opnorm
    return alpha, certified_opnorm(diff, t + 8).hi


def _candidate_ok(A, amb, J, m, f, g_prev, n_t, F, tol) -> bool:
    # condition (3): old units are sums of new diagonal blocks
    for r in range(1, n_t + 1):
        for s in range(1, n_t + 1):
            total = A.zero_element()
            for j in range(m // n_t):
                total = total + f[(r + j * n_t, s + j * n_t)]
            diff = g_prev[(r, s)] - total
            if not diff.is_zero() and diff.norm(8 + tol.denominator.bit_length()).hi >= tol:
                return False
    # condition (2): each rho in F is within tol of the span
    for x in F:
        _, res = _coefficients(amb, J, m, x, tol.denominator.bit_length())
        if res >= tol:
            return False
    return True
