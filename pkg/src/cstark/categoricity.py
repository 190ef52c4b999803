"""Effective isomorphisms between UHF algebras with equal supernatural numbers.

Two certificates (m_k, φ_k) for A and (n_l, ψ_l) for B are interleaved by
divisibility: m_{k_j} | n_{l_j} | m_{k_{j+1}}.  The maps
γ_j = ψ_{l_j} ∘ E ∘ φ_{k_j}^{-1}, with E the canonical embedding, are
compatible and extend to an isomorphism γ̄: A -> B.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .concrete import Element, StagedPart, embed_blockwise
from .errors import InputError, SupernaturalMismatchSuspected
from .exact import ExactMatrix
from .ktheory import StarHom
from .results import Unknown
from .uhf import UhfCertificate, exact_trace

# approximate homomorphism constant: ‖γ̄(ρσ) - γ̄(ρ)γ̄(σ)‖ <= HOM_CONSTANT·2^-k for
# ‖ρ‖, ‖σ‖ <= 1 (one 2^-k error per factor plus one for the product)
HOM_CONSTANT = 3


@dataclass
class Interleaving:
    """Stage indices with m_{k_j} | n_{l_j} and n_{l_j} | m_{k_{j+1}}."""

    k_seq: list[int]
    l_seq: list[int]
    m_dims: list[int] = field(default_factory=list)
    n_dims: list[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.l_seq)

    def check(self) -> bool:
        for j in range(self.depth):
            if self.n_dims[j] % self.m_dims[j]:
                return False
            if j + 1 < len(self.k_seq) and self.m_dims[j + 1] % self.n_dims[j]:
                return False
        return True

    def table(self) -> list[tuple[int, int, int, int, int]]:
        """Rows (j, k_j, m_{k_j}, l_j, n_{l_j})."""
        return [(j, self.k_seq[j], self.m_dims[j], self.l_seq[j], self.n_dims[j])
                for j in range(self.depth)]


def interleave(certA: UhfCertificate, certB: UhfCertificate, J: int, fuel: int = 64) -> Interleaving:
    """Minimal choices to depth J: k_0 = 0, l_j least above all earlier l's with
    m_{k_j} | n_{l_j}, k_{j+1} least above k_j with n_{l_j} | m_{k_{j+1}}.

    Each search looks at most ``fuel`` stages past its starting point.
    """
    ks, ls, ms, ns = [0], [], [certA.n(0)], []
    for j in range(J):
        m = ms[j]
        start = (ls[-1] if ls else -1) + 1
        for l in range(start, start + fuel):
            if certB.n(l) % m == 0:
                break
        else:
            raise SupernaturalMismatchSuspected(j, start + fuel)
        ls.append(l)
        ns.append(certB.n(l))
        if j + 1 == J:
            break
        start = ks[j] + 1
        for k in range(start, start + fuel):
            if certA.n(k) % ns[j] == 0:
                break
        else:
            raise SupernaturalMismatchSuspected(j, start + fuel)
        ks.append(k)
        ms.append(certA.n(k))
    return Interleaving(ks, ls, ms, ns)


@dataclass
class IsoImage:
    """γ_j(ρ′) together with the data used to produce it."""

    element: Element
    j: int
    k_j: int
    l_j: int
    rho_prime: ExactMatrix
    error_bound: Fraction

    def point(self, B):
        return B.point_of(self.element) if hasattr(B, "point_of") else None


def _pow2(k: int) -> Fraction:
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k)


def _preimage(cert: UhfCertificate, e: Element, k: int, bound: Fraction) -> ExactMatrix | None:
    """A matrix ρ′ at stage k with ‖φ_k(ρ′) - e‖ < bound, or None."""
    n = cert.n(k)
    cands = []
    part = e.parts[0] if len(e.parts) == 1 else None
    if isinstance(part, StagedPart) and part.chain is cert.chain and part.stage <= k and e.amp == 1:
        cands.append(part.at(k).mat)
    else:
        # conditional expectation coefficients n·τ(φ_k(E_sr) e)
        d = {}
        for r in range(1, n + 1):
            for s in range(1, n + 1):
                c = exact_trace(cert.unit(k, s, r) * e) * n
                if c:
                    d[(r - 1, s - 1)] = c
        cands.append(ExactMatrix(n, n, d))
    for rho in cands:
        diff = cert.psi(k, rho) - e
        if diff.is_zero() or diff.norm(_bits(bound) + 4).hi < bound:
            return rho
    return None


def _bits(bound: Fraction) -> int:
    k = 0
    while _pow2(k) > bound:
        k += 1
    return k


def iso_approx(certA: UhfCertificate, certB: UhfCertificate, pt, k: int,
               interleaving: Interleaving | None = None, fuel: int = 32) -> IsoImage | Unknown:
    """Rational approximant within 2^-k of γ̄(pt).

    Finds the first j with ‖φ_{k_j}(ρ′) - ρ‖ < 2^-(k+1) and returns
    ψ_{l_j}(E(ρ′)); ``fuel`` bounds the number of interleaving steps tried.
    """
    e = certA.presentation.value(pt)
    if e.amp != 1:
        raise InputError("iso_approx takes points of the algebra itself")
    il = interleaving if interleaving is not None and interleaving.depth >= fuel \
        else interleave(certA, certB, fuel)
    bound = _pow2(k + 1)
    for j in range(min(fuel, il.depth)):
        kj, lj = il.k_seq[j], il.l_seq[j]
        rho = _preimage(certA, e, kj, bound)
        if rho is None:
            continue
        X = embed_blockwise(rho, il.m_dims[j], il.n_dims[j])
        return IsoImage(certB.psi(lj, X), j, kj, lj, rho, bound)
    return Unknown(min(fuel, il.depth), f"no stage within 2^-{k + 1} among {fuel} interleaving steps")


def _block(M: ExactMatrix, size: int, r: int, s: int) -> ExactMatrix:
    d = {}
    for (i, j), v in M.items():
        if i // size == r and j // size == s:
            d[(i - r * size, j - s * size)] = v
    return ExactMatrix(size, size, d)


def iso_hom(certA: UhfCertificate, certB: UhfCertificate, depth: int = 32) -> StarHom:
    """γ̄ on M_n(A) for exact stage elements, applied blockwise."""
    il = interleave(certA, certB, depth)

    def apply(e: Element) -> Element:
        part = e.parts[0]
        if not isinstance(part, StagedPart) or part.chain is not certA.chain:
            raise InputError("iso_hom acts on exact stage elements of the source certificate")
        j = next(i for i in range(il.depth) if il.k_seq[i] >= part.stage)
        big = part.at(il.k_seq[j])
        m, nl = il.m_dims[j], il.n_dims[j]
        out = certB.presentation.zero_element(e.amp)
        for r in range(e.amp):
            for s in range(e.amp):
                X = _block(big.mat, m, r, s)
                if X.is_zero():
                    continue
                img = certB.psi(il.l_seq[j], embed_blockwise(X, m, nl))
                out = out + img.place(e.amp, r, s) if e.amp > 1 else out + img
        return out

    return StarHom(certA.presentation, certB.presentation, apply,
                   f"{certA.name}->{certB.name}")
