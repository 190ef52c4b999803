"""Fixed computable bijections: Cantor pairing, rationals, finite sequences.

Every search in the package walks one of these orders, so they are part of
the observable behaviour and must never change silently.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Sequence

from .exact import GaussianRational


def pair(a: int, b: int) -> int:
    """Cantor pairing <a, b> = (a+b)(a+b+1)/2 + b."""
    if a < 0 or b < 0:
        raise ValueError("pairing is defined on naturals")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("unpairing is defined on naturals")
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def triple(a: int, b: int, c: int) -> int:
    """(a, b, c) -> <a, <b, c>>."""
    return pair(a, pair(b, c))


def untriple(n: int) -> tuple[int, int, int]:
    a, rest = unpair(n)
    b, c = unpair(rest)
    return a, b, c


# ---------------------------------------------------------------------------
# rationals: 0, then Calkin-Wilf positives interleaved with negatives


def _calkin_wilf(n: int) -> Fraction:
    a, b = 1, 1
    for bit in bin(n)[3:]:
        if bit == "0":
            b = a + b
        else:
            a = a + b
    return Fraction(a, b)


def _calkin_wilf_index(q: Fraction) -> int:
    a, b = q.numerator, q.denominator
    runs: list[tuple[int, int]] = []
    while a != b:
        if a < b:
            k = (b - 1) // a
            b -= k * a
            runs.append((0, k))
        else:
            k = (a - 1) // b
            a -= k * b
            runs.append((1, k))
    n = 1
    for bit, count in reversed(runs):
        n = (n << count) | (((1 << count) - 1) if bit else 0)
    return n


def rational_of(n: int) -> Fraction:
    if n < 0:
        raise ValueError("index must be a natural number")
    if n == 0:
        return Fraction(0)
    if n % 2 == 1:
        return _calkin_wilf((n + 1) // 2)
    return -_calkin_wilf(n // 2)


def index_of_rational(q) -> int:
    q = Fraction(q)
    if q == 0:
        return 0
    if q > 0:
        return 2 * _calkin_wilf_index(q) - 1
    return 2 * _calkin_wilf_index(-q)


def gaussian_of(n: int) -> GaussianRational:
    a, b = unpair(n)
    return GaussianRational(rational_of(a), rational_of(b))


def index_of_gaussian(z) -> int:
    z = GaussianRational.of(z)
    return pair(index_of_rational(z.re), index_of_rational(z.im))


# ---------------------------------------------------------------------------
# finite sequences of naturals, graded by weight sum(g_i + 1)


def nonempty_seq_index(seq: Sequence[int]) -> int:
    """Bijection from nonempty sequences of naturals onto N.

    Sequences are grouped by weight W = sum(g + 1); there are 2^(W-1) of each
    weight (compositions of W) and inside a weight they are ordered by the bit
    string of the composition.
    """
    if not seq:
        raise ValueError("sequence must be nonempty")
    bits = []
    for pos, g in enumerate(seq):
        if g < 0:
            raise ValueError("entries must be naturals")
        bits.append("0" * g)
        if pos < len(seq) - 1:
            bits.append("1")
    w = sum(seq) + len(seq)
    s = "".join(bits)
    return (1 << (w - 1)) - 1 + (int(s, 2) if s else 0)


def nonempty_seq_of(n: int) -> tuple[int, ...]:
    if n < 0:
        raise ValueError("index must be a natural number")
    w = (n + 1).bit_length()
    r = n - ((1 << (w - 1)) - 1)
    s = format(r, "b").zfill(w - 1) if w > 1 else ""
    out = []
    run = 0
    for ch in s:
        if ch == "0":
            run += 1
        else:
            out.append(run)
            run = 0
    out.append(run)
    return tuple(out)


def seq_index(seq: Sequence[int]) -> int:
    """Bijection from all finite sequences (empty allowed) onto N."""
    return 0 if not seq else 1 + nonempty_seq_index(seq)


def seq_of(n: int) -> tuple[int, ...]:
    return () if n == 0 else nonempty_seq_of(n - 1)
