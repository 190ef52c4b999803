"""Exact Gaussian-rational arithmetic and certified operator norms.

Everything here is pure integer/``Fraction`` arithmetic.  The operator norm of
an exact matrix is obtained from the characteristic polynomial of ``M*M``: the
largest root is isolated with a Sturm sequence and its square root is bracketed
with integer square roots, so the returned interval is a proof, not an estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Iterator, Sequence

from .errors import DimensionError

Rational = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(x)


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with both parts stored as ``Fraction``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def of(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("complex floats are not accepted in exact arithmetic")
        return cls(x, 0)

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse forms such as ``3/4``, ``-i``, ``1/2+3/5i``, ``2i``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        # split at the last sign that is not in leading position
        cut = None
        for pos in range(len(s) - 1, 0, -1):
            if s[pos] in "+-" and s[pos - 1] not in "eE/":
                cut = pos
                break
        if s.endswith("i"):
            if cut is None:
                real_txt, imag_txt = "", s[:-1]
            else:
                real_txt, imag_txt = s[:cut], s[cut:-1]
            if imag_txt in ("", "+"):
                imag = Fraction(1)
            elif imag_txt == "-":
                imag = Fraction(-1)
            else:
                imag = Fraction(imag_txt)
            real = Fraction(real_txt) if real_txt else Fraction(0)
            return cls(real, imag)
        return cls(Fraction(s), 0)

    # arithmetic
    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.of(other)
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        if self.im == 0:
            return GaussianRational(self.re * o.re, self.re * o.im)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussianRational(o.re / d, -o.im / d)

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, always rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"


def _imag_str(x: Fraction) -> str:
    if x == 1:
        return "i"
    if x == -1:
        return "-i"
    return f"{x}i"


ZERO = GaussianRational(0, 0)
ONE = GaussianRational(1, 0)
I = GaussianRational(0, 1)


@dataclass(frozen=True)
class DyadicInterval:
    """A closed rational interval ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = _frac(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "DyadicInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


# ---------------------------------------------------------------------------
# square roots


def sqrt_lower(x: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits that is <= sqrt(x) (x >= 0)."""
    if x <= 0:
        return Fraction(0)
    scaled = x * (1 << (2 * bits))
    return Fraction(isqrt(scaled.numerator // scaled.denominator), 1 << bits)


def sqrt_upper(x: Fraction, bits: int) -> Fraction:
    """Smallest multiple of 2^-bits that is >= sqrt(x) (x >= 0)."""
    if x <= 0:
        return Fraction(0)
    scaled = x * (1 << (2 * bits))
    c = -((-scaled.numerator) // scaled.denominator)  # ceiling
    s = isqrt(c)
    if s * s < c:
        s += 1
    return Fraction(s, 1 << bits)


def exact_sqrt(x: Fraction) -> Fraction | None:
    """sqrt(x) if it is rational, else None."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def modulus_interval(z: GaussianRational, bits: int = 64) -> DyadicInterval:
    """Certified bracket for |z|; degenerate when |z| is rational."""
    a2 = z.abs2()
    r = exact_sqrt(a2)
    if r is not None:
        return DyadicInterval(r, r)
    return DyadicInterval(sqrt_lower(a2, bits), sqrt_upper(a2, bits))


# ---------------------------------------------------------------------------
# matrices


class ExactMatrix:
    """Sparse exact matrix over Q(i).

    Only nonzero entries are stored.  Indices are 0-based internally; the
    ``unit`` constructor follows the usual 1-based matrix-unit convention.
    """

    __slots__ = ("rows", "cols", "_d", "_key")

    def __init__(self, rows: int, cols: int, data: dict | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative dimension")
        self.rows = rows
        self.cols = cols
        d = {}
        if data:
            for (i, j), v in data.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise DimensionError(f"entry ({i},{j}) outside {rows}x{cols}")
                v = GaussianRational.of(v)
                if v:
                    d[(i, j)] = v
        self._d = d
        self._key = None

    @classmethod
    def _raw(cls, rows, cols, d) -> "ExactMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m._d, m._key = rows, cols, d, None
        return m

    # constructors
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        data = {}
        for i, row in enumerate(rows):
            if len(row) != c:
                raise DimensionError("ragged rows")
            for j, v in enumerate(row):
                if isinstance(v, str):
                    v = GaussianRational.parse(v)
                data[(i, j)] = v
        return cls(r, c, data)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence) -> "ExactMatrix":
        if len(entries) != rows * cols:
            raise DimensionError("entries length must equal rows*cols")
        return cls(rows, cols, {(k // cols, k % cols): v for k, v in enumerate(entries)})

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        return cls._raw(rows, rows if cols is None else cols, {})

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls._raw(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def unit(cls, n: int, r: int, s: int) -> "ExactMatrix":
        """Matrix unit E_{r,s} in M_n (1-based)."""
        if not (1 <= r <= n and 1 <= s <= n):
            raise DimensionError(f"matrix unit E_{r},{s} outside M_{n}")
        return cls._raw(n, n, {(r - 1, s - 1): ONE})

    @classmethod
    def diag(cls, values: Iterable) -> "ExactMatrix":
        vals = list(values)
        return cls(len(vals), len(vals), {(i, i): v for i, v in enumerate(vals)})

    @classmethod
    def scalar(cls, value) -> "ExactMatrix":
        return cls(1, 1, {(0, 0): value})

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> GaussianRational:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._d.get((i, j), ZERO)

    def items(self):
        return self._d.items()

    @property
    def nnz(self) -> int:
        return len(self._d)

    @property
    def entries(self) -> tuple[GaussianRational, ...]:
        """Row-major entry sequence."""
        return tuple(self._d.get((i, j), ZERO)
                     for i in range(self.rows) for j in range(self.cols))

    def to_rows(self) -> list[list[GaussianRational]]:
        return [[self._d.get((i, j), ZERO) for j in range(self.cols)]
                for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not self._d

    # algebra
    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        d = dict(self._d)
        for k, v in other._d.items():
            w = d.get(k)
            w = v if w is None else w + v
            if w:
                d[k] = w
            else:
                d.pop(k, None)
        return ExactMatrix._raw(self.rows, self.cols, d)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.rows, self.cols, {k: -v for k, v in self._d.items()})

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        c = GaussianRational.of(c)
        if not c:
            return ExactMatrix.zeros(self.rows, self.cols)
        return ExactMatrix._raw(self.rows, self.cols, {k: v * c for k, v in self._d.items()})

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list] = {}
        for (k, j), v in other._d.items():
            by_row.setdefault(k, []).append((j, v))
        d: dict = {}
        for (i, k), a in self._d.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                w = d.get(key)
                d[key] = a * b if w is None else w + a * b
        return ExactMatrix._raw(self.rows, other.cols, {k: v for k, v in d.items() if v})

    __mul__ = __matmul__

    def adjoint(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.cols, self.rows,
                                {(j, i): v.conj() for (i, j), v in self._d.items()})

    @property
    def H(self) -> "ExactMatrix":
        return self.adjoint()

    def trace_sum(self) -> GaussianRational:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        t = ZERO
        for (i, j), v in self._d.items():
            if i == j:
                t = t + v
        return t

    def is_hermitian(self) -> bool:
        return self.is_square and self == self.adjoint()

    def is_projection(self) -> bool:
        return self.is_hermitian() and self @ self == self

    def frobenius2(self) -> Fraction:
        return sum((v.abs2() for v in self._d.values()), Fraction(0))

    # structure
    def kron_identity(self, copies: int) -> "ExactMatrix":
        """I_copies ⊗ self (block-diagonal duplication)."""
        r, c = self.rows, self.cols
        d = {}
        for ell in range(copies):
            for (i, j), v in self._d.items():
                d[(i + ell * r, j + ell * c)] = v
        return ExactMatrix._raw(r * copies, c * copies, d)

    def kron_right_identity(self, copies: int) -> "ExactMatrix":
        """self ⊗ I_copies (every entry becomes a scalar block)."""
        d = {}
        for (i, j), v in self._d.items():
            for a in range(copies):
                d[(i * copies + a, j * copies + a)] = v
        return ExactMatrix._raw(self.rows * copies, self.cols * copies, d)

    @staticmethod
    def block_diag(*mats: "ExactMatrix") -> "ExactMatrix":
        d = {}
        r0 = c0 = 0
        for m in mats:
            for (i, j), v in m._d.items():
                d[(i + r0, j + c0)] = v
            r0 += m.rows
            c0 += m.cols
        return ExactMatrix._raw(r0, c0, d)

    def pad(self, rows: int, cols: int | None = None) -> "ExactMatrix":
        """Embed in the top-left corner of a larger zero matrix."""
        cols = rows if cols is None else cols
        if rows < self.rows or cols < self.cols:
            raise DimensionError("padding cannot shrink a matrix")
        return ExactMatrix._raw(rows, cols, dict(self._d))

    def place(self, rows: int, cols: int, r0: int, c0: int) -> "ExactMatrix":
        """Copy of self positioned with top-left corner at (r0, c0)."""
        if r0 + self.rows > rows or c0 + self.cols > cols:
            raise DimensionError("placement outside target")
        return ExactMatrix._raw(rows, cols, {(i + r0, j + c0): v for (i, j), v in self._d.items()})

    def block(self, r0: int, c0: int, h: int, w: int) -> "ExactMatrix":
        d = {(i - r0, j - c0): v for (i, j), v in self._d.items()
             if r0 <= i < r0 + h and c0 <= j < c0 + w}
        return ExactMatrix._raw(h, w, d)

    def principal(self, idx: Sequence[int]) -> "ExactMatrix":
        pos = {g: k for k, g in enumerate(idx)}
        d = {(pos[i], pos[j]): v for (i, j), v in self._d.items() if i in pos and j in pos}
        return ExactMatrix._raw(len(idx), len(idx), d)

    def rotate_plane(self, i: int, j: int, c: Fraction, s: Fraction) -> "ExactMatrix":
        """R X R^T for the rotation R acting on coordinates (i, j).

        R e_i = c e_i + s e_j and R e_j = -s e_i + c e_j; with c^2 + s^2 = 1 the
        conjugate stays in Q(i) and has the same spectrum.
        """
        if not self.is_square:
            raise DimensionError("rotation needs a square matrix")
        c = GaussianRational.of(c)
        s = GaussianRational.of(s)
        d = dict(self._d)
        # left multiplication: rows i, j
        rows = {}
        for (a, b), v in self._d.items():
            if a == i or a == j:
                rows.setdefault(b, [ZERO, ZERO])[0 if a == i else 1] = v
        for b, (vi, vj) in rows.items():
            for a, val in ((i, c * vi - s * vj), (j, s * vi + c * vj)):
                if val:
                    d[(a, b)] = val
                else:
                    d.pop((a, b), None)
        cols = {}
        for (a, b), v in d.items():
            if b == i or b == j:
                cols.setdefault(a, [ZERO, ZERO])[0 if b == i else 1] = v
        for a, (vi, vj) in cols.items():
            for b, val in ((i, c * vi - s * vj), (j, s * vi + c * vj)):
                if val:
                    d[(a, b)] = val
                else:
                    d.pop((a, b), None)
        return ExactMatrix._raw(self.rows, self.cols, d)

    def components(self) -> list[list[int]]:
        """Connected components of the index graph of a square matrix."""
        n = self.rows
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (i, j) in self._d:
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
        groups: dict[int, list[int]] = {}
        for x in range(n):
            groups.setdefault(find(x), []).append(x)
        return list(groups.values())

    # identity
    def key(self):
        if self._key is None:
            self._key = (self.rows, self.cols, frozenset(self._d.items()))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self._d == other._d

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, {self.to_rows()})"

    def __str__(self):
        return "[" + "; ".join(", ".join(str(v) for v in row) for row in self.to_rows()) + "]"


# ---------------------------------------------------------------------------
# polynomials over Q (coefficient lists, lowest degree first)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_deriv(p: Sequence[Fraction]) -> list[Fraction]:
    return _trim([p[i] * i for i in range(1, len(p))])


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
    return _trim(q), _trim(a)


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_part(p: Sequence[Fraction]) -> list[Fraction]:
    p = _trim(list(p))
    g = poly_gcd(p, poly_deriv(p))
    if len(g) <= 1:
        return p
    q, _ = poly_divmod(p, g)
    return q


def sturm_sequence(p: Sequence[Fraction]) -> list[list[Fraction]]:
    seq = [_trim(list(p)), poly_deriv(p)]
    while seq[-1]:
        _, r = poly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values: Iterable[Fraction]) -> int:
    count = 0
    last = 0
    for v in values:
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count


def roots_above(seq: list[list[Fraction]], x: Fraction) -> int:
    """Number of distinct real roots strictly greater than x."""
    at_x = _sign_changes(poly_eval(s, x) for s in seq)
    at_inf = _sign_changes(s[-1] for s in seq)
    return at_x - at_inf


def charpoly(M: ExactMatrix) -> list[GaussianRational]:
    """det(x I - M) via Hessenberg reduction (coefficients lowest first)."""
    if not M.is_square:
        raise DimensionError("characteristic polynomial of a non-square matrix")
    n = M.rows
    H = M.to_rows()
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if H[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        t = H[m][m - 1]
        for i in range(m + 1, n):
            if not H[i][m - 1]:
                continue
            u = H[i][m - 1] / t
            Hi, Hm = H[i], H[m]
            for j in range(n):
                if Hm[j]:
                    Hi[j] = Hi[j] - u * Hm[j]
            for row in H:
                if row[i]:
                    row[m] = row[m] + u * row[i]
    # recurrence on leading principal blocks of the Hessenberg form
    polys: list[list[GaussianRational]] = [[ONE]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        h = H[k - 1][k - 1]
        cur = [ZERO] + list(prev)
        for i, c in enumerate(prev):
            cur[i] = cur[i] - h * c
        prod = ONE
        for i in range(k - 2, -1, -1):
            prod = prod * H[i + 1][i]
            if not prod:
                break
            f = H[i][k - 1] * prod
            if f:
                for d, c in enumerate(polys[i]):
                    cur[d] = cur[d] - f * c
        polys.append(cur)
    return polys[n]


def _hermitian_charpoly(Hm: ExactMatrix) -> list[Fraction]:
    cp = charpoly(Hm)
    if any(c.im != 0 for c in cp):  # pragma: no cover - Hermitian input guarantees this
        raise ArithmeticError("non-real characteristic polynomial for Hermitian matrix")
    return [c.re for c in cp]


@dataclass(frozen=True)
class _RootBracket:
    """Largest eigenvalue of a PSD block, either exact or bracketed."""

    lo: Fraction
    hi: Fraction
    seq: tuple | None
    exact: bool


def _largest_root_bracket(Hm: ExactMatrix) -> _RootBracket:
    n = Hm.rows
    if n == 1:
        v = Hm[0, 0].re
        return _RootBracket(v, v, None, True)
    p = _hermitian_charpoly(Hm)
    q = squarefree_part(p)
    if len(q) == 2:  # single distinct eigenvalue
        v = -q[0] / q[1]
        return _RootBracket(v, v, None, True)
    seq = sturm_sequence(q)
    hi = Hm.trace_sum().re
    return _RootBracket(Fraction(-1), max(hi, Fraction(0)), tuple(tuple(s) for s in seq), False)


def _refine(br: _RootBracket, target_width: Fraction) -> _RootBracket:
    if br.exact or br.hi - br.lo <= target_width:
        return br
    seq = [list(s) for s in br.seq]
    q = seq[0]
    lo, hi = br.lo, br.hi
    while hi - lo > target_width:
        mid = (lo + hi) / 2
        # snap to a short dyadic to keep numbers small
        mid = _dyadic_between(lo, hi, mid)
        if roots_above(seq, mid) >= 1:
            lo = mid
        else:
            if poly_eval(q, mid) == 0:
                return _RootBracket(mid, mid, br.seq, True)
            hi = mid
    return _RootBracket(lo, hi, br.seq, False)


def _dyadic_between(lo: Fraction, hi: Fraction, mid: Fraction) -> Fraction:
    width = hi - lo
    bits = max(0, -(width.numerator.bit_length() - width.denominator.bit_length()) + 2)
    scale = 1 << bits
    m = Fraction(round(mid * scale), scale)
    if lo < m < hi:
        return m
    return mid


class _BlockCache:
    """Memo of largest-eigenvalue brackets keyed by the exact block."""

    def __init__(self, limit: int = 4096):
        self.limit = limit
        self.data: dict = {}

    def get(self, key):
        return self.data.get(key)

    def put(self, key, value):
        if len(self.data) >= self.limit:
            self.data.clear()
        self.data[key] = value


_cache = _BlockCache()


def _gram_blocks(M: ExactMatrix) -> list[ExactMatrix]:
    G = M.adjoint() @ M if M.rows >= M.cols else M @ M.adjoint()
    blocks = []
    seen = set()
    for comp in G.components():
        B = G.principal(comp)
        if B.is_zero():
            continue
        k = B.key()
        if k in seen:
            continue
        seen.add(k)
        blocks.append(B)
    return blocks


def largest_eigen_bracket(Hm: ExactMatrix, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bracket [lo, hi] of width <= ``width`` for the top eigenvalue of PSD ``Hm``."""
    key = Hm.key()
    br = _cache.get(key)
    if br is None:
        br = _largest_root_bracket(Hm)
    br = _refine(br, width)
    _cache.put(key, br)
    return br.lo, br.hi


def certified_opnorm(M: ExactMatrix, k: int) -> DyadicInterval:
    """Interval of width <= 2^-k containing the operator norm of M."""
    if k < 0:
        raise ValueError("precision exponent must be nonnegative")
    if M.is_zero():
        return DyadicInterval(0, 0)
    blocks = _gram_blocks(M)
    eps = Fraction(1, 1 << k)
    bits = k + 3
    # per-block norm brackets; the max of brackets brackets the max
    lo_best = Fraction(0)
    hi_best = Fraction(0)
    wanted = Fraction(1, 1 << (k + 2))
    for B in blocks:
        # width in lambda needed for width ~eps/4 in sqrt: d(sqrt) <= d(lambda)/(2 sqrt(lo))
        lam_width = wanted * wanted
        lo_l, hi_l = largest_eigen_bracket(B, lam_width)
        while True:
            if lo_l == hi_l:
                r = exact_sqrt(lo_l)
                if r is not None:
                    lo_n = hi_n = r
                else:
                    lo_n, hi_n = sqrt_lower(lo_l, bits), sqrt_upper(lo_l, bits)
            else:
                lo_n = sqrt_lower(max(lo_l, Fraction(0)), bits)
                hi_n = sqrt_upper(hi_l, bits)
            if hi_n - lo_n <= eps / 2:
                break
            lam_width = lam_width / 16
            bits += 2
            lo_l, hi_l = largest_eigen_bracket(B, lam_width)
        lo_best = max(lo_best, lo_n)
        hi_best = max(hi_best, hi_n)
    if hi_best - lo_best > eps:  # pragma: no cover - each bracket is narrow enough
        raise ArithmeticError("norm bracket failed to converge")
    return DyadicInterval(lo_best, hi_best)


def norm_bounds(M: ExactMatrix, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational (lower bound of max entry modulus, upper bound of sum of moduli).

    Both are exact when the entry moduli are rational.
    """
    mx = Fraction(0)
    total = Fraction(0)
    for v in M._d.values():
        iv = modulus_interval(v, bits)
        mx = max(mx, iv.lo)
        total += iv.hi
    return mx, total


def trace_exact(M: ExactMatrix) -> GaussianRational:
    """Normalized trace: sum of the diagonal divided by the dimension."""
    if not M.is_square:
        raise DimensionError(f"trace of non-square {M.rows}x{M.cols} matrix")
    if M.rows == 0:
        raise DimensionError("trace of an empty matrix")
    return M.trace_sum() / M.rows


def rank(M: ExactMatrix) -> int:
    """Exact rank by Gaussian elimination."""
    rows = [dict() for _ in range(M.rows)]
    for (i, j), v in M.items():
        rows[i][j] = v
    rows = [r for r in rows if r]
    r = 0
    while rows:
        row = rows.pop()
        # pick pivot column
        col = min(row)
        pv = row[col]
        new_rows = []
        for other in rows:
            f = other.get(col)
            if f:
                f = f / pv
                for c, v in row.items():
                    w = other.get(c, ZERO) - f * v
                    if w:
                        other[c] = w
                    else:
                        other.pop(c, None)
            if other:
                new_rows.append(other)
        rows = new_rows
        r += 1
    return r


def iter_nonzero(M: ExactMatrix) -> Iterator[tuple[int, int, GaussianRational]]:
    for (i, j), v in sorted(M.items()):
        yield i, j, v
