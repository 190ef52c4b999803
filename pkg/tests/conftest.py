from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest

from cstark.exact import ExactMatrix, GaussianRational


def random_gaussian(rng: random.Random, bound: int = 10) -> GaussianRational:
    def q():
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    return GaussianRational(q(), q())


def random_matrix(rng: random.Random, n: int, bound: int = 10) -> ExactMatrix:
    return ExactMatrix.from_rows([[random_gaussian(rng, bound) for _ in range(n)] for _ in range(n)])


def mp_matrix(M: ExactMatrix) -> mpmath.matrix:
    rows = M.to_rows()
    return mpmath.matrix([[mpmath.mpc(mpmath.mpf(v.re.numerator) / v.re.denominator,
                                      mpmath.mpf(v.im.numerator) / v.im.denominator)
                           for v in row] for row in rows])


def mp_opnorm(M: ExactMatrix, dps: int = 60) -> mpmath.mpf:
    """Largest singular value computed independently with mpmath."""
    with mpmath.workdps(dps):
        s = mpmath.svd_c(mp_matrix(M), compute_uv=False)
        return max(abs(x) for x in s)


@pytest.fixture
def rng():
    return random.Random(20261018)


def contains_mp(lo: Fraction, hi: Fraction, value, slack_bits: int = 50) -> bool:
    """lo - 2^-slack <= value <= hi + 2^-slack with the bounds converted exactly."""
    with mpmath.workdps(60):
        slack = mpmath.mpf(2) ** -slack_bits
        lo_m = mpmath.mpf(lo.numerator) / lo.denominator
        hi_m = mpmath.mpf(hi.numerator) / hi.denominator
        return lo_m - slack <= value <= hi_m + slack


# acceptance criteria register their outcome here; printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
