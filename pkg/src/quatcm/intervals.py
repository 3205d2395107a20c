"""Certified real arithmetic helpers on top of mpmath's interval context.

Every numeric comparison in the library routes through decide()/refine so that
signs are rigorous: an answer is only returned once the interval excludes the
boundary, and IndeterminateSign is raised at the precision cap.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import iv
from mpmath.libmp import from_rational

from .errors import IndeterminateSign

PREC_START = 64
PREC_CAP = 4096  # 2^12 bits, the configured hard cap


def iv_from_fraction(x: Fraction):
    """Interval guaranteed to contain the exact rational x at current iv.prec."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    lo = mpmath.mpf(from_rational(p, q, iv.prec, "f"))
    hi = mpmath.mpf(from_rational(p, q, iv.prec, "c"))
    return iv.mpf((lo, hi))


def iv_sign(x) -> int:
    """Sign of an interval if determined, else None."""
    if x.a > 0:
        return 1
    if x.b < 0:
        return -1
    return None


def decide(compute, *, start=PREC_START, cap=PREC_CAP, what="sign"):
    """Run compute() at increasing precision until it returns a non-None verdict.

    compute is called with iv.prec already set; it must derive everything from
    exact data so refinement is meaningful.
    """
    prec = start
    saved = iv.prec
    try:
        while prec <= cap:
            iv.prec = prec
            verdict = compute()
            if verdict is not None:
                return verdict
            prec *= 2
    finally:
        iv.prec = saved
    raise IndeterminateSign(f"could not decide {what} below {cap} bits")


def interval_at(compute, prec):
    saved = iv.prec
    try:
        iv.prec = prec
        return compute()
    finally:
        iv.prec = saved
