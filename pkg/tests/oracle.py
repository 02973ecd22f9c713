"""Independent reference values of W0 / W-1 for the test-suite.

Nothing here imports the package under test.  The value is located by plain
bisection on ``w e^w = x`` (on the branch's monotone piece), polished by
Newton steps at the requested precision, and finally *verified*: interval
evaluation of ``w e^w - x`` at ``w -/+ eps`` must show the sign change that
brackets the root.  The returned value is therefore within ``eps`` of the
true branch value, with ``eps = 2**(e(W) - prec + 8)``.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import mpmath
from mpmath import libmp

_local = threading.local()


def _contexts():
    if not hasattr(_local, "fp"):
        _local.fp = mpmath.MPContext()
        _local.iv = mpmath.MPIntervalContext()
    return _local.fp, _local.iv


def _exact(ctx, x, prec):
    """``x`` (Fraction/int/str/mpf) as a ctx value; rationals are rounded to ``prec`` bits."""
    if hasattr(x, "_mpf_"):
        return ctx.make_mpf(x._mpf_)
    q = Fraction(x)
    return ctx.make_mpf(libmp.from_rational(q.numerator, q.denominator, prec, libmp.round_nearest))


class OracleError(AssertionError):
    pass


def lambert_w(x, branch: int = 0, prec: int = 256):
    """``W_branch(x)`` to about ``prec`` bits as an :class:`mpmath.mpf` (global context).

    ``x`` must be given exactly (int, Fraction, decimal string or mpf) and lie
    strictly inside the branch domain.
    """
    fp, iv = _contexts()
    fp.prec = prec + 64
    X = _exact(fp, x, prec + 64)
    inv_e = fp.exp(-1)
    if X <= -inv_e:
        raise OracleError(f"x = {X} is not above -1/e")
    if branch == -1 and X >= 0:
        raise OracleError("W-1 needs x < 0")

    def f(w):
        return w * fp.exp(w) - X

    # monotone bracket: principal piece increasing, lower piece decreasing
    if branch == 0:
        lo, hi = fp.mpf(-1), fp.mpf(1)
        while f(hi) < 0:
            hi *= 2
        sign_lo = -1
    else:
        lo, hi = fp.mpf(-2), fp.mpf(-1)
        while f(lo) < 0:
            lo *= 2
        sign_lo = 1
    # coarse bisection: about 60 correct bits
    fp.prec = 128 + 64
    for _ in range(200):
        mid = (lo + hi) / 2
        s = f(mid)
        if s == 0:
            lo = hi = mid
            break
        if (s > 0) == (sign_lo > 0):
            lo = mid
        else:
            hi = mid
        if hi - lo < fp.ldexp(max(abs(lo), 1), -60):
            break
    w = (lo + hi) / 2
    # Newton polish with precision doubling (away from w = -1 this converges fast)
    bits = 60
    while bits < prec + 32:
        bits = min(2 * bits, prec + 32)
        fp.prec = bits + 64
        for _ in range(2):
            ew = fp.exp(w)
            d = ew * (w + 1)
            if d == 0:
                break
            w = w - (w * ew - X) / d
    fp.prec = prec + 64
    for _ in range(3):
        ew = fp.exp(w)
        d = ew * (w + 1)
        if d == 0:
            break
        w = w - (w * ew - X) / d
    # rigorous verification of a bracket around w
    eps = fp.ldexp(1, int(fp.mag(w)) - prec + 8)
    a, b = w - eps, w + eps
    if branch == 0 and a < -1:
        a = fp.mpf(-1)
    if branch == -1 and b > -1:
        b = fp.mpf(-1)
    iv.prec = prec + 96
    Xi = _iv_exact(iv, x)
    fa = iv.mpf(a) * iv.exp(iv.mpf(a)) - Xi
    fb = iv.mpf(b) * iv.exp(iv.mpf(b)) - Xi
    (fa_lo, fa_hi), (fb_lo, fb_hi) = fa._mpi_, fb._mpi_
    if branch == 0:
        ok = libmp.mpf_le(fa_hi, libmp.fzero) and libmp.mpf_ge(fb_lo, libmp.fzero)
    else:
        ok = libmp.mpf_ge(fa_lo, libmp.fzero) and libmp.mpf_le(fb_hi, libmp.fzero)
    if not ok:
        raise OracleError(f"oracle failed to verify W_{branch}({X}) at {prec} bits")
    return mpmath.mp.make_mpf(libmp.mpf_pos(w._mpf_, prec + 8, libmp.round_nearest))


def _iv_exact(iv, x):
    if hasattr(x, "_mpf_"):
        return iv.mpf(mpmath.mp.make_mpf(x._mpf_))
    q = Fraction(x)
    return iv.mpf(q.numerator) / q.denominator


def w0(x, prec: int = 256):
    return lambert_w(x, 0, prec)


def wm1(x, prec: int = 256):
    return lambert_w(x, -1, prec)


def exact_diff(a, b) -> mpmath.mpf:
    """``|a - b|`` computed exactly (no rounding) from two mpf-like values."""
    return mpmath.mp.make_mpf(libmp.mpf_abs(libmp.mpf_sub(a._mpf_, b._mpf_)))
