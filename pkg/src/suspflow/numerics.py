"""Small deterministic numerical routines shared across modules."""

from __future__ import annotations

import math

from .errors import NumericFailure

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def simpson(fn, a, b, panels):
    """Composite Simpson rule with an even number of panels."""
    if b < a:
        raise ValueError("integration bounds out of order")
    if b == a:
        return 0.0
    panels = max(2, int(panels))
    if panels % 2:
        panels += 1
    h = (b - a) / panels
    total = fn(a) + fn(b)
    total += 4.0 * sum(fn(a + h * j) for j in range(1, panels, 2))
    total += 2.0 * sum(fn(a + h * j) for j in range(2, panels, 2))
    return total * h / 3.0


def bisect_root(fn, lo, hi, xtol=1e-12, max_iter=200):
    """Root of a continuous scalar function by plain bisection.

    Requires a sign change on [lo, hi]; the bracket width at return is
    below xtol.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError("bisection bracket does not change sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo < xtol:
            return 0.5 * (lo + hi)
    raise NumericFailure("bisection exceeded its iteration budget")


def expand_bracket(fn, lo, hi, max_expansions=60):
    """Grow [lo, hi] geometrically until fn changes sign across it.

    fn is assumed monotone decreasing; returns the bracketing interval.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    width = max(hi - lo, 1.0)
    for _ in range(max_expansions):
        if f_lo >= 0.0 >= f_hi:
            return lo, hi
        if f_lo < 0.0:
            lo -= width
            f_lo = fn(lo)
        if f_hi > 0.0:
            hi += width
            f_hi = fn(hi)
        width *= 2.0
    raise NumericFailure("failed to bracket a sign change")


def golden_section_min(fn, lo, hi, xtol=1e-6, max_iter=200):
    """Minimum of a unimodal function; returns (argmin, min value)."""
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a < xtol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    if fc < fd:
        return c, fc
    return d, fd


def minimize_convex(fn, lo=-1.0, hi=1.0, xtol=1e-6, max_expansions=60):
    """Minimize a convex function over the line.

    The starting interval is widened geometrically until the minimum is
    interior, then golden-section search finishes the job.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    width = hi - lo
    for _ in range(max_expansions):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid <= f_lo and f_mid <= f_hi:
            break
        if f_lo < f_hi:
            lo -= width
            f_lo = fn(lo)
        else:
            hi += width
            f_hi = fn(hi)
        width *= 2.0
    else:
        raise NumericFailure("failed to bracket a convex minimum")
    return golden_section_min(fn, lo, hi, xtol=xtol)
