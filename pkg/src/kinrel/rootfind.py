"""Bracketed scalar root solving.

All scalar roots in this package sit on residuals that the theory
guarantees to be monotone across the bracket, so plain bisection is
driven to a tight width first and a few damped Newton corrections then
restore the last digits.  Nothing here tries to be clever about
pathological functions; robustness comes from the guaranteed sign
change, speed from the Newton polish.
"""

from __future__ import annotations

from typing import Callable

from .errors import BracketFailure

BISECT_WIDTH = 1e-13
NEWTON_STEPS = 3
MAX_EXPANSIONS = 60


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    flo: float | None = None,
    fhi: float | None = None,
    width: float = BISECT_WIDTH,
) -> float:
    """Bisect ``f`` on ``[lo, hi]`` down to the given relative bracket width.

    ``flo``/``fhi`` may pass along already-computed endpoint values.
    Raises ``BracketFailure`` when the endpoints do not straddle zero.
    """
    if not lo < hi:
        raise BracketFailure(f"empty bracket [{lo}, {hi}]")
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketFailure(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    while hi - lo > width * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket exhausted at floating-point resolution
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def newton_polish(
    f: Callable[[float], float],
    x: float,
    lo: float,
    hi: float,
    *,
    df: Callable[[float], float] | None = None,
    steps: int = NEWTON_STEPS,
) -> float:
    """Run a few damped Newton steps from ``x``, confined to ``[lo, hi]``.

    Steps that would leave the bracket or grow ``|f|`` are halved; an
    analytic derivative ``df`` is used when supplied, otherwise a central
    difference.
    """
    fx = f(x)
    for _ in range(steps):
        if fx == 0.0:
            break
        if df is not None:
            slope = df(x)
        else:
            h = 1e-7 * max(1.0, abs(x))
            slope = (f(x + h) - f(x - h)) / (2.0 * h)
        if slope == 0.0 or not _finite(slope):
            break
        step = -fx / slope
        accepted = False
        for _ in range(30):
            xn = x + step
            if lo <= xn <= hi:
                fn = f(xn)
                if abs(fn) <= abs(fx):
                    x, fx = xn, fn
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break
    return x


def solve_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    df: Callable[[float], float] | None = None,
    flo: float | None = None,
    fhi: float | None = None,
    width: float = BISECT_WIDTH,
) -> float:
    """Bisection to ``width`` followed by the standard Newton polish."""
    x = bisect(f, lo, hi, flo=flo, fhi=fhi, width=width)
    return newton_polish(f, x, lo, hi, df=df)


def _finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")
