"""Bracketing root finders and a golden-section maximizer."""
from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def bisect_increasing(f: Callable[[float], float], target: float, lo: float, hi: float,
                      ftol: float = 0.0, max_iter: int = 200) -> float:
    """Solve ``f(x) = target`` for an increasing ``f`` bracketed by ``[lo, hi]``.

    Halves the bracket until the residual drops below ``ftol`` or the bracket
    can no longer shrink in floating point, then returns the endpoint with the
    smaller residual.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0 or fhi < 0:
        raise ValueError("target is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid) - target
        if fm == 0.0:
            return mid
        if fm < 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if min(-flo, fhi) < ftol:
            break
    return lo if -flo <= fhi else hi


def bisect_predicate(pred: Callable[[float], bool], lo: float, hi: float,
                     xtol: float) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with ``pred(x)`` true, to within ``xtol``.

    ``pred`` must be false at ``lo``, true at ``hi`` and switch only once.
    """
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def golden_max(f: Callable[[float], float], a: float, b: float,
               xtol: float = 1e-12) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= xtol:
        x = 0.5 * (a + b)
        return x, f(x)
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)
    n = int(math.ceil(math.log(xtol / h) / math.log(INV_PHI)))
    for _ in range(max(n, 1)):
        if fc > fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def scan_then_refine(f: Callable[[float], float], grid, xtol: float = 1e-12) -> tuple[float, float]:
    """Maximize ``f`` over a sorted grid, then refine between the neighbours of the best point."""
    values = [f(x) for x in grid]
    best = max(range(len(grid)), key=lambda i: values[i])
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    x, fx = golden_max(f, lo, hi, xtol=xtol)
    if values[best] >= fx:
        return float(grid[best]), values[best]
    return float(x), fx
