"""Asymptotic coefficient estimates consumed by the stability tests.

liminf / limsup / sup of coefficient aggregates are exact when every
contributing stream is constant or periodic (one period of the tail
determines the limit); otherwise they are window estimates and flagged
approximate so checkers can report verdicts as window-certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equation import Equation
from .seqexpr import classify

__all__ = [
    "AsymptoticEstimate",
    "liminf_sum",
    "limsup_product",
    "liminf_window_max",
    "delay_window_sum",
    "default_window",
    "aggregate_period",
]


@dataclass(frozen=True)
class AsymptoticEstimate:
    value: float
    exact: bool
    window: tuple[int, int]
    mode: str  # liminf | limsup | sup | inf


def default_window(eq: Equation, length: int = 10_000) -> tuple[int, int]:
    """[10 T, 10 T + length]: skips the transient prefix the asymptotic
    hypotheses do not care about."""
    start = 10 * eq.T
    return (start, start + length)


def _coeff_period(eq: Equation) -> Optional[int]:
    """lcm of coefficient periods, or None when any stream is general."""
    period = 1
    for t in eq.terms:
        c = classify(t.coeff)
        if c.tag == "constant":
            continue
        if c.tag == "periodic":
            period = math.lcm(period, c.period)
        else:
            return None
    return period


def aggregate_period(eq: Equation, with_delays: bool = False) -> Optional[int]:
    period = _coeff_period(eq)
    if period is None:
        return None
    if with_delays:
        for t in eq.terms:
            period = math.lcm(period, t.delay.period)
    return period


def _aggregate(eq: Equation, n0: int, n1: int) -> np.ndarray:
    return eq.coeff_table(n0, n1).sum(axis=0)


def liminf_sum(eq: Equation, window: Optional[tuple[int, int]] = None) -> AsymptoticEstimate:
    """liminf over n of sum_l a_l(n)."""
    window = window or default_window(eq)
    period = aggregate_period(eq)
    if period is not None:
        values = _aggregate(eq, window[0], window[0] + period - 1)
        return AsymptoticEstimate(float(values.min()), True, window, "liminf")
    values = _aggregate(eq, window[0], window[1])
    return AsymptoticEstimate(float(values.min()), False, window, "liminf")


def limsup_product(eq: Equation, p: int,
                   window: Optional[tuple[int, int]] = None) -> AsymptoticEstimate:
    """limsup over n of prod_{j=n}^{n+p-1} (1 - sum_l a_l(j))."""
    if p < 1:
        raise ValueError("p must be positive")
    window = window or default_window(eq)
    period = aggregate_period(eq)
    if period is not None:
        n_lo, count, exact = window[0], period, True
    else:
        n_lo, count, exact = window[0], window[1] - window[0] + 1, False
    factors = 1.0 - _aggregate(eq, n_lo, n_lo + count + p - 2)
    windows = np.lib.stride_tricks.sliding_window_view(factors, p)[:count]
    products = windows.prod(axis=1)
    return AsymptoticEstimate(float(products.max()), exact, window, "limsup")


def liminf_window_max(eq: Equation, p: int,
                      window: Optional[tuple[int, int]] = None) -> AsymptoticEstimate:
    """liminf over n of max_{n <= k <= n+p-1} sum_l a_l(k)."""
    if p < 1:
        raise ValueError("p must be positive")
    window = window or default_window(eq)
    period = aggregate_period(eq)
    if period is not None:
        n_lo, count, exact = window[0], period, True
    else:
        n_lo, count, exact = window[0], window[1] - window[0] + 1, False
    values = _aggregate(eq, n_lo, n_lo + count + p - 2)
    maxima = np.lib.stride_tricks.sliding_window_view(values, p).max(axis=1)[:count]
    return AsymptoticEstimate(float(maxima.min()), exact, window, "liminf")


def windowed_delayed_sum(eq: Equation, lag_at, upper_offset: int,
                         window: tuple[int, int], exact_period: Optional[int]) -> AsymptoticEstimate:
    """sup over n of sum_{k=max(0, n - lag_at(n))}^{n + upper_offset} agg(k).

    ``lag_at(n)`` gives the window depth at n; upper_offset is -1 for sums
    up to n-1 and 0 for sums up to n.  Shared by delay_window_sum and the
    classical tests.
    """
    if exact_period is not None:
        # evaluate one full period placed past the deepest lag, so the
        # clipped-at-zero prefix never intrudes and the sup is the limit
        max_back = max(int(lag_at(n)) for n in range(exact_period))
        start = ((max_back // exact_period) + 1) * exact_period
        ns = np.arange(start, start + exact_period, dtype=np.int64)
        exact = True
    else:
        ns = np.arange(window[0], window[1] + 1, dtype=np.int64)
        exact = False
    max_back = max(int(lag_at(int(n))) for n in ns)
    lo = max(0, int(ns.min()) - max_back)
    hi = int(ns.max()) + upper_offset
    if hi < lo:
        return AsymptoticEstimate(0.0, exact, window, "sup")
    agg = _aggregate(eq, lo, hi)
    prefix = np.concatenate([[0.0], np.cumsum(agg)])

    def cumrange(a: int, b: int) -> float:
        # sum of agg over [a, b], clipped at lo
        a = max(a, lo)
        if b < a:
            return 0.0
        return float(prefix[b - lo + 1] - prefix[a - lo])

    best = -math.inf
    for n in ns:
        n = int(n)
        best = max(best, cumrange(n - int(lag_at(n)), n + upper_offset))
    return AsymptoticEstimate(best, exact, window, "sup")


def delay_window_sum(eq: Equation, l: int, mode: str = "to_n_minus_1",
                     window: Optional[tuple[int, int]] = None) -> AsymptoticEstimate:
    """sup over the window of sum_{k=h_l(n)}^{n-1 or n} sum_j a_j(k).

    The window depth follows term l's delay; the summand is the full
    coefficient aggregate of ``eq`` (pass a subset equation to restrict
    the summand).  The two upper-index conventions differ by whether the
    comparison at n itself is included.
    """
    if mode not in ("to_n_minus_1", "to_n"):
        raise ValueError(f"unknown mode {mode!r}")
    window = window or default_window(eq)
    upper = -1 if mode == "to_n_minus_1" else 0
    delay = eq.terms[l].delay
    period = aggregate_period(eq)
    exact_period = None
    if period is not None:
        exact_period = math.lcm(period, delay.period)
    return windowed_delayed_sum(eq, delay.lag_at, upper, window, exact_period)
