"""Delay difference equations x(n+1) - x(n) = -sum_l a_l(n) x(h_l(n)) + f(n).

An Equation bundles the terms with window-certified bounds: K bounds every
|a_l(n)| on the validation window and T is the largest lag, so every state
access during simulation stays inside [n - T, n].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .seqexpr import DelaySpec, SeqExpr, added, classify, eval_range, spliced

__all__ = ["Term", "Equation", "InitialData", "validate", "subset_equation",
           "prefix_modify", "merge_same_delay"]


@dataclass(frozen=True)
class Term:
    """One summand a(n) * x(h(n)) with h(n) = n - lag(n)."""

    coeff: SeqExpr
    delay: DelaySpec


@dataclass(frozen=True)
class Equation:
    terms: tuple[Term, ...]
    K: float
    T: int
    forcing: Optional[SeqExpr] = None
    validation_window: tuple[int, int] = (0, 0)

    @property
    def m(self) -> int:
        return len(self.terms)

    def is_autonomous(self) -> bool:
        """True when every coefficient is constant and every lag fixed."""
        return all(
            classify(t.coeff).tag == "constant" and t.delay.kind == "constant"
            for t in self.terms
        ) and self.forcing is None

    def coeff_table(self, n0: int, n1: int) -> np.ndarray:
        """a_l(n) for l = 0..m-1, n in [n0, n1]; shape (m, n1-n0+1)."""
        return np.stack([eval_range(t.coeff, n0, n1) for t in self.terms])

    def lag_table(self, n0: int, n1: int) -> np.ndarray:
        """Integer lags d_l(n) = n - h_l(n) on [n0, n1]; shape (m, len)."""
        return np.stack([t.delay.lag_range(n0, n1) for t in self.terms])


@dataclass(frozen=True)
class InitialData:
    """Start index n0 and history covering [n0 - T, n0] (includes x(n0))."""

    n0: int
    history: dict[int, float] = field(default_factory=dict)

    @staticmethod
    def from_values(n0: int, values: Sequence[float]) -> "InitialData":
        """Values for indices n0 - len + 1 .. n0 in order."""
        start = n0 - len(values) + 1
        return InitialData(n0, {start + i: float(v) for i, v in enumerate(values)})

    @staticmethod
    def point(n0: int, value: float = 1.0) -> "InitialData":
        return InitialData(n0, {n0: float(value)})

    def value_at(self, n: int) -> float:
        return self.history.get(n, 0.0)


def validate(
    terms: Sequence[Term],
    forcing: Optional[SeqExpr] = None,
    window_len: Optional[int] = None,
) -> Equation:
    """Build an Equation, certifying the coefficient bound K on a window.

    K is the largest |a_l(n)| observed on [0, window_len); for constant or
    periodic coefficients that value is the true global bound, otherwise it
    is a window certificate only (the window is recorded on the equation).
    """
    terms = tuple(terms)
    if not terms:
        raise ValueError("equation needs at least one term")
    T = max(t.delay.max_lag for t in terms)
    min_len = 10 * (1 + T)
    if window_len is None:
        window_len = max(min_len, 1000)
    if window_len < min_len:
        raise ValueError(f"window_len must be at least 10*(1+T) = {min_len}")
    K = 0.0
    for t in terms:
        values = eval_range(t.coeff, 0, window_len - 1)
        K = max(K, float(np.abs(values).max()))
    if forcing is not None:
        eval_range(forcing, 0, window_len - 1)  # surfaces eval errors early
    return Equation(terms, K, T, forcing, (0, window_len))


def subset_equation(eq: Equation, indices: Sequence[int]) -> Equation:
    """Equation keeping only the terms in ``indices``; forcing dropped."""
    indices = list(indices)
    if not indices:
        raise ValueError("empty index set")
    picked = tuple(eq.terms[i] for i in indices)
    return validate(picked, None, eq.validation_window[1])


def merge_same_delay(eq: Equation) -> Equation:
    """Sum coefficients of terms sharing an identical lag table.

    x(n+1)-x(n) = -a(n)x(g(n)) - b(n)x(g(n)) is the single-term equation
    with coefficient a+b; positivity tests want that canonical form.
    """
    groups: dict[DelaySpec, SeqExpr] = {}
    order: list[DelaySpec] = []
    for t in eq.terms:
        if t.delay in groups:
            groups[t.delay] = added(groups[t.delay], t.coeff)
        else:
            groups[t.delay] = t.coeff
            order.append(t.delay)
    merged_terms = tuple(Term(groups[d], d) for d in order)
    return validate(merged_terms, eq.forcing, eq.validation_window[1])


def prefix_modify(eq: Equation, n1: int, replacement: Sequence[Term]) -> Equation:
    """Equation equal to ``replacement`` coefficients before n1 and to the
    original from n1 on.  Delays are kept from the original equation: the
    finite-segment robustness statements change coefficient values on a
    prefix, not the delay structure.
    """
    replacement = list(replacement)
    if len(replacement) != eq.m:
        raise ValueError(f"replacement arity {len(replacement)} != {eq.m}")
    if n1 <= 0:
        return eq
    new_terms = tuple(
        Term(spliced(n1, r.coeff, t.coeff), t.delay)
        for t, r in zip(eq.terms, replacement)
    )
    return validate(new_terms, eq.forcing, eq.validation_window[1])
