"""Closed-form error bounds and per-moment error budgets.

Bounds that are rational (perturbation sums, truncation bounds, the
elementary-symmetric maximum) are returned as Fractions. Thresholds that
contain ``ln t`` are floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Optional

from .exact import PowerSumSeries, as_fraction, newton_girard


@dataclass(frozen=True)
class BoundReport:
    empirical: float
    theoretical: float
    satisfied: bool
    context: str = ""

    def to_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "theoretical": self.theoretical,
            "satisfied": self.satisfied,
            "context": self.context,
        }


def lemma1_bound(eps: Iterable) -> Fraction:
    """``sum_j |eps_j| / j``: how far perturbed power sums can push ``e_k``.

    Pass the first ``k`` per-moment errors to bound ``|b_k - a_k|``.
    """
    total = Fraction(0)
    for j, e in enumerate(eps, start=1):
        total += abs(as_fraction(e)) / j
    return total


def lemma2_bound(k: int, t: int, r: int) -> Fraction:
    """Truncation bound ``k/t! * (1 - t/r)`` for extending exact P_1..P_t.

    Zero at ``t == r``, where the extension is exact.
    """
    if t < 1 or r < 1 or k < 1:
        raise ValueError("k, t, r must be positive")
    if t > r:
        raise ValueError("t must not exceed r")
    return Fraction(k, factorial(t)) * (1 - Fraction(t, r))


def esp_max_bound(t: int, r: int) -> Fraction:
    """Largest value of ``e_t`` over probability vectors of length ``r``."""
    if t < 0 or r < 1:
        raise ValueError("need t >= 0 and r >= 1")
    return Fraction(comb(r, t), r**t)


def log_guard(t: int) -> float:
    # ln t vanishes at t = 1; use 1 there so the budgets stay finite
    return max(math.log(t), 1.0) if t >= 1 else 1.0


def theorem_threshold(
    k: int,
    t: int,
    epsilon,
    variant: str = "effective",
    inf_norm=1,
) -> float:
    """Per-moment additive error budget.

    ``rank``: ``eps/(k t ln t)``; ``effective``: ``eps/(2 k t ln t)``;
    ``observable``: ``eps/(2 ||M|| k t ln t)``; ``observable_proof``: the
    stricter ``eps/(4 ||M|| k t ln t)`` that the observable proof actually uses.
    """
    factor = {"rank": 1, "effective": 2, "observable": 2, "observable_proof": 4}
    if variant not in factor:
        raise ValueError(f"unknown variant {variant!r}")
    denom = factor[variant] * k * t * log_guard(t)
    if variant.startswith("observable"):
        denom *= float(inf_norm)
    return float(epsilon) / denom


def check_series(
    exact: PowerSumSeries,
    estimated: PowerSumSeries,
    bound,
    indices: Optional[Iterable[int]] = None,
    context: str = "",
) -> BoundReport:
    """Compare ``max |exact - estimated|`` over 1-based ``indices`` with ``bound``.

    The comparison itself is exact when ``bound`` is rational.
    """
    if indices is None:
        indices = range(1, min(len(exact), len(estimated)) + 1)
    worst = Fraction(0)
    for i in indices:
        worst = max(worst, abs(exact.moment(i) - estimated.moment(i)))
    if isinstance(bound, float):
        satisfied = float(worst) <= bound
    else:
        satisfied = worst <= as_fraction(bound)
    return BoundReport(float(worst), float(bound), satisfied, context)


def clip_perturbation(exact: Iterable, eps: Iterable) -> list:
    """Clip ``eps_j`` so that ``P_j + eps_j`` lies in ``[0, 1]``.

    Sampled moments are frequencies; outside the unit interval the
    perturbation bound can fail (``Q_1 = 1 + d`` is a counterexample).
    """
    return [min(max(as_fraction(e), -p), 1 - p) for p, e in zip(exact, eps)]


def lemma1_check(exact: PowerSumSeries, eps: Iterable) -> list:
    """One ``BoundReport`` per ``k``: ``|b_k - a_k|`` against ``sum_{j<=k} |eps_j|/j``."""
    eps = [as_fraction(e) for e in eps]
    t = len(eps)
    a = newton_girard(exact, t)
    b = newton_girard([p + e for p, e in zip(exact.values, eps)], t)
    out = []
    for k in range(1, t + 1):
        diff, bound = abs(b[k] - a[k]), lemma1_bound(eps[:k])
        out.append(BoundReport(float(diff), float(bound), diff <= bound, f"k={k}"))
    return out
