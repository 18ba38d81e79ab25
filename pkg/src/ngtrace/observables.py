"""Observable-weighted moments ``Tr(M rho^i)`` and their recurrence extension.

An observable enters only through its diagonal in the eigenbasis of the
state, ``m_j = <psi_j|M|psi_j>``, because ``Tr(M rho^i) = sum_j m_j p_j^i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .exact import (
    PowerSumSeries,
    Spectrum,
    as_fraction,
    extend_series,
    format_fraction,
    newton_girard,
)
from .estimation import EstimationConfig, MomentOracle, binomial_oracle, exact_oracle, moment_rng


@dataclass(frozen=True)
class ObservableWeights:
    weights: tuple
    inf_norm: Fraction

    def __init__(self, weights: Iterable, inf_norm=None):
        ws = tuple(as_fraction(w) for w in weights)
        norm = max((abs(w) for w in ws), default=Fraction(0)) if inf_norm is None else as_fraction(inf_norm)
        if norm <= 0:
            # the zero observable still needs a positive norm for rank formulas
            norm = Fraction(1)
        if any(abs(w) > norm for w in ws):
            raise ValueError("a weight exceeds the declared operator norm")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "inf_norm", norm)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def combine(self, alpha, other: "ObservableWeights", beta) -> "ObservableWeights":
        """Weights of ``alpha*M1 + beta*M2`` (both diagonal in the same basis)."""
        a, b = as_fraction(alpha), as_fraction(beta)
        return ObservableWeights([a * x + b * y for x, y in zip(self.weights, other.weights)])

    def to_dict(self) -> dict:
        return {
            "weights": [format_fraction(w) for w in self.weights],
            "inf_norm": format_fraction(self.inf_norm),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ObservableWeights":
        return cls(data["weights"], data.get("inf_norm"))


def _check_lengths(s: Spectrum, w: ObservableWeights) -> None:
    if len(w) != s.rank:
        raise ValueError(f"{len(w)} weights for a rank-{s.rank} spectrum")


def observable_power_sums(s: Spectrum, w: ObservableWeights, t: int) -> PowerSumSeries:
    _check_lengths(s, w)
    if t < 1:
        raise ValueError("t must be >= 1")
    powers = list(s.eigenvalues)
    out = []
    for _ in range(t):
        out.append(sum((m * x for m, x in zip(w.weights, powers)), Fraction(0)))
        powers = [x * p for x, p in zip(powers, s.eigenvalues)]
    return PowerSumSeries(out, "exact")


def observable_trace_power(s: Spectrum, w: ObservableWeights, i: int) -> Fraction:
    _check_lengths(s, w)
    return sum((m * p**i for m, p in zip(w.weights, s.eigenvalues)), Fraction(0))


def effective_rank_observable(k: int, epsilon, inf_norm=1, r: Optional[int] = None) -> int:
    """``min(r, floor(ln(2 k ||M|| / eps)))``, never below 1."""
    eps = float(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    value = math.floor(math.log(2 * k * float(inf_norm) / eps))
    if r is not None:
        value = min(r, value)
    return max(1, value)


def exact_observable_oracle(s: Spectrum, w: ObservableWeights) -> MomentOracle:
    return lambda i: observable_trace_power(s, w, i)


def noisy_observable_oracle(
    s: Spectrum, w: ObservableWeights, bound, seed: int, stream: int = 1
) -> MomentOracle:
    """Exact weighted moment plus seeded uniform noise strictly inside ``(-bound, bound)``."""
    bound = as_fraction(bound)

    def oracle(i: int) -> Fraction:
        u = moment_rng(seed, i, stream).integers(-(10**9) + 1, 10**9)
        return observable_trace_power(s, w, i) + bound * Fraction(int(u), 10**9)

    return oracle


def run_algorithm2(
    s: Spectrum,
    w: ObservableWeights,
    config: EstimationConfig,
    moment_oracle: Optional[MomentOracle] = None,
    observable_oracle: Optional[MomentOracle] = None,
) -> PowerSumSeries:
    """Estimate ``Tr(M rho^i)`` for ``i = 1..k``.

    Coefficients come from the plain moments ``Tr(rho^i)``; the weighted
    seeds ``Tr(M rho^i)``, ``i <= t``, are extended with the same recurrence.
    Without explicit oracles, plain moments are binomially sampled and the
    weighted seeds carry uniform noise below ``eps/4`` (or everything is
    exact when ``config.exact_oracle`` is set).
    """
    _check_lengths(s, w)
    t = config.t if config.t is not None else effective_rank_observable(
        config.k, config.epsilon, w.inf_norm, s.rank
    )
    if moment_oracle is None:
        if config.exact_oracle:
            moment_oracle = exact_oracle(s)
        else:
            eps = as_fraction(config.epsilon) / as_fraction(w.inf_norm)
            cfg = EstimationConfig(
                k=config.k, epsilon=eps, delta=config.delta, t=t, seed=config.seed,
                scenario_runs=config.scenario_runs, samples=config.samples,
            )
            moment_oracle = binomial_oracle(s, cfg.runs(), config.seed)
    if observable_oracle is None:
        if config.exact_oracle:
            observable_oracle = exact_observable_oracle(s, w)
        else:
            observable_oracle = noisy_observable_oracle(
                s, w, as_fraction(config.epsilon) / 4, config.seed
            )
    b = newton_girard([moment_oracle(i) for i in range(1, t + 1)], t)
    seeds = [observable_oracle(i) for i in range(1, t + 1)]
    if config.k <= t:
        return PowerSumSeries(seeds[: config.k], "estimated")
    return extend_series(b, seeds, config.k, kind="estimated")


def random_weights(r: int, rng: np.random.Generator, scale: int = 4, denominator: int = 12) -> ObservableWeights:
    """Rational weights in ``[-scale, scale]`` on a fixed grid."""
    nums = rng.integers(-scale * denominator, scale * denominator + 1, size=r)
    return ObservableWeights([Fraction(int(x), denominator) for x in nums])
