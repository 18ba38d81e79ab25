"""Moment sampling and the low-order-moments-plus-recurrence estimator.

The quantum measurement step is emulated by drawing each ``Tr(rho^i)``
(``i <= t``) as a binomial frequency; higher moments come from the
Newton-Girard recurrence driven by the estimated coefficients.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .exact import (
    PowerSumSeries,
    Spectrum,
    SymmetricPolys,
    as_fraction,
    exact_trace_power,
    extend_series,
    format_fraction,
    newton_girard,
)

MomentOracle = Callable[[int], Fraction]

# int64 range of numpy's binomial sampler
MAX_RUNS = 2**63 - 1
# above this many trials the binomial draw is replaced by a rounded Gaussian
NORMAL_APPROX_THRESHOLD = 10**9

EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
KS = (8, 16, 32, 64, 128, 256)

# Published reference values of t (r = 16). They are kept for
# auditing; several cells disagree with the floor formulas they claim to use.
TABLE_EFFECTIVE_RANK = {
    8: (6, 8, 10, 12, 15, 16, 16),
    16: (6, 9, 11, 13, 15, 16, 16),
    32: (6, 9, 11, 13, 15, 16, 16),
    64: (8, 10, 12, 15, 16, 16, 16),
    128: (8, 11, 13, 15, 16, 16, 16),
    256: (9, 11, 14, 16, 16, 16, 16),
}
TABLE_ALT_RANK = {
    8: (3, 4, 5, 5, 6, 6, 7),
    16: (4, 4, 5, 5, 6, 6, 7),
    32: (4, 4, 5, 5, 6, 7, 7),
    64: (4, 5, 5, 6, 6, 7, 7),
    128: (4, 5, 5, 6, 6, 7, 7),
    256: (4, 5, 5, 6, 7, 7, 8),
}


def table_value(table: dict, k: int, epsilon) -> Optional[int]:
    """Look up a printed table entry; ``None`` off the grid."""
    eps = float(epsilon)
    for col, e in enumerate(EPSILONS):
        if math.isclose(eps, e, rel_tol=1e-12) and k in table:
            return table[k][col]
    return None


def _floor_log(x: float) -> int:
    return math.floor(math.log(x))


def _cap(value: int, r: Optional[int]) -> int:
    if r is not None:
        value = min(r, value)
    return max(1, value)


def effective_rank(k: int, epsilon, r: Optional[int] = None) -> int:
    """``min(r, floor(ln(2k/eps)))``, never below 1."""
    if float(epsilon) <= 0:
        raise ValueError("epsilon must be positive")
    return _cap(_floor_log(2 * k / float(epsilon)), r)


def effective_rank_alt(k: int, epsilon, r: Optional[int] = None) -> int:
    """``min(r, floor(ln(k/eps) / ln ln(k/eps)))``, never below 1."""
    if float(epsilon) <= 0:
        raise ValueError("epsilon must be positive")
    x = k / float(epsilon)
    if x <= math.e:
        raise ValueError("k/epsilon must exceed e for the double logarithm")
    return _cap(math.floor(math.log(x) / math.log(math.log(x))), r)


def required_runs(k: int, epsilon, delta=None, t=None, scenario: bool = True) -> int:
    """Number of Bernoulli trials per estimated moment.

    ``scenario=True`` gives ``floor(k^2/eps^2)``, the rule used in the
    simulations. Otherwise ``ceil(k^2/eps^2 * ln(1/delta))``. ``t`` is
    accepted for signature symmetry; log factors in ``t`` are dropped.
    """
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    base = Fraction(k * k) / (eps * eps)
    if scenario:
        n = math.floor(base)
    else:
        if delta is None or not 0 < float(delta) < 1:
            raise ValueError("delta must lie in (0, 1)")
        n = math.ceil(float(base) * math.log(1 / float(delta)))
    n = max(n, 1)
    if n > MAX_RUNS:
        raise OverflowError(f"{n} runs exceeds the sampler limit {MAX_RUNS}")
    return n


def sample_trace_power(s: Spectrum, i: int, n: int, rng: np.random.Generator) -> Fraction:
    """One Binomial(n, Tr(rho^i)) draw, returned as the frequency ``X/n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = exact_trace_power(s, i)
    return Fraction(draw_binomial(n, p, rng), n)


def draw_binomial(n: int, p: Fraction, rng: np.random.Generator) -> int:
    if p == 1:
        return n
    if p == 0:
        return 0
    if n <= NORMAL_APPROX_THRESHOLD:
        return int(rng.binomial(n, float(p)))
    # Rounded Gaussian. The integer part of the mean is kept exact so the
    # float only carries the O(sqrt(n)) fluctuation.
    mean = n * p
    base = math.floor(mean)
    sd = math.sqrt(float(mean) * float(1 - p))
    x = base + round(float(mean - base) + sd * float(rng.standard_normal()))
    return min(max(x, 0), n)


def moment_rng(seed: int, i: int, stream: int = 0) -> np.random.Generator:
    """Independent generator per (seed, stream, moment index)."""
    return np.random.default_rng([int(seed) & (2**64 - 1), stream, i])


@dataclass
class EstimationConfig:
    k: int
    epsilon: float = 0.1
    delta: float = 0.05
    t: Optional[int] = None
    seed: int = 0
    exact_oracle: bool = False
    scenario_runs: bool = True
    samples: Optional[int] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if float(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < float(self.delta) < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.t is not None and self.t < 1:
            raise ValueError("t must be >= 1")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1")

    def resolve_t(self, r: Optional[int] = None) -> int:
        return self.t if self.t is not None else effective_rank(self.k, self.epsilon, r)

    def runs(self) -> int:
        if self.samples is not None:
            return self.samples
        return required_runs(self.k, self.epsilon, self.delta, self.t, scenario=self.scenario_runs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilon"] = float(self.epsilon)
        d["delta"] = float(self.delta)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "EstimationConfig":
        return cls(**data)


@dataclass(frozen=True)
class EstimateSeries:
    q: PowerSumSeries
    b: SymmetricPolys
    samples_per_moment: int
    config: EstimationConfig
    t: int = field(default=0)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "t": self.t,
            "samples_per_moment": self.samples_per_moment,
            "q": [format_fraction(v) for v in self.q],
            "q_float": self.q.as_floats(),
            "b": [format_fraction(v) for v in self.b.coeffs],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateSeries":
        return cls(
            q=PowerSumSeries(data["q"], "estimated"),
            b=SymmetricPolys(data["b"]),
            samples_per_moment=data["samples_per_moment"],
            config=EstimationConfig.from_dict(data["config"]),
            t=data["t"],
        )

    @classmethod
    def from_json(cls, text: str) -> "EstimateSeries":
        return cls.from_dict(json.loads(text))


def exact_oracle(s: Spectrum) -> MomentOracle:
    return lambda i: exact_trace_power(s, i)


def binomial_oracle(s: Spectrum, n: int, seed: int, stream: int = 0) -> MomentOracle:
    return lambda i: sample_trace_power(s, i, n, moment_rng(seed, i, stream))


def perturbed_oracle(s: Spectrum, errors) -> MomentOracle:
    """Exact moments shifted by ``errors[i-1]``; for adversarial tests."""
    errs = [as_fraction(e) for e in errors]
    return lambda i: exact_trace_power(s, i) + errs[i - 1]


def estimate_from_moments(moments, k: int) -> tuple:
    """Steps 2-3 only: coefficients from ``t`` moments, then extend to ``k``."""
    seed = list(moments)
    t = len(seed)
    b = newton_girard(seed, t)
    if k <= t:
        return PowerSumSeries(seed[:k], "estimated"), b
    return extend_series(b, seed, k, kind="estimated"), b


def run_algorithm1(
    s: Spectrum, config: EstimationConfig, oracle: Optional[MomentOracle] = None
) -> EstimateSeries:
    """Estimate ``Tr(rho^i)`` for ``i = 1..k`` from ``t`` sampled moments.

    The spectrum is only touched through the oracle, and only for moment
    orders ``1..t``. Pass ``oracle`` to override sampling (e.g. injected
    noise); ``config.exact_oracle`` bypasses sampling altogether.
    """
    t = config.resolve_t(s.rank)
    n = 0
    if oracle is None:
        if config.exact_oracle:
            oracle = exact_oracle(s)
        else:
            n = config.runs()
            oracle = binomial_oracle(s, n, config.seed)
    q_head = [oracle(i) for i in range(1, t + 1)]
    q, b = estimate_from_moments(q_head, config.k)
    return EstimateSeries(q=q, b=b, samples_per_moment=n, config=config, t=t)
