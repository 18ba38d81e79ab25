"""Cross traces ``Tr(rho^i sigma^j)`` from two chained observable extensions.

Ground truth uses an overlap model: with ``rho = sum_a p_a |psi_a><psi_a|``
and ``sigma = sum_b q_b |phi_b><phi_b|``,
``Tr(rho^i sigma^j) = sum_ab p_a^i q_b^j |<psi_a|phi_b>|^2``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .bounds import log_guard
from .estimation import exact_oracle, moment_rng
from .exact import (
    PowerSumSeries,
    Spectrum,
    as_fraction,
    exact_trace_power,
    extend_series,
    format_fraction,
    newton_girard,
)

MixedOracle = Callable[[int, int], Fraction]


@dataclass(frozen=True)
class StatePair:
    """Two spectra plus the squared overlaps of their eigenvectors.

    ``overlap[a][b] = |<psi_a|phi_b>|^2`` has shape ``rank(rho) x rank(sigma)``.
    Rows and columns sum to at most 1. ``dim`` is the Hilbert-space dimension
    used for ``Tr(I)``; it defaults to the larger rank.
    """

    rho: Spectrum
    sigma: Spectrum
    overlap: tuple
    dim: int

    def __init__(self, rho: Spectrum, sigma: Spectrum, overlap, dim: Optional[int] = None):
        rows = tuple(tuple(as_fraction(x) for x in row) for row in overlap)
        if len(rows) != rho.rank or any(len(row) != sigma.rank for row in rows):
            raise ValueError("overlap must have shape rank(rho) x rank(sigma)")
        if any(x < 0 or x > 1 for row in rows for x in row):
            raise ValueError("overlap entries must lie in [0, 1]")
        if any(sum(row) > 1 for row in rows):
            raise ValueError("overlap rows must sum to at most 1")
        if any(sum(col) > 1 for col in zip(*rows)):
            raise ValueError("overlap columns must sum to at most 1")
        if dim is None:
            dim = max(rho.rank, sigma.rank)
        if dim < max(rho.rank, sigma.rank):
            raise ValueError("dim smaller than a rank")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "overlap", rows)
        object.__setattr__(self, "dim", dim)

    def swapped(self) -> "StatePair":
        return StatePair(self.sigma, self.rho, list(zip(*self.overlap)), self.dim)

    def rho_weights(self, i: int) -> list:
        """Diagonal of ``rho^i`` in the eigenbasis of ``sigma``."""
        p = self.rho.eigenvalues
        return [
            sum((p[a] ** i * self.overlap[a][b] for a in range(len(p))), Fraction(0))
            for b in range(self.sigma.rank)
        ]


def cross_trace(pair: StatePair, a: int, b: int) -> Fraction:
    if a < 1 or b < 1:
        raise ValueError("powers must be >= 1")
    p, q = pair.rho.eigenvalues, pair.sigma.eigenvalues
    qb = [x**b for x in q]
    total = Fraction(0)
    for i, row in enumerate(pair.overlap):
        pa = p[i] ** a
        total += pa * sum((o * y for o, y in zip(row, qb)), Fraction(0))
    return total


def effective_rank_pair(k: int, l: int, epsilon, r: Optional[int] = None) -> int:
    """``min(r, floor(ln((4k + 4l)/eps)))``, never below 1."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be >= 1")
    eps = float(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    value = math.floor(math.log((4 * k + 4 * l) / eps))
    if r is not None:
        value = min(r, value)
    return max(1, value)


@dataclass
class CrossTraceGrid:
    """Estimated ``Tr(rho^i sigma^j)`` with the single-state marginals.

    ``values[i-1][j-1]`` holds the ``(i, j)`` entry; ``rho_moments`` and
    ``sigma_moments`` give the ``j = 0`` and ``i = 0`` axes, ``dim`` the
    ``(0, 0)`` corner.
    """

    values: list
    rho_moments: Optional[PowerSumSeries] = None
    sigma_moments: Optional[PowerSumSeries] = None
    dim: Optional[int] = None
    t: Optional[int] = None

    @property
    def shape(self) -> tuple:
        return (len(self.values), len(self.values[0]) if self.values else 0)

    def entry(self, i: int, j: int) -> Fraction:
        """1-based access, with index 0 meaning the identity on that side."""
        if i == 0 and j == 0:
            if self.dim is None:
                raise ValueError("grid has no dimension for Tr(I)")
            return Fraction(self.dim)
        if j == 0:
            if self.rho_moments is None:
                raise ValueError("grid carries no rho marginals")
            return self.rho_moments.moment(i)
        if i == 0:
            if self.sigma_moments is None:
                raise ValueError("grid carries no sigma marginals")
            return self.sigma_moments.moment(j)
        return self.values[i - 1][j - 1]

    def transpose(self) -> "CrossTraceGrid":
        return CrossTraceGrid(
            [list(col) for col in zip(*self.values)],
            self.sigma_moments, self.rho_moments, self.dim, self.t,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["i", "j", "value_num", "value_den", "value_float"])
        for i, row in enumerate(self.values, start=1):
            for j, v in enumerate(row, start=1):
                writer.writerow([i, j, v.numerator, v.denominator, repr(float(v))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "dim": self.dim,
            "values": [[format_fraction(v) for v in row] for row in self.values],
            "rho_moments": None if self.rho_moments is None else [format_fraction(v) for v in self.rho_moments],
            "sigma_moments": None if self.sigma_moments is None else [format_fraction(v) for v in self.sigma_moments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CrossTraceGrid":
        def series(key):
            return None if data.get(key) is None else PowerSumSeries(data[key], "estimated")

        return cls(
            [[Fraction(v) for v in row] for row in data["values"]],
            series("rho_moments"), series("sigma_moments"), data.get("dim"), data.get("t"),
        )


def exact_grid(pair: StatePair, k: int, l: int) -> CrossTraceGrid:
    """Brute-force reference grid."""
    from .exact import power_sums

    return CrossTraceGrid(
        [[cross_trace(pair, i, j) for j in range(1, l + 1)] for i in range(1, k + 1)],
        power_sums(pair.rho, k), power_sums(pair.sigma, l), pair.dim,
    )


@dataclass
class CrossOracles:
    """Sources for the low-order inputs: ``Tr(rho^i)``, ``Tr(sigma^j)``, ``Tr(rho^i sigma^j)``."""

    rho: Callable[[int], Fraction]
    sigma: Callable[[int], Fraction]
    mixed: MixedOracle

    @classmethod
    def exact(cls, pair: StatePair) -> "CrossOracles":
        return cls(exact_oracle(pair.rho), exact_oracle(pair.sigma), lambda i, j: cross_trace(pair, i, j))


def budget_noise_oracles(
    pair: StatePair, k: int, l: int, epsilon, t: int, seed: int = 0, scale=1
) -> CrossOracles:
    """Exact inputs plus uniform noise strictly inside the per-input error budgets.

    Budgets: ``eps/(4 k t ln t)`` on ``Tr(rho^i)``, ``eps/(8 l t ln t)`` on
    ``Tr(sigma^j)``, ``eps/8`` on the mixed seeds; ``scale`` multiplies all three.
    """
    eps = as_fraction(epsilon)
    scale = as_fraction(scale)
    lg = Fraction(repr(log_guard(t)))
    rho_budget = scale * eps / (4 * k * t * lg)
    sigma_budget = scale * eps / (8 * l * t * lg)
    mixed_budget = scale * eps / 8

    def noise(stream: int, i: int, j: int = 0) -> Fraction:
        u = moment_rng(seed, i * 4099 + j, stream).integers(-(10**9) + 1, 10**9)
        return Fraction(int(u), 10**9)

    return CrossOracles(
        lambda i: exact_trace_power(pair.rho, i) + rho_budget * noise(11, i),
        lambda j: exact_trace_power(pair.sigma, j) + sigma_budget * noise(12, j),
        lambda i, j: cross_trace(pair, i, j) + mixed_budget * noise(13, i, j),
    )


def _extend(b, seeds: list, length: int) -> list:
    if length <= len(seeds):
        return list(seeds[:length])
    return list(extend_series(b, seeds, length).values)


def run_algorithm3(
    pair: StatePair,
    k: int,
    l: int,
    epsilon=0.1,
    t: Optional[int] = None,
    oracles: Optional[CrossOracles] = None,
) -> CrossTraceGrid:
    """Estimate the ``k x l`` grid of ``Tr(rho^i sigma^j)``.

    Rows ``i <= t`` come from extending the mixed seeds along ``j`` with
    coefficients from ``sigma``'s moments (observable ``rho^i``); every
    column is then extended along ``i`` with coefficients from ``rho``'s
    moments (observable ``sigma^j``). Oracles default to exact values.
    """
    if t is None:
        t = effective_rank_pair(k, l, epsilon, max(pair.rho.rank, pair.sigma.rank))
    if oracles is None:
        oracles = CrossOracles.exact(pair)

    rho_head = [oracles.rho(i) for i in range(1, t + 1)]
    sigma_head = [oracles.sigma(j) for j in range(1, t + 1)]
    b_rho = newton_girard(rho_head, t)
    b_sigma = newton_girard(sigma_head, t)

    rows = min(t, k)
    top = []
    for i in range(1, rows + 1):
        seeds = [oracles.mixed(i, j) for j in range(1, t + 1)]
        top.append(_extend(b_sigma, seeds, l))

    columns = []
    for j in range(l):
        seeds = [top[i][j] for i in range(rows)]
        if rows < t:
            columns.append(seeds)
        else:
            columns.append(_extend(b_rho, seeds, k))
    values = [[columns[j][i] for j in range(l)] for i in range(k)]
    return CrossTraceGrid(
        values,
        PowerSumSeries(_extend(b_rho, rho_head, k), "estimated"),
        PowerSumSeries(_extend(b_sigma, sigma_head, l), "estimated"),
        pair.dim,
        t,
    )


def random_state_pair(
    r_rho: int, r_sigma: int, rng: np.random.Generator, denominator: int = 60, mixtures: int = 3
) -> StatePair:
    """Random rational pair whose overlap is a block of a doubly stochastic matrix."""
    from .scenarios import random_spectrum

    d = max(r_rho, r_sigma)
    weights = rng.integers(1, 10, size=mixtures)
    total = int(weights.sum())
    mat = [[Fraction(0)] * d for _ in range(d)]
    for w in weights:
        perm = rng.permutation(d)
        for a in range(d):
            mat[a][int(perm[a])] += Fraction(int(w), total)
    overlap = [row[:r_sigma] for row in mat[:r_rho]]
    return StatePair(
        random_spectrum(r_rho, rng, denominator), random_spectrum(r_sigma, rng, denominator), overlap, d
    )
