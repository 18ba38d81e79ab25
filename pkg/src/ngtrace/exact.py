"""Exact rational spectra, power sums and the Newton-Girard recurrence.

Everything here works on :class:`fractions.Fraction` and never rounds.
A density operator is represented only by its eigenvalue list, which is
enough to define every trace ``Tr(rho^i) = sum_j p_j^i``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]

SERIES_KINDS = ("exact", "estimated", "extended")


def as_fraction(x) -> Fraction:
    """Convert ``x`` to a Fraction without surprises.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10``
    rather than the binary value ``3602879701896397/36028797018963968``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars, gmpy2 and friends
    try:
        return Fraction(x)
    except TypeError:
        return Fraction(repr(float(x)))


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Spectrum:
    """Nonzero eigenvalues of a density operator, sorted descending.

    The constructor refuses anything that is not a probability vector with
    strictly positive entries; it never renormalizes.
    """

    eigenvalues: tuple

    def __init__(self, eigenvalues: Iterable[RationalLike]):
        values = [as_fraction(v) for v in eigenvalues]
        if not values:
            raise ValueError("a spectrum needs at least one eigenvalue")
        if any(v <= 0 for v in values):
            raise ValueError("eigenvalues must be strictly positive")
        total = sum(values, Fraction(0))
        if total != 1:
            raise ValueError(f"eigenvalues sum to {total}, not 1")
        object.__setattr__(self, "eigenvalues", tuple(sorted(values, reverse=True)))

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    @classmethod
    def uniform(cls, r: int) -> "Spectrum":
        return cls([Fraction(1, r)] * r)

    @classmethod
    def from_weights(cls, weights: Iterable[RationalLike]) -> "Spectrum":
        """Normalize positive weights exactly; the one sanctioned rescaling path."""
        ws = [as_fraction(w) for w in weights]
        total = sum(ws, Fraction(0))
        if total <= 0:
            raise ValueError("weights must have positive total")
        return cls([w / total for w in ws])

    def to_dict(self) -> dict:
        return {"eigenvalues": [format_fraction(p) for p in self.eigenvalues]}

    @classmethod
    def from_dict(cls, data: dict) -> "Spectrum":
        return cls(data["eigenvalues"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PowerSumSeries:
    """Power sums ``P_1, P_2, ...`` stored 0-based in ``values``.

    Use :meth:`moment` for the 1-based view that matches the math.
    """

    values: tuple
    kind: str = "exact"

    def __init__(self, values: Iterable[RationalLike], kind: str = "exact"):
        if kind not in SERIES_KINDS:
            raise ValueError(f"unknown series kind {kind!r}")
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in values))
        object.__setattr__(self, "kind", kind)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def moment(self, i: int) -> Fraction:
        if not 1 <= i <= len(self.values):
            raise IndexError(f"moment {i} outside 1..{len(self.values)}")
        return self.values[i - 1]

    def head(self, t: int) -> "PowerSumSeries":
        return PowerSumSeries(self.values[:t], self.kind)

    def as_floats(self) -> list:
        return [float(v) for v in self.values]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "values": [format_fraction(v) for v in self.values],
            "values_float": self.as_floats(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PowerSumSeries":
        return cls(data["values"], data.get("kind", "exact"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PowerSumSeries":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SymmetricPolys:
    """Elementary symmetric polynomials ``e_0 = 1, e_1, ..., e_t``."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable[RationalLike]):
        cs = tuple(as_fraction(c) for c in coeffs)
        if not cs or cs[0] != 1:
            raise ValueError("coeffs[0] must be 1")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, idx):
        return self.coeffs[idx]

    def truncate(self, t: int) -> "SymmetricPolys":
        return SymmetricPolys(self.coeffs[: t + 1])


def exact_trace_power(s: Spectrum, k: int) -> Fraction:
    """``Tr(rho^k)`` evaluated directly from the eigenvalues."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum((p**k for p in s.eigenvalues), Fraction(0))


def power_sums(s: Spectrum, t: int) -> PowerSumSeries:
    """Exact ``P_1..P_t``, accumulating powers incrementally."""
    if t < 1:
        raise ValueError("t must be >= 1")
    powers = list(s.eigenvalues)
    out = []
    for _ in range(t):
        out.append(sum(powers, Fraction(0)))
        powers = [x * p for x, p in zip(powers, s.eigenvalues)]
    return PowerSumSeries(out, "exact")


def _values(series) -> Sequence[Fraction]:
    if isinstance(series, PowerSumSeries):
        return series.values
    return [as_fraction(v) for v in series]


def newton_girard(P, t: int) -> SymmetricPolys:
    """Elementary symmetric polynomials from the first ``t`` power sums.

    ``e_k = (1/k) sum_{i=1..k} (-1)^(i-1) e_{k-i} P_i``. The same routine
    serves exact power sums and noisy estimates alike.
    """
    vals = _values(P)
    if t < 0:
        raise ValueError("t must be >= 0")
    if len(vals) < t:
        raise ValueError(f"need {t} power sums, got {len(vals)}")
    # plain ints while everything stays integral; much cheaper than Fraction
    vals = [v.numerator if v.denominator == 1 else v for v in vals[:t]]
    e = [1]
    for k in range(1, t + 1):
        acc = 0
        for i in range(1, k + 1):
            term = e[k - i] * vals[i - 1]
            acc = acc + term if i % 2 else acc - term
        if isinstance(acc, int) and acc % k == 0:
            e.append(acc // k)
        else:
            e.append(Fraction(acc) / k)
    return SymmetricPolys(e)


def _coprime_base(nums: Iterable[int]) -> list:
    """Pairwise coprime integers that every input factors over (no factoring)."""
    todo = [n for n in nums if n > 1]
    base = []
    while todo:
        x = todo.pop()
        for idx, b in enumerate(base):
            g = math.gcd(x, b)
            if g > 1:
                base.pop(idx)
                todo.extend(v for v in (g, b // g, x // g) if v > 1)
                break
        else:
            base.append(x)
    return base


def _scale(dens_at: list) -> int:
    """Smallest ``c`` over the coprime base with ``den | c**index`` for every pair."""
    base = _coprime_base({d for d, _ in dens_at})
    c = 1
    for b in base:
        need = 0
        for d, index in dens_at:
            e = 0
            while d % b == 0:
                d //= b
                e += 1
            need = max(need, -(-e // index))
        c *= b**need
    return c


def extend_series(a: SymmetricPolys, seed, k: int, kind: str = "extended") -> PowerSumSeries:
    """Extend ``seed`` to length ``k`` with the order-t Newton-Girard recurrence.

    ``x_i = sum_{j=1..t} (-1)^(j-1) a_j x_{i-j}`` for ``i > t``, where ``t`` is
    ``len(seed)``. Works for plain moments and for observable-weighted ones.
    """
    vals = list(_values(seed))
    t = len(vals)
    if a.order != t:
        raise ValueError(f"need {t + 1} coefficients for a seed of length {t}, got {len(a)}")
    if k < t:
        raise ValueError(f"cannot extend a length-{t} seed to k={k}")
    if k == t:
        return PowerSumSeries(vals, kind)
    # run the recurrence on y_i = c^i x_i, which is integral with integer
    # coefficients c^j a_j; only the outputs need gcd reduction
    coeffs = a.coeffs
    c = _scale([(x.denominator, i) for i, x in enumerate(vals, 1)]
               + [(coeffs[j].denominator, j) for j in range(1, t + 1)])
    powers = [1]
    for _ in range(k):
        powers.append(powers[-1] * c)
    ys = [x.numerator * (powers[i] // x.denominator) for i, x in enumerate(vals, 1)]
    signed = [(j, coeffs[j].numerator * (powers[j] // coeffs[j].denominator) * (1 if j % 2 else -1))
              for j in range(1, t + 1) if coeffs[j]]
    for i in range(t, k):
        ys.append(sum(A * ys[i - j] for j, A in signed))
    vals.extend(Fraction(ys[i], powers[i + 1]) for i in range(t, k))
    return PowerSumSeries(vals, kind)
