"""Downstream uses of trace-of-power series: polynomial traces, the Gibbs
Taylor cost, the ``K_alpha`` quantity and PT-moment entanglement tests."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

import numpy as np

from .exact import PowerSumSeries, as_fraction
from .estimation import estimate_from_moments
from .linalg import DenseHermitian, hermitian_eigenvalues
from .multistate import CrossTraceGrid

ENTANGLEMENT_TOL = 1e-9


@dataclass(frozen=True)
class PolynomialSpec:
    """``f(x) = sum_k c_k x^k`` with trailing zeros stripped."""

    coeffs: tuple

    def __init__(self, coeffs):
        cs = [as_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coeff_l1(self) -> Fraction:
        return sum((abs(c) for c in self.coeffs), Fraction(0))

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (Fraction, int)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(acc, Fraction) else float(c))
        return acc


def binomial_series(alpha, m: int) -> PolynomialSpec:
    """Degree-``m`` Taylor truncation of ``(1 + x)^alpha``."""
    alpha = as_fraction(alpha)
    coeffs = [Fraction(1)]
    for k in range(1, m + 1):
        coeffs.append(coeffs[-1] * (alpha - k + 1) / k)
    return PolynomialSpec(coeffs)


def exp_series(beta, m: int) -> PolynomialSpec:
    """Degree-``m`` Taylor truncation of ``exp(beta x)``."""
    beta = as_fraction(beta)
    return PolynomialSpec([beta**k / factorial(k) for k in range(m + 1)])


def nonlinear_trace(poly: PolynomialSpec, series: PowerSumSeries, rank_or_dim: int) -> Fraction:
    """``Tr f(rho) = c_0 * rank_or_dim + sum_k c_k P_k``.

    ``rank_or_dim`` decides how many zero eigenvalues the constant term sees.
    """
    if len(series) < poly.degree:
        raise ValueError(f"series has {len(series)} moments, polynomial needs {poly.degree}")
    total = poly.coeffs[0] * rank_or_dim
    for k in range(1, poly.degree + 1):
        total += poly.coeffs[k] * series.moment(k)
    return total


def gibbs_cost(series: PowerSumSeries, q: int) -> Fraction:
    """``S_q = sum_{i=1..q} Tr((rho - I)^i rho)`` through the binomial expansion."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if len(series) < q + 1:
        raise ValueError(f"need {q + 1} moments, got {len(series)}")
    total = Fraction(0)
    for i in range(1, q + 1):
        for j in range(i + 1):
            term = comb(i, j) * series.moment(j + 1)
            total += term if (i - j) % 2 == 0 else -term
    return total


def k_alpha_distance(grid: CrossTraceGrid, poly_a: PolynomialSpec, poly_b: PolynomialSpec) -> Fraction:
    """``sum_ij a_i b_j Tr(rho^i sigma^j)`` with ``rho^0 = sigma^0 = I``.

    With truncations of ``(1+x)^alpha`` and ``(1+x)^(1-alpha)`` this
    approximates ``Tr[(1+rho)^alpha (1+sigma)^(1-alpha)]``.
    """
    rows, cols = grid.shape
    if poly_a.degree > rows or poly_b.degree > cols:
        raise ValueError("grid smaller than the polynomial degrees")
    total = Fraction(0)
    for i, ca in enumerate(poly_a.coeffs):
        if not ca:
            continue
        for j, cb in enumerate(poly_b.coeffs):
            if cb:
                total += ca * cb * grid.entry(i, j)
    return total


@dataclass(frozen=True)
class Verdict:
    entangled: bool
    index: Optional[int]
    esp: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return "entangled" if self.entangled else "inconclusive"


def pt_elementary(pt: Sequence, r: int) -> list:
    """``e_0..e_r`` from PT moments; exact when every moment is a Fraction."""
    exact = all(isinstance(x, (Fraction, int)) for x in pt[:r])
    vals = [Fraction(x) for x in pt[:r]] if exact else [float(x) for x in pt[:r]]
    e = [Fraction(1) if exact else 1.0]
    for k in range(1, r + 1):
        acc = 0
        for i in range(1, k + 1):
            term = e[k - i] * vals[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(acc / k)
    return e


def detect_entanglement(pt: Sequence, r: int, tol: float = ENTANGLEMENT_TOL, extend: bool = False) -> Verdict:
    """Flag entanglement when some ``e_i`` of the PT spectrum is negative.

    Needs ``r`` moments. With ``extend=True`` a shorter list is completed by
    the moment recurrence, which is only sound when the PT spectrum is
    nonnegative.
    """
    pt = list(pt)
    if len(pt) < r:
        if not extend:
            raise ValueError(f"need {r} PT moments, got {len(pt)}")
        if not pt:
            raise ValueError("no PT moments supplied")
        series, _ = estimate_from_moments([as_fraction(x) for x in pt], r)
        pt = list(series.values) if all(isinstance(x, Fraction) for x in pt) else series.as_floats()
    e = pt_elementary(pt, r)
    exact = isinstance(e[0], Fraction)
    for i in range(1, r + 1):
        if (e[i] < 0) if exact else (e[i] < -tol):
            return Verdict(True, i, e)
    return Verdict(False, None, e)


def direct_pt_check(eigenvalues: Sequence[float], tol: float = ENTANGLEMENT_TOL) -> Optional[int]:
    """Smallest ``i`` with a negative elementary symmetric polynomial of the
    given eigenvalues, by polynomial expansion; ``None`` if none."""
    coeffs = np.poly(np.asarray(eigenvalues, dtype=float))
    # np.poly gives prod(x - l) = sum (-1)^k e_k x^(n-k)
    for i in range(1, len(coeffs)):
        e_i = coeffs[i] * (-1) ** i
        if e_i < -tol:
            return i
    return None


def verdicts_csv(rows) -> str:
    """``(label, Verdict)`` pairs to CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "verdict", "index"])
    for label, v in rows:
        w.writerow([label, v.label, "" if v.index is None else v.index])
    return buf.getvalue()


def schatten_reference(a: DenseHermitian, b: DenseHermitian, p: int) -> float:
    """``(Tr|a - b|^p)^(1/p)`` from the eigenvalues of ``a - b``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    diff = DenseHermitian(a.matrix - b.matrix)
    return float(sum(abs(x) ** p for x in hermitian_eigenvalues(diff)) ** (1 / p))
