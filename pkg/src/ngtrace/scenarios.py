"""Eigenvalue distributions and the two simulation grids."""
from __future__ import annotations

import csv
import io
import json
import time
import uuid
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import lemma2_bound
from .estimation import (
    EPSILONS,
    KS,
    NORMAL_APPROX_THRESHOLD,
    TABLE_ALT_RANK,
    TABLE_EFFECTIVE_RANK,
    EstimationConfig,
    effective_rank,
    effective_rank_alt,
    required_runs,
    run_algorithm1,
    table_value,
)
from .exact import Spectrum, extend_series, format_fraction, newton_girard, power_sums

KINDS = ("geometric", "arithmetic", "one_dominant", "identical")


@dataclass(frozen=True)
class DistributionKind:
    tag: str
    r: int = 16
    ratio: Fraction = Fraction(2)
    width: Fraction = Fraction(124, 1000)
    residual: Fraction = Fraction(1, 100)
    seed: int = 0

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown distribution {self.tag!r}; choose from {KINDS}")
        if self.r < 1:
            raise ValueError("r must be >= 1")


def gen_spectrum(kind: DistributionKind) -> Spectrum:
    r = kind.r
    if kind.tag == "identical":
        return Spectrum.uniform(r)
    if kind.tag == "geometric":
        ratio = Fraction(kind.ratio)
        return Spectrum.from_weights([ratio ** (r - 1 - i) for i in range(r)])
    if kind.tag == "arithmetic":
        if r == 1:
            return Spectrum([1])
        mean = Fraction(1, r)
        step = Fraction(kind.width) / (r - 1)
        values = [mean + step * (Fraction(r - 1, 2) - i) for i in range(r)]
        if min(values) <= 0:
            raise ValueError(f"width {kind.width} too large for r={r}")
        return Spectrum(values)
    # one_dominant
    if r == 1:
        return Spectrum([1])
    s = Fraction(kind.residual)
    if not 0 < s < Fraction(r - 1, r):
        raise ValueError("residual mass must keep the first eigenvalue dominant")
    rng = np.random.default_rng(kind.seed)
    draws = [Fraction(int(x)) for x in rng.integers(1, 1001, size=r - 1)]
    total = sum(draws)
    return Spectrum([1 - s] + [s * d / total for d in draws])


def random_spectrum(r: int, rng: np.random.Generator, denominator: int = 1000) -> Spectrum:
    """Random rational spectrum with small denominators."""
    weights = rng.integers(1, denominator + 1, size=r)
    return Spectrum.from_weights([int(w) for w in weights])


@dataclass
class ScenarioRow:
    distribution: str
    k: int
    epsilon: float
    t: int
    n_samples: int
    max_error: float
    bound: float
    satisfied: bool
    seed: int
    table_t: Optional[int] = None
    mode: str = ""
    max_error_exact: str = ""
    bound_exact: str = ""


@dataclass
class ScenarioReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.rows)

    def satisfied_fraction(self) -> float:
        return sum(r.satisfied for r in self.rows) / len(self.rows) if self.rows else 1.0


COLUMNS = [f for f in ScenarioRow.__dataclass_fields__]


def new_metadata(**extra) -> dict:
    meta = {"run_id": uuid.uuid4().hex[:12], "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    meta.update(extra)
    return meta


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def emit_report(report: ScenarioReport, fmt: str = "csv", out=None) -> str:
    """Serialize to ``csv`` or ``json``; writes to ``out`` (path or stream) when given."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in report.rows:
            d = asdict(row)
            w.writerow([_fmt(d[c]) for c in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(
            {"metadata": report.metadata, "rows": [asdict(r) for r in report.rows]}, indent=1
        )
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w") as fh:
                fh.write(text)
    return text


def load_report(text: str) -> ScenarioReport:
    data = json.loads(text)
    return ScenarioReport([ScenarioRow(**r) for r in data["rows"]], data.get("metadata", {}))


def point_seed(master: int, *coords: int) -> int:
    """Per-grid-point seed, independent of evaluation order."""
    ss = np.random.SeedSequence([int(master) & (2**64 - 1), *coords])
    return int(ss.generate_state(1, np.uint64)[0])


def rank_for(rank_formula: str, k: int, eps: float, r: int) -> tuple:
    if rank_formula in ("effrank", "eff-rank"):
        return effective_rank(k, eps, r), table_value(TABLE_EFFECTIVE_RANK, k, eps)
    if rank_formula == "appendixb":
        return effective_rank_alt(k, eps, r), table_value(TABLE_ALT_RANK, k, eps)
    if rank_formula.startswith("fixed:"):
        return min(int(rank_formula.split(":", 1)[1]), r), None
    raise ValueError(f"unknown rank formula {rank_formula!r}")


def run_scenario1(
    kinds: Iterable[str] = KINDS,
    ks: Sequence[int] = KS,
    epsilons: Sequence[float] = EPSILONS,
    rank_formula: str = "effrank",
    repeats: int = 20,
    master_seed: int = 0,
    r: int = 16,
    exact_oracle: bool = False,
    progress=None,
) -> ScenarioReport:
    """Sampled estimation over the (distribution, k, eps, repeat) grid.

    Each row records ``max_{i<=k} |Q_i - P_i|`` against ``eps``. Failures in
    one cell are recorded and the run moves on.
    """
    report = ScenarioReport(metadata=new_metadata(
        scenario=1, rank_formula=rank_formula, repeats=repeats, master_seed=master_seed, r=r,
    ))
    kinds = list(kinds)
    for di, tag in enumerate(kinds):
        kind = DistributionKind(tag, r=r)
        spectrum = gen_spectrum(kind)
        exact = power_sums(spectrum, max(ks))
        for k in ks:
            for ei, eps in enumerate(epsilons):
                t, table_t = rank_for(rank_formula, k, eps, r)
                for rep in range(repeats):
                    seed = point_seed(master_seed, KINDS.index(tag), k, ei, rep)
                    row = ScenarioRow(tag, k, float(eps), t, 0, float("nan"), float(eps), False, seed, table_t)
                    try:
                        n = 0 if exact_oracle else required_runs(k, eps)
                        cfg = EstimationConfig(k=k, epsilon=eps, t=t, seed=seed, exact_oracle=exact_oracle)
                        est = run_algorithm1(spectrum, cfg)
                        err = max(abs(q - p) for q, p in zip(est.q.values, exact.values[:k]))
                        row.n_samples = n
                        row.mode = "exact" if exact_oracle else (
                            "binomial" if n <= NORMAL_APPROX_THRESHOLD else "normal-approx")
                        row.max_error = float(err)
                        row.max_error_exact = format_fraction(err)
                        row.satisfied = float(err) < float(eps)
                    except (OverflowError, ValueError) as exc:
                        row.mode = f"failed: {exc}"
                    report.rows.append(row)
                if progress is not None:
                    progress(tag, k, eps)
    return report


def scenario2_errors(spectrum: Spectrum, k: int, t: int) -> Fraction:
    """``max_{t < j <= k} |P~_j - P_j|`` with exact seeds."""
    exact = power_sums(spectrum, k)
    if t >= k:
        return Fraction(0)
    a = newton_girard(exact.values[:t], t)
    ext = extend_series(a, exact.values[:t], k)
    return max(abs(ext.values[j] - exact.values[j]) for j in range(t, k))


def run_scenario2(
    kinds: Iterable[str] = KINDS, k: int = 32, t_range: Optional[Iterable[int]] = None, r: int = 16
) -> ScenarioReport:
    """Truncation error of the recurrence against its closed-form bound."""
    t_range = range(1, r + 1) if t_range is None else t_range
    report = ScenarioReport(metadata=new_metadata(scenario=2, k=k, r=r))
    for tag in kinds:
        spectrum = gen_spectrum(DistributionKind(tag, r=r))
        for t in t_range:
            err = scenario2_errors(spectrum, k, t)
            bound = lemma2_bound(k, t, spectrum.rank)
            report.rows.append(ScenarioRow(
                tag, k, 0.0, t, 0, float(err), float(bound), err <= bound, 0,
                mode="exact-seeds", max_error_exact=format_fraction(err), bound_exact=format_fraction(bound),
            ))
    return report
