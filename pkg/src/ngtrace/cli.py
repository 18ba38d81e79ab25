"""Command-line entry point: ``ngtrace <subcommand> [flags]``.

Exit status is 0 when every reported row is satisfied, 2 when some bound row
fails and 1 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from .applications import detect_entanglement, direct_pt_check
from .bounds import clip_perturbation, esp_max_bound, lemma1_check, lemma2_bound
from .estimation import EPSILONS, KS, EstimationConfig, run_algorithm1
from .exact import Spectrum, format_fraction, newton_girard, power_sums
from .linalg import (
    DenseHermitian,
    bell_state,
    hermitian_eigenvalues,
    partial_transpose,
    pt_moments,
    random_density,
    werner_state,
)
from .scenarios import (
    KINDS,
    DistributionKind,
    emit_report,
    gen_spectrum,
    random_spectrum,
    rank_for,
    run_scenario1,
    run_scenario2,
    scenario2_errors,
)

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; 2 is reserved for failed bounds
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list:
    try:
        out = []
        for part in text.split(","):
            if "-" in part.strip()[1:] or ".." in part:
                lo, hi = part.replace("..", "-").split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like 8,16 or 1-16, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers like 0.1,0.01, got {text!r}")


def _dist_list(text: str) -> list:
    tags = KINDS if text == "all" else text.split(",")
    for tag in tags:
        if tag not in KINDS:
            raise argparse.ArgumentTypeError(f"unknown distribution {tag!r}; choose from {', '.join(KINDS)}")
    return list(tags)


def _parse_rank_formula(text: str) -> str:
    if text in ("effrank", "appendixb"):
        return text
    if text.startswith("fixed:"):
        try:
            if int(text[6:]) >= 1:
                return text
        except ValueError:
            pass
    raise argparse.ArgumentTypeError("rank formula must be effrank, appendixb or fixed:<n>")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ngtrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, dist_default="all"):
        p.add_argument("--dist", type=_dist_list, default=_dist_list(dist_default),
                       help=f"comma list of {', '.join(KINDS)} or 'all'")
        p.add_argument("--r", type=int, default=16, help="rank of generated spectra")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="write here instead of stdout")

    for name, formula in (("scenario1", "effrank"), ("appendixb", "appendixb")):
        p = sub.add_parser(name, help=f"sampled estimation grid (default t rule: {formula})")
        common(p)
        p.add_argument("--k", type=_int_list, default=list(KS))
        p.add_argument("--eps", type=_float_list, default=list(EPSILONS))
        p.add_argument("--repeats", type=int, default=20)
        p.add_argument("--rank-formula", type=_parse_rank_formula, default=formula)
        p.add_argument("--exact-oracle", action="store_true", help="bypass sampling")

    p = sub.add_parser("scenario2", help="truncation error against the closed-form bound")
    common(p)
    p.add_argument("--k", type=int, default=32)
    p.add_argument("--t", type=_int_list, default=None, help="e.g. 1-16 (default 1..r)")

    p = sub.add_parser("estimate", help="one sampled estimation run on a generated spectrum")
    common(p, "geometric")
    p.add_argument("--spectrum", help="JSON file with {\"eigenvalues\": [...]} instead of --dist")
    p.add_argument("--k", type=int, default=32)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--rank-formula", type=_parse_rank_formula, default="effrank")
    p.add_argument("--exact-oracle", action="store_true", help="bypass sampling")

    p = sub.add_parser("detect", help="PT-moment entanglement test")
    p.add_argument("--state", default="bell",
                   help="bell, mixed, werner:<w>, random, or a DenseHermitian JSON file")
    p.add_argument("--r", type=int, default=4, help="number of PT moments / elementary polynomials")
    p.add_argument("--t", type=int, default=None, help="use only t moments and extend (nonnegative PT only)")
    p.add_argument("--repeats", type=int, default=1, help="number of states for --state random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = sub.add_parser("bounds", help="check the perturbation, truncation and coefficient bounds")
    common(p)
    p.add_argument("--k", type=int, default=32)
    p.add_argument("--t", type=_int_list, default=None, help="truncation orders (default 1..r)")
    p.add_argument("--eps", type=float, default=0.1, help="perturbation size for the random trials")
    p.add_argument("--repeats", type=int, default=100, help="random perturbation trials")
    return parser


def _write(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_rows(rows: list, fmt: str, out, meta=None) -> None:
    if fmt == "json":
        text = json.dumps({"metadata": meta or {}, "rows": rows}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    _write(text, out)


def _status(rows) -> int:
    return EXIT_OK if all(r["satisfied"] if isinstance(r, dict) else r.satisfied for r in rows) else EXIT_FAILED


def _cmd_scenario1(args) -> int:
    def progress(tag, k, eps):
        print(f"  {tag} k={k} eps={eps:g}", file=sys.stderr)

    rep = run_scenario1(args.dist, args.k, args.eps, args.rank_formula, args.repeats,
                        args.seed, args.r, args.exact_oracle, progress if args.out else None)
    emit_report(rep, args.format, args.out or sys.stdout)
    if args.out:
        print(f"{len(rep.rows)} rows, {rep.satisfied_fraction():.2%} satisfied", file=sys.stderr)
    return _status(rep.rows)


def _cmd_scenario2(args) -> int:
    t_range = args.t if args.t is not None else range(1, args.r + 1)
    if any(t < 1 or t > args.r for t in t_range):
        raise UsageError(f"--t values must lie in 1..{args.r}")
    rep = run_scenario2(args.dist, args.k, t_range, args.r)
    emit_report(rep, args.format, args.out or sys.stdout)
    return _status(rep.rows)


def _load_spectrum(args) -> Spectrum:
    if args.spectrum:
        with open(args.spectrum) as fh:
            return Spectrum.from_json(fh.read())
    if len(args.dist) != 1:
        raise UsageError("estimate takes a single --dist")
    return gen_spectrum(DistributionKind(args.dist[0], r=args.r))


def _cmd_estimate(args) -> int:
    s = _load_spectrum(args)
    t = args.t if args.t is not None else rank_for(args.rank_formula, args.k, args.eps, s.rank)[0]
    cfg = EstimationConfig(k=args.k, epsilon=args.eps, t=t, seed=args.seed, exact_oracle=args.exact_oracle)
    est = run_algorithm1(s, cfg)
    exact = power_sums(s, args.k)
    rows = []
    for i, (q, p) in enumerate(zip(est.q, exact), start=1):
        err = abs(q - p)
        rows.append({
            "i": i, "estimate": float(q), "exact": float(p), "error": float(err),
            "source": "sampled" if i <= est.t else "extended",
            "estimate_exact": format_fraction(q), "satisfied": float(err) < args.eps,
        })
    meta = {"t": est.t, "samples_per_moment": est.samples_per_moment, "config": cfg.to_dict(),
            "eigenvalues": [format_fraction(x) for x in s.eigenvalues]}
    _emit_rows(rows, args.format, args.out, meta)
    return _status(rows)


def _states(args, rng):
    spec = args.state
    if spec == "bell":
        yield "bell", bell_state()
    elif spec == "mixed":
        yield "mixed", DenseHermitian(np.eye(4) / 4)
    elif spec.startswith("werner:"):
        try:
            w = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad Werner weight in {spec!r}")
        yield spec, werner_state(w)
    elif spec == "random":
        for n in range(args.repeats):
            yield f"random{n}", random_density(4, rng)
    else:
        try:
            with open(spec) as fh:
                yield spec, DenseHermitian.from_json(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read state {spec!r}: {exc}")


def _cmd_detect(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for label, m in _states(args, rng):
        d = m.dim
        da = int(round(d**0.5))
        if da * da != d:
            raise UsageError(f"dimension {d} is not a square bipartite system")
        r = min(args.r, d)
        n_moments = args.t if args.t is not None else r
        pt = pt_moments(m, da, da, n_moments)
        v = detect_entanglement(pt, r, extend=args.t is not None)
        direct = direct_pt_check(hermitian_eigenvalues(partial_transpose(m, da, da))[:d])
        direct = direct if direct is None or direct <= r else None
        rows.append({
            "state": label, "verdict": v.label, "index": "" if v.index is None else v.index,
            "direct_index": "" if direct is None else direct,
            "esp": ";".join(format(float(x), ".17g") for x in v.esp[1:]),
            "satisfied": v.index == direct,
        })
    _emit_rows(rows, args.format, args.out)
    return _status(rows)


def _cmd_bounds(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    t_range = args.t if args.t is not None else list(range(1, args.r + 1))
    if any(t < 1 or t > args.r for t in t_range):
        raise UsageError(f"--t values must lie in 1..{args.r}")
    for tag in args.dist:
        s = gen_spectrum(DistributionKind(tag, r=args.r))
        for t in t_range:
            err, bound = scenario2_errors(s, args.k, t), lemma2_bound(args.k, t, args.r)
            rows.append({"check": "truncation", "case": f"{tag} t={t}", "empirical": float(err),
                         "theoretical": float(bound), "satisfied": err <= bound})
        a = newton_girard(power_sums(s, s.rank), s.rank)
        for t in t_range:
            cap = esp_max_bound(t, s.rank)
            rows.append({"check": "esp_max", "case": f"{tag} t={t}", "empirical": float(a[t]),
                         "theoretical": float(cap), "satisfied": a[t] <= cap})
    scale = int(round(args.eps * 10**6))
    for n in range(args.repeats):
        r = int(rng.integers(1, min(args.r, 8) + 1))
        s = random_spectrum(r, rng)
        exact = power_sums(s, r)
        eps = clip_perturbation(exact, [Fraction(int(x), 10**6) for x in rng.integers(-scale, scale + 1, size=r)])
        reports = lemma1_check(exact, eps)
        worst = max(reports, key=lambda b: b.empirical - b.theoretical)
        rows.append({"check": "perturbation", "case": f"trial{n} r={r} {worst.context}",
                     "empirical": worst.empirical, "theoretical": worst.theoretical,
                     "satisfied": all(b.satisfied for b in reports)})
    _emit_rows(rows, args.format, args.out)
    return _status(rows)


COMMANDS = {
    "scenario1": _cmd_scenario1,
    "appendixb": _cmd_scenario1,
    "scenario2": _cmd_scenario2,
    "estimate": _cmd_estimate,
    "detect": _cmd_detect,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"ngtrace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
