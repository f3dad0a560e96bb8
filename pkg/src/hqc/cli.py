"""Command-line front end.

Subcommands: ``analyze`` (full report for one state), ``certify``
(one-sided inaccessibility certificate), ``scan`` (family grid scan to
CSV), ``sweep`` (random-state conjecture sweep to envelope CSV), and
``filter`` (apply or optimise local filters).

Conventions: JSON results on stdout, CSV data to files, diagnostics on
stderr. Exit codes: 0 success, 2 input error, 3 a sweep found a
conjecture counterexample. Every run is determined by its argument
vector; the only environment input is the optional HQC_SEED seed default
(overridden by --seed), and the output metadata records which source was
used.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import serde
from .criteria import OptimizerBudget, Thresholds, classify
from .ellipsoid import Party, compute_ellipsoid
from .errors import DomainError, HqcError
from .families import Family, qd_centre_boundary, scan_family
from .filtering import Objective, apply_filters, apply_one_sided, identity_filter, optimize_one_sided
from .kernels import ACTIVE_KERNEL
from .montecarlo import DEFAULT_RANK_MIX, SweepConfig, bin_envelope, run_sweep
from .states import DensityMatrix, from_r_picture, to_r_picture


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _load_state(path: str, fmt: str, tol: float) -> DensityMatrix:
    if fmt == "json":
        return serde.load_state_json(path, tol)
    return from_r_picture(serde.load_rmatrix_csv(path), tol)


def _thresholds(args: argparse.Namespace) -> Thresholds:
    return Thresholds(c_chsh=args.c_chsh, c_f3=args.c_f3)


def _parse_grid(spec: str, name: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"--{name} must be start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DomainError(f"--{name}: {exc}") from exc
    if count < 1:
        raise DomainError(f"--{name} count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def _parse_rank_mix(spec: str) -> tuple[float, float, float, float]:
    weights = [0.0, 0.0, 0.0, 0.0]
    for item in spec.split(","):
        rank, _, weight = item.partition(":")
        try:
            idx = int(rank)
            w = float(weight)
        except ValueError as exc:
            raise DomainError(f"--rank-mix entries must be rank:weight, got {item!r}") from exc
        if not 1 <= idx <= 4:
            raise DomainError(f"--rank-mix rank must be 1..4, got {idx}")
        weights[idx - 1] = w
    return tuple(weights)  # type: ignore[return-value]


def _resolve_seed(args: argparse.Namespace) -> tuple[int, str]:
    if args.seed is not None:
        return args.seed, "flag"
    env = os.environ.get("HQC_SEED")
    if env is not None:
        try:
            return int(env), "env:HQC_SEED"
        except ValueError as exc:
            raise DomainError(f"HQC_SEED must be an integer, got {env!r}") from exc
    return 0, "default"


def _cmd_analyze(args: argparse.Namespace) -> int:
    rho = _load_state(args.state_file, args.format, args.tol)
    r = to_r_picture(rho)
    report = classify(r, _thresholds(args))
    _emit(
        {
            "report": serde.report_to_dict(report),
            "ellipsoid_a": serde.ellipsoid_to_dict(compute_ellipsoid(r, Party.A)),
            "ellipsoid_b": serde.ellipsoid_to_dict(compute_ellipsoid(r, Party.B)),
        }
    )
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    rho = _load_state(args.state_file, args.format, args.tol)
    r = to_r_picture(rho)
    th = _thresholds(args)
    party = Party[args.party]
    objective = Objective[args.objective.upper()]
    witness = compute_ellipsoid(r, party.other())
    c = float(np.linalg.norm(witness.centre))
    cutoff = th.c_chsh if objective is Objective.CHSH else th.c_f3
    _emit(
        {
            "party": party.value,
            "objective": objective.value,
            "certified_inaccessible": c > cutoff,
            "witness_centre": f"c_{party.other().value.lower()}",
            "witness_centre_magnitude": c,
            "threshold": cutoff,
            "witness_degenerate": bool(witness.degenerate),
            "conjecture_conditional": True,
        }
    )
    return 0


def _cmd_scan(args: argparse.Namespace) -> int:
    family = Family(args.family)
    th = _thresholds(args)
    theta_grid = _parse_grid(args.theta, "theta") if family is not Family.QD else np.array([0.0])
    p_grid = _parse_grid(args.p, "p")
    rows = scan_family(family, theta_grid, p_grid, th)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(serde.scan_rows_to_csv(rows))
    payload = {
        "family": family.value,
        "rows": len(rows),
        "out": args.out,
        "thresholds": {"c_chsh": th.c_chsh, "c_f3": th.c_f3},
    }
    if family is Family.QD:
        payload["boundaries"] = {
            "chsh_inaccessible_below_p": qd_centre_boundary(th.c_chsh),
            "f3_inaccessible_below_p": qd_centre_boundary(th.c_f3),
        }
    _emit(payload)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    seed, seed_source = _resolve_seed(args)
    config = SweepConfig(
        n=args.n,
        seed=seed,
        rank_mix=_parse_rank_mix(args.rank_mix) if args.rank_mix else DEFAULT_RANK_MIX,
        bins=args.bins,
        workers=args.workers,
    )
    summary = run_sweep(config)
    envelope = bin_envelope(summary)
    out_csv = args.out_prefix + "envelope.csv"
    os.makedirs(os.path.dirname(out_csv) or ".", exist_ok=True)
    with open(out_csv, "w", encoding="utf-8") as fh:
        fh.write(serde.envelope_to_csv(envelope))
    dump_paths = []
    if summary.violations:
        states_dir = os.path.join(os.path.dirname(args.out_prefix) or ".", "states")
        os.makedirs(states_dir, exist_ok=True)
        for v in summary.violations:
            path = os.path.join(states_dir, f"violation_{v.index}.json")
            doc = serde.state_to_dict(DensityMatrix(v.state))
            doc["violation"] = {
                "index": v.index,
                "b": v.b,
                "f3": v.f3,
                "c_a": v.c_a,
                "c_b": v.c_b,
                "reasons": list(v.reasons),
            }
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=1)
                fh.write("\n")
            dump_paths.append(path)
    _emit(
        {
            "n": config.n,
            "seed": config.seed,
            "seed_source": seed_source,
            "bins": config.bins,
            "workers": config.workers,
            "kernel": ACTIVE_KERNEL,
            "metadata": summary.metadata,
            "degenerate": {"c_a": summary.vs_ca.degenerate, "c_b": summary.vs_cb.degenerate},
            "violations": len(summary.violations),
            "violation_dumps": dump_paths,
            "envelope_csv": out_csv,
        }
    )
    print(f"sweep: {config.n} samples in {summary.runtime_seconds:.2f}s ({ACTIVE_KERNEL} kernel)", file=sys.stderr)
    return 3 if summary.violations else 0


def _cmd_filter(args: argparse.Namespace) -> int:
    rho = _load_state(args.state_file, args.format, args.tol)
    r_before = to_r_picture(rho)
    before = classify(r_before, _thresholds(args))
    payload: dict = {"before": serde.report_to_dict(before)}
    if args.optimize:
        party_name, objective_name = args.optimize
        if party_name not in ("A", "B"):
            raise DomainError(f"--optimize party must be A or B, got {party_name!r}")
        if objective_name.upper() not in ("CHSH", "F3"):
            raise DomainError(f"--optimize objective must be chsh or f3, got {objective_name!r}")
        party = Party[party_name]
        objective = Objective[objective_name.upper()]
        seed, seed_source = _resolve_seed(args)
        budget = OptimizerBudget(starts=args.starts, max_iters=args.max_iters, seed=seed)
        res = optimize_one_sided(
            rho, party, objective, starts=budget.starts, max_iters=budget.max_iters, seed=budget.seed
        )
        filtered, prob = apply_one_sided(rho, res.filter, party)
        payload["optimizer"] = serde.one_sided_result_to_dict(res)
        payload["seed_source"] = seed_source
    else:
        fa = serde.load_filter_json(args.filter_a) if args.filter_a else identity_filter()
        fb = serde.load_filter_json(args.filter_b) if args.filter_b else identity_filter()
        filtered, prob = apply_filters(rho, fa, fb)
        payload["filter_a"] = serde.filter_to_dict(fa)
        payload["filter_b"] = serde.filter_to_dict(fb)
    after = classify(to_r_picture(filtered), _thresholds(args))
    payload["success_probability"] = prob
    payload["after"] = serde.report_to_dict(after)
    payload["filtered_state"] = serde.state_to_dict(filtered)
    if args.out:
        serde.dump_state_json(filtered, args.out)
        payload["out"] = args.out
    _emit(payload)
    return 0


def _add_state_input_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("state_file", help="input state file")
    p.add_argument("--format", choices=["json", "rcsv"], default="json", help="state file format")
    p.add_argument("--tol", type=float, default=1e-10, help="state validation tolerance")


def _add_threshold_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c-chsh", type=float, default=0.5, help="CHSH centre threshold")
    p.add_argument("--c-f3", type=float, default=0.66, help="F3 centre threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hqc",
        description="Hidden quantum correlations of two-qubit states: analyse, certify, scan, sweep, filter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full correlation/inaccessibility report for one state")
    _add_state_input_options(p)
    _add_threshold_options(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("certify", help="one-sided inaccessibility certificate for one state")
    _add_state_input_options(p)
    _add_threshold_options(p)
    p.add_argument("--party", choices=["A", "B"], required=True, help="party whose filters are certified useless")
    p.add_argument("--objective", choices=["chsh", "f3"], required=True)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("scan", help="grid scan of a state family to CSV")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("--theta", default=f"0:{math.pi / 4}:101", help="theta grid start:stop:count")
    p.add_argument("--p", default="0:1:101", help="p grid start:stop:count")
    p.add_argument("--out", required=True, help="output CSV path")
    _add_threshold_options(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("sweep", help="random-state conjecture sweep")
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: HQC_SEED env or 0)")
    p.add_argument("--out-prefix", required=True, help="prefix for output files")
    p.add_argument("--bins", type=int, default=200, help="centre-magnitude histogram bins")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.add_argument("--rank-mix", default=None, help="rank weights, e.g. 1:0.25,2:0.25,3:0.25,4:0.25")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("filter", help="apply local filters or optimise a one-sided filter")
    _add_state_input_options(p)
    _add_threshold_options(p)
    p.add_argument("--filter-a", default=None, help="filter JSON for party A")
    p.add_argument("--filter-b", default=None, help="filter JSON for party B")
    p.add_argument(
        "--optimize",
        nargs=2,
        metavar=("PARTY", "OBJECTIVE"),
        default=None,
        help="optimise a one-sided filter, e.g. --optimize A chsh",
    )
    p.add_argument("--starts", type=int, default=32, help="optimiser starts")
    p.add_argument("--max-iters", type=int, default=500, help="optimiser iterations per start")
    p.add_argument("--seed", type=int, default=None, help="optimiser seed (default: HQC_SEED env or 0)")
    p.add_argument("--out", default=None, help="write the filtered state JSON here")
    p.set_defaults(func=_cmd_filter)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "optimize", None) and (args.filter_a or args.filter_b):
        print(json.dumps({"error": {"type": "DomainError", "message": "--optimize excludes --filter-a/--filter-b"}}))
        return 2
    try:
        return args.func(args)
    except (HqcError, OSError) as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
        return 2


if __name__ == "__main__":
    sys.exit(main())
