"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments or configuration, 2 internal or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .analysis import theory_report
from .model import ChannelParams, ConfigError, Scheme, SimConfig, require_valid
from .montecarlo import ExperimentSummary, run_experiment, sweep_K, sweep_p1
from .oracle import run_verified_simulation

CSV_HEADER = [
    "scheme", "K", "p1", "p2", "horizon", "paths", "seed",
    "delta1_hat", "ci1", "delta2_hat", "ci2",
    "t1_mean", "t2_mean", "t3_mean",
    "delta1_theory", "delta2_upper",
]

VERIFY_HORIZON_CAP = 10**8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not a 64-bit unsigned integer")
    return value


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="broadcast-aoi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_flags(p, out_required):
        p.add_argument("--horizon", type=int, required=True)
        p.add_argument("--paths", type=int, required=True)
        p.add_argument("--seed", type=_uint64, required=True)
        p.add_argument("--out", type=Path, required=out_required)

    p = sub.add_parser("simulate", help="run one parameter point")
    p.add_argument("--scheme", choices=[s.value for s in Scheme], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="audit path 0 with the GF(256) decoder")
    run_flags(p, out_required=False)

    p = sub.add_parser("sweep-p1", help="both schemes over a grid of p1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--p1-grid", type=_floats, required=True)
    run_flags(p, out_required=True)

    p = sub.add_parser("sweep-k", help="both schemes over a grid of K")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--k-grid", type=_ints, required=True)
    run_flags(p, out_required=True)

    p = sub.add_parser("theory", help="closed-form values and bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="check equation counting against GF(256) rank decoding")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--cycles", type=int, required=True)
    p.add_argument("--seed", type=_uint64, required=True)
    return parser


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def summary_row(s: ExperimentSummary) -> dict[str, str]:
    theory = theory_report(s.K, ChannelParams(s.p1, s.p2))
    upper = theory.delta2_upper if s.scheme is Scheme.ADAPTIVE else None
    values = [
        s.scheme.value, s.K, s.p1, s.p2, s.horizon, s.num_paths, s.seed,
        s.delta1_hat, s.ci1, s.delta2_hat, s.ci2,
        s.t1_mean, s.t2_mean, s.t3_mean,
        theory.delta1, upper,
    ]
    return dict(zip(CSV_HEADER, map(_fmt, values)))


def write_csv(table: list[ExperimentSummary], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for s in table:
            writer.writerow(summary_row(s))


def _validate_grid(cfgs_and_channels) -> None:
    for cfg, ch in cfgs_and_channels:
        for w in require_valid(cfg, ch).warnings:
            print(f"warning: K={cfg.K} p1={ch.p1} p2={ch.p2}: {w}", file=sys.stderr)


def _cmd_simulate(args) -> int:
    ch = ChannelParams(args.p1, args.p2)
    cfg = SimConfig(args.k, args.horizon, args.paths, args.seed, Scheme(args.scheme), args.oracle)
    if args.oracle and cfg.scheme is not Scheme.ADAPTIVE:
        raise ConfigError("--oracle applies to the adaptive scheme only")
    _validate_grid([(cfg, ch)])
    summary = run_experiment(cfg, ch)
    for key, value in summary_row(summary).items():
        print(f"{key}={value}")
    if args.oracle:
        _print_oracle(run_verified_simulation(cfg, ch))
    if args.out:
        write_csv([summary], args.out)
    return 0


def _cmd_sweep(args) -> int:
    base = SimConfig(1, args.horizon, args.paths, args.seed)
    if args.command == "sweep-p1":
        points = [(SimConfig(args.k, args.horizon, args.paths, args.seed), ChannelParams(p1, args.p2)) for p1 in args.p1_grid]
        _validate_grid(points)
        table = sweep_p1(args.k, args.p2, args.p1_grid, base)
    else:
        ch = ChannelParams(args.p1, args.p2)
        _validate_grid([(SimConfig(K, args.horizon, args.paths, args.seed), ch) for K in args.k_grid])
        table = sweep_K(args.p1, args.p2, args.k_grid, base)
    write_csv(table, args.out)
    print(f"wrote {len(table)} rows to {args.out}")
    return 0


def _cmd_theory(args) -> int:
    if args.k < 1:
        raise ConfigError("K < 1")
    report = theory_report(args.k, ChannelParams(args.p1, args.p2))
    fields = report.as_dict()
    if args.json:
        print(json.dumps(fields, sort_keys=False))
        return 0
    print(f"delta1_theory={fields.pop('delta1')!r}")
    for key, value in fields.items():
        print(f"{key}={value!r}")
    return 0


def _print_oracle(report) -> None:
    for d in report.degeneracies:
        print(f"degenerate: user={int(d.user)} slot={d.slot} update={d.generation_slot} symbol={d.kind.name}")
    for e in report.disagreements:
        print(f"disagree: user={int(e.user)} slot={e.slot} update={e.generation_slot} cause={e.cause}")
    print(f"oracle_cycles={report.cycles}")
    print(f"oracle_slots={report.slots}")
    print(f"decode_events={len(report.events)}")
    print(f"disagreements={len(report.disagreements)}")
    print(f"agreement_rate={report.agreement_rate:.6f}")
    print(f"all_disagreements_attributed={str(report.all_attributed).lower()}")
    print(f"user1_non_novel={report.user1_non_novel}/{report.user1_deliveries}")
    print(f"mixed_to_user2_novel={report.mixed_to_user2_novel}/{report.mixed_to_user2}")
    print(f"strip_failures={report.strip_failures}")


def _cmd_verify(args) -> int:
    if args.cycles < 1:
        raise ConfigError("cycles < 1")
    ch = ChannelParams(args.p1, args.p2)
    cfg = SimConfig(args.k, VERIFY_HORIZON_CAP, 1, args.seed, Scheme.ADAPTIVE, oracle_mode=True)
    _validate_grid([(cfg, ch)])
    _print_oracle(run_verified_simulation(cfg, ch, cycles=args.cycles))
    return 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep-p1": _cmd_sweep,
    "sweep-k": _cmd_sweep,
    "theory": _cmd_theory,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
