"""Command-line front-end: ``evorational {classify,wstar,simulate,allais}``.

Exit codes: 0 success, 2 usage error, 3 unparseable input, 4 invariant
violation (e.g. probabilities not summing to 1).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .allais import Variant, option, paradox_consistency_report, region_csv, region_sweep
from .dynamics import SimConfig, estimate_fixation, simulate_trajectory
from .er_core import DEFAULT_GRID, DEFAULT_TOLERANCE, classify, sweep_wstar
from .lottery import (
    FitnessParams,
    InvariantViolation,
    JointLottery,
    Lottery,
    ParseError,
    joint_from_json,
    log_fitness_mean,
    lottery_from_csv,
    lottery_from_json,
)

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVARIANT = 4


def _read_source(source: str) -> tuple[str, str]:
    """Return ``(text, kind)`` for inline JSON or a file path."""
    if source.lstrip().startswith(("{", "[")):
        return source, "json"
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror}") from exc
    return text, "csv" if path.suffix.lower() == ".csv" else "json"


def load_lottery(source: str) -> Lottery:
    """Inline JSON, a ``.json``/``.csv`` file, or a built-in label like ``kt.A``."""
    if not Path(source).exists():
        try:
            return option(source)
        except KeyError:
            pass
    text, kind = _read_source(source)
    return lottery_from_csv(text) if kind == "csv" else lottery_from_json(text)


def load_joint(source: str) -> JointLottery:
    text, _ = _read_source(source)
    return joint_from_json(text)


def parse_range(text: str) -> list[float]:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected start:stop:num, got {text!r}")
        try:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if num < 1:
            raise argparse.ArgumentTypeError("grid must contain at least one point")
        return [float(v) for v in np.linspace(start, stop, num)]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not values:
        raise argparse.ArgumentTypeError("grid must contain at least one point")
    return values


# Output locations do not affect results and would break byte-identical reruns.
_UNECHOED = {"func", "command", "out", "trajectory"}


def _manifest(command: str, args: argparse.Namespace) -> dict:
    params = {
        k: v for k, v in sorted(vars(args).items()) if k not in _UNECHOED and v is not None
    }
    return {
        "command": command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
    }


def _emit(text: str, out: str | None, manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    stamped = dict(manifest, timestamp=datetime.now(timezone.utc).isoformat())
    Path(out + ".manifest.json").write_text(json.dumps(stamped, indent=2, sort_keys=True) + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _endowments(args) -> list[float]:
    if args.endowment_range is not None:
        return args.endowment_range
    return [args.endowment]


def cmd_classify(args) -> int:
    a = load_lottery(args.lottery_a)
    b = load_lottery(args.lottery_b)
    params = FitnessParams(args.endowment, args.attention)
    verdict = classify(a, b, params, args.tolerance)
    manifest = _manifest("classify", args)
    result = {
        "verdict": verdict.tag.value,
        "gap": verdict.gap,
        "log_fitness_mean_a": log_fitness_mean(a, params),
        "log_fitness_mean_b": log_fitness_mean(b, params),
        "manifest": manifest,
    }
    _emit(_json(result), args.out, manifest)
    return 0


def cmd_wstar(args) -> int:
    a = load_lottery(args.lottery_a)
    b = load_lottery(args.lottery_b)
    curve = sweep_wstar(a, b, _endowments(args), args.grid)
    manifest = _manifest("wstar", args)
    text = curve.to_csv() if args.format == "csv" else curve.to_json() + "\n"
    _emit(text, args.out, manifest)
    return 0


def cmd_simulate(args) -> int:
    if args.joint is not None:
        lot_a, lot_b = None, load_joint(args.joint)
    else:
        if args.lottery_a is None or args.lottery_b is None:
            raise _UsageError("simulate needs --joint or both --lottery-a and --lottery-b")
        lot_a, lot_b = load_lottery(args.lottery_a), load_lottery(args.lottery_b)
    params = FitnessParams(args.endowment, args.attention)
    try:
        config = SimConfig(
            seed=args.seed,
            max_generations=args.generations,
            fixation_epsilon=args.epsilon,
            replicates=args.replicates,
            initial_frequency=args.initial_frequency,
        )
    except ValueError as exc:
        raise InvariantViolation("config", str(exc)) from exc
    manifest = _manifest("simulate", args)
    report = estimate_fixation(lot_a, lot_b, params, config).to_dict()
    report["manifest"] = manifest
    _emit(_json(report), args.out, manifest)
    if args.trajectory is not None:
        traj = simulate_trajectory(lot_a, lot_b, params, config)
        _emit(traj.to_csv(), args.trajectory, manifest)
    return 0


def cmd_allais(args) -> int:
    endowments = _endowments(args)
    points = region_sweep(args.variant, endowments, args.w_grid)
    manifest = _manifest("allais", args)
    summary = {
        "variant": args.variant,
        "reports": [
            paradox_consistency_report(args.variant, W, grid=args.grid).to_dict()
            for W in endowments
        ],
        "manifest": manifest,
    }
    if args.format == "csv":
        region = region_csv(points)
    else:
        region = _json(
            [
                {"W": p.endowment, "w": p.attention, "s1_prefers_A": p.prefers_A_in_S1,
                 "s2_prefers_D": p.prefers_D_in_S2}
                for p in points
            ]
        )
    if args.out is not None:
        _emit(region, args.out, manifest)
        sys.stdout.write(_json(summary))
    else:
        sys.stdout.write(region)
        sys.stderr.write(_json(summary))
    return 0


class _UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evorational",
        description="Evolutionarily rational choice between lotteries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def lotteries(p, required=True):
        p.add_argument("--lottery-a", required=required,
                       help="lottery A: inline JSON, .json/.csv file, or built-in label (kt.A)")
        p.add_argument("--lottery-b", required=required, help="lottery B, same forms as A")

    def output(p, formats=None, default=None):
        p.add_argument("--out", help="write to this file (plus a .manifest.json sidecar)")
        if formats:
            p.add_argument("--format", choices=formats, default=default)

    p = sub.add_parser("classify", help="ER verdict for a pair of lotteries")
    lotteries(p)
    p.add_argument("--endowment", type=float, default=1.0)
    p.add_argument("--attention", type=float, required=True)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    output(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("wstar", help="critical attention degree(s)")
    lotteries(p)
    p.add_argument("--endowment", type=float, default=1.0)
    p.add_argument("--endowment-range", type=parse_range, help="start:stop:num or W1,W2,...")
    p.add_argument("--grid", "--w-grid", dest="grid", type=_positive_int, default=DEFAULT_GRID,
                   help="bracketing grid size")
    output(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_wstar)

    p = sub.add_parser("simulate", help="Monte Carlo fixation of the frequency dynamics")
    lotteries(p, required=False)
    p.add_argument("--joint", help="joint (a, b) lottery JSON, replaces --lottery-a/-b")
    p.add_argument("--endowment", type=float, default=1.0)
    p.add_argument("--attention", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=_positive_int, default=1000)
    p.add_argument("--generations", type=_positive_int, default=100_000)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--initial-frequency", type=float, default=0.5)
    p.add_argument("--trajectory", help="also write one trajectory as CSV to this path")
    output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("allais", help="Allais region data and threshold summary")
    p.add_argument("--version", "--variant", dest="variant",
                   choices=[v.value for v in Variant], default=Variant.KT.value)
    p.add_argument("--endowment", type=float, default=14000.0)
    p.add_argument("--endowment-range", type=parse_range)
    p.add_argument("--w-grid", type=parse_range, default=parse_range("0.01:0.99:99"),
                   help="attention grid, start:stop:num or w1,w2,...")
    p.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID,
                   help="bracketing grid size for thresholds")
    output(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_allais)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"error: invalid {exc.field}: {exc.reason}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
