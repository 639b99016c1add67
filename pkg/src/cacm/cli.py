"""Command-line entry point: simulate, bounds, compare, selftest."""
from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .bounds import memory_grid, theorem3_gap_check
from .fixtures import EXAMPLE_ONE_SEGMENT, coded_segment_set, example_one

log = logging.getLogger("cacm")

EXIT_DECODE = 2
EXIT_CONFIG = 3


def _write(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    return harness.with_overrides(cfg, seed=args.seed, trials=args.trials)


def cmd_simulate(args, with_bounds=False) -> int:
    cfg = _config(args)
    curve = harness.run(cfg, parallel=args.parallel, dump_dir=args.dump_graphs,
                        with_bounds=with_bounds)
    out = args.out or cfg.output
    if out:
        harness.emit_csv(curve, out)
    else:
        sys.stdout.write(harness.format_csv(curve))
    return 0


def cmd_bounds(args) -> int:
    cfg = _config(args)
    _write(harness.bounds_table(cfg), args.out)
    return 0


def selftest(verbose: bool = True) -> bool:
    checks = []

    cfg = harness.ExperimentConfig(harness.ExperimentKind.MOTIVATING, K=2, N=2, B=2,
                                   delta=0.5, memory=(1.0,), trials=1,
                                   schemes=("CA-GGC", "Unaware-GGC")).validate()
    curve = harness.run(cfg, with_bounds=False)
    ca, un = curve.get(1.0, "CA-GGC").mean_rate, curve.get(1.0, "Unaware-GGC").mean_rate
    checks.append(("motivating example CA 1.5 / unaware 2.0", ca == 1.5 and un == 2.0))

    delta = 0.25
    cw, unaware = example_one(delta)
    checks.append(("example one coded segment",
                   coded_segment_set(cw) == EXAMPLE_ONE_SEGMENT))
    checks.append(("example one rate 1/2 + 3/2 delta",
                   abs(cw.total_length - (0.5 + 1.5 * delta)) < 1e-12))
    checks.append(("example one unaware rate 7/4", unaware == 1.75))

    cfg = harness.ExperimentConfig(harness.ExperimentKind.TWO_FILE, K=2, N=2, B=2,
                                   delta=0.25, memory=(0.0, 1.0, 2.0), trials=1,
                                   schemes=("Oracle",)).validate()
    curve = harness.run(cfg)
    got = [curve.get(M, "Oracle").mean_rate for M in (0.0, 1.0, 2.0)]
    checks.append(("two-file corners 1.125, 0.25, 0", got == [1.125, 0.25, 0.0]))
    checks.append(("two-file gap check",
                   theorem3_gap_check(0.25, 1.0, memory_grid(0.0, 2.0, 0.01))))

    for name, ok in checks:
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return all(ok for _, ok in checks)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cacm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="experiment config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--parallel", type=int, default=1, metavar="N")
        sp.add_argument("--dump-graphs", metavar="DIR",
                        help="write DOT files of the first trial's graphs")

    common(sub.add_parser("simulate", help="Monte Carlo rates"))
    common(sub.add_parser("bounds", help="analytic bounds over the memory grid"))
    common(sub.add_parser("compare", help="simulated rates with bound columns"))
    sub.add_parser("selftest", help="run the worked-example fixtures")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "compare":
            return cmd_simulate(args, with_bounds=True)
        if args.command == "bounds":
            return cmd_bounds(args)
        return 0 if selftest() else 1
    except harness.ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except harness.DecodeFailure as exc:
        log.error("decode failure: %s", exc)
        return EXIT_DECODE


if __name__ == "__main__":
    sys.exit(main())
