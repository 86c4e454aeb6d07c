"""Command-line entry point: ``d2dtea run|sweep|compare-arch|validate``."""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ConfigError
from .runner import FORMATS, SweepSpec, compare_architectures, run, sweep, write_table
from .scenario import parse_scenario

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="d2dtea", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, multi=False):
        if multi:
            sp.add_argument("--scenario", action="append", required=True,
                            help="scenario file or preset name (A, B1000, B2800); repeatable")
        else:
            sp.add_argument("--scenario", required=True,
                            help="scenario file or preset name (A, B1000, B2800)")

    def outputs(sp):
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--format", choices=FORMATS, default="both")

    sp = sub.add_parser("run", help="run the full pipeline and write reports")
    common(sp)
    outputs(sp)

    sp = sub.add_parser("sweep", help="vary one numeric parameter")
    common(sp)
    outputs(sp)
    sp.add_argument("--param", required=True, help="dotted field, e.g. system.num_beams")
    sp.add_argument("--values", required=True, type=_csv_list, help="comma-separated values")
    sp.add_argument("--columns", type=_csv_list, default=[],
                    help="comma-separated output columns (default: all)")
    sp.add_argument("--hold-total-satellites", action="store_true",
                    help="with shell.num_orbits, keep the satellite count fixed")

    sp = sub.add_parser("compare-arch", help="economics of every architecture per scenario")
    common(sp, multi=True)
    outputs(sp)

    sp = sub.add_parser("validate", help="parse and validate a scenario only")
    common(sp)
    return p


def _cmd_run(args):
    for path in run(parse_scenario(args.scenario), args.out, args.format):
        print(path)


def _cmd_sweep(args):
    sc = parse_scenario(args.scenario)
    spec = SweepSpec(args.param, tuple(_number(v) for v in args.values), tuple(args.columns),
                     args.hold_total_satellites)
    for path in write_table(sweep(sc, spec), args.out, "sweep", args.format):
        print(path)


def _cmd_compare(args):
    rows = compare_architectures([parse_scenario(s) for s in args.scenario])
    for r in rows:
        print(f"{r['scenario']:<16} {r['architecture']:<13} sats={r['required_satellites']:<6} "
              f"cost/sub/month={r['cost_per_sub_monthly']:.2f} USD "
              f"heavy-launch={r['heavy_reduction_pct']:.1f}%")
    for path in write_table(rows, args.out, "compare_arch", args.format):
        print(path)


def _cmd_validate(args):
    sc = parse_scenario(args.scenario)
    print(f"ok: {sc.name} ({sc.system.num_beams} beams, {sc.shell.num_satellites} "
          f"simulated satellites, architectures {[a.value for a in sc.architectures]})")


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "compare-arch": _cmd_compare,
            "validate": _cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # any pipeline failure is a runtime error
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
