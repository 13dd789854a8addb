"""Command-line entry point: ``evanescent <scenario> --config FILE --out DIR``.

Exit status is 0 when every declared tolerance passes, 2 when the run
completed but a tolerance failed, and 1 on bad input or a runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from evanescent.harness import ConfigError, load_config, run_scenario, write_report

log = logging.getLogger("evanescent")

_COMMANDS = {
    "suppression": "closed-form suppression length and log amplitude sweep",
    "splitting": "double-well tunneling splitting versus barrier width",
    "correlator": "shifted-pole correlator: closed form against quadrature",
    "entangle": "entanglement from a hopping-only channel versus separation",
    "compare": "bound versus free (E_b = 0) suppression exponents",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evanescent", description="Run a scenario sweep and write CSV and JSON reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
        p.add_argument("--seed", type=int, default=None,
                       help="random seed, overrides the config value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    scenario = "entanglement" if args.command == "entangle" else args.command
    if args.workers < 1:
        log.error("--workers must be at least 1")
        return 1
    if args.seed is not None and not 0 <= args.seed < 2**64:
        log.error("--seed must be an unsigned 64-bit integer")
        return 1
    try:
        config = load_config(args.config, scenario, args.seed)
        report = run_scenario(config, workers=args.workers)
        csv_path, json_path = write_report(report, args.out)
    except (ConfigError, OSError) as exc:
        log.error("input error: %s", exc)
        return 1
    except Exception as exc:
        log.error("run failed: %s", exc)
        return 1
    for name, check in report.summary["checks"].items():
        log.info("%-36s %s", name, "PASS" if check["pass"] else "FAIL")
    log.info("wrote %s and %s", csv_path, json_path)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
