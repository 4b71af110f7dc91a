"""
Command-Line Entry Point

Usage: python msqkd.py <run|attack|sweep|verify|list> [options]
"""

import argparse
from typing import Any, Dict, List, Optional

from cli.commands import EXIT_CONFIG, cmd_attack, cmd_list, cmd_run, cmd_sweep, cmd_verify
from cli.scenario import ScenarioError, load_scenario
from config.settings import get_settings
from utils.logger import get_logger, setup_system_logging

logger = get_logger(__name__)

COMMANDS = {
    "run": cmd_run,
    "attack": cmd_attack,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "list": cmd_list,
}


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that reports usage errors with exit code 1"""

    def error(self, message):
        self.print_usage()
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Scenario JSON file")
    parser.add_argument("--rounds", type=int, help="Number of rounds")
    parser.add_argument("--seed", type=int, help="Master seed (falls back to MSQKD_SEED, then 42)")
    parser.add_argument("--strategy", help="Registry name of the attack strategy")
    parser.add_argument("--out", help="Output file (stdout when omitted)")
    parser.add_argument("--format", choices=("json", "csv"), help="Output format")
    parser.add_argument("--check-fraction", type=float, help="Fraction of key rounds disclosed")
    parser.add_argument("--p-alice-mh", type=float, help="Probability Alice chooses MH")
    parser.add_argument("--p-bob-mh", type=float, help="Probability Bob chooses MH")
    parser.add_argument("--n-values", type=int, nargs="+", help="Group sizes N for detection curves")
    parser.add_argument("--angles", type=float, nargs="+", help="Measurement-basis angles (radians) for sweep")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument("--include-keys", action="store_true", default=None, help="Write raw keys (run)")
    parser.add_argument("--transcript-log", help="JSON-lines transcript file (run)")
    parser.add_argument("--perturb-expected", action="store_true", default=None,
                        help="Shift expected values (verify negative control)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="msqkd", description="MSQKD protocol simulator and analytic verifier")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    helps = {
        "run": "Run the protocol and report the sifting summary",
        "attack": "Oracle and Monte Carlo detection of an attack",
        "sweep": "Detection curves over N or over basis angles",
        "verify": "Reproduce every expected value",
        "list": "List built-in strategies",
    }
    for name, text in helps.items():
        _add_common_flags(subparsers.add_parser(name, help=text))
    return parser


def scenario_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Scenario fields set on the command line"""
    return {
        "protocol": {
            "rounds": args.rounds,
            "master_seed": args.seed,
            "check_fraction": args.check_fraction,
            "p_alice_mh": args.p_alice_mh,
            "p_bob_mh": args.p_bob_mh,
        },
        "strategy": args.strategy,
        "output": {"path": args.out, "format": args.format},
        "n_values": args.n_values,
        "angles": args.angles,
        "workers": args.workers,
        "include_keys": args.include_keys,
        "transcript_log": args.transcript_log,
        "perturb_expected": args.perturb_expected,
    }


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and return its exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        setup_system_logging(args.log_level or get_settings().log_level)
        scenario = load_scenario(args.config, scenario_overrides(args))
    except (ScenarioError, ValueError) as e:
        logger.error(f"Invalid scenario: {e}")
        return EXIT_CONFIG

    return COMMANDS[args.command](scenario)
