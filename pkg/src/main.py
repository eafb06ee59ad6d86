from typing import List, Optional
import argparse
import logging
import sys
from experiments.output import configure_logging
from experiments.runner import (
    EXIT_CONFIG,
    EXIT_OK,
    output_directory,
    run_experiment,
    validate,
    with_threads,
)
from lib.version import VERSION

logger = logging.getLogger("coolopt")


def run(
    config_path: str, out: Optional[str], threads: Optional[int], level: str
) -> int:
    """Validates a config and executes its mode."""
    configure_logging(level)
    config, error = validate(config_path)
    if config is None:
        logger.error("%s", error)
        return EXIT_CONFIG

    try:
        config = with_threads(config, threads)
    except ValueError as e:
        logger.error("%s", e)
        return EXIT_CONFIG

    out_dir = output_directory(config, out)
    configure_logging(level, out_dir)

    return run_experiment(config, out_dir, config_path).exit_code


def check(config_path: str, level: str) -> int:
    """Validates a config without running it."""
    configure_logging(level)
    config, error = validate(config_path)
    if config is None:
        logger.error("%s", error)
        return EXIT_CONFIG

    logger.info(
        "%s is valid: %s experiment `%s` in mode %s",
        config_path,
        config.scheme.value,
        config.name,
        config.mode,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coolopt", description="Optimal-control laser cooling of a trapped ion."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity (default INFO)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser(
        "run", parents=[common], help="Run the experiment of a .cfg file"
    )
    run_parser.add_argument("config", type=str, help="The path to the .cfg file")
    run_parser.add_argument("--out", type=str, default=None, help="Output directory")
    run_parser.add_argument(
        "--threads", type=int, default=None, help="Worker threads for scans and starts"
    )

    validate_parser = commands.add_parser(
        "validate", parents=[common], help="Check a .cfg file"
    )
    validate_parser.add_argument("config", type=str, help="The path to the .cfg file")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    match args.command:
        case "run":
            return run(args.config, args.out, args.threads, args.log_level)
        case _:
            return check(args.config, args.log_level)


if __name__ == "__main__":
    sys.exit(main())
