"""
Project Management CLI for DecoyBound.

Runs single-photon bounds, key rates, intensity-error sweeps, pulse-level
simulations and the yield-ratio demonstration from a run configuration.
"""

import argparse
import sys
import traceback
from pathlib import Path

from src.config.enums import OutputFormat, RunMode
from src.config.run_config import parse_config
from src.config.settings import settings
from src.logger.default_logger import get_logger, set_log_level
from src.logger.logging_utils import LogLevel
from src.logger.run_logger import RunLogger
from src.scripts.run_analysis import AnalysisOrchestrator
from src.utils.exceptions import EXIT_FAILURE, EXIT_SUCCESS, DecoyBoundException

# Add project root to sys.path
PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=f"{settings.app.APP_NAME} Management CLI")

    parser.add_argument("--config", required=True, help="Run config (TOML) or tally file (CSV)")
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in RunMode],
        help="What to run (default: the config's mode, else bound)",
    )
    parser.add_argument("--sigma", type=float, help="Standard deviations of the count intervals")
    parser.add_argument("--grid", type=int, help="Number of D0 grid points")
    parser.add_argument("--seed", type=int, help="Simulation seed")
    parser.add_argument(
        "--format",
        choices=[fmt.value for fmt in OutputFormat],
        help="Output format (default: human)",
    )
    parser.add_argument("--output", help="Output file (simulate: the tally file)")
    parser.add_argument("--workers", type=int, help="Simulation worker processes")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="Less log output")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    set_log_level(LogLevel.from_verbosity(args.verbose - args.quiet).value)
    logger.debug(f"{settings.app.APP_NAME} starting ({settings.app.ENV})")

    run_logger = RunLogger(source_file=__name__)
    overrides = {
        "mode": args.mode,
        "sigma_mult": args.sigma,
        "grid_n": args.grid,
        "seed": args.seed,
        "workers": args.workers,
    }

    exit_code = EXIT_SUCCESS
    orchestrator = None
    try:
        config = parse_config(args.config, overrides=overrides)
        orchestrator = AnalysisOrchestrator(
            config,
            output_format=OutputFormat(args.format) if args.format else None,
            output_path=args.output,
        )
        exit_code = orchestrator.run()
        run_logger.record(
            message="Run finished",
            mode=config.mode.value,
            config_path=args.config,
            additional=orchestrator.summary,
            exit_code=exit_code,
        )

    except DecoyBoundException as exc:
        logger.error("Run failed: %s", exc.message)
        if exc.error_detail.details:
            logger.error("Details: %s", exc.error_detail.details)
        exit_code = exc.exit_code
        run_logger.error(
            message=exc.message,
            exit_code=exit_code,
            error_code=exc.error_detail.code,
            mode=args.mode,
            config_path=args.config,
            additional={"details": exc.error_detail.details},
        )
    except KeyboardInterrupt:
        logger.warning("Operation cancelled by user")
        exit_code = EXIT_SUCCESS
    except Exception as ex:
        logger.error("Unexpected error: %s", ex, exc_info=True)
        exit_code = EXIT_FAILURE
        run_logger.error(
            message=str(ex),
            exit_code=exit_code,
            error_code="UNEXPECTED_ERROR",
            traceback=traceback.format_exc(),
            mode=args.mode,
            config_path=args.config,
        )

    return exit_code


def show_usage_examples():
    """Display usage examples for the CLI."""
    examples = [
        ("Single-photon bounds", "python manage.py --config configs/fibre_102km.toml"),
        ("Worst-case key rate", "python manage.py --config configs/fibre_102km.toml --mode keyrate"),
        ("Asymptotic key rate", "python manage.py --config configs/fibre_102km.toml --mode keyrate --sigma 0"),
        ("Intensity-error sweep", "python manage.py --config configs/fibre_102km.toml --mode sweep --format csv"),
        ("Simulate and verify", "python manage.py --config configs/simulation.toml --seed 7 --workers 4"),
        ("Bounds from simulated tallies", "python manage.py --config sim_tallies.csv --format jsonl"),
        ("Yield ratio demonstration", "python manage.py --config configs/fibre_102km.toml --mode appendix-demo"),
    ]

    logger.info("Usage Examples:")
    logger.info("=" * 50)
    for description, command in examples:
        logger.info("  %-30s %s", description + ":", command)
    logger.info("")
    logger.info("Exit codes: 0 ok, 1 verification FAIL or unexpected error, 2 config error,")
    logger.info("            3 condition failure, 4 numerical domain error")


if __name__ == "__main__":
    if len(sys.argv) == 2 and sys.argv[1] in ["-h", "--help"]:
        show_usage_examples()
        logger.info("")
    sys.exit(main())
