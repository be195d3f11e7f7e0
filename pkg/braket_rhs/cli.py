"""braket-rhs CLI entry point."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import apply_config_defaults, load_config, resolve_seed
from .errors import BraketError, ConfigError, DslError
from .evaluator import evaluate_text
from .formatter import format_error, format_reports, format_spectral, format_summary, format_value
from .model_file import LoadedModel, bundled_model, load_model_file
from .parser import parse_text
from .spectral import spectral_decompose
from .suites import SUITE_NAMES, run_suites

log = logging.getLogger("braket-rhs")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

SUBCOMMANDS = ("check", "spectral", "eval", "demo")


def _add_common(parser: argparse.ArgumentParser, *, config: bool = True) -> None:
    if config:
        parser.add_argument(
            "--config",
            type=Path,
            required=True,
            help="Model description (JSON)",
        )
    parser.add_argument(
        "--format",
        choices=("json", "text"),
        default=None,
        help="Output format (default: json)",
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose logging",
    )


def _add_suite_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--suite",
        action="append",
        default=None,
        metavar="NAME",
        help=f"Suite to run; repeatable (default: all). One of: {', '.join(SUITE_NAMES)}",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=None,
        help="Override the model tolerance",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Run suites on this many threads (default: 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braket-rhs",
        description="Check bra-ket identities of identical-particle systems on finite-dimensional models.",
        epilog=(
            "Subcommands:\n"
            "  braket-rhs check --config model.json [--suite NAME ...]\n"
            "  braket-rhs spectral --config model.json\n"
            "  braket-rhs eval --config model.json --expr \"<a|a>\"\n"
            "  braket-rhs demo\n"
            "\n"
            "Set BRAKET_RHS_SEED to change the seed of the randomized suites (default: 42).\n"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    return parser


def build_check_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braket-rhs check",
        description="Run the property suites against a model file.",
    )
    _add_common(parser)
    _add_suite_options(parser)
    return parser


def build_spectral_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braket-rhs spectral",
        description="Print the spectral decomposition of the model's composite observable.",
    )
    _add_common(parser)
    return parser


def build_eval_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braket-rhs eval",
        description="Evaluate a Dirac-notation expression against a model file.",
    )
    _add_common(parser)
    parser.add_argument(
        "--expr",
        required=True,
        help="Expression, e.g. \"(<l1| (x) <l2|) (A (|p> (x) |q>))\"",
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=None,
        help="Tolerance for recognising zero values",
    )
    return parser


def build_demo_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braket-rhs demo",
        description="Run the check suites on the bundled two-qubit model.",
    )
    _add_common(parser, config=False)
    _add_suite_options(parser)
    return parser


def _setup(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    apply_config_defaults(args, load_config())
    level = logging.DEBUG if args.verbose else logging.WARNING
    logging.basicConfig(
        format="%(levelname)s: %(message)s",
        level=level,
        stream=sys.stderr,
    )
    return args


def _run_guarded(action, fmt: str) -> int:
    """Map exceptions to exit codes: BraketError 2, KeyboardInterrupt 130, anything else 2."""
    try:
        return action()
    except DslError as e:
        if fmt == "json":
            sys.stdout.write(format_error(type(e).__name__, e.message, e.span))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except BraketError as e:
        if fmt == "json":
            sys.stdout.write(format_error(type(e).__name__, str(e)))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("\nAborted.", file=sys.stderr)
        return 130
    except Exception as e:
        log.exception("Unexpected error")
        print(f"Unexpected error: {e}", file=sys.stderr)
        return EXIT_ERROR


def _check_model(model: LoadedModel, args: argparse.Namespace) -> int:
    # expressions that do not parse are a model-file error, not a failed check
    for i, case in enumerate(model.spec.expressions, 1):
        try:
            parse_text(case.expr)
        except DslError as e:
            raise ConfigError(f"{model.source}: expression {i} {case.expr!r}: {e}") from e

    seed = resolve_seed()
    log.debug("seed %d, suites %s, workers %s", seed, args.suite or "default", args.workers)
    reports = run_suites(model, suites=args.suite, seed=seed, workers=args.workers, tol=args.tol)
    sys.stdout.write(format_reports(reports, args.format))
    sys.stdout.flush()
    if args.format == "text":
        print(format_summary(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def check_main(argv: list[str]) -> int:
    """Run the selected suites; 0 when every check passes, 1 otherwise."""
    args = _setup(build_check_parser(), argv)
    return _run_guarded(lambda: _check_model(load_model_file(args.config), args), args.format)


def demo_main(argv: list[str]) -> int:
    args = _setup(build_demo_parser(), argv)
    return _run_guarded(lambda: _check_model(bundled_model("two_qubit"), args), args.format)


def spectral_main(argv: list[str]) -> int:
    args = _setup(build_spectral_parser(), argv)

    def action() -> int:
        model = load_model_file(args.config)
        if model.composite is None:
            raise ConfigError(f"{model.source}: no factor observables to decompose")
        sd = spectral_decompose(model.composite)
        sys.stdout.write(format_spectral(sd, args.format))
        return EXIT_OK

    return _run_guarded(action, args.format)


def eval_main(argv: list[str]) -> int:
    args = _setup(build_eval_parser(), argv)

    def action() -> int:
        model = load_model_file(args.config)
        tol = args.tol if args.tol is not None else model.config.tol
        value = evaluate_text(args.expr, model.bindings, model.config)
        sys.stdout.write(format_value(args.expr, value, tol, args.format))
        return EXIT_OK

    return _run_guarded(action, args.format)


# ---------------------------------------------------------------------------
# Main entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]

    if argv and argv[0] == "check":
        return check_main(argv[1:])
    if argv and argv[0] == "spectral":
        return spectral_main(argv[1:])
    if argv and argv[0] == "eval":
        return eval_main(argv[1:])
    if argv and argv[0] == "demo":
        return demo_main(argv[1:])

    parser = build_parser()
    parser.parse_args(argv)
    parser.print_help(sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
