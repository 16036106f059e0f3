"""
Command line interface of kpsolve.

Three subcommands share one set of experiment flags:

    kpsolve solve    --method det-cc --quantity tau --t 0.25
    kpsolve converge --methods glm-cc,det-cc --m-min 2 --m-max 9 --m-ref 10
    kpsolve evolve   --T 0.25 --steps 10000

Every experiment flag defaults to None so that values from the config file
survive unless the flag is given. The parsed flags are returned as a
CommandLineArgs container whose overrides mapping feeds
config.load_config directly.
"""

import argparse
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from .config import SOLVE_METHODS, ConfigError, parse_number

COMMANDS = ("solve", "converge", "evolve")

# flag destinations that map one-to-one onto ExperimentConfig fields
OVERRIDE_DESTS = (
    "solitons",
    "xshift",
    "yshift",
    "Lx",
    "Ly",
    "Nx",
    "Ny",
    "M",
    "t",
    "out",
    "method",
    "quantity",
    "methods",
    "m_min",
    "m_max",
    "m_ref",
    "point_x",
    "point_y",
    "compare_u",
    "final_time",
    "steps",
    "window_order",
    "window_strength",
    "window_every",
    "window_mode",
)


class UsageError(Exception):
    """Raised instead of exiting when the command line cannot be parsed."""

    pass


class CommandLineArgs(NamedTuple):
    """
    Parsed command line.

    Attributes:
        command: solve, converge or evolve
        config_path: Explicit config file, or None for the XDG location
        overrides: ExperimentConfig fields set by flags (None when not given)
        debug: Console at DEBUG
        verbose: Console at INFO
        quiet: No console logging
        log_file: Log file path, or None for no file
        output_format: json or yaml summary on stdout, or None for tables
        disable_header: Table without header
        disable_border: Table without border
    """

    command: str
    config_path: Optional[str]
    overrides: Dict[str, Any]
    debug: bool
    verbose: bool
    quiet: bool
    log_file: Optional[str]
    output_format: Optional[str]
    disable_header: bool
    disable_border: bool


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e))


def _methods(text: str) -> List[str]:
    return [m.strip() for m in text.split(",") if m.strip()]


def _common_parser(app_name: str) -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)

    data_group = common.add_argument_group("Scattering Data")
    data_group.add_argument(
        "--solitons",
        dest="solitons",
        help='soliton list "a1,b1;a2,b2[,weight];..." (default: 1.55,1.45;1.3,0)',
    )
    data_group.add_argument(
        "--xshift", type=_number, dest="xshift", help="shift of the kernel in x (default: 10)"
    )
    data_group.add_argument(
        "--yshift", type=_number, dest="yshift", help="shift of the kernel in y (default: 12)"
    )

    grid_group = common.add_argument_group("Grid")
    grid_group.add_argument(
        "--Lx", type=_number, dest="Lx", help="domain length in x (default: 10*pi)"
    )
    grid_group.add_argument(
        "--Ly", type=_number, dest="Ly", help="domain length in y (default: 10*pi)"
    )
    grid_group.add_argument("--Nx", type=int, dest="Nx", help="x nodes (default: 128)")
    grid_group.add_argument("--Ny", type=int, dest="Ny", help="y nodes (default: 128)")
    grid_group.add_argument(
        "--M", type=int, dest="M", help="quadrature parameter, even (default: 128)"
    )
    grid_group.add_argument("--t", type=_number, dest="t", help="time (default: 0)")

    general_group = common.add_argument_group("General Options")
    general_group.add_argument(
        "--help", action="help", help="show this help message and exit"
    )
    general_group.add_argument(
        "-c",
        "--config",
        dest="config_path",
        help="config file, created with defaults when missing",
    )

    logging_group = common.add_argument_group("Logging Options")
    logging_group.add_argument(
        "--debug", action="store_true", help="enable debugging mode"
    )
    logging_group.add_argument(
        "--verbose", action="store_true", help="log progress of every sweep"
    )
    logging_group.add_argument(
        "--quiet", action="store_true", help="suppress all console output"
    )
    logging_group.add_argument(
        "-l",
        "--log-file",
        nargs="?",
        const="",
        default="not_set",
        dest="log_file",
        help=f"log to file (./{app_name}.log by default)",
    )

    output_group = common.add_argument_group("Output")
    output_group.add_argument(
        "--out", dest="out", help="output directory (default: ./kp-output)"
    )
    output_group.add_argument(
        "-o",
        "--output",
        dest="output_format",
        choices=["json", "yaml"],
        default="not_set",
        help="print the run summary as json or yaml",
    )
    output_group.add_argument(
        "--no-header", action="store_true", dest="disable_header",
        help="disable table header",
    )
    output_group.add_argument(
        "--no-border", action="store_true", dest="disable_border",
        help="disable table border",
    )
    return common


def create_parser(app_name: str, version: str) -> argparse.ArgumentParser:
    """
    Build the kpsolve parser with its three subcommands.

    Parse failures raise UsageError rather than exiting.

    Args:
        app_name: Program name shown in usage lines
        version: Version string for --version

    Returns:
        Parser for the solve, converge and evolve subcommands
    """
    parser = _Parser(
        prog=app_name,
        description="Solve the KP equation by GLM, Fredholm determinant and split-step methods",
        add_help=False,
        allow_abbrev=False,
    )
    parser.add_argument("--help", action="help", help="show this help message and exit")
    parser.add_argument(
        "--version",
        action="version",
        version=f"{app_name} {version}",
        help="show program version and exit",
    )
    common = _common_parser(app_name)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    solve = subparsers.add_parser(
        "solve",
        parents=[common],
        add_help=False,
        allow_abbrev=False,
        help="compute g, u or tau on the grid",
    )
    solve_group = solve.add_argument_group("Solve")
    solve_group.add_argument(
        "--method",
        choices=[m.value for m in SOLVE_METHODS],
        dest="method",
        help="solver (default: glm-cc)",
    )
    solve_group.add_argument(
        "--quantity",
        choices=["g", "u", "tau"],
        dest="quantity",
        help="field to write (default: u)",
    )

    converge = subparsers.add_parser(
        "converge",
        parents=[common],
        add_help=False,
        allow_abbrev=False,
        help="convergence study against a fine reference",
    )
    study_group = converge.add_argument_group("Convergence Study")
    study_group.add_argument(
        "--methods",
        type=_methods,
        dest="methods",
        help="comma separated methods (default: glm-rr,glm-cc,det-cc)",
    )
    study_group.add_argument("--m-min", type=int, dest="m_min", help="smallest exponent")
    study_group.add_argument("--m-max", type=int, dest="m_max", help="largest exponent")
    study_group.add_argument(
        "--m-ref", type=int, dest="m_ref", help="reference exponent, above --m-max"
    )
    study_group.add_argument("--point-x", type=_number, dest="point_x")
    study_group.add_argument("--point-y", type=_number, dest="point_y")
    study_group.add_argument(
        "--compare-u",
        action="store_const",
        const=True,
        dest="compare_u",
        help="also report errors of the u fields",
    )

    evolve = subparsers.add_parser(
        "evolve",
        parents=[common],
        add_help=False,
        allow_abbrev=False,
        help="split-step integration from GLM-CC initial data",
    )
    time_group = evolve.add_argument_group("Time Stepping")
    time_group.add_argument(
        "--T", type=_number, dest="final_time", help="integration time (default: 0.25)"
    )
    time_group.add_argument(
        "--steps", type=int, dest="steps", help="number of steps (default: 10000)"
    )
    time_group.add_argument("--window-order", type=int, dest="window_order")
    time_group.add_argument("--window-strength", type=_number, dest="window_strength")
    time_group.add_argument(
        "--window-every", type=int, dest="window_every", help="apply window every k steps"
    )
    time_group.add_argument(
        "--window-mode",
        choices=("damp", "blend"),
        dest="window_mode",
        help="damp to zero or blend towards the exact far field (default: blend)",
    )
    return parser


def process_args(args: argparse.Namespace, app_name: str) -> CommandLineArgs:
    """
    Resolve sentinels and collect experiment overrides.

    Args:
        args: Namespace from the kpsolve parser
        app_name: Used for the default log file name

    Returns:
        CommandLineArgs with log_file and output_format resolved and the
        flags that map onto ExperimentConfig fields in overrides
    """
    if getattr(args, "log_file", "not_set") == "not_set":
        log_file = None
    elif args.log_file == "":
        log_file = f"{app_name}.log"
    else:
        log_file = args.log_file

    output_format = getattr(args, "output_format", "not_set")
    if output_format == "not_set":
        output_format = None

    overrides = {
        dest: getattr(args, dest)
        for dest in OVERRIDE_DESTS
        if getattr(args, dest, None) is not None
    }
    if "methods" in overrides:
        overrides["methods"] = tuple(overrides["methods"])

    return CommandLineArgs(
        command=args.command,
        config_path=getattr(args, "config_path", None),
        overrides=overrides,
        debug=getattr(args, "debug", False),
        verbose=getattr(args, "verbose", False),
        quiet=getattr(args, "quiet", False),
        log_file=log_file,
        output_format=output_format,
        disable_header=getattr(args, "disable_header", False),
        disable_border=getattr(args, "disable_border", False),
    )


def parse_arguments(
    app_name: str, version: str, argv: Optional[Sequence[str]] = None
) -> CommandLineArgs:
    """
    Parse argv (sys.argv[1:] when None).

    Raises:
        UsageError: On unknown flags, bad values or a missing subcommand
    """
    parser = create_parser(app_name, version)
    raw_args = parser.parse_args(argv)
    return process_args(raw_args, app_name)


def get_help_text(app_name: str, version: str) -> str:
    return create_parser(app_name, version).format_help()


def validate_cli_args(args: CommandLineArgs) -> List[str]:
    """Return messages for flag combinations argparse cannot reject."""
    errors = []
    if args.quiet and args.verbose:
        errors.append("Cannot use both --quiet and --verbose options simultaneously")
    if args.quiet and args.debug:
        errors.append("Cannot use both --quiet and --debug options simultaneously")
    return errors
