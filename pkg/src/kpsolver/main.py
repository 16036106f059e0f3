#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
kpsolve: compute KP solutions from soliton scattering data.

- solve: one field (g, u or tau) on the grid by GLM-RR, GLM-CC, Det-CC or the
  single-soliton closed form, written as CSV with a metadata sidecar
- converge: convergence study of the quadrature methods against a fine
  reference, written as one CSV per method plus a summary
- evolve: GLM-CC initial data advanced by the FFT2-exp split-step method

Exit codes: 0 success, 1 usage, configuration or other error, 2 numerical
failure, 130 interrupted.
"""

import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .__version__ import __version__
from .numerics.analysis import (
    ConvergenceReport,
    convergence_study,
    display_region,
    max_error,
    relative_max_error,
    rms_error,
)
from .numerics.fields import Method, Quantity, SolutionField
from .numerics.fredholm import digit_loss_field, g_from_tau, tau_grid, u_from_tau
from .numerics.glm import SingularSystemError, analytic_field, solve_glm_grid, u_from_g
from .numerics.quadrature import RuleKind
from .numerics.scattering import multisoliton_fields
from .numerics.spectral import IntegrationError, integrate
from .utils.cli import UsageError, parse_arguments, validate_cli_args
from .utils.config import Config, ConfigError, ExperimentConfig
from .utils.loading_indicator import LoadingIndicator
from .utils.logger import PACKAGE_LOGGER, setup_logger
from .utils.output import (
    dump_structured,
    report_table,
    summary_table,
    to_plain,
    write_field_csv,
    write_metadata,
    write_report_csv,
)

APP_NAME = "kpsolve"
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NUMERIC = 2
EXIT_INTERRUPTED = 130


def _sidecar(path: str, format_type: str) -> str:
    return os.path.splitext(path)[0] + (".yaml" if format_type == "yaml" else ".json")


def _field_name(field: SolutionField, suffix: str = "") -> str:
    return f"{field.method.value}-{field.quantity.value}-t{field.t:g}{suffix}.csv"


def _write_field(
    field: SolutionField,
    config: ExperimentConfig,
    format_type: str,
    suffix: str = "",
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    path = os.path.join(config.out, _field_name(field, suffix))
    write_field_csv(field, path, config.as_dict())
    metadata = {
        "method": field.method,
        "quantity": field.quantity,
        "t": field.t,
        "grid": field.grid,
        "parameters": config.as_dict(),
        **field.metadata,
        **(extra or {}),
    }
    metadata.setdefault("flagged_cells", field.flagged)
    sidecar = write_metadata(_sidecar(path, format_type), metadata, format_type)
    return {"field": path, "metadata": sidecar, **metadata}


def _oracle_error(field: SolutionField, config: ExperimentConfig) -> Optional[float]:
    """Max deviation from the closed form on x <= 0, relative for tau."""
    data = config.scattering_data()
    if not data.is_single_soliton or field.method is Method.ANALYTIC:
        return None
    exact = analytic_field(data, field.quantity, field.grid, field.t)
    if field.quantity is Quantity.TAU:
        return relative_max_error(field, exact, x_max=0.0)
    return max_error(field, exact, x_max=0.0)


def cmd_solve(
    config: ExperimentConfig,
    log: logging.Logger,
    workers: Optional[int] = None,
    format_type: str = "json",
) -> Dict[str, Any]:
    """
    Compute the configured field and write it with its metadata.

    Returns:
        Summary with the written paths, flagged cells, digit-loss maximum
        (Det-CC) and closed-form deviation (single soliton)
    """
    data = config.scattering_data()
    grid = config.grid()
    method = Method(config.method)
    quantity = Quantity(config.quantity)
    extra: Dict[str, Any] = {}

    if method is Method.ANALYTIC:
        field = analytic_field(data, quantity, grid, config.t)
    elif method is Method.DET_CC:
        tau = tau_grid(data, config.M, grid, config.t, workers)
        loss = digit_loss_field(data, config.M, grid, config.t, workers, taufield=tau)
        finite = loss[np.isfinite(loss)]
        extra["digit_loss_max"] = float(finite.max()) if finite.size else None
        log.info(f"Maximum digit-loss estimate: {extra['digit_loss_max']}")
        field = {
            Quantity.TAU: lambda: tau,
            Quantity.G: lambda: g_from_tau(tau),
            Quantity.U: lambda: u_from_tau(tau),
        }[quantity]()
    else:
        kind = RuleKind.RIEMANN if method is Method.GLM_RR else RuleKind.CLENSHAW_CURTIS
        g = solve_glm_grid(data, kind, config.M, grid, config.t, workers)
        field = g if quantity is Quantity.G else u_from_g(g)

    oracle = _oracle_error(field, config)
    if oracle is not None:
        extra["oracle_max_error"] = oracle
        log.info(f"Deviation from the closed form on x <= 0: {oracle:.3e}")
    return _write_field(field, config, format_type, extra=extra)


def cmd_converge(
    config: ExperimentConfig,
    log: logging.Logger,
    workers: Optional[int] = None,
    format_type: str = "json",
) -> List[ConvergenceReport]:
    """
    Run one convergence study per configured method and write the reports.

    Args:
        config: Validated experiment configuration
        log: Application logger
        workers: Thread count for the grid sweeps
        format_type: Sidecar format, json or yaml

    Returns:
        One report per method, in configuration order
    """
    data = config.scattering_data()
    grid = config.grid()
    reports = []
    for name in config.methods:
        report = convergence_study(
            data,
            Method(name),
            grid,
            config.t,
            config.m_exponents,
            config.m_ref,
            point=config.point,
            compare_u=config.compare_u,
            workers=workers,
        )
        path = write_report_csv(report, os.path.join(config.out, f"converge-{name}.csv"))
        log.info(f"Wrote {path}")
        reports.append(report)

    summary = {
        "parameters": config.as_dict(),
        "reports": [r.as_dict() for r in reports],
    }
    summary_path = os.path.join(
        config.out, "converge-summary." + ("yaml" if format_type == "yaml" else "json")
    )
    write_metadata(summary_path, summary, format_type)
    log.info(f"Wrote {summary_path}")
    return reports


def cmd_evolve(
    config: ExperimentConfig,
    log: logging.Logger,
    workers: Optional[int] = None,
    format_type: str = "json",
) -> Dict[str, Any]:
    """
    GLM-CC u at config.t on the periodic grid, integrated over config.final_time.

    With window_mode "blend" each windowed step blends towards the exact
    N-soliton u; "damp" multiplies by the window alone.

    Writes the initial and final u fields. When time actually advances the
    final field is also compared with GLM-CC at the final time over the
    display region.

    Raises:
        IntegrationError: If the split step becomes unstable
    """
    data = config.scattering_data()
    grid = config.grid(periodic=True)
    u0 = u_from_g(
        solve_glm_grid(data, RuleKind.CLENSHAW_CURTIS, config.M, grid, config.t, workers)
    )
    X, Y = grid.mesh()

    def exact_u(t: float) -> np.ndarray:
        return multisoliton_fields(data, X, Y, t)[1]

    final = integrate(
        u0,
        config.final_time,
        config.steps,
        window_order=config.window_order,
        window_strength=config.window_strength,
        window_every=config.window_every,
        workers=workers,
        far_field=exact_u if config.window_mode == "blend" else None,
    )

    extra: Dict[str, Any] = {}
    if config.steps > 0 and config.final_time > 0:
        reference = u_from_g(
            solve_glm_grid(
                data, RuleKind.CLENSHAW_CURTIS, config.M, grid, final.t, workers
            )
        )
        extra["rms_vs_glm_cc"] = rms_error(final, reference, region=display_region(grid))
        log.info(f"RMS difference to GLM-CC on the display region: {extra['rms_vs_glm_cc']:.3e}")

    initial = _write_field(u0, config, format_type, suffix="-initial")
    written = _write_field(final, config, format_type, suffix="-final", extra=extra)
    return {"initial": initial["field"], **written}


class Application:
    """
    One kpsolve invocation: parse, configure logging, load config, dispatch.

    Attributes:
        app_name: Program name used for the log file and config path
        args: Parsed command line
        log: The configured package logger
        config: Loaded and validated configuration
    """

    COMMANDS = {"solve": cmd_solve, "converge": cmd_converge, "evolve": cmd_evolve}

    def __init__(self, argv: Optional[Sequence[str]] = None, app_name: str = APP_NAME):
        """
        Raises:
            UsageError: On an unparsable or contradictory command line
            ConfigError: If the merged configuration is invalid
        """
        self.app_name = app_name
        self.args = parse_arguments(app_name, __version__, argv)
        errors = validate_cli_args(self.args)
        if errors:
            raise UsageError("; ".join(errors))

        self.log = setup_logger(PACKAGE_LOGGER, self.args)
        self.log.debug(f"Command-line arguments: {self.args}")

        try:
            self.config = Config(
                app_name,
                self.log,
                config_path=self.args.config_path,
                overrides=self.args.overrides,
                command=self.args.command,
            )
        except ConfigError as e:
            self.log.critical(f"Configuration error: {e}")
            raise

    @property
    def show_console(self) -> bool:
        return not self.args.debug and not self.args.quiet

    def _print(self, text: str) -> None:
        if self.show_console:
            print(text)

    def _report(self, result: Any) -> None:
        fmt = self.args.output_format
        if isinstance(result, list):
            if fmt:
                self._print(dump_structured({"reports": [r.as_dict() for r in result]}, fmt))
            else:
                table = report_table(
                    result, self.args.disable_header, self.args.disable_border
                )
                self.log.info("\nConvergence study:\n%s", table)
                self._print("\nConvergence study:\n" + table.get_string())
            return
        summary = {k: v for k, v in result.items() if k != "parameters"}
        if fmt:
            self._print(dump_structured(summary, fmt))
        else:
            rows = {
                k: to_plain(v)
                for k, v in summary.items()
                if isinstance(v, (str, int, float)) or v is None
            }
            table = summary_table(rows, self.args.disable_header, self.args.disable_border)
            self.log.info("\nResult:\n%s", table)
            self._print("\nResult:\n" + table.get_string())

    def run(self) -> int:
        """
        Execute the selected command.

        Returns:
            EXIT_OK, EXIT_ERROR for invalid input, EXIT_NUMERIC for numerical
            failures, EXIT_INTERRUPTED on Ctrl+C
        """
        command = self.args.command
        self.log.debug(f"Running {command}")
        indicator = LoadingIndicator(
            f"Running {command}",
            enabled=self.show_console and not self.args.verbose and sys.stdout.isatty(),
        )
        try:
            with indicator:
                result = self.COMMANDS[command](
                    self.config.experiment,
                    self.log,
                    self.config.workers,
                    self.args.output_format or "json",
                )
            self._report(result)
            return EXIT_OK
        except KeyboardInterrupt:
            self.log.info("Operation interrupted by user")
            return EXIT_INTERRUPTED
        except IntegrationError as e:
            self.log.critical(f"Instability in {command}: {e} (step {e.step})")
            return EXIT_NUMERIC
        except (FloatingPointError, SingularSystemError) as e:
            self.log.critical(f"Numerical failure in {command}: {e}")
            return EXIT_NUMERIC
        except ValueError as e:
            self.log.critical(f"Invalid input: {e}")
            return EXIT_ERROR
        except Exception as e:
            self.log.critical(f"Error during execution: {e}", exc_info=True)
            return EXIT_ERROR
        finally:
            self.log.debug(f"Finished {command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the kpsolve console script.

    Args:
        argv: Arguments without the program name; sys.argv when None

    Returns:
        Process exit code
    """
    try:
        app = Application(argv)
        return app.run()
    except KeyboardInterrupt:
        print("\nOperation terminated by user", file=sys.stderr)
        return EXIT_INTERRUPTED
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ConfigError:
        # already logged by Application
        return EXIT_ERROR
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
