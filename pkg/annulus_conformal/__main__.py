import argparse
import sys
from typing import Any, Optional

from annulus_conformal.config import get_global_conf, set_global_conf
from annulus_conformal.core.composite import annulus_grid, build_composite
from annulus_conformal.core.discrepancy import benchmark_cases, max_discrepancy, reproduce_table1
from annulus_conformal.core.errors import ConformalMapError
from annulus_conformal.utils.cli_helper import (
    RunConfig,
    UsageError,
    build_outer_map,
    build_parser,
    build_target,
    load_config_file,
    resolve_run_config,
    split_settings,
)
from annulus_conformal.utils.curve_types import OutputFormat
from annulus_conformal.utils.export_helper import (
    build_curves,
    curves_as_records,
    open_output,
    write_benchmarks_csv,
    write_curves_csv,
    write_grid_csv,
    write_json,
    write_svg,
    write_table1_csv,
)
from annulus_conformal.utils.logger import log_stage_failure, logger, set_log_level

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


def cmd_solve(config: RunConfig) -> dict[str, Any]:
    """
    Solve e, r1, lambda and rho1 for the requested hole and write the parameter report.

    Returns:
        dict[str, Any]: the report, keys in output order.
    """
    outer = build_outer_map(config)
    cm = build_composite(outer, build_target(config))
    report = max_discrepancy(cm)
    payload = {
        "C": outer.scale,
        "n": config.order,
        "m_or_terms": config.m_or_terms,
        "e": cm.e,
        "r1": cm.r1,
        "lambda": cm.bilinear.lam,
        "rho1": cm.bilinear.rho1,
        "h": cm.hole.h,
        "R": cm.hole.R,
        "epsilon": cm.hole.epsilon,
        "s": cm.geometry.s,
        "delta_max": report.delta_max,
    }
    with open_output(config.output) as stream:
        write_json(stream, payload)
    return payload


def cmd_curve(config: RunConfig) -> None:
    cm = build_composite(build_outer_map(config), build_target(config))
    curves = build_curves(cm, config.samples)
    with open_output(config.output) as stream:
        if config.format is OutputFormat.SVG:
            write_svg(stream, curves)
        elif config.format is OutputFormat.JSON:
            write_json(stream, curves_as_records(curves, config.precision))
        else:
            write_curves_csv(stream, curves, config.precision)


def cmd_table1(output: Optional[str], precision: int) -> None:
    rows = reproduce_table1()
    with open_output(output) as stream:
        write_table1_csv(stream, rows, precision)


def cmd_grid(config: RunConfig) -> None:
    cm = build_composite(build_outer_map(config), build_target(config))
    grid = annulus_grid(cm, config.rings, config.rays)
    with open_output(config.output) as stream:
        write_grid_csv(stream, grid, config.precision)


def cmd_benchmarks(output: Optional[str], precision: int) -> None:
    cases = benchmark_cases()
    for case in cases:
        if not case.matched:
            logger.warning("benchmark %r: %.6g differs from the reported %.6g", case.name, case.delta_max, case.expected)
    with open_output(output) as stream:
        write_benchmarks_csv(stream, cases, precision)


def _resolve(args: argparse.Namespace) -> tuple[dict[str, Any], Optional[RunConfig]]:
    """Apply config-file settings and the log level, then resolve the run; bad input raises UsageError."""
    file_values: dict[str, Any] = {}
    try:
        if args.config:
            file_values, settings = split_settings(load_config_file(args.config))
            if settings:
                set_global_conf(settings)
        if args.log_level:
            set_log_level(args.log_level, get_global_conf().get_log_messages_format())
        if args.command in ("table1", "benchmarks"):
            precision = args.precision if args.precision is not None else file_values.get("precision")
            file_values["precision"] = int(precision) if precision is not None else get_global_conf().get_output_precision()
            return file_values, None
        return file_values, resolve_run_config(args, file_values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _dispatch(args: argparse.Namespace) -> None:
    file_values, config = _resolve(args)
    if config is None:
        output = args.output if args.output is not None else file_values.get("output")
        if args.command == "table1":
            cmd_table1(output, file_values["precision"])
        else:
            cmd_benchmarks(output, file_values["precision"])
        return

    logger.debug("Run config: %s", config.model_dump())
    if args.command == "solve":
        cmd_solve(config)
    elif args.command == "curve":
        cmd_curve(config)
    elif args.command == "grid":
        cmd_grid(config)


def main(argv: Optional[list[str]] = None) -> int:
    """
    Entry point of the ``annulus-conformal`` command.

    Returns 0 on success, 1 when the flags or config file cannot be resolved
    into a run, and 2 when a computation stage or writing the output fails.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE

    try:
        _dispatch(args)
    except UsageError as exc:
        logger.error("usage: %s", exc)
        return EXIT_USAGE
    except ConformalMapError as exc:
        log_stage_failure(exc.stage, exc.describe())
        return EXIT_FAILURE
    except ValueError as exc:
        logger.error("computation: %s", exc)
        return EXIT_FAILURE
    except OSError as exc:
        logger.error("output: %s", exc)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
