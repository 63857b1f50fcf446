import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Type, Union

import click
import orjson
from pydantic import BaseModel, ValidationError

from eqbn.reports import (
    EXIT_CHECK_FAILED,
    EXIT_INTERNAL,
    EXIT_PASS,
    EXIT_USAGE,
    build_report,
    error_report,
    write_report,
)
from eqbn.schema import ErrorReport, Report

logger = logging.getLogger(__name__)

Handler = Callable[[Any, int], Tuple[Dict[str, Any], bool]]


class InputError(ValueError):
    """The input document could not be read."""


def load_document(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        document = orjson.loads(Path(path).read_bytes())
    except OSError as exc:
        raise InputError(f"Cannot read {path}: {exc.strerror}") from exc
    except orjson.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise InputError(f"{path} must contain a JSON object")
    return document


def run_handler(
    command: str,
    model: Type[BaseModel],
    handler: Handler,
    document: Dict[str, Any],
    seed: int = 0,
) -> Tuple[Union[Report, ErrorReport], int]:
    """Validate ``document``, run ``handler`` and wrap the outcome in a report."""
    start = time.perf_counter()
    try:
        parsed = model.parse_obj(document)
    except ValidationError as exc:
        return error_report(exc), EXIT_USAGE
    try:
        results, passed = handler(parsed, seed)
    except AssertionError as exc:
        logger.exception("%s: internal assertion failed", command)
        return error_report(exc), EXIT_INTERNAL
    except ValueError as exc:
        # Preconditions on the input, e.g. a partition that does not sum to the degree.
        logger.debug("%s rejected its input: %s", command, exc)
        return error_report(exc), EXIT_USAGE
    report = build_report(command, results, passed, time.perf_counter() - start, seed)
    if results.get("internal_error"):
        return report, EXIT_INTERNAL
    return report, EXIT_PASS if passed else EXIT_CHECK_FAILED


def emit(report: Union[Report, ErrorReport], out: Optional[str], fmt: str) -> None:
    data = write_report(report, out, fmt)
    if not out or "error" in report:
        click.echo(data.decode(), nl=False)


def job_options(func: Callable) -> Callable:
    """--input, --seed, --out and --format, shared by every job command."""
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["json", "csv"]),
        default="json",
        show_default=True,
    )(func)
    func = click.option("--out", type=click.Path(dir_okay=False), default=None)(func)
    func = click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)(func)
    func = click.option(
        "--input", "input_path", type=click.Path(dir_okay=False), default=None
    )(func)
    return func


def run_command(
    ctx: click.Context,
    command: str,
    model: Type[BaseModel],
    handler: Handler,
    input_path: Optional[str],
    overrides: Dict[str, Any],
    seed: int,
    out: Optional[str],
    fmt: str,
) -> None:
    """Merge inline flags over the input document, run, emit and exit."""
    try:
        document = load_document(input_path)
    except InputError as exc:
        emit(error_report(exc), None, fmt)
        ctx.exit(EXIT_USAGE)
    document.update({k: v for k, v in overrides.items() if v is not None})
    report, code = run_handler(command, model, handler, document, seed)
    emit(report, out, fmt)
    ctx.exit(code)
