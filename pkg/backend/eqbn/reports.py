"""Canonical report emission: orjson for JSON, a flat summary for CSV."""
import csv
import io
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import orjson
from pydantic import ValidationError

from eqbn import __version__
from eqbn.config import DEFAULT_CONFIG_HASH, Settings, config_hash, get_settings
from eqbn.exact_linalg import Matrix
from eqbn.scalars import GaussianRational, Quaternion, format_scalar
from eqbn.schema import ErrorReport, Report

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_NON_STR_KEYS

_SCALAR_TYPES = (str, int, float, bool, type(None))


def _default(obj: Any) -> Any:
    """orjson fallback for exact scalars, matrices and sets."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (GaussianRational, Quaternion)):
        return format_scalar(obj)
    if isinstance(obj, Matrix):
        return [[format_scalar(x) for x in row] for row in obj.to_lists()]
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"Type is not JSON serializable: {type(obj).__name__}")


def dumps(obj: Any) -> bytes:
    return orjson.dumps(obj, default=_default, option=JSON_OPTIONS)


def build_report(
    command: str,
    results: Dict[str, Any],
    passed: bool,
    timing_seconds: float,
    seed: int = 0,
    settings: Optional[Settings] = None,
) -> Report:
    settings = settings or get_settings()
    return Report(
        command=command,
        version=__version__,
        seed=seed,
        config_hash=config_hash(settings),
        default_config_hash=DEFAULT_CONFIG_HASH,
        results=results,
        passed=bool(passed),
        timing_seconds=round(timing_seconds, 6),
    )


def payload_bytes(report: Report) -> bytes:
    """The report without its timing field, for determinism comparisons."""
    body = {key: value for key, value in report.items() if key != "timing_seconds"}
    if isinstance(body.get("results"), dict):
        results = dict(body["results"])
        results.pop("timing", None)
        body["results"] = results
    return dumps(body)


def error_report(exc: Exception) -> ErrorReport:
    detail: Any
    if isinstance(exc, ValidationError):
        detail = exc.errors()
    else:
        detail = str(exc)
    return {"error": {"type": type(exc).__name__, "detail": detail}}


def summary_rows(report: Union[Report, ErrorReport]) -> List[List[Any]]:
    """Flat (field, value) rows; nested results stay in the JSON form."""
    if "error" in report:
        error = report["error"]  # type: ignore[typeddict-item]
        return [["error", error["type"]], ["detail", str(error["detail"])]]
    rows: List[List[Any]] = [
        [key, report[key]]  # type: ignore[literal-required]
        for key in ("command", "version", "seed", "config_hash", "passed")
    ]
    results = report["results"]
    for key in sorted(results):
        value = results[key]
        if isinstance(value, Fraction):
            value = str(value)
        if isinstance(value, _SCALAR_TYPES):
            rows.append([key, value])
    for criterion in results.get("criteria", []):
        rows.append([f"criterion_{criterion['id']}", criterion["status"]])
    return rows


def to_csv(report: Union[Report, ErrorReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["field", "value"])
    writer.writerows(summary_rows(report))
    return buffer.getvalue()


def render(report: Union[Report, ErrorReport], fmt: str = "json") -> bytes:
    if fmt == "csv":
        return to_csv(report).encode()
    return dumps(report) + b"\n"


def write_report(
    report: Union[Report, ErrorReport], out: Optional[str] = None, fmt: str = "json"
) -> bytes:
    """Write to ``out`` when given; the rendered bytes are returned either way."""
    data = render(report, fmt)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        logger.info("report written to %s", path)
    return data
