"""Report serialization and the CSV summary."""
from fractions import Fraction
from pathlib import Path

import orjson
import pytest
from pydantic import ValidationError

from eqbn.config import DEFAULT_CONFIG_HASH
from eqbn.exact_linalg import Matrix
from eqbn.reports import (
    build_report,
    dumps,
    error_report,
    payload_bytes,
    to_csv,
    write_report,
)
from eqbn.scalars import GaussianRational
from eqbn.schema import WendlJob


def test_dumps_exact_values() -> None:
    payload = {
        "half": Fraction(1, 2),
        "gauss": GaussianRational(1, 2),
        "matrix": Matrix([[1, Fraction(1, 2)]]),
        "ids": {3, 1},
        1: "int key",
    }
    assert orjson.loads(dumps(payload)) == {
        "half": "1/2",
        "gauss": ["1", "2"],
        "matrix": [["1", "1/2"]],
        "ids": [1, 3],
        "1": "int key",
    }


def test_dumps_rejects_unknown_types() -> None:
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_build_report_defaults() -> None:
    report = build_report("jet-check", {"ok": True}, 1, 0.1234567)
    assert report["passed"] is True
    assert report["config_hash"] == report["default_config_hash"] == DEFAULT_CONFIG_HASH
    assert report["timing_seconds"] == 0.123457


def test_payload_ignores_timing() -> None:
    first = build_report("suite", {"all_passed": True, "timing": {"5": 0.1}}, True, 1.0)
    second = build_report("suite", {"all_passed": True, "timing": {"5": 2.5}}, True, 9.0)
    assert payload_bytes(first) == payload_bytes(second)
    assert dumps(first) != dumps(second)


def test_error_report() -> None:
    assert error_report(ValueError("boom")) == {
        "error": {"type": "ValueError", "detail": "boom"}
    }
    with pytest.raises(ValidationError) as info:
        WendlJob.parse_obj({})
    report = error_report(info.value)
    assert report["error"]["type"] == "ValidationError"
    assert isinstance(report["error"]["detail"], list)


def test_csv_summary() -> None:
    results = {
        "rank": 45,
        "constant": Fraction(45, 64),
        "nested": {"skipped": True},
        "criteria": [{"id": 5, "status": "pass"}],
    }
    lines = to_csv(build_report("suite", results, True, 0.0)).splitlines()
    assert lines[0] == "field,value"
    assert "command,suite" in lines
    assert "passed,True" in lines
    assert "constant,45/64" in lines
    assert "criterion_5,pass" in lines
    assert not any(line.startswith("nested") for line in lines)


def test_csv_error_summary() -> None:
    lines = to_csv(error_report(ValueError("boom"))).splitlines()
    assert lines[1:] == ["error,ValueError", "detail,boom"]


def test_write_report(tmp_path: Path) -> None:
    target = tmp_path / "nested" / "report.json"
    report = build_report("wendl-certify", {"rank": 3}, False, 0.0)
    data = write_report(report, str(target))
    assert target.read_bytes() == data
    assert orjson.loads(data)["passed"] is False
