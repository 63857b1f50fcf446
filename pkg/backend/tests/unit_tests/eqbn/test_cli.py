"""Drive the console entry point end to end."""
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import orjson
import pytest
from pytest_mock import MockerFixture

from eqbn import jet_calculus
from eqbn.cli.jobs import run
from eqbn.main import main
from eqbn.schema import JobSpec
from tests.unit_tests.fixtures import HERE, load_sample

FAST_SAMPLES = ["wendl-certify", "orbifold-index", "rep-decompose", "cover-verify", "jet-check"]


def _invoke(capsys: pytest.CaptureFixture, *args: str) -> Tuple[int, str]:
    with pytest.raises(SystemExit) as info:
        main(list(args))
    return info.value.code, capsys.readouterr().out


def _project(d: dict, *, exclude_keys: Optional[Sequence[str]]) -> dict:
    """Return a dict without the keys specified."""
    _exclude = set(exclude_keys) if exclude_keys else set()
    return {k: v for k, v in d.items() if k not in _exclude}


def _report(capsys: pytest.CaptureFixture, *args: str) -> Tuple[int, Dict[str, Any]]:
    code, out = _invoke(capsys, *args)
    return code, orjson.loads(out)


@pytest.mark.parametrize("command", FAST_SAMPLES)
def test_sample_inputs_pass(capsys: pytest.CaptureFixture, command: str) -> None:
    """Every shipped sample document runs and passes its checks."""
    path = HERE / f"sample.{command}.json"
    code, report = _report(capsys, command, "--input", str(path))
    assert code == 0, report
    assert report["command"] == command
    assert report["passed"] is True
    assert report["config_hash"] == report["default_config_hash"]


@pytest.mark.slow
@pytest.mark.timeout(600)
def test_suite_sample(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(capsys, "suite", "--input", str(HERE / "sample.suite.json"))
    assert code == 0
    assert [c["id"] for c in report["results"]["criteria"]] == [4, 7]


def test_wendl_inline_flags(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(capsys, "wendl-certify", "--d", "1", "--ell", "8")
    assert code == 0
    assert report["results"]["threshold"] == 4
    assert report["results"]["codomain_truncation"] == 10


def test_orbifold_sample_values(capsys: pytest.CaptureFixture) -> None:
    path = HERE / "sample.orbifold-index.json"
    _, report = _report(capsys, "orbifold-index", "--input", str(path))
    assert report["results"]["twisted_index"] == 1
    assert report["results"]["base_index"] == 2
    assert report["results"]["weights"] == [[-1]]


@pytest.mark.parametrize("index, expected", [(-2, 0), (-1, 1)])
def test_orbifold_ledger_exit_code(
    capsys: pytest.CaptureFixture, tmp_path: Path, index: int, expected: int
) -> None:
    document = tmp_path / "job.json"
    sample = load_sample("orbifold-index")
    sample["ledger"] = {"s": 1, "k": [1], "d": [1], "i": [index]}
    document.write_bytes(orjson.dumps(sample))
    code, report = _report(capsys, "orbifold-index", "--input", str(document))
    assert code == expected
    assert report["results"]["ledger"]["hypothesis_holds"] is (expected == 0)


def test_rep_regular_flag(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(capsys, "rep-decompose", "--group", "S3", "--regular")
    assert code == 0
    assert report["results"]["decompositions"]["regular"]["multiplicities"] == {
        "trivial": 1,
        "sign": 1,
        "standard": 2,
    }


def test_failed_check_exits_one(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(capsys, "jet-check", "--symbol", "partial_x_2d")
    assert code == 1
    assert report["passed"] is False
    assert report["results"]["ellipticity"]["elliptic"] is False


def test_unreadable_input(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, report = _report(capsys, "wendl-certify", "--input", str(broken))
    assert code == 2
    assert report["error"]["type"] == "InputError"
    code, report = _report(capsys, "wendl-certify", "--input", str(tmp_path / "missing.json"))
    assert code == 2


def test_schema_error(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    document = tmp_path / "job.json"
    document.write_bytes(orjson.dumps({"d": 1, "b": [1, -1]}))
    code, report = _report(capsys, "wendl-certify", "--input", str(document))
    assert code == 2
    assert report["error"]["type"] == "ValidationError"


def test_precondition_error(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    """A ramification profile whose partition misses the degree."""
    document = tmp_path / "job.json"
    document.write_bytes(
        orjson.dumps(
            {"genus": 0, "rkE": 1, "degE": 0, "cover": {"degree": 3, "branch": [[2, 2]]}}
        )
    )
    code, report = _report(capsys, "orbifold-index", "--input", str(document))
    assert code == 2
    assert report["error"]["type"] == "ValueError"


def test_usage_error_is_json(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(capsys, "wendl-certify", "--bogus")
    assert code == 2
    assert report["error"]["type"] == "NoSuchOption"


def test_internal_assertion_exits_three(
    capsys: pytest.CaptureFixture, mocker: MockerFixture
) -> None:
    mocker.patch(
        "eqbn.cli.wendl.certify_rank_bound", side_effect=AssertionError("broken invariant")
    )
    code, report = _report(capsys, "wendl-certify", "--d", "1")
    assert code == 3
    assert report["error"] == {"type": "AssertionError", "detail": "broken invariant"}


def test_version(capsys: pytest.CaptureFixture) -> None:
    code, out = _invoke(capsys, "version")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("eqbn ")
    assert lines[1].split()[1] == lines[2].split()[1]


def test_out_and_csv(capsys: pytest.CaptureFixture, tmp_path: Path) -> None:
    target = tmp_path / "report.json"
    code, out = _invoke(capsys, "wendl-certify", "--d", "1", "--out", str(target))
    assert code == 0
    assert out == ""
    assert orjson.loads(target.read_bytes())["results"]["ell"] == 8

    code, out = _invoke(capsys, "wendl-certify", "--d", "1", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "field,value"
    assert "passed,True" in lines


def test_same_seed_same_payload(capsys: pytest.CaptureFixture) -> None:
    _, first = _report(capsys, "wendl-certify", "--d", "2", "--seed", "7")
    _, second = _report(capsys, "wendl-certify", "--d", "2", "--seed", "7")
    assert _project(first, exclude_keys=["timing_seconds"]) == _project(
        second, exclude_keys=["timing_seconds"]
    )


def test_workers_reach_the_suite(capsys: pytest.CaptureFixture) -> None:
    code, report = _report(
        capsys, "--workers", "2", "suite", "--criterion", "5", "--criterion", "8"
    )
    assert code == 0
    assert [c["id"] for c in report["results"]["criteria"]] == [5, 8]


def test_run_job_spec(tmp_path: Path) -> None:
    out = tmp_path / "orbifold.csv"
    job = JobSpec(
        command="orbifold-index",
        document=load_sample("orbifold-index"),
        out=str(out),
        format="csv",
    )
    report, code = run(job)
    assert code == 0
    assert report["results"]["twisted_index"] == 1
    assert out.read_text().startswith("field,value")


def test_jet_check_certifies_once(capsys: pytest.CaptureFixture, mocker: MockerFixture) -> None:
    """The seeded certificate from the handler is the one every level reports."""
    spy = mocker.spy(jet_calculus, "ellipticity_certificate")
    code, report = _report(capsys, "jet-check", "--symbol", "dirac_3d", "--ell", "1", "--seed", "5")
    assert code == 0
    assert spy.call_count == 0
    certificate = report["results"]["ellipticity"]
    assert certificate["method"] == "probabilistic"
    assert all(level["ellipticity"] == certificate for level in report["results"]["levels"])
