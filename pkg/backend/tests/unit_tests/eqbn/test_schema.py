"""Validation of input documents."""
import pytest
from pydantic import ValidationError

from eqbn.orbifold_index import SurfaceBundleData
from eqbn.schema import (
    CoverJob,
    JobSpec,
    OrbifoldJob,
    OrbifoldPointInput,
    RepDecomposeJob,
    SymbolJob,
    WendlJob,
)
from tests.unit_tests.fixtures import load_sample


def test_job_spec() -> None:
    assert JobSpec(command="suite").format == "json"
    with pytest.raises(ValidationError):
        JobSpec(command="bogus")
    with pytest.raises(ValidationError):
        JobSpec(command="suite", format="xml")


@pytest.mark.parametrize(
    "document",
    [
        {"d": 1, "b": [1, -1]},
        {"d": 1, "b": [1, -1, 0], "bp": [0, 0, 0]},
        {"d": 1, "b": [1, -1], "bp": [0, 0], "basis_index": 0},
        {"d": 1, "basis_index": 2},
        {"d": 0},
    ],
)
def test_wendl_job_rejects(document: dict) -> None:
    with pytest.raises(ValidationError):
        WendlJob.parse_obj(document)


def test_wendl_job_accepts_fractions() -> None:
    job = WendlJob.parse_obj({"d": 1, "b": ["1/2", "-1/2"], "bp": [0, 0]})
    assert job.ell is None


def test_explicit_symbol() -> None:
    job = SymbolJob.parse_obj({"n": 1, "k": 1, "rE": 1, "rF": 1, "coeffs": {"1": [[2]]}})
    symbol = job.build()
    assert (symbol.n, symbol.k, symbol.r_e, symbol.r_f) == (1, 1, 1, 1)


def test_symbol_job_rejects() -> None:
    with pytest.raises(ValidationError):
        SymbolJob.parse_obj({"n": 1, "k": 1, "coeffs": {"1": [[2]]}})
    with pytest.raises(ValidationError):
        SymbolJob.parse_obj({"builtin": "heat"})
    job = SymbolJob.parse_obj({"n": 1, "k": 1, "rE": 2, "rF": 2, "coeffs": {"1": [[2]]}})
    with pytest.raises(ValueError):
        job.build()


def test_orbifold_job_aliases() -> None:
    job = OrbifoldJob.parse_obj(load_sample("orbifold-index"))
    assert job.surface() == SurfaceBundleData(0, 1, 0, 3)
    assert job.orbifold().multiplicities == [2]
    with pytest.raises(ValidationError):
        OrbifoldPointInput.parse_obj({"k": 2})


def test_rep_job_needs_one_group() -> None:
    with pytest.raises(ValidationError):
        RepDecomposeJob.parse_obj({})
    with pytest.raises(ValidationError):
        RepDecomposeJob.parse_obj({"group": "S3", "table": [[0]]})
    with pytest.raises(ValidationError):
        RepDecomposeJob.parse_obj({"group": "A5"})
    assert RepDecomposeJob.parse_obj({"table": [[0]]}).build_group().order == 1


def test_cover_job_shapes() -> None:
    document = load_sample("cover-verify")
    assert CoverJob.parse_obj(document).build().rank == 1
    with pytest.raises(ValidationError):
        CoverJob.parse_obj({**document, "edges": [[0, 1, 2], [0, 1]]})
