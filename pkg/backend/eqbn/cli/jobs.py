"""In-process entry point: run a :class:`JobSpec` without going through click."""
from typing import Dict, Tuple, Type, Union

from pydantic import BaseModel

from eqbn.cli.common import Handler, run_handler
from eqbn.cli.cover import handle as cover_handle
from eqbn.cli.jet import handle as jet_handle
from eqbn.cli.orbifold import handle as orbifold_handle
from eqbn.cli.rep import handle as rep_handle
from eqbn.cli.suite import handle as suite_handle
from eqbn.cli.wendl import handle as wendl_handle
from eqbn.reports import write_report
from eqbn.schema import (
    CoverJob,
    ErrorReport,
    JobSpec,
    OrbifoldJob,
    RepDecomposeJob,
    Report,
    SuiteJob,
    SymbolJob,
    WendlJob,
)

HANDLERS: Dict[str, Tuple[Type[BaseModel], Handler]] = {
    "wendl-certify": (WendlJob, wendl_handle),
    "orbifold-index": (OrbifoldJob, orbifold_handle),
    "rep-decompose": (RepDecomposeJob, rep_handle),
    "cover-verify": (CoverJob, cover_handle),
    "jet-check": (SymbolJob, jet_handle),
    "suite": (SuiteJob, suite_handle),
}


def run(job: JobSpec) -> Tuple[Union[Report, ErrorReport], int]:
    """Dispatch to the owning module; the report is also written to ``job.out``."""
    model, handler = HANDLERS[job.command]
    report, code = run_handler(job.command, model, handler, job.document, job.seed)
    if job.out:
        write_report(report, job.out, job.format)
    return report, code
