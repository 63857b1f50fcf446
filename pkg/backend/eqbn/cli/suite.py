from typing import Any, Dict, Optional, Tuple

import click

from eqbn.cli.common import job_options, run_command
from eqbn.schema import SuiteJob
from eqbn.suite import run_suite


def handle(job: SuiteJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    results = run_suite(seed, job.workers, job.criteria)
    return results, results["all_passed"]


@click.command("suite")
@click.option(
    "--criterion",
    "criteria",
    type=int,
    multiple=True,
    help="Run only these criterion ids (repeatable).",
)
@job_options
@click.pass_context
def suite(
    ctx: click.Context,
    criteria: Tuple[int, ...],
    input_path: Optional[str],
    seed: int,
    out: Optional[str],
    fmt: str,
) -> None:
    """Run the acceptance checks with a fixed seed."""
    overrides = {"criteria": list(criteria) or None, "workers": (ctx.obj or {}).get("workers")}
    run_command(ctx, "suite", SuiteJob, handle, input_path, overrides, seed, out, fmt)
