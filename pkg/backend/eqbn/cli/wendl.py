import random
from typing import Any, Dict, Optional, Tuple

import click

from eqbn.cli.common import job_options, run_command
from eqbn.config import get_settings
from eqbn.scalars import parse_scalar
from eqbn.schema import WendlJob
from eqbn.wendl_certifier import (
    PetriKernelElement,
    cauchy_vanishing_bound,
    certify_rank_bound,
    conjugate_symmetry_holds,
    cr_kernel_basis,
    random_kernel_element,
    s_star_lower_bound,
)


def kernel_element(job: WendlJob, seed: int) -> PetriKernelElement:
    if job.b is not None and job.bp is not None:
        return PetriKernelElement(
            job.d, tuple(parse_scalar(x) for x in job.b), tuple(parse_scalar(x) for x in job.bp)
        )
    if job.basis_index is not None:
        return cr_kernel_basis(job.d)[job.basis_index]
    return random_kernel_element(job.d, random.Random(f"{seed}:wendl"))


def handle(job: WendlJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    b = kernel_element(job, seed)
    ell = job.ell if job.ell is not None else get_settings().wendl_ell_factor * job.d
    certificate = certify_rank_bound(b, ell)
    symmetric = conjugate_symmetry_holds(b, ell)
    cauchy = cauchy_vanishing_bound(b)
    counting = s_star_lower_bound(b, ell)
    results = {
        **certificate,
        "conjugate_symmetry": symmetric,
        "cauchy": cauchy,
        "s_counting": counting,
    }
    passed = (
        certificate["pass"]
        and symmetric
        and cauchy["bound_holds_in_window"]
        and cauchy["cauchy_invertible"]
        and counting["chain_holds"]
    )
    return results, passed


@click.command("wendl-certify")
@click.option("--d", "d", type=click.IntRange(min=1), default=None, help="Degree of B.")
@click.option("--ell", type=click.IntRange(min=0), default=None, help="Truncation degree.")
@click.option("--basis-index", type=click.IntRange(min=0), default=None)
@job_options
@click.pass_context
def wendl_certify(
    ctx: click.Context,
    d: Optional[int],
    ell: Optional[int],
    basis_index: Optional[int],
    input_path: Optional[str],
    seed: int,
    out: Optional[str],
    fmt: str,
) -> None:
    """Certify rank Q_B >= ceil(c·ell²) for a Cauchy–Riemann Petri kernel element."""
    overrides = {"d": d, "ell": ell, "basis_index": basis_index}
    run_command(ctx, "wendl-certify", WendlJob, handle, input_path, overrides, seed, out, fmt)
