from typing import Any, Dict, Optional, Tuple

import click

from eqbn.cli.common import job_options, run_command
from eqbn.config import get_settings
from eqbn.cover_twist_lab import (
    equivariant_petri_check,
    ev_annihilator_check,
    index_bookkeeping,
    kernel_decomposition_report,
    petri_condition_holds,
    petri_matrix,
    petri_rank_check,
    pushforward_trivial_system,
    verify_pullback_equals_twist,
)
from eqbn.exact_linalg import left_nullspace_basis, nullspace_basis
from eqbn.rep_theory import is_normal
from eqbn.schema import CoverJob


def handle(job: CoverJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    d = job.build()
    c = job.cover.build()
    c.check_graph(d.graph)
    u = job.petri_edges if job.petri_edges is not None else list(range(len(d.graph.edges)))
    twist = verify_pullback_equals_twist(d, c)
    bookkeeping = index_bookkeeping(d, pushforward_trivial_system(d.graph, c))
    duality = ev_annihilator_check(d, u)
    m = d.matrix()
    kernel, cokernel = nullspace_basis(m), left_nullspace_basis(m)
    petri = petri_matrix(d, kernel, cokernel, u)
    results: Dict[str, Any] = {
        "sheets": c.sheets,
        "cover_connected": c.is_connected(d.graph),
        "pullback_equals_twist": twist["equal"],
        "index": bookkeeping,
        "ev_duality": duality,
        "petri": {
            "dim_kernel": len(kernel),
            "dim_cokernel": len(cokernel),
            "injective": petri_condition_holds(petri),
            "rank_one": petri_rank_check(
                petri, len(kernel), len(cokernel), 1, get_settings().petri_search_bound
            ),
        },
        "normal_cover": is_normal(c.group, c.subgroup),
    }
    passed = twist["equal"] and bookkeeping["holds"] and duality["equal"]
    if results["normal_cover"]:
        decomposition = kernel_decomposition_report(d, c, job.catalog())
        equivariant = equivariant_petri_check(d, c, u)
        results["kernel_decomposition"] = decomposition
        results["equivariant_petri"] = equivariant
        passed = (
            passed
            and decomposition["identity_holds"]
            and decomposition["isotypic_holds"]
            and equivariant["equal"]
        )
    return results, passed


@click.command("cover-verify")
@job_options
@click.pass_context
def cover_verify(
    ctx: click.Context, input_path: Optional[str], seed: int, out: Optional[str], fmt: str
) -> None:
    """Pullback = twist, kernel decomposition and Petri duality for a graph operator."""
    run_command(ctx, "cover-verify", CoverJob, handle, input_path, {}, seed, out, fmt)
