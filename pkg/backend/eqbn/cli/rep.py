from typing import Any, Dict, List, Optional, Tuple

import click

from eqbn.catalogs import get_catalog
from eqbn.cli.common import job_options, run_command
from eqbn.rep_theory import (
    DIVISION_TYPES,
    IrreducibleCatalog,
    NotIrreducible,
    Representation,
    certify_irreducible,
    coset_permutation_rep,
    intertwiner_basis,
    multiplicities,
    regular_rep,
)
from eqbn.schema import RepDecomposeJob


def _describe(rep: Representation) -> Dict[str, Any]:
    try:
        k = certify_irreducible(rep)
    except NotIrreducible:
        return {"degree": rep.degree, "irreducible": False}
    return {"degree": rep.degree, "irreducible": True, "k": k, "division_type": DIVISION_TYPES[k]}


def _decompose(rep: Representation, catalog: IrreducibleCatalog) -> Dict[str, Any]:
    mult = multiplicities(rep, catalog)
    return {"degree": rep.degree, "multiplicities": dict(zip(catalog.names, mult))}


def _catalog_from(reps: List[Representation]) -> Optional[IrreducibleCatalog]:
    """Irreducible, pairwise non-isomorphic inputs forming a complete catalog."""
    irreps, ks = [], []
    for rep in reps:
        try:
            k = certify_irreducible(rep)
        except NotIrreducible:
            continue
        if any(intertwiner_basis(other, rep) for other in irreps):
            continue
        irreps.append(rep)
        ks.append(k)
    if not irreps:
        return None
    catalog = IrreducibleCatalog(reps[0].group, tuple(irreps), tuple(ks))
    return catalog if catalog.is_complete() else None


def handle(job: RepDecomposeJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    group = job.build_group()
    reps = [r.build(group) for r in job.reps]
    targets = [(r.name or f"rep{i}", r) for i, r in enumerate(reps)]
    if job.regular:
        targets.append(("regular", regular_rep(group)))
    if job.subgroup is not None:
        targets.append(("coset", coset_permutation_rep(group, sorted(job.subgroup))))
    catalog = get_catalog(job.group) if job.group is not None else _catalog_from(reps)
    results: Dict[str, Any] = {
        "group": group.name or "table",
        "order": group.order,
        "representations": {name: _describe(rep) for name, rep in targets},
        "catalog_complete": catalog is not None,
    }
    if catalog is None:
        return results, True
    results["catalog"] = {
        "names": list(catalog.names),
        "k": list(catalog.k),
        "division_types": list(catalog.division_types),
        "plancherel_sum": catalog.plancherel_sum(),
    }
    results["decompositions"] = {name: _decompose(rep, catalog) for name, rep in targets}
    return results, catalog.is_complete()


@click.command("rep-decompose")
@click.option("--group", default=None, help="Built-in group name, e.g. S3.")
@click.option("--regular", is_flag=True, help="Also decompose the regular representation.")
@job_options
@click.pass_context
def rep_decompose(
    ctx: click.Context,
    group: Optional[str],
    regular: bool,
    input_path: Optional[str],
    seed: int,
    out: Optional[str],
    fmt: str,
) -> None:
    """Multiplicities of irreducible real representations."""
    overrides = {"group": group, "regular": regular or None}
    run_command(ctx, "rep-decompose", RepDecomposeJob, handle, input_path, overrides, seed, out, fmt)
