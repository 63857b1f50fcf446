from typing import Any, Dict, Optional, Tuple

import click

from eqbn.cli.common import job_options, run_command
from eqbn.orbifold_index import (
    base_index,
    complexification_weights,
    kawasaki_report,
    map_index,
    normal_index,
    orbifoldize_cover,
    partition_conserved,
    superrigidity_codim,
)
from eqbn.schema import OrbifoldJob


def handle(job: OrbifoldJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    sd, od = job.surface(), job.orbifold()
    data = [point.build() for point in job.points]
    kawasaki = kawasaki_report(sd, od, data)
    results: Dict[str, Any] = {
        "convention": "real index",
        "base_index": base_index(sd),
        "twisted_index": kawasaki["twisted_index"],
        "kawasaki": kawasaki,
        "weights": [complexification_weights(datum.k, datum) for datum in data],
        "coinvariant_dims": [datum.coinvariant_dim for datum in data],
    }
    passed = kawasaki["agree"] and kawasaki["degree_identity_holds"]
    if job.cover is not None:
        profile = job.cover.build()
        orbifold = orbifoldize_cover(profile)
        conserved = partition_conserved(orbifold, profile.degree)
        results["cover"] = {
            "cover_genus": profile.cover_genus,
            "points": [
                {"point": p.point_id, "nu": p.nu, "upstairs": list(p.upstairs)}
                for p in orbifold.points
            ],
            "partition_conserved": conserved,
        }
        passed = passed and conserved
    if job.c1_pairing is not None:
        ind_u = map_index(job.n, job.genus, job.c1_pairing)
        results["map_index"] = ind_u
        results["normal_index"] = normal_index(ind_u, job.z)
    if job.ledger is not None:
        ledger = superrigidity_codim(job.n, job.ledger.s, job.ledger.k, job.ledger.d, job.ledger.i)
        results["ledger"] = ledger
        passed = (
            passed
            and ledger["hypothesis_holds"]
            and ledger["meets_bound_n"]
            and ledger["meets_bound_2s"]
        )
    return results, passed


@click.command("orbifold-index")
@job_options
@click.pass_context
def orbifold_index(
    ctx: click.Context, input_path: Optional[str], seed: int, out: Optional[str], fmt: str
) -> None:
    """Twisted index, Kawasaki cross-check and super-rigidity ledger."""
    run_command(ctx, "orbifold-index", OrbifoldJob, handle, input_path, {}, seed, out, fmt)
