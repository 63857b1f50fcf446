import random
from typing import Any, Dict, Optional, Tuple

import click

from eqbn.cli.common import job_options, run_command
from eqbn.jet_calculus import ellipticity_certificate, graded_kernel_check, jet_dimension_check
from eqbn.schema import SymbolJob


def handle(job: SymbolJob, seed: int) -> Tuple[Dict[str, Any], bool]:
    symbol = job.build()
    certificate = ellipticity_certificate(symbol, random.Random(f"{seed}:jet"))
    results: Dict[str, Any] = {
        "symbol": symbol.name,
        "n": symbol.n,
        "k": symbol.k,
        "ellipticity": certificate,
    }
    if not certificate["elliptic"]:
        return results, False
    levels = []
    for ell in range(job.ell + 1):
        report = jet_dimension_check(symbol, ell, certificate=certificate)
        report["graded"] = graded_kernel_check(symbol, ell)
        levels.append(report)
    results["levels"] = levels
    passed = all(r["surjective"] and r["formula_holds"] for r in levels)
    return results, passed


@click.command("jet-check")
@click.option("--symbol", "builtin", default=None, help="Built-in symbol name.")
@click.option("--ell", type=click.IntRange(min=0), default=None)
@job_options
@click.pass_context
def jet_check(
    ctx: click.Context,
    builtin: Optional[str],
    ell: Optional[int],
    input_path: Optional[str],
    seed: int,
    out: Optional[str],
    fmt: str,
) -> None:
    """Surjectivity and kernel dimension of the truncated formal operator."""
    overrides = {"builtin": builtin, "ell": ell}
    run_command(ctx, "jet-check", SymbolJob, handle, input_path, overrides, seed, out, fmt)
