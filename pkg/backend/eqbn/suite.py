"""Reproducible verification suite.

Each criterion draws from its own ``random.Random(f"{seed}:{id}")`` so results
do not depend on scheduling, and results are ordered by criterion id.
"""
import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from eqbn import catalogs, fredholm_reduction, jet_calculus, orbifold_index, wendl_certifier
from eqbn.config import DEFAULT_CONFIG_HASH, config_hash, get_settings
from eqbn.cover_twist_lab import (
    ev_annihilator_check,
    kernel_decomposition_report,
    random_graph,
    random_instance,
    random_operator,
    verify_pullback_equals_twist,
)
from eqbn.exact_linalg import rank
from eqbn.rep_theory import division_type
from eqbn.reports import dumps
from eqbn.scalars import GAUSSIAN, RATIONAL
from eqbn.schema import CriterionResult

logger = logging.getLogger(__name__)

Check = Callable[[random.Random], Tuple[bool, Dict[str, Any]]]

WENDL_DEGREES = (1, 2, 3)
WENDL_RANDOM_PAIRS = 20
PETRI_KERNEL_DEGREES = range(7)
JET_SYMBOLS = ("d_dx", "cauchy_riemann", "laplace_2d", "dirac_3d")
JET_MAX_ELL = 5
COVER_GROUPS = ("Z2", "Z3", "Z4", "S3", "Q8")
COVER_INSTANCES = 30
REDUCTION_INSTANCES = 500
ORBIFOLD_DATASETS = 50
EV_INSTANCES = 20
DETERMINISM_CRITERIA = (5, 7, 8)


def check_wendl_rank(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    factor = get_settings().wendl_ell_factor
    checked = failures = 0
    worst_margin: Optional[int] = None
    min_constant: Optional[Fraction] = None
    for d in WENDL_DEGREES:
        elements = wendl_certifier.cr_kernel_basis(d) + [
            wendl_certifier.random_kernel_element(d, rng) for _ in range(WENDL_RANDOM_PAIRS)
        ]
        for ell in (factor * d, factor * d + 2, factor * d + 4):
            for b in elements:
                rk, _, _ = wendl_certifier.q_rank(b, ell)
                threshold = wendl_certifier.rank_threshold(ell)
                checked += 1
                failures += rk < threshold
                margin = rk - threshold
                worst_margin = margin if worst_margin is None else min(worst_margin, margin)
                constant = Fraction(rk, ell * ell)
                min_constant = constant if min_constant is None else min(min_constant, constant)
    return failures == 0, {
        "checked": checked,
        "failures": failures,
        "worst_margin": worst_margin,
        "min_measured_constant": min_constant,
    }


def check_petri_kernel(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    rows = [wendl_certifier.cr_kernel_check(d) for d in PETRI_KERNEL_DEGREES]
    return all(r["agrees"] for r in rows), {
        "dimensions": {r["d"]: r["brute_force_dim"] for r in rows},
        "disagreements": [r["d"] for r in rows if not r["agrees"]],
    }


def check_jet_formulas(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    failures: List[str] = []
    checked = 0
    for name in JET_SYMBOLS:
        symbol = jet_calculus.get_symbol(name)
        certificate = jet_calculus.ellipticity_certificate(symbol, rng)
        for ell in range(JET_MAX_ELL + 1):
            report = jet_calculus.jet_dimension_check(symbol, ell, certificate=certificate)
            checked += 1
            if not (report["surjective"] and report["formula_holds"]):
                failures.append(f"{name}@{ell}")
    return not failures, {"checked": checked, "failures": failures}


def check_pullback_twist(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    mismatched: List[int] = []
    identity_failures: List[int] = []
    for i in range(COVER_INSTANCES):
        catalog = catalogs.get_catalog(COVER_GROUPS[i % len(COVER_GROUPS)])
        d, c = random_instance(rng, catalog.group)
        if not verify_pullback_equals_twist(d, c)["equal"]:
            mismatched.append(i)
        report = kernel_decomposition_report(d, c, catalog)
        if not (report["identity_holds"] and report["isotypic_holds"]):
            identity_failures.append(i)
    return not (mismatched or identity_failures), {
        "instances": COVER_INSTANCES,
        "reindexing_failures": mismatched,
        "kernel_identity_failures": identity_failures,
    }


def check_representations(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    plancherel = {}
    for name in catalogs.BUILTIN_GROUPS:
        catalog = catalogs.get_catalog(name)
        catalog.verify()
        plancherel[name] = [catalog.plancherel_sum(), catalog.group.order]
    z3, q8 = catalogs.get_catalog("Z3"), catalogs.get_catalog("Q8")
    types = {
        "trivial": division_type(z3.irreps[z3.index_of("trivial")]),
        "z3_rotation": division_type(z3.irreps[z3.index_of("rot1")]),
        "q8_quaternion": division_type(q8.irreps[q8.index_of("quaternion")]),
    }
    ok = all(a == b for a, b in plancherel.values()) and types == {
        "trivial": "R",
        "z3_rotation": "C",
        "q8_quaternion": "H",
    }
    return ok, {"plancherel": plancherel, "division_types": types}


def _derivative_checked(split: Any, lhat: Any) -> bool:
    # t may hit a zero of det(L₁₁ + tL̂₁₁).
    for t in (Fraction(1, 997), Fraction(1, 1009), Fraction(-1, 1013)):
        try:
            return fredholm_reduction.ls_derivative_check(split, lhat, [t])
        except ValueError:
            continue
    return False


def check_lyapunov_schmidt(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    failures: List[int] = []
    for i in range(REDUCTION_INSTANCES):
        kind = GAUSSIAN if i % 2 else RATIONAL
        split, t, lhat = fredholm_reduction.random_reduction_instance(rng, kind)
        reduction = fredholm_reduction.ls_reduce(split, t)
        rk = rank(t)
        ok = (
            reduction.dim_kernel == t.cols - rk
            and reduction.dim_cokernel == t.rows - rk
            and fredholm_reduction.verify_witnesses(t, reduction)
            and _derivative_checked(split, lhat)
        )
        if not ok:
            failures.append(i)
    return not failures, {"instances": REDUCTION_INSTANCES, "failures": failures}


def check_orbifold_index(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    failures: List[int] = []
    non_integral = 0
    for i in range(ORBIFOLD_DATASETS):
        sd, od, data = orbifold_index.random_monodromy_dataset(rng)
        report = orbifold_index.kawasaki_report(sd, od, data)
        weights_ok = all(
            2 * sum(orbifold_index.complexification_weights(datum.k, datum))
            == -datum.k * datum.coinvariant_dim
            for datum in data
        )
        non_integral += not report["degree_integral"]
        if not (report["agree"] and report["degree_identity_holds"] and weights_ok):
            failures.append(i)
    return not failures, {
        "datasets": ORBIFOLD_DATASETS,
        "failures": failures,
        "non_integral_degrees": non_integral,
    }


def check_codimensions(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    mismatches: List[str] = []
    for _ in range(25):
        d, e = rng.randint(0, 6), rng.randint(0, 6)
        if fredholm_reduction.fredholm_codim(d, e) != d * e:
            mismatches.append(f"fredholm({d},{e})")
        dim_x, dim_y = rng.randint(0, 6), rng.randint(0, 6)
        r = rng.randint(0, min(dim_x, dim_y))
        if fredholm_reduction.stratum_codim(dim_x, dim_y, r) != (dim_x - r) * (dim_y - r):
            mismatches.append(f"stratum({dim_x},{dim_y},{r})")
        size = rng.randint(1, 4)
        k = [rng.choice((1, 2, 4)) for _ in range(size)]
        ds = [rng.randint(0, 4) for _ in range(size)]
        es = [rng.randint(0, 4) for _ in range(size)]
        if fredholm_reduction.equivariant_codim(k, ds, es) != sum(
            a * b * c for a, b, c in zip(k, ds, es)
        ):
            mismatches.append(f"equivariant({k},{ds},{es})")
        if fredholm_reduction.selfadjoint_codim(k, ds) != sum(
            b + a * comb(b, 2) for a, b in zip(k, ds)
        ):
            mismatches.append(f"selfadjoint({k},{ds})")
    ledger = orbifold_index.superrigidity_codim(3, 2, [1], [1], [-4])
    ledger_ok = ledger["codim"] == 5 and ledger["top_stratum"] and ledger["top_shape"]
    return not mismatches and ledger_ok, {
        "mismatches": mismatches,
        "ledger_codim": ledger["codim"],
        "ledger_top_stratum": ledger["top_stratum"],
    }


def check_ev_duality(rng: random.Random) -> Tuple[bool, Dict[str, Any]]:
    failures: List[int] = []
    for i in range(EV_INSTANCES):
        graph = random_graph(rng, rng.randint(2, 5), rng.randint(1, 3))
        d = random_operator(rng, graph, rng.randint(1, 2), flat=rng.random() < 0.7)
        edges = list(range(len(graph.edges)))
        u = sorted(rng.sample(edges, rng.randint(1, len(edges))))
        if not ev_annihilator_check(d, u)["equal"]:
            failures.append(i)
    return not failures, {"instances": EV_INSTANCES, "failures": failures}


def check_determinism(seed: int, workers: int) -> Tuple[bool, Dict[str, Any]]:
    serial = _run_criteria(seed, DETERMINISM_CRITERIA, 1)[0]
    threaded = _run_criteria(seed, DETERMINISM_CRITERIA, max(2, workers))[0]
    return dumps(serial) == dumps(threaded), {
        "criteria": list(DETERMINISM_CRITERIA),
        "workers": [1, max(2, workers)],
    }


CRITERIA: Dict[int, Tuple[str, Check]] = {
    1: ("wendl_rank_bound", check_wendl_rank),
    2: ("petri_kernel_characterization", check_petri_kernel),
    3: ("jet_formulas", check_jet_formulas),
    4: ("pullback_equals_twist", check_pullback_twist),
    5: ("representation_identities", check_representations),
    6: ("lyapunov_schmidt", check_lyapunov_schmidt),
    7: ("orbifold_index_cross_checks", check_orbifold_index),
    8: ("codimension_calculators", check_codimensions),
    9: ("petri_evaluation_duality", check_ev_duality),
}
DETERMINISM_ID = 10
ALL_CRITERIA = tuple(sorted(CRITERIA)) + (DETERMINISM_ID,)


def _run_one(seed: int, criterion_id: int) -> Tuple[CriterionResult, float]:
    name, check = CRITERIA[criterion_id]
    rng = random.Random(f"{seed}:{criterion_id}")
    start = time.perf_counter()
    try:
        passed, measured = check(rng)
        status = "pass" if passed else "fail"
    except AssertionError as exc:
        logger.exception("criterion %d raised an internal assertion", criterion_id)
        status, measured = "error", {"error": str(exc), "type": "AssertionError"}
    except Exception as exc:
        logger.exception("criterion %d raised", criterion_id)
        status, measured = "fail", {"error": str(exc), "type": type(exc).__name__}
    elapsed = time.perf_counter() - start
    logger.info("criterion %d (%s): %s in %.2fs", criterion_id, name, status, elapsed)
    return CriterionResult(id=criterion_id, name=name, status=status, measured=measured), elapsed


def _run_criteria(
    seed: int, ids: Sequence[int], workers: int
) -> Tuple[List[CriterionResult], Dict[int, float]]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: _run_one(seed, i), ids))
    else:
        outcomes = [_run_one(seed, i) for i in ids]
    results = sorted((r for r, _ in outcomes), key=lambda r: r["id"])
    timing = {r["id"]: t for r, t in outcomes}
    return results, timing


# PUBLIC API


def run_suite(
    seed: int = 0, workers: Optional[int] = None, criteria: Optional[Sequence[int]] = None
) -> Dict[str, Any]:
    """Run the selected criteria (all by default) and summarize them.

    The returned ``timing`` entry is the only part that differs between two
    runs with the same seed.
    """
    settings = get_settings()
    workers = workers or settings.workers
    selected = sorted(set(criteria or ALL_CRITERIA))
    unknown = [i for i in selected if i not in ALL_CRITERIA]
    if unknown:
        raise ValueError(f"Unknown criteria {unknown}; expected ids in {ALL_CRITERIA}")
    ids = [i for i in selected if i != DETERMINISM_ID]
    results, timing = _run_criteria(seed, ids, workers)
    if DETERMINISM_ID in selected:
        start = time.perf_counter()
        passed, measured = check_determinism(seed, workers)
        results.append(
            CriterionResult(
                id=DETERMINISM_ID,
                name="determinism",
                status="pass" if passed else "fail",
                measured=measured,
            )
        )
        timing[DETERMINISM_ID] = time.perf_counter() - start
    tampered = config_hash(settings) != DEFAULT_CONFIG_HASH
    if tampered:
        logger.warning("suite ran with non-default mathematical constants")
    return {
        "criteria": results,
        "all_passed": all(r["status"] == "pass" for r in results),
        "internal_error": any(r["status"] == "error" for r in results),
        "config_tampered": tampered,
        "timing": {str(i): round(t, 6) for i, t in sorted(timing.items())},
    }
