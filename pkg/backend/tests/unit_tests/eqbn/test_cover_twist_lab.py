"""Graph operators, local systems, covers and the Petri maps."""
import random

import pytest

from eqbn.catalogs import get_catalog, get_group, subgroups
from eqbn.cover_twist_lab import (
    BaseGraph,
    CoverSpec,
    DiscreteBundleOperator,
    discrete_derivative,
    equivariant_petri_check,
    ev_annihilator_check,
    index_bookkeeping,
    kernel_decomposition_report,
    local_system_from_rep,
    local_system_monodromy,
    loop_graph,
    petri_condition_holds,
    petri_matrix,
    petri_rank_check,
    pullback_operator,
    pullback_section,
    pushforward_trivial_system,
    random_instance,
    trivial_local_system,
    twist_operator,
    verify_pullback_equals_twist,
)
from eqbn.exact_linalg import Matrix, left_nullspace_basis, nullspace_basis, rank
from eqbn.scalars import GAUSSIAN


@pytest.fixture
def loop_cover() -> CoverSpec:
    """The connected double cover of the two-edge loop."""
    return CoverSpec(get_group("Z2"), (0, 1), (0,))


def test_graph_validation() -> None:
    with pytest.raises(ValueError):
        BaseGraph(3, ((0, 1),), (0,))
    with pytest.raises(ValueError):
        BaseGraph(2, ((0, 1), (1, 0)), (0, 1))
    with pytest.raises(ValueError):
        BaseGraph(2, ((0, 2),), (0,))
    assert loop_graph().non_tree_edges == [1]


def test_operator_coefficients_must_be_invertible() -> None:
    singular = Matrix([[1, 1], [1, 1]])
    identity = Matrix.identity(2)
    with pytest.raises(ValueError):
        DiscreteBundleOperator(BaseGraph(2, ((0, 1),), (0,)), 2, ((singular, identity),))


def test_cover_labels_must_be_trivial_on_the_tree() -> None:
    cover = CoverSpec(get_group("Z2"), (1, 0), (0,))
    with pytest.raises(ValueError):
        cover.check_graph(loop_graph())


def test_disconnected_cover_is_rejected() -> None:
    d = discrete_derivative(loop_graph())
    with pytest.raises(ValueError):
        pullback_operator(d, CoverSpec(get_group("Z2"), (0, 0), (0,)))


def test_loop_double_cover(loop_cover: CoverSpec) -> None:
    d = discrete_derivative(loop_graph())
    assert loop_cover.sheets == 2
    assert loop_cover.is_connected(d.graph)
    assert verify_pullback_equals_twist(d, loop_cover)["equal"]
    report = kernel_decomposition_report(d, loop_cover, get_catalog("Z2"))
    assert report["dim_ker_pullback"] == 1
    assert report["predicted"] == 1
    assert report["identity_holds"]
    assert report["isotypic_holds"]
    by_irrep = {row["irrep"]: row for row in report["per_irrep"]}
    assert by_irrep["trivial"]["dim_ker_twist_real"] == 1
    assert by_irrep["sign"]["dim_ker_twist_real"] == 0


def test_pulled_back_sections_stay_in_the_kernel(loop_cover: CoverSpec) -> None:
    d = discrete_derivative(loop_graph())
    (s,) = nullspace_basis(d.matrix())
    lifted = pullback_section(s, 1, 2, loop_cover.sheets)
    assert not any(pullback_operator(d, loop_cover).apply(lifted))


def test_monodromy_round_trip(loop_cover: CoverSpec) -> None:
    sign = get_catalog("Z2").irreps[1]
    system = local_system_from_rep(loop_graph(), loop_cover, sign)
    assert local_system_monodromy(system, loop_cover).matrices == sign.matrices
    pushed = pushforward_trivial_system(loop_graph(), loop_cover)
    assert pushed.rank == 2


def test_index_scales_with_the_rank_of_the_local_system(rng: random.Random) -> None:
    d, _ = random_instance(rng, get_group("Z3"))
    report = index_bookkeeping(d, trivial_local_system(d.graph, 3))
    assert report["holds"]
    assert report["index_twist"] == 3 * report["index_base"]
    twisted = twist_operator(d, trivial_local_system(d.graph, 3))
    assert twisted.cols == 3 * d.matrix().cols


def test_petri_on_the_loop() -> None:
    d = discrete_derivative(loop_graph())
    m = d.matrix()
    kernel, cokernel = nullspace_basis(m), left_nullspace_basis(m)
    petri = petri_matrix(d, kernel, cokernel, [0, 1])
    assert petri.shape == (2, 1)
    assert petri_condition_holds(petri)
    check = petri_rank_check(petri, len(kernel), len(cokernel), 1)
    assert check["holds"] is True and check["exhaustive"]
    assert ev_annihilator_check(d, [0, 1])["equal"]


def test_petri_rejects_non_kernel_vectors() -> None:
    d = discrete_derivative(loop_graph())
    with pytest.raises(ValueError):
        petri_matrix(d, [(1, 0)], [], [0])


def test_petri_rank_witness_on_a_line() -> None:
    """A one-dimensional ker ϖ spanned by a rank-one tensor."""
    petri = Matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    check = petri_rank_check(petri, 2, 2, 1)
    assert check["nullity"] == 1
    assert not check["holds"]
    assert check["witness"] == [0, 0, 0, 1]


def _as_square(b: list, n: int) -> Matrix:
    return Matrix([b[i * n : (i + 1) * n] for i in range(n)])


def test_petri_rank_zero_is_trivial() -> None:
    petri = Matrix([[1, 0, 0, -1], [0, 1, 1, 0]])
    check = petri_rank_check(petri, 2, 2, 0)
    assert check["holds"] is True
    assert check["exhaustive"]
    assert check["nullity"] == 2


def test_petri_rank_negative_rho_rejected() -> None:
    with pytest.raises(ValueError):
        petri_rank_check(Matrix([[1, 0]]), 1, 2, -1)


def test_petri_rank_one_found_outside_the_unit_box() -> None:
    """ker ϖ = span{(0,1,1,0), (4,0,0,1)} contains [[4,2],[2,1]]."""
    petri = Matrix([[1, 0, 0, -4], [0, 1, -1, 0]])
    check = petri_rank_check(petri, 2, 2, 1, bound=1)
    assert check["nullity"] == 2
    assert check["holds"] is False
    assert check["exhaustive"]
    witness = check["witness"]
    assert any(witness)
    assert not any(petri.apply(witness))
    assert rank(_as_square(witness, 2)) == 1


def test_petri_rank_plane_without_rank_one_elements() -> None:
    """span{I, [[0,1],[-1,0]]}: det(tI + J) = t² + 1 has no real root."""
    petri = Matrix([[1, 0, 0, -1], [0, 1, 1, 0]])
    check = petri_rank_check(petri, 2, 2, 1, bound=3)
    assert check["holds"] is True
    assert check["exhaustive"]
    assert check["method"] == "pencil"
    assert check["witness"] is None


def test_petri_rank_plane_over_gaussian_rationals() -> None:
    """The same plane over ℚ[i] contains I ± iJ, which has rank one."""
    petri = Matrix([[1, 0, 0, -1], [0, 1, 1, 0]], GAUSSIAN)
    check = petri_rank_check(petri, 2, 2, 1)
    assert check["holds"] is False
    assert check["exhaustive"]
    witness = check["witness"]
    assert witness is not None
    assert not any(petri.apply(witness))
    assert rank(_as_square(witness, 2)) == 1


def test_petri_rank_box_miss_is_undetermined() -> None:
    """Skew 3×3 matrices: nullity 3, every nonzero element has rank 2."""
    rows = []
    for i in range(3):
        row = [0] * 9
        row[i * 3 + i] = 1
        rows.append(row)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        row = [0] * 9
        row[i * 3 + j] = 1
        row[j * 3 + i] = 1
        rows.append(row)
    check = petri_rank_check(Matrix(rows), 3, 3, 1, bound=2)
    assert check["nullity"] == 3
    assert check["method"] == "box"
    assert check["holds"] is None
    assert not check["exhaustive"]


@pytest.mark.parametrize("name", ["Z2", "Z3", "S3"])
def test_pullback_equals_twist_on_random_instances(rng: random.Random, name: str) -> None:
    group = get_group(name)
    for _ in range(4):
        d, cover = random_instance(rng, group, max_vertices=4)
        assert verify_pullback_equals_twist(d, cover)["equal"]
        report = kernel_decomposition_report(d, cover, get_catalog(name))
        assert report["identity_holds"] and report["isotypic_holds"]
        assert equivariant_petri_check(d, cover, list(range(len(d.graph.edges))))["equal"]


def test_non_normal_cover_needs_the_core(rng: random.Random) -> None:
    group = get_group("S3")
    transposition = subgroups("S3")["gen0"]
    d, cover = random_instance(rng, group, transposition, max_vertices=3)
    assert cover.sheets == 3
    assert verify_pullback_equals_twist(d, cover)["equal"]
    with pytest.raises(ValueError):
        kernel_decomposition_report(d, cover, get_catalog("S3"))


def test_ev_duality_on_random_operators(rng: random.Random) -> None:
    for _ in range(5):
        d, _ = random_instance(rng, get_group("Z2"), max_vertices=4)
        edges = list(range(len(d.graph.edges)))
        report = ev_annihilator_check(d, edges[: rng.randint(1, len(edges))])
        assert report["equal"]
        assert report["corollary_holds"]
        assert report["hom_dim"] == report["annihilator_dim"] + report["ev_rank"]


def test_loop_derivative_has_rank_r() -> None:
    d = discrete_derivative(loop_graph(), 2)
    assert rank(d.matrix()) == 2
