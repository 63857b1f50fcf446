"""Finite groups, real representations and the built-in catalogs."""
import pytest

from eqbn.catalogs import BUILTIN_GROUPS, get_catalog, get_group, permutation_rep_of, subgroups
from eqbn.exact_linalg import Matrix
from eqbn.rep_theory import (
    FiniteGroup,
    IrreducibleCatalog,
    NotIrreducible,
    Representation,
    certify_irreducible,
    coset_multiplicity_via_fixed_vectors,
    direct_sum,
    division_type,
    dual,
    fixed_subspace,
    inflate,
    intertwiner_basis,
    is_normal,
    multiplicities,
    normal_core,
    quotient_by_normal,
    regular_rep,
    tensor,
)


@pytest.mark.parametrize("name", BUILTIN_GROUPS)
def test_builtin_catalogs_verify(name: str) -> None:
    """Types, Schur orthogonality and Σ deg²/k = |G| for every built-in group."""
    catalog = get_catalog(name)
    catalog.verify()
    assert catalog.plancherel_sum() == catalog.group.order


def test_division_types() -> None:
    assert get_catalog("Q8").division_types == ("R", "R", "R", "R", "H")
    assert get_catalog("Z3").division_types == ("R", "C")
    assert get_catalog("Z6").names == ("trivial", "sign", "rot1", "rot2")
    standard = get_catalog("S3").irreps[2]
    assert division_type(standard) == "R"


@pytest.mark.parametrize(
    "name, expected",
    [("S3", [1, 1, 2]), ("Q8", [1, 1, 1, 1, 1]), ("Z4", [1, 1, 1]), ("D4", [1, 1, 1, 1, 2])],
)
def test_regular_representation_multiplicities(name: str, expected: list) -> None:
    """The regular representation contains V_α exactly deg(V_α)/k_α times."""
    catalog = get_catalog(name)
    assert multiplicities(regular_rep(catalog.group), catalog) == expected


def test_coset_representation_of_s3() -> None:
    catalog = get_catalog("S3")
    transposition = subgroups("S3")["gen0"]
    perm = permutation_rep_of("S3", transposition)
    assert perm.degree == 3
    assert multiplicities(perm, catalog) == [1, 0, 1]
    for irrep, k, expected in zip(catalog.irreps, catalog.k, [1, 0, 1]):
        assert coset_multiplicity_via_fixed_vectors(irrep, k, transposition) == expected


def test_reducible_representations_are_rejected() -> None:
    with pytest.raises(NotIrreducible):
        certify_irreducible(regular_rep(get_group("Z2")))
    with pytest.raises(NotIrreducible):
        certify_irreducible(regular_rep(get_group("S3")))


def test_quaternion_irrep_is_quaternionic() -> None:
    quaternion = get_catalog("Q8").irreps[4]
    assert certify_irreducible(quaternion) == 4
    assert len(intertwiner_basis(quaternion, quaternion)) == 4


def test_normal_subgroups_and_quotients() -> None:
    s3 = get_group("S3")
    rotations = subgroups("S3")["gen1"]
    transposition = subgroups("S3")["gen0"]
    assert len(rotations) == 3
    assert is_normal(s3, rotations)
    assert not is_normal(s3, transposition)
    assert normal_core(s3, transposition) == [s3.identity]
    quotient, projection = quotient_by_normal(s3, rotations)
    assert quotient.order == 2
    sign_of_quotient = Representation(quotient, 1, (Matrix([[1]]), Matrix([[-1]])), "sign")
    inflated = inflate(sign_of_quotient, s3, projection)
    assert len(intertwiner_basis(inflated, get_catalog("S3").irreps[1])) == 1
    with pytest.raises(ValueError):
        quotient_by_normal(s3, transposition)


def test_tensor_dual_and_sum() -> None:
    catalog = get_catalog("S3")
    trivial, sign, standard = catalog.irreps
    assert multiplicities(tensor(standard, standard), catalog) == [1, 1, 1]
    assert len(intertwiner_basis(dual(standard), standard)) == 1
    assert multiplicities(direct_sum(sign, standard, sign), catalog) == [0, 2, 1]
    assert len(fixed_subspace(regular_rep(catalog.group))) == 1
    assert len(fixed_subspace(standard)) == 0


def test_incomplete_catalog_is_rejected() -> None:
    full = get_catalog("S3")
    partial = IrreducibleCatalog(full.group, full.irreps[:1], full.k[:1])
    assert not partial.is_complete()
    with pytest.raises(ValueError):
        multiplicities(regular_rep(full.group), partial)
    with pytest.raises(ValueError):
        partial.verify()


def test_group_and_representation_validation() -> None:
    with pytest.raises(ValueError):
        FiniteGroup.from_table([[0, 1], [0, 1]])
    z2 = get_group("Z2")
    with pytest.raises(ValueError):
        Representation(z2, 1, (Matrix([[1]]), Matrix([[2]])))
    table_group = FiniteGroup.from_table([[0, 1], [1, 0]])
    assert table_group.is_abelian()
    assert table_group.inv(1) == 1
