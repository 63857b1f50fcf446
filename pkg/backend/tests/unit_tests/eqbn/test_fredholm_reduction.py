"""Schur reduction near a reference operator and the codimension ledger."""
import random
from fractions import Fraction

import pytest

from eqbn.exact_linalg import DimensionMismatch, Matrix, rank
from eqbn.fredholm_reduction import (
    OutsideReductionNeighborhood,
    adjacent_equivariant_strata,
    adjacent_strata,
    complex_fredholm_codim,
    default_split,
    equivariant_codim,
    fredholm_codim,
    local_system_strata,
    ls_derivative,
    ls_derivative_check,
    ls_reduce,
    random_reduction_instance,
    rank_lower_bound,
    selfadjoint_codim,
    stratum_codim,
    symmetric_split,
    twist_stratum_feasible,
    verify_witnesses,
)
from eqbn.scalars import GAUSSIAN, RATIONAL

PROJECTION = Matrix([[1, 0], [0, 0]])


def test_schur_complement_of_a_small_operator() -> None:
    split = default_split(PROJECTION)
    assert split.dim_kernel == 1
    assert split.dim_cokernel == 1
    reduction = ls_reduce(split, Matrix([[2, 1], [1, 3]]))
    assert reduction.s_matrix == Matrix([[Fraction(5, 2)]])
    assert reduction.dim_kernel == 0
    assert verify_witnesses(Matrix([[2, 1], [1, 3]]), reduction)


def test_kernel_lift_spans_the_kernel() -> None:
    t = Matrix([[1, 2], [3, 6]])
    reduction = ls_reduce(default_split(PROJECTION), t)
    assert reduction.s_matrix == Matrix([[0]])
    assert (reduction.dim_kernel, reduction.dim_cokernel) == (1, 1)
    assert len(reduction.kernel_lift) == 1
    assert not any(t.apply(reduction.kernel_lift[0]))


def test_singular_top_block_is_outside_the_chart() -> None:
    with pytest.raises(OutsideReductionNeighborhood):
        ls_reduce(default_split(PROJECTION), Matrix([[0, 1], [1, 0]]))


def test_adapted_checks_shape() -> None:
    with pytest.raises(DimensionMismatch):
        default_split(PROJECTION).adapted(Matrix.identity(3))


@pytest.mark.parametrize("kind", [RATIONAL, GAUSSIAN])
def test_reduction_preserves_kernel_and_cokernel(rng: random.Random, kind: str) -> None:
    for _ in range(30):
        split, t, _ = random_reduction_instance(rng, kind, max_dim=4)
        reduction = ls_reduce(split, t)
        r = rank(t)
        assert reduction.dim_kernel == t.cols - r
        assert reduction.dim_cokernel == t.rows - r
        assert len(reduction.kernel_lift) == t.cols - r
        assert verify_witnesses(t, reduction)


def test_derivative_is_the_compression() -> None:
    split = default_split(PROJECTION)
    lhat = Matrix([[1, 2], [3, 4]])
    assert ls_derivative(split, lhat) == Matrix([[4]])
    assert ls_derivative_check(split, lhat, [Fraction(1), Fraction(1, 2), Fraction(-1, 3)])
    with pytest.raises(ValueError):
        ls_derivative_check(split, lhat, [0])


def test_symmetric_split_keeps_operators_self_adjoint() -> None:
    split = symmetric_split(Matrix([[1, 1], [1, 1]]))
    adapted = split.adapted(Matrix([[2, 1], [1, 3]]))
    assert adapted == adapted.conjugate_transpose()
    with pytest.raises(ValueError):
        symmetric_split(Matrix([[0, 1], [0, 0]]))


def test_codimension_formulas() -> None:
    assert stratum_codim(3, 4, 1) == 6
    assert fredholm_codim(2, 3) == 6
    assert complex_fredholm_codim(2, 3) == 12
    assert equivariant_codim([1, 2, 4], [1, 1, 1], [2, 1, 0]) == 4
    assert selfadjoint_codim([1, 2, 4], [2, 2, 3]) == 22
    assert rank_lower_bound(1, 2, 3) == 3


def test_codimension_inputs_are_validated() -> None:
    with pytest.raises(ValueError):
        stratum_codim(2, 2, 3)
    with pytest.raises(ValueError):
        equivariant_codim([3], [1], [1])
    with pytest.raises(ValueError):
        fredholm_codim(-1, 0)


def test_adjacent_strata() -> None:
    assert adjacent_strata(2, 3) == [(2, 3), (1, 2), (0, 1)]
    assert list(adjacent_equivariant_strata([1, 0], [1, 2])) == [
        ((1, 0), (1, 2)),
        ((0, 0), (0, 2)),
    ]


def test_local_system_strata_and_feasibility() -> None:
    assert local_system_strata([1, 1], [1, 2], 2, 0) == [
        ((0, 1), (0, 0)),
        ((2, 0), (0, 0)),
    ]
    assert twist_stratum_feasible([1, -1], [1, 0], [0, 1])
    assert not twist_stratum_feasible([1], [2], [0])
