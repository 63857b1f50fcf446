"""Rank certificates for the Cauchy–Riemann Petri kernel."""
import random
from fractions import Fraction

import pytest

from eqbn.config import get_settings
from eqbn.exact_linalg import rank
from eqbn.jet_calculus import z_monomials
from eqbn.scalars import GaussianRational
from eqbn.wendl_certifier import (
    ANTILINEAR,
    PetriKernelElement,
    ZPoly,
    cauchy_determinant,
    cauchy_matrix,
    cauchy_vanishing_bound,
    certify_rank_bound,
    conjugate_symmetry_holds,
    cr_kernel_basis,
    cr_kernel_check,
    evaluate_petri,
    full_l_operator_check,
    l_operator,
    p_coefficient,
    q_coefficient,
    q_matrix,
    q_rank,
    random_kernel_element,
    rank_threshold,
    s_star_lower_bound,
)

SIMPLE = PetriKernelElement(1, (1, -1), (0, 0))


def test_element_validation() -> None:
    with pytest.raises(ValueError):
        PetriKernelElement(1, (1, 1), (0, 0))
    with pytest.raises(ValueError):
        PetriKernelElement(2, (1, -1), (0, 0))
    assert PetriKernelElement(1, (0, 0), (0, 0)).is_zero


@pytest.mark.parametrize("d", [1, 2, 3])
def test_parametrized_kernel_matches_brute_force(d: int) -> None:
    assert len(cr_kernel_basis(d)) == 2 * d
    report = cr_kernel_check(d)
    assert report["agrees"], report


def test_basis_elements_are_annihilated() -> None:
    for element in cr_kernel_basis(2):
        first, second = evaluate_petri(element)
        assert first.is_zero() and second.is_zero()


def test_coefficients_of_simple_element() -> None:
    # p_β = q_β = 2 / ((β + 1)(β + 2)) for b = (1, −1), b' = 0.
    assert p_coefficient(SIMPLE, 0) == GaussianRational(1, 0)
    assert q_coefficient(SIMPLE, 0) == GaussianRational(1, 0)
    assert p_coefficient(SIMPLE, 2) == GaussianRational(Fraction(1, 6), 0)
    assert conjugate_symmetry_holds(SIMPLE, 6)


def test_l_operator_on_constant() -> None:
    """Only the anti-linear second component survives: Q_B(1) = z̄² + z²."""
    first, second = l_operator(SIMPLE, ANTILINEAR, ZPoly.monomial(0, 0))
    assert first.is_zero()
    assert second == ZPoly({(0, 2): 1, (2, 0): 1})


def test_q_matrix_and_chain_rank() -> None:
    m = q_matrix(SIMPLE, 4)
    assert m.shape == (len(z_monomials(6)), len(z_monomials(4)))
    rk, _, _ = q_rank(SIMPLE, 4)
    assert rk == rank(m) == m.cols


def test_certify_simple_element() -> None:
    report = certify_rank_bound(SIMPLE, 8)
    assert report["threshold"] == 4
    assert report["rank"] == 45
    assert report["pass"]
    assert report["codomain_truncation"] == 10
    assert len(report["matrix_hash"]) == 64


def test_certify_rejects_bad_input() -> None:
    with pytest.raises(ValueError):
        certify_rank_bound(SIMPLE, 7)
    with pytest.raises(ValueError):
        certify_rank_bound(PetriKernelElement(1, (0, 0), (0, 0)), 8)


def test_rank_constant_comes_from_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    assert rank_threshold(8) == 4
    monkeypatch.setenv("EQBN_WENDL_RANK_CONSTANT", "1/2")
    get_settings.cache_clear()
    assert rank_threshold(8) == 32


def test_certify_random_elements() -> None:
    rng = random.Random("wendl")
    for d in (1, 2):
        b = random_kernel_element(d, rng)
        report = certify_rank_bound(b, 8 * d)
        assert report["pass"], report


def test_random_kernel_element_needs_positive_degree() -> None:
    with pytest.raises(ValueError):
        random_kernel_element(0, random.Random(0))


def test_s_star_chain() -> None:
    report = s_star_lower_bound(SIMPLE, 8)
    assert report["sharp_S"] == len(z_monomials(7))
    assert report["s_star_is_half"]
    assert report["restriction_injective"]
    assert report["chain_holds"]
    assert report["counting_bound"] == Fraction(21, 4)
    assert report["counting_bound_holds"]


def test_cauchy_determinant() -> None:
    assert cauchy_determinant([0, 1]) == Fraction(1, 12)
    betas = [0, 2, 5]
    assert cauchy_determinant(betas) == cauchy_matrix(betas).det()


def test_vanishing_p_coefficient() -> None:
    """b = (1, −4, 3) is chosen so that p_0 = 0."""
    b = PetriKernelElement(2, (1, -4, 3), (0, 0, 0))
    assert not p_coefficient(b, 0)
    report = cauchy_vanishing_bound(b)
    assert 0 in report["vanishing_p"]
    assert report["bound_holds_in_window"] and report["cauchy_invertible"]
    assert report["determinants_agree"]


def test_simple_element_never_vanishes() -> None:
    report = cauchy_vanishing_bound(SIMPLE, window=10)
    assert report["vanishing_p"] == [] and report["vanishing_q"] == []
    assert report["nonzero_p"] == 11


def test_vanishing_window_is_reported() -> None:
    report = cauchy_vanishing_bound(SIMPLE)
    assert report["window"] == 4 * (SIMPLE.d + 1)
    assert report["indices_checked"] == report["window"] + 1
    short = cauchy_vanishing_bound(SIMPLE, window=0)
    assert short["indices_checked"] == 1
    assert len(short["betas"]) == SIMPLE.d + 1
    assert short["determinants_agree"]
    with pytest.raises(ValueError):
        cauchy_vanishing_bound(SIMPLE, window=-1)


def test_full_l_operator_blocks() -> None:
    report = full_l_operator_check(SIMPLE, 1)
    assert report["other_blocks_vanish"]
    assert report["q_block_matches"]
    assert report["rank_dominates"]
