"""Rank certificates for the Cauchy–Riemann symbol in the complex model ℂ[z, z̄].

Everything is rank 1: the rank-r symbol splits into r copies. A homogeneous
degree-d element of ker ϖ̂ is

    B = Σ_j b_j (z^j ⊗ z^{d−j} − iz^j ⊗ iz^{d−j}) + b'_j (iz^j ⊗ z^{d−j} + z^j ⊗ iz^{d−j})

with Σ b_j = Σ b'_j = 0. On anti-linear A = z^α z̄^β the operator L̂_B has the
single nonzero component

    Q_B(z^α z̄^β) = p_β z^α z̄^{β+d+1} + q_α z^{α+d+1} z̄^β.
"""
import hashlib
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import orjson

from eqbn.config import get_settings
from eqbn.exact_linalg import (
    Matrix,
    det,
    rank,
    rref,
    vectors_to_matrix,
)
from eqbn.jet_calculus import (
    cauchy_riemann,
    homogeneous_petri_matrix,
    petri_nullity,
    z_monomials,
    z_position,
)
from eqbn.scalars import GAUSSIAN, RATIONAL, GaussianRational, I, format_scalar

logger = logging.getLogger(__name__)

Monomial = Tuple[int, int]

LINEAR = "linear"
ANTILINEAR = "antilinear"


class ZPoly:
    """Σ c_{αβ} z^α z̄^β with Gaussian rational coefficients and degree ≤ ell."""

    __slots__ = ("ell", "terms")

    def __init__(self, terms: Optional[Dict[Monomial, Any]] = None, ell: Optional[int] = None) -> None:
        cleaned = {}
        for (alpha, beta), c in (terms or {}).items():
            if alpha < 0 or beta < 0:
                raise ValueError(f"Negative exponent in z^{alpha} z̄^{beta}")
            c = c if isinstance(c, GaussianRational) else GaussianRational(c, 0)
            if c:
                cleaned[(alpha, beta)] = c
        degree = max((a + b for a, b in cleaned), default=0)
        if ell is None:
            ell = degree
        elif degree > ell:
            raise ValueError(f"Degree {degree} exceeds the truncation {ell}")
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("ZPoly is immutable")

    @classmethod
    def monomial(cls, alpha: int, beta: int, c: Any = 1) -> "ZPoly":
        return cls({(alpha, beta): c})

    def __add__(self, other: "ZPoly") -> "ZPoly":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return ZPoly(terms, max(self.ell, other.ell))

    def __neg__(self) -> "ZPoly":
        return self.scale(-1)

    def __sub__(self, other: "ZPoly") -> "ZPoly":
        return self + (-other)

    def __mul__(self, other: "ZPoly") -> "ZPoly":
        terms: Dict[Monomial, Any] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                m = (a1 + a2, b1 + b2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return ZPoly(terms, self.ell + other.ell)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"ZPoly({self.terms!r})"

    def scale(self, c: Any) -> "ZPoly":
        return ZPoly({m: c * x for m, x in self.terms.items()}, self.ell)

    def conjugate(self) -> "ZPoly":
        return ZPoly({(b, a): c.conjugate() for (a, b), c in self.terms.items()}, self.ell)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: int, beta: int) -> GaussianRational:
        return self.terms.get((alpha, beta), GaussianRational(0, 0))

    def right_inverse(self) -> "ZPoly":
        """R̂(z^α z̄^β) = z^α z̄^{β+1}/(β+1)."""
        return ZPoly(
            {(a, b + 1): c * Fraction(1, b + 1) for (a, b), c in self.terms.items()},
            self.ell + 1,
        )

    def dbar(self) -> "ZPoly":
        return ZPoly(
            {(a, b - 1): c * b for (a, b), c in self.terms.items() if b}, self.ell
        )

    def vector(self, ell: int) -> Tuple[GaussianRational, ...]:
        out = [GaussianRational(0, 0)] * len(z_monomials(ell))
        for (a, b), c in self.terms.items():
            if a + b > ell:
                raise ValueError(f"z^{a} z̄^{b} lies beyond the truncation {ell}")
            out[z_position(a, b)] = c
        return tuple(out)


@dataclass(frozen=True)
class PetriKernelElement:
    d: int
    b: Tuple[Fraction, ...]
    bp: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.b) != self.d + 1 or len(self.bp) != self.d + 1:
            raise ValueError(f"b and b' need {self.d + 1} entries")
        object.__setattr__(self, "b", tuple(Fraction(x) for x in self.b))
        object.__setattr__(self, "bp", tuple(Fraction(x) for x in self.bp))
        if sum(self.b) != 0 or sum(self.bp) != 0:
            raise ValueError("Entries of b and of b' must each sum to zero")

    @property
    def is_zero(self) -> bool:
        return not any(self.b) and not any(self.bp)

    def reversed(self) -> "PetriKernelElement":
        return PetriKernelElement(self.d, self.b[::-1], self.bp[::-1])

    def tensor_terms(self) -> List[Tuple[Fraction, ZPoly, ZPoly]]:
        """B as a real combination of simple tensors p ⊗ q."""
        terms = []
        d = self.d
        for j in range(d + 1):
            zj = ZPoly.monomial(j, 0)
            zdj = ZPoly.monomial(d - j, 0)
            izj = zj.scale(I)
            izdj = zdj.scale(I)
            if self.b[j]:
                terms.append((self.b[j], zj, zdj))
                terms.append((-self.b[j], izj, izdj))
            if self.bp[j]:
                terms.append((self.bp[j], izj, zdj))
                terms.append((self.bp[j], zj, izdj))
        return terms


@dataclass(frozen=True)
class QCoefficients:
    d: int
    p: Tuple[GaussianRational, ...]
    q: Tuple[GaussianRational, ...]


def _check_nonzero(b: PetriKernelElement) -> None:
    if b.is_zero:
        raise ValueError("B = 0 carries no rank information")


def _check_ell(b: PetriKernelElement, ell: int) -> None:
    if ell < b.d:
        raise ValueError(f"Truncation {ell} is below the degree {b.d}")


def petri_components(p: ZPoly, q: ZPoly) -> Tuple[ZPoly, ZPoly]:
    """(ϖ̂₁, ϖ̂₂)(p ⊗ q) = (pq, p q̄)."""
    return p * q, p * q.conjugate()


def evaluate_petri(b: PetriKernelElement) -> Tuple[ZPoly, ZPoly]:
    first, second = ZPoly(), ZPoly()
    for c, p, q in b.tensor_terms():
        w1, w2 = petri_components(p, q)
        first = first + w1.scale(c)
        second = second + w2.scale(c)
    return first, second


def _act(kind: str, f: ZPoly, p: ZPoly) -> ZPoly:
    return f * p if kind == LINEAR else f * p.conjugate()


def l_operator(b: PetriKernelElement, kind: str, f: ZPoly) -> Tuple[ZPoly, ZPoly]:
    """L̂_B(A) = ϖ̂((R̂A ⊗ 1 + 1 ⊗ R̂†A†)B) with R̂† = −R̂.

    A is multiplication by f (linear) or μ ↦ f·μ̄ (anti-linear); in both cases
    A† has coefficient f̄ and the same type.
    """
    first, second = ZPoly(), ZPoly()
    f_dagger = f.conjugate()
    for c, p, q in b.tensor_terms():
        left = petri_components(_act(kind, f, p).right_inverse(), q)
        right = petri_components(p, -_act(kind, f_dagger, q).right_inverse())
        first = first + (left[0] + right[0]).scale(c)
        second = second + (left[1] + right[1]).scale(c)
    return first, second


# PUBLIC API


def cr_kernel_basis(d: int) -> List[PetriKernelElement]:
    """Consecutive differences in b, then in b': 2d elements."""
    out = []
    zeros = [0] * (d + 1)
    for part in ("b", "bp"):
        for j in range(d):
            v = list(zeros)
            v[j], v[j + 1] = 1, -1
            if part == "b":
                out.append(PetriKernelElement(d, tuple(v), tuple(zeros)))
            else:
                out.append(PetriKernelElement(d, tuple(zeros), tuple(v)))
    return out


def cr_kernel_check(d: int) -> Dict[str, Any]:
    """Parametrized kernel against the brute-force nullspace of the real Petri map."""
    basis = cr_kernel_basis(d)
    annihilated = all(
        first.is_zero() and second.is_zero()
        for first, second in (evaluate_petri(e) for e in basis)
    )
    coords = [list(e.b) + list(e.bp) for e in basis]
    independent = not coords or rank(vectors_to_matrix(coords, 2 * d + 2, RATIONAL)) == len(coords)
    brute = petri_nullity(homogeneous_petri_matrix(cauchy_riemann(), d))
    return {
        "d": d,
        "parametrized_dim": len(basis),
        "brute_force_dim": brute,
        "annihilated": annihilated,
        "independent": independent,
        "agrees": annihilated and independent and brute == len(basis),
    }


def random_kernel_element(d: int, rng: random.Random, spread: int = 3) -> PetriKernelElement:
    if d < 1:
        raise ValueError("Nonzero kernel elements need degree d >= 1")
    while True:
        b = [rng.randint(-spread, spread) for _ in range(d)]
        bp = [rng.randint(-spread, spread) for _ in range(d)]
        element = PetriKernelElement(d, tuple(b + [-sum(b)]), tuple(bp + [-sum(bp)]))
        if not element.is_zero:
            return element


def p_coefficient(b: PetriKernelElement, beta: int) -> GaussianRational:
    """p_β = Σ_j 2(b_j − i b'_j)/(β + j + 1)."""
    total = GaussianRational(0, 0)
    for j in range(b.d + 1):
        total = total + GaussianRational(2 * b.b[j], -2 * b.bp[j]) * Fraction(1, beta + j + 1)
    return total


def q_coefficient(b: PetriKernelElement, alpha: int) -> GaussianRational:
    """q_α = −Σ_j 2(b_j + i b'_j)/(α + d − j + 1)."""
    total = GaussianRational(0, 0)
    for j in range(b.d + 1):
        total = total - GaussianRational(2 * b.b[j], 2 * b.bp[j]) * Fraction(1, alpha + b.d - j + 1)
    return total


def q_coefficients(b: PetriKernelElement, ell: int) -> QCoefficients:
    return QCoefficients(
        b.d,
        tuple(p_coefficient(b, beta) for beta in range(ell + 1)),
        tuple(q_coefficient(b, alpha) for alpha in range(ell + 1)),
    )


def conjugate_symmetry_holds(b: PetriKernelElement, ell: int) -> bool:
    """q_α(b, b') = −conj(p_α(rev b, rev b')) for α ≤ ell."""
    rev = b.reversed()
    return all(
        q_coefficient(b, a) == -p_coefficient(rev, a).conjugate() for a in range(ell + 1)
    )


def q_matrix(b: PetriKernelElement, ell: int) -> Matrix:
    """Q_B from ℂ[z, z̄]^{≤ℓ} to ℂ[z, z̄]^{≤ℓ+d+1} over ℚ[i]."""
    _check_ell(b, ell)
    shift = b.d + 1
    domain = z_monomials(ell)
    size = len(z_monomials(ell + shift))
    coeffs = q_coefficients(b, ell)
    rows = [[GaussianRational(0, 0)] * len(domain) for _ in range(size)]
    for col, (alpha, beta) in enumerate(domain):
        rows[z_position(alpha, beta + shift)][col] = coeffs.p[beta]
        rows[z_position(alpha + shift, beta)][col] = coeffs.q[alpha]
    return Matrix(rows, GAUSSIAN, len(domain))


def chains(ell: int, d: int) -> Iterator[List[Monomial]]:
    """Domain monomials grouped along (−(d+1), +(d+1)), each from its largest α.

    Q_B couples z^α z̄^β only to its neighbours in the same chain, so these
    chains index the connected blocks of the matrix of Q_B.
    """
    step = d + 1
    for total in range(ell + 1):
        for alpha in range(total, max(total - step, -1), -1):
            chain = []
            a = alpha
            while a >= 0:
                chain.append((a, total - a))
                a -= step
            yield chain


def _chain_matrix(coeffs: QCoefficients, chain: Sequence[Monomial]) -> Matrix:
    shift = coeffs.d + 1
    outputs: Dict[Monomial, int] = {}
    entries: List[Tuple[int, int, GaussianRational]] = []
    for col, (alpha, beta) in enumerate(chain):
        for target, value in (
            ((alpha, beta + shift), coeffs.p[beta]),
            ((alpha + shift, beta), coeffs.q[alpha]),
        ):
            row = outputs.setdefault(target, len(outputs))
            if value:
                entries.append((row, col, value))
    rows = [[GaussianRational(0, 0)] * len(chain) for _ in range(len(outputs))]
    for row, col, value in entries:
        rows[row][col] = rows[row][col] + value
    return Matrix(rows, GAUSSIAN, len(chain))


def q_rank(b: PetriKernelElement, ell: int) -> Tuple[int, List[Matrix], List[List[Monomial]]]:
    """Complex rank of Q_B^{≤ℓ}, summed over chains, with the pivot monomials."""
    _check_ell(b, ell)
    coeffs = q_coefficients(b, ell)
    total = 0
    matrices = []
    pivots = []
    for chain in chains(ell, b.d):
        m = _chain_matrix(coeffs, chain)
        _, cols = rref(m)
        total += len(cols)
        matrices.append(m)
        pivots.append([chain[c] for c in cols])
    return total, matrices, pivots


def _matrices_hash(matrices: Sequence[Matrix]) -> str:
    payload = [[[format_scalar(x) for x in row] for row in m.to_lists()] for m in matrices]
    return hashlib.sha256(orjson.dumps(payload)).hexdigest()


def rank_threshold(ell: int) -> int:
    return ceil(get_settings().wendl_rank_constant * ell * ell)


def certify_rank_bound(b: PetriKernelElement, ell: int) -> Dict[str, Any]:
    """Exact rank of Q_B^{≤ℓ} against ⌈c·ℓ²⌉ (c = 1/16 by default)."""
    _check_nonzero(b)
    settings = get_settings()
    if ell < settings.wendl_ell_factor * b.d:
        raise ValueError(
            f"Certification needs ell >= {settings.wendl_ell_factor}·d = "
            f"{settings.wendl_ell_factor * b.d}"
        )
    rk, matrices, pivots = q_rank(b, ell)
    threshold = rank_threshold(ell)
    if rk < threshold:
        logger.warning("rank %d below threshold %d for d=%d, ell=%d", rk, threshold, b.d, ell)
    s_report = s_star_lower_bound(b, ell)
    return {
        "d": b.d,
        "b": [str(x) for x in b.b],
        "bp": [str(x) for x in b.bp],
        "ell": ell,
        "rank": rk,
        "threshold": threshold,
        "pass": rk >= threshold,
        "measured_constant": Fraction(rk, ell * ell) if ell else None,
        "sharp_S": s_report["sharp_S"],
        "s_star": s_report["s_star"],
        "matrix_hash": _matrices_hash(matrices),
        "pivots": [[list(m) for m in chain] for chain in pivots if chain],
        "codomain_truncation": ell + b.d + 1,
    }


def s_set(b: PetriKernelElement, ell: int) -> List[Monomial]:
    """S = {(α, β) : α + β + d ≤ ℓ, (p_β, q_α) ≠ (0, 0)}."""
    coeffs = q_coefficients(b, ell)
    return [
        (alpha, beta)
        for alpha, beta in z_monomials(ell - b.d)
        if coeffs.p[beta] or coeffs.q[alpha]
    ]


def s_star(b: PetriKernelElement, ell: int) -> List[Monomial]:
    """Alternate elements of each run of S along a chain, from the largest α."""
    members = set(s_set(b, ell))
    chosen = []
    for chain in chains(ell, b.d):
        run: List[Monomial] = []
        for m in chain + [None]:
            if m is not None and m in members:
                run.append(m)
                continue
            chosen.extend(run[::2])
            run = []
    return sorted(chosen, key=lambda m: z_position(*m))


def s_star_lower_bound(b: PetriKernelElement, ell: int) -> Dict[str, Any]:
    _check_ell(b, ell)
    s = s_set(b, ell)
    star = s_star(b, ell)
    coeffs = q_coefficients(b, ell)
    shift = b.d + 1
    columns = []
    size = len(z_monomials(ell + shift))
    for alpha, beta in star:
        column = [GaussianRational(0, 0)] * size
        column[z_position(alpha, beta + shift)] = coeffs.p[beta]
        column[z_position(alpha + shift, beta)] = coeffs.q[alpha]
        columns.append(column)
    restricted_rank = rank(vectors_to_matrix(columns, size, GAUSSIAN)) if columns else 0
    n = ell - b.d
    counting_bound = Fraction(n * n, 4) - n * b.d
    full_rank = q_rank(b, ell)[0]
    return {
        "sharp_S": len(s),
        "s_star": len(star),
        "half_S": (len(s) + 1) // 2,
        "s_star_is_half": len(star) >= (len(s) + 1) // 2,
        "restriction_injective": restricted_rank == len(star),
        "rank": full_rank,
        "chain_holds": (len(s) + 1) // 2 <= full_rank,
        "counting_bound": counting_bound,
        "counting_bound_holds": len(s) >= counting_bound,
        "all_pairs": comb(n + 2, 2) if n >= 0 else 0,
    }


def cauchy_determinant(betas: Sequence[int]) -> Fraction:
    """det [1/(β_i + j + 1)] by the Cauchy product formula."""
    size = len(betas)
    num = Fraction(1)
    for i in range(size):
        for j in range(i + 1, size):
            num *= (betas[j] - betas[i]) * (j - i)
    den = Fraction(1)
    for beta in betas:
        for j in range(size):
            den *= beta + j + 1
    return num / den


def cauchy_matrix(betas: Sequence[int]) -> Matrix:
    size = len(betas)
    return Matrix(
        [[Fraction(1, beta + j + 1) for j in range(size)] for beta in betas], RATIONAL, size
    )


def cauchy_vanishing_bound(b: PetriKernelElement, window: Optional[int] = None) -> Dict[str, Any]:
    """At most d of the p_β (and of the q_α) vanish for B ≠ 0, checked on a window.

    Only the indices 0, 1, ..., window are examined (window defaults to
    4(d + 1)), so ``vanishing_p``, ``vanishing_q`` and ``bound_holds_in_window``
    describe that range and say nothing about larger indices. The statement
    for every index rests on the Cauchy matrix: any d + 1 distinct β give an
    invertible C, and p_β = 0 on them would force C·(b − i b') = 0. The report
    carries det C on d + 1 indices (vanishing ones first), computed by the
    product formula and by elimination.
    """
    _check_nonzero(b)
    window = window if window is not None else 4 * (b.d + 1)
    if window < 0:
        raise ValueError(f"window must be non-negative, got {window}")
    vanishing_p = [beta for beta in range(window + 1) if not p_coefficient(b, beta)]
    vanishing_q = [alpha for alpha in range(window + 1) if not q_coefficient(b, alpha)]
    betas = (vanishing_p + [x for x in range(window + 1) if x not in vanishing_p])[: b.d + 1]
    if len(betas) < b.d + 1:
        betas += list(range(window + 1, window + 1 + b.d + 1 - len(betas)))
    product = cauchy_determinant(betas)
    eliminated = det(cauchy_matrix(betas))
    return {
        "d": b.d,
        "window": window,
        "indices_checked": window + 1,
        "vanishing_p": vanishing_p,
        "vanishing_q": vanishing_q,
        "nonzero_p": window + 1 - len(vanishing_p),
        "nonzero_q": window + 1 - len(vanishing_q),
        "betas": betas,
        "cauchy_det": product,
        "cauchy_det_elimination": eliminated,
        "determinants_agree": product == eliminated,
        "bound_holds_in_window": len(vanishing_p) <= b.d and len(vanishing_q) <= b.d,
        "cauchy_invertible": product != 0,
    }


def full_l_operator_check(b: PetriKernelElement, ell: int) -> Dict[str, Any]:
    """Assemble the four blocks of L̂_B^{≤ℓ} and compare the Q block with q_matrix."""
    _check_ell(b, ell)
    out_ell = ell + b.d + 1
    domain = z_monomials(ell)
    size = len(z_monomials(out_ell))
    blocks: Dict[Tuple[str, int], List[Tuple[GaussianRational, ...]]] = {
        (kind, component): [] for kind in (LINEAR, ANTILINEAR) for component in (1, 2)
    }
    real_columns = []
    for kind in (LINEAR, ANTILINEAR):
        for alpha, beta in domain:
            for scalar in (GaussianRational(1, 0), I):
                first, second = l_operator(b, kind, ZPoly.monomial(alpha, beta, scalar))
                v1, v2 = first.vector(out_ell), second.vector(out_ell)
                if scalar == 1:
                    blocks[(kind, 1)].append(v1)
                    blocks[(kind, 2)].append(v2)
                real_columns.append([c for x in v1 + v2 for c in (x.re, x.im)])
    matrices = {
        key: vectors_to_matrix(cols, size, GAUSSIAN) for key, cols in blocks.items()
    }
    q = q_matrix(b, ell)
    vanishing = all(
        matrices[key].is_zero() for key in ((LINEAR, 1), (LINEAR, 2), (ANTILINEAR, 1))
    )
    q_rank_value = q_rank(b, ell)[0]
    real_rank = rank(vectors_to_matrix(real_columns, 4 * size, RATIONAL))
    return {
        "other_blocks_vanish": vanishing,
        "q_block_matches": matrices[(ANTILINEAR, 2)] == q,
        "q_rank": q_rank_value,
        "real_rank": real_rank,
        "rank_dominates": real_rank >= 2 * q_rank_value,
    }

