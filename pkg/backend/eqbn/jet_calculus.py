"""Truncated polynomial jets and formal differential operators from symbols.

Polynomials in n real variables with values in ℝ^r are stored in the basis
x^α ⊗ f_a, ordered by total degree, then by descending lexicographic order of
α, then by fiber index a. A constant-coefficient symbol σ = Σ_{|I|=k} σ_I ξ^I
defines σ̂ = Σ σ_I ∂^I, which maps degree-(d+k) polynomials onto degree d.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb, factorial
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from eqbn.config import get_settings
from eqbn.exact_linalg import (
    Matrix,
    Vector,
    hstack,
    is_invertible,
    nullspace_basis,
    rank,
    rref,
    same_column_span,
    vectors_to_matrix,
)
from eqbn.scalars import GAUSSIAN, QUATERNION, RATIONAL, Quaternion, regular_matrix

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


class NotElliptic(ValueError):
    """The symbol σ(ξ) is singular for some nonzero covector ξ."""


def multi_indices(n: int, degree: int) -> List[MultiIndex]:
    """All α ∈ ℕⁿ with |α| = degree, in descending lexicographic order."""
    if n == 0:
        return [()] if degree == 0 else []
    if n == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        out.extend((first,) + rest for rest in multi_indices(n - 1, degree - first))
    return out


def derivative_coefficient(alpha: MultiIndex, index: MultiIndex) -> int:
    """c with ∂^I x^α = c·x^{α−I} (zero unless α ≥ I)."""
    c = 1
    for a, i in zip(alpha, index):
        if a < i:
            return 0
        c *= factorial(a) // factorial(a - i)
    return c


@dataclass(frozen=True)
class TruncatedPolySpace:
    """ℝ[x₁..xₙ]^{≤ℓ} ⊗ ℝ^r, or its homogeneous slice of degree ℓ."""

    n: int
    r: int
    ell: int
    homogeneous: bool = False

    @cached_property
    def monomials(self) -> List[MultiIndex]:
        degrees = [self.ell] if self.homogeneous else range(self.ell + 1)
        return [alpha for d in degrees for alpha in multi_indices(self.n, d)]

    @cached_property
    def positions(self) -> Dict[MultiIndex, int]:
        return {alpha: i for i, alpha in enumerate(self.monomials)}

    @property
    def dimension(self) -> int:
        return self.r * len(self.monomials)

    def index(self, alpha: MultiIndex, fiber: int) -> int:
        return self.positions[alpha] * self.r + fiber

    def basis_labels(self) -> List[Tuple[MultiIndex, int]]:
        return [(alpha, a) for alpha in self.monomials for a in range(self.r)]


@dataclass(frozen=True)
class Symbol:
    """Homogeneous order-k principal symbol with r_F × r_E coefficients."""

    n: int
    k: int
    r_e: int
    r_f: int
    coeffs: Tuple[Tuple[MultiIndex, Matrix], ...]
    name: str = ""

    def __post_init__(self) -> None:
        seen = set()
        for index, m in self.coeffs:
            if len(index) != self.n or sum(index) != self.k or min(index, default=0) < 0:
                raise ValueError(f"{index} is not a multi-index of degree {self.k} in {self.n} variables")
            if index in seen:
                raise ValueError(f"Duplicate coefficient for {index}")
            seen.add(index)
            if m.shape != (self.r_f, self.r_e):
                raise ValueError(f"σ_{index} must be {self.r_f}x{self.r_e}")
            if m.kind != RATIONAL:
                raise ValueError("Symbols have real rational coefficients")
        if all(m.is_zero() for _, m in self.coeffs):
            raise ValueError("Symbol has no nonzero coefficient")

    @classmethod
    def from_mapping(
        cls, n: int, k: int, coeffs: Mapping[MultiIndex, Matrix], name: str = ""
    ) -> "Symbol":
        first = next(iter(coeffs.values()))
        return cls(n, k, first.cols, first.rows, tuple(sorted(coeffs.items(), reverse=True)), name)

    def coefficient(self, index: MultiIndex) -> Matrix:
        for i, m in self.coeffs:
            if i == index:
                return m
        return Matrix.zeros(self.r_f, self.r_e)

    def at(self, xi: Sequence[Any]) -> Matrix:
        """σ(ξ) = Σ σ_I ξ^I."""
        total = Matrix.zeros(self.r_f, self.r_e)
        for index, m in self.coeffs:
            weight = Fraction(1)
            for x, e in zip(xi, index):
                weight *= Fraction(x) ** e
            if weight:
                total = total + m.scale(weight)
        return total


def _operator_between(s: Symbol, domain: TruncatedPolySpace, codomain: TruncatedPolySpace) -> Matrix:
    rows = [[0] * domain.dimension for _ in range(codomain.dimension)]
    for alpha in domain.monomials:
        for index, m in s.coeffs:
            c = derivative_coefficient(alpha, index)
            if not c:
                continue
            beta = tuple(a - i for a, i in zip(alpha, index))
            if beta not in codomain.positions:
                continue
            for f in range(s.r_e):
                col = domain.index(alpha, f)
                for g in range(s.r_f):
                    x = m[g, f]
                    if x:
                        rows[codomain.index(beta, g)][col] += c * x
    return Matrix(rows, RATIONAL, domain.dimension)


# PUBLIC API


def adjoint_symbol(s: Symbol) -> Symbol:
    """σ† = (−1)^k σᵀ, the symbol of the formal adjoint."""
    sign = -1 if s.k % 2 else 1
    return Symbol(
        s.n,
        s.k,
        s.r_f,
        s.r_e,
        tuple((index, m.transpose().scale(sign)) for index, m in s.coeffs),
        f"{s.name}†" if s.name else "",
    )


def formal_operator_matrix(s: Symbol, ell: int) -> Matrix:
    """σ̂ from the (k+ℓ)-truncation with values in E to the ℓ-truncation in F."""
    domain = TruncatedPolySpace(s.n, s.r_e, s.k + ell)
    codomain = TruncatedPolySpace(s.n, s.r_f, ell)
    return _operator_between(s, domain, codomain)


def homogeneous_operator_matrix(s: Symbol, degree: int) -> Matrix:
    """σ̂ from homogeneous degree ``degree`` to degree ``degree − k``."""
    domain = TruncatedPolySpace(s.n, s.r_e, degree, homogeneous=True)
    if degree < s.k:
        return Matrix([], RATIONAL, domain.dimension)
    codomain = TruncatedPolySpace(s.n, s.r_f, degree - s.k, homogeneous=True)
    return _operator_between(s, domain, codomain)


def homogeneous_kernel(s: Symbol, degree: int) -> List[Vector]:
    return nullspace_basis(homogeneous_operator_matrix(s, degree))


def jet_kernel_dimension(r: int, n: int, k: int, ell: int) -> int:
    """r·[C(n+k+ℓ, n) − C(n+ℓ, n)]."""
    return r * (comb(n + k + ell, n) - comb(n + ell, n))


def ellipticity_certificate(
    s: Symbol, rng: Optional[random.Random] = None, probes: Optional[int] = None
) -> Dict[str, Any]:
    """Check that σ(ξ) is invertible for ξ ≠ 0.

    n = 1 and n = 2 are decided exactly (for n = 2: det σ(1, 0) ≠ 0 and
    det σ(t, 1) has no real root). For n ≥ 3 the probe covectors eᵢ, eᵢ ± eⱼ
    and seeded random integer covectors are tried, so a pass is probabilistic.
    """
    if s.r_e != s.r_f:
        return {"elliptic": False, "method": "exact", "reason": "non-square symbol"}
    if s.n == 1:
        ok = is_invertible(s.at((1,)))
        return {"elliptic": ok, "method": "exact", "reason": "" if ok else "σ(1) singular"}
    if s.n == 2:
        return _ellipticity_plane(s)
    if probes is None:
        probes = get_settings().ellipticity_random_probes
    rng = rng or random.Random(0)
    candidates: List[Tuple[int, ...]] = []
    for i in range(s.n):
        e_i = [0] * s.n
        e_i[i] = 1
        candidates.append(tuple(e_i))
        for j in range(i + 1, s.n):
            for sign in (1, -1):
                v = list(e_i)
                v[j] = sign
                candidates.append(tuple(v))
    for _ in range(probes):
        v = tuple(rng.randint(-10, 10) for _ in range(s.n))
        if any(v):
            candidates.append(v)
    for xi in candidates:
        if not is_invertible(s.at(xi)):
            return {"elliptic": False, "method": "probabilistic", "reason": f"σ{xi} singular"}
    logger.warning(
        "ellipticity of %s certified on %d probe covectors only", s.name or "symbol", len(candidates)
    )
    return {"elliptic": True, "method": "probabilistic", "reason": "", "probes": len(candidates)}


def _ellipticity_plane(s: Symbol) -> Dict[str, Any]:
    if not is_invertible(s.at((1, 0))):
        return {"elliptic": False, "method": "exact", "reason": "σ(1, 0) singular"}
    t = sympy.Symbol("t", real=True)
    entries = [[sympy.Integer(0)] * s.r_e for _ in range(s.r_f)]
    for (a, b), m in s.coeffs:
        for i in range(s.r_f):
            for j in range(s.r_e):
                x = m[i, j]
                if x:
                    entries[i][j] += sympy.Rational(x.numerator, x.denominator) * t**a
    det = sympy.Poly(sympy.Matrix(entries).det(), t)
    real_roots = det.count_roots() if not det.is_zero else -1
    ok = real_roots == 0
    return {
        "elliptic": ok,
        "method": "exact",
        "reason": "" if ok else "det σ(t, 1) has a real root",
    }


def require_elliptic(
    s: Symbol,
    rng: Optional[random.Random] = None,
    certificate: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Raise NotElliptic unless σ is elliptic; an existing certificate is reused."""
    if certificate is None:
        certificate = ellipticity_certificate(s, rng)
    if not certificate["elliptic"]:
        raise NotElliptic(f"{s.name or 'symbol'} is not elliptic: {certificate['reason']}")
    return certificate


def jet_dimension_check(
    s: Symbol,
    ell: int,
    rng: Optional[random.Random] = None,
    certificate: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Surjectivity of the truncated σ̂ and the kernel-dimension formula."""
    certificate = require_elliptic(s, rng, certificate)
    m = formal_operator_matrix(s, ell)
    rk = rank(m)
    expected = jet_kernel_dimension(s.r_e, s.n, s.k, ell)
    kernel_dim = m.cols - rk
    return {
        "symbol": s.name,
        "ell": ell,
        "rows": m.rows,
        "cols": m.cols,
        "rank": rk,
        "surjective": rk == m.rows,
        "kernel_dim": kernel_dim,
        "expected_kernel_dim": expected,
        "formula_holds": kernel_dim == expected,
        "ellipticity": certificate,
    }


def right_inverse_matrix(s: Symbol, ell: int) -> Matrix:
    """R with σ̂·R = I on the ℓ-truncation, supported on the pivot columns."""
    m = formal_operator_matrix(s, ell)
    _, pivots = rref(m)
    if len(pivots) != m.rows:
        raise ValueError(f"Truncated operator is not surjective (rank {len(pivots)} < {m.rows})")
    local = m.submatrix(range(m.rows), pivots).inverse()
    rows = [[0] * m.rows for _ in range(m.cols)]
    for r, p in enumerate(pivots):
        rows[p] = list(local.row(r))
    return Matrix(rows, RATIONAL, m.rows)


def graded_kernel_check(s: Symbol, ell: int) -> Dict[str, Any]:
    """Compare ker of the truncated σ̂ with the sum of homogeneous kernels."""
    m = formal_operator_matrix(s, ell)
    truncated = nullspace_basis(m)
    space = TruncatedPolySpace(s.n, s.r_e, s.k + ell)
    graded: List[Vector] = []
    for degree in range(s.k + ell + 1):
        slice_space = TruncatedPolySpace(s.n, s.r_e, degree, homogeneous=True)
        for v in homogeneous_kernel(s, degree):
            full = [0] * space.dimension
            for (alpha, a), x in zip(slice_space.basis_labels(), v):
                full[space.index(alpha, a)] = x
            graded.append(tuple(full))
    equal = len(truncated) == len(graded) and (
        not graded
        or same_column_span(
            vectors_to_matrix(truncated, space.dimension, RATIONAL),
            vectors_to_matrix(graded, space.dimension, RATIONAL),
        )
    )
    if not equal:
        logger.warning("truncated kernel of %s differs from its graded kernel", s.name)
    return {"truncated_dim": len(truncated), "graded_dim": len(graded), "equal": equal}


def _petri_from_kernels(
    left: Sequence[Tuple[TruncatedPolySpace, Vector]],
    right: Sequence[Tuple[TruncatedPolySpace, Vector]],
    r_right: int,
    target: TruncatedPolySpace,
) -> Matrix:
    columns = []
    for lspace, p in left:
        lterms = [(alpha, a, x) for (alpha, a), x in zip(lspace.basis_labels(), p) if x]
        for rspace, q in right:
            column = [0] * target.dimension
            for alpha, a, x in lterms:
                for (beta, b), y in zip(rspace.basis_labels(), q):
                    if y:
                        gamma = tuple(i + j for i, j in zip(alpha, beta))
                        column[target.index(gamma, a * r_right + b)] += x * y
            columns.append(column)
    return vectors_to_matrix(columns, target.dimension, RATIONAL)


def polynomial_petri_matrix(s: Symbol, ell: int) -> Matrix:
    """ϖ̂ on ker σ̂ ⊗ ker σ̂† (both (k+ℓ)-truncated), (p⊗e)⊗(q⊗f) ↦ pq ⊗ e ⊗ f.

    Columns are indexed by i·|ker σ̂†| + j over the nullspace bases.
    """
    adj = adjoint_symbol(s)
    left_space = TruncatedPolySpace(s.n, s.r_e, s.k + ell)
    right_space = TruncatedPolySpace(s.n, s.r_f, s.k + ell)
    left = [(left_space, v) for v in nullspace_basis(formal_operator_matrix(s, ell))]
    right = [(right_space, v) for v in nullspace_basis(formal_operator_matrix(adj, ell))]
    target = TruncatedPolySpace(s.n, s.r_e * s.r_f, 2 * (s.k + ell))
    return _petri_from_kernels(left, right, s.r_f, target)


def homogeneous_petri_matrix(s: Symbol, degree: int) -> Matrix:
    """ϖ̂ on ⊕_{d₁+d₂=degree} ker_{d₁} σ̂ ⊗ ker_{d₂} σ̂†, landing in degree ``degree``.

    Columns run over d₁ = 0..degree, then the two homogeneous nullspace bases.
    """
    adj = adjoint_symbol(s)
    target = TruncatedPolySpace(s.n, s.r_e * s.r_f, degree, homogeneous=True)
    blocks = []
    for d1 in range(degree + 1):
        d2 = degree - d1
        left_space = TruncatedPolySpace(s.n, s.r_e, d1, homogeneous=True)
        right_space = TruncatedPolySpace(s.n, s.r_f, d2, homogeneous=True)
        left = [(left_space, v) for v in homogeneous_kernel(s, d1)]
        right = [(right_space, v) for v in homogeneous_kernel(adj, d2)]
        blocks.append(_petri_from_kernels(left, right, s.r_f, target))
    return hstack(*blocks)


def petri_nullity(m: Matrix) -> int:
    return m.cols - rank(m) if m.rows else m.cols


def stratum_fiber_dim(rho: int, r: int, n: int, k: int, ell: int) -> int:
    """2ρr·[C(n+k+ℓ, n) − C(n+ℓ, n)] − ρ²."""
    if rho < 1:
        raise ValueError("rho must be positive")
    return 2 * rho * jet_kernel_dimension(r, n, k, ell) - rho * rho


def stratum_fiber_report(
    rho: int, r: int, n: int, k: int, ell: int, c: Fraction
) -> Dict[str, Any]:
    """Fiber dimension together with the comparison value c·ρ·ℓ^{n−1}."""
    fiber = stratum_fiber_dim(rho, r, n, k, ell)
    comparison = Fraction(c) * rho * ell ** (n - 1)
    return {"fiber_dim": fiber, "comparison": comparison, "within": fiber <= comparison}


# Complex model ℂ[z, z̄] used by the Cauchy–Riemann specializations. Monomials
# z^α z̄^β are ordered by total degree, then by descending α.


def z_monomials(ell: int) -> List[Tuple[int, int]]:
    return [(alpha, d - alpha) for d in range(ell + 1) for alpha in range(d, -1, -1)]


def z_position(alpha: int, beta: int) -> int:
    d = alpha + beta
    return d * (d + 1) // 2 + (d - alpha)


def cr_operator_complex(ell: int) -> Matrix:
    """∂/∂z̄ from ℂ[z, z̄]^{≤ℓ+1} to ℂ[z, z̄]^{≤ℓ} over ℚ[i]."""
    domain = z_monomials(ell + 1)
    size = len(z_monomials(ell))
    rows = [[0] * len(domain) for _ in range(size)]
    for col, (alpha, beta) in enumerate(domain):
        if beta:
            rows[z_position(alpha, beta - 1)][col] = beta
    return Matrix(rows, GAUSSIAN, len(domain))


def cr_right_inverse(ell: int) -> Matrix:
    """R̂(z^α z̄^β) = z^α z̄^{β+1}/(β+1), raising the z̄-degree by one."""
    domain = z_monomials(ell)
    size = len(z_monomials(ell + 1))
    rows = [[0] * len(domain) for _ in range(size)]
    for col, (alpha, beta) in enumerate(domain):
        rows[z_position(alpha, beta + 1)][col] = Fraction(1, beta + 1)
    return Matrix(rows, GAUSSIAN, len(domain))


# Built-in symbols

_J = ((0, -1), (1, 0))


def d_dx() -> Symbol:
    return Symbol.from_mapping(1, 1, {(1,): Matrix([[1]])}, "d/dx")


def cauchy_riemann() -> Symbol:
    """∂_x + J∂_y on ℝ² ≅ ℂ, the real form of 2∂/∂z̄."""
    return Symbol.from_mapping(
        2, 1, {(1, 0): Matrix.identity(2), (0, 1): Matrix(_J)}, "cauchy_riemann"
    )


def laplace_2d() -> Symbol:
    return Symbol.from_mapping(
        2, 2, {(2, 0): Matrix([[1]]), (0, 2): Matrix([[1]])}, "laplace_2d"
    )


def dirac_3d() -> Symbol:
    """σ(ξ) = left multiplication by ξ₁ + ξ₂i + ξ₃j on ℍ ≅ ℝ⁴."""
    units = [Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)]
    coeffs = {}
    for axis, unit in enumerate(units):
        index = tuple(1 if i == axis else 0 for i in range(3))
        coeffs[index] = Matrix(regular_matrix(unit, QUATERNION), RATIONAL)
    return Symbol.from_mapping(3, 1, coeffs, "dirac_3d")


def partial_x_2d() -> Symbol:
    """∂_x on scalar functions of two variables; not elliptic."""
    return Symbol.from_mapping(2, 1, {(1, 0): Matrix([[1]])}, "partial_x_2d")


BUILTIN_SYMBOLS = {
    "d_dx": d_dx,
    "cauchy_riemann": cauchy_riemann,
    "laplace_2d": laplace_2d,
    "dirac_3d": dirac_3d,
    "partial_x_2d": partial_x_2d,
}


def get_symbol(name: str) -> Symbol:
    if name not in BUILTIN_SYMBOLS:
        raise ValueError(f"Unknown symbol {name!r}; expected one of {sorted(BUILTIN_SYMBOLS)}")
    return BUILTIN_SYMBOLS[name]()

