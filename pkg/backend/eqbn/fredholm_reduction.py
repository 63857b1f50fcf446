"""Lyapunov–Schmidt (Schur complement) reduction and codimension formulas.

A :class:`SplitOperator` fixes splittings X = coim L ⊕ ker L and
Y = im L ⊕ coker L of a reference operator L. In the adapted bases every
nearby T becomes a 2×2 block matrix and

    𝒮(T) = T₂₂ − T₂₁ T₁₁⁻¹ T₁₂ : ker L → coker L

has the same kernel and cokernel dimensions as T.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, List, Sequence, Tuple

from eqbn.exact_linalg import (
    DimensionMismatch,
    Matrix,
    Vector,
    block_matrix,
    column_space_basis,
    hstack,
    inverse_matrix,
    is_invertible,
    left_nullspace_basis,
    nullspace_basis,
    rank,
    rref,
    vectors_to_matrix,
)
from eqbn.scalars import GAUSSIAN, RATIONAL, GaussianRational, join_kinds, one, zero

logger = logging.getLogger(__name__)

DIVISION_DIMENSIONS = (1, 2, 4)


class OutsideReductionNeighborhood(ValueError):
    """The block T₁₁ is singular, so T is outside the reduction chart."""


@dataclass(frozen=True)
class SplitOperator:
    """A reference operator with chosen kernel/cokernel splittings."""

    base: Matrix
    kernel_basis: Tuple[Vector, ...]
    coimage_basis: Tuple[Vector, ...]
    image_basis: Tuple[Vector, ...]
    cokernel_lift_basis: Tuple[Vector, ...]

    def __post_init__(self) -> None:
        x = self.domain_frame
        y = self.codomain_frame
        if not is_invertible(x):
            raise ValueError("coimage ⊕ kernel bases do not form a basis of the domain")
        if not is_invertible(y):
            raise ValueError("image ⊕ cokernel bases do not form a basis of the codomain")
        if len(self.coimage_basis) != len(self.image_basis):
            raise ValueError("coimage and image bases must have equal size")
        for v in self.kernel_basis:
            if any(self.base.apply(v)):
                raise ValueError("kernel basis vector is not annihilated by L")
        lc = self.base @ self._columns(self.coimage_basis, self.base.cols)
        im = self._columns(self.image_basis, self.base.rows)
        if rank(lc) != len(self.coimage_basis) or rank(hstack(lc, im)) != rank(im):
            raise ValueError("L does not map the coimage isomorphically onto the image")

    def _columns(self, vectors: Sequence[Vector], length: int) -> Matrix:
        return vectors_to_matrix(list(vectors), length, self.kind)

    @property
    def kind(self) -> str:
        return self.base.kind

    @property
    def domain_frame(self) -> Matrix:
        """The square matrix [C | K]."""
        return self._columns(self.coimage_basis + self.kernel_basis, self.base.cols)

    @property
    def codomain_frame(self) -> Matrix:
        """The square matrix [Im | Ck]."""
        return self._columns(self.image_basis + self.cokernel_lift_basis, self.base.rows)

    @property
    def dim_kernel(self) -> int:
        return len(self.kernel_basis)

    @property
    def dim_cokernel(self) -> int:
        return len(self.cokernel_lift_basis)

    def adapted(self, t: Matrix) -> Matrix:
        """T expressed in the adapted bases: [Im|Ck]⁻¹ · T · [C|K]."""
        if t.shape != self.base.shape:
            raise DimensionMismatch(f"Expected shape {self.base.shape}, got {t.shape}")
        return inverse_matrix(self.codomain_frame) @ t @ self.domain_frame


@dataclass(frozen=True)
class SchurReduction:
    s_matrix: Matrix
    phi: Matrix
    psi: Matrix
    # Columns of Ψ·[0; ker 𝒮] spanning ker T.
    kernel_lift: Tuple[Vector, ...] = field(default=())

    @property
    def dim_kernel(self) -> int:
        return self.s_matrix.cols - rank(self.s_matrix)

    @property
    def dim_cokernel(self) -> int:
        return self.s_matrix.rows - rank(self.s_matrix)


def _blocks(m: Matrix, c_rows: int, c_cols: int) -> Tuple[Matrix, Matrix, Matrix, Matrix]:
    top, bottom = list(range(c_rows)), list(range(c_rows, m.rows))
    left, right = list(range(c_cols)), list(range(c_cols, m.cols))
    return (
        m.submatrix(top, left),
        m.submatrix(top, right),
        m.submatrix(bottom, left),
        m.submatrix(bottom, right),
    )


# PUBLIC API


def default_split(base: Matrix) -> SplitOperator:
    """Deterministic splitting from the pivot structure of ``base``.

    ker L from the nullspace basis, coim L spanned by the standard vectors at
    pivot columns, im L by their images, coker L by the left nullspace.
    """
    _, pivots = rref(base)
    o, z = one(base.kind), zero(base.kind)
    coimage = tuple(
        tuple(o if i == p else z for i in range(base.cols)) for p in pivots
    )
    image = tuple(base.column(p) for p in pivots)
    return SplitOperator(
        base=base,
        kernel_basis=tuple(nullspace_basis(base)),
        coimage_basis=coimage,
        image_basis=image,
        cokernel_lift_basis=tuple(left_nullspace_basis(base)),
    )


def symmetric_split(base: Matrix) -> SplitOperator:
    """Adjoint-compatible splitting of a self-adjoint ``base``.

    Uses coim L = (ker L)^⊥ and takes the image/cokernel bases from the
    columns of ([C | K]*)⁻¹, so [Im|Ck]⁻¹ = [C|K]* and self-adjoint operators
    stay self-adjoint in the adapted bases.
    """
    if base != base.conjugate_transpose():
        raise ValueError("symmetric_split needs a self-adjoint operator")
    kernel = tuple(nullspace_basis(base))
    coimage = tuple(column_space_basis(base))
    frame = vectors_to_matrix(list(coimage + kernel), base.cols, base.kind)
    dual = inverse_matrix(frame.conjugate_transpose())
    c = len(coimage)
    columns = dual.columns()
    return SplitOperator(
        base=base,
        kernel_basis=kernel,
        coimage_basis=coimage,
        image_basis=tuple(columns[:c]),
        cokernel_lift_basis=tuple(columns[c:]),
    )


def ls_reduce(l: SplitOperator, t: Matrix) -> SchurReduction:
    """Schur reduction of ``t`` with block-triangular witnesses Φ, Ψ."""
    kind = join_kinds([l.kind, t.kind])
    p = inverse_matrix(l.codomain_frame.with_kind(kind))
    x = l.domain_frame.with_kind(kind)
    adapted = p @ t @ x
    c = len(l.coimage_basis)
    t11, t12, t21, t22 = _blocks(adapted, c, c)
    if not is_invertible(t11):
        raise OutsideReductionNeighborhood(
            "T₁₁ is singular: the operator is outside the reduction neighborhood"
        )
    t11_inv = inverse_matrix(t11)
    s = t22 - t21 @ t11_inv @ t12
    n_ker, n_coker = t22.cols, t22.rows
    right = block_matrix(
        [
            [t11_inv, -(t11_inv @ t12)],
            [Matrix.zeros(n_ker, c, kind), Matrix.identity(n_ker, kind)],
        ]
    )
    left = block_matrix(
        [
            [Matrix.identity(c, kind), Matrix.zeros(c, n_coker, kind)],
            [-(t21 @ t11_inv), Matrix.identity(n_coker, kind)],
        ]
    )
    psi = x @ right
    phi = left @ p
    z = zero(kind)
    lifted = tuple(psi.apply((z,) * c + tuple(v)) for v in nullspace_basis(s))
    logger.debug("ls_reduce: coimage %d, kernel %d, cokernel %d", c, n_ker, n_coker)
    return SchurReduction(s_matrix=s, phi=phi, psi=psi, kernel_lift=lifted)


def verify_witnesses(t: Matrix, reduction: SchurReduction) -> bool:
    """Φ·T·Ψ == blockdiag(I, 𝒮(T)), entrywise."""
    product = reduction.phi @ t @ reduction.psi
    s = reduction.s_matrix
    c = product.cols - s.cols
    kind = product.kind
    expected = block_matrix(
        [
            [Matrix.identity(c, kind), Matrix.zeros(c, s.cols, kind)],
            [Matrix.zeros(s.rows, c, kind), s.with_kind(kind)],
        ]
    )
    return product == expected


def ls_derivative(l: SplitOperator, lhat: Matrix) -> Matrix:
    """Compression ker L → coker L of L̂: L̂·s modulo im L."""
    adapted = l.adapted(lhat)
    c = len(l.coimage_basis)
    return _blocks(adapted, c, c)[3]


def ls_derivative_check(l: SplitOperator, lhat: Matrix, ts: Sequence) -> bool:
    """Check 𝒮(L + tL̂) = t·D + t²·R(t) exactly at each nonzero rational t.

    D is :func:`ls_derivative` and R(t) = −L̂₂₁ (L₁₁ + tL̂₁₁)⁻¹ L̂₁₂ is the
    closed remainder, so D is the exact first derivative at t = 0.
    """
    d = ls_derivative(l, lhat)
    c = len(l.coimage_basis)
    l11 = _blocks(l.adapted(l.base), c, c)[0]
    h11, h12, h21, _ = _blocks(l.adapted(lhat), c, c)
    for t in ts:
        if t == 0:
            raise ValueError("Sample points must be nonzero")
        s = ls_reduce(l, l.base + lhat.scale(t)).s_matrix
        remainder = -(h21 @ inverse_matrix(l11 + h11.scale(t)) @ h12)
        if s != d.scale(t) + remainder.scale(t * t):
            return False
    return True


def stratum_codim(dim_x: int, dim_y: int, r: int) -> int:
    """Codimension (dim X − r)(dim Y − r) of the rank-r stratum."""
    if r < 0 or r > min(dim_x, dim_y):
        raise ValueError(f"Rank {r} is impossible for a {dim_y}x{dim_x} map")
    return (dim_x - r) * (dim_y - r)


def fredholm_codim(d: int, e: int) -> int:
    """Codimension d·e of the Brill–Noether locus 𝓕_{d,e}."""
    if d < 0 or e < 0:
        raise ValueError("Kernel and cokernel dimensions must be nonnegative")
    return d * e


def complex_fredholm_codim(d: int, e: int) -> int:
    """Real codimension of 𝓕_{d,e} in a complex-linear family (ℂ-dimensions)."""
    return 2 * fredholm_codim(d, e)


def _check_division_dims(k: Sequence[int], *others: Sequence[int]) -> None:
    for other in others:
        if len(other) != len(k):
            raise ValueError("All per-representation lists must have equal length")
    for value in k:
        if value not in DIVISION_DIMENSIONS:
            raise ValueError(f"k entries must be 1, 2 or 4; got {value}")
    for other in others:
        if any(x < 0 for x in other):
            raise ValueError("Dimensions must be nonnegative")


def equivariant_codim(k: Sequence[int], d: Sequence[int], e: Sequence[int]) -> int:
    """Σ k_α·d_α·e_α."""
    _check_division_dims(k, d, e)
    return sum(ka * da * ea for ka, da, ea in zip(k, d, e))


def selfadjoint_codim(k: Sequence[int], d: Sequence[int]) -> int:
    """Σ (d_α + k_α·C(d_α, 2)), the dimension of Sym_𝕂(𝕂^d) summed over α."""
    _check_division_dims(k, d)
    return sum(da + ka * comb(da, 2) for ka, da in zip(k, d))


def rank_lower_bound(rho: int, d: int, e: int) -> int:
    """min{ρ, d, e}·max{d, e}."""
    return min(rho, d, e) * max(d, e)


def adjacent_strata(d: int, e: int) -> List[Tuple[int, int]]:
    """Strata (d̃, ẽ) with d̃ ≤ d, ẽ ≤ e and d̃ − ẽ = d − e, largest first."""
    shift = min(d, e)
    return [(d - j, e - j) for j in range(shift + 1)]


def adjacent_equivariant_strata(
    d: Sequence[int], e: Sequence[int]
) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    if len(d) != len(e):
        raise ValueError("d and e must have equal length")
    per_alpha = [adjacent_strata(da, ea) for da, ea in zip(d, e)]
    for choice in itertools.product(*per_alpha):
        yield tuple(c[0] for c in choice), tuple(c[1] for c in choice)


def local_system_strata(
    ell: Sequence[int], k: Sequence[int], dbar: int, ebar: int
) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All (d, e) with Σ ℓ_α k_α d_α = d̄ and Σ ℓ_α k_α e_α = ē."""
    _check_division_dims(k, ell)
    weights = [la * ka for la, ka in zip(ell, k)]

    def solutions(total: int) -> List[Tuple[int, ...]]:
        found: List[Tuple[int, ...]] = []

        def walk(index: int, remaining: int, prefix: Tuple[int, ...]) -> None:
            if index == len(weights):
                if remaining == 0:
                    found.append(prefix)
                return
            w = weights[index]
            if w == 0:
                # V_α does not occur in V; its dimensions are unconstrained.
                walk(index + 1, remaining, prefix + (0,))
                return
            for x in range(remaining // w + 1):
                walk(index + 1, remaining - x * w, prefix + (x,))

        walk(0, total, ())
        return found

    return [(d, e) for d in solutions(dbar) for e in solutions(ebar)]


def twist_stratum_feasible(i: Sequence[int], d: Sequence[int], e: Sequence[int]) -> bool:
    """Whether (d, e) is compatible with the twisted indices i: d − e = i."""
    if not len(i) == len(d) == len(e):
        raise ValueError("i, d and e must have equal length")
    return all(
        da - ea == ia and da >= ia and ea >= -ia and da >= 0 and ea >= 0
        for ia, da, ea in zip(i, d, e)
    )


def _random_entry(rng: random.Random, kind: str, spread: int) -> object:
    if kind == GAUSSIAN:
        return GaussianRational(rng.randint(-spread, spread), rng.randint(-spread, spread))
    return rng.randint(-spread, spread)


def random_matrix(rng: random.Random, rows: int, cols: int, kind: str = RATIONAL, spread: int = 3) -> Matrix:
    return Matrix(
        [[_random_entry(rng, kind, spread) for _ in range(cols)] for _ in range(rows)], kind, cols
    )


def random_reduction_instance(
    rng: random.Random, kind: str = RATIONAL, max_dim: int = 5, attempts: int = 20
) -> Tuple[SplitOperator, Matrix, Matrix]:
    """(L, T, L̂) with L of deficient rank and T inside the reduction chart."""
    rows, cols = rng.randint(1, max_dim), rng.randint(1, max_dim)
    r = rng.randint(0, min(rows, cols))
    if r:
        base = random_matrix(rng, rows, r, kind) @ random_matrix(rng, r, cols, kind)
    else:
        base = Matrix.zeros(rows, cols, kind)
    split = default_split(base)
    lhat = random_matrix(rng, rows, cols, kind)
    c = len(split.coimage_basis)
    for _ in range(attempts):
        t = base + random_matrix(rng, rows, cols, kind, spread=1)
        if is_invertible(_blocks(split.adapted(t), c, c)[0]):
            return split, t, lhat
    # L itself always lies in its own chart.
    return split, base, lhat
