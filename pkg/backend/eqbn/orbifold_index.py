"""Index arithmetic for branched covers viewed as orbifold covers.

All indices are real indices; Euler characteristics of holomorphic bundles
are complex, so ind = 2·χ. Monodromies of μ_k are given as block sums of
trivial, sign and rotation(w) pieces, which keeps the weights exact for every
k; explicit matrices are accepted when k divides 4.
"""
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from eqbn.exact_linalg import Matrix, kronecker, nullspace_basis
from eqbn.scalars import GAUSSIAN, I

logger = logging.getLogger(__name__)

TRIVIAL = "trivial"
SIGN = "sign"
ROTATION = "rot"
BLOCK_TYPES = (TRIVIAL, SIGN, ROTATION)

_BLOCK_DIM = {TRIVIAL: 1, SIGN: 1, ROTATION: 2}


def _lcm(values: Sequence[int]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


@dataclass(frozen=True)
class RamificationProfile:
    """A degree-``degree`` branched cover of a genus ``base_genus`` surface."""

    degree: int
    branch: Tuple[Tuple[int, ...], ...]
    base_genus: int = 0

    def __post_init__(self) -> None:
        if self.degree < 1 or self.base_genus < 0:
            raise ValueError("Degree must be positive and genus nonnegative")
        for x, partition in enumerate(self.branch):
            if any(r < 1 for r in partition):
                raise ValueError(f"Branch point {x}: ramification indices must be >= 1")
            if sum(partition) != self.degree:
                raise ValueError(
                    f"Branch point {x}: indices {list(partition)} do not sum to {self.degree}"
                )
        chi = self.cover_euler_characteristic
        if chi % 2 or chi > 2:
            raise ValueError(f"Riemann–Hurwitz gives χ = {chi}, not an even number <= 2")

    @property
    def cover_euler_characteristic(self) -> int:
        """deg·χ(Σ) − Σ (r − 1)."""
        defect = sum(r - 1 for partition in self.branch for r in partition)
        return self.degree * (2 - 2 * self.base_genus) - defect

    @property
    def cover_genus(self) -> int:
        return (2 - self.cover_euler_characteristic) // 2


@dataclass(frozen=True)
class OrbifoldPoint:
    point_id: int
    nu: int
    ramification: Tuple[int, ...] = ()
    upstairs: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.nu < 2:
            raise ValueError(f"Orbifold point {self.point_id} needs ν >= 2")
        if len(self.upstairs) != len(self.ramification):
            raise ValueError("One upstairs multiplicity per ramification index")
        for r, nu_tilde in zip(self.ramification, self.upstairs):
            if r * nu_tilde != self.nu:
                raise ValueError(f"ν/r = {self.nu}/{r} is not the upstairs multiplicity {nu_tilde}")


@dataclass(frozen=True)
class OrbifoldData:
    points: Tuple[OrbifoldPoint, ...] = ()

    @classmethod
    def from_multiplicities(cls, nus: Sequence[int]) -> "OrbifoldData":
        return cls(tuple(OrbifoldPoint(i, nu) for i, nu in enumerate(nus)))

    @property
    def multiplicities(self) -> List[int]:
        return [p.nu for p in self.points]


@dataclass(frozen=True)
class MonodromyDatum:
    """A real representation of μ_k, by blocks and optionally by a matrix."""

    k: int
    blocks: Tuple[Tuple[str, int], ...] = ()
    matrix: Optional[Matrix] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")
        for kind, w in self.blocks:
            if kind not in BLOCK_TYPES:
                raise ValueError(f"Unknown block type {kind!r}")
            if kind == SIGN and self.k % 2:
                raise ValueError(f"μ_{self.k} has no sign representation")
        if self.matrix is not None:
            if self.k not in (1, 2, 4):
                raise ValueError("Explicit matrices need k in {1, 2, 4}")
            power = Matrix.identity(self.matrix.rows, self.matrix.kind)
            for _ in range(self.k):
                power = power @ self.matrix
            if power != Matrix.identity(self.matrix.rows, self.matrix.kind):
                raise ValueError(f"ρ^{self.k} is not the identity")
            if self.blocks and self.matrix.rows != self._block_dim():
                raise ValueError("Blocks and matrix have different dimensions")

    def _block_dim(self) -> int:
        return sum(_BLOCK_DIM[kind] for kind, _ in self.blocks)

    @classmethod
    def from_blocks(cls, k: int, blocks: Sequence[Tuple[str, int]]) -> "MonodromyDatum":
        return cls(k, tuple((kind, w % k if kind == ROTATION else 0) for kind, w in blocks))

    @classmethod
    def from_matrix(cls, k: int, matrix: Matrix) -> "MonodromyDatum":
        return cls(k, (), matrix)

    @property
    def dim(self) -> int:
        return self.matrix.rows if self.matrix is not None else self._block_dim()

    @property
    def fixed_dim(self) -> int:
        """dim V^ρ."""
        if self.matrix is not None:
            return len(nullspace_basis(self.matrix - Matrix.identity(self.dim, self.matrix.kind)))
        total = 0
        for kind, w in self.blocks:
            if kind == TRIVIAL:
                total += 1
            elif kind == ROTATION and w % self.k == 0:
                total += 2
        return total

    @property
    def coinvariant_dim(self) -> int:
        """dim V/V^ρ."""
        return self.dim - self.fixed_dim

    def repeat(self, copies: int) -> "MonodromyDatum":
        """ρ ⊗ I on V ⊗ ℝ^copies."""
        matrix = None
        if self.matrix is not None:
            matrix = kronecker(self.matrix, Matrix.identity(copies, self.matrix.kind))
        return MonodromyDatum(self.k, self.blocks * copies, matrix)


@dataclass(frozen=True)
class SurfaceBundleData:
    genus: int
    rank: int
    degree: int
    n: int = 3

    def __post_init__(self) -> None:
        if self.genus < 0 or self.rank < 0:
            raise ValueError("Genus and rank must be nonnegative")


def weight_lift(x: int, k: int) -> int:
    """The representative of x mod k in (−k, 0]."""
    return -((-x) % k)


def _check_points(od: OrbifoldData, m: Sequence[MonodromyDatum]) -> None:
    if len(m) != len(od.points):
        raise ValueError(f"{len(m)} monodromy data for {len(od.points)} orbifold points")
    for point, datum in zip(od.points, m):
        if datum.k != point.nu:
            raise ValueError(f"Point {point.point_id}: monodromy of μ_{datum.k}, but ν = {point.nu}")


# PUBLIC API


def orbifoldize_cover(p: RamificationProfile) -> OrbifoldData:
    """ν(x) = lcm of the indices over x and ν̃ = ν/r upstairs; ν = 1 is dropped."""
    points = []
    for x, partition in enumerate(p.branch):
        nu = _lcm(partition)
        if nu == 1:
            continue
        points.append(
            OrbifoldPoint(x, nu, tuple(partition), tuple(nu // r for r in partition))
        )
    return OrbifoldData(tuple(points))


def partition_conserved(od: OrbifoldData, degree: int) -> bool:
    """Σ ν/ν̃ over the preimages of every point equals the degree."""
    return all(
        sum(point.nu // nu_tilde for nu_tilde in point.upstairs) == degree
        for point in od.points
    )


def base_index(sd: SurfaceBundleData) -> int:
    """ind 𝔡 = 2(deg E + rk_ℂ E·(1 − g))."""
    return 2 * (sd.degree + sd.rank * (1 - sd.genus))


def twisted_index(
    sd: SurfaceBundleData, od: OrbifoldData, m: Sequence[MonodromyDatum], dim_v: Optional[int] = None
) -> int:
    """dim V·ind 𝔡 − rk_ℂ E·Σ_x dim(V/V^{ρ_x})."""
    _check_points(od, m)
    dims = {datum.dim for datum in m}
    if dim_v is None:
        if len(dims) > 1:
            raise ValueError(f"Monodromies act on spaces of dimensions {sorted(dims)}")
        dim_v = dims.pop() if dims else 1
    elif dims - {dim_v}:
        raise ValueError(f"Monodromy dimension differs from dim V = {dim_v}")
    return dim_v * base_index(sd) - sd.rank * sum(datum.coinvariant_dim for datum in m)


def kawasaki_chi(chi_pullback: Any, m: Sequence[MonodromyDatum]) -> Any:
    """χ(𝓔_ν) − Σ_x dim_ℂ(E_x/E_x^{ρ_x})."""
    return chi_pullback - sum(datum.coinvariant_dim for datum in m)


def complexification_weights(k: int, rho: MonodromyDatum) -> List[int]:
    """Weight lifts in (−k, 0] of the characters in V ⊗ ℂ."""
    if rho.k != k:
        raise ValueError(f"Datum is a representation of μ_{rho.k}, not μ_{k}")
    if rho.matrix is not None:
        weights = _matrix_weights(k, rho.matrix)
    else:
        weights = []
        for kind, w in rho.blocks:
            if kind == TRIVIAL:
                weights.append(0)
            elif kind == SIGN:
                weights.append(weight_lift(k // 2, k))
            else:
                weights.extend([weight_lift(w, k), weight_lift(-w, k)])
    if 2 * sum(weights) != -k * rho.coinvariant_dim:
        raise AssertionError(
            f"Weight sum {sum(weights)} differs from −(k/2)·{rho.coinvariant_dim}"
        )
    return weights


def _matrix_weights(k: int, matrix: Matrix) -> List[int]:
    zeta = {1: 1, 2: -1, 4: I}[k]
    complex_matrix = matrix.with_kind(GAUSSIAN)
    identity = Matrix.identity(matrix.rows, GAUSSIAN)
    weights = []
    power: Any = 1
    for w in range(k):
        shifted = complex_matrix - identity.scale(power)
        weights.extend([weight_lift(w, k)] * len(nullspace_basis(shifted)))
        power = power * zeta
    if len(weights) != matrix.rows:
        raise ValueError("Monodromy matrix is not diagonalizable over ℚ[i]")
    return weights


def degree_from_residues(od: OrbifoldData, weights_per_point: Sequence[Sequence[int]]) -> Fraction:
    """deg = −Σ_x Σ_i w̃_i(x)/ν(x)."""
    if len(weights_per_point) != len(od.points):
        raise ValueError("One weight list per orbifold point is required")
    total = Fraction(0)
    for point, weights in zip(od.points, weights_per_point):
        for w in weights:
            if not -point.nu < w <= 0:
                raise ValueError(f"Weight {w} outside (−{point.nu}, 0]")
            total -= Fraction(w, point.nu)
    return total


def local_system_degree(od: OrbifoldData, m: Sequence[MonodromyDatum]) -> Fraction:
    """deg 𝒱 from the residues of the complexified monodromies."""
    _check_points(od, m)
    return degree_from_residues(
        od, [complexification_weights(p.nu, datum) for p, datum in zip(od.points, m)]
    )


def kawasaki_report(
    sd: SurfaceBundleData, od: OrbifoldData, m: Sequence[MonodromyDatum]
) -> Dict[str, Any]:
    """twisted_index recomputed as 2·kawasaki_chi of E ⊗ 𝒱.

    χ(E ⊗ 𝒱) = dim V·deg E + rk E·deg 𝒱 + rk E·dim V·(1 − g), and the
    monodromy on (E ⊗ V)_x is rk E copies of ρ_x.
    """
    direct = twisted_index(sd, od, m)
    dim_v = m[0].dim if m else 1
    deg_v = local_system_degree(od, m)
    half_coinvariants = Fraction(sum(datum.coinvariant_dim for datum in m), 2)
    if deg_v.denominator != 1:
        logger.warning("local system degree %s is not an integer", deg_v)
    chi = dim_v * sd.degree + sd.rank * deg_v + sd.rank * dim_v * (1 - sd.genus)
    via_kawasaki = 2 * kawasaki_chi(chi, [datum.repeat(sd.rank) for datum in m])
    return {
        "twisted_index": direct,
        "kawasaki_index": via_kawasaki,
        "agree": via_kawasaki == direct,
        "local_system_degree": deg_v,
        "degree_identity_holds": deg_v == half_coinvariants,
        "degree_integral": deg_v.denominator == 1,
        "convention": "real index",
    }


def map_index(n: int, genus: int, c1_pairing: int) -> int:
    """ind(u) = (n − 3)χ(Σ) + 2⟨[Σ], u*c₁⟩."""
    if n < 3:
        raise ValueError("The ambient manifold needs complex dimension n >= 3")
    return (n - 3) * (2 - 2 * genus) + 2 * c1_pairing


def normal_index(ind_u: int, z: int) -> int:
    """Index of the normal operator: ind(u) − 2Z(du)."""
    return ind_u - 2 * z


def contributing_index_bound(n: int, s: int) -> int:
    """Largest twisted index −(n − 1)·s allowed for a contributing summand."""
    return -(n - 1) * s


def superrigidity_codim(
    n: int, s: int, k: Sequence[int], d: Sequence[int], i: Sequence[int]
) -> Dict[str, Any]:
    """Σ_α k_α d_α (d_α − i_α) against the lower bounds (n − 1)s + 1 and 2s + 1.

    The bounds follow from d_α(d_α − i_α) ≥ (n − 1)s + 1, which holds for
    every contributing summand (d_α > 0) with i_α ≤ −(n − 1)s. Each summand
    reports its own term and inequality; ``hypothesis_holds`` records whether
    every contributing index is in range.
    """
    if not len(k) == len(d) == len(i):
        raise ValueError("k, d and i must have equal lengths")
    if any(x not in (1, 2, 4) for x in k):
        raise ValueError("Division algebra dimensions must be 1, 2 or 4")
    if any(x < 0 for x in d):
        raise ValueError("Kernel dimensions must be nonnegative")
    bound = contributing_index_bound(n, s)
    bound_n = (n - 1) * s + 1
    summands = []
    for alpha, (k_a, d_a, i_a) in enumerate(zip(k, d, i)):
        if not d_a:
            continue
        local = d_a * (d_a - i_a)
        summands.append(
            {
                "alpha": alpha,
                "term": k_a * local,
                "index_in_range": i_a <= bound,
                "meets_bound": local >= bound_n,
            }
        )
    hypothesis = all(x["index_in_range"] for x in summands)
    if not hypothesis:
        logger.info("superrigidity ledger has a contributing index above %d", bound)
    codim = sum(k_a * d_a * (d_a - i_a) for k_a, d_a, i_a in zip(k, d, i))
    top_shape = (
        len(summands) == 1
        and d[summands[0]["alpha"]] == 1
        and k[summands[0]["alpha"]] == 1
        and i[summands[0]["alpha"]] == -2 * s
    )
    return {
        "codim": codim,
        "bound_n": bound_n,
        "bound_2s": 2 * s + 1,
        "summands": summands,
        "hypothesis_holds": hypothesis,
        "meets_bound_n": codim >= bound_n if summands else True,
        "meets_bound_2s": codim >= 2 * s + 1 if summands else True,
        "top_stratum": bool(summands) and codim == 2 * s + 1,
        "top_shape": top_shape,
    }


def random_monodromy_dataset(
    rng: random.Random,
    max_genus: int = 3,
    max_rank: int = 2,
    max_k: int = 6,
    max_points: int = 3,
    max_dim: int = 3,
) -> Tuple[SurfaceBundleData, OrbifoldData, List[MonodromyDatum]]:
    sd = SurfaceBundleData(
        genus=rng.randint(0, max_genus),
        rank=rng.randint(1, max_rank),
        degree=rng.randint(-4, 4),
    )
    dim_v = rng.randint(1, max_dim)
    nus = [rng.randint(2, max_k) for _ in range(rng.randint(0, max_points))]
    data = []
    for k in nus:
        blocks: List[Tuple[str, int]] = []
        remaining = dim_v
        while remaining:
            choice = rng.random()
            if remaining >= 2 and choice < 0.5:
                blocks.append((ROTATION, rng.randint(1, k - 1)))
                remaining -= 2
            elif k % 2 == 0 and choice < 0.75:
                blocks.append((SIGN, 0))
                remaining -= 1
            else:
                blocks.append((TRIVIAL, 0))
                remaining -= 1
        data.append(MonodromyDatum.from_blocks(k, blocks))
    return sd, OrbifoldData.from_multiplicities(nus), data
