"""Real representation theory of small finite groups, in exact arithmetic.

Groups are multiplication tables over element indices ``0..order-1``.
Representations assign an invertible exact matrix to every element. The
commuting algebra of an irreducible real representation is ℝ, ℂ or ℍ; its
real dimension k ∈ {1, 2, 4} enters every multiplicity count below.
"""
import logging
from collections import deque
from dataclasses import dataclass
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from eqbn.exact_linalg import (
    Matrix,
    Vector,
    det,
    inverse_matrix,
    kronecker,
    nullspace_basis,
    rank,
    solve,
    vectors_to_matrix,
)
from eqbn.scalars import RATIONAL, join_kinds, zero

logger = logging.getLogger(__name__)

DIVISION_TYPES = {1: "R", 2: "C", 4: "H"}


class NotIrreducible(ValueError):
    """The commuting algebra is not a division algebra."""


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table."""

    order: int
    table: Tuple[Tuple[int, ...], ...]
    identity: int
    inverses: Tuple[int, ...]
    name: str = ""
    # Word in the generators for each element, when built from generators.
    words: Tuple[Tuple[int, ...], ...] = ()
    generators: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        n = self.order
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError("Multiplication table must be order x order")
        if any(not 0 <= x < n for row in self.table for x in row):
            raise ValueError("Multiplication table entries out of range")
        e = self.identity
        for g in range(n):
            if self.table[e][g] != g or self.table[g][e] != g:
                raise ValueError("Identity law fails")
            inv = self.inverses[g]
            if self.table[g][inv] != e or self.table[inv][g] != e:
                raise ValueError("Inverse law fails")
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise ValueError("Associativity fails")

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        n = len(table)
        rows = tuple(tuple(int(x) for x in row) for row in table)
        identity = next(
            (
                e
                for e in range(n)
                if all(rows[e][g] == g and rows[g][e] == g for g in range(n))
            ),
            None,
        )
        if identity is None:
            raise ValueError("Table has no identity element")
        inverses = []
        for g in range(n):
            inv = next((h for h in range(n) if rows[g][h] == identity), None)
            if inv is None:
                raise ValueError(f"Element {g} has no inverse")
            inverses.append(inv)
        return cls(order=n, table=rows, identity=identity, inverses=tuple(inverses), name=name)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def conjugate(self, g: int, h: int) -> int:
        """g·h·g⁻¹."""
        return self.mul(self.mul(g, h), self.inv(g))

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        if self.identity not in s:
            return False
        return all(self.mul(a, b) in s for a in s for b in s) and all(
            self.inv(a) in s for a in s
        )

    def generated_subgroup(self, gens: Iterable[int]) -> List[int]:
        found = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in found:
                    found.add(y)
                    frontier.append(y)
        return sorted(found)

    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(self.order)
            for b in range(self.order)
        )


@dataclass(frozen=True)
class Representation:
    """A homomorphism ρ: G → GL(degree) with exact matrices."""

    group: FiniteGroup
    degree: int
    matrices: Tuple[Matrix, ...]
    name: str = ""

    def __post_init__(self) -> None:
        g = self.group
        if len(self.matrices) != g.order:
            raise ValueError("One matrix per group element is required")
        for m in self.matrices:
            if m.shape != (self.degree, self.degree):
                raise ValueError(f"Expected {self.degree}x{self.degree} matrices")
        if self.matrices[g.identity] != Matrix.identity(self.degree, self.kind):
            raise ValueError("ρ(e) must be the identity")
        for a in range(g.order):
            for b in range(g.order):
                if self.matrices[a] @ self.matrices[b] != self.matrices[g.mul(a, b)]:
                    raise ValueError(f"ρ is not a homomorphism at ({a}, {b})")

    @property
    def kind(self) -> str:
        return join_kinds(m.kind for m in self.matrices) if self.matrices else RATIONAL

    def __call__(self, g: int) -> Matrix:
        return self.matrices[g]

    @classmethod
    def from_generator_images(
        cls, group: FiniteGroup, images: Sequence[Matrix], name: str = ""
    ) -> "Representation":
        if not group.words:
            raise ValueError("Group was not built from generators")
        if len(images) != len(group.generators):
            raise ValueError("One image per generator is required")
        degree = images[0].rows
        kind = join_kinds(m.kind for m in images)
        matrices = []
        for word in group.words:
            m = Matrix.identity(degree, kind)
            for letter in word:
                m = m @ images[letter]
            matrices.append(m)
        return cls(group=group, degree=degree, matrices=tuple(matrices), name=name)

    def conjugate_by(self, p: Matrix) -> "Representation":
        """g ↦ P·ρ(g)·P⁻¹."""
        p_inv = inverse_matrix(p)
        return Representation(
            self.group, self.degree, tuple(p @ m @ p_inv for m in self.matrices), self.name
        )


@dataclass(frozen=True)
class IrreducibleCatalog:
    """Irreducible real representations of one group with their types."""

    group: FiniteGroup
    irreps: Tuple[Representation, ...]
    k: Tuple[int, ...]

    @property
    def division_types(self) -> Tuple[str, ...]:
        return tuple(DIVISION_TYPES[x] for x in self.k)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(r.name or f"V{i}" for i, r in enumerate(self.irreps))

    def plancherel_sum(self) -> int:
        """Σ deg(V_α)² / k_α, which equals |G| for a complete catalog."""
        total = 0
        for r, k in zip(self.irreps, self.k):
            if (r.degree * r.degree) % k:
                raise ValueError(f"deg² not divisible by k for {r.name}")
            total += r.degree * r.degree // k
        return total

    def is_complete(self) -> bool:
        return self.plancherel_sum() == self.group.order

    def verify(self) -> None:
        """Check types, pairwise Schur orthogonality and completeness."""
        for r, k in zip(self.irreps, self.k):
            if len(intertwiner_basis(r, r)) != k:
                raise ValueError(f"{r.name}: self-intertwiner dimension is not {k}")
            certify_irreducible(r)
        for i, r in enumerate(self.irreps):
            for s in self.irreps[i + 1 :]:
                if intertwiner_basis(r, s):
                    raise ValueError(f"{r.name} and {s.name} are isomorphic")
        if not self.is_complete():
            raise ValueError(
                f"Catalog is incomplete: Σ deg²/k = {self.plancherel_sum()} "
                f"but |G| = {self.group.order}"
            )

    def index_of(self, name: str) -> int:
        return self.names.index(name)


def _vec(m: Matrix) -> Vector:
    return m.entries


def _unvec(v: Sequence, rows: int, cols: int, kind: str) -> Matrix:
    return Matrix([list(v[i * cols : (i + 1) * cols]) for i in range(rows)], kind, cols)


def _trace(m: Matrix):
    return sum((m[i, i] for i in range(m.rows)), zero(m.kind))


# PUBLIC API


def group_from_generators(generators: Sequence[Matrix], name: str = "") -> FiniteGroup:
    """Close faithful generator matrices under multiplication (BFS).

    Element 0 is the identity and elements are numbered in discovery order;
    each element remembers the word that reached it.
    """
    if not generators:
        raise ValueError("At least one generator is required")
    degree = generators[0].rows
    kind = join_kinds(g.kind for g in generators)
    identity = Matrix.identity(degree, kind)
    elements: List[Matrix] = [identity]
    words: List[Tuple[int, ...]] = [()]
    index: Dict[Matrix, int] = {identity: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for letter, gen in enumerate(generators):
            y = elements[x] @ gen
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                words.append(words[x] + (letter,))
                queue.append(index[y])
    n = len(elements)
    logger.debug("group_from_generators(%s): order %d", name, n)
    table = [[index[elements[a] @ elements[b]] for b in range(n)] for a in range(n)]
    inverses = [next(b for b in range(n) if table[a][b] == 0) for a in range(n)]
    gen_indices = tuple(index[g] for g in generators)
    return FiniteGroup(
        order=n,
        table=tuple(tuple(row) for row in table),
        identity=0,
        inverses=tuple(inverses),
        name=name,
        words=tuple(words),
        generators=gen_indices,
    )


def trivial_rep(g: FiniteGroup, kind: str = RATIONAL) -> Representation:
    one_by_one = Matrix.identity(1, kind)
    return Representation(g, 1, tuple(one_by_one for _ in range(g.order)), "trivial")


def intertwiner_basis(r1: Representation, r2: Representation) -> List[Matrix]:
    """Basis of {A : A·ρ₁(g) = ρ₂(g)·A for all g}.

    A is deg₂ × deg₁ and is vectorized row-major: unknown A[x, y] sits in
    column x·deg₁ + y of the stacked commutation system.
    """
    if r1.group != r2.group:
        raise ValueError("Representations of different groups")
    n1, n2 = r1.degree, r2.degree
    kind = join_kinds([r1.kind, r2.kind])
    z = zero(kind)
    rows = []
    for g in range(r1.group.order):
        m1, m2 = r1(g), r2(g)
        for i in range(n2):
            for j in range(n1):
                row = [z] * (n1 * n2)
                for b in range(n1):
                    c = m1[b, j]
                    if c:
                        row[i * n1 + b] = row[i * n1 + b] + c
                for a in range(n2):
                    c = m2[i, a]
                    if c:
                        row[a * n1 + j] = row[a * n1 + j] - c
                rows.append(row)
    system = Matrix(rows, kind, n1 * n2)
    return [_unvec(v, n2, n1, kind) for v in nullspace_basis(system)]


def certify_irreducible(r: Representation) -> int:
    """Exact certificate that the commutant of ``r`` is a division algebra.

    The commutant is ℚ·I ⊕ A₀ with A₀ traceless. It is a division algebra
    when b_i b_j + b_j b_i = −2 q_ij I for a basis (b_i) of A₀ and the Gram
    matrix q is positive definite (norm form a² + q(x) > 0). Returns k.
    """
    basis = intertwiner_basis(r, r)
    k = len(basis)
    if k not in DIVISION_TYPES:
        raise NotIrreducible(f"Self-intertwiner dimension {k} is not 1, 2 or 4")
    n, kind = r.degree, r.kind
    if kind != RATIONAL:
        raise ValueError("Irreducibility is certified for real (rational) representations")
    identity = Matrix.identity(n, kind)
    traceless = []
    for b in basis:
        t = _trace(b) / n
        traceless.append(b - identity.scale(t))
    # Keep a maximal independent subset (the identity direction drops out).
    chosen: List[Matrix] = []
    for b in traceless:
        candidate = chosen + [b]
        stacked = vectors_to_matrix([_vec(m) for m in candidate], n * n, kind)
        if rank(stacked) == len(candidate):
            chosen.append(b)
    if len(chosen) != k - 1:
        raise NotIrreducible("Commutant does not contain the identity direction")
    q = [[zero(kind)] * (k - 1) for _ in range(k - 1)]
    for i, bi in enumerate(chosen):
        for j, bj in enumerate(chosen):
            anti = bi @ bj + bj @ bi
            c = anti[0, 0]
            if anti != identity.scale(c):
                raise NotIrreducible("Traceless commutant elements do not anticommute to scalars")
            q[i][j] = -c / 2
    for size in range(1, k):
        minor = Matrix([row[:size] for row in q[:size]], kind, size)
        if not det(minor) > 0:
            raise NotIrreducible("Commutant norm form is not positive definite")
    return k


def division_type(r: Representation) -> str:
    """'R', 'C' or 'H' for an irreducible representation."""
    return DIVISION_TYPES[certify_irreducible(r)]


def multiplicities(v: Representation, catalog: IrreducibleCatalog) -> List[int]:
    """d_α = dim_ℝ Hom_G(V_α, V) / k_α for each catalog entry."""
    if not catalog.is_complete():
        raise ValueError("Catalog is incomplete: Σ deg²/k differs from |G|")
    result = []
    for irrep, k in zip(catalog.irreps, catalog.k):
        dim = len(intertwiner_basis(irrep, v))
        if dim % k:
            raise ValueError(f"Intertwiner dimension {dim} not divisible by k = {k}")
        result.append(dim // k)
    total = sum(d * irrep.degree for d, irrep in zip(result, catalog.irreps))
    if total != v.degree:
        raise ValueError(f"Decomposition accounts for degree {total}, not {v.degree}")
    return result


def coset_permutation_rep(g: FiniteGroup, subgroup: Sequence[int]) -> Representation:
    """Left translation on Map(G/C, ℝ): ρ(g)[gc, c] = 1.

    Cosets are numbered in order of their smallest element.
    """
    c = sorted(set(subgroup))
    if not g.is_subgroup(c):
        raise ValueError("Subset is not closed under product and inverse")
    cosets = coset_labels(g, c)
    n_cosets = max(cosets) + 1
    reps = [cosets.index(i) for i in range(n_cosets)]
    matrices = []
    for x in range(g.order):
        m = [[0] * n_cosets for _ in range(n_cosets)]
        for col, rep in enumerate(reps):
            m[cosets[g.mul(x, rep)]][col] = 1
        matrices.append(Matrix(m, RATIONAL, n_cosets))
    return Representation(g, n_cosets, tuple(matrices), "coset")


def coset_labels(g: FiniteGroup, subgroup: Sequence[int]) -> List[int]:
    """Label of the left coset xC of each element x."""
    labels = [-1] * g.order
    next_label = 0
    for x in range(g.order):
        if labels[x] >= 0:
            continue
        for h in subgroup:
            labels[g.mul(x, h)] = next_label
        next_label += 1
    return labels


def regular_rep(g: FiniteGroup) -> Representation:
    return Representation(
        g, g.order, coset_permutation_rep(g, [g.identity]).matrices, "regular"
    )


def is_normal(g: FiniteGroup, subgroup: Sequence[int]) -> bool:
    s = set(subgroup)
    return all(g.conjugate(x, h) in s for x in range(g.order) for h in s)


def normal_core(g: FiniteGroup, subgroup: Sequence[int]) -> List[int]:
    """⋂_g gCg⁻¹, checked to be normal, inside C and of index ≤ [G:C]!."""
    c = set(subgroup)
    if not g.is_subgroup(c):
        raise ValueError("Subset is not closed under product and inverse")
    core = set(c)
    for x in range(g.order):
        core &= {g.conjugate(x, h) for h in c}
    result = sorted(core)
    index_c = g.order // len(c)
    index_n = g.order // len(result)
    if not (is_normal(g, result) and core <= c and index_n <= factorial(index_c)):
        raise AssertionError("Normal core postconditions failed")
    return result


def quotient_by_normal(g: FiniteGroup, n: Sequence[int]) -> Tuple[FiniteGroup, List[int]]:
    """G/N as a table group, with the projection G → G/N."""
    if not is_normal(g, n):
        raise ValueError("Subgroup is not normal")
    labels = coset_labels(g, sorted(set(n)))
    size = max(labels) + 1
    reps = [labels.index(i) for i in range(size)]
    table = [[labels[g.mul(reps[a], reps[b])] for b in range(size)] for a in range(size)]
    quotient = FiniteGroup.from_table(table, name=f"{g.name}/N" if g.name else "")
    return quotient, labels


def inflate(r: Representation, g: FiniteGroup, projection: Sequence[int]) -> Representation:
    """Pull a representation of G/N back to G along ``projection``."""
    return Representation(
        g, r.degree, tuple(r(projection[x]) for x in range(g.order)), r.name
    )


def direct_sum(*reps: Representation) -> Representation:
    g = reps[0].group
    kind = join_kinds(r.kind for r in reps)
    degree = sum(r.degree for r in reps)
    matrices = []
    for x in range(g.order):
        rows = []
        offset = 0
        for r in reps:
            for row in r(x).to_lists():
                rows.append(
                    [zero(kind)] * offset + row + [zero(kind)] * (degree - offset - r.degree)
                )
            offset += r.degree
        matrices.append(Matrix(rows, kind, degree))
    return Representation(g, degree, tuple(matrices), "+".join(r.name for r in reps))


def tensor(r1: Representation, r2: Representation) -> Representation:
    return Representation(
        r1.group,
        r1.degree * r2.degree,
        tuple(kronecker(r1(x), r2(x)) for x in range(r1.group.order)),
        f"{r1.name}*{r2.name}",
    )


def dual(r: Representation) -> Representation:
    """Contragredient g ↦ ρ(g⁻¹)ᵀ."""
    g = r.group
    return Representation(
        g, r.degree, tuple(r(g.inv(x)).transpose() for x in range(g.order)), f"{r.name}*"
    )


def _restrict(
    group: FiniteGroup,
    action: Sequence[Matrix],
    basis: Sequence[Vector],
    kind: str,
    name: str,
) -> Representation:
    length = action[0].rows
    frame = vectors_to_matrix(list(basis), length, kind)
    if rank(frame) != len(basis):
        raise ValueError("Basis vectors are dependent")
    matrices = []
    for x in range(group.order):
        columns = []
        for v in basis:
            coords = solve(frame, action[x].apply(v))
            if coords is None:
                raise ValueError("Subspace is not invariant")
            columns.append(coords)
        matrices.append(vectors_to_matrix(columns, len(basis), kind))
    return Representation(group, len(basis), tuple(matrices), name)


def subrepresentation(r: Representation, basis: Sequence[Vector]) -> Representation:
    """Restriction of ``r`` to the invariant subspace spanned by ``basis``."""
    return _restrict(r.group, r.matrices, basis, r.kind, r.name)


def fixed_subspace(r: Representation, subgroup: Optional[Sequence[int]] = None) -> List[Vector]:
    """Basis of the vectors fixed by every element of ``subgroup`` (default G)."""
    elements = range(r.group.order) if subgroup is None else subgroup
    identity = Matrix.identity(r.degree, r.kind)
    blocks = [r(x) - identity for x in elements]
    if not blocks:
        return nullspace_basis(Matrix.zeros(0, r.degree, r.kind))
    stacked = Matrix([row for b in blocks for row in b.to_lists()], r.kind, r.degree)
    return nullspace_basis(stacked)


def coset_multiplicity_via_fixed_vectors(
    irrep: Representation, k: int, subgroup: Sequence[int]
) -> int:
    """Multiplicity of V_α in Map(G/C, ℝ): dim (V_α*)^C / k_α."""
    dim = len(fixed_subspace(dual(irrep), subgroup))
    if dim % k:
        raise ValueError("Fixed dimension not divisible by k")
    return dim // k


def representation_on_subspace_action(
    group: FiniteGroup, action: Sequence[Matrix], basis: Sequence[Vector], name: str = ""
) -> Representation:
    """Representation induced by ``action`` (one matrix per element) on span(basis)."""
    if not basis:
        kind = action[0].kind if action else RATIONAL
        empty = Matrix.zeros(0, 0, kind)
        return Representation(group, 0, tuple(empty for _ in range(group.order)), name)
    kind = join_kinds(m.kind for m in action)
    return _restrict(group, action, basis, kind, name)


def isotypic_dimension(v: Representation, irrep: Representation, k: int) -> int:
    """Real dimension of the V_α-isotypic part of V: d_α·deg(V_α)."""
    dim = len(intertwiner_basis(irrep, v))
    return (dim // k) * irrep.degree
