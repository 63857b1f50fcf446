"""Graph models of first-order elliptic operators, local systems and covers.

A :class:`DiscreteBundleOperator` acts on vertex sections by

    (Ds)(e) = A_e·s(head e) − B_e·s(tail e),

with invertible r×r coefficients. Local systems are edge holonomies that are
the identity on a marked spanning tree, and covers are given by one group
element per edge. Sheets of a cover are the left cosets G/C; the lifted edge
(e, c) runs from (tail e, c) to (head e, φ_e·c).

Index conventions (used by every matrix below):

* base domain (v, a) ↦ v·r + a, base codomain (e, a) ↦ e·r + a;
* twisted domain (v, a, b) ↦ v·r·m + a·m + b (Kronecker order ℝ^r ⊗ ℝ^m);
* cover domain (v, c, a) ↦ (v·N + c)·r + a, cover codomain likewise per edge.
"""
import itertools
import logging
import random
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import sympy

from eqbn.exact_linalg import (
    Matrix,
    Vector,
    dot,
    is_invertible,
    kronecker,
    left_nullspace_basis,
    nullspace_basis,
    rank,
    same_column_span,
    vectors_to_matrix,
)
from eqbn.fredholm_reduction import default_split
from eqbn.rep_theory import (
    FiniteGroup,
    IrreducibleCatalog,
    Representation,
    coset_labels,
    coset_permutation_rep,
    fixed_subspace,
    is_normal,
    isotypic_dimension,
    multiplicities,
    representation_on_subspace_action,
    tensor,
)
from eqbn.scalars import GAUSSIAN, RATIONAL, GaussianRational, join_kinds, zero

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaseGraph:
    """A connected directed multigraph with a marked spanning tree."""

    vertices: int
    edges: Tuple[Tuple[int, int], ...]
    tree: Tuple[int, ...]

    def __post_init__(self) -> None:
        for tail, head in self.edges:
            if not (0 <= tail < self.vertices and 0 <= head < self.vertices):
                raise ValueError(f"Edge ({tail}, {head}) has an unknown endpoint")
        if not nx.is_connected(self.as_networkx()):
            raise ValueError("Base graph must be connected")
        if len(set(self.tree)) != self.vertices - 1:
            raise ValueError("Spanning tree must have vertices - 1 edges")
        tree_graph = nx.MultiGraph()
        tree_graph.add_nodes_from(range(self.vertices))
        for index in self.tree:
            if not 0 <= index < len(self.edges):
                raise ValueError(f"Tree edge index {index} out of range")
            tree_graph.add_edge(*self.edges[index])
        if not nx.is_tree(tree_graph):
            raise ValueError("Marked tree edges contain a cycle")

    def as_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertices))
        graph.add_edges_from(self.edges)
        return graph

    @property
    def non_tree_edges(self) -> List[int]:
        tree = set(self.tree)
        return [i for i in range(len(self.edges)) if i not in tree]

    def tail(self, e: int) -> int:
        return self.edges[e][0]

    def head(self, e: int) -> int:
        return self.edges[e][1]


@dataclass(frozen=True)
class DiscreteBundleOperator:
    graph: BaseGraph
    rank: int
    coeffs: Tuple[Tuple[Matrix, Matrix], ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.graph.edges):
            raise ValueError("One coefficient pair per edge is required")
        for e, (a, b) in enumerate(self.coeffs):
            for m in (a, b):
                if m.shape != (self.rank, self.rank):
                    raise ValueError(f"Edge {e}: coefficients must be {self.rank}x{self.rank}")
                if not is_invertible(m):
                    raise ValueError(f"Edge {e}: coefficients must be invertible")

    @property
    def kind(self) -> str:
        return join_kinds(m.kind for pair in self.coeffs for m in pair)

    def matrix(self) -> Matrix:
        r = self.rank
        n_v, n_e = self.graph.vertices, len(self.graph.edges)
        z = zero(self.kind)
        rows = [[z] * (r * n_v) for _ in range(r * n_e)]
        for e, (a, b) in enumerate(self.coeffs):
            tail, head = self.graph.edges[e]
            _add_block(rows, e * r, head * r, a, 1)
            _add_block(rows, e * r, tail * r, b, -1)
        return Matrix(rows, self.kind, r * n_v)


@dataclass(frozen=True)
class LocalSystem:
    graph: BaseGraph
    rank: int
    holonomies: Tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if len(self.holonomies) != len(self.graph.edges):
            raise ValueError("One holonomy per edge is required")
        identity = Matrix.identity(self.rank, self.kind)
        for e, h in enumerate(self.holonomies):
            if h.shape != (self.rank, self.rank) or not is_invertible(h):
                raise ValueError(f"Edge {e}: holonomy must be an invertible {self.rank}x{self.rank} matrix")
        for e in self.graph.tree:
            if self.holonomies[e] != identity:
                raise ValueError(f"Tree edge {e} must carry the identity holonomy")

    @property
    def kind(self) -> str:
        return join_kinds(h.kind for h in self.holonomies) if self.holonomies else RATIONAL


@dataclass(frozen=True)
class CoverSpec:
    group: FiniteGroup
    phi: Tuple[int, ...]
    subgroup: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.group.is_subgroup(self.subgroup):
            raise ValueError("Cover subgroup is not closed under product and inverse")
        if any(not 0 <= x < self.group.order for x in self.phi):
            raise ValueError("Edge labels must be group elements")

    @cached_property
    def labels(self) -> List[int]:
        return coset_labels(self.group, sorted(self.subgroup))

    @property
    def sheets(self) -> int:
        return self.group.order // len(set(self.subgroup))

    @cached_property
    def coset_reps(self) -> List[int]:
        labels = self.labels
        return [labels.index(i) for i in range(self.sheets)]

    def act(self, g: int, sheet: int) -> int:
        """Left translation g·(x C) of a sheet."""
        return self.labels[self.group.mul(g, self.coset_reps[sheet])]

    def check_graph(self, graph: BaseGraph) -> None:
        if len(self.phi) != len(graph.edges):
            raise ValueError("One group element per edge is required")
        for e in graph.tree:
            if self.phi[e] != self.group.identity:
                raise ValueError(f"Tree edge {e} must carry the identity element")

    def cover_graph(self, graph: BaseGraph) -> nx.MultiGraph:
        cover = nx.MultiGraph()
        n = self.sheets
        cover.add_nodes_from((v, c) for v in range(graph.vertices) for c in range(n))
        for e, (tail, head) in enumerate(graph.edges):
            for c in range(n):
                cover.add_edge((tail, c), (head, self.act(self.phi[e], c)), key=(e, c))
        return cover

    def is_connected(self, graph: BaseGraph) -> bool:
        return nx.is_connected(self.cover_graph(graph))


def _add_block(rows: List[List[Any]], r0: int, c0: int, block: Matrix, sign: int) -> None:
    for i in range(block.rows):
        for j in range(block.cols):
            x = block[i, j]
            if x:
                rows[r0 + i][c0 + j] = rows[r0 + i][c0 + j] + (x if sign > 0 else -x)


def _check_same_graph(d: DiscreteBundleOperator, graph: BaseGraph) -> None:
    if d.graph != graph:
        raise ValueError("Operator and local system live on different graphs")


def _kernel_dims(m: Matrix) -> Tuple[int, int]:
    rk = rank(m)
    return m.cols - rk, m.rows - rk


# PUBLIC API


def trivial_local_system(graph: BaseGraph, m: int = 1, kind: str = RATIONAL) -> LocalSystem:
    identity = Matrix.identity(m, kind)
    return LocalSystem(graph, m, tuple(identity for _ in graph.edges))


def local_system_from_rep(
    graph: BaseGraph, cover: CoverSpec, rep: Representation
) -> LocalSystem:
    """Local system with holonomy ρ(φ_e) on every edge."""
    cover.check_graph(graph)
    return LocalSystem(graph, rep.degree, tuple(rep(g) for g in cover.phi))


def twist_operator(d: DiscreteBundleOperator, v: LocalSystem) -> Matrix:
    """(D^V u)(e) = (A_e ⊗ I)·u(head e) − (B_e ⊗ h_e)·u(tail e)."""
    _check_same_graph(d, v.graph)
    r, m = d.rank, v.rank
    kind = join_kinds([d.kind, v.kind])
    n_v, n_e = d.graph.vertices, len(d.graph.edges)
    z = zero(kind)
    rows = [[z] * (r * m * n_v) for _ in range(r * m * n_e)]
    identity = Matrix.identity(m, kind)
    for e, (a, b) in enumerate(d.coeffs):
        tail, head = d.graph.edges[e]
        _add_block(rows, e * r * m, head * r * m, kronecker(a, identity), 1)
        _add_block(rows, e * r * m, tail * r * m, kronecker(b, v.holonomies[e]), -1)
    return Matrix(rows, kind, r * m * n_v)


def pullback_operator(d: DiscreteBundleOperator, c: CoverSpec) -> Matrix:
    """π*D on the cover graph: (A_e, B_e) copied along every lifted edge."""
    c.check_graph(d.graph)
    if not c.is_connected(d.graph):
        raise ValueError("Cover graph is disconnected")
    r, n = d.rank, c.sheets
    n_v, n_e = d.graph.vertices, len(d.graph.edges)
    z = zero(d.kind)
    rows = [[z] * (r * n * n_v) for _ in range(r * n * n_e)]
    for e, (a, b) in enumerate(d.coeffs):
        tail, head = d.graph.edges[e]
        for sheet in range(n):
            row0 = (e * n + sheet) * r
            _add_block(rows, row0, (head * n + c.act(c.phi[e], sheet)) * r, a, 1)
            _add_block(rows, row0, (tail * n + sheet) * r, b, -1)
    return Matrix(rows, d.kind, r * n * n_v)


def pullback_section(s: Sequence[Any], rank_r: int, n_vertices: int, sheets: int) -> Vector:
    """π*s: copy a vertex section to every sheet."""
    out = []
    for v in range(n_vertices):
        block = list(s[v * rank_r : (v + 1) * rank_r])
        for _ in range(sheets):
            out.extend(block)
    return tuple(out)


def pushforward_trivial_system(graph: BaseGraph, c: CoverSpec) -> LocalSystem:
    """V = π_*ℝ: holonomy P_e[φ_e·c, c] = 1 on every edge."""
    c.check_graph(graph)
    rep = coset_permutation_rep(c.group, sorted(c.subgroup))
    return LocalSystem(graph, c.sheets, tuple(rep(g) for g in c.phi))


def local_system_monodromy(v: LocalSystem, c: CoverSpec) -> Representation:
    """The representation of G through which the holonomies of ``v`` factor.

    Each edge label φ_e must always carry the same holonomy, the labels must
    generate G, and the closure of the pairs (φ_e, h_e) must be a
    homomorphism.
    """
    c.check_graph(v.graph)
    images: Dict[int, Matrix] = {c.group.identity: Matrix.identity(v.rank, v.kind)}
    pairs = list(zip(c.phi, v.holonomies))
    for g, h in pairs:
        if images.setdefault(g, h) != h:
            raise ValueError(f"Element {g} carries two different holonomies")
    frontier = list(images)
    while frontier:
        x = frontier.pop()
        for g, h in pairs:
            y = c.group.mul(x, g)
            product = images[x] @ h
            if y not in images:
                images[y] = product
                frontier.append(y)
            elif images[y] != product:
                raise ValueError("Holonomies do not factor through the cover group")
    if len(images) != c.group.order:
        raise ValueError("Edge labels do not generate the cover group")
    return Representation(
        c.group, v.rank, tuple(images[x] for x in range(c.group.order)), "monodromy"
    )


def _reindexing(d: DiscreteBundleOperator, c: CoverSpec) -> Tuple[List[int], List[int]]:
    """π_* as index maps: cover position ↦ twisted position."""
    r, n = d.rank, c.sheets
    domain = [0] * (r * n * d.graph.vertices)
    for v in range(d.graph.vertices):
        for sheet in range(n):
            for a in range(r):
                domain[(v * n + sheet) * r + a] = v * r * n + a * n + sheet
    codomain = [0] * (r * n * len(d.graph.edges))
    for e in range(len(d.graph.edges)):
        for sheet in range(n):
            target = c.act(c.phi[e], sheet)
            for a in range(r):
                codomain[(e * n + sheet) * r + a] = e * r * n + a * n + target
    return domain, codomain


def _permute_rows(m: Matrix, positions: Sequence[int]) -> Matrix:
    """Matrix whose row positions[i] is row i of m."""
    rows: List[Any] = [None] * m.rows
    for i, p in enumerate(positions):
        rows[p] = list(m.row(i))
    return Matrix(rows, m.kind, m.cols)


def _permute_vector(v: Sequence[Any], positions: Sequence[int]) -> Vector:
    out: List[Any] = [None] * len(v)
    for i, p in enumerate(positions):
        out[p] = v[i]
    return tuple(out)


def verify_pullback_equals_twist(d: DiscreteBundleOperator, c: CoverSpec) -> Dict[str, Any]:
    """Conjugate π*D by the reindexing π_* and compare with D^{π_*ℝ}."""
    pull = pullback_operator(d, c)
    twist = twist_operator(d, pushforward_trivial_system(d.graph, c))
    domain, codomain = _reindexing(d, c)
    conjugated = _permute_rows(_permute_rows(pull, codomain).transpose(), domain).transpose()
    equal = conjugated == twist
    if not equal:
        logger.warning("pullback and twist differ after reindexing")
    return {
        "equal": equal,
        "sheets": c.sheets,
        "domain_permutation": domain,
        "codomain_permutation": codomain,
    }


def _deck_action(
    d: DiscreteBundleOperator, c: CoverSpec, k: int, on_edges: bool
) -> Matrix:
    """(k·s)(x, gC) = s(x, gkC) on vertex (or edge) sections of the cover."""
    r, n = d.rank, c.sheets
    count = len(d.graph.edges) if on_edges else d.graph.vertices
    reps = c.coset_reps
    labels = c.labels
    size = r * n * count
    rows = [[0] * size for _ in range(size)]
    for x in range(count):
        for sheet in range(n):
            moved = labels[c.group.mul(reps[sheet], k)]
            for a in range(r):
                rows[(x * n + sheet) * r + a][(x * n + moved) * r + a] = 1
    return Matrix(rows, RATIONAL, size)


def _check_normal_cover(c: CoverSpec, catalog: IrreducibleCatalog) -> None:
    if not is_normal(c.group, c.subgroup):
        raise ValueError(
            "Cover subgroup is not normal: pass to its normal core and the "
            "quotient group first"
        )
    if catalog.group != c.group:
        raise ValueError("Catalog belongs to a different group")


def deck_isotypic_report(
    d: DiscreteBundleOperator, c: CoverSpec, catalog: IrreducibleCatalog
) -> Dict[str, int]:
    """Real dimension of each V_α-isotypic part of ker π*D under the deck action."""
    _check_normal_cover(c, catalog)
    kernel = nullspace_basis(pullback_operator(d, c))
    if not kernel:
        return {name: 0 for name in catalog.names}
    deck = [_deck_action(d, c, k, on_edges=False) for k in range(c.group.order)]
    deck_rep = representation_on_subspace_action(c.group, deck, kernel, "deck")
    return {
        name: isotypic_dimension(deck_rep, irrep, k)
        for irrep, k, name in zip(catalog.irreps, catalog.k, catalog.names)
    }


def kernel_decomposition_report(
    d: DiscreteBundleOperator, c: CoverSpec, catalog: IrreducibleCatalog
) -> Dict[str, Any]:
    """dim ker π*D against the twisted kernels ker D^{V_α}.

    Uses ker π*D ≅ ker D^V with V = π_*ℝ ≅ ⊕ V_α^{m_α}, so
    dim_ℝ ker π*D = Σ m_α·dim_ℝ ker D^{V_α}; for the regular cover
    m_α = deg(V_α)/k_α and this reads Σ deg(V_α)·dim_{𝕂_α} ker D^{V_α}.
    The deck group acts on ker π*D and its V_α-isotypic part has real
    dimension deg(V_α)·dim_{𝕂_α} ker D^{V_α} for α trivial on C.
    """
    _check_normal_cover(c, catalog)
    dim_pull = len(nullspace_basis(pullback_operator(d, c)))
    perm = coset_permutation_rep(c.group, sorted(c.subgroup))
    mult = multiplicities(perm, catalog)
    measured = deck_isotypic_report(d, c, catalog)
    rows = []
    predicted = 0
    isotypic_ok = True
    for irrep, k, m_alpha, name in zip(catalog.irreps, catalog.k, mult, catalog.names):
        twisted = twist_operator(d, local_system_from_rep(d.graph, c, irrep))
        dim_ker, dim_coker = _kernel_dims(twisted)
        if dim_ker % k:
            raise ValueError(f"dim ker D^{name} = {dim_ker} is not a multiple of k = {k}")
        predicted += m_alpha * dim_ker
        expected_iso = irrep.degree * (dim_ker // k) if m_alpha else 0
        measured_iso = measured[name]
        isotypic_ok = isotypic_ok and expected_iso == measured_iso
        rows.append(
            {
                "irrep": name,
                "k": k,
                "degree": irrep.degree,
                "multiplicity": m_alpha,
                "dim_ker_twist_real": dim_ker,
                "dim_ker_twist_K": dim_ker // k,
                "dim_coker_twist_real": dim_coker,
                "isotypic_expected": expected_iso,
                "isotypic_measured": measured_iso,
            }
        )
    return {
        "dim_ker_pullback": dim_pull,
        "predicted": predicted,
        "identity_holds": dim_pull == predicted,
        "isotypic_holds": isotypic_ok,
        "per_irrep": rows,
    }


def petri_matrix(
    d: DiscreteBundleOperator,
    kernel_basis: Sequence[Vector],
    cokernel_basis: Sequence[Vector],
    u: Sequence[int],
) -> Matrix:
    """ϖ(s_i ⊗ t_j)(e) = s_i(tail e) ⊗ t_j(e) for e ∈ U.

    Columns are indexed by i·|coker| + j, rows by (position of e in U, a, b).
    """
    m = d.matrix()
    return _petri_on(m, d.graph, d.rank, kernel_basis, cokernel_basis, u, 1)


def _petri_on(
    m: Matrix,
    graph: BaseGraph,
    r: int,
    kernel_basis: Sequence[Vector],
    cokernel_basis: Sequence[Vector],
    u: Sequence[int],
    sheets: int,
) -> Matrix:
    for s in kernel_basis:
        if len(s) != m.cols or any(m.apply(s)):
            raise ValueError("Kernel basis vector is not in ker D")
    mt = m.transpose()
    for t in cokernel_basis:
        if len(t) != m.rows or any(mt.apply(t)):
            raise ValueError("Cokernel basis vector is not in ker Dᵀ")
    kind = m.kind
    z = zero(kind)
    n_k, n_c = len(kernel_basis), len(cokernel_basis)
    rows = []
    for e in u:
        tail = graph.tail(e)
        for sheet in range(sheets):
            # Lifted edge (e, sheet) starts at (tail e, sheet).
            v0 = (tail * sheets + sheet) * r
            e0 = (e * sheets + sheet) * r
            for a in range(r):
                for b in range(r):
                    row = [z] * (n_k * n_c)
                    for i, s in enumerate(kernel_basis):
                        x = s[v0 + a]
                        if not x:
                            continue
                        for j, t in enumerate(cokernel_basis):
                            y = t[e0 + b]
                            if y:
                                row[i * n_c + j] = x * y
                    rows.append(row)
    return Matrix(rows, kind, n_k * n_c)


def petri_condition_holds(petri: Matrix) -> bool:
    return rank(petri) == petri.cols


def _coefficient_matrix(b: Sequence[Any], n_k: int, n_c: int) -> Matrix:
    return Matrix([list(b[i * n_c : (i + 1) * n_c]) for i in range(n_k)], None, n_c)


def _sympy_scalar(x: Any) -> sympy.Expr:
    if isinstance(x, GaussianRational):
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator
        )
    f = Fraction(x)
    return sympy.Rational(f.numerator, f.denominator)


def _exact_root(root: sympy.Expr, kind: str) -> Optional[Any]:
    re, im = sympy.re(root), sympy.im(root)
    if not (re.is_Rational and im.is_Rational):
        return None
    re_f = Fraction(int(re.p), int(re.q))
    if kind == RATIONAL:
        return re_f if im == 0 else None
    return GaussianRational(re_f, Fraction(int(im.p), int(im.q)))


def _rank_report(
    holds: Optional[bool],
    exhaustive: bool,
    method: str,
    nullity: int,
    witness: Any = None,
    **extra: Any,
) -> Dict[str, Any]:
    return {
        "holds": holds,
        "exhaustive": exhaustive,
        "method": method,
        "witness": witness,
        "nullity": nullity,
        **extra,
    }


def _pencil_check(
    null: Sequence[Vector], n_k: int, n_c: int, rho: int, kind: str
) -> Dict[str, Any]:
    """Decide whether some nonzero c₁N₁ + c₂N₂ has rank ≤ ρ.

    The point [1 : 0] is N₁ itself. Otherwise B(t) = t·N₁ + N₂ has rank ≤ ρ
    exactly at the common roots of its (ρ+1)-minors, i.e. at the roots of
    their gcd: real roots over ℚ, any root over ℚ[i].
    """
    first, second = null
    if rank(_coefficient_matrix(first, n_k, n_c)) <= rho:
        return _rank_report(False, True, "pencil", 2, list(first), parameter="oo")
    t = sympy.Symbol("t")
    a = [_sympy_scalar(x) for x in first]
    b = [_sympy_scalar(x) for x in second]
    pencil = sympy.Matrix(n_k, n_c, lambda i, j: t * a[i * n_c + j] + b[i * n_c + j])
    g = sympy.Integer(0)
    for rows in itertools.combinations(range(n_k), rho + 1):
        for cols in itertools.combinations(range(n_c), rho + 1):
            g = sympy.gcd(g, sympy.expand(pencil.extract(list(rows), list(cols)).det()))
            if g.is_number and g != 0:
                return _rank_report(True, True, "pencil", 2)
    if g == 0:
        return _rank_report(False, True, "pencil", 2, list(second), parameter="0")
    poly = sympy.Poly(g, t)
    if kind == RATIONAL:
        roots = sympy.real_roots(poly)
        if not roots:
            return _rank_report(True, True, "pencil", 2)
    else:
        roots = list(sympy.roots(poly))
    for root in roots:
        value = _exact_root(root, kind)
        if value is not None:
            witness = [value * x + y for x, y in zip(first, second)]
            return _rank_report(False, True, "pencil", 2, witness, parameter=str(value))
    # The rank drops at an irrational parameter, so no exact witness exists.
    parameter = str(roots[0]) if roots else str(g)
    return _rank_report(False, True, "pencil", 2, parameter=parameter)


def petri_rank_check(
    petri: Matrix, n_kernel: int, n_cokernel: int, rho: int, bound: int = 1
) -> Dict[str, Any]:
    """Search for nonzero B ∈ ker ϖ of tensor rank ≤ ρ.

    B is read as an n_kernel × n_cokernel coefficient matrix. The answer is
    exact (``exhaustive``) when ρ = 0, when ker ϖ = 0, when ρ ≥ min(d, e),
    when ker ϖ is a line, and when ker ϖ is a plane over ℚ or ℚ[i] (the
    pencil of (ρ+1)-minors is solved with sympy). Otherwise integer
    combinations of the nullspace basis in [−bound, bound] are tried: a hit
    gives ``holds: False`` with a witness, a miss gives ``holds: None``.
    """
    if rho < 0:
        raise ValueError(f"rho must be non-negative, got {rho}")
    null = nullspace_basis(petri)
    if rho == 0 or not null:
        return _rank_report(True, True, "trivial", len(null))
    if rho >= min(n_kernel, n_cokernel):
        return _rank_report(False, True, "trivial", len(null), list(null[0]))
    if len(null) == 1:
        low_rank = rank(_coefficient_matrix(null[0], n_kernel, n_cokernel)) <= rho
        return _rank_report(not low_rank, True, "line", 1, list(null[0]) if low_rank else None)
    if len(null) == 2 and petri.kind in (RATIONAL, GAUSSIAN):
        return _pencil_check(null, n_kernel, n_cokernel, rho, petri.kind)
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(null)):
        if not any(coeffs):
            continue
        b = [
            sum((c * v[p] for c, v in zip(coeffs, null) if c), zero(petri.kind))
            for p in range(petri.cols)
        ]
        if rank(_coefficient_matrix(b, n_kernel, n_cokernel)) <= rho:
            return _rank_report(False, False, "box", len(null), b)
    logger.info("rank-%d Petri search found no witness in box %d; undetermined", rho, bound)
    return _rank_report(None, False, "box", len(null))


def ev_matrix(d: DiscreteBundleOperator, u: Sequence[int]) -> Tuple[Matrix, List[Vector], List[Vector]]:
    """Matrix of ev: ⊕_{e∈U} Hom(ℝ^r, ℝ^r) → Hom(ker D, coker D).

    The image of s under A is (A_e s(tail e))_e reduced modulo im D in the
    default splitting; coker coordinates come from [Im | Ck]⁻¹. Rows are
    indexed i·|coker| + j, columns by (position of e in U, a, b) for A_e = E_ab.
    """
    m = d.matrix()
    split = default_split(m)
    frame_inv = split.codomain_frame.inverse()
    n_im = len(split.image_basis)
    kernel = list(split.kernel_basis)
    coker = list(split.cokernel_lift_basis)
    r = d.rank
    n_k, n_c = len(kernel), len(coker)
    z = zero(m.kind)
    columns = []
    for e in u:
        tail = d.graph.tail(e)
        for a in range(r):
            for b in range(r):
                column = [z] * (n_k * n_c)
                for i, s in enumerate(kernel):
                    x = s[tail * r + b]
                    if not x:
                        continue
                    y = [z] * m.rows
                    y[e * r + a] = x
                    coords = frame_inv.apply(y)[n_im:]
                    for j in range(n_c):
                        column[i * n_c + j] = coords[j]
                columns.append(column)
    return vectors_to_matrix(columns, n_k * n_c, m.kind), kernel, coker


def ev_annihilator_check(d: DiscreteBundleOperator, u: Sequence[int]) -> Dict[str, Any]:
    """annihilator(im ev) == ker ϖ_U inside ker D ⊗ ker Dᵀ.

    Hom(ker D, coker D) is paired with ker D ⊗ ker Dᵀ by
    ⟨φ, s ⊗ t⟩ = ⟨t, φ(s)⟩, evaluated on the cokernel lifts through their Gram
    matrix with ker Dᵀ.
    """
    ev, kernel, coker_lift = ev_matrix(d, u)
    m = d.matrix()
    cokernel = left_nullspace_basis(m)
    n_k, n_c = len(kernel), len(cokernel)
    gram = Matrix(
        [[dot(t, ck) for ck in coker_lift] for t in cokernel], m.kind, len(coker_lift)
    ) if n_c else Matrix.zeros(0, 0, m.kind)
    # Pairing matrix between Hom(ker, coker) coordinates and tensors s_i ⊗ t_j.
    pairing_rows = []
    for i in range(n_k):
        for j in range(n_c):
            row = [zero(m.kind)] * (n_k * n_c)
            for c in range(n_c):
                g = gram[j, c]
                if g:
                    row[i * n_c + c] = g
            pairing_rows.append(row)
    pairing = Matrix(pairing_rows, m.kind, n_k * n_c)
    # B annihilates im ev iff (pairing·ev)ᵀ·B = 0.
    paired = (pairing @ ev) if ev.cols else Matrix.zeros(n_k * n_c, 0, m.kind)
    annihilator = nullspace_basis(paired.transpose())
    petri = petri_matrix(d, kernel, cokernel, u)
    petri_null = nullspace_basis(petri)
    size = n_k * n_c
    a = vectors_to_matrix(annihilator, size, m.kind)
    b = vectors_to_matrix(petri_null, size, m.kind)
    equal = len(annihilator) == len(petri_null) and (
        size == 0 or same_column_span(a, b)
    )
    ev_rank = rank(ev) if ev.cols and ev.rows else 0
    petri_injective = not petri_null
    return {
        "equal": equal,
        "annihilator_dim": len(annihilator),
        "petri_nullity": len(petri_null),
        "ev_rank": ev_rank,
        "hom_dim": size,
        "petri_injective": petri_injective,
        "ev_surjective": ev_rank == size,
        "corollary_holds": (not petri_injective) or ev_rank == size,
    }


def twisted_petri_matrix(
    d: DiscreteBundleOperator,
    v: LocalSystem,
    kernel_basis: Sequence[Vector],
    cokernel_basis: Sequence[Vector],
    u: Sequence[int],
) -> Matrix:
    """𝔙-equivariant Petri map with trace contraction over the fiber of V.

    ϖ^V(s ⊗ t)(e)[a, b] = Σ_c (h_e s(tail e))[a, c]·t(e)[b, c], i.e. s is
    transported into the head fiber before contracting with t.
    """
    r, m = d.rank, v.rank
    kind = join_kinds([d.kind, v.kind])
    z = zero(kind)
    n_k, n_c = len(kernel_basis), len(cokernel_basis)
    transported: Dict[Tuple[int, int], List[Any]] = {}
    for e in u:
        tail = d.graph.tail(e)
        h = v.holonomies[e]
        for i, s in enumerate(kernel_basis):
            block = s[tail * r * m : (tail + 1) * r * m]
            moved = []
            for a in range(r):
                moved.extend(h.apply(block[a * m : (a + 1) * m]))
            transported[(e, i)] = moved
    rows = []
    for e in u:
        for a in range(r):
            for b in range(r):
                row = [z] * (n_k * n_c)
                for i in range(n_k):
                    s_val = transported[(e, i)][a * m : (a + 1) * m]
                    for j, t in enumerate(cokernel_basis):
                        t_val = t[e * r * m + b * m : e * r * m + (b + 1) * m]
                        row[i * n_c + j] = dot(s_val, t_val)
                rows.append(row)
    return Matrix(rows, kind, n_k * n_c)


def equivariant_petri_check(
    d: DiscreteBundleOperator, c: CoverSpec, u: Sequence[int]
) -> Dict[str, Any]:
    """On G-invariant tensors: ϖ^G = π* ∘ ϖ^𝔙 ∘ τ, up to the sheet count.

    For invariant B̃ ∈ (ker π*D ⊗ ker (π*D)ᵀ)^G the pulled-back Petri
    section is constant along fibers, and its value equals (1/N)·ϖ^V(τB̃)
    with V = π_*ℝ and τ the reindexing of both factors.
    """
    if not is_normal(c.group, c.subgroup):
        raise ValueError("Equivariant Petri comparison needs a normal cover subgroup")
    pull = pullback_operator(d, c)
    kernel = nullspace_basis(pull)
    cokernel = left_nullspace_basis(pull)
    n = c.sheets
    order = c.group.order
    deck_v = [_deck_action(d, c, k, on_edges=False) for k in range(order)]
    deck_e = [_deck_action(d, c, k, on_edges=True) for k in range(order)]
    rep_k = representation_on_subspace_action(c.group, deck_v, kernel, "ker")
    rep_c = representation_on_subspace_action(c.group, deck_e, cokernel, "coker")
    invariant = fixed_subspace(tensor(rep_k, rep_c)) if kernel and cokernel else []
    size = len(kernel) * len(cokernel)
    pulled = _petri_on(pull, d.graph, d.rank, kernel, cokernel, u, n)
    system = pushforward_trivial_system(d.graph, c)
    domain, codomain = _reindexing(d, c)
    tau_kernel = [_permute_vector(s, domain) for s in kernel]
    tau_coker = [_permute_vector(t, codomain) for t in cokernel]
    twisted = twisted_petri_matrix(d, system, tau_kernel, tau_coker, u)
    inv = vectors_to_matrix(invariant, size, pull.kind)
    lhs = pulled @ inv
    base = (twisted @ inv).scale(Fraction(1, n))
    # π*: copy each base-edge value to every sheet over it.
    r2 = d.rank * d.rank
    base_rows = base.to_lists()
    copied = []
    for p in range(len(u)):
        for _ in range(n):
            copied.extend(base_rows[p * r2 : (p + 1) * r2])
    rhs = Matrix(copied, base.kind, base.cols)
    equal = lhs == rhs
    if not equal:
        logger.warning("equivariant Petri identity failed on %d invariant tensors", len(invariant))
    return {
        "equal": equal,
        "invariant_tensors": len(invariant),
        "dim_kernel": len(kernel),
        "dim_cokernel": len(cokernel),
    }


def index_bookkeeping(d: DiscreteBundleOperator, v: LocalSystem) -> Dict[str, Any]:
    """ind D^V = rk V · ind D, both sides from exact ranks."""
    dk, dc = _kernel_dims(d.matrix())
    tk, tc = _kernel_dims(twist_operator(d, v))
    return {
        "index_base": dk - dc,
        "index_twist": tk - tc,
        "rank_local_system": v.rank,
        "holds": tk - tc == v.rank * (dk - dc),
    }


def random_invertible(rng: random.Random, r: int, spread: int = 3) -> Matrix:
    while True:
        m = Matrix(
            [[rng.randint(-spread, spread) for _ in range(r)] for _ in range(r)],
            RATIONAL,
            r,
        )
        if is_invertible(m):
            return m


def random_graph(rng: random.Random, n_vertices: int, extra_edges: int) -> BaseGraph:
    edges = []
    for v in range(1, n_vertices):
        parent = rng.randrange(v)
        edges.append((parent, v) if rng.random() < 0.5 else (v, parent))
    tree = tuple(range(len(edges)))
    for _ in range(extra_edges):
        a, b = rng.randrange(n_vertices), rng.randrange(n_vertices)
        edges.append((a, b))
    return BaseGraph(n_vertices, tuple(edges), tree)


def random_operator(
    rng: random.Random, graph: BaseGraph, r: int, flat: bool = True
) -> DiscreteBundleOperator:
    """Random invertible coefficients.

    Flat operators have A_e = M_e F_head⁻¹ and B_e = M_e F_tail⁻¹ for random
    vertex frames F_v, so s(v) = F_v·x is in the kernel for every constant x.
    """
    coeffs = []
    if flat:
        frames = [random_invertible(rng, r) for _ in range(graph.vertices)]
        inverses = [f.inverse() for f in frames]
        for tail, head in graph.edges:
            m = random_invertible(rng, r)
            coeffs.append((m @ inverses[head], m @ inverses[tail]))
    else:
        for _ in graph.edges:
            coeffs.append((random_invertible(rng, r), random_invertible(rng, r)))
    return DiscreteBundleOperator(graph, r, tuple(coeffs))


def random_cover(
    rng: random.Random,
    graph: BaseGraph,
    group: FiniteGroup,
    subgroup: Optional[Sequence[int]] = None,
    attempts: int = 50,
) -> CoverSpec:
    """Random edge labels (identity on the tree) with a connected cover."""
    subgroup = tuple(sorted(subgroup if subgroup is not None else [group.identity]))
    free = graph.non_tree_edges
    for _ in range(attempts):
        phi = [group.identity] * len(graph.edges)
        for e in free:
            phi[e] = rng.randrange(group.order)
        cover = CoverSpec(group, tuple(phi), subgroup)
        if cover.is_connected(graph):
            return cover
    if len(free) < len(group.generators):
        raise ValueError("Not enough non-tree edges to generate the group")
    phi = [group.identity] * len(graph.edges)
    for e, g in zip(free, group.generators):
        phi[e] = g
    return CoverSpec(group, tuple(phi), subgroup)


def random_instance(
    rng: random.Random,
    group: FiniteGroup,
    subgroup: Optional[Sequence[int]] = None,
    max_vertices: int = 6,
    max_rank: int = 2,
) -> Tuple[DiscreteBundleOperator, CoverSpec]:
    n_vertices = rng.randint(2, max_vertices)
    extra = max(2, len(group.generators)) + rng.randint(0, 1)
    graph = random_graph(rng, n_vertices, extra)
    d = random_operator(rng, graph, rng.randint(1, max_rank), flat=rng.random() < 0.7)
    return d, random_cover(rng, graph, group, subgroup)


def loop_graph() -> BaseGraph:
    """Two vertices joined by two edges 0→1; edge 0 is the tree."""
    return BaseGraph(2, ((0, 1), (0, 1)), (0,))


def discrete_derivative(graph: BaseGraph, r: int = 1) -> DiscreteBundleOperator:
    identity = Matrix.identity(r)
    return DiscreteBundleOperator(graph, r, tuple((identity, identity) for _ in graph.edges))
