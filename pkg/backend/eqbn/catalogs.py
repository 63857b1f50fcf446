"""Built-in groups and their irreducible real representations.

Every group is generated from faithful integer matrices, and every
irreducible representation is given by integral generator images of the
correct order, so no irrational cos/sin entries are ever needed.
"""
import logging
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from eqbn.exact_linalg import Matrix
from eqbn.rep_theory import (
    FiniteGroup,
    IrreducibleCatalog,
    Representation,
    coset_permutation_rep,
    group_from_generators,
    subrepresentation,
)
from eqbn.scalars import QUATERNION, RATIONAL, Quaternion, regular_matrix

logger = logging.getLogger(__name__)


def _m(rows: Sequence[Sequence[int]]) -> Matrix:
    return Matrix(rows, RATIONAL)


def _cyclic_shift(n: int) -> Matrix:
    return _m([[1 if i == (j + 1) % n else 0 for j in range(n)] for i in range(n)])


def _permutation(perm: Sequence[int]) -> Matrix:
    n = len(perm)
    return _m([[1 if perm[j] == i else 0 for j in range(n)] for i in range(n)])


# Integral 2x2 matrices of order 3, 4 and 6 (rotations by 2π/3, π/2, π/3 up
# to conjugation).
ROTATION_ORDER_3 = ((0, -1), (1, -1))
ROTATION_ORDER_4 = ((0, -1), (1, 0))
ROTATION_ORDER_6 = ((1, -1), (1, 0))

_ROTATIONS = {3: ROTATION_ORDER_3, 4: ROTATION_ORDER_4, 6: ROTATION_ORDER_6}


def _power(m: Matrix, k: int) -> Matrix:
    out = Matrix.identity(m.rows, m.kind)
    for _ in range(k):
        out = out @ m
    return out


def _cyclic(n: int) -> Tuple[FiniteGroup, List[Representation], List[int]]:
    if n == 2:
        group = group_from_generators([_m([[-1]])], name="Z2")
    else:
        group = group_from_generators([_cyclic_shift(n)], name=f"Z{n}")
    irreps = [Representation.from_generator_images(group, [_m([[1]])], "trivial")]
    k = [1]
    if n % 2 == 0:
        irreps.append(Representation.from_generator_images(group, [_m([[-1]])], "sign"))
        k.append(1)
    for w in range(1, (n - 1) // 2 + 1):
        # The generator acts by rotation through 2πw/n, of order n/gcd(n, w).
        order = n // _gcd(n, w)
        base = _m(_ROTATIONS[_rotation_order_for(order)])
        image = _power(base, _rotation_power(order, n, w))
        irreps.append(Representation.from_generator_images(group, [image], f"rot{w}"))
        k.append(2)
    return group, irreps, k


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _rotation_order_for(order: int) -> int:
    if order not in _ROTATIONS:
        raise ValueError(f"No rational rotation of order {order}")
    return order


def _rotation_power(order: int, n: int, w: int) -> int:
    # rot(2πw/n) = rot(2π/order)^(w·order/n) with w·order/n coprime to order.
    return (w * order // n) % order


def _symmetric3() -> Tuple[FiniteGroup, List[Representation], List[int]]:
    transposition = _permutation([1, 0, 2])
    three_cycle = _permutation([1, 2, 0])
    group = group_from_generators([transposition, three_cycle], name="S3")
    perm = Representation.from_generator_images(group, [transposition, three_cycle], "perm")
    trivial = Representation.from_generator_images(group, [_m([[1]]), _m([[1]])], "trivial")
    sign = Representation.from_generator_images(group, [_m([[-1]]), _m([[1]])], "sign")
    # Sum-zero subspace with basis e0 - e2, e1 - e2.
    standard = subrepresentation(perm, [(1, 0, -1), (0, 1, -1)])
    standard = Representation(group, 2, standard.matrices, "standard")
    return group, [trivial, sign, standard], [1, 1, 1]


def _dihedral4() -> Tuple[FiniteGroup, List[Representation], List[int]]:
    rotation = _m(ROTATION_ORDER_4)
    reflection = _m([[1, 0], [0, -1]])
    group = group_from_generators([rotation, reflection], name="D4")
    irreps = []
    for name, (a, b) in (
        ("trivial", (1, 1)),
        ("sign_r", (-1, 1)),
        ("sign_s", (1, -1)),
        ("sign_rs", (-1, -1)),
    ):
        irreps.append(
            Representation.from_generator_images(group, [_m([[a]]), _m([[b]])], name)
        )
    irreps.append(Representation.from_generator_images(group, [rotation, reflection], "standard"))
    return group, irreps, [1, 1, 1, 1, 1]


def _quaternion8() -> Tuple[FiniteGroup, List[Representation], List[int]]:
    left_i = _m(regular_matrix(Quaternion(0, 1, 0, 0), QUATERNION))
    left_j = _m(regular_matrix(Quaternion(0, 0, 1, 0), QUATERNION))
    group = group_from_generators([left_i, left_j], name="Q8")
    irreps = []
    for name, (a, b) in (
        ("trivial", (1, 1)),
        ("sign_i", (1, -1)),
        ("sign_j", (-1, 1)),
        ("sign_k", (-1, -1)),
    ):
        irreps.append(
            Representation.from_generator_images(group, [_m([[a]]), _m([[b]])], name)
        )
    irreps.append(Representation.from_generator_images(group, [left_i, left_j], "quaternion"))
    return group, irreps, [1, 1, 1, 1, 4]


_BUILDERS = {
    "Z2": lambda: _cyclic(2),
    "Z3": lambda: _cyclic(3),
    "Z4": lambda: _cyclic(4),
    "Z6": lambda: _cyclic(6),
    "S3": _symmetric3,
    "D4": _dihedral4,
    "Q8": _quaternion8,
}

# PUBLIC API

BUILTIN_GROUPS = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def get_catalog(name: str) -> IrreducibleCatalog:
    """Irreducible catalog of a built-in group ("Z2", "S3", "Q8", ...)."""
    if name not in _BUILDERS:
        raise ValueError(f"Unknown group {name!r}; expected one of {BUILTIN_GROUPS}")
    group, irreps, k = _BUILDERS[name]()
    logger.debug("catalog %s: |G| = %d, %d irreducibles", name, group.order, len(irreps))
    return IrreducibleCatalog(group=group, irreps=tuple(irreps), k=tuple(k))


def get_group(name: str) -> FiniteGroup:
    return get_catalog(name).group


def generator(name: str, index: int = 0) -> int:
    """Element index of the ``index``-th generator of a built-in group."""
    return get_group(name).generators[index]


def subgroups(name: str) -> Dict[str, List[int]]:
    """A few named subgroups of each built-in group."""
    g = get_group(name)
    found = {"trivial": [g.identity], "whole": list(range(g.order))}
    for i, gen in enumerate(g.generators):
        found[f"gen{i}"] = g.generated_subgroup([gen])
    return found


def permutation_rep_of(name: str, subgroup: Sequence[int]) -> Representation:
    return coset_permutation_rep(get_group(name), subgroup)
