"""Test helpers: random exact matrices and sympy oracles."""
import random
from fractions import Fraction
from typing import Any

import sympy

from eqbn.exact_linalg import Matrix
from eqbn.scalars import GAUSSIAN, RATIONAL, GaussianRational


def random_fraction(rng: random.Random, spread: int = 4) -> Fraction:
    """p/q with |p| <= spread and 1 <= q <= 3."""
    return Fraction(rng.randint(-spread, spread), rng.randint(1, 3))


def random_rational_matrix(
    rng: random.Random, rows: int, cols: int, spread: int = 4
) -> Matrix:
    data = [[random_fraction(rng, spread) for _ in range(cols)] for _ in range(rows)]
    return Matrix(data, RATIONAL, cols)


def random_low_rank(rng: random.Random, rows: int, cols: int, r: int) -> Matrix:
    """A product rows×r · r×cols, so the rank is at most r."""
    return random_rational_matrix(rng, rows, r) @ random_rational_matrix(rng, r, cols)


def random_gaussian_matrix(
    rng: random.Random, rows: int, cols: int, spread: int = 3
) -> Matrix:
    data = [
        [
            GaussianRational(rng.randint(-spread, spread), rng.randint(-spread, spread))
            for _ in range(cols)
        ]
        for _ in range(rows)
    ]
    return Matrix(data, GAUSSIAN, cols)


def _to_sympy(x: Any) -> Any:
    if isinstance(x, GaussianRational):
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator
        )
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[_to_sympy(x) for x in m.row(i)] for i in range(m.rows)])


def sympy_rank(m: Matrix) -> int:
    return to_sympy(m).rank(simplify=True)


def sympy_det(m: Matrix) -> Any:
    return sympy.expand(to_sympy(m).det())


def from_sympy_scalar(x: Any) -> Any:
    """Exact scalar from a sympy Gaussian rational."""
    re, im = sympy.Rational(sympy.re(x)), sympy.Rational(sympy.im(x))
    if im == 0:
        return Fraction(int(re.p), int(re.q))
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
