"""The exact scalar tower ℚ ⊂ ℚ[i] ⊂ ℍ(ℚ).

Rationals are plain :class:`fractions.Fraction` values. Gaussian rationals and
rational quaternions are small immutable classes whose coordinates are
Fractions, so every operation stays normalized and exact.
"""
from fractions import Fraction
from typing import Any, Iterable, Tuple, Union

RATIONAL = "rational"
GAUSSIAN = "gaussian"
QUATERNION = "quaternion"

KINDS = (RATIONAL, GAUSSIAN, QUATERNION)
_RANK = {RATIONAL: 0, GAUSSIAN: 1, QUATERNION: 2}

# Real dimension of each scalar kind over ℚ.
REAL_DIMENSION = {RATIONAL: 1, GAUSSIAN: 2, QUATERNION: 4}


def _frac(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    raise TypeError(f"Cannot read an exact rational from {value!r}")


class GaussianRational:
    """An element re + im·i of ℚ[i]."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0) -> None:
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("GaussianRational is immutable")

    def _coerce(self, other: Any) -> "GaussianRational":
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other: Any) -> Any:
        if isinstance(other, Quaternion):
            return promote(self, QUATERNION) + other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Any) -> Any:
        if isinstance(other, Quaternion):
            return promote(self, QUATERNION) - other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: Any) -> Any:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, Quaternion):
            return promote(self, QUATERNION) * other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q[i]")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other: Any) -> Any:
        if isinstance(other, Quaternion):
            return promote(self, QUATERNION) / other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other: Any) -> Any:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, Quaternion):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        return f"{self.re}+{self.im}i"


class Quaternion:
    """An element a + b·i + c·j + d·k of the rational Hamilton quaternions."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: Any = 0, b: Any = 0, c: Any = 0, d: Any = 0) -> None:
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))
        object.__setattr__(self, "c", _frac(c))
        object.__setattr__(self, "d", _frac(d))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Quaternion is immutable")

    @property
    def coords(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return Quaternion(
            self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d
        )

    __radd__ = __add__

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        a1, b1, c1, d1 = self.coords
        a2, b2, c2, d2 = other.coords
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return other * self

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Quaternion":
        n = sum(x * x for x in self.coords)
        if n == 0:
            raise ZeroDivisionError("inverse of zero in H(Q)")
        return Quaternion(self.a / n, -self.b / n, -self.c / n, -self.d / n)

    def __truediv__(self, other: Any) -> Any:
        # Right division: x / y = x · y⁻¹.
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other: Any) -> Any:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __eq__(self, other: Any) -> bool:
        other = _as_quaternion(other)
        if other is NotImplemented:
            return other
        return self.coords == other.coords

    def __hash__(self) -> int:
        if self.c == 0 and self.d == 0:
            return hash(GaussianRational(self.a, self.b))
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def __repr__(self) -> str:
        return f"Quaternion({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self) -> str:
        return f"{self.a}+{self.b}i+{self.c}j+{self.d}k"


def _as_quaternion(value: Any) -> Any:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, GaussianRational):
        return Quaternion(value.re, value.im, 0, 0)
    if isinstance(value, (int, Fraction)):
        return Quaternion(value, 0, 0, 0)
    return NotImplemented


Scalar = Union[Fraction, GaussianRational, Quaternion]

# PUBLIC API

I = GaussianRational(0, 1)


def kind_of(value: Any) -> str:
    if isinstance(value, Quaternion):
        return QUATERNION
    if isinstance(value, GaussianRational):
        return GAUSSIAN
    if isinstance(value, (int, Fraction)):
        return RATIONAL
    raise TypeError(f"Not an exact scalar: {value!r}")


def join_kinds(kinds: Iterable[str]) -> str:
    """Smallest kind of the tower containing all given kinds."""
    result = RATIONAL
    for kind in kinds:
        if _RANK[kind] > _RANK[result]:
            result = kind
    return result


def promote(value: Any, kind: str) -> Scalar:
    """Embed ``value`` into the scalar kind ``kind``."""
    if kind == RATIONAL:
        if isinstance(value, (GaussianRational, Quaternion)):
            raise ValueError(f"Cannot demote {value!r} to a rational")
        return _frac(value)
    if kind == GAUSSIAN:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, Quaternion):
            raise ValueError(f"Cannot demote {value!r} to a Gaussian rational")
        return GaussianRational(_frac(value), 0)
    if kind == QUATERNION:
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, GaussianRational):
            return Quaternion(value.re, value.im, 0, 0)
        return Quaternion(_frac(value), 0, 0, 0)
    raise ValueError(f"Unknown scalar kind: {kind}")


def zero(kind: str) -> Scalar:
    return promote(0, kind)


def one(kind: str) -> Scalar:
    return promote(1, kind)


def conj(value: Scalar) -> Scalar:
    if isinstance(value, (GaussianRational, Quaternion)):
        return value.conjugate()
    return value


def norm(value: Scalar) -> Fraction:
    """The reduced norm ⟨λ, λ⟩ = λ·λ*, a nonnegative rational."""
    if isinstance(value, GaussianRational):
        return value.re * value.re + value.im * value.im
    if isinstance(value, Quaternion):
        return sum((x * x for x in value.coords), Fraction(0))
    return value * value


def inverse(value: Scalar) -> Scalar:
    if isinstance(value, (GaussianRational, Quaternion)):
        return value.inverse()
    if value == 0:
        raise ZeroDivisionError("inverse of zero in Q")
    return 1 / Fraction(value)


def real_coordinates(value: Scalar, kind: str) -> Tuple[Fraction, ...]:
    """Coordinates of ``value`` in the standard ℚ-basis of ``kind``."""
    value = promote(value, kind)
    if kind == RATIONAL:
        return (value,)
    if kind == GAUSSIAN:
        return (value.re, value.im)
    return value.coords


def regular_matrix(value: Scalar, kind: str) -> Tuple[Tuple[Fraction, ...], ...]:
    """Real matrix of left multiplication by ``value`` on ``kind`` ≅ ℚ^k."""
    value = promote(value, kind)
    k = REAL_DIMENSION[kind]
    if kind == RATIONAL:
        basis = [Fraction(1)]
    elif kind == GAUSSIAN:
        basis = [GaussianRational(1, 0), GaussianRational(0, 1)]
    else:
        basis = [
            Quaternion(1, 0, 0, 0),
            Quaternion(0, 1, 0, 0),
            Quaternion(0, 0, 1, 0),
            Quaternion(0, 0, 0, 1),
        ]
    columns = [real_coordinates(value * e, kind) for e in basis]
    return tuple(tuple(columns[j][i] for j in range(k)) for i in range(k))


def parse_scalar(raw: Any, kind: str = RATIONAL) -> Scalar:
    """Read a scalar from its JSON form.

    Rationals are ``int``, ``"p/q"`` or ``[num, den]``; Gaussian rationals are
    ``{"re": r, "im": s}`` or ``[r, s]`` of rationals; quaternions are lists of
    four rationals.
    """
    if isinstance(raw, dict):
        if set(raw) <= {"re", "im"}:
            return promote(GaussianRational(raw.get("re", 0), raw.get("im", 0)), kind)
        return promote(
            Quaternion(raw.get("a", 0), raw.get("b", 0), raw.get("c", 0), raw.get("d", 0)),
            kind,
        )
    if kind == RATIONAL:
        return _frac(raw)
    if kind == GAUSSIAN and isinstance(raw, (list, tuple)) and len(raw) == 2:
        return GaussianRational(raw[0], raw[1])
    if kind == QUATERNION and isinstance(raw, (list, tuple)) and len(raw) == 4:
        return Quaternion(*raw)
    return promote(_frac(raw), kind)


def format_scalar(value: Scalar) -> Any:
    """JSON form of a scalar: ``"p/q"`` strings, lists for higher kinds."""
    if isinstance(value, GaussianRational):
        return [str(value.re), str(value.im)]
    if isinstance(value, Quaternion):
        return [str(x) for x in value.coords]
    return str(Fraction(value))
