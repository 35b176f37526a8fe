"""Field-tower scalars: rationals, quadratic extensions Q(sqrt(d)), complex floats.

Every other module does its arithmetic through the values defined here.  A
scalar is one of

* ``fractions.Fraction`` -- an exact rational,
* ``Quad`` -- an exact element a + b*sqrt(d) of a quadratic extension of Q,
* ``complex`` -- a float fallback whose comparisons use a global absolute
  tolerance (default 1e-9).

Rationals are always kept in lowest terms with positive denominator (Fraction
guarantees this), and a ``Quad`` with zero irrational part compares equal to
the corresponding rational.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

DEFAULT_TOL = 1e-9

QQ = Fraction

Scalar = Union[Fraction, "Quad", complex]


def _squarefree(d: int) -> bool:
    if d in (0, 1):
        return False
    n = abs(d)
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class Quad:
    """a + b*sqrt(d) with rational a, b and a fixed squarefree integer d."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if not _squarefree(d):
            raise ValueError(f"defect {d} must be a squarefree integer != 0, 1")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _check(self, other: "Quad"):
        if self.d != other.d:
            raise ValueError(f"mixed quadratic defects {self.d} and {other.d}")

    def __add__(self, other):
        if isinstance(other, Quad):
            self._check(other)
            return Quad(self.a + other.a, self.b + other.b, self.d)
        if isinstance(other, (int, Fraction)):
            return Quad(self.a + other, self.b, self.d)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self.__add__(-other if isinstance(other, (Quad, int, Fraction)) else -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Quad):
            self._check(other)
            return Quad(
                self.a * other.a + self.d * self.b * other.b,
                self.a * other.b + self.b * other.a,
                self.d,
            )
        if isinstance(other, (int, Fraction)):
            return Quad(self.a * other, self.b * other, self.d)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "Quad":
        # (a + b sqrt(d))^-1 = (a - b sqrt(d)) / (a^2 - d b^2); the norm is
        # nonzero for d squarefree unless a = b = 0.
        n = self.a * self.a - self.d * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return Quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, Quad):
            self._check(other)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return Quad(self.a / other, self.b / other, self.d)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = Quad(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Quad":
        return Quad(self.a, -self.b, self.d)

    def __eq__(self, other):
        if isinstance(other, Quad):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __complex__(self):
        if self.d < 0:
            return complex(self.a) + 1j * float(self.b) * math.sqrt(-self.d)
        return complex(self.a + self.b * Fraction(math.sqrt(self.d)))

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, d={self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = f"sqrt({self.d})"
        if self.a == 0:
            return f"{self.b}*{root}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*{root}"


# --- field tags ------------------------------------------------------------
#
# "q"        rationals
# "qext:d"   Q(sqrt(d))
# "c64"      complex floats

def field_of(x: Scalar) -> str:
    if isinstance(x, (int, Fraction)):
        return "q"
    if isinstance(x, Quad):
        return f"qext:{x.d}"
    if isinstance(x, (float, complex)):
        return "c64"
    raise TypeError(f"not a scalar: {x!r}")


def join_fields(tags) -> str:
    """Smallest field tag containing all the given ones."""
    out = "q"
    for t in tags:
        if t == "q":
            continue
        if out == "q":
            out = t
        elif out != t:
            if t == "c64" or out == "c64":
                out = "c64"
            else:
                raise ValueError(f"incompatible field tags {out} and {t}")
    return out


def to_field(x: Scalar, tag: str) -> Scalar:
    cur = field_of(x)
    if cur == tag:
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            return complex(x)
        return x
    if tag == "c64":
        return complex(x)
    if tag.startswith("qext:"):
        d = int(tag.split(":")[1])
        if cur == "q":
            return Quad(Fraction(x), 0, d)
        raise ValueError(f"cannot embed {cur} into {tag}")
    raise ValueError(f"cannot embed {cur} into {tag}")


def is_zero(x: Scalar, tol: float = DEFAULT_TOL) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, Quad):
        return not x
    return abs(x) <= tol


def scalars_equal(x: Scalar, y: Scalar, tol: float = DEFAULT_TOL) -> bool:
    if isinstance(x, (float, complex)) or isinstance(y, (float, complex)):
        return abs(complex(x) - complex(y)) <= tol
    return x == y


def conj(x: Scalar) -> Scalar:
    """Coefficientwise complex conjugation of the tower.

    For Q(sqrt(d)) with d < 0 this is the field conjugation; for d > 0 the
    element is already real and is returned unchanged.
    """
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, Quad):
        return x.conjugate() if x.d < 0 else x
    return x.conjugate()


# --- square roots ----------------------------------------------------------

def rational_square_root(q) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None when irrational."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative input has no real square root")
    if q == 0:
        return Fraction(0)
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def sqrt_in_field(x: Scalar, field: str) -> Scalar | None:
    """A square root of x inside the given field, or None if there is none.

    Rationals may acquire a sqrt(d) factor when the field is a quadratic
    extension: q = r^2 * d has root r*sqrt(d).
    """
    if field == "c64":
        import cmath

        return cmath.sqrt(complex(x))
    if isinstance(x, Quad):
        if x.b != 0:
            return None  # nested radicals are outside the tower
        x = x.a
    x = Fraction(x)
    if x >= 0:
        r = rational_square_root(x)
        if r is not None:
            return to_field(r, field) if field != "q" else r
    if field.startswith("qext:"):
        d = int(field.split(":")[1])
        if x == 0:
            return Quad(0, 0, d)
        ratio = x / d
        if ratio >= 0:
            r = rational_square_root(ratio)
            if r is not None:
                return Quad(0, r, d)
    return None


# --- JSON ------------------------------------------------------------------

def scalar_to_json(x: Scalar):
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return {"q": str(x)}
    if isinstance(x, Quad):
        return {"quad": [str(x.a), str(x.b)], "d": x.d}
    if isinstance(x, (float, complex)):
        z = complex(x)
        return {"c": [z.real, z.imag]}
    raise TypeError(f"not a scalar: {x!r}")


def scalar_from_json(obj) -> Scalar:
    if "q" in obj:
        return Fraction(obj["q"])
    if "quad" in obj:
        a, b = obj["quad"]
        return Quad(Fraction(a), Fraction(b), int(obj["d"]))
    if "c" in obj:
        re, im = obj["c"]
        return complex(re, im)
    raise ValueError(f"bad scalar payload {obj!r}")
