"""Exact scalars: rationals (``fractions.Fraction``) and elements of one quadratic
extension Q(sqrt d).

Every scalar the library produces is either a ``Fraction`` or a :class:`Quad`.
A ``Quad`` with zero irrational part is never returned from arithmetic; it is
collapsed back to a ``Fraction``, so pure-rational computations never see the
extension type at all.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union


class ExtensionError(ValueError):
    """Raised when a computation would need a second, different square root."""

    code = "extension_tower"


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``s`` square-free (sign kept on s)."""
    if n == 0:
        return 0, 1
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, f = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return sign * s * n, f


class Quad:
    """The number ``a + b*sqrt(d)`` with rational ``a``, ``b`` and square-free ``d``.

    ``d`` may be negative (``d = -1`` gives the Gaussian rationals); it is never
    0 or 1. Mixing two different ``d`` raises :class:`ExtensionError`.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        d = int(d)
        s, f = squarefree_decompose(d)
        if s in (0, 1) or f != 1:
            raise ValueError(f"d={d} must be square-free and not 0 or 1")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    @staticmethod
    def make(a, b, d: int) -> Scalar:
        """Build ``a + b sqrt d``, collapsing to a Fraction when ``b == 0``."""
        if b == 0:
            return Fraction(a)
        return Quad(a, b, d)

    def _coerce(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise ExtensionError(
                    f"cannot combine sqrt({self.d}) and sqrt({other.d}): extension tower needed"
                )
            return other.a, other.b
        if isinstance(other, (int, Rational)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        x, y = c
        return Quad.make(self.a * x + self.b * y * self.d, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> Quad:
        return Quad(self.a, -self.b, self.d)

    def inverse(self) -> Scalar:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        return Quad.make(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if isinstance(other, Quad):
            return self * other.inverse()
        if c[0] == 0:
            raise ZeroDivisionError("division by zero")
        return Quad.make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.inverse() * c[0]

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Quad):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Rational)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"{self.a}+{self.b}*sqrt({self.d})"


Scalar = Union[Fraction, Quad]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_scalar(x) -> Scalar:
    """Coerce ints, strings like ``"3/4"``, Fractions and Quads to a Scalar."""
    if isinstance(x, Quad):
        return Quad.make(x.a, x.b, x.d)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, dict):
        return Quad.make(Fraction(x["a"]), Fraction(x["b"]), int(x["d"]))
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def extension_of(*values) -> int | None:
    """The common ``d`` of any Quad among ``values`` (None if all rational)."""
    d = None
    for v in values:
        if isinstance(v, Quad):
            if d is None:
                d = v.d
            elif d != v.d:
                raise ExtensionError(f"mixed extensions sqrt({d}) and sqrt({v.d})")
    return d


def is_rational(x) -> bool:
    return not isinstance(x, Quad)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a rational if it is a rational square, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    p, r = q.numerator, q.denominator
    sp, sr = math.isqrt(p), math.isqrt(r)
    if sp * sp == p and sr * sr == r:
        return Fraction(sp, sr)
    return None


def exact_sqrt(x, d: int | None = None) -> tuple[Scalar, int | None]:
    """Square root of ``x`` in Q or Q(sqrt d).

    ``x`` must be rational, or a Quad that is a square inside its own field.
    ``d`` names the extension already in use (None for none). Returns the root and
    the extension now in use. Needing a new extension while one is already fixed
    raises :class:`ExtensionError`.
    """
    if isinstance(x, Quad):
        root = _quad_sqrt(x)
        if root is None:
            raise ExtensionError(f"sqrt of {x} needs a nested extension")
        return root, x.d
    x = Fraction(x)
    r = rational_sqrt(x)
    if r is not None:
        return r, d
    num = x.numerator * x.denominator
    s, f = squarefree_decompose(num)
    # x = s f^2 / den^2
    coeff = Fraction(f, x.denominator)
    if d is not None and d != s:
        raise ExtensionError(f"sqrt({s}) needed but sqrt({d}) already in use")
    return Quad(0, coeff, s), s


def _quad_sqrt(x: Quad) -> Scalar | None:
    # (p + q sqrt d)^2 = p^2 + d q^2 + 2pq sqrt d
    nrm = x.norm()
    r = rational_sqrt(nrm)
    if r is None:
        return None
    # x.b != 0 forces p != 0
    for sign in (1, -1):
        p = rational_sqrt((x.a + sign * r) / 2)
        if p:
            return Quad.make(p, x.b / (2 * p), x.d)
    return None


def format_scalar(x) -> str | dict:
    """Serialize: rationals as ``"p/q"`` (``"p"`` for integers), quads as ``{a, b, d}``."""
    x = as_scalar(x)
    if isinstance(x, Quad):
        return {"a": _fmt_frac(x.a), "b": _fmt_frac(x.b), "d": x.d}
    return _fmt_frac(x)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_scalar(obj) -> Scalar:
    if isinstance(obj, float):
        raise TypeError("floats are not accepted; pass exact values as strings")
    return as_scalar(obj)
