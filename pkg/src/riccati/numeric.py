"""Exact scalars: rationals, elements of Q(sqrt d), and a float fallback.

Rationals are :class:`fractions.Fraction`.  Elements ``r + s*sqrt(d)`` of a
real quadratic field are :class:`QuadExt`.  Plain ``float`` is the inexact
mode.  Exact and float values are never combined; doing so raises
``TypeError``.
"""
from __future__ import annotations

import functools
import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

FLOAT_RTOL = 1e-12

_SMALL_PRIMES_BOUND = 10_000


class QuadExt:
    """An element ``rat + irr*sqrt(radicand)`` of Q(sqrt radicand).

    The radicand is square-free and > 1.  Values with ``irr == 0`` act as
    plain rationals and combine with any radicand.
    """

    __slots__ = ("_rat", "_irr", "_radicand")

    def __init__(self, rat=0, irr=0, radicand: int = 2) -> None:
        if isinstance(rat, float) or isinstance(irr, float):
            raise TypeError("QuadExt components must be exact")
        radicand = int(radicand)
        if radicand < 2 or not _is_squarefree(radicand):
            raise ValueError(f"radicand must be square-free and > 1, got {radicand}")
        self._rat = Fraction(rat)
        self._irr = Fraction(irr)
        self._radicand = radicand

    @classmethod
    def _make(cls, rat: Fraction, irr: Fraction, radicand: int) -> QuadExt:
        # trusted constructor for arithmetic results
        obj = object.__new__(cls)
        obj._rat = rat
        obj._irr = irr
        obj._radicand = radicand
        return obj

    @property
    def rat(self) -> Fraction:
        return self._rat

    @property
    def irr(self) -> Fraction:
        return self._irr

    @property
    def radicand(self) -> int:
        return self._radicand

    @property
    def is_rational(self) -> bool:
        return self._irr == 0

    def __repr__(self) -> str:
        return f"QuadExt({self._rat!r}, {self._irr!r}, {self._radicand})"

    def __str__(self) -> str:
        if self._irr == 0:
            return str(self._rat)
        mag = abs(self._irr)
        surd = f"sqrt({self._radicand})" if mag == 1 else f"{mag}*sqrt({self._radicand})"
        sign = "-" if self._irr < 0 else "+"
        if self._rat == 0:
            return surd if sign == "+" else "-" + surd
        return f"{self._rat}{sign}{surd}"

    # -- coercion -------------------------------------------------------

    def _coerce(self, other) -> QuadExt | None:
        if isinstance(other, QuadExt):
            if other._radicand == self._radicand:
                return other
            if other._irr == 0:
                return QuadExt._make(other._rat, other._irr, self._radicand)
            if self._irr == 0:
                return other
            raise ValueError(
                f"mismatched radicands {self._radicand} and {other._radicand}"
            )
        if isinstance(other, float):
            raise TypeError("cannot mix exact QuadExt with float")
        if isinstance(other, Rational):
            return QuadExt._make(Fraction(other), Fraction(0), self._radicand)
        return None

    def _pair(self, other):
        o = self._coerce(other)
        if o is None:
            return None, None
        if o._radicand != self._radicand:
            # self is rational, other carries the radical
            return QuadExt._make(self._rat, self._irr, o._radicand), o
        return self, o

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return QuadExt._make(x._rat + y._rat, x._irr + y._irr, x._radicand)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt._make(-self._rat, -self._irr, self._radicand)

    def __pos__(self) -> QuadExt:
        return self

    def __sub__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return QuadExt._make(x._rat - y._rat, x._irr - y._irr, x._radicand)

    def __rsub__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return QuadExt._make(y._rat - x._rat, y._irr - x._irr, x._radicand)

    def __mul__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        d = x._radicand
        return QuadExt._make(
            x._rat * y._rat + x._irr * y._irr * d,
            x._rat * y._irr + x._irr * y._rat,
            d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self._rat * self._rat - self._irr * self._irr * self._radicand

    def conjugate(self) -> QuadExt:
        return QuadExt._make(self._rat, -self._irr, self._radicand)

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt._make(self._rat / n, -self._irr / n, self._radicand)

    def __truediv__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return x * y.inverse()

    def __rtruediv__(self, other):
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return y * x.inverse()

    def __pow__(self, n: int) -> QuadExt:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadExt._make(Fraction(1), Fraction(0), self._radicand)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> QuadExt:
        return -self if self.sign() < 0 else self

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        """Sign of the real embedding, decided exactly."""
        sr = _fsign(self._rat)
        si = _fsign(self._irr)
        if si == 0:
            return sr
        if sr == 0 or sr == si:
            return si
        # opposite signs: compare rat^2 with irr^2 * d
        lhs = self._rat * self._rat
        rhs = self._irr * self._irr * self._radicand
        return sr if lhs > rhs else si

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadExt):
            if self._irr == 0 and other._irr == 0:
                return self._rat == other._rat
            return (self._rat, self._irr, self._radicand) == (
                other._rat,
                other._irr,
                other._radicand,
            )
        if isinstance(other, Rational):
            return self._irr == 0 and self._rat == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._irr == 0:
            return hash(self._rat)
        return hash((self._rat, self._irr, self._radicand))

    def __lt__(self, other) -> bool:
        return compare(self, other) < 0

    def __le__(self, other) -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other) -> bool:
        return compare(self, other) > 0

    def __ge__(self, other) -> bool:
        return compare(self, other) >= 0

    def __bool__(self) -> bool:
        return self._rat != 0 or self._irr != 0

    def __float__(self) -> float:
        root = math.sqrt(self._radicand)
        r, s = float(self._rat), float(self._irr) * root
        if r * s < 0:
            # avoid cancellation: x = norm / conjugate
            conj = r - s
            if conj != 0:
                return float(self.norm()) / conj
        return r + s


Scalar = Union[Fraction, QuadExt, float]


def _fsign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


@functools.lru_cache(maxsize=256)
def _is_squarefree(n: int) -> bool:
    return squarefree_decompose(n)[1] == n


def _squarefree_small(n: int) -> tuple[int, int, int]:
    """Split n = s^2 * r * rest using trial division by small primes."""
    s, r = 1, 1
    p = 2
    while p * p <= n and p < _SMALL_PRIMES_BOUND:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                r *= p
        p += 1 if p == 2 else 2
    return s, r, n


@functools.lru_cache(maxsize=1024)
def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return (s, r) with n = s**2 * r and r square-free, for n >= 1."""
    if n < 1:
        raise ValueError("squarefree_decompose needs a positive integer")
    s, r, rest = _squarefree_small(n)
    if rest == 1:
        return s, r
    root = math.isqrt(rest)
    if root * root == rest:
        return s * root, r
    if rest < _SMALL_PRIMES_BOUND**2:
        # rest has no factor below the bound, hence it is prime
        return s, r * rest
    from sympy import factorint

    for p, e in factorint(rest).items():
        s *= p ** (e // 2)
        if e % 2:
            r *= p
    return s, r


def sqrt_decompose(q) -> tuple[Fraction, int]:
    """Write q = coeff**2 * radicand with radicand a square-free integer.

    ``radicand == 1`` means sqrt(q) is rational.

    >>> sqrt_decompose(Fraction(8))
    (Fraction(2, 1), 2)
    """
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"sqrt_decompose needs q > 0, got {q}")
    # sqrt(p/m) = sqrt(p*m)/m
    s, r = squarefree_decompose(q.numerator * q.denominator)
    return Fraction(s, q.denominator), r


def exact_sqrt(q) -> Fraction | QuadExt:
    """Exact square root of a non-negative rational."""
    q = Fraction(q)
    if q == 0:
        return Fraction(0)
    coeff, radicand = sqrt_decompose(q)
    if radicand == 1:
        return coeff
    return QuadExt(0, coeff, radicand)


def is_float(x) -> bool:
    return isinstance(x, float)


def is_exact(x) -> bool:
    return isinstance(x, (QuadExt, Rational)) and not isinstance(x, bool)


def to_exact(x) -> Fraction | QuadExt:
    """Promote ints to Fraction; reject floats."""
    if isinstance(x, QuadExt) or isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("expected an exact scalar, got float")
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"not a scalar: {x!r}")


def simplify(x):
    """Collapse a QuadExt with zero irrational part to a Fraction."""
    if isinstance(x, QuadExt) and x.irr == 0:
        return x.rat
    return x


def check_compatible(*xs) -> str:
    """Return 'exact' or 'float'; raise TypeError on a mix."""
    kinds = {"float" if isinstance(x, float) else "exact" for x in xs}
    if len(kinds) > 1:
        raise TypeError("cannot mix exact and float scalars")
    return kinds.pop() if kinds else "exact"


def sign(x) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    return (x > 0) - (x < 0)


def compare(x, y) -> int:
    """Three-way comparison (-1, 0, 1) in the real embedding.

    Exact values are compared exactly; mixing exact and float raises.
    """
    check_compatible(x, y)
    if isinstance(x, float):
        return (x > y) - (x < y)
    if isinstance(x, QuadExt) or isinstance(y, QuadExt):
        return sign(x - y)
    return (x > y) - (x < y)


def is_zero(x, scale: float = 1.0) -> bool:
    """Exact zero test, or |x| <= 1e-12 * max(scale, 1) for floats."""
    if isinstance(x, float):
        return abs(x) <= FLOAT_RTOL * max(abs(scale), 1.0)
    return x == 0


def near_equal(x, y, scale: float = 1.0) -> bool:
    check_compatible(x, y)
    if isinstance(x, float):
        return abs(x - y) <= FLOAT_RTOL * max(abs(x), abs(y), abs(scale), 1.0)
    return x == y


def magnitude(x) -> float:
    return abs(float(x))


# -- string / JSON forms ----------------------------------------------------


def format_scalar(x):
    """JSON-ready form: "p/q" for rationals, a dict for QuadExt, float as is."""
    if isinstance(x, QuadExt):
        if x.irr == 0:
            return str(x.rat)
        return {"rat": str(x.rat), "irr": str(x.irr), "radicand": x.radicand}
    if isinstance(x, float):
        return x
    if isinstance(x, Rational):
        return str(Fraction(x))
    raise TypeError(f"not a scalar: {x!r}")


# "r+s*sqrt(d)", with the rational part and a unit coefficient optional
_QUAD_RE = re.compile(
    r"^\s*(?:(?P<rat>-?\d+(?:/\d+)?)\s*(?=[+-]))?(?P<sign>[+-])?\s*"
    r"(?:(?P<irr>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<rad>\d+)\s*\)\s*$"
)


def parse_scalar(value, mode: str = "exact"):
    """Inverse of :func:`format_scalar`.  ``mode='float'`` converts to float."""
    if isinstance(value, dict):
        try:
            x = QuadExt(
                Fraction(value["rat"]), Fraction(value["irr"]), int(value["radicand"])
            )
        except KeyError as exc:
            raise ValueError(f"QuadExt record missing {exc}") from None
        x = simplify(x)
    elif isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    elif isinstance(value, str) and _QUAD_RE.match(value):
        g = _QUAD_RE.match(value)
        irr = Fraction(g["irr"] or 1) * (-1 if g["sign"] == "-" else 1)
        x = Fraction(g["rat"] or 0) + irr * exact_sqrt(int(g["rad"]))
        x = simplify(x)
    elif isinstance(value, (int, str)):
        try:
            x = Fraction(value.strip() if isinstance(value, str) else value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad scalar {value!r}: {exc}") from None
    elif isinstance(value, float):
        if mode == "exact":
            x = Fraction(value)
        else:
            return value
    else:
        raise ValueError(f"not a scalar: {value!r}")
    if mode == "float":
        return float(x)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    return x
