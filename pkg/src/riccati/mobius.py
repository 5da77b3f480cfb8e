"""2x2 matrices acting as linear-fractional maps x -> (a x + b)/(c x + d)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numeric import (
    FLOAT_RTOL,
    QuadExt,
    check_compatible,
    exact_sqrt,
    format_scalar,
    is_zero,
    parse_scalar,
    simplify,
    sign,
    to_exact,
)


class _PoleType:
    """The point at infinity: the value of a map at its pole."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "POLE"

    def __reduce__(self):
        return (_PoleType, ())


POLE = _PoleType()


def is_pole(value) -> bool:
    return value is POLE


def _norm_entry(x):
    if isinstance(x, float):
        return x
    return to_exact(x)


@dataclass(frozen=True)
class Matrix2:
    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        entries = [_norm_entry(x) for x in (self.a, self.b, self.c, self.d)]
        check_compatible(*entries)
        for name, x in zip("abcd", entries):
            object.__setattr__(self, name, x)

    @classmethod
    def identity(cls, mode: str = "exact") -> Matrix2:
        if mode == "float":
            return cls(1.0, 0.0, 0.0, 1.0)
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def from_rows(cls, rows, mode: str = "exact") -> Matrix2:
        (a, b), (c, d) = rows
        return cls(*(parse_scalar(x, mode) for x in (a, b, c, d)))

    @property
    def mode(self) -> str:
        return "float" if isinstance(self.a, float) else "exact"

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    @property
    def scale(self) -> float:
        return max(abs(float(x)) for x in (self.a, self.b, self.c, self.d))

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def to_json(self):
        return [[format_scalar(x) for x in row] for row in self.rows()]

    def simplified(self) -> Matrix2:
        return Matrix2(*(simplify(x) for x in (self.a, self.b, self.c, self.d)))

    def scaled(self, alpha) -> Matrix2:
        return Matrix2(alpha * self.a, alpha * self.b, alpha * self.c, alpha * self.d)

    def __matmul__(self, other: Matrix2) -> Matrix2:
        return multiply(self, other)

    def __call__(self, x):
        return apply(self, x)


def _require_invertible(m: Matrix2) -> None:
    if is_zero(m.det, m.scale**2):
        raise ValueError(f"singular matrix {m.to_json()}")


def apply(m: Matrix2, x):
    """f_M(x), or POLE where c x + d vanishes."""
    _require_invertible(m)
    if x is POLE:
        # f(inf) = a/c
        return POLE if is_zero(m.c, m.scale) else m.a / m.c
    check_compatible(m.a, x)
    cx = m.c * x
    den = cx + m.d
    if isinstance(den, float):
        if abs(den) <= FLOAT_RTOL * max(abs(cx), abs(m.d), 1.0):
            return POLE
    elif den == 0:
        return POLE
    return simplify((m.a * x + m.b) / den)


def multiply(left: Matrix2, right: Matrix2) -> Matrix2:
    return Matrix2(
        left.a * right.a + left.b * right.c,
        left.a * right.b + left.b * right.d,
        left.c * right.a + left.d * right.c,
        left.c * right.b + left.d * right.d,
    )


def inverse(m: Matrix2) -> Matrix2:
    """Adjugate divided by the determinant."""
    _require_invertible(m)
    det = m.det
    return Matrix2(m.d / det, -m.b / det, -m.c / det, m.a / det)


def partial_product(system, n: int) -> Matrix2:
    """A_{n-1} ... A_1 A_0 for the coefficient matrices of ``system``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    acc = Matrix2.identity(system.mode)
    for j in range(n):
        acc = multiply(system.matrix(j), acc)
    return acc


def power_by_multiplication(m: Matrix2, n: int) -> Matrix2:
    acc = Matrix2.identity(m.mode)
    for _ in range(n):
        acc = multiply(m, acc)
    return acc


def power_recurrence(m: Matrix2, n: int) -> Matrix2:
    """M^n via M^n = T M^(n-1) - D M^(n-2) (Cayley-Hamilton)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prev = Matrix2.identity(m.mode)
    if n == 0:
        return prev
    cur = m
    t, dt = m.trace, m.det
    for _ in range(n - 1):
        prev, cur = cur, Matrix2(
            t * cur.a - dt * prev.a,
            t * cur.b - dt * prev.b,
            t * cur.c - dt * prev.c,
            t * cur.d - dt * prev.d,
        )
    return cur


def eigenvalues(m: Matrix2):
    """Real eigenvalues (l1, l2) with |l1| >= |l2|, or None if complex.

    Exact entries must be rational.  Exact roots live in Q or Q(sqrt d).
    """
    t, dt = m.trace, m.det
    disc = t * t - 4 * dt
    if m.mode == "float":
        if disc < -FLOAT_RTOL * max(t * t, 1.0):
            return None
        root = math.sqrt(max(disc, 0.0))
        l1, l2 = (t + root) / 2, (t - root) / 2
    else:
        if isinstance(disc, QuadExt):
            raise ValueError("eigenvalues need a rational discriminant")
        if disc < 0:
            return None
        root = exact_sqrt(disc)
        l1, l2 = simplify((t + root) / 2), simplify((t - root) / 2)
    if abs(l2) > abs(l1):
        l1, l2 = l2, l1
    return l1, l2


def power_closed_form(m: Matrix2, n: int) -> Matrix2:
    """M^n from its eigenvalues, falling back to the trace recurrence.

    Distinct real roots l1, l2:
        M^n = (l1^n - l2^n)/(l1 - l2) M - l1 l2 (l1^(n-1) - l2^(n-1))/(l1 - l2) I
    Double root l:
        M^n = l^(n-1) (n M + l (1 - n) I)
    Complex roots (or irrational exact entries) use :func:`power_recurrence`.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Matrix2.identity(m.mode)
    if n == 1:
        return m
    t = m.trace
    disc = t * t - 4 * m.det
    if isinstance(disc, QuadExt) and not disc.is_rational:
        return power_recurrence(m, n)
    disc = simplify(disc)
    if is_zero(disc, max(t * t, 1.0) if isinstance(disc, float) else 1.0):
        lam = t / 2
        f = lam ** (n - 1)
        p, q = f * n, f * lam * (1 - n)
        return Matrix2(p * m.a + q, p * m.b, p * m.c, p * m.d + q).simplified()
    if sign(disc) < 0:
        return power_recurrence(m, n)
    l1, l2 = eigenvalues(m)
    gap = l1 - l2
    p = (l1**n - l2**n) / gap
    q = -(l1 * l2) * (l1 ** (n - 1) - l2 ** (n - 1)) / gap
    return Matrix2(p * m.a + q, p * m.b, p * m.c, p * m.d + q).simplified()
