"""Closed forms for b_n = 0 systems and the non-periodic x/(c_n x + 1) model.

With b_n = 0 and d_n = 1 every B_i is lower triangular,
``B_i = [[at, 0], [ct_i, 1]]`` with ``at = a_0 ... a_{k-1}``, so powers,
forbidden sets and limits are explicit.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .mobius import POLE, Matrix2, apply, inverse
from .numeric import format_scalar, is_zero, parse_scalar, simplify
from .results import (
    AttractingCycle,
    AttractingFixedPoint,
    ForbiddenFamily,
    ForbiddenPoint,
    ForbiddenSetDescription,
    NotCoveredByPaper,
    Oscillating,
    PeriodicAll,
    dedupe,
)
from .system import InvalidSystemError, PeriodicSystem


def _prod(xs, one):
    out = one
    for x in xs:
        out = out * x
    return out


def _one(system: PeriodicSystem):
    return 1.0 if system.mode == "float" else Fraction(1)


def normalize_b0(system: PeriodicSystem) -> PeriodicSystem:
    """Divide each row by d_n, giving the equivalent b = 0, d = 1 system."""
    if not system.is_b_zero():
        raise InvalidSystemError("b_n must vanish for the b = 0 reduction")
    if any(is_zero(d) for d in system.d):
        raise InvalidSystemError("d_n = 0 cannot be normalised away")
    one = _one(system)
    k = system.k
    return PeriodicSystem(
        tuple(a / d for a, d in zip(system.a, system.d)),
        tuple(0 * one for _ in range(k)),
        tuple(c / d for c, d in zip(system.c, system.d)),
        tuple(one for _ in range(k)),
    )


def _require_b0(system: PeriodicSystem) -> None:
    if not system.is_b_zero() or any(not is_zero(d - 1) for d in system.d):
        raise InvalidSystemError("system is not in b = 0, d = 1 form")


@dataclass(frozen=True)
class B0ReducedData:
    a_tilde: object
    c_tilde: tuple


def tilde_coeffs(system: PeriodicSystem) -> B0ReducedData:
    """at = prod a_j and the (2,1) entries ct_i of each B_i, by formula.

    ct_i = prod_{j=i}^{k-1} a_j * sum_{l<i} c_l prod_{r<l} a_r
           + sum_{s=i}^{k-1} c_s prod_{t=i}^{s-1} a_t
    """
    _require_b0(system)
    a, c, k = system.a, system.c, system.k
    one = _one(system)
    a_tilde = _prod(a, one)
    c_tilde = []
    for i in range(k):
        head = sum((c[l] * _prod(a[:l], one) for l in range(i)), 0 * one)
        tail = sum((c[s] * _prod(a[i:s], one) for s in range(i, k)), 0 * one)
        c_tilde.append(_prod(a[i:], one) * head + tail)
    return B0ReducedData(a_tilde, tuple(c_tilde))


def _geometric(a_tilde, n: int):
    """(at^n - 1)/(at - 1), or n when at = 1."""
    if is_zero(a_tilde - 1):
        return n * (a_tilde ** 0)
    return (a_tilde**n - 1) / (a_tilde - 1)


def bi_power_closed_form(data: B0ReducedData, i: int, n: int) -> Matrix2:
    if n < 0:
        raise ValueError("n must be >= 0")
    at = data.a_tilde
    one = at**0
    return Matrix2(at**n, 0 * one, _geometric(at, n) * data.c_tilde[i], one)


def _bar(system: PeriodicSystem, i: int):
    """(abar_i, cbar_i): entries of A_{i-1} ... A_0 for a b = 0, d = 1 system."""
    one = _one(system)
    a, c = system.a, system.c
    abar = _prod(a[:i], one)
    cbar = sum((c[j] * _prod(a[:j], one) for j in range(i)), 0 * one)
    return abar, cbar


def forbidden_b0(system: PeriodicSystem, depth: int = 32) -> ForbiddenSetDescription:
    """Forbidden points with hit index <= depth * k, from the b = 0 closed forms."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    system = normalize_b0(system) if not _is_normal(system) else system
    data = tilde_coeffs(system)
    k = system.k
    horizon = depth * k
    one = _one(system)
    prefix = []
    for i in range(k - 1):
        abar, cbar = _bar(system, i)
        w = cbar + system.c[i] * abar
        if not is_zero(w):
            prefix.append(ForbiddenPoint(simplify(-one / w), i + 1))
    families = []
    for i in range(k):
        abar, cbar = _bar(system, i)
        back = inverse(Matrix2(abar, 0 * one, cbar, one))
        ct = data.c_tilde[i]
        pts = []
        if not is_zero(ct):
            for n in range(1, (horizon - i) // k + 1):
                w = cbar + _geometric(data.a_tilde, n) * ct * abar
                if not is_zero(w):
                    pts.append(ForbiddenPoint(simplify(-one / w), i + n * k))
        families.append(ForbiddenFamily(i, back, "b0" if pts else "empty", tuple(pts)))
    return dedupe(prefix, families, horizon)


def _is_normal(system: PeriodicSystem) -> bool:
    return system.is_b_zero() and all(is_zero(d - 1) for d in system.d)


def classify_b0(system: PeriodicSystem):
    """Verdict for x_{n+1} = a_n x_n / (c_n x_n + 1) with k-periodic a, c."""
    system = normalize_b0(system) if not _is_normal(system) else system
    data = tilde_coeffs(system)
    at, ct = data.a_tilde, data.c_tilde
    k = system.k
    one = _one(system)
    if is_zero(at + 1):
        return PeriodicAll(2 * k)
    size = abs(at)
    nonzero = [i for i in range(k) if not is_zero(ct[i])]
    if size < 1 and not is_zero(size - 1):
        backs = [inverse(Matrix2(*_bar_matrix(system, i))) for i in range(k)]
        excluded = []
        for i in nonzero:
            x0 = apply(backs[i], simplify((at - 1) / ct[i]))
            if x0 is not POLE and x0 not in excluded:
                excluded.append(x0)
        return AttractingFixedPoint(0 * one, tuple(excluded), stable=True)
    if len(nonzero) < k:
        # |at| >= 1 with a branch whose B_i is diagonal
        limits = []
        for i in range(k):
            if i not in nonzero:
                limits.append(None)
            elif is_zero(at - 1):
                limits.append(0 * one)
            else:
                limits.append(simplify((at - 1) / ct[i]))
        return Oscillating(tuple(limits), divergent=not is_zero(at - 1))
    if is_zero(at - 1):
        return AttractingFixedPoint(0 * one, (), stable=False)
    rhos = [simplify((at - 1) / c) for c in ct]
    if all(is_zero(r - rhos[0]) for r in rhos):
        return AttractingFixedPoint(rhos[0], (0 * one,), stable=True)
    return AttractingCycle(tuple(rhos), (0 * one,), stable=True)


def _bar_matrix(system, i):
    abar, cbar = _bar(system, i)
    one = _one(system)
    return abar, 0 * one, cbar, one


def _det(rows) -> object:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    det = m[0][0] ** 0 if n else 1
    for col in range(n):
        piv = next((r for r in range(col, n) if not is_zero(m[r][col])), None)
        if piv is None:
            return 0 * det
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            for j in range(col, n):
                m[r][j] = m[r][j] - f * m[col][j]
    return det


def build_M(system: PeriodicSystem):
    """The k x k matrix M with M (c_0..c_{k-1}) = (ct_0..ct_{k-1}), and det M.

    det M equals (1 - at)^(k-1).
    """
    _require_b0(system)
    a, k = system.a, system.k
    one = _one(system)
    rows = []
    for i in range(k):
        row = []
        for l in range(k):
            if l < i:
                row.append(_prod(a[i:], one) * _prod(a[:l], one))
            else:
                row.append(_prod(a[i:l], one))
        rows.append(row)
    return rows, _det(rows)


# -- the non-periodic sum model -------------------------------------------------


class SumModel:
    """x_{n+1} = x_n / (c_n x_n + 1) for an arbitrary nonzero sequence c_n.

    ``coefficients`` is an iterable of scalars or a callable ``n -> c_n``.
    Partial sums S_n = c_0 + ... + c_{n-1} are cached; the cache only grows
    and extension is serialised by a lock.
    """

    def __init__(self, coefficients, total=None, name: str = "custom") -> None:
        if callable(coefficients):
            self._source: Iterable = (coefficients(n) for n in itertools.count())
        else:
            self._source = iter(coefficients)
        self._coeffs: list = []
        self._sums: list = [None]
        self._lock = threading.Lock()
        self.total = total  # sum of the whole series, when known in closed form
        self.name = name
        self.limit_c = None  # lim c_n, when known

    @classmethod
    def from_spec(cls, spec, mode: str = "exact") -> SumModel:
        """From a JSON array or "geometric:r" / "constant:c" / "alternating"."""
        if isinstance(spec, list):
            vals = [parse_scalar(v, mode) for v in spec]
            return cls(vals, name="list")
        if not isinstance(spec, str):
            raise ValueError(f"bad coefficient stream {spec!r}")
        kind, _, arg = spec.partition(":")
        one = 1.0 if mode == "float" else Fraction(1)
        if kind == "geometric":
            r = parse_scalar(arg, mode)
            total = one / (1 - r) if abs(r) < 1 else None
            model = cls(lambda n: r**n, total=total, name=spec)
            if r == 1:
                model.limit_c = one
            return model
        if kind == "constant":
            c = parse_scalar(arg, mode)
            model = cls(lambda n: c, name=spec)
            model.limit_c = c
            return model
        if kind == "alternating" and not arg:
            return cls(lambda n: one if n % 2 == 0 else -one, name=spec)
        raise ValueError(f"unknown coefficient stream {spec!r}")

    def _extend(self, n: int) -> None:
        with self._lock:
            while len(self._coeffs) < n:
                try:
                    c = next(self._source)
                except StopIteration:
                    raise IndexError(f"coefficient stream ends after {len(self._coeffs)} terms") from None
                if is_zero(c):
                    raise ValueError(f"c_{len(self._coeffs)} = 0")
                prev = self._sums[-1]
                self._coeffs.append(c)
                self._sums.append(c if prev is None else prev + c)

    def coefficient(self, n: int):
        self._extend(n + 1)
        return self._coeffs[n]

    def partial_sum(self, n: int):
        """S_n = c_0 + ... + c_{n-1}; S_0 = 0."""
        if n == 0:
            self._extend(1)
            return 0 * self._coeffs[0]
        self._extend(n)
        return self._sums[n]

    def matrix(self, n: int) -> Matrix2:
        c = self.coefficient(n)
        one = c**0 if not isinstance(c, float) else 1.0
        return Matrix2(one, 0 * one, c, one)


def sum_model_solve(model: SumModel, x0, n: int):
    """x_n = x_0 / (x_0 S_n + 1), or POLE where the denominator vanishes."""
    s = model.partial_sum(n)
    den = x0 * s + 1
    if is_zero(den, max(abs(float(x0 * s)), 1.0)):
        return POLE
    return simplify(x0 / den)


def sum_model_forbidden(model: SumModel, depth: int, with_index: bool = False):
    """Distinct values -1/S_n for n = 1..depth with S_n != 0.

    Each point keeps the first n at which it occurs, which is the step where
    its orbit hits the pole.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    seen = {}
    for n in range(1, depth + 1):
        s = model.partial_sum(n)
        if is_zero(s):
            continue
        x = simplify(-1 / s)
        if x not in seen:
            seen[x] = n
    if with_index:
        return [ForbiddenPoint(x, n) for x, n in seen.items()]
    return list(seen)


def classify_sum_model(model: SumModel):
    """Limit behaviour for the sum model when its coefficients are understood."""
    if model.total is not None:
        return SumLimit(model.total)
    if model.limit_c is not None and not is_zero(model.limit_c):
        return AttractingFixedPoint(0 * model.limit_c, (), stable=False)
    return NotCoveredByPaper("coefficient stream has no known limit or sum")


@dataclass(frozen=True)
class SumLimit:
    """sum c_n converges to ``total``; x_n -> x_0 / (x_0 * total + 1)."""

    total: object
    kind = "SumLimit"

    def limit(self, x0):
        den = x0 * self.total + 1
        return POLE if is_zero(den) else simplify(x0 / den)

    def to_json(self):
        return {"kind": self.kind, "total": format_scalar(self.total)}
