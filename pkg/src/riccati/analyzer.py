"""Forbidden sets and asymptotic classification for k-periodic systems.

The k-periodic equation is split into k autonomous maps
``B_i = A_{i-1} ... A_0 A_{k-1} ... A_i`` governing the subsequences
``x_{nk+i}``.  All B_i share trace T and determinant D; the sign of
``T^2 - 4D`` picks the regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .mobius import (
    POLE,
    Matrix2,
    apply,
    eigenvalues,
    inverse,
    multiply,
    partial_product,
)
from .numeric import QuadExt, is_zero, near_equal, simplify, sign
from .results import (
    AttractingCycle,
    AttractingFixedPoint,
    CharacteristicData,
    ComplexPair,
    DenseOrbits,
    ForbiddenFamily,
    ForbiddenPoint,
    ForbiddenSetDescription,
    NotCoveredByPaper,
    PeriodicAll,
    PeriodicAllRotation,
    RealDistinct,
    RealDouble,
    dedupe,
)
from .system import InvalidSystemError, PeriodicSystem

__all__ = [
    "PeriodicSystem",
    "InvalidSystemError",
    "reduce",
    "characteristic",
    "autonomous_forbidden",
    "forbidden_set",
    "classify",
    "theta_rationality",
    "FiniteOrder",
    "Irrational",
    "Heuristic",
]

DEFAULT_DEPTH = 32


def reduce(system: PeriodicSystem) -> list[Matrix2]:
    """The k cyclic products B_0, ..., B_{k-1}."""
    k = system.k
    out = []
    for i in range(k):
        acc = Matrix2.identity(system.mode)
        for j in range(i, i + k):
            acc = multiply(system.matrix(j), acc)
        out.append(acc)
    return out


def _delta_scale(t, d) -> float:
    return abs(float(t)) ** 2 + 4 * abs(float(d))


def characteristic(b0: Matrix2) -> CharacteristicData:
    t, d = b0.trace, b0.det
    if is_zero(d, b0.scale**2):
        raise ValueError("characteristic data needs det(B_0) != 0")
    delta = t * t - 4 * d
    if is_zero(delta, _delta_scale(t, d)):
        roots = RealDouble(t / 2)
    elif sign(delta) > 0:
        lam, mu = eigenvalues(b0)
        roots = RealDistinct(lam, mu)
    else:
        roots = ComplexPair(d, t * t / (4 * d))
    return CharacteristicData(t, d, delta, roots)


# -- forbidden sets ------------------------------------------------------------


def _autonomous_members(m: Matrix2, nmax: int):
    """Yield (n, pole of M^n) for n = 1..nmax, skipping n with no pole.

    Real roots use the closed form
        -d/c + l1 l2 (l1^(n-1) - l2^(n-1)) / ((l1^n - l2^n) c)
    (double root: -d/c + l (n-1)/(n c)); complex roots walk the
    Cayley-Hamilton recurrence for the second row of M^n.
    """
    if is_zero(m.c, m.scale) or nmax < 1:
        return
    a, b, c, d = m.a, m.b, m.c, m.d
    data = characteristic(m)
    base = -d / c
    roots = data.roots
    if isinstance(roots, RealDouble):
        lam = roots.lam
        for n in range(1, nmax + 1):
            yield n, simplify(base + lam * (n - 1) / (n * c))
    elif isinstance(roots, RealDistinct):
        l1, l2 = roots.lam, roots.mu
        prod = l1 * l2
        p1, p2 = l1 ** 0, l2 ** 0  # l^(n-1)
        for n in range(1, nmax + 1):
            q1, q2 = p1 * l1, p2 * l2
            gap = q1 - q2
            if not is_zero(gap, max(abs(float(q1)), 1.0)):
                yield n, simplify(base + prod * (p1 - p2) / (gap * c))
            p1, p2 = q1, q2
    else:
        t, det = data.trace, data.det
        # second row (c_n, d_n) of M^n; M^0 = I
        prev_c, prev_d = 0 * c, 0 * c + 1
        cur_c, cur_d = c, d
        for n in range(1, nmax + 1):
            if not is_zero(cur_c, m.scale ** n if n < 50 else 1.0):
                yield n, simplify(-cur_d / cur_c)
            prev_c, prev_d, cur_c, cur_d = (
                cur_c,
                cur_d,
                t * cur_c - det * prev_c,
                t * cur_d - det * prev_d,
            )


def _family_kind(m: Matrix2) -> str:
    if is_zero(m.c, m.scale):
        return "empty"
    roots = characteristic(m).roots
    return {
        RealDistinct: "distinct_roots",
        RealDouble: "double_root",
        ComplexPair: "complex_roots",
    }[type(roots)]


def autonomous_forbidden(m: Matrix2, depth: int = DEFAULT_DEPTH) -> ForbiddenSetDescription:
    """Forbidden set of x_{n+1} = f_M(x_n), members n = 1..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    pts = tuple(ForbiddenPoint(p, n) for n, p in _autonomous_members(m, depth))
    fam = ForbiddenFamily(0, Matrix2.identity(m.mode), _family_kind(m), pts)
    return dedupe((), (fam,), depth)


def forbidden_set(system: PeriodicSystem, depth: int = DEFAULT_DEPTH) -> ForbiddenSetDescription:
    """All initial values whose orbit hits a pole within ``depth * k`` steps.

    The first k-1 steps contribute the pulled-back poles of A_0 .. A_{k-2};
    afterwards branch i contributes the forbidden set of B_i pulled back
    through the first i maps.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    k = system.k
    horizon = depth * k
    prefix = []
    back = []  # inverse of A_{i-1} ... A_0
    for i in range(k):
        back.append(inverse(partial_product(system, i)))
    for i in range(k - 1):
        ai = system.matrix(i)
        x0 = apply(back[i], -ai.d / ai.c)
        if x0 is not POLE:
            prefix.append(ForbiddenPoint(x0, i + 1))
    families = []
    for i, bi in enumerate(reduce(system)):
        nmax = (horizon - i) // k
        pts = []
        for n, y in _autonomous_members(bi, nmax):
            x0 = apply(back[i], y)
            if x0 is not POLE:
                pts.append(ForbiddenPoint(x0, i + n * k))
        families.append(ForbiddenFamily(i, back[i], _family_kind(bi), tuple(pts)))
    return dedupe(prefix, families, horizon)


# -- rotation angle --------------------------------------------------------------


@dataclass(frozen=True)
class FiniteOrder:
    q: int


@dataclass(frozen=True)
class Irrational:
    pass


@dataclass(frozen=True)
class Heuristic:
    q: Optional[int]


# cos(2 theta) = T^2/(2D) - 1 is rational; it is a root-of-unity cosine only
# for T^2/D in {1, 2, 3} once T != 0 and T^2 < 4D.  theta is then one of
# pi/3, 2pi/3 (q=3), pi/4, 3pi/4 (q=4), pi/6, 5pi/6 (q=6).
_NIVEN_ORDERS = {Fraction(1): 3, Fraction(2): 4, Fraction(3): 6}

_CF_DEPTH = 20
_CF_TOL = 1e-12
_CF_MAX_Q = 1000


def _convergents(x: float, depth: int):
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for _ in range(depth):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1
        frac = x - a
        if frac < 1e-15:
            return
        x = 1.0 / frac


def theta_rationality(t, d):
    """Decide whether the argument of the complex roots is a rational multiple of pi."""
    if is_zero(t, abs(float(d)) ** 0.5):
        raise ValueError("T = 0 is the 2-periodic case")
    delta = t * t - 4 * d
    if sign(delta) >= 0:
        raise ValueError("theta_rationality needs T^2 - 4D < 0")
    if isinstance(t, float) or isinstance(d, float):
        theta = math.acos(max(-1.0, min(1.0, float(t) / (2 * math.sqrt(float(d))))))
        x = theta / math.pi
        for p, q in _convergents(x, _CF_DEPTH):
            if q > _CF_MAX_Q:
                break
            if abs(x - p / q) <= _CF_TOL:
                return Heuristic(q if q >= 2 else None)
        return Heuristic(None)
    if isinstance(t, QuadExt) or isinstance(d, QuadExt):
        raise ValueError("exact theta test needs rational T and D")
    r = Fraction(t) ** 2 / Fraction(d)
    q = _NIVEN_ORDERS.get(r)
    return FiniteOrder(q) if q is not None else Irrational()


# -- classification --------------------------------------------------------------


def _excluded(backs, values):
    out = []
    for back, y in zip(backs, values):
        x0 = apply(back, y)
        if x0 is not POLE and x0 not in out:
            out.append(x0)
    return tuple(out)


def _all_equal(xs, scale) -> bool:
    return all(near_equal(x, xs[0], scale) for x in xs[1:])


def classify(system: PeriodicSystem):
    """Asymptotic verdict for every solution of the periodic system."""
    k = system.k
    bs = reduce(system)
    data = characteristic(bs[0])
    t = data.trace
    if is_zero(t, bs[0].scale):
        return PeriodicAll(2 * k)
    zero_c = [i for i, bi in enumerate(bs) if is_zero(bi.c, bi.scale)]
    if zero_c:
        if system.is_b_zero():
            from .special import classify_b0

            return classify_b0(system)
        return NotCoveredByPaper(
            "some B_i has a zero (2,1) entry and b is not identically zero",
            branch=zero_c[0],
        )
    backs = [inverse(partial_product(system, i)) for i in range(k)]
    scale = max(bi.scale for bi in bs)
    roots = data.roots
    if isinstance(roots, RealDistinct):
        lam, mu = roots.lam, roots.mu
        rhos = [simplify((lam - bi.d) / bi.c) for bi in bs]
        excluded = _excluded(backs, [simplify((mu - bi.d) / bi.c) for bi in bs])
        if _all_equal(rhos, scale):
            return AttractingFixedPoint(rhos[0], excluded, stable=True)
        return AttractingCycle(tuple(rhos), excluded, stable=True)
    if isinstance(roots, RealDouble):
        rhos = [simplify((bi.a - bi.d) / (2 * bi.c)) for bi in bs]
        if _all_equal(rhos, scale):
            return AttractingFixedPoint(rhos[0], (), stable=False)
        return AttractingCycle(tuple(rhos), (), stable=False)
    verdict = theta_rationality(t, data.det)
    q = getattr(verdict, "q", None)
    if q is not None:
        return PeriodicAllRotation(k * q, q)
    return DenseOrbits()
