from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import load_system, matrices, systems
from riccati.analyzer import (
    FiniteOrder,
    Heuristic,
    Irrational,
    autonomous_forbidden,
    characteristic,
    classify,
    forbidden_set,
    reduce,
    theta_rationality,
)
from riccati.mobius import POLE, Matrix2, apply, inverse, multiply, power_by_multiplication
from riccati.numeric import exact_sqrt
from riccati.orbit import iterate
from riccati.results import (
    AttractingCycle,
    AttractingFixedPoint,
    ComplexPair,
    DenseOrbits,
    NotCoveredByPaper,
    PeriodicAll,
    PeriodicAllRotation,
    RealDistinct,
    RealDouble,
)
from riccati.system import PeriodicSystem, system_from_ints

mpmath.mp.dps = 50


def cycle_product(system, i):
    acc = Matrix2.identity()
    for j in range(i, i + system.k):
        acc = multiply(system.matrix(j), acc)
    return acc


# -- reduction --------------------------------------------------------------------------


def test_reduce_fixtures():
    assert reduce(load_system("two_cycle")) == [Matrix2(1, 1, 2, 1), Matrix2(0, 1, 1, 2)]
    assert reduce(load_system("golden_fixed_point")) == [Matrix2(0, 1, 1, -1)] * 2
    assert reduce(load_system("trace_zero"))[0] == Matrix2(2, 0, 0, -2)


@given(systems(max_k=5))
def test_reduce_matches_cyclic_products(system):
    bs = reduce(system)
    for i, bi in enumerate(bs):
        assert bi == cycle_product(system, i)
    assert len({b.trace for b in bs}) == 1
    assert len({b.det for b in bs}) == 1


def test_characteristic_examples():
    r2, r5 = exact_sqrt(2), exact_sqrt(5)
    data = characteristic(Matrix2(1, 1, 2, 1))
    assert (data.trace, data.det, data.delta) == (2, -1, 8)
    assert data.roots == RealDistinct(1 + r2, 1 - r2)
    data = characteristic(Matrix2(0, 1, 1, -1))
    assert (data.trace, data.det, data.delta) == (-1, -1, 5)
    assert data.roots == RealDistinct(-(1 + r5) / 2, (-1 + r5) / 2)
    assert characteristic(Matrix2(2, 0, 0, -2)).trace == 0
    assert isinstance(characteristic(Matrix2(1, 1, -1, 3)).roots, RealDouble)
    assert isinstance(characteristic(Matrix2(1, -1, 1, 0)).roots, ComplexPair)


@given(matrices())
def test_roots_solve_characteristic_equation(m):
    data = characteristic(m)
    assert data.delta == data.trace**2 - 4 * data.det
    roots = data.roots
    if isinstance(roots, RealDistinct):
        for lam in (roots.lam, roots.mu):
            assert lam * lam - data.trace * lam + data.det == 0
        assert abs(roots.lam) >= abs(roots.mu)
        assert roots.lam * roots.mu == data.det
    elif isinstance(roots, RealDouble):
        assert 2 * roots.lam == data.trace


# -- forbidden sets ---------------------------------------------------------------------


def test_autonomous_forbidden_first_terms():
    pts = autonomous_forbidden(Matrix2(1, 1, 2, 1), 2).all_points()
    assert [(p.point, p.hit_index) for p in pts] == [(Fraction(-1, 2), 1), (Fraction(-3, 4), 2)]


@given(matrices(), st.integers(min_value=1, max_value=12))
def test_autonomous_forbidden_is_sound_and_complete(m, depth):
    assume(m.c != 0)
    desc = autonomous_forbidden(m, depth)
    auto = PeriodicSystem.from_matrices([m])
    for p in desc.all_points():
        assert iterate(auto, p.point, depth).pole_at == p.hit_index
    # completeness: the pole of M^n has its orbit undefined by step n
    for n in range(1, depth + 1):
        mn = power_by_multiplication(m, n)
        if mn.c != 0:
            x = -mn.d / mn.c
            hit = desc.hit_index(x)
            assert hit is not None and hit <= n


def test_two_cycle_forbidden_set():
    desc = forbidden_set(load_system("two_cycle"), 2)
    assert [(p.point, p.hit_index) for p in desc.all_points()] == [
        (Fraction(-1), 1),
        (Fraction(-1, 2), 2),
        (Fraction(-2, 3), 3),
        (Fraction(-3, 4), 4),
    ]
    assert desc.horizon == 4


def test_harmonic_forbidden_set():
    desc = forbidden_set(system_from_ints([[1, 0], [1, 1]]), 3)
    assert desc.points() == [Fraction(-1), Fraction(-1, 2), Fraction(-1, 3)]


@given(systems(max_k=4), st.integers(min_value=1, max_value=4))
def test_forbidden_set_is_sound(system, depth):
    desc = forbidden_set(system, depth)
    horizon = depth * system.k
    assert desc.horizon == horizon
    for p in desc.all_points():
        assert 1 <= p.hit_index <= horizon
        assert iterate(system, p.point, horizon).pole_at == p.hit_index


@given(systems(max_k=4), st.integers(min_value=1, max_value=4))
def test_forbidden_set_is_complete(system, depth):
    desc = forbidden_set(system, depth)
    horizon = depth * system.k
    for m in range(1, horizon + 1):
        am = system.matrix(m - 1)
        x = -am.d / am.c
        for j in range(m - 2, -1, -1):
            x = apply(inverse(system.matrix(j)), x)
            if x is POLE:
                break
        else:
            assert desc.hit_index(x) == iterate(system, x, horizon).pole_at


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        forbidden_set(load_system("two_cycle"), 0)


# -- rotation angle ---------------------------------------------------------------------


def test_theta_rationality_examples():
    assert theta_rationality(1, 1) == FiniteOrder(3)
    assert theta_rationality(-1, 1) == FiniteOrder(3)
    assert theta_rationality(2, 2) == FiniteOrder(4)
    assert theta_rationality(3, 3) == FiniteOrder(6)
    assert theta_rationality(1, 5) == Irrational()
    assert theta_rationality(1.0, 1.0) == Heuristic(3)
    assert theta_rationality(1.0, 5.0) == Heuristic(None)


def _angle_is_rational(t, d, qmax=24):
    theta = mpmath.acos(mpmath.mpf(t) / (2 * mpmath.sqrt(d)))
    for q in range(1, qmax + 1):
        turns = q * theta / mpmath.pi
        if abs(turns - mpmath.nint(turns)) < mpmath.mpf(10) ** -40:
            return q
    return None


@given(st.integers(-12, 12), st.integers(1, 60))
def test_theta_rationality_matches_high_precision(t, d):
    assume(t * t < 4 * d and t != 0)
    verdict = theta_rationality(Fraction(t), Fraction(d))
    q = _angle_is_rational(t, d)
    # the orbit repeats after q steps iff q * theta is a multiple of pi
    if isinstance(verdict, FiniteOrder):
        assert q == verdict.q
    else:
        assert q is None


# -- classification ---------------------------------------------------------------------


def test_classify_fixtures():
    r2, r5 = exact_sqrt(2), exact_sqrt(5)
    assert classify(load_system("trace_zero")) == PeriodicAll(8)
    golden = classify(load_system("golden_fixed_point"))
    assert golden == AttractingFixedPoint((1 - r5) / 2, ((1 + r5) / 2,), True)
    cycle = classify(load_system("two_cycle"))
    assert cycle.points == (r2 / 2, r2 - 1)
    assert cycle.excluded_preimages == (-r2 / 2,)
    assert classify(load_system("rotation_q3")) == PeriodicAllRotation(3, 3)
    assert classify(load_system("dense_rotation")) == DenseOrbits()
    assert isinstance(classify(load_system("not_covered")), NotCoveredByPaper)


def test_double_root_is_unstable_attractor():
    verdict = classify(system_from_ints([[1, 1], [-1, 3]]))
    assert verdict == AttractingFixedPoint(Fraction(1), (), stable=False)


@given(systems(max_k=4))
def test_attractors_are_invariant(system):
    verdict = classify(system)
    k = system.k
    bs = reduce(system)
    if isinstance(verdict, (AttractingFixedPoint, AttractingCycle)):
        pts = [verdict.rho] * k if isinstance(verdict, AttractingFixedPoint) else list(verdict.points)
        for i in range(k):
            assert apply(bs[i], pts[i]) == pts[i]
            assert apply(system.matrix(i), pts[i]) == pts[(i + 1) % k]
    elif isinstance(verdict, PeriodicAll):
        for b in bs:
            assert power_by_multiplication(b, 2).b == 0 and power_by_multiplication(b, 2).c == 0


@given(systems(max_k=3))
def test_float_mode_agrees_with_exact(system):
    exact = classify(system)
    approx = classify(system.to_float())
    if isinstance(exact, (PeriodicAll, PeriodicAllRotation, DenseOrbits, NotCoveredByPaper)):
        assert type(approx) is type(exact)
        if isinstance(exact, PeriodicAllRotation):
            assert approx.q == exact.q
    elif isinstance(exact, AttractingFixedPoint) and exact.stable:
        assert type(approx) is AttractingFixedPoint
        assert abs(approx.rho - float(exact.rho)) < 1e-9 * max(1.0, abs(float(exact.rho)))
