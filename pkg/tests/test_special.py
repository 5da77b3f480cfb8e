from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import b0_systems, load_system, rationals
from riccati.analyzer import forbidden_set, reduce
from riccati.mobius import POLE, Matrix2, power_by_multiplication
from riccati.orbit import iterate, iterate_maps
from riccati.results import AttractingCycle, AttractingFixedPoint, NotCoveredByPaper, Oscillating, PeriodicAll
from riccati.special import (
    SumLimit,
    SumModel,
    bi_power_closed_form,
    build_M,
    classify_b0,
    classify_sum_model,
    forbidden_b0,
    normalize_b0,
    sum_model_forbidden,
    sum_model_solve,
    tilde_coeffs,
)
from riccati.system import InvalidSystemError, PeriodicSystem


def b0(a, c):
    k = len(a)
    return PeriodicSystem(
        tuple(Fraction(x) for x in a), (Fraction(0),) * k, tuple(Fraction(x) for x in c), (Fraction(1),) * k
    )


# -- reduced coefficients --------------------------------------------------------------


@given(b0_systems())
def test_tilde_coeffs_match_products(system):
    data = tilde_coeffs(system)
    for bi, ct in zip(reduce(system), data.c_tilde):
        assert bi == Matrix2(data.a_tilde, 0, ct, 1)


@given(b0_systems(max_k=4), st.integers(min_value=0, max_value=15))
def test_branch_powers(system, n):
    data = tilde_coeffs(system)
    for i, bi in enumerate(reduce(system)):
        assert bi_power_closed_form(data, i, n) == power_by_multiplication(bi, n)


def test_normalize_divides_by_d():
    system = PeriodicSystem((Fraction(4),), (Fraction(0),), (Fraction(2),), (Fraction(2),))
    assert normalize_b0(system) == b0([2], [1])
    with pytest.raises(InvalidSystemError):
        normalize_b0(load_system("two_cycle"))


# -- the coefficient matrix M -----------------------------------------------------------


@given(b0_systems(max_k=6))
def test_det_M_signed_identity(system):
    at = tilde_coeffs(system).a_tilde
    rows, det = build_M(system)
    k = system.k
    assert det == (1 - at) ** (k - 1)
    assert abs(det) == abs(at - 1) ** (k - 1)


@given(b0_systems(max_k=5))
def test_M_maps_c_to_c_tilde(system):
    rows, det = build_M(system)
    data = tilde_coeffs(system)
    image = [sum(r * c for r, c in zip(row, system.c)) for row in rows]
    assert image == list(data.c_tilde)
    oracle = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows]).det()
    assert sympy.Rational(det.numerator, det.denominator) == oracle


# -- forbidden set --------------------------------------------------------------------------


@given(b0_systems(max_k=4), st.integers(min_value=1, max_value=5))
def test_b0_forbidden_matches_general_path(system, depth):
    closed = forbidden_b0(system, depth)
    general = forbidden_set(system, depth)
    assert {(p.point, p.hit_index) for p in closed.all_points()} == {
        (p.point, p.hit_index) for p in general.all_points()
    }


def test_harmonic_forbidden_points():
    desc = forbidden_b0(b0([1], [1]), 3)
    assert [(p.point, p.hit_index) for p in desc.all_points()] == [
        (Fraction(-1), 1),
        (Fraction(-1, 2), 2),
        (Fraction(-1, 3), 3),
    ]


# -- classification ----------------------------------------------------------------------


def test_classify_b0_cases():
    assert classify_b0(b0([-1], [1])) == PeriodicAll(2)
    assert classify_b0(b0([Fraction(1, 2)], [1])) == AttractingFixedPoint(0, (Fraction(-1, 2),), True)
    assert classify_b0(b0([1], [1])) == AttractingFixedPoint(0, (), stable=False)
    assert classify_b0(b0([3], [1])) == AttractingFixedPoint(2, (0,), True)
    cycle = classify_b0(b0([2, 1], [1, 1]))
    assert isinstance(cycle, AttractingCycle)
    assert classify_b0(load_system("b0_oscillating")) == Oscillating((None, Fraction(2)), divergent=True)


def test_oscillating_limits_use_a_tilde_minus_one():
    # at = 3, ct = (0, 2): the converging branch tends to (at - 1)/ct = 1
    system = b0([3, 1], [1, Fraction(-1, 3)])
    data = tilde_coeffs(system)
    assert data.a_tilde == 3 and data.c_tilde[0] == 0
    verdict = classify_b0(system)
    assert verdict.limits[0] is None
    assert verdict.limits[1] == (data.a_tilde - 1) / data.c_tilde[1]
    vals = iterate(system, Fraction(1, 7), 121).values
    assert abs(float(vals[121]) - float(verdict.limits[1])) < 1e-12


@given(b0_systems(max_k=3))
def test_b0_attractors_are_fixed_by_branches(system):
    verdict = classify_b0(system)
    bs = reduce(system)
    if isinstance(verdict, AttractingFixedPoint):
        for b in bs:
            assert b.c * verdict.rho + b.d != 0
            assert (b.a * verdict.rho + b.b) / (b.c * verdict.rho + b.d) == verdict.rho
    elif isinstance(verdict, AttractingCycle):
        for b, rho in zip(bs, verdict.points):
            assert (b.a * rho) / (b.c * rho + 1) == rho


# -- sum model --------------------------------------------------------------------------------


def test_sum_model_from_specs():
    geo = SumModel.from_spec("geometric:-1/2")
    assert [geo.coefficient(n) for n in range(3)] == [1, Fraction(-1, 2), Fraction(1, 4)]
    assert geo.partial_sum(0) == 0 and geo.partial_sum(3) == Fraction(3, 4)
    assert geo.total == Fraction(2, 3)
    const = SumModel.from_spec("constant:2")
    assert const.partial_sum(5) == 10
    alt = SumModel.from_spec("alternating")
    assert [alt.partial_sum(n) for n in range(5)] == [0, 1, 0, 1, 0]
    lst = SumModel.from_spec(["1", "2/3"])
    assert lst.partial_sum(2) == Fraction(5, 3)
    with pytest.raises(IndexError):
        lst.coefficient(2)
    with pytest.raises(ValueError):
        SumModel.from_spec("bogus:1")


def test_zero_coefficient_rejected():
    with pytest.raises(ValueError):
        SumModel([1, 0]).coefficient(1)


@given(rationals, st.integers(min_value=0, max_value=40))
def test_sum_model_closed_form_matches_iteration(x0, n):
    model = SumModel.from_spec("geometric:-1/2")
    trace = iterate_maps(model.matrix, x0, n)
    m = n if trace.pole_at is None else trace.pole_at
    closed = sum_model_solve(model, x0, m)
    assert closed is trace.values[m] if closed is POLE else closed == trace.values[m]


def test_sum_model_forbidden_signs():
    model = SumModel.from_spec("geometric:-1/2")
    pts = sum_model_forbidden(model, 3, with_index=True)
    assert [(p.point, p.hit_index) for p in pts] == [
        (Fraction(-1), 1),
        (Fraction(-2), 2),
        (Fraction(-4, 3), 3),
    ]
    alt = SumModel.from_spec("alternating")
    # S_n = 0 for even n, so those steps add no point, and -1/S_n repeats
    assert sum_model_forbidden(alt, 6) == [Fraction(-1)]


def test_classify_sum_model():
    assert classify_sum_model(SumModel.from_spec("geometric:-1/2")) == SumLimit(Fraction(2, 3))
    assert classify_sum_model(SumModel.from_spec("constant:1")) == AttractingFixedPoint(0, (), stable=False)
    assert isinstance(classify_sum_model(SumModel.from_spec("alternating")), NotCoveredByPaper)
    assert SumLimit(Fraction(2, 3)).limit(Fraction(-3, 2)) is POLE
