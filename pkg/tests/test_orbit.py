import csv
import io
import warnings
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import load_system, rationals, systems
from riccati.analyzer import forbidden_set
from riccati.mobius import POLE
from riccati.numeric import exact_sqrt
from riccati.orbit import (
    PrecisionWarning,
    cross_check_closed_form,
    detect_convergence,
    detect_period,
    equidistribution_stat,
    iterate,
    residue_limits,
    trace_to_csv,
    trace_to_json,
    with_detection,
)


def naive_orbit(system, x0, steps):
    out = [x0]
    x = x0
    for n in range(steps):
        a, b, c, d = (col[n % system.k] for col in (system.a, system.b, system.c, system.d))
        den = c * x + d
        if den == 0:
            out.append(POLE)
            return out
        x = (a * x + b) / den
        out.append(x)
    return out


@given(systems(), rationals, st.integers(min_value=0, max_value=30))
def test_exact_iteration_matches_naive_loop(system, x0, steps):
    trace = iterate(system, x0, steps)
    expected = naive_orbit(system, x0, steps)
    assert trace.values == expected
    assert trace.pole_at == (len(expected) - 1 if expected[-1] is POLE else None)


@given(systems(max_k=3), rationals)
def test_float_iteration_tracks_exact(system, x0):
    exact = iterate(system, x0, 12)
    approx = iterate(system.to_float(), float(x0), 12)
    if exact.pole_at is not None:
        return
    for u, v in zip(approx.finite(), exact.values):
        assert abs(u - float(v)) <= 1e-6 * max(1.0, abs(float(v)))


def test_zero_steps():
    trace = iterate(load_system("two_cycle"), Fraction(1), 0)
    assert trace.values == [Fraction(1)] and trace.pole_at is None


def test_pole_at_first_forbidden_point():
    system = load_system("two_cycle")
    trace = iterate(system, Fraction(-1), 10)
    assert trace.pole_at == 1
    assert trace.values == [Fraction(-1), POLE]
    for p in forbidden_set(system, 3).all_points():
        assert iterate(system, p.point, 20).pole_at == p.hit_index


def test_float_pole_detection():
    system = load_system("two_cycle").to_float()
    assert iterate(system, -0.5, 10).pole_at == 2


def test_exact_iteration_degrades_at_step_cap():
    system = load_system("golden_fixed_point")
    exact = iterate(system, Fraction(1, 3), 40)
    assert exact.pole_at is None
    with pytest.warns(PrecisionWarning):
        capped = iterate(system, Fraction(1, 3), 40, step_cap=10)
    assert capped.degraded_at == 11
    assert capped.values[:11] == exact.values[:11]
    assert all(isinstance(v, float) for v in capped.values[11:])
    for u, v in zip(capped.values[11:], exact.values[11:]):
        assert abs(u - float(v)) < 1e-12


def test_exact_iteration_degrades_at_bit_cap():
    with pytest.warns(PrecisionWarning):
        trace = iterate(load_system("two_cycle"), Fraction(1), 200, bit_cap=64)
    assert trace.degraded_at is not None and trace.degraded_at < 200
    assert abs(trace.values[-1] - float(exact_sqrt(2) / 2)) < 1e-12


def test_no_warning_within_caps():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        iterate(load_system("two_cycle"), Fraction(1), 100)


@given(systems(), rationals, st.integers(min_value=0, max_value=25))
def test_cross_check_closed_form(system, x0, n):
    assert cross_check_closed_form(system, x0, n).agree


# -- detection -----------------------------------------------------------------------------


def test_detect_period_of_trace_zero_system():
    trace = iterate(load_system("trace_zero"), Fraction(1, 3), 40)
    p = detect_period(trace)
    assert p is not None and 8 % p == 0


def test_fixed_point_has_period_one():
    r5 = exact_sqrt(5)
    trace = iterate(load_system("golden_fixed_point"), (1 - r5) / 2, 12)
    assert detect_period(trace) == 1


def test_no_period_for_converging_orbit():
    assert detect_period(iterate(load_system("golden_fixed_point"), Fraction(1, 3), 30)) is None


def test_convergence_and_residue_limits():
    golden = iterate(load_system("golden_fixed_point").to_float(), 1 / 3, 2000)
    assert detect_convergence(golden) == pytest.approx(float((1 - exact_sqrt(5)) / 2), abs=1e-9)
    cycle = iterate(load_system("two_cycle").to_float(), 1.0, 2000)
    lims = residue_limits(cycle)
    assert lims[0] == pytest.approx(float(exact_sqrt(2) / 2), abs=1e-9)
    assert lims[1] == pytest.approx(float(exact_sqrt(2) - 1), abs=1e-9)
    assert detect_convergence(cycle) is None


def test_with_detection_fills_fields():
    trace = with_detection(iterate(load_system("trace_zero"), Fraction(2), 24))
    assert trace.detected_period is not None and 8 % trace.detected_period == 0


def test_equidistribution_occupancy():
    trace = iterate(load_system("dense_rotation").to_float(), 0.3, 10**5 - 1)
    occupancy, chi2 = equidistribution_stat(trace, 64)
    assert occupancy == 1.0 and chi2 >= 0
    short = iterate(load_system("dense_rotation").to_float(), 0.3, 100)
    with pytest.raises(ValueError):
        equidistribution_stat(short, 64)
    periodic = iterate(load_system("rotation_q3").to_float(), 0.3, 10**4)
    assert equidistribution_stat(periodic, 64)[0] < 0.1


# -- export --------------------------------------------------------------------------------


def test_csv_export():
    trace = iterate(load_system("two_cycle"), Fraction(-1, 2), 5)
    rows = list(csv.reader(io.StringIO(trace_to_csv(trace))))
    assert rows[0] == ["step", "value", "event"]
    assert rows[1] == ["0", "-1/2", "finite"]
    assert rows[-1] == ["2", "", "pole"]
    buf = io.StringIO()
    trace_to_csv(trace, buf)
    assert buf.getvalue() == trace_to_csv(trace)


def test_json_export():
    data = trace_to_json(iterate(load_system("two_cycle"), Fraction(-1), 3))
    assert data["values"] == ["-1", "pole"]
    assert data["pole_at"] == 1
