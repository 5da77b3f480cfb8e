"""Direct iteration of the recurrence: the ground truth every closed form is checked against."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import kernels
from .mobius import POLE, Matrix2, apply, partial_product
from .numeric import FLOAT_RTOL, QuadExt, check_compatible, format_scalar
from .system import PeriodicSystem

EXACT_STEP_CAP = 10_000
EXACT_BIT_CAP = 10**6

DEFAULT_EPS = 1e-9
DEFAULT_WINDOW = 50
DEFAULT_BURN_IN = 500


class PrecisionWarning(UserWarning):
    """Exact iteration outgrew its caps and continued in floating point."""


@dataclass(frozen=True)
class OrbitTrace:
    x0: object
    values: list  # x_0, x_1, ...; a trailing POLE marks the undefined step
    pole_at: Optional[int] = None
    k: int = 1
    degraded_at: Optional[int] = None  # first float-valued step after degrading
    detected_period: Optional[int] = None
    limit_estimate: object = None

    def finite(self) -> list:
        return self.values if self.pole_at is None else self.values[:-1]

    def residue(self, i: int, k: Optional[int] = None) -> list:
        """The subsequence x_i, x_{i+k}, x_{i+2k}, ... (finite part only)."""
        return self.finite()[i :: k or self.k]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


def _bits(x) -> int:
    if isinstance(x, Fraction):
        return max(x.numerator.bit_length(), x.denominator.bit_length())
    if isinstance(x, QuadExt):
        return max(_bits(x.rat), _bits(x.irr))
    return 0


def _float_tail(system: PeriodicSystem, x, start: int, steps: int):
    coeffs = np.array([[float(v) for v in (m.a, m.b, m.c, m.d)] for m in system.matrices])
    # rotate so row 0 is the map applied at step `start`
    coeffs = np.roll(coeffs, -(start % system.k), axis=0)
    vals, pole = kernels.iterate_float(coeffs, float(x), steps, FLOAT_RTOL)
    return [float(v) for v in vals], pole


def iterate(
    system: PeriodicSystem,
    x0,
    steps: int,
    *,
    step_cap: int = EXACT_STEP_CAP,
    bit_cap: int = EXACT_BIT_CAP,
) -> OrbitTrace:
    """x_0 .. x_steps, stopping at the first pole."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    check_compatible(system.a[0], x0)
    if system.mode == "float":
        vals, pole = _float_tail(system, x0, 0, steps)
        if pole >= 0:
            return OrbitTrace(x0, vals + [POLE], pole, system.k)
        return OrbitTrace(x0, vals, None, system.k)

    mats = system.matrices
    k = system.k
    values = [x0]
    x = x0
    for n in range(steps):
        if n >= step_cap or _bits(x) > bit_cap:
            warnings.warn(
                f"exact iteration capped at step {n}; continuing in floating point",
                PrecisionWarning,
                stacklevel=2,
            )
            tail, pole = _float_tail(system, x, n, steps - n)
            values.extend(tail[1:])
            if pole >= 0:
                return OrbitTrace(x0, values + [POLE], n + pole, k, degraded_at=n + 1)
            return OrbitTrace(x0, values, None, k, degraded_at=n + 1)
        x = apply(mats[n % k], x)
        if x is POLE:
            values.append(POLE)
            return OrbitTrace(x0, values, n + 1, k)
        values.append(x)
    return OrbitTrace(x0, values, None, k)


def iterate_maps(step: Callable[[int], Matrix2], x0, steps: int) -> OrbitTrace:
    """Iterate a non-periodic sequence of maps, ``step(n)`` giving the n-th."""
    values = [x0]
    x = x0
    for n in range(steps):
        x = apply(step(n), x)
        values.append(x)
        if x is POLE:
            return OrbitTrace(x0, values, n + 1)
    return OrbitTrace(x0, values)


@dataclass(frozen=True)
class CrossCheck:
    agree: bool
    index: int
    iterated: object = None
    closed_form: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.agree


def cross_check_closed_form(system: PeriodicSystem, x0, n: int, rtol: float = 1e-9) -> CrossCheck:
    """Compare x_n by iteration with f(x_0) for the product A_{n-1} ... A_0.

    If the orbit hits a pole first, both sides are compared at that step.
    """
    trace = iterate(system, x0, n)
    m = n if trace.pole_at is None else trace.pole_at
    lhs = trace.values[m]
    rhs = apply(partial_product(system, m), x0)
    if lhs is POLE or rhs is POLE:
        agree = lhs is rhs
    elif system.mode == "float":
        agree = abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs), 1.0)
    else:
        agree = lhs == rhs
    detail = "" if agree else f"step {m}: iterate={lhs!r} closed_form={rhs!r}"
    return CrossCheck(agree, m, lhs, rhs, detail)


def detect_period(trace: OrbitTrace, tol: Optional[float] = None) -> Optional[int]:
    """Smallest p with x_{n+p} = x_n across the trace, seen over >= 3 periods.

    ``tol=None`` demands exact equality; otherwise |x_{n+p} - x_n| < tol.
    """
    vals = trace.finite()
    if tol is None:
        eq = lambda u, v: u == v  # noqa: E731
    else:
        vals = [float(v) for v in vals]
        eq = lambda u, v: abs(u - v) < tol  # noqa: E731
    length = len(vals)
    for p in range(1, (length - 1) // 3 + 1):
        if all(eq(vals[n + p], vals[n]) for n in range(length - p)):
            return p
    return None


def _converged(seq, eps: float, window: int, burn_in: int):
    seq = [float(v) for v in seq]
    if len(seq) < window:
        return None
    if len(seq) >= burn_in + window:
        seq = seq[burn_in:]
    tail = seq[-window:]
    if not all(math.isfinite(v) for v in tail):
        return None
    mean = math.fsum(tail) / window
    if max(abs(v - mean) for v in tail) < eps:
        return mean
    return None


def detect_convergence(
    trace: OrbitTrace,
    eps: float = DEFAULT_EPS,
    window: int = DEFAULT_WINDOW,
    burn_in: int = DEFAULT_BURN_IN,
) -> Optional[float]:
    """Limit estimate when the last ``window`` values sit within ``eps`` of their mean."""
    return _converged(trace.finite(), eps, window, burn_in)


def residue_limits(
    trace: OrbitTrace,
    k: Optional[int] = None,
    eps: float = DEFAULT_EPS,
    window: int = DEFAULT_WINDOW,
    burn_in: int = DEFAULT_BURN_IN,
) -> list:
    """Per-residue-class limits of x_{nk+i}; None where a class does not settle."""
    k = k or trace.k
    return [_converged(trace.residue(i, k), eps, window, burn_in) for i in range(k)]


def equidistribution_stat(trace: OrbitTrace, bins: int = 64) -> tuple[float, float]:
    """(fraction of occupied arcs, chi-square vs uniform) for angles 2*atan(x_n)."""
    if trace.pole_at is not None:
        raise ValueError("trace contains a pole")
    if len(trace.values) < 100 * bins:
        raise ValueError(f"trace too short: need >= {100 * bins} values, got {len(trace.values)}")
    vals = np.asarray([float(v) for v in trace.values], dtype=np.float64)
    counts = kernels.angle_histogram(vals, bins)
    expected = len(vals) / bins
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    occupancy = float(np.count_nonzero(counts)) / bins
    return occupancy, chi2


def with_detection(trace: OrbitTrace, tol: Optional[float] = None) -> OrbitTrace:
    """Copy of ``trace`` with period and limit filled in.

    Exact traces use exact period matching unless ``tol`` is given.
    """
    exact = trace.degraded_at is None and not isinstance(trace.x0, float)
    if tol is None and not exact:
        tol = DEFAULT_EPS
    return replace(
        trace,
        detected_period=detect_period(trace, tol),
        limit_estimate=detect_convergence(trace),
    )


# -- export ----------------------------------------------------------------------


def _cell(v) -> str:
    if v is POLE:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def trace_to_csv(trace: OrbitTrace, fh=None) -> str:
    """CSV with columns step,value,event; returns the text when ``fh`` is None."""
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "value", "event"])
    for n, v in enumerate(trace.values):
        w.writerow([n, _cell(v), "pole" if v is POLE else "finite"])
    return buf.getvalue() if fh is None else ""


def trace_to_json(trace: OrbitTrace) -> dict:
    return {
        "x0": format_scalar(trace.x0),
        "pole_at": trace.pole_at,
        "degraded_at": trace.degraded_at,
        "values": ["pole" if v is POLE else format_scalar(v) for v in trace.values],
    }


def near(x, y, tol: float) -> bool:
    """|x - y| < tol after converting both to float."""
    return abs(float(x) - float(y)) < tol


__all__ = [
    "OrbitTrace",
    "PrecisionWarning",
    "iterate",
    "iterate_maps",
    "cross_check_closed_form",
    "CrossCheck",
    "detect_period",
    "detect_convergence",
    "residue_limits",
    "equidistribution_stat",
    "trace_to_csv",
    "trace_to_json",
    "with_detection",
    "near",
]
