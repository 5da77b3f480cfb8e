"""Seeded cross-checks of analytic claims against direct iteration."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .mobius import POLE
from .numeric import format_scalar
from .orbit import cross_check_closed_form, equidistribution_stat, iterate, iterate_maps
from .results import (
    AttractingCycle,
    AttractingFixedPoint,
    DenseOrbits,
    ForbiddenSetDescription,
    NotCoveredByPaper,
    Oscillating,
    PeriodicAll,
    PeriodicAllRotation,
)
from .special import SumLimit, SumModel, sum_model_forbidden, sum_model_solve
from .system import PeriodicSystem

CONVERGENCE_STEPS = 2000
CONVERGENCE_TOL = 1e-9
SLOW_STEPS = 100_000
DENSE_STEPS = 100_000
DENSE_BINS = 64
CLOSED_FORM_MAX_N = 40
DIVERGENT_PERIODS = 200


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int = 0
    detail: str = ""
    counterexample: Optional[dict] = None

    def to_json(self):
        out = {"name": self.name, "passed": self.passed, "trials": self.trials}
        if self.detail:
            out["detail"] = self.detail
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def random_rational(rng: random.Random, height: int = 1000) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def _height(x) -> int:
    x = Fraction(x)
    return abs(x.numerator) + x.denominator


def _lift(system: PeriodicSystem, x):
    return float(x) if system.mode == "float" else x


def admissible_starts(system: PeriodicSystem, rng: random.Random, count: int, steps: int) -> list:
    """``count`` random rationals whose orbits stay finite for ``steps`` steps."""
    out = []
    while len(out) < count:
        x0 = random_rational(rng)
        if iterate(system, _lift(system, x0), steps).pole_at is None:
            out.append(x0)
    return out


class _Failures:
    """Collects failing trials and reports the one with the smallest x0 height."""

    def __init__(self, name: str):
        self.name = name
        self.found: list = []
        self.trials = 0

    def add(self, x0, detail: str, **extra) -> None:
        self.found.append((x0, detail, extra))

    def result(self) -> CheckResult:
        if not self.found:
            return CheckResult(self.name, True, self.trials)
        x0, detail, extra = min(self.found, key=lambda f: (_height(f[0]), str(f[0])))
        ce = {"x0": format_scalar(x0), **extra}
        return CheckResult(self.name, False, self.trials, detail, ce)


def check_closed_form(system: PeriodicSystem, rng: random.Random, trials: int) -> CheckResult:
    fails = _Failures("closed_form_vs_iteration")
    for _ in range(trials):
        x0 = random_rational(rng)
        n = rng.randint(0, CLOSED_FORM_MAX_N)
        fails.trials += 1
        res = cross_check_closed_form(system, _lift(system, x0), n)
        if not res.agree:
            fails.add(x0, res.detail, n=n)
    return fails.result()


def check_forbidden(system: PeriodicSystem, forbidden: ForbiddenSetDescription) -> CheckResult:
    fails = _Failures("forbidden_soundness")
    for p in forbidden.all_points():
        fails.trials += 1
        trace = iterate(system, p.point, p.hit_index)
        if trace.pole_at != p.hit_index:
            fails.add(
                p.point if not isinstance(p.point, float) else Fraction(p.point),
                f"predicted pole at {p.hit_index}, observed {trace.pole_at}",
                hit_index=p.hit_index,
            )
    return fails.result()


def _check_periodic(system, period, rng, trials) -> CheckResult:
    fails = _Failures("verdict_periodic")
    exact = system.mode == "exact"
    for x0 in admissible_starts(system, rng, trials, 3 * period):
        fails.trials += 1
        vals = iterate(system, _lift(system, x0), 3 * period).values
        for n in range(2 * period + 1):
            u, v = vals[n + period], vals[n]
            same = u == v if exact else abs(u - v) <= 1e-6 * max(abs(u), abs(v), 1.0)
            if not same:
                fails.add(x0, f"x_{n + period} != x_{n} for period {period}", n=n)
                break
    return fails.result()


def _targets(verdict, k):
    if isinstance(verdict, AttractingFixedPoint):
        return [verdict.rho] * k
    return list(verdict.points)


def _check_attracting(system, verdict, rng, trials) -> CheckResult:
    k = system.k
    fsys = system.to_float()
    targets = [float(t) for t in _targets(verdict, k)]
    fails = _Failures("verdict_attraction")
    if verdict.stable:
        steps = CONVERGENCE_STEPS
    else:
        steps = SLOW_STEPS
    for x0 in admissible_starts(system, rng, trials, 4 * k):
        fails.trials += 1
        trace = iterate(fsys, float(x0), steps)
        if trace.pole_at is not None:
            fails.add(x0, f"float orbit hit a pole at {trace.pole_at}")
            continue
        vals = trace.values
        if verdict.stable:
            errs = [abs(vals[n] - targets[n % k]) for n in range(steps - k + 1, steps + 1)]
            if max(errs) >= CONVERGENCE_TOL:
                fails.add(x0, f"|x_n - rho| = {max(errs):.3e} after {steps} steps")
        else:
            # parabolic case: error decays like 1/n
            mid = steps // 10
            end = max(abs(vals[n] - targets[n % k]) for n in range(steps - k + 1, steps + 1))
            early = max(abs(vals[n] - targets[n % k]) for n in range(mid - k + 1, mid + 1))
            if end >= 1e-3 or (early > 0 and end > 0.5 * early):
                fails.add(x0, f"slow convergence not observed: err {early:.3e} -> {end:.3e}")
    return fails.result()


def _check_oscillating(system, verdict: Oscillating, rng, trials) -> CheckResult:
    k = system.k
    fails = _Failures("verdict_oscillation")
    if verdict.divergent:
        # converging branches approach a pole of the next map, which float
        # arithmetic cannot resolve, so the whole check runs exactly
        steps, run = DIVERGENT_PERIODS * k, system
        tol = CONVERGENCE_TOL
    else:
        steps, run = SLOW_STEPS, system.to_float()
        tol = 1e-3
    for x0 in admissible_starts(system, rng, trials, 4 * k):
        if x0 == 0:
            continue
        fails.trials += 1
        trace = iterate(run, _lift(run, x0), steps)
        if trace.pole_at is not None:
            fails.add(x0, f"orbit hit a pole at {trace.pole_at}")
            continue
        for i, lim in enumerate(verdict.limits):
            sub = trace.residue(i, k)
            if lim is None:
                if verdict.divergent:
                    ok = all(abs(sub[n + 1]) > abs(sub[n]) for n in range(len(sub) - 1))
                else:
                    ok = all(abs(v - sub[0]) <= 1e-9 * max(1.0, abs(sub[0])) for v in sub)
                if not ok:
                    fails.add(x0, f"branch {i} neither diverges nor freezes", branch=i)
                    break
            elif abs(float(sub[-1] - lim)) >= tol:
                fails.add(x0, f"branch {i} ends at {float(sub[-1])!r}, expected {float(lim)!r}", branch=i)
                break
    return fails.result()


def _check_dense(system, rng, trials, bins) -> CheckResult:
    fails = _Failures("verdict_dense")
    fsys = system.to_float()
    for x0 in admissible_starts(system, rng, max(1, min(trials, 3)), 4 * system.k):
        fails.trials += 1
        trace = iterate(fsys, float(x0), DENSE_STEPS - 1)
        if trace.pole_at is not None:
            fails.add(x0, f"float orbit hit a pole at {trace.pole_at}")
            continue
        occupancy, _ = equidistribution_stat(trace, bins)
        if occupancy < 1.0:
            fails.add(x0, f"occupancy {occupancy:.4f} < 1 over {bins} arcs")
    return fails.result()


def check_verdict(system, verdict, rng, trials, bins=DENSE_BINS) -> CheckResult:
    if isinstance(verdict, (PeriodicAll, PeriodicAllRotation)):
        return _check_periodic(system, verdict.period, rng, trials)
    if isinstance(verdict, (AttractingFixedPoint, AttractingCycle)):
        return _check_attracting(system, verdict, rng, trials)
    if isinstance(verdict, Oscillating):
        return _check_oscillating(system, verdict, rng, trials)
    if isinstance(verdict, DenseOrbits):
        return _check_dense(system, rng, trials, bins)
    if isinstance(verdict, NotCoveredByPaper):
        return CheckResult("verdict", True, 0, "skipped: no verdict to confirm")
    raise TypeError(f"unknown verdict {verdict!r}")


def verify_system(
    system: PeriodicSystem,
    verdict,
    forbidden: ForbiddenSetDescription,
    trials: int = 50,
    seed: int = 0,
    bins: int = DENSE_BINS,
) -> VerificationReport:
    rng = random.Random(seed)
    report = VerificationReport()
    report.checks.append(check_closed_form(system, rng, trials))
    report.checks.append(check_forbidden(system, forbidden))
    report.checks.append(check_verdict(system, verdict, rng, trials, bins))
    return report


def verify_sum_model(model: SumModel, verdict, trials: int = 50, seed: int = 0, depth: int = 32) -> VerificationReport:
    rng = random.Random(seed)
    report = VerificationReport()
    steps = 100
    fails = _Failures("closed_form_vs_iteration")
    for _ in range(trials):
        x0 = random_rational(rng)
        fails.trials += 1
        trace = iterate_maps(model.matrix, x0, steps)
        m = steps if trace.pole_at is None else trace.pole_at
        closed = sum_model_solve(model, x0, m)
        if not (closed is POLE and trace.values[m] is POLE or closed == trace.values[m]):
            fails.add(x0, f"step {m}: iterate={trace.values[m]!r} closed={closed!r}")
    report.checks.append(fails.result())

    fails = _Failures("forbidden_soundness")
    for p in sum_model_forbidden(model, depth, with_index=True):
        fails.trials += 1
        trace = iterate_maps(model.matrix, p.point, p.hit_index)
        if trace.pole_at != p.hit_index:
            fails.add(p.point, f"predicted pole at {p.hit_index}, observed {trace.pole_at}")
    report.checks.append(fails.result())

    if isinstance(verdict, SumLimit):
        fails = _Failures("verdict_limit")
        for _ in range(trials):
            x0 = random_rational(rng)
            target = verdict.limit(x0)
            trace = iterate_maps(model.matrix, x0, 200)
            if trace.pole_at is not None or target is POLE:
                continue
            fails.trials += 1
            if abs(float(trace.values[-1]) - float(target)) >= 1e-12:
                fails.add(x0, f"x_200 = {float(trace.values[-1])!r}, expected {float(target)!r}")
        report.checks.append(fails.result())
    else:
        report.checks.append(CheckResult("verdict", True, 0, "skipped: no limit claim to confirm"))
    return report
