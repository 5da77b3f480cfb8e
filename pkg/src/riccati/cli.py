"""Command-line front end: ``riccati analyze|forbidden|orbit|verify SPEC``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .analyzer import DEFAULT_DEPTH, characteristic, classify, forbidden_set, reduce
from .numeric import format_scalar, parse_scalar
from .orbit import (
    equidistribution_stat,
    iterate,
    iterate_maps,
    residue_limits,
    trace_to_csv,
    trace_to_json,
    with_detection,
)
from .results import (
    AttractingCycle,
    AttractingFixedPoint,
    DenseOrbits,
    NotCoveredByPaper,
    Oscillating,
    PeriodicAll,
    PeriodicAllRotation,
    verdict_from_json,
)
from .special import (
    SumLimit,
    SumModel,
    build_M,
    classify_b0,
    classify_sum_model,
    forbidden_b0,
    normalize_b0,
    sum_model_forbidden,
    tilde_coeffs,
)
from .system import InvalidSystemError, PeriodicSystem
from .verify import verify_sum_model, verify_system

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_NOT_COVERED = 3


class SpecError(Exception):
    pass


@dataclass
class SystemSpec:
    raw: dict
    mode: str
    special: Optional[str] = None
    system: Optional[PeriodicSystem] = None
    model: Optional[SumModel] = None

    @property
    def k(self) -> Optional[int]:
        return self.system.k if self.system is not None else None


def _read(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SpecError("spec must be a JSON object")
    return raw


def load_spec(path: str, mode: Optional[str] = None) -> SystemSpec:
    """Read and validate a system spec; ``mode`` overrides the file's."""
    raw = _read(path)
    mode = mode or raw.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise SpecError(f"mode must be exact or float, got {mode!r}")
    special = raw.get("special")
    if special not in (None, "b0", "sum-model"):
        raise SpecError(f"unknown special mode {special!r}")

    if special == "sum-model":
        if "c_stream" not in raw:
            raise SpecError("sum-model spec needs c_stream")
        try:
            model = SumModel.from_spec(raw["c_stream"], mode)
            model.coefficient(0)
        except (ValueError, TypeError, IndexError) as exc:
            raise SpecError(f"bad c_stream: {exc}") from None
        return SystemSpec(raw, mode, special, model=model)

    coeffs = raw.get("coefficients")
    if not isinstance(coeffs, list) or not coeffs:
        raise SpecError("spec needs a non-empty coefficients list")
    if not all(isinstance(r, dict) for r in coeffs):
        raise SpecError("each coefficient record must be an object {a, b, c, d}")
    if "k" in raw and raw["k"] != len(coeffs):
        raise SpecError(f"k = {raw['k']} but {len(coeffs)} coefficient records given")
    try:
        system = PeriodicSystem.from_records(coeffs, mode)
    except (InvalidSystemError, ValueError, TypeError) as exc:
        raise SpecError(f"invalid system: {exc}") from None
    if special == "b0":
        if not system.is_b_zero():
            raise SpecError("special b0 requires every b_n = 0")
        try:
            normalize_b0(system)
        except InvalidSystemError as exc:
            raise SpecError(str(exc)) from None
    return SystemSpec(raw, mode, special, system=system)


# -- report pieces ------------------------------------------------------------------


def _forbidden(spec: SystemSpec, depth: int):
    if spec.model is not None:
        pts = sum_model_forbidden(spec.model, depth, with_index=True)
        return {"horizon": depth, "points": [p.to_json() for p in pts]}
    if spec.special == "b0":
        return forbidden_b0(spec.system, depth).to_json()
    return forbidden_set(spec.system, depth).to_json()


def _verdict(spec: SystemSpec):
    if spec.model is not None:
        return classify_sum_model(spec.model)
    if spec.special == "b0":
        return classify_b0(spec.system)
    return classify(spec.system)


def _b0_data(system: PeriodicSystem) -> dict:
    normal = normalize_b0(system)
    data = tilde_coeffs(normal)
    rows, det = build_M(normal)
    return {
        "a_tilde": format_scalar(data.a_tilde),
        "c_tilde": [format_scalar(c) for c in data.c_tilde],
        "M": [[format_scalar(x) for x in row] for row in rows],
        "det_M": format_scalar(det),
    }


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def describe(verdict) -> str:
    """One plain-language sentence per verdict."""
    if isinstance(verdict, PeriodicAll):
        return f"trace zero: every solution is periodic with period {verdict.period}"
    if isinstance(verdict, PeriodicAllRotation):
        return (
            f"branch maps rotate by a rational angle of order {verdict.q}: "
            f"every solution is periodic with period {verdict.period}"
        )
    if isinstance(verdict, DenseOrbits):
        return "branch maps rotate by an irrational angle: every solution is dense in the real line"
    rate = "geometrically" if getattr(verdict, "stable", True) else "at rate 1/n (double root)"
    if isinstance(verdict, AttractingFixedPoint):
        tail = ""
        if verdict.excluded_preimages:
            tail = f"; except from {', '.join(_fmt(x) for x in verdict.excluded_preimages)}"
        return f"solutions converge {rate} to {_fmt(verdict.rho)}{tail}"
    if isinstance(verdict, AttractingCycle):
        pts = ", ".join(_fmt(x) for x in verdict.points)
        return f"solutions converge {rate} to the {len(verdict.points)}-cycle ({pts})"
    if isinstance(verdict, Oscillating):
        parts = []
        for i, lim in enumerate(verdict.limits):
            if lim is not None:
                parts.append(f"x_(nk+{i}) -> {_fmt(lim)}")
            elif verdict.divergent:
                parts.append(f"x_(nk+{i}) diverges")
            else:
                parts.append(f"x_(nk+{i}) is constant")
        return "branches behave differently: " + "; ".join(parts)
    if isinstance(verdict, SumLimit):
        return f"sum of c_n is {_fmt(verdict.total)}: x_n -> x_0 / (x_0 * {_fmt(verdict.total)} + 1)"
    if isinstance(verdict, NotCoveredByPaper):
        return f"no closed-form verdict: {verdict.reason}"
    return repr(verdict)


def _verify(spec: SystemSpec, verdict, depth: int, trials: int, seed: int, bins: int):
    if spec.model is not None:
        return verify_sum_model(spec.model, verdict, trials, seed, depth)
    forb = forbidden_b0(spec.system, depth) if spec.special == "b0" else forbidden_set(spec.system, depth)
    return verify_system(spec.system, verdict, forb, trials, seed, bins)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _report_failures(report) -> None:
    for check in report.failures():
        ce = json.dumps(check.counterexample)
        print(f"FAIL {check.name}: {check.detail}; counterexample {ce}", file=sys.stderr)


# -- subcommands ------------------------------------------------------------------


def cmd_analyze(args) -> int:
    spec = load_spec(args.spec, args.mode)
    verdict = _verdict(spec)
    report = {"spec": spec.raw}
    if spec.system is not None:
        report["characteristic"] = characteristic(reduce(spec.system)[0]).to_json()
    else:
        report["characteristic"] = None
    report["verdict"] = verdict.to_json()
    report["forbidden"] = _forbidden(spec, args.depth)
    if spec.special == "b0":
        report["b0"] = _b0_data(spec.system)
    code = EXIT_NOT_COVERED if isinstance(verdict, NotCoveredByPaper) else EXIT_OK
    if args.verify:
        ver = _verify(spec, verdict, args.depth, args.trials, args.seed, args.bins)
        report["verification"] = ver.to_json()
        if not ver.passed:
            _report_failures(ver)
            code = EXIT_VERIFY_FAILED
    _emit(report)
    if args.pretty:
        print(describe(verdict), file=sys.stderr)
    return code


def cmd_forbidden(args) -> int:
    spec = load_spec(args.spec, args.mode)
    _emit(_forbidden(spec, args.depth))
    return EXIT_OK


def cmd_orbit(args) -> int:
    spec = load_spec(args.spec, args.mode)
    try:
        x0 = parse_scalar(args.x0, spec.mode)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad x0: {exc}") from None
    if args.steps < 0:
        raise SpecError("--steps must be >= 0")
    if spec.model is not None:
        trace = iterate_maps(spec.model.matrix, x0, args.steps)
    else:
        trace = iterate(spec.system, x0, args.steps)
    trace = with_detection(trace)
    last = trace.finite()[-1]
    summary = {
        "x0": format_scalar(x0),
        "steps": args.steps,
        "pole_at": trace.pole_at,
        "degraded_at": trace.degraded_at,
        "last": format_scalar(last),
        "detected_period": trace.detected_period,
        "limit": trace.limit_estimate,
    }
    if spec.system is not None:
        summary["residue_limits"] = residue_limits(trace, spec.system.k)
    if args.bins and trace.pole_at is None and len(trace) >= 100 * args.bins:
        occ, chi2 = equidistribution_stat(trace, args.bins)
        summary["equidistribution"] = {"bins": args.bins, "occupancy": occ, "chi2": chi2}
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            trace_to_csv(trace, fh)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(trace_to_json(trace), fh, indent=2)
            fh.write("\n")
    _emit(summary)
    return EXIT_OK


def cmd_verify(args) -> int:
    """Check the computed verdict, or the "claim" carried by the input file."""
    spec = load_spec(args.spec, args.mode)
    if "claim" in spec.raw:
        if spec.model is not None:
            raise SpecError("claims are not supported for sum-model specs")
        try:
            verdict = verdict_from_json(spec.raw["claim"], spec.mode)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad claim: {exc}") from None
    else:
        verdict = _verdict(spec)
    ver = _verify(spec, verdict, args.depth, args.trials, args.seed, args.bins)
    _emit({"verdict": verdict.to_json(), "verification": ver.to_json()})
    if not ver.passed:
        _report_failures(ver)
        return EXIT_VERIFY_FAILED
    return EXIT_NOT_COVERED if isinstance(verdict, NotCoveredByPaper) else EXIT_OK


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="path to a JSON system spec, or - for stdin")
    common.add_argument("--mode", choices=("exact", "float"), help="override the arithmetic mode set in the input file")
    common.add_argument("--depth", type=_positive, default=DEFAULT_DEPTH, help="forbidden-set depth per family")
    common.add_argument("--bins", type=_positive, default=64, help="arcs for the equidistribution check")

    parser = argparse.ArgumentParser(prog="riccati", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="classify and describe the forbidden set")
    p.add_argument("--pretty", action="store_true", help="plain-language summary on stderr")
    p.add_argument("--verify", action="store_true", help="append a verification summary")
    p.add_argument("--trials", type=_positive, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("forbidden", parents=[common], help="enumerate forbidden initial values")
    p.set_defaults(func=cmd_forbidden)

    p = sub.add_parser("orbit", parents=[common], help="iterate from one initial value")
    p.add_argument("--x0", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--csv", metavar="PATH", help="write the trace as CSV")
    p.add_argument("--json", metavar="PATH", help="write the trace as JSON")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", parents=[common], help="cross-check every claim by iteration")
    p.add_argument("--trials", type=_positive, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    # argparse takes "-1/2" for a flag; bind it to the option before it
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--x0", "--steps"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
