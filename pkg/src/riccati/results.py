"""Value types returned by the analyzer: roots, forbidden sets, verdicts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .mobius import Matrix2
from .numeric import format_scalar, parse_scalar


# -- characteristic roots ------------------------------------------------------


@dataclass(frozen=True)
class RealDistinct:
    lam: object  # dominant root, |lam| > |mu|
    mu: object

    def to_json(self):
        return {"case": "real_distinct", "lambda": format_scalar(self.lam), "mu": format_scalar(self.mu)}


@dataclass(frozen=True)
class RealDouble:
    lam: object

    def to_json(self):
        return {"case": "real_double", "lambda": format_scalar(self.lam)}


@dataclass(frozen=True)
class ComplexPair:
    r2: object  # modulus squared, equal to D
    cos2: object  # cos^2 of the argument, T^2 / (4 D)

    def to_json(self):
        return {"case": "complex_pair", "r2": format_scalar(self.r2), "cos2_theta": format_scalar(self.cos2)}


@dataclass(frozen=True)
class CharacteristicData:
    trace: object
    det: object
    delta: object
    roots: object

    def to_json(self):
        return {
            "T": format_scalar(self.trace),
            "D": format_scalar(self.det),
            "delta": format_scalar(self.delta),
            "roots": self.roots.to_json(),
        }


# -- forbidden sets ----------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenPoint:
    point: object
    hit_index: int  # the first step whose iterate is undefined

    def to_json(self):
        return {"point": format_scalar(self.point), "hit_index": self.hit_index}


@dataclass(frozen=True)
class ForbiddenFamily:
    branch: int
    transform: Matrix2  # pulls the branch's autonomous forbidden set back to x_0
    kind: str
    points: tuple = ()

    @property
    def enumerated(self) -> list:
        return [p.point for p in self.points]

    def to_json(self):
        return {
            "branch": self.branch,
            "transform": self.transform.to_json(),
            "kind": self.kind,
            "points": [p.to_json() for p in self.points],
        }


@dataclass(frozen=True)
class ForbiddenSetDescription:
    prefix: tuple = ()
    families: tuple = ()
    horizon: int = 0  # every forbidden point with hit_index <= horizon is listed

    def all_points(self) -> list[ForbiddenPoint]:
        pts = list(self.prefix)
        for fam in self.families:
            pts.extend(fam.points)
        return sorted(pts, key=lambda p: p.hit_index)

    def points(self) -> list:
        return [p.point for p in self.all_points()]

    def hit_index(self, x) -> Optional[int]:
        for p in self.all_points():
            if p.point == x:
                return p.hit_index
        return None

    def __contains__(self, x) -> bool:
        return self.hit_index(x) is not None

    def __len__(self) -> int:
        return len(self.all_points())

    def to_json(self):
        return {
            "horizon": self.horizon,
            "prefix": [p.to_json() for p in self.prefix],
            "families": [f.to_json() for f in self.families],
            "points": [p.to_json() for p in self.all_points()],
        }


def dedupe(prefix, families, horizon) -> ForbiddenSetDescription:
    """Keep each point once, at its smallest hit index."""
    best: dict = {}
    for p in prefix:
        best[p.point] = min(best.get(p.point, p.hit_index), p.hit_index)
    for fam in families:
        for p in fam.points:
            best[p.point] = min(best.get(p.point, p.hit_index), p.hit_index)
    seen = set()

    def keep(p):
        if p.point in seen or best[p.point] != p.hit_index:
            return False
        seen.add(p.point)
        return True

    new_prefix = tuple(p for p in sorted(prefix, key=lambda p: p.hit_index) if keep(p))
    new_families = []
    for fam in families:
        pts = tuple(p for p in fam.points if keep(p))
        new_families.append(ForbiddenFamily(fam.branch, fam.transform, fam.kind, pts))
    return ForbiddenSetDescription(new_prefix, tuple(new_families), horizon)


# -- verdicts ------------------------------------------------------------------


def _pts(xs):
    return [format_scalar(x) for x in xs]


@dataclass(frozen=True)
class PeriodicAll:
    """Every solution is periodic with the given period (trace zero)."""

    period: int
    kind = "PeriodicAll"

    def to_json(self):
        return {"kind": self.kind, "period": self.period}


@dataclass(frozen=True)
class AttractingFixedPoint:
    rho: object
    excluded_preimages: tuple = ()
    stable: bool = True
    kind = "AttractingFixedPoint"

    def to_json(self):
        return {
            "kind": self.kind,
            "rho": format_scalar(self.rho),
            "excluded_preimages": _pts(self.excluded_preimages),
            "stable": self.stable,
        }


@dataclass(frozen=True)
class AttractingCycle:
    points: tuple
    excluded_preimages: tuple = ()
    stable: bool = True
    kind = "AttractingCycle"

    def to_json(self):
        return {
            "kind": self.kind,
            "points": _pts(self.points),
            "excluded_preimages": _pts(self.excluded_preimages),
            "stable": self.stable,
        }


@dataclass(frozen=True)
class PeriodicAllRotation:
    period: int
    q: int
    kind = "PeriodicAllRotation"

    def to_json(self):
        return {"kind": self.kind, "period": self.period, "q": self.q}


@dataclass(frozen=True)
class DenseOrbits:
    kind = "DenseOrbits"

    def to_json(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Oscillating:
    """Branches with a zero (2,1) entry diverge or freeze; the rest converge.

    ``limits[i]`` is the limit of x_{nk+i}, or None on a branch with no
    common limit.  ``divergent`` tells whether those branches grow without
    bound (True) or stay at x_i (False).
    """

    limits: tuple
    divergent: bool
    kind = "Oscillating"

    def to_json(self):
        return {
            "kind": self.kind,
            "limits": [None if x is None else format_scalar(x) for x in self.limits],
            "divergent": self.divergent,
        }


@dataclass(frozen=True)
class NotCoveredByPaper:
    reason: str
    branch: Optional[int] = None
    kind = "NotCoveredByPaper"

    def to_json(self):
        return {"kind": self.kind, "reason": self.reason, "branch": self.branch}


_VERDICTS = {
    cls.kind: cls
    for cls in (
        PeriodicAll,
        AttractingFixedPoint,
        AttractingCycle,
        PeriodicAllRotation,
        DenseOrbits,
        Oscillating,
        NotCoveredByPaper,
    )
}


def verdict_from_json(data: dict, mode: str = "exact"):
    """Inverse of the verdicts' ``to_json``."""
    try:
        cls = _VERDICTS[data["kind"]]
    except (KeyError, TypeError):
        raise ValueError(f"unknown verdict {data!r}") from None

    def pts(xs):
        return tuple(parse_scalar(x, mode) for x in xs)

    if cls is PeriodicAll:
        return cls(int(data["period"]))
    if cls is PeriodicAllRotation:
        return cls(int(data["period"]), int(data["q"]))
    if cls is DenseOrbits:
        return cls()
    if cls is AttractingFixedPoint:
        return cls(
            parse_scalar(data["rho"], mode),
            pts(data.get("excluded_preimages", ())),
            bool(data.get("stable", True)),
        )
    if cls is AttractingCycle:
        return cls(pts(data["points"]), pts(data.get("excluded_preimages", ())), bool(data.get("stable", True)))
    if cls is Oscillating:
        limits = tuple(None if x is None else parse_scalar(x, mode) for x in data["limits"])
        return cls(limits, bool(data["divergent"]))
    return cls(str(data.get("reason", "")), data.get("branch"))
