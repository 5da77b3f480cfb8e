import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from riccati.cli import load_spec
from riccati.system import PeriodicSystem

SPECS = Path(__file__).resolve().parent.parent / "specs"

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def spec_path(name: str) -> str:
    return str(SPECS / f"{name}.json")


def load_system(name: str) -> PeriodicSystem:
    return load_spec(spec_path(name)).system


@pytest.fixture
def spec_file(tmp_path):
    """Write a spec dict to a temporary file and return its path."""

    def write(data) -> str:
        p = tmp_path / "spec.json"
        p.write_text(json.dumps(data))
        return str(p)

    return write


# -- strategies ----------------------------------------------------------------------

small_ints = st.integers(min_value=-12, max_value=12)
rationals = st.builds(
    Fraction, st.integers(min_value=-50, max_value=50), st.integers(min_value=1, max_value=20)
)
nonzero_rationals = rationals.filter(lambda x: x != 0)


def matrices(entries=small_ints):
    from riccati.mobius import Matrix2

    return (
        st.tuples(entries, entries, entries, entries)
        .filter(lambda e: e[0] * e[3] - e[1] * e[2] != 0)
        .map(lambda e: Matrix2(*(Fraction(x) for x in e)))
    )


@st.composite
def systems(draw, max_k=4, entries=small_ints):
    k = draw(st.integers(min_value=1, max_value=max_k))
    rows = [draw(matrices(entries).filter(lambda m: m.c != 0)) for _ in range(k)]
    return PeriodicSystem.from_matrices(rows)


@st.composite
def b0_systems(draw, max_k=5):
    k = draw(st.integers(min_value=1, max_value=max_k))
    a = [draw(nonzero_rationals) for _ in range(k)]
    c = [draw(nonzero_rationals) for _ in range(k)]
    return PeriodicSystem(tuple(a), (Fraction(0),) * k, tuple(c), (Fraction(1),) * k)


# -- acceptance summary --------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "seen": False})
    if call.when == "call" or call.excinfo is not None:
        entry["seen"] = True
        if call.excinfo is not None:
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["ok"] and e["seen"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {n:2d}: {e['title']}")
