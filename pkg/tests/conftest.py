import numpy as np
import pytest

from cayleygraph import catalog

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sample_points(entry_id, rng, count, box=1.0, avoid=0.15, params=None):
    """Uniform points in [-box, box]^4 kept away from every declared locus."""
    entry = catalog.get_entry(entry_id)
    params = params or {}
    out = []
    while len(out) < count:
        p = rng.uniform(-box, box, 4)
        if entry.near_locus(p, params, radius=avoid):
            continue
        out.append(p)
    return out


CAYLEY_EXAMPLES = ("cayley-sin-sinh", "j-plus-quadratic-1", "j-plus-quadratic-2", "hopf-cone")
