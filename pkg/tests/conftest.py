import numpy as np
import pytest

from divclust import Instance


def line_instance(xs, labels, l=None):
    return Instance(colors=_ids(labels), points=[[x] for x in xs], l=l, color_names=tuple(dict.fromkeys(labels)))


def _ids(labels):
    order = {lab: i for i, lab in enumerate(dict.fromkeys(labels))}
    return np.array([order[lab] for lab in labels])


@pytest.fixture
def fix1():
    """Four points on a line, alternating colors a, b."""
    return line_instance([0, 1, 2, 3], "abab", l=2)


@pytest.fixture
def fix2():
    """Two triples far apart: x=0(a),1(b),2(a) and 10(b),11(a),12(b)."""
    return line_instance([0, 1, 2, 10, 11, 12], "ababab", l=2)


@pytest.fixture
def fix4():
    """Two tight rainbow triples plus three surplus a-points."""
    xs = [0, 0.1, 0.2, 0.3, 10, 10.1, 10.2, 10.3, 10.4]
    return line_instance(xs, "abcaabcaa", l=3)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    monkeypatch.setenv("DIVCLUST_NUMBA", "1" if request.param == "numba" else "0")
    return request.param


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion; printed at session end."""

    def _report(criterion: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
