import numpy as np
import pytest

from akx.algebra import grassmann, matrix, quaternion, weighted_seq

ACCEPTANCE = {}


def record(key, label, measured, tolerance, ok, seconds=None):
    ACCEPTANCE[key] = (label, measured, tolerance, ok, seconds)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        label, measured, tol, ok, sec = ACCEPTANCE[key]
        t = f" in {sec:.2f}s" if sec is not None else ""
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {key:>2} {label}: measured {measured} vs tolerance {tol}{t}"
        )


ALGEBRAS = {
    "matrix2": matrix(2),
    "matrix3": matrix(3),
    "quaternion": quaternion(),
    "grassmann3": grassmann(3),
    "grassmann5": grassmann(5),
    "seq8": weighted_seq(8, 2.0),
}


@pytest.fixture(params=sorted(ALGEBRAS))
def desc(request):
    return ALGEBRAS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
