import numpy as np
import pytest

from lumenlens import paper_defaults


@pytest.fixture(scope="session")
def cfg():
    return paper_defaults()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rot_y_oracle(a):
    # written out independently of the package
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]])


def rot_z_oracle(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]])


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE = {}


def record(n: int, ok: bool, detail: str):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
