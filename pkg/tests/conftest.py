import pytest

from qmetastable import BathParams, PotentialParams, build_dvr, solve_spectrum
from qmetastable.spectrum import GridConfig

CONFIG1 = PotentialParams(1.4, 0.27)
CONFIG2 = PotentialParams(2.5, 0.35)

ACCEPTANCE = {}


def record(number, title, passed, detail=""):
    ACCEPTANCE[number] = (title, bool(passed), detail)


@pytest.fixture(scope="session")
def sol1():
    return solve_spectrum(CONFIG1, n_levels=6)


@pytest.fixture(scope="session")
def dvr1(sol1):
    return build_dvr(sol1, params=CONFIG1)


@pytest.fixture(scope="session")
def sol2():
    return solve_spectrum(CONFIG2, n_levels=8)


@pytest.fixture(scope="session")
def dvr2(sol2):
    return build_dvr(sol2, params=CONFIG2)


@pytest.fixture
def bath_mid():
    return BathParams(1.0, 0.352)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")
