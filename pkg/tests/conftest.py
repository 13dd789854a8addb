import pytest

from evanescent.scales import CONSTANTS, ScaleParams

EV = CONSTANTS.electron_volt
REF_MASS = 1e-27

# 40-digit mpmath evaluations with the CODATA-2018 constants
KAPPA_REF = 1.6974384437332614e11
ELL_REF = 5.891229833352012e-12
DM_REF = 1.782661921627898e-36
EXCESS_REF = 4.456654803076656e-10
POLE_SHIFT_REF = 1.782661921627898e-09


@pytest.fixture
def ref_params():
    return ScaleParams.from_ev(REF_MASS, 1.0)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, title, passed, detail=""):
    line = f"criterion {number} {title}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
