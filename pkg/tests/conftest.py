import pytest

from schottky_zhu.forms import QuasiformEvaluator
from schottky_zhu.schottky import SchottkyParams, generator_from_canonical, make_generator

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def reference_params(rho=0.02) -> SchottkyParams:
    """Genus two: w_{+-1} = -+2, w_{+-2} = -+2i, equal rho."""
    return SchottkyParams((generator_from_canonical(2, -2, rho),
                           generator_from_canonical(2j, -2j, rho)))


def torus_params(q=0.01, W_minus=1.0, W_plus=-1.0) -> SchottkyParams:
    return SchottkyParams((make_generator(W_minus, W_plus, q),))


@pytest.fixture(scope="session")
def g2_params():
    return reference_params()


@pytest.fixture(scope="session")
def g2_ev(g2_params):
    return QuasiformEvaluator(g2_params, 24)


@pytest.fixture(scope="session")
def g1_params():
    return torus_params()


@pytest.fixture(scope="session")
def g1_ev(g1_params):
    return QuasiformEvaluator(g1_params, 24)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
