import numpy as np
import pytest

from qgscatter.composer import build_circuit
from qgscatter.graph import CATALOG, build_named
from qgscatter.rational import Polynomial, RationalFunction

COMPOSITES = ("S(Q,X)", "P(Q,X)", "P(P(Q,X),P(X,Q))", "S(P(Q,Q),P(X,X),P(Q,Q))")
ALL_GRAPHS = CATALOG + COMPOSITES


def rf(num_asc, den_asc):
    return RationalFunction(Polynomial(num_asc), Polynomial(den_asc))


# closed forms, ascending coefficients
CLOSED_FORMS = {
    "D": rf([0, 0, 8], [9, 0, 0, 0, -1]),
    "H": rf([0, 0, 0, 8], [9, 0, 0, 0, 0, 0, -1]),
    "Dtilde": rf([0, 0, 16, 16], [27, 9, 6, -6, -1, -3]),
    "Q": rf([0, 0, 0, 32, 32], (Polynomial([9, 0, 4, 0, 3]) * Polynomial([9, -3, 1, -3])).coeffs),
    "X": rf([0, 0, 0, 64], [81, 0, 9, 0, -17, 0, -9]),
}


@pytest.fixture(scope="session")
def graphs():
    return {name: build_circuit(name) for name in ALL_GRAPHS}


@pytest.fixture(params=CATALOG)
def catalog_graph(request):
    return build_named(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
