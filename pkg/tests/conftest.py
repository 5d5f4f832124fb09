import numpy as np
import pytest

from halfinv.grid import GridFunction
from halfinv.pipeline import cosine_potential, synthesize_mixed_data

PI = np.pi

# Independent oracle values for q = cos x on (0, 2pi), h = 0.5, H = -0.3:
# scipy DOP853 (rtol 1e-13) on the analytic potential, roots by brentq.
COS_LAMBDAS = [-0.3794214114056329, 0.563312418389865, 1.2893485754493759, 2.407856829477894,
               4.104337870923627, 6.338039129130473]
COS_MU2 = [0.4786329532886001, 2.08404428291998, 6.061381874024478]
COS_NU2 = [-0.38895235833337627, 1.0459392510418999, 3.8114004989615413, 8.81114478380005]
COS_DELTA = {1.0: 0.9125497486866084, 2.5: 0.2640252662873407}


@pytest.fixture(scope="session")
def cos_q():
    return cosine_potential()


@pytest.fixture(scope="session")
def zero_q():
    return GridFunction.constant(0.0, 0.0, 2 * PI)


@pytest.fixture(scope="session")
def cos_mixed_32(cos_q):
    return synthesize_mixed_data(cos_q, 0.5, -0.3, 32)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
