import pytest

from sharpmpec import analyze_point, bundled_path, parse_certificate, parse_problem
from sharpmpec.problem import ProblemData

import acceptance_log


class Loaded:
    def __init__(self, name):
        self.path = bundled_path(name)
        self.data, self.embedded = parse_problem(self.path)
        self.geom = analyze_point(self.data)


@pytest.fixture(scope="session")
def ex1():
    return Loaded("example1.json")


@pytest.fixture(scope="session")
def ex2():
    return Loaded("example2.json")


@pytest.fixture(scope="session")
def ex1_cert():
    return parse_certificate(bundled_path("example1_cert.json"))


def zero_problem(n=1, m=2, q=2, p=1) -> ProblemData:
    """Every derivative vanishes and every constraint is active."""
    return ProblemData(
        n, m, p, q,
        grad_F=(0,) * (n + m),
        phi=(0,) * m,
        jac_phi=((0,) * (n + m),) * m,
        g=(0,) * q,
        jac_g=((0,) * m,) * q,
        hess_g=(((0,) * m,) * m,) * q,
        G_val=(0,) * p,
        jac_G=((0,) * (n + m),) * p,
        assumption1=True, lower_mscq=True, upper_mscq=True,
    )


@pytest.fixture
def zero():
    data = zero_problem()
    return data, analyze_point(data)


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_log.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
