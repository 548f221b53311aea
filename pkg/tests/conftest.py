import numpy as np
import pytest

from ppife.benchmarks import BenchmarkProblem, make_problem
from ppife.geometry import LevelSet
from ppife.mesh import build_uniform_mesh

_ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mesh8():
    return build_uniform_mesh(8)


@pytest.fixture(scope="session")
def mesh16():
    return build_uniform_mesh(16)


def polynomial_problem(levelset=None, beta=(1.0, 1.0)):
    """u = t (x + y) + x^2 + y^2 with f = du/dt - beta lap u on each side.

    Every integrand the scheme builds from this data is a polynomial of degree
    at most two, so all quadratures are exact.
    """
    levelset = levelset or make_problem("line").levelset
    b = {-1: beta[0], 1: beta[1]}

    def u(side, x, y, t):
        return t * (x + y) + x**2 + y**2

    def grad_u(side, x, y, t):
        return 2 * x + t + 0.0 * y, 2 * y + t + 0.0 * x

    def dt_u(side, x, y, t):
        return x + y

    def f(side, x, y, t):
        return x + y - 4.0 * b[side]

    return BenchmarkProblem("poly", levelset, tuple(beta), u, grad_u, dt_u, f, lambda t, n: np.zeros((n, 2)))


def zero_problem(levelset, beta=(1.0, 10.0)):
    def zero(side, x, y, t):
        return 0.0 * (np.asarray(x) + np.asarray(y) + t)

    def zero_grad(side, x, y, t):
        z = zero(side, x, y, t)
        return z, z

    return BenchmarkProblem("zero", levelset, tuple(beta), zero, zero_grad, zero, zero, lambda t, n: np.zeros((n, 2)))


def linear_levelset(c=0.3, a=1.0, b=0.0):
    return LevelSet(
        phi=lambda x, y, t: a * x + b * y - c + 0.0 * t,
        grad_phi=lambda x, y, t: (a + 0.0 * x, b + 0.0 * y),
    )


_CONVERGENCE = {}


@pytest.fixture(scope="session")
def convergence():
    """Cached convergence studies on N = 8, 16, 32 keyed by problem name."""
    from ppife.analysis import convergence_study

    def get(name):
        if name not in _CONVERGENCE:
            _CONVERGENCE[name] = convergence_study(name, [8, 16, 32], t_final=1.0)
        return _CONVERGENCE[name]

    return get
