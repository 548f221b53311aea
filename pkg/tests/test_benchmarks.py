import math

import numpy as np
import pytest

from ppife.benchmarks import PROBLEMS, make_problem, source_residual, verify_jump_conditions
from ppife.geometry import MINUS, PLUS


def test_unknown_problem():
    with pytest.raises(ValueError):
        make_problem("square")


@pytest.mark.parametrize("t", [0.0, 0.37, 1.0])
def test_line_and_circle_jumps(t):
    for name in ("line", "circle"):
        ju, jf = verify_jump_conditions(make_problem(name), t)
        assert ju <= 1e-12 and jf <= 1e-10


def test_ellipse_random_times():
    prob = make_problem("ellipse")
    for t in np.random.default_rng(0).uniform(0, 1, 100):
        ju, jf = verify_jump_conditions(prob, float(t), 200)
        assert ju <= 1e-12 and jf <= 1e-10


@pytest.mark.parametrize("name", PROBLEMS)
def test_interface_points_on_zero_level(name):
    prob = make_problem(name)
    p = prob.interface_points(0.3, 500)
    assert np.abs(prob.levelset.phi(p[:, 0], p[:, 1], 0.3)).max() < 1e-12


@pytest.mark.parametrize("name", PROBLEMS)
def test_source_against_finite_differences(name):
    prob = make_problem(name)
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-1, 1, (2, 300))
    t = rng.uniform(0, 1, 300)
    for s in (MINUS, PLUS):
        assert np.abs(source_residual(prob, s, x, y, t)).max() <= 1e-6


def test_line_formula():
    prob = make_problem("line")
    x, y, t = 0.1, -0.4, 0.2
    s = x - (math.pi / 5 + t)
    assert prob.u(MINUS, x, y, t) == pytest.approx(math.sin(s))
    assert prob.u(PLUS, x, y, t) == pytest.approx(math.sin(s) / 10)
    assert prob.f(PLUS, x, y, t) == pytest.approx(-math.cos(s) / 10 + math.sin(s))


def test_circle_center_path():
    prob = make_problem("circle")
    t = 0.25
    c = 0.3 * np.array([math.cos(math.pi * t), math.sin(math.pi * t)])
    assert prob.levelset.phi(c[0], c[1], t) < 0
    r = math.pi / 6
    assert abs(prob.levelset.phi(c[0] + r, c[1], t)) < 1e-12
    assert prob.levelset.K == pytest.approx(0.3 * math.pi)


def test_exact_picks_side():
    prob = make_problem("circle")
    assert prob.exact(0.95, 0.95, 0.0) == pytest.approx(prob.u(PLUS, 0.95, 0.95, 0.0))
    assert prob.exact(0.3, 0.0, 0.0) == pytest.approx(prob.u(MINUS, 0.3, 0.0, 0.0))
