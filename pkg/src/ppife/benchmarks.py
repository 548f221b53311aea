"""Moving-interface benchmark problems with closed-form solutions and sources.

Every per-side function has the signature ``fn(side, x, y, t)`` with ``side``
in {-1, +1} and numpy-broadcastable coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import MINUS, PLUS, LevelSet

PI = np.pi
BETA = (1.0, 10.0)
PROBLEMS = ("line", "circle", "ellipse")


@dataclass(frozen=True)
class BenchmarkProblem:
    name: str
    levelset: LevelSet
    beta: tuple
    u: Callable
    grad_u: Callable
    dt_u: Callable
    f: Callable
    interface_points: Callable  # (t, n) -> (n, 2) points on {phi = 0}

    def u0(self, side, x, y):
        return self.u(side, x, y, 0.0)

    def beta_of(self, side) -> float:
        return self.beta[0] if side < 0 else self.beta[1]

    def exact(self, x, y, t):
        """Exact solution using the physical side of every point."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        plus = self.levelset.phi(x, y, t) >= 0.0
        return np.where(plus, self.u(PLUS, x, y, t), self.u(MINUS, x, y, t))


def _line(beta):
    b = dict(zip((MINUS, PLUS), beta))

    def shift(x, t):
        return x - (PI / 5 + t)

    def u(side, x, y, t):
        return np.sin(shift(x, t)) / b[side] + 0.0 * y

    def grad_u(side, x, y, t):
        return np.cos(shift(x, t)) / b[side] + 0.0 * y, 0.0 * (x + y)

    def dt_u(side, x, y, t):
        return -np.cos(shift(x, t)) / b[side] + 0.0 * y

    def f(side, x, y, t):
        s = shift(x, t)
        return -np.cos(s) / b[side] + np.sin(s) + 0.0 * y

    def points(t, n):
        y = np.linspace(-1.0, 1.0, n + 2)[1:-1]
        return np.column_stack([np.full(n, PI / 5 + t), y])

    ls = LevelSet(
        phi=lambda x, y, t: shift(x, t) + 0.0 * y,
        grad_phi=lambda x, y, t: (np.ones_like(np.asarray(x + y, float)), np.zeros_like(np.asarray(x + y, float))),
        K=1.0,
    )
    return BenchmarkProblem("line", ls, tuple(beta), u, grad_u, dt_u, f, points)


def _circle(beta):
    b = dict(zip((MINUS, PLUS), beta))
    r0 = PI / 6
    jump_const = r0**4 * (1 / beta[0] - 1 / beta[1])

    def center(t):
        return 0.3 * np.cos(PI * t), 0.3 * np.sin(PI * t)

    def rho(x, y, t):
        cx, cy = center(t)
        return (x - cx) ** 2 + (y - cy) ** 2

    def u(side, x, y, t):
        val = rho(x, y, t) ** 2.5 / r0 / b[side]
        return val + (jump_const if side == PLUS else 0.0)

    def grad_u(side, x, y, t):
        cx, cy = center(t)
        c = 5.0 * rho(x, y, t) ** 1.5 / (r0 * b[side])
        return c * (x - cx), c * (y - cy)

    def dt_u(side, x, y, t):
        cx, cy = center(t)
        dcx, dcy = -0.3 * PI * np.sin(PI * t), 0.3 * PI * np.cos(PI * t)
        drho = -2.0 * (x - cx) * dcx - 2.0 * (y - cy) * dcy
        return 2.5 * rho(x, y, t) ** 1.5 * drho / (r0 * b[side])

    def f(side, x, y, t):
        # laplacian of rho^(5/2) is 25 rho^(3/2)
        return dt_u(side, x, y, t) - 25.0 * rho(x, y, t) ** 1.5 / r0

    def points(t, n):
        th = 2 * PI * np.arange(n) / n
        cx, cy = center(t)
        return np.column_stack([cx + r0 * np.cos(th), cy + r0 * np.sin(th)])

    def grad_phi(x, y, t):
        cx, cy = center(t)
        return 2.0 * (x - cx), 2.0 * (y - cy)

    ls = LevelSet(phi=lambda x, y, t: rho(x, y, t) - r0**2, grad_phi=grad_phi, K=0.3 * PI)
    return BenchmarkProblem("circle", ls, tuple(beta), u, grad_u, dt_u, f, points)


def _ellipse(beta):
    b = dict(zip((MINUS, PLUS), beta))
    a2, b2 = (PI / 4) ** 2, (PI / 7) ** 2
    c0 = a2 * b2
    lap_q = 2.0 / a2 + 2.0 / b2

    def rotated(x, y, t):
        c, s = np.cos(PI * t), np.sin(PI * t)
        return c * x + s * y, -s * x + c * y

    def q(x, y, t):
        X, Y = rotated(x, y, t)
        return X**2 / a2 + Y**2 / b2

    def grad_q(x, y, t):
        c, s = np.cos(PI * t), np.sin(PI * t)
        X, Y = rotated(x, y, t)
        gX, gY = 2 * X / a2, 2 * Y / b2
        return gX * c - gY * s, gX * s + gY * c

    def u(side, x, y, t):
        val = q(x, y, t) ** 2.5 / b[side]
        if side == PLUS:
            val = val + (1 / beta[0] - 1 / beta[1])
        return c0 * val

    def grad_u(side, x, y, t):
        gx, gy = grad_q(x, y, t)
        k = c0 * 2.5 * q(x, y, t) ** 1.5 / b[side]
        return k * gx, k * gy

    def dt_q(x, y, t):
        X, Y = rotated(x, y, t)
        return 2.0 * PI * X * Y * (1.0 / a2 - 1.0 / b2)

    def dt_u(side, x, y, t):
        return c0 * 2.5 * q(x, y, t) ** 1.5 * dt_q(x, y, t) / b[side]

    def f(side, x, y, t):
        qq = q(x, y, t)
        gx, gy = grad_q(x, y, t)
        lap = 2.5 * (1.5 * qq**0.5 * (gx**2 + gy**2) + qq**1.5 * lap_q)
        return dt_u(side, x, y, t) - c0 * lap

    def points(t, n):
        th = 2 * PI * np.arange(n) / n
        X, Y = (PI / 4) * np.cos(th), (PI / 7) * np.sin(th)
        c, s = np.cos(PI * t), np.sin(PI * t)
        return np.column_stack([c * X - s * Y, s * X + c * Y])

    def phi(x, y, t):
        X, Y = rotated(x, y, t)
        return 16.0 * X**2 + 49.0 * Y**2 - PI**2

    def grad_phi(x, y, t):
        gx, gy = grad_q(x, y, t)
        return PI**2 * gx, PI**2 * gy

    # rigid rotation: V.n = omega * (x, y) x n along the curve
    th = np.linspace(0.0, 2 * PI, 4001)
    X, Y = (PI / 4) * np.cos(th), (PI / 7) * np.sin(th)
    nx, ny = X / a2, Y / b2
    K = float(np.max(np.abs(PI * (X * ny - Y * nx) / np.hypot(nx, ny))))

    ls = LevelSet(phi=phi, grad_phi=grad_phi, K=K)
    return BenchmarkProblem("ellipse", ls, tuple(beta), u, grad_u, dt_u, f, points)


_BUILDERS = {"line": _line, "circle": _circle, "ellipse": _ellipse}


def make_problem(name: str, beta=BETA) -> BenchmarkProblem:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
    return builder(tuple(float(v) for v in beta))


def verify_jump_conditions(problem: BenchmarkProblem, t: float, n: int = 1000):
    """Max ``|[u]|`` and ``|[beta grad u . n]|`` over ``n`` interface points."""
    p = problem.interface_points(t, n)
    x, y = p[:, 0], p[:, 1]
    gx, gy = problem.levelset.grad_phi(x, y, t)
    norm = np.hypot(gx, gy)
    nx, ny = gx / norm, gy / norm
    jump_u = problem.u(MINUS, x, y, t) - problem.u(PLUS, x, y, t)
    fm = problem.grad_u(MINUS, x, y, t)
    fp = problem.grad_u(PLUS, x, y, t)
    flux = problem.beta[0] * (fm[0] * nx + fm[1] * ny) - problem.beta[1] * (fp[0] * nx + fp[1] * ny)
    return float(np.max(np.abs(jump_u))), float(np.max(np.abs(flux)))


def source_residual(problem: BenchmarkProblem, side, x, y, t, step: float = 1e-3):
    """``f - (du/dt - beta * laplacian u)`` with fourth-order centered differences."""

    def d2(g, z):
        return (-g(z + 2 * step) + 16 * g(z + step) - 30 * g(z) + 16 * g(z - step) - g(z - 2 * step)) / (
            12 * step**2
        )

    def d1(g, z):
        return (-g(z + 2 * step) + 8 * g(z + step) - 8 * g(z - step) + g(z - 2 * step)) / (12 * step)

    u = problem.u
    dt = d1(lambda s: u(side, x, y, s), t)
    lap = d2(lambda s: u(side, s, y, t), x) + d2(lambda s: u(side, x, s, t), y)
    return problem.f(side, x, y, t) - (dt - problem.beta_of(side) * lap)
