"""Property suites behind the ``verify`` command."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product

import numpy as np

from .basis import local_basis
from .benchmarks import PROBLEMS, make_problem, source_residual, verify_jump_conditions
from .geometry import MINUS, PLUS, classify, make_cut
from .mesh import build_uniform_mesh
from .quadrature import polygon_rule, signed_area, triangle_rule, union_cut_rule


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}, {self.seconds:.2f}s)"


def random_cut(rng, min_param=1e-3, vertices=None):
    """A random two-edge cut of ``vertices`` (a random shape-regular triangle if omitted)."""
    while vertices is None:
        verts = rng.uniform(-1.0, 1.0, (3, 2))
        area = signed_area(verts)
        if area < 0:
            verts = verts[::-1].copy()
            area = -area
        edges = verts - verts[[2, 0, 1]]
        if area > 0.1 * (edges**2).sum(axis=1).max():
            vertices = verts
    verts = np.asarray(vertices, dtype=float)
    lone = rng.integers(3)
    signs = np.full(3, rng.choice([MINUS, PLUS]))
    signs[lone] = -signs[lone]
    points = {}
    for k in ((lone - 1) % 3, lone):
        s = rng.uniform(min_param, 1.0 - min_param)
        points[int(k)] = verts[k] + s * (verts[(k + 1) % 3] - verts[k])
    return make_cut(verts, signs, points)


def basis_residuals(basis):
    """Kronecker, partition-of-unity, continuity and relative flux residuals of one basis."""
    cut = basis.cut
    probe = np.vstack([cut.vertices, cut.D, cut.E, cut.vertices.mean(axis=0)])
    vm = basis.values(probe, MINUS)
    vp = basis.values(probe, PLUS)
    at_vertices = np.where((cut.vertex_signs == MINUS)[:, None], vm[:3], vp[:3])
    kron = float(np.abs(at_vertices - np.eye(3)).max())
    pou = float(max(np.abs(vm.sum(axis=1) - 1.0).max(), np.abs(vp.sum(axis=1) - 1.0).max()))
    cont = float(np.abs(vm[3:5] - vp[3:5]).max())
    fm = basis.beta_of(MINUS) * basis.grads(MINUS) @ cut.normal
    fp = basis.beta_of(PLUS) * basis.grads(PLUS) @ cut.normal
    # roundoff scale of the flux is the full flux vector, not its normal part
    scale = max(
        basis.beta_of(MINUS) * np.linalg.norm(basis.grads(MINUS), axis=1).max(),
        basis.beta_of(PLUS) * np.linalg.norm(basis.grads(PLUS), axis=1).max(),
    )
    flux = float(np.abs(fm - fp).max() / scale)
    return kron, pou, cont, flux


def basis_sweep(n=10_000, seed=0, tol=1e-10):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = np.zeros(4)
    for _ in range(n):
        cut = random_cut(rng)
        beta = tuple(10.0 ** rng.uniform(-3, 3, 2))
        worst = np.maximum(worst, basis_residuals(local_basis(cut.vertices, cut, beta)))
    elapsed = time.perf_counter() - start
    names = ("kronecker", "partition of unity", "continuity at D/E", "flux jump (relative)")
    return [CheckResult(f"basis {nm} over {n} cuts", v <= tol, float(v), tol, elapsed) for nm, v in zip(names, worst)]


def monomial_moment(vertices, a: int, b: int) -> float:
    """Exact integral of ``x^a y^b`` over a triangle via barycentric moments."""
    v = np.asarray(vertices, dtype=float)
    area = abs(signed_area(v))
    terms = {(0, 0, 0): 1.0}
    for coord, power in ((0, a), (1, b)):
        for _ in range(power):
            nxt = {}
            for alpha, c in terms.items():
                for m in range(3):
                    beta = list(alpha)
                    beta[m] += 1
                    beta = tuple(beta)
                    nxt[beta] = nxt.get(beta, 0.0) + c * v[m, coord]
            terms = nxt
    total = 0.0
    for alpha, c in terms.items():
        total += c * math.factorial(alpha[0]) * math.factorial(alpha[1]) * math.factorial(alpha[2]) / math.factorial(
            sum(alpha) + 2
        )
    return 2.0 * area * total


def quadrature_exactness(n_triangles=20, seed=1, tol=1e-13):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n_triangles):
        verts = rng.uniform(-1.0, 1.0, (3, 2))
        if abs(signed_area(verts)) < 0.05:
            continue
        for degree in range(1, 6):
            rule = triangle_rule(verts, degree)
            for a, b in product(range(degree + 1), repeat=2):
                if a + b > degree:
                    continue
                exact = monomial_moment(verts, a, b)
                got = rule.integrate(rule.points[:, 0] ** a * rule.points[:, 1] ** b)
                worst = max(worst, abs(got - exact) / max(1.0, abs(exact)))
    return CheckResult("triangle rule monomial exactness", worst <= tol, worst, tol, time.perf_counter() - start)


def cut_area_partition(tol=1e-12):
    start = time.perf_counter()
    worst = 0.0
    for name, N in product(PROBLEMS, (8, 16)):
        problem = make_problem(name)
        mesh = build_uniform_mesh(N)
        for t in (0.0, 0.37):
            state = classify(mesh, problem.levelset, t)
            for e, cut in state.cuts.items():
                parts = abs(signed_area(cut.minus_polygon)) + abs(signed_area(cut.plus_polygon))
                worst = max(worst, abs(parts - mesh.areas[e]))
    return CheckResult("cut areas sum to element areas", worst <= tol, worst, tol, time.perf_counter() - start)


def union_rule_weights(n=2000, seed=2, tol=1e-12):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n):
        c1 = random_cut(rng)
        c2 = random_cut(rng, vertices=c1.vertices)
        total = sum(r.area for r, _, _ in union_cut_rule(c1.vertices, c1, c2, 2))
        worst = max(worst, abs(total - abs(signed_area(c1.vertices))))
    return CheckResult("union-cut rule total weight", worst <= tol, worst, tol, time.perf_counter() - start)


def jump_conditions(n_points=1000, n_times=10, tol=1e-10):
    start = time.perf_counter()
    worst = 0.0
    for name in PROBLEMS:
        problem = make_problem(name)
        for t in np.linspace(0.0, 1.0, n_times):
            worst = max(worst, *verify_jump_conditions(problem, float(t), n_points))
    return CheckResult("exact-solution jump residuals", worst <= tol, worst, tol, time.perf_counter() - start)


def source_terms(n=1000, seed=3, tol=1e-6):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for name in PROBLEMS:
        problem = make_problem(name)
        x, y = rng.uniform(-1.0, 1.0, (2, n))
        t = rng.uniform(0.0, 1.0, n)
        for side in (MINUS, PLUS):
            worst = max(worst, float(np.abs(source_residual(problem, side, x, y, t)).max()))
    return CheckResult("source terms vs finite differences", worst <= tol, worst, tol, time.perf_counter() - start)


def run_all(n_basis=10_000):
    results = basis_sweep(n_basis)
    results += [quadrature_exactness(), cut_area_partition(), union_rule_weights(), jump_conditions(), source_terms()]
    return results
