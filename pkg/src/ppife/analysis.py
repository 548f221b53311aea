"""Error norms, energy norm, convergence studies and condition-number traces."""

from __future__ import annotations

import csv
import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .assembly import default_sigma, edge_traces, regular_elements
from .benchmarks import make_problem
from .geometry import INTERFACE, MINUS, PLUS
from .mesh import interior_edges
from .quadrature import ERROR_DEGREE, cut_rule, edge_rule, reference_rule
from .stepper import TimeGrid, run


@dataclass
class ErrorReport:
    N: int
    h: float
    tau: float
    linf: float
    l2: float
    h1: float
    orders: dict = field(default_factory=dict)  # norm -> order vs previous N
    conds: list | None = None


def _exact_on_physical_side(fields, levelset, P, t):
    x, y = P[..., 0], P[..., 1]
    plus = levelset.phi(x, y, t) >= 0.0
    u = np.where(plus, fields.u(PLUS, x, y, t), fields.u(MINUS, x, y, t))
    gm = fields.grad_u(MINUS, x, y, t)
    gp = fields.grad_u(PLUS, x, y, t)
    gx = np.where(plus, gp[0], gm[0])
    gy = np.where(plus, gp[1], gm[1])
    return u, gx, gy


def solution_errors(mesh, state, bases, uh, fields, t, levelset=None, degree=ERROR_DEGREE, refine=1):
    """``(Linf, L2, H1-seminorm)`` errors of the nodal vector ``uh``.

    The exact solution is evaluated on the side given by the true level set.
    Cut elements are integrated on their sub-polygons, each fan triangle split
    ``4**refine`` times.
    """
    levelset = levelset or fields.levelset
    uh = np.asarray(uh, dtype=float)
    bary, w = reference_rule(degree)
    reg = regular_elements(state)
    conn = mesh.elements[reg]
    P = np.einsum("qi,eik->eqk", bary, mesh.nodes[conn])
    vh = np.einsum("qi,ei->eq", bary, uh[conn])
    gh = np.einsum("ei,eik->ek", uh[conn], mesh.grads[reg])
    u, gx, gy = _exact_on_physical_side(fields, levelset, P, t)
    wa = mesh.areas[reg, None] * w[None, :]
    l2sq = float((wa * (vh - u) ** 2).sum())
    h1sq = float((wa * ((gh[:, None, 0] - gx) ** 2 + (gh[:, None, 1] - gy) ** 2)).sum())
    linf = float(np.abs(vh - u).max()) if len(reg) else 0.0
    for e in state.interface_elements:
        e = int(e)
        basis = bases[e]
        c = uh[mesh.elements[e]]
        for s in (MINUS, PLUS):
            rule = cut_rule(basis.cut, s, degree, refine)
            if not len(rule.weights):
                continue
            vh = basis.values(rule.points, s) @ c
            g = basis.grads(s).T @ c
            u, gx, gy = _exact_on_physical_side(fields, levelset, rule.points, t)
            l2sq += float(rule.weights @ (vh - u) ** 2)
            h1sq += float(rule.weights @ ((g[0] - gx) ** 2 + (g[1] - gy) ** 2))
            linf = max(linf, float(np.abs(vh - u).max()))
    un, _, _ = _exact_on_physical_side(fields, levelset, mesh.nodes, t)
    linf = max(linf, float(np.abs(uh - un).max()))
    return linf, math.sqrt(l2sq), math.sqrt(h1sq)


def energy_norm(mesh, state, bases, v, beta, sigma=None, tau=1.0) -> float:
    """Broken energy norm with jump and flux-average terms on all interior edges."""
    sigma = default_sigma(beta) if sigma is None else sigma
    v = np.asarray(v, dtype=float)
    h = mesh.h
    reg = regular_elements(state)
    be = np.where(state.element_class[reg] == PLUS, beta[1], beta[0])
    g = np.einsum("ei,eik->ek", v[mesh.elements[reg]], mesh.grads[reg])
    grad_sq = float((be * mesh.areas[reg] * (g**2).sum(axis=1)).sum())
    for e in state.interface_elements:
        basis = bases[int(e)]
        c = v[mesh.elements[int(e)]]
        for s, poly in ((MINUS, basis.cut.minus_polygon), (PLUS, basis.cut.plus_polygon)):
            gs = basis.grads(s).T @ c
            area = cut_rule(basis.cut, s, 1).area
            grad_sq += basis.beta_of(s) * area * float(gs @ gs)

    jump_sq = 0.0
    flux_sq = 0.0
    special = set(int(k) for k in state.interface_edges)
    edges = interior_edges(mesh)
    plain = np.array([k for k in edges if int(k) not in special], dtype=np.int64)
    if len(plain):
        t1, t2 = mesh.edge_to_elements[plain, 0], mesh.edge_to_elements[plain, 1]
        a, b = mesh.nodes[mesh.edges[plain, 0]], mesh.nodes[mesh.edges[plain, 1]]
        d = b - a
        length = np.hypot(d[:, 0], d[:, 1])
        n = np.column_stack([d[:, 1], -d[:, 0]]) / length[:, None]
        c1 = mesh.nodes[mesh.elements[t1]].mean(axis=1)
        flip = ((c1 - a) * n).sum(axis=1) > 0
        n[flip] *= -1
        bet = lambda t: np.where(state.element_class[t] == PLUS, beta[1], beta[0])
        g1 = np.einsum("ei,eik->ek", v[mesh.elements[t1]], mesh.grads[t1]) * bet(t1)[:, None]
        g2 = np.einsum("ei,eik->ek", v[mesh.elements[t2]], mesh.grads[t2]) * bet(t2)[:, None]
        avg = 0.5 * ((g1 + g2) * n).sum(axis=1)
        flux_sq += float((avg**2 * length).sum())
    for k in special:
        traces, _, _ = edge_traces(mesh, state, bases, beta, k, degree=4)
        for dofs, rule, _, jump, avg in traces:
            jv = jump @ v[dofs]
            jump_sq += float(rule.weights @ jv**2)
            flux_sq += float(rule.weights.sum() * (avg @ v[dofs]) ** 2)
    return math.sqrt(grad_sq + sigma / (h * tau) * jump_sq + h * tau / sigma * flux_sq)


def observed_order(e_coarse, e_fine, h_coarse, h_fine) -> float:
    if e_fine <= 0 or e_coarse <= 0:
        return float("nan")
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


def convergence_study(problem, Ns, t_final=1.0, sigma=None, emit_cond=False, on_report=None):
    """Run the stepper with ``tau = t_final / N^2`` for each N and collect errors."""
    if isinstance(problem, str):
        problem = make_problem(problem)
    Ns = list(Ns)
    if Ns != sorted(Ns):
        raise ValueError("mesh list must be ascending")
    reports = []
    for N in Ns:
        grid = TimeGrid(t_final, N * N)
        hist = run(problem, N, grid, sigma, emit_cond=emit_cond)
        errs = solution_errors(hist.mesh, hist.final_state, hist.final_bases, hist.final, problem, t_final)
        rep = ErrorReport(N, hist.mesh.h, grid.tau, *errs)
        if emit_cond:
            rep.conds = [r.cond for r in hist.records]
        if reports:
            prev = reports[-1]
            for key in ("linf", "l2", "h1"):
                rep.orders[key] = observed_order(getattr(prev, key), getattr(rep, key), prev.h, rep.h)
        reports.append(rep)
        if on_report is not None:
            on_report(rep)
    return reports


def condition_trace(problem, N, t_final=1.0, sigma=None, n_steps=None, levelset=None):
    """Per-step ``(step, t, lambda_min, lambda_max, cond)`` of the system matrix."""
    if isinstance(problem, str):
        problem = make_problem(problem)
    grid = TimeGrid(t_final, n_steps or N * N)
    hist = run(problem, N, grid, sigma, emit_cond=True, levelset=levelset)
    return [(r.step, r.t, r.lambda_min, r.lambda_max, r.cond) for r in hist.records]


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


ERROR_COLUMNS = ("N", "h", "tau", "Linf", "L2", "H1", "order_Linf", "order_L2", "order_H1")
COND_COLUMNS = ("step", "t", "lambda_min", "lambda_max", "cond")


@contextmanager
def _sink(target):
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def write_error_csv(reports, target) -> None:
    """Write error rows to a path or an open text stream."""
    with _sink(target) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ERROR_COLUMNS)
        for r in reports:
            w.writerow([_fmt(v) for v in (r.N, r.h, r.tau, r.linf, r.l2, r.h1,
                                          r.orders.get("linf"), r.orders.get("l2"), r.orders.get("h1"))])


def write_cond_csv(rows, target) -> None:
    with _sink(target) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COND_COLUMNS)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
