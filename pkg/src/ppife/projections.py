"""Elliptic projection and discrete Laplacian on the current IFE space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import assemble_mass, assemble_stiffness, edge_frame, regular_elements
from .basis import element_basis
from .geometry import MINUS, PLUS
from .linalg import solve_spd
from .quadrature import ERROR_DEGREE, cut_rule, edge_rule, reference_rule


@dataclass
class ProjectionResult:
    coefficients: np.ndarray  # full nodal vector, boundary entries hold Dirichlet data
    residual: float


def solve_dirichlet(K, rhs, values, free, rel_tol=1e-12):
    """Solve ``K x = rhs`` on ``free`` nodes with ``x`` fixed to ``values`` elsewhere.

    Returns ``(x, relative residual)``.
    """
    x = np.array(values, dtype=float)
    fixed = np.setdiff1d(np.arange(len(x)), free)
    Kff = K[free][:, free]
    b = rhs[free] - K[free][:, fixed] @ x[fixed]
    x[free] = solve_spd(Kff, b, rel_tol)
    bn = np.linalg.norm(b)
    res = np.linalg.norm(Kff @ x[free] - b) / bn if bn > 0 else 0.0
    return x, float(res)


def projection_rhs(mesh, state, bases, fields, t, degree=ERROR_DEGREE):
    """``a_h(u, psi_i)`` for a continuous field ``u`` with one-sided gradients.

    ``fields`` provides ``grad_u(side, x, y, t)`` and ``beta``; terms with ``[u]``
    vanish.
    """
    beta = fields.beta
    r = np.zeros(mesh.n_nodes)
    bary, w = reference_rule(degree)
    reg = regular_elements(state)
    P = np.einsum("qi,eik->eqk", bary, mesh.nodes[mesh.elements[reg]])
    cls = state.element_class[reg]
    gint = np.zeros((len(reg), 2))
    for s in (MINUS, PLUS):
        m = cls == s
        if m.any():
            gx, gy = fields.grad_u(s, P[m, :, 0], P[m, :, 1], t)
            gint[m, 0] = beta[0 if s < 0 else 1] * (gx @ w)
            gint[m, 1] = beta[0 if s < 0 else 1] * (gy @ w)
    local = mesh.areas[reg, None] * np.einsum("ek,eik->ei", gint, mesh.grads[reg])
    np.add.at(r, mesh.elements[reg], local)
    for e in state.interface_elements:
        e = int(e)
        basis = bases[e]
        for s in (MINUS, PLUS):
            rule = cut_rule(basis.cut, s, degree)
            gx, gy = fields.grad_u(s, rule.points[:, 0], rule.points[:, 1], t)
            g = np.array([rule.weights @ gx, rule.weights @ gy]) * basis.beta_of(s)
            r[mesh.elements[e]] += basis.grads(s) @ g
    for k in state.cut_edges(mesh):
        k = int(k)
        t1, t2, n, _ = edge_frame(mesh, k)
        b1 = element_basis(mesh, state, bases, t1, beta)
        b2 = element_basis(mesh, state, bases, t2, beta)
        for p, q, s in state.side_on_segment(mesh, k):
            if np.array_equal(p, q):
                continue
            rule = edge_rule(p, q, degree)
            gx, gy = fields.grad_u(s, rule.points[:, 0], rule.points[:, 1], t)
            flux = (beta[0] if s < 0 else beta[1]) * (gx * n[0] + gy * n[1]) * rule.weights
            r[mesh.elements[t1]] -= b1.values(rule.points, s).T @ flux
            r[mesh.elements[t2]] += b2.values(rule.points, s).T @ flux
    return r


def boundary_values(mesh, state, fields, t):
    """Nodal Dirichlet data (zero on interior nodes)."""
    g = np.zeros(mesh.n_nodes)
    bn = np.flatnonzero(mesh.boundary_nodes)
    x, y = mesh.nodes[bn, 0], mesh.nodes[bn, 1]
    signs = state.vertex_signs[bn]
    for s in (MINUS, PLUS):
        m = signs == s
        if m.any():
            g[bn[m]] = fields.u(s, x[m], y[m], t)
    return g


def elliptic_projection(mesh, state, bases, fields, t, sigma=None, A=None, rel_tol=1e-12) -> ProjectionResult:
    if A is None:
        A = assemble_stiffness(mesh, state, bases, fields.beta, sigma)
    r = projection_rhs(mesh, state, bases, fields, t)
    g = boundary_values(mesh, state, fields, t)
    x, res = solve_dirichlet(A, r, g, mesh.free_nodes, rel_tol)
    return ProjectionResult(x, res)


def project_discrete(mesh, A, w, rel_tol=1e-12) -> ProjectionResult:
    """Elliptic projection of a discrete function given by full nodal values ``w``."""
    w = np.asarray(w, dtype=float)
    x, res = solve_dirichlet(A, A @ w, w * mesh.boundary_nodes, mesh.free_nodes, rel_tol)
    return ProjectionResult(x, res)


def discrete_laplacian(mesh, state, bases, w, beta, sigma=None, A=None, M=None, rel_tol=1e-12) -> np.ndarray:
    """``x`` in the homogeneous space with ``(x, v) = a_h(w, v)`` for all test ``v``."""
    if A is None:
        A = assemble_stiffness(mesh, state, bases, beta, sigma)
    if M is None:
        M = assemble_mass(mesh, state, bases)
    free = mesh.free_nodes
    out = np.zeros(mesh.n_nodes)
    out[free] = solve_spd(M[free][:, free], (A @ np.asarray(w, dtype=float))[free], rel_tol)
    return out
