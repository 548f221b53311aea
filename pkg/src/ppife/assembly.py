"""Assembly of the partially penalized IFE stiffness, mass, cross-step mass and load."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .basis import IfeBasis, element_basis
from .geometry import INTERFACE, MINUS, PLUS, InterfaceState
from .mesh import Mesh
from .quadrature import VOLUME_DEGREE, EDGE_DEGREE, cut_rule, edge_rule, reference_rule, union_cut_rule


def default_sigma(beta) -> float:
    return 100.0 * max(beta)


@dataclass
class SystemMatrices:
    """Full node-indexed matrices of one time step.

    ``C`` has rows tested against the new space and columns in the old space.
    """

    A: sp.csr_matrix
    M: sp.csr_matrix
    C: sp.csr_matrix | None
    F: np.ndarray | None
    dof_count: int


class _Coo:
    def __init__(self, n):
        self.n = n
        self.rows, self.cols, self.vals = [], [], []

    def add(self, rows, cols, local):
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        local = np.asarray(local)
        if local.ndim == 2:
            self.rows.append(np.repeat(rows, len(cols)))
            self.cols.append(np.tile(cols, len(rows)))
        else:  # batched (m, k, l)
            self.rows.append(np.repeat(rows[:, :, None], cols.shape[1], axis=2).ravel())
            self.cols.append(np.repeat(cols[:, None, :], rows.shape[1], axis=1).ravel())
        self.vals.append(local.ravel())

    def tocsr(self):
        if not self.vals:
            return sp.csr_matrix((self.n, self.n))
        r = np.concatenate(self.rows)
        c = np.concatenate(self.cols)
        v = np.concatenate(self.vals)
        return sp.coo_matrix((v, (r, c)), shape=(self.n, self.n)).tocsr()


@lru_cache(maxsize=8)
def _p1_tables(mesh: Mesh):
    K = mesh.areas[:, None, None] * np.einsum("eik,ejk->eij", mesh.grads, mesh.grads)
    M = mesh.areas[:, None, None] * (np.ones((3, 3)) + np.eye(3)) / 12.0
    return K, M


def _element_beta(state: InterfaceState, beta):
    return np.where(state.element_class == PLUS, beta[1], beta[0])


def regular_elements(state: InterfaceState) -> np.ndarray:
    return np.flatnonzero(state.element_class != INTERFACE)


def edge_frame(mesh: Mesh, k: int):
    """``(T1, T2, unit normal from T1 to T2, length)`` of interior edge ``k``."""
    t1, t2 = (int(v) for v in mesh.edge_to_elements[k])
    a, b = mesh.nodes[mesh.edges[k]]
    d = b - a
    length = float(np.hypot(*d))
    n = np.array([d[1], -d[0]]) / length
    c1 = mesh.nodes[mesh.elements[t1]].mean(axis=0)
    if np.dot(c1 - a, n) > 0.0:
        n = -n
    return t1, t2, n, length


def edge_traces(mesh, state, bases, beta, k, degree=EDGE_DEGREE):
    """Per sub-segment of interface edge ``k``: quadrature, jumps and flux averages.

    Yields ``(dofs, rule, side, jump, avg)`` where ``jump`` is ``(npts, ndofs)``
    (``[phi_j]`` at the points) and ``avg`` is ``(ndofs,)`` (``{beta grad phi_j . n}``).
    """
    t1, t2, n, length = edge_frame(mesh, k)
    b1 = element_basis(mesh, state, bases, t1, beta)
    b2 = element_basis(mesh, state, bases, t2, beta)
    c1, c2 = mesh.elements[t1], mesh.elements[t2]
    dofs = list(c1) + [v for v in c2 if v not in c1]
    loc1 = [dofs.index(v) for v in c1]
    loc2 = [dofs.index(v) for v in c2]
    out = []
    for p, q, s in state.side_on_segment(mesh, k):
        if np.allclose(p, q, rtol=0.0, atol=0.0):
            continue
        rule = edge_rule(p, q, degree)
        jump = np.zeros((len(rule.weights), len(dofs)))
        jump[:, loc1] += b1.values(rule.points, s)
        jump[:, loc2] -= b2.values(rule.points, s)
        avg = np.zeros(len(dofs))
        avg[loc1] += 0.5 * b1.beta_of(s) * (b1.grads(s) @ n)
        avg[loc2] += 0.5 * b2.beta_of(s) * (b2.grads(s) @ n)
        out.append((np.array(dofs), rule, s, jump, avg))
    return out, length, n


def _interface_volume_stiffness(basis: IfeBasis):
    local = np.zeros((3, 3))
    for s, poly in ((MINUS, basis.cut.minus_polygon), (PLUS, basis.cut.plus_polygon)):
        area = abs(_shoelace(poly))
        g = basis.grads(s)
        local += basis.beta_of(s) * area * (g @ g.T)
    return local


def _shoelace(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def assemble_stiffness(mesh: Mesh, state: InterfaceState, bases: dict, beta, sigma: float | None = None,
                       swap_edge_order: bool = False, all_interface_edges: bool = False) -> sp.csr_matrix:
    """Stiffness of the bilinear form with penalties on interface edges only.

    By default the edge loop visits the cut interior edges; the remaining
    interface edges carry zero jumps and contribute nothing, which
    ``all_interface_edges=True`` visits anyway.  ``swap_edge_order`` flips the
    T1/T2 convention on every edge (testing aid).
    """
    if sigma is None:
        sigma = default_sigma(beta)
    if sigma <= 0:
        raise ValueError("penalty parameter must be positive")
    K, _ = _p1_tables(mesh)
    coo = _Coo(mesh.n_nodes)
    reg = regular_elements(state)
    be = _element_beta(state, beta)[reg]
    coo.add(mesh.elements[reg], mesh.elements[reg], be[:, None, None] * K[reg])
    for e in state.interface_elements:
        e = int(e)
        if e not in bases:
            raise KeyError(f"missing IFE basis for interface element {e}")
        conn = mesh.elements[e]
        coo.add(conn, conn, _interface_volume_stiffness(bases[e]))
    edges = state.interface_edges if all_interface_edges else state.cut_edges(mesh)
    for k in edges:
        traces, length, _ = edge_traces(mesh, state, bases, beta, int(k))
        sgn = -1.0 if swap_edge_order else 1.0
        for dofs, rule, _, jump, avg in traces:
            jump = sgn * jump
            avg = sgn * avg
            wj = rule.weights @ jump  # integral of [phi_i]
            local = -(np.outer(wj, avg) + np.outer(avg, wj))
            local += sigma / length * (jump.T * rule.weights) @ jump
            coo.add(dofs, dofs, local)
    return coo.tocsr()


def assemble_mass(mesh: Mesh, state: InterfaceState, bases: dict, degree: int = VOLUME_DEGREE) -> sp.csr_matrix:
    _, Mt = _p1_tables(mesh)
    coo = _Coo(mesh.n_nodes)
    reg = regular_elements(state)
    coo.add(mesh.elements[reg], mesh.elements[reg], Mt[reg])
    for e in state.interface_elements:
        e = int(e)
        basis = bases[e]
        local = np.zeros((3, 3))
        for s in (MINUS, PLUS):
            rule = cut_rule(basis.cut, s, degree)
            V = basis.values(rule.points, s)
            local += (V.T * rule.weights) @ V
        coo.add(mesh.elements[e], mesh.elements[e], local)
    return coo.tocsr()


def assemble_cross_mass(mesh: Mesh, state_old: InterfaceState, state_new: InterfaceState,
                        bases_old: dict, bases_new: dict, beta, degree: int = VOLUME_DEGREE) -> sp.csr_matrix:
    """``C[i, j] = (psi_j^old, psi_i^new)`` with exact quadrature on the two-cut partition."""
    _, Mt = _p1_tables(mesh)
    coo = _Coo(mesh.n_nodes)
    either = (state_old.element_class == INTERFACE) | (state_new.element_class == INTERFACE)
    reg = np.flatnonzero(~either)
    coo.add(mesh.elements[reg], mesh.elements[reg], Mt[reg])
    for e in np.flatnonzero(either):
        e = int(e)
        bo = element_basis(mesh, state_old, bases_old, e, beta)
        bn = element_basis(mesh, state_new, bases_new, e, beta)
        local = np.zeros((3, 3))
        for rule, so, sn in union_cut_rule(bo.vertices, bo.cut, bn.cut, degree, bo.side, bn.side):
            if not len(rule.weights):
                continue
            Vn = bn.values(rule.points, sn)
            Vo = bo.values(rule.points, so)
            local += (Vn.T * rule.weights) @ Vo
        coo.add(mesh.elements[e], mesh.elements[e], local)
    return coo.tocsr()


def assemble_load(mesh: Mesh, state: InterfaceState, bases: dict, f, t: float,
                  degree: int = VOLUME_DEGREE) -> np.ndarray:
    """``F[i] = (f, psi_i)`` with ``f(side, x, y, t)`` taken on the polyline side."""
    F = np.zeros(mesh.n_nodes)
    bary, w = reference_rule(degree)
    reg = regular_elements(state)
    P = np.einsum("qi,eik->eqk", bary, mesh.nodes[mesh.elements[reg]])
    cls = state.element_class[reg]
    vals = np.empty(P.shape[:2])
    for s in (MINUS, PLUS):
        m = cls == s
        if m.any():
            vals[m] = f(s, P[m, :, 0], P[m, :, 1], t)
    local = mesh.areas[reg, None] * np.einsum("eq,q,qi->ei", vals, w, bary)
    np.add.at(F, mesh.elements[reg], local)
    for e in state.interface_elements:
        e = int(e)
        basis = bases[e]
        for s in (MINUS, PLUS):
            rule = cut_rule(basis.cut, s, degree)
            fv = f(s, rule.points[:, 0], rule.points[:, 1], t)
            F[mesh.elements[e]] += basis.values(rule.points, s).T @ (rule.weights * fv)
    return F


def dump_coo(matrix, path) -> None:
    """Write ``row col value`` per nonzero, 17 significant digits."""
    m = sp.coo_matrix(matrix)
    order = np.lexsort((m.col, m.row))
    lines = [f"{m.row[i]} {m.col[i]} {m.data[i]:.17g}" for i in order]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
