"""Local linear IFE shape functions and nodal interpolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutsideElement, SingularLocalSystem
from .geometry import MINUS, PLUS, CutConfig, InterfaceState
from .mesh import Mesh

SINGULAR_RESIDUAL = 1e-10


@dataclass
class IfeBasis:
    """Three shape functions on one element, each a pair of affine pieces.

    ``coeffs[s, i]`` holds ``(a, b, c)`` of shape ``i`` on side ``s`` (0 minus,
    1 plus) in the scaled local coordinates ``(X - center) / scale``.
    Non-interface elements carry identical pieces on both sides.
    """

    element: int
    vertices: np.ndarray
    beta: tuple
    coeffs: np.ndarray  # (2, 3, 3)
    center: np.ndarray
    scale: float
    cut: CutConfig | None = None
    side: int = MINUS  # element side when not cut

    @property
    def minus_coeffs(self):
        return self.coeffs[0]

    @property
    def plus_coeffs(self):
        return self.coeffs[1]

    def grads(self, side: int) -> np.ndarray:
        """Constant gradients ``(3, 2)`` of the three shapes on ``side``."""
        return self.coeffs[_idx(side), :, 1:] / self.scale

    def beta_of(self, side: int) -> float:
        return self.beta[_idx(side)]

    def sides(self, points) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.cut is None:
            return np.full(len(points), self.side)
        return self.cut.sides_of(points)

    def values(self, points, sides=None) -> np.ndarray:
        """Shape values ``(n, 3)`` at points taken on the given sides."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        q = (points - self.center) / self.scale
        if sides is None:
            sides = self.sides(points)
        elif np.ndim(sides) == 0:
            c = self.coeffs[_idx(sides)]
            return c[:, 0] + q[:, :1] * c[:, 1] + q[:, 1:] * c[:, 2]
        sides = np.asarray(sides)
        out = np.empty((len(points), 3))
        for s in (MINUS, PLUS):
            m = sides == s
            if m.any():
                c = self.coeffs[_idx(s)]
                out[m] = c[:, 0] + q[m, :1] * c[:, 1] + q[m, 1:] * c[:, 2]
        return out

    def gradients(self, points, sides=None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if sides is None:
            sides = self.sides(points)
        sides = np.broadcast_to(np.asarray(sides), (len(points),))
        return np.where(sides[:, None, None] == PLUS, self.grads(PLUS), self.grads(MINUS))


def _idx(side: int) -> int:
    return 0 if side < 0 else 1


def _frame(vertices):
    center = vertices.mean(axis=0)
    d = vertices - vertices[[2, 0, 1]]
    scale = float(np.sqrt((d * d).sum(axis=1).max()))
    return center, scale


def local_system(cut: CutConfig, beta, center, scale) -> np.ndarray:
    """The 6x6 constraint matrix: three nodal rows, continuity at D and E, flux jump."""
    q = (cut.vertices - center) / scale
    qd = (cut.D - center) / scale
    qe = (cut.E - center) / scale
    M = np.zeros((6, 6))
    for j in range(3):
        off = 0 if cut.vertex_signs[j] == MINUS else 3
        M[j, off:off + 3] = (1.0, q[j, 0], q[j, 1])
    for row, p in ((3, qd), (4, qe)):
        M[row, :3] = (1.0, p[0], p[1])
        M[row, 3:] = (-1.0, -p[0], -p[1])
    bm, bp = beta
    bmax = max(bm, bp)
    n = cut.normal
    M[5, 1:3] = bm / bmax * n
    M[5, 4:6] = -bp / bmax * n
    return M


def build_local_basis(mesh: Mesh, e: int, cut: CutConfig | None, beta, side: int = MINUS) -> IfeBasis:
    """Shape functions on element ``e``; IFE pieces when ``cut`` is given."""
    return local_basis(mesh.nodes[mesh.elements[e]], cut, beta, element=e, side=side)


def local_basis(vertices, cut: CutConfig | None, beta, element: int = -1, side: int = MINUS) -> IfeBasis:
    if beta[0] <= 0 or beta[1] <= 0:
        raise ValueError("diffusion coefficients must be positive")
    verts = np.asarray(vertices, dtype=float)
    center, scale = _frame(verts)
    if cut is None:
        coeffs = np.empty((2, 3, 3))
        V = np.column_stack([np.ones(3), (verts - center) / scale])
        coeffs[:] = np.linalg.inv(V).T
        return IfeBasis(element, verts, tuple(beta), coeffs, center, scale, None, side)
    M = local_system(cut, beta, center, scale)
    rhs = np.zeros((6, 3))
    rhs[:3] = np.eye(3)
    try:
        X = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularLocalSystem(f"singular IFE system on element {element}") from exc
    resid = np.abs(M @ X - rhs).max()
    if not np.isfinite(X).all() or resid > SINGULAR_RESIDUAL * max(1.0, np.abs(M).max() * np.abs(X).max()):
        raise SingularLocalSystem(f"ill-conditioned IFE system on element {element}")
    coeffs = np.stack([X[:3].T, X[3:].T])
    return IfeBasis(element, verts, tuple(beta), coeffs, center, scale, cut, side)


def build_bases(mesh: Mesh, state: InterfaceState, beta) -> dict:
    """IFE bases of all interface elements; other elements use plain P1."""
    return {e: build_local_basis(mesh, e, cut, beta) for e, cut in state.cuts.items()}


def element_basis(mesh: Mesh, state: InterfaceState, bases: dict, e: int, beta) -> IfeBasis:
    if e in bases:
        return bases[e]
    return build_local_basis(mesh, e, None, beta, side=int(state.element_class[e]))


def _check_inside(basis: IfeBasis, point, tol=1e-12):
    v = basis.vertices
    T = np.column_stack([v[1] - v[0], v[2] - v[0]])
    lam = np.linalg.solve(T, np.asarray(point, dtype=float) - v[0])
    bary = np.array([1.0 - lam.sum(), lam[0], lam[1]])
    if (bary < -tol).any():
        raise OutsideElement(f"point {tuple(point)} outside element {basis.element}")


def evaluate(basis: IfeBasis, i: int, point) -> float:
    _check_inside(basis, point)
    return float(basis.values(np.atleast_2d(point))[0, i])


def gradient(basis: IfeBasis, i: int, point) -> np.ndarray:
    _check_inside(basis, point)
    return basis.gradients(np.atleast_2d(point))[0, i].copy()


def interpolate(mesh: Mesh, state: InterfaceState, g, homogeneous: bool = False) -> np.ndarray:
    """Nodal values of ``g(x, y, side)`` with the node side taken from the interface state."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    values = np.empty(mesh.n_nodes)
    for s in (MINUS, PLUS):
        m = state.vertex_signs == s
        if m.any():
            values[m] = g(x[m], y[m], s)
    if homogeneous:
        values[mesh.boundary_nodes] = 0.0
    return values
