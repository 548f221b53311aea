"""Level sets, element classification and cut geometry of interface elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GeometryViolation, NonConvergence
from .mesh import Mesh

MINUS, INTERFACE, PLUS = -1, 0, 1

SNAP = 1e-12
BISECTION_RTOL = 1e-13
EDGE_SAMPLES = 7


@dataclass(frozen=True)
class LevelSet:
    """Analytic interface ``{phi = 0}``; plus side is ``phi > 0``.

    ``phi`` and ``grad_phi`` take numpy arrays ``(x, y, t)``; ``grad_phi``
    returns the pair ``(phi_x, phi_y)``.
    """

    phi: Callable
    grad_phi: Callable
    K: float = 0.0

    def frozen(self, t0: float) -> "LevelSet":
        """Stationary copy of the interface at time ``t0``."""
        return LevelSet(
            phi=lambda x, y, t: self.phi(x, y, t0 + 0.0 * np.asarray(t)),
            grad_phi=lambda x, y, t: self.grad_phi(x, y, t0 + 0.0 * np.asarray(t)),
            K=0.0,
        )

    def side(self, points, t) -> np.ndarray:
        """Physical side (+1/-1) of each point; zero counts as plus."""
        p = np.asarray(points, dtype=float)
        return np.where(self.phi(p[..., 0], p[..., 1], t) >= 0.0, PLUS, MINUS)

    def negated(self) -> "LevelSet":
        return LevelSet(
            phi=lambda x, y, t: -self.phi(x, y, t),
            grad_phi=lambda x, y, t: tuple(-g for g in self.grad_phi(x, y, t)),
            K=self.K,
        )


@dataclass
class CutConfig:
    """Straight cut DE of one interface element.

    ``cut_edges`` are local edge indices (edge k joins local vertices k, k+1).
    ``normal`` is the unit normal of DE pointing from the minus into the plus part.
    """

    element: int
    vertices: np.ndarray  # (3, 2)
    vertex_signs: np.ndarray  # (3,) of +-1
    cut_edges: tuple
    D: np.ndarray
    E: np.ndarray
    normal: np.ndarray
    minus_polygon: np.ndarray
    plus_polygon: np.ndarray

    def side_of(self, point) -> int:
        """Side of the polyline segment containing ``point``; points on DE are minus."""
        return PLUS if float(np.dot(np.subtract(point, self.D), self.normal)) > 0.0 else MINUS

    def sides_of(self, points) -> np.ndarray:
        d = (np.asarray(points) - self.D) @ self.normal
        return np.where(d > 0.0, PLUS, MINUS)


@dataclass
class InterfaceState:
    t: float
    vertex_phi: np.ndarray
    vertex_signs: np.ndarray  # (n_nodes,) of +-1 after snapping
    element_class: np.ndarray  # (n_elements,) MINUS / INTERFACE / PLUS
    interface_elements: np.ndarray
    interface_edges: np.ndarray  # interior edges of interface elements, sorted
    edge_cuts: dict  # global edge -> (parameter from edges[k, 0], point)
    cuts: dict = field(default_factory=dict)  # element -> CutConfig

    def cut_edges(self, mesh: Mesh) -> np.ndarray:
        """Interior edges whose endpoints lie on different sides.

        These are the only interface edges on which IFE functions can jump:
        on the other edges both traces are the affine nodal interpolant.
        """
        ks = np.array(sorted(self.edge_cuts), dtype=np.int64)
        if not len(ks):
            return ks
        return ks[mesh.edge_to_elements[ks, 1] >= 0]

    def is_interface(self, e: int) -> bool:
        return self.element_class[e] == INTERFACE

    def side_on_segment(self, mesh: Mesh, k: int):
        """Sub-segments of global edge ``k`` with their constant side labels."""
        a, b = mesh.edges[k]
        pa, pb = mesh.nodes[a], mesh.nodes[b]
        sa, sb = self.vertex_signs[a], self.vertex_signs[b]
        if k in self.edge_cuts:
            x = self.edge_cuts[k][1]
            return [(pa, x, sa), (x, pb, sb)]
        return [(pa, pb, sa)]


def _snapped_signs(values, h):
    return np.where(np.abs(values) < SNAP * h, PLUS, np.where(values > 0.0, PLUS, MINUS))


def bisect_edges(ls: LevelSet, p0, p1, t, s0, s1, max_iter: int = 200):
    """Vectorized bisection for the sign change of ``phi`` on segments ``p0 -> p1``.

    ``s0``/``s1`` are the (snapped) endpoint signs; returns parameters in [0, 1].
    """
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    d = p1 - p0
    lo = np.zeros(len(p0))
    hi = np.ones(len(p0))
    f0 = ls.phi(p0[:, 0], p0[:, 1], t)
    f1 = ls.phi(p1[:, 0], p1[:, 1], t)
    scale = np.maximum(np.abs(f0), np.abs(f1))
    sign_lo = np.asarray(s0, dtype=float)
    mid = 0.5 * (lo + hi)
    active = np.ones(len(p0), dtype=bool)
    for _ in range(max_iter):
        mid = np.where(active, 0.5 * (lo + hi), mid)
        fm = ls.phi(p0[:, 0] + mid * d[:, 0], p0[:, 1] + mid * d[:, 1], t)
        done = (np.abs(fm) <= BISECTION_RTOL * scale) | (hi - lo <= 1e-15)
        same = np.sign(fm) == sign_lo
        lo = np.where(active & same & ~done, mid, lo)
        hi = np.where(active & ~same & ~done, mid, hi)
        active &= ~done
        if not active.any():
            return mid
    raise NonConvergence(f"bisection failed on {int(active.sum())} edge(s) at t={t}")


def edge_crossing_counts(mesh: Mesh, ls: LevelSet, t, signs) -> np.ndarray:
    """Sign changes of ``phi`` along every edge, sampled at ``EDGE_SAMPLES`` inner points."""
    a, b = mesh.edges[:, 0], mesh.edges[:, 1]
    s = np.arange(1, EDGE_SAMPLES + 1) / (EDGE_SAMPLES + 1)
    P = mesh.nodes[a][:, None, :] + s[None, :, None] * (mesh.nodes[b] - mesh.nodes[a])[:, None, :]
    inner = _snapped_signs(ls.phi(P[..., 0], P[..., 1], t), mesh.h)
    seq = np.column_stack([signs[a], inner, signs[b]])
    return (np.diff(seq, axis=1) != 0).sum(axis=1)


def _check_edge_crossings(mesh: Mesh, ls: LevelSet, t, signs):
    changes = edge_crossing_counts(mesh, ls, t, signs)
    bad = np.flatnonzero(changes > 1)
    if len(bad):
        k = int(bad[0])
        elem = int(mesh.edge_to_elements[k, 0])
        raise GeometryViolation(
            f"interface crosses edge {k} (element {elem}) {int(changes[k])} times at t={t:.17g}",
            element=elem,
            time=t,
        )


def classify(mesh: Mesh, ls: LevelSet, t: float, strict: bool = False) -> InterfaceState:
    """Tag elements by vertex signs of ``phi`` and build cut geometry.

    The element topology follows the vertex signs, i.e. that of the piecewise
    linear interpolant of ``phi``; an edge whose endpoints share a sign is never
    cut even if ``phi`` dips across zero in between (an O(h^2) feature).  With
    ``strict`` the edges are sampled and such multiple crossings raise
    :class:`GeometryViolation` instead.
    """
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    values = np.asarray(ls.phi(x, y, t), dtype=float) * np.ones(mesh.n_nodes)
    signs = _snapped_signs(values, mesh.h)
    if strict:
        _check_edge_crossings(mesh, ls, t, signs)

    el_signs = signs[mesh.elements]
    klass = np.where(
        (el_signs == PLUS).all(axis=1), PLUS, np.where((el_signs == MINUS).all(axis=1), MINUS, INTERFACE)
    )
    interface_elements = np.flatnonzero(klass == INTERFACE)

    a, b = mesh.edges[:, 0], mesh.edges[:, 1]
    cut_edge_ids = np.flatnonzero(signs[a] != signs[b])
    edge_cuts = {}
    if len(cut_edge_ids):
        p0, p1 = mesh.nodes[a[cut_edge_ids]], mesh.nodes[b[cut_edge_ids]]
        params = bisect_edges(ls, p0, p1, t, signs[a[cut_edge_ids]], signs[b[cut_edge_ids]])
        pts = p0 + params[:, None] * (p1 - p0)
        edge_cuts = {int(k): (float(s), pt) for k, s, pt in zip(cut_edge_ids, params, pts)}

    cuts = {int(e): _build_cut(mesh, int(e), signs, edge_cuts, t) for e in interface_elements}

    if len(interface_elements):
        cand = np.unique(mesh.element_to_edges[interface_elements].ravel())
        interface_edges = cand[mesh.edge_to_elements[cand, 1] >= 0]
    else:
        interface_edges = np.zeros(0, dtype=np.int64)

    return InterfaceState(
        t=t,
        vertex_phi=values,
        vertex_signs=signs,
        element_class=klass,
        interface_elements=interface_elements,
        interface_edges=interface_edges,
        edge_cuts=edge_cuts,
        cuts=cuts,
    )


def _build_cut(mesh: Mesh, e: int, signs, edge_cuts, t) -> CutConfig:
    vs = signs[mesh.elements[e]]
    points = {}
    for k in range(3):
        if vs[k] != vs[(k + 1) % 3]:
            g = int(mesh.element_to_edges[e, k])
            if g not in edge_cuts:
                raise GeometryViolation(f"missing edge cut on element {e} at t={t:.17g}", e, t)
            points[k] = edge_cuts[g][1]
    try:
        return make_cut(mesh.nodes[mesh.elements[e]], vs, points, element=e)
    except GeometryViolation as exc:
        raise GeometryViolation(f"{exc} at t={t:.17g}", element=e, time=t) from None


def make_cut(vertices, vertex_signs, points, element: int = -1) -> CutConfig:
    """Cut of a triangle given vertex signs and the crossing point of each cut edge.

    ``points`` maps local edge index (edge k joins vertices k, k+1) to a point.
    """
    verts = np.asarray(vertices, dtype=float)
    vs = np.asarray(vertex_signs)
    minus, plus, pts, cut_edges = [], [], [], []
    for k in range(3):
        (minus if vs[k] == MINUS else plus).append(verts[k])
        if vs[k] != vs[(k + 1) % 3]:
            pt = np.asarray(points[k], dtype=float)
            minus.append(pt)
            plus.append(pt)
            pts.append(pt)
            cut_edges.append(k)
    if len(pts) != 2:
        raise GeometryViolation(f"element {element} crossed at {len(pts)} edge points", element=element)
    D, E = pts
    seg = E - D
    length = float(np.hypot(*seg))
    if length == 0.0:
        raise GeometryViolation(f"degenerate cut segment on element {element}", element=element)
    normal = np.array([seg[1], -seg[0]]) / length
    # orient minus -> plus using the plus vertex farthest from the line
    plus_v = verts[vs == PLUS]
    dist = (plus_v - D) @ normal
    if dist[np.argmax(np.abs(dist))] < 0.0:
        normal = -normal
    return CutConfig(
        element=element,
        vertices=verts,
        vertex_signs=vs.copy(),
        cut_edges=tuple(cut_edges),
        D=D,
        E=E,
        normal=normal,
        minus_polygon=np.array(minus),
        plus_polygon=np.array(plus),
    )


def cut_element(mesh: Mesh, e: int, ls: LevelSet, t: float) -> CutConfig:
    """Cut geometry of a single element with mixed vertex signs."""
    conn = mesh.elements[e]
    values = ls.phi(mesh.nodes[conn, 0], mesh.nodes[conn, 1], t)
    local_signs = _snapped_signs(np.asarray(values, dtype=float), mesh.h)
    if (local_signs == local_signs[0]).all():
        raise GeometryViolation(f"element {e} is not cut at t={t:.17g}", element=e, time=t)
    signs = np.zeros(mesh.n_nodes, dtype=int)
    signs[conn] = local_signs
    edge_cuts = {}
    for k in range(3):
        i, j = conn[k], conn[(k + 1) % 3]
        if signs[i] != signs[j]:
            g = int(mesh.element_to_edges[e, k])
            a, b = mesh.edges[g]
            s = bisect_edges(ls, mesh.nodes[a], mesh.nodes[b], t, [signs[a]], [signs[b]])[0]
            edge_cuts[g] = (float(s), mesh.nodes[a] + s * (mesh.nodes[b] - mesh.nodes[a]))
    return _build_cut(mesh, e, signs, edge_cuts, t)
