"""Structured triangular mesh of the square (-1, 1)^2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation with node/edge/element connectivity.

    Local edge ``k`` of an element joins local vertices ``k`` and ``(k + 1) % 3``.
    ``edge_to_elements`` holds ``-1`` in the second column for boundary edges;
    the first column is always the lower element index.
    """

    N: int
    nodes: np.ndarray  # (n_nodes, 2)
    elements: np.ndarray  # (n_elements, 3), counterclockwise
    edges: np.ndarray  # (n_edges, 2), sorted node pairs
    edge_to_elements: np.ndarray  # (n_edges, 2)
    element_to_edges: np.ndarray  # (n_elements, 3)
    boundary_nodes: np.ndarray  # (n_nodes,) bool
    h: float
    areas: np.ndarray = field(repr=False)
    grads: np.ndarray = field(repr=False)  # (n_elements, 3, 2) P1 gradients

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def free_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_nodes)

    def element_vertices(self, e: int) -> np.ndarray:
        return self.nodes[self.elements[e]]

    def dump(self, path) -> None:
        """Write a plain-text node/element listing, one entity per line."""
        lines = [f"# nodes {self.n_nodes}"]
        lines += [f"node {i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(self.nodes)]
        lines.append(f"# elements {self.n_elements}")
        lines += [f"element {i} {a} {b} {c}" for i, (a, b, c) in enumerate(self.elements)]
        Path(path).write_text("\n".join(lines) + "\n")


def build_uniform_mesh(N: int) -> Mesh:
    """Split an N x N grid of squares along the bottom-left/top-right diagonal."""
    if int(N) != N or N < 2:
        raise ValueError(f"mesh parameter N must be an integer >= 2, got {N!r}")
    N = int(N)
    s = np.linspace(-1.0, 1.0, N + 1)
    X, Y = np.meshgrid(s, s)  # row-major by y, then x
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    j, i = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    bl = (j * (N + 1) + i).ravel()
    br, tl = bl + 1, bl + N + 1
    tr = tl + 1
    elements = np.empty((2 * N * N, 3), dtype=np.int64)
    elements[0::2] = np.column_stack([bl, br, tr])
    elements[1::2] = np.column_stack([bl, tr, tl])

    local = np.stack([elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]], axis=1)
    pairs = np.sort(local.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    element_to_edges = inverse.reshape(-1, 3)

    edge_to_elements = np.full((len(edges), 2), -1, dtype=np.int64)
    owner = np.repeat(np.arange(len(elements)), 3)
    for k, e in zip(inverse, owner):
        col = 0 if edge_to_elements[k, 0] < 0 else 1
        edge_to_elements[k, col] = e

    on_boundary = (np.abs(np.abs(nodes) - 1.0) < 1e-14).any(axis=1)

    P = nodes[elements]
    d1 = P[:, 1] - P[:, 0]
    d2 = P[:, 2] - P[:, 0]
    areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    # grad of barycentric coordinate i is rot(opposite edge) / (2 area)
    opp = np.stack([P[:, 2] - P[:, 1], P[:, 0] - P[:, 2], P[:, 1] - P[:, 0]], axis=1)
    grads = np.stack([-opp[..., 1], opp[..., 0]], axis=-1) / (2.0 * areas[:, None, None])

    return Mesh(
        N=N,
        nodes=nodes,
        elements=elements,
        edges=edges,
        edge_to_elements=edge_to_elements,
        element_to_edges=element_to_edges,
        boundary_nodes=on_boundary,
        h=math.sqrt(2.0) * 2.0 / N,
        areas=areas,
        grads=grads,
    )


def interior_edges(mesh: Mesh) -> np.ndarray:
    return np.flatnonzero(mesh.edge_to_elements[:, 1] >= 0)


def boundary_edges(mesh: Mesh) -> np.ndarray:
    return np.flatnonzero(mesh.edge_to_elements[:, 1] < 0)
