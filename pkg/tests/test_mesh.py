import math

import numpy as np
import pytest

from ppife.mesh import boundary_edges, build_uniform_mesh, interior_edges


def test_counts_n2():
    m = build_uniform_mesh(2)
    assert (m.n_nodes, m.n_elements, m.n_edges) == (9, 8, 16)
    assert np.allclose(m.areas, 0.5)


def test_counts_n10():
    m = build_uniform_mesh(10)
    assert (m.n_nodes, m.n_elements) == (121, 200)


@pytest.mark.parametrize("N", [2, 3, 7, 16])
def test_invariants(N):
    m = build_uniform_mesh(N)
    assert m.n_nodes == (N + 1) ** 2
    assert m.n_elements == 2 * N * N
    assert np.all(m.areas > 0)
    assert np.allclose(m.areas, 2.0 / N**2, rtol=0, atol=1e-15)
    assert abs(m.areas.sum() - 4.0) < 1e-12
    assert m.h == pytest.approx(math.sqrt(2) * 2 / N)
    # h_T identical across elements
    P = m.nodes[m.elements]
    diam = np.max(np.linalg.norm(P - P[:, [1, 2, 0]], axis=2), axis=1)
    assert np.allclose(diam, m.h)


def test_interior_edges_by_enumeration():
    m = build_uniform_mesh(2)
    # brute force: count elements sharing each node pair
    share = {}
    for e, tri in enumerate(m.elements):
        for k in range(3):
            key = tuple(sorted((tri[k], tri[(k + 1) % 3])))
            share.setdefault(key, []).append(e)
    expected = sorted(k for k, v in share.items() if len(v) == 2)
    got = sorted(tuple(m.edges[k]) for k in interior_edges(m))
    assert got == expected
    assert len(got) == 8
    assert set(interior_edges(m)).isdisjoint(boundary_edges(m))


@pytest.mark.parametrize("N", [2, 5, 8])
def test_edge_partition_and_incidence(N):
    m = build_uniform_mesh(N)
    assert len(interior_edges(m)) + len(boundary_edges(m)) == m.n_edges
    for e in range(m.n_elements):
        for k in m.element_to_edges[e]:
            assert e in m.edge_to_elements[k]
    for k, (t1, t2) in enumerate(m.edge_to_elements):
        for t in (t1, t2):
            if t >= 0:
                assert k in m.element_to_edges[t]
        if t2 >= 0:
            assert t1 < t2


def test_counterclockwise_and_lexicographic():
    m = build_uniform_mesh(4)
    assert np.allclose(m.nodes[:5, 1], -1.0)
    assert np.all(np.diff(m.nodes[:5, 0]) > 0)
    P = m.nodes[m.elements]
    cross = (P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1]) - (P[:, 1, 1] - P[:, 0, 1]) * (P[:, 2, 0] - P[:, 0, 0])
    assert np.all(cross > 0)


def test_boundary_flags():
    m = build_uniform_mesh(4)
    assert m.boundary_nodes.sum() == 16
    assert len(m.free_nodes) == 9


@pytest.mark.parametrize("N", [1, 0, -3])
def test_rejects_small(N):
    with pytest.raises(ValueError):
        build_uniform_mesh(N)


def test_dump(tmp_path):
    m = build_uniform_mesh(2)
    path = tmp_path / "mesh.txt"
    m.dump(path)
    lines = path.read_text().splitlines()
    assert sum(l.startswith("node ") for l in lines) == 9
    assert sum(l.startswith("element ") for l in lines) == 8
