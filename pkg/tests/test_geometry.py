import math

import numpy as np
import pytest

from conftest import linear_levelset
from ppife.benchmarks import make_problem
from ppife.errors import GeometryViolation
from ppife.geometry import INTERFACE, MINUS, PLUS, LevelSet, bisect_edges, classify, cut_element
from ppife.mesh import build_uniform_mesh
from ppife.quadrature import signed_area


def test_line_n2_interface_column():
    m = build_uniform_mesh(2)
    ls = make_problem("line").levelset
    st = classify(m, ls, 0.0)
    # sign scan at the nine nodes: x = 1 is the only plus column
    P = m.nodes[m.elements]
    straddle = (P[..., 0].min(axis=1) < math.pi / 5) & (P[..., 0].max(axis=1) > math.pi / 5)
    assert set(st.interface_elements) == set(np.flatnonzero(straddle))
    assert np.all(P[st.interface_elements, :, 0].min(axis=1) >= 0.0)
    assert len(st.interface_elements) == 4


def test_all_plus_element():
    m = build_uniform_mesh(4)
    st = classify(m, linear_levelset(c=-2.0), 0.0)
    assert np.all(st.element_class == PLUS)
    assert not st.cuts and len(st.interface_edges) == 0


def test_circle_n10_matches_sign_scan():
    m = build_uniform_mesh(10)
    ls = make_problem("circle").levelset
    st = classify(m, ls, 0.0)
    count = 0
    for tri in m.elements:
        vals = ls.phi(m.nodes[tri, 0], m.nodes[tri, 1], 0.0)
        count += bool((vals > 0).any() and (vals < 0).any())
    assert len(st.interface_elements) == count


@pytest.mark.parametrize("name", ["line", "circle", "ellipse"])
@pytest.mark.parametrize("t", [0.0, 0.21, 0.5])
def test_cut_invariants(name, t):
    m = build_uniform_mesh(16)
    ls = make_problem(name).levelset
    st = classify(m, ls, t)
    assert set(st.cuts) == set(st.interface_elements)
    for e, cut in st.cuts.items():
        verts = m.nodes[m.elements[e]]
        assert cut.cut_edges[0] != cut.cut_edges[1]
        for k, p in zip(cut.cut_edges, (cut.D, cut.E)):
            a, b = verts[k], verts[(k + 1) % 3]
            s = np.dot(p - a, b - a) / np.dot(b - a, b - a)
            assert -1e-15 <= s <= 1 + 1e-15
            assert np.linalg.norm(a + s * (b - a) - p) < 1e-15
        area = abs(signed_area(cut.minus_polygon)) + abs(signed_area(cut.plus_polygon))
        assert abs(area - m.areas[e]) < 1e-12
        assert abs(np.linalg.norm(cut.normal) - 1.0) < 1e-14
        assert abs(np.dot(cut.normal, cut.E - cut.D)) < 1e-14
        cp = cut.plus_polygon.mean(axis=0)
        assert np.dot(cp - cut.D, cut.normal) > 0


def test_interface_edges_definition():
    m = build_uniform_mesh(8)
    st = classify(m, make_problem("circle").levelset, 0.3)
    expected = set()
    for k, (t1, t2) in enumerate(m.edge_to_elements):
        if t2 >= 0 and (st.element_class[t1] == INTERFACE or st.element_class[t2] == INTERFACE):
            expected.add(k)
    assert set(st.interface_edges.tolist()) == expected
    assert set(st.cut_edges(m).tolist()) <= expected


def test_linear_cut_points_exact():
    # oblique line 0.6 x + 0.8 y = 0.1234
    ls = linear_levelset(c=0.1234, a=0.6, b=0.8)
    m = build_uniform_mesh(8)
    st = classify(m, ls, 0.0)
    for cut in st.cuts.values():
        for p in (cut.D, cut.E):
            assert abs(0.6 * p[0] + 0.8 * p[1] - 0.1234) < 1e-13
    # closed-form edge/line intersection on one element
    e = int(st.interface_elements[0])
    single = cut_element(m, e, ls, 0.0)
    for k, p in zip(single.cut_edges, (single.D, single.E)):
        a, b = m.nodes[m.elements[e][k]], m.nodes[m.elements[e][(k + 1) % 3]]
        s = (0.1234 - 0.6 * a[0] - 0.8 * a[1]) / (0.6 * (b[0] - a[0]) + 0.8 * (b[1] - a[1]))
        assert np.linalg.norm(p - (a + s * (b - a))) < 1e-13


def test_cut_element_rejects_uncut():
    m = build_uniform_mesh(4)
    with pytest.raises(GeometryViolation):
        cut_element(m, 0, linear_levelset(c=5.0), 0.0)


def test_sign_flip_symmetry():
    m = build_uniform_mesh(8)
    ls = make_problem("ellipse").levelset
    a = classify(m, ls, 0.3)
    b = classify(m, ls.negated(), 0.3)
    assert np.array_equal(a.element_class, -b.element_class)
    assert np.array_equal(a.interface_edges, b.interface_edges)
    for e in a.cuts:
        assert np.allclose(a.cuts[e].normal, -b.cuts[e].normal)


def test_vertex_snapping_pushes_plus():
    m = build_uniform_mesh(4)
    # line through the node column x = 0 exactly
    st = classify(m, linear_levelset(c=0.0), 0.0)
    on_line = np.abs(m.nodes[:, 0]) < 1e-15
    assert np.all(st.vertex_signs[on_line] == PLUS)
    assert len(st.interface_elements) == 0 or all(
        (st.vertex_signs[m.elements[e]] == MINUS).any() for e in st.interface_elements
    )


def test_double_crossing_detection():
    # a circle bulging across the edge y = -0.5 between x = -0.5 and 0 of an N = 4 mesh
    ls = LevelSet(
        phi=lambda x, y, t: (x + 0.25) ** 2 + (y + 0.5 - 0.05) ** 2 - 0.1**2 + 0.0 * t,
        grad_phi=lambda x, y, t: (2 * (x + 0.25), 2 * (y + 0.45)),
    )
    m = build_uniform_mesh(4)
    with pytest.raises(GeometryViolation) as err:
        classify(m, ls, 0.0, strict=True)
    assert err.value.time == 0.0
    relaxed = classify(m, ls, 0.0)
    assert len(relaxed.interface_elements) == 0


def test_bisection_precision():
    ls = make_problem("circle").levelset
    s = bisect_edges(ls, [[0.0, 0.0]], [[1.0, 0.0]], 0.0, [MINUS], [PLUS])[0]
    x = s
    assert abs(ls.phi(np.array(x), np.array(0.0), 0.0)) <= 1e-13 * 1.0


def test_circle_area_second_order():
    ls = make_problem("circle").levelset
    exact = math.pi * (math.pi / 6) ** 2
    errs = []
    for N in (8, 16, 32):
        m = build_uniform_mesh(N)
        st = classify(m, ls, 0.0)
        area = m.areas[st.element_class == MINUS].sum()
        area += sum(abs(signed_area(c.minus_polygon)) for c in st.cuts.values())
        errs.append(abs(area - exact))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(rates) > 1.5
