import numpy as np
import pytest
import scipy.sparse as sp

from ppife.assembly import assemble_mass, assemble_stiffness
from ppife.basis import build_bases
from ppife.benchmarks import make_problem
from ppife.errors import MaxIterations, NotPositiveDefinite
from ppife.geometry import classify
from ppife.linalg import condition_number_estimate, dense_eigenvalues, extreme_eigenvalues, solve_dense, solve_spd
from ppife.mesh import build_uniform_mesh


def test_identity_and_diagonal():
    b = np.arange(1.0, 6.0)
    assert np.allclose(solve_spd(sp.identity(5, format="csr"), b), b)
    assert np.allclose(solve_spd(sp.diags([2.0, 4.0]).tocsr(), np.array([2.0, 4.0])), [1.0, 1.0])


def test_random_spd_vs_dense():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((50, 50))
    A = B.T @ B + np.eye(50)
    b = rng.standard_normal(50)
    x = solve_spd(sp.csr_matrix(A), b)
    assert np.abs(x - solve_dense(A, b)).max() < 1e-10 * np.abs(x).max()


def test_zero_rhs():
    assert not solve_spd(sp.identity(3, format="csr"), np.zeros(3)).any()


def test_indefinite_detected():
    with pytest.raises(NotPositiveDefinite):
        solve_spd(sp.diags([1.0, -1.0, 2.0]).tocsr(), np.ones(3))


def test_iteration_cap():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((60, 60))
    A = sp.csr_matrix(B.T @ B + 1e-6 * np.eye(60))
    with pytest.raises(MaxIterations):
        solve_spd(A, rng.standard_normal(60), max_iter=3)


def test_cond_trivial():
    assert condition_number_estimate(sp.identity(10, format="csr"))[2] == pytest.approx(1.0, rel=1e-12)
    assert condition_number_estimate(sp.diags([1.0, 10.0]).tocsr())[2] == pytest.approx(10.0, rel=1e-10)


def test_cond_vs_dense_oracle():
    N = 8
    m = build_uniform_mesh(N)
    prob = make_problem("circle")
    st = classify(m, prob.levelset, 0.0)
    bases = build_bases(m, st, prob.beta)
    K = assemble_mass(m, st, bases) + (1.0 / N**2) * assemble_stiffness(m, st, bases, prob.beta)
    f = m.free_nodes
    K = K.tocsr()[f][:, f]
    lmin, lmax, cond = condition_number_estimate(K)
    ev = dense_eigenvalues(K)
    assert lmin == pytest.approx(ev[0], rel=1e-4)
    assert lmax == pytest.approx(ev[-1], rel=1e-4)
    assert cond == pytest.approx(ev[-1] / ev[0], rel=1e-4)


def test_extreme_eigenvalues_deterministic():
    A = sp.diags(np.linspace(1.0, 7.0, 200)).tocsr()
    assert extreme_eigenvalues(A) == extreme_eigenvalues(A)
