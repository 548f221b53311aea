"""Plain continuous P1 backward Euler, written without the package's assembly code."""

import numpy as np


def p1_matrices(nodes, elements, beta=1.0):
    n = len(nodes)
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for tri in elements:
        P = nodes[tri]
        B = np.array([[P[1, 0] - P[0, 0], P[2, 0] - P[0, 0]], [P[1, 1] - P[0, 1], P[2, 1] - P[0, 1]]])
        area = 0.5 * abs(np.linalg.det(B))
        # reference gradients mapped by the inverse transpose Jacobian
        G = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]) @ np.linalg.inv(B)
        K[np.ix_(tri, tri)] += beta * area * G @ G.T
        M[np.ix_(tri, tri)] += area / 12.0 * (np.ones((3, 3)) + np.eye(3))
    return K, M


def affine_load(nodes, elements, fvals):
    """Exact (f, phi_i) for f affine on each element, given nodal values of f."""
    F = np.zeros(len(nodes))
    for tri in elements:
        P = nodes[tri]
        area = 0.5 * abs((P[1, 0] - P[0, 0]) * (P[2, 1] - P[0, 1]) - (P[2, 0] - P[0, 0]) * (P[1, 1] - P[0, 1]))
        fv = fvals[tri]
        F[tri] += area / 12.0 * (fv + fv.sum())
    return F


def backward_euler(nodes, elements, boundary, u_exact, grad_exact, f, t_final, n_steps, beta=1.0):
    """Dense P1 backward Euler with Dirichlet data from ``u_exact(x, y, t)``.

    The initial value is the Ritz projection of ``u_exact(., 0)``, with
    ``grad_exact`` assumed affine so the centroid rule is exact.
    """
    K, M = p1_matrices(nodes, elements, beta)
    free = ~boundary
    x, y = nodes[:, 0], nodes[:, 1]

    r = np.zeros(len(nodes))
    for tri in elements:
        P = nodes[tri]
        B = np.array([[P[1, 0] - P[0, 0], P[2, 0] - P[0, 0]], [P[1, 1] - P[0, 1], P[2, 1] - P[0, 1]]])
        area = 0.5 * abs(np.linalg.det(B))
        G = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]) @ np.linalg.inv(B)
        c = P.mean(axis=0)
        g = np.array(grad_exact(c[0], c[1], 0.0))
        r[tri] += beta * area * G @ g

    u = u_exact(x, y, 0.0)
    u[free] = np.linalg.solve(K[np.ix_(free, free)], r[free] - K[np.ix_(free, boundary)] @ u[boundary])
    tau = t_final / n_steps
    S = M + tau * K
    for n in range(1, n_steps + 1):
        t = n * tau
        rhs = M @ u + tau * affine_load(nodes, elements, f(x, y, t))
        new = u_exact(x, y, t)
        new[free] = np.linalg.solve(S[np.ix_(free, free)], rhs[free] - S[np.ix_(free, boundary)] @ new[boundary])
        u = new
    return u
