"""Jacobi-preconditioned conjugate gradients and extreme eigenvalue estimates."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import MaxIterations, NotPositiveDefinite

DENSE_LIMIT = 400


def solve_spd(A, b, rel_tol: float = 1e-12, x0=None, max_iter: int | None = None) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    The returned ``x`` satisfies ``||A x - b|| <= rel_tol * ||b||``.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    if max_iter is None:
        max_iter = 50 * max(n, 1)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n)
    diag = A.diagonal() if sp.issparse(A) else np.diag(A)
    if (diag <= 0).any():
        raise NotPositiveDefinite("nonpositive diagonal entry")
    inv_d = 1.0 / diag
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    z = inv_d * r
    p = z.copy()
    rz = r @ z
    target = rel_tol * bnorm
    for _ in range(max_iter):
        if np.linalg.norm(r) <= target:
            # recurrence drift guard: confirm with the true residual
            r = b - A @ x
            if np.linalg.norm(r) <= target:
                return x
            z = inv_d * r
            p = z.copy()
            rz = r @ z
        Ap = A @ p
        curv = p @ Ap
        if curv <= 0.0:
            raise NotPositiveDefinite(f"negative curvature {curv:.3e} in conjugate gradients")
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Ap
        z = inv_d * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    if np.linalg.norm(b - A @ x) <= target:
        return x
    raise MaxIterations(f"conjugate gradients did not reach {rel_tol:g} in {max_iter} iterations")


def solve_dense(A, b) -> np.ndarray:
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    return np.linalg.solve(A, b)


def _start_vector(n):
    v = np.ones(n)
    # break symmetry so the start is not orthogonal to structured eigenvectors
    v += 0.5 * np.cos(np.arange(n) * 1.618033988749895)
    return v / np.linalg.norm(v)


def extreme_eigenvalues(A, tol: float = 1e-6, max_iter: int | None = None):
    """``(lambda_min, lambda_max)`` of symmetric ``A`` (Lanczos, full reorthogonalization).

    An end is converged once its Ritz residual bound drops below ``tol``
    relative, or once its Ritz value stalls (relative change below ``tol / 100``).
    """
    n = A.shape[0]
    if n == 1:
        val = float(A.toarray()[0, 0]) if sp.issparse(A) else float(np.asarray(A)[0, 0])
        return val, val
    max_iter = min(n if max_iter is None else max_iter, n)
    Q = np.zeros((n, max_iter + 1))
    alphas, betas = [], []
    Q[:, 0] = _start_vector(n)
    prev = None
    for j in range(max_iter):
        w = A @ Q[:, j]
        a = float(Q[:, j] @ w)
        w -= a * Q[:, j]
        if j:
            w -= betas[-1] * Q[:, j - 1]
        for _ in range(2):
            w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        alphas.append(a)
        bnext = float(np.linalg.norm(w))
        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        theta, S = np.linalg.eigh(T)
        lo, hi = float(theta[0]), float(theta[-1])
        if bnext <= 1e-14 * max(abs(lo), abs(hi)):
            return lo, hi
        if prev is not None and j >= 4:
            ok_lo = bnext * abs(S[-1, 0]) <= tol * abs(lo) or abs(lo - prev[0]) <= 1e-2 * tol * abs(lo)
            ok_hi = bnext * abs(S[-1, -1]) <= tol * abs(hi) or abs(hi - prev[1]) <= 1e-2 * tol * abs(hi)
            if ok_lo and ok_hi:
                return lo, hi
        prev = (lo, hi)
        betas.append(bnext)
        Q[:, j + 1] = w / bnext
    return lo, hi


def condition_number_estimate(A, tol: float = 1e-6):
    """``(lambda_min, lambda_max, cond)`` for SPD ``A``."""
    lmin, lmax = extreme_eigenvalues(A, tol)
    if lmin <= 0.0:
        raise NotPositiveDefinite(f"smallest eigenvalue estimate {lmin:.3e} is not positive")
    return lmin, lmax, lmax / lmin


def dense_eigenvalues(A):
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    if A.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dense oracle limited to dimension {DENSE_LIMIT}")
    return np.linalg.eigvalsh(A)
