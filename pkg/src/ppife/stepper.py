"""Backward Euler time stepping on the evolving IFE spaces."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import (
    SystemMatrices,
    assemble_cross_mass,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    default_sigma,
)
from .basis import build_bases
from .errors import PPIFEError
from .geometry import classify
from .linalg import condition_number_estimate
from .mesh import Mesh, build_uniform_mesh
from .projections import boundary_values, elliptic_projection, solve_dirichlet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    t_final: float
    n_steps: int

    def __post_init__(self):
        if self.t_final <= 0 or self.n_steps < 1:
            raise ValueError("time grid needs t_final > 0 and at least one step")

    @property
    def tau(self) -> float:
        return self.t_final / self.n_steps

    def time(self, n: int) -> float:
        return n * self.tau


@dataclass
class StepRecord:
    step: int
    t: float
    l2_norm: float
    residual: float
    lambda_min: float | None = None
    lambda_max: float | None = None
    cond: float | None = None


@dataclass
class SolutionHistory:
    mesh: Mesh
    grid: TimeGrid
    sigma: float
    coefficients: list = field(default_factory=list)  # full nodal vectors
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    final_state: object = None
    final_bases: dict | None = None

    @property
    def final(self) -> np.ndarray:
        return self.coefficients[-1]


class StepFailure(PPIFEError):
    def __init__(self, step, cause):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause


def step_matrices(mesh, state_old, state_new, bases_old, bases_new, beta, sigma, f=None, t=None) -> SystemMatrices:
    A = assemble_stiffness(mesh, state_new, bases_new, beta, sigma)
    M = assemble_mass(mesh, state_new, bases_new)
    C = assemble_cross_mass(mesh, state_old, state_new, bases_old, bases_new, beta)
    F = assemble_load(mesh, state_new, bases_new, f, t) if f is not None else None
    return SystemMatrices(A=A, M=M, C=C, F=F, dof_count=len(mesh.free_nodes))


def run(
    problem,
    N: int,
    grid: TimeGrid | None = None,
    sigma: float | None = None,
    initial: np.ndarray | None = None,
    levelset=None,
    with_source: bool = True,
    emit_cond: bool = False,
    keep: str = "final",
    on_step: Callable[[StepRecord], None] | None = None,
    mesh: Mesh | None = None,
    strict_geometry: bool = False,
) -> SolutionHistory:
    """Solve ``(M + tau A) u^n = C u^{n-1} + tau F`` for n = 1..n_steps.

    ``initial`` (full nodal vector) replaces the elliptic projection of the exact
    initial value.  Boundary nodes carry the exact solution's trace at each step.
    ``keep`` is ``"final"`` or ``"all"`` (store every coefficient vector and state).
    """
    mesh = mesh or build_uniform_mesh(N)
    grid = grid or TimeGrid(1.0, N * N)
    beta = problem.beta
    sigma = default_sigma(beta) if sigma is None else sigma
    ls = levelset or problem.levelset
    tau = grid.tau
    free = mesh.free_nodes

    state = classify(mesh, ls, 0.0, strict_geometry)
    bases = build_bases(mesh, state, beta)
    if initial is None:
        u = elliptic_projection(mesh, state, bases, problem, 0.0, sigma).coefficients
    else:
        u = np.array(initial, dtype=float)
    hist = SolutionHistory(mesh, grid, sigma)
    hist.coefficients.append(u.copy())
    if keep == "all":
        hist.states.append(state)

    for n in range(1, grid.n_steps + 1):
        t = grid.time(n)
        try:
            new_state = classify(mesh, ls, t, strict_geometry)
            new_bases = build_bases(mesh, new_state, beta)
            mats = step_matrices(mesh, state, new_state, bases, new_bases, beta, sigma,
                                 problem.f if with_source else None, t)
            K = (mats.M + tau * mats.A).tocsr()
            rhs = mats.C @ u
            if mats.F is not None:
                rhs = rhs + tau * mats.F
            g = boundary_values(mesh, new_state, problem, t)
            u, res = solve_dirichlet(K, rhs, g, free)
            rec = StepRecord(n, t, float(np.sqrt(max(u @ (mats.M @ u), 0.0))), res)
            if emit_cond:
                lmin, lmax, cond = condition_number_estimate(K[free][:, free])
                rec.lambda_min, rec.lambda_max, rec.cond = lmin, lmax, cond
        except PPIFEError as exc:
            raise StepFailure(n, exc) from exc
        hist.records.append(rec)
        if on_step is not None:
            on_step(rec)
        if keep == "all":
            hist.coefficients.append(u.copy())
            hist.states.append(new_state)
        elif len(hist.coefficients) == 1:
            hist.coefficients.append(u.copy())
        else:
            hist.coefficients[-1] = u.copy()
        state, bases = new_state, new_bases
    hist.final_state, hist.final_bases = state, bases
    return hist
