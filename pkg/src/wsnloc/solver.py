"""Interior-point solution of the assembled conic problem.

The problem is handed to cvxopt's cone LP solver in the standard form
min c'x s.t. Gx + s = h with s in (nonnegative orthant) x (PSD cone),
Ax = b.  The packed PSD entries of the problem map one-to-one onto a
full symmetric matrix slack, so a single PSD constraint on the block
realizes the relaxation.  Statuses are re-derived from our own residual
checks rather than trusted blindly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from cvxopt import matrix as cvx_matrix
from cvxopt import solvers as cvx_solvers

from .network import Point2
from .sdr import ConicProblem, packed_index, unpack_symmetric

# Residual bounds for accepting a solution the engine could not polish to
# full tolerance ("near-optimal").
NEAR_OPTIMAL_VIOLATION = 1e-6
NEAR_OPTIMAL_GAP = 1e-4

OPTIMAL = "optimal"
NEAR_OPTIMAL = "near-optimal"
FAILED = "failed"


class SolverError(RuntimeError):
    """Raised when a caller needs a solution and the solve failed."""


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not (self.feas_tol > 0 and self.gap_tol > 0 and self.max_iter > 0):
            raise ValueError("solver options must be positive")


@dataclass(frozen=True)
class ConicSolution:
    """Solver output: optimal PSD block, epigraph values, diagnostics."""

    status: str
    objective_value: float
    psd_block: np.ndarray | None
    scalar_vars: np.ndarray | None
    solver_status: str = ""
    relative_gap: float = float("nan")
    max_violation: float = float("nan")
    min_eigenvalue: float = float("nan")
    message: str = field(default="", compare=False)

    @property
    def ok(self) -> bool:
        return self.status != FAILED


def _standard_form(problem: ConicProblem):
    """cvxopt conelp data (c, G, h, dims, A, b) for the problem."""
    k = problem.num_scalar_vars
    dim = problem.psd_dim
    nx = problem.num_vars

    ge = [c for c in problem.constraints if c.sense == "ge"]
    eq = [c for c in problem.constraints if c.sense == "eq"]

    # a'x >= r  becomes  -a'x + s = -r with s >= 0
    gl = np.zeros((len(ge), nx))
    hl = np.zeros(len(ge))
    for r, con in enumerate(ge):
        for idx, c in con.coeffs.items():
            gl[r, idx] = -c
        hl[r] = -con.rhs

    # s_psd = vec(D(x)) must lie in the PSD cone: G_s x + s_psd = 0
    gs = np.zeros((dim * dim, nx))
    for i in range(dim):
        for j in range(dim):
            gs[j * dim + i, k + packed_index(i, j)] = -1.0

    a_eq = np.zeros((len(eq), nx))
    b_eq = np.zeros(len(eq))
    for r, con in enumerate(eq):
        for idx, c in con.coeffs.items():
            a_eq[r, idx] = c
        b_eq[r] = con.rhs

    c_vec = np.asarray(problem.objective, dtype=float)
    g = np.vstack([gl, gs])
    h = np.concatenate([hl, np.zeros(dim * dim)])
    dims = {"l": len(ge), "q": [], "s": [dim]}
    return c_vec, g, h, dims, a_eq, b_eq


def solve(problem: ConicProblem, opts: SolverOptions | None = None) -> ConicSolution:
    """Solve the conic problem and classify the result.

    "optimal" requires the engine to report convergence at the requested
    gap and feasibility tolerances; a solution with small but not fully
    polished residuals is returned as "near-optimal".  Anything else,
    including an unbounded objective (possible for extreme regularizer
    weights on sparse graphs), comes back "failed" with a message and no
    variables.  The problem itself is always primal feasible, so a
    "failed" status signals a numerical condition, never bad input.
    """
    opts = opts or SolverOptions()
    c_vec, g, h, dims, a_eq, b_eq = _standard_form(problem)
    options = {
        "show_progress": False,
        "abstol": opts.gap_tol,
        "reltol": opts.gap_tol,
        "feastol": opts.feas_tol,
        "maxiters": opts.max_iter,
    }
    try:
        raw = cvx_solvers.conelp(
            cvx_matrix(c_vec),
            cvx_matrix(g),
            cvx_matrix(h),
            dims=dims,
            A=cvx_matrix(a_eq),
            b=cvx_matrix(b_eq),
            options=options,
        )
    except (ArithmeticError, ValueError) as exc:
        return ConicSolution(
            status=FAILED, objective_value=float("nan"), psd_block=None, scalar_vars=None,
            solver_status="exception", message=f"conic engine raised: {exc}",
        )

    raw_status = raw["status"]
    if raw["x"] is None or raw_status in ("primal infeasible", "dual infeasible"):
        reason = "objective unbounded below" if raw_status == "dual infeasible" else f"engine status {raw_status!r}"
        return ConicSolution(
            status=FAILED, objective_value=float("nan"), psd_block=None, scalar_vars=None,
            solver_status=raw_status, message=reason,
        )

    x = np.asarray(raw["x"]).ravel()
    k = problem.num_scalar_vars
    scalars = x[:k]
    psd_block = unpack_symmetric(x[k:], problem.psd_dim)
    objective_value = float(c_vec @ x)
    violation = problem.max_violation(scalars, psd_block)
    min_eig = float(np.linalg.eigvalsh(psd_block).min())
    rel_gap = raw.get("relative gap")
    rel_gap = float("nan") if rel_gap is None else float(rel_gap)

    if raw_status == "optimal" and violation <= NEAR_OPTIMAL_VIOLATION and min_eig >= -NEAR_OPTIMAL_VIOLATION:
        status = OPTIMAL
        message = ""
    elif violation <= NEAR_OPTIMAL_VIOLATION and min_eig >= -NEAR_OPTIMAL_VIOLATION and (
        np.isnan(rel_gap) or rel_gap <= NEAR_OPTIMAL_GAP
    ):
        status = NEAR_OPTIMAL
        message = f"engine stopped with status {raw_status!r}; residuals acceptable"
    else:
        return ConicSolution(
            status=FAILED, objective_value=float("nan"), psd_block=None, scalar_vars=None,
            solver_status=raw_status, relative_gap=rel_gap, max_violation=violation,
            min_eigenvalue=min_eig,
            message=f"engine status {raw_status!r} with violation {violation:.2e}, min eig {min_eig:.2e}",
        )

    return ConicSolution(
        status=status,
        objective_value=objective_value,
        psd_block=psd_block,
        scalar_vars=scalars,
        solver_status=raw_status,
        relative_gap=rel_gap,
        max_violation=violation,
        min_eigenvalue=min_eig,
        message=message,
    )


def extract_positions(sol: ConicSolution, n_unknowns: int) -> list[Point2]:
    """Positions of the LU nodes: the X block of the optimal matrix."""
    if not sol.ok:
        raise SolverError(f"no solution to extract positions from: {sol.message}")
    block = sol.psd_block
    return [Point2(float(block[n_unknowns, i]), float(block[n_unknowns + 1, i])) for i in range(n_unknowns)]


def tightness(sol: ConicSolution, n_unknowns: int) -> float:
    """trace(Y - X^T X) at the optimum; near zero means the relaxation is tight."""
    if not sol.ok:
        raise SolverError(f"no solution to compute tightness from: {sol.message}")
    block = sol.psd_block
    y = block[:n_unknowns, :n_unknowns]
    x = block[n_unknowns:, :n_unknowns]
    return float(np.trace(y) - np.trace(x.T @ x))
