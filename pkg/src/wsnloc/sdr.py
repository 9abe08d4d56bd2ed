"""Assembly of the localization problem as a conic program.

The nonconvex least-absolute-residual localization problem is relaxed to a
semidefinite program over one symmetric (N+2) x (N+2) block

    D = [[ Y,  X^T ],
         [ X,  I_2 ]]

where column k of X (2 x N) is the position of LU node k and Y stands in
for X^T X.  Requiring D >= 0 with the lower-right 2x2 block pinned to the
identity enforces Y >= X^T X by Schur complement.  Any squared distance
of interest is read out of D by a quadratic form with a sparse selector
vector:

    v = pair_selector(i, j):    v^T D v = Y_ii + Y_jj - 2 Y_ij   (~ ||x_i - x_j||^2)
    v = anchor_selector(i, a):  v^T D v = Y_ii - 2 a.x_i + ||a||^2  (~ ||x_i - a||^2)

Each measured edge contributes an epigraph variable bounding the absolute
residual between its quadratic form and the squared distance estimate.
A regularizer rewards large quadratic forms on NON-measured pairs, pushing
apart nodes that cannot hear each other; its weight is a piecewise function
of the network connectivity measure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .network import Point2
from .simulate import MeasurementSet

# Regularizer weight schedule: zero below C_LOW, a small constant up to
# C_MID, linear ramp up to C_HIGH, then the full weight.
WEIGHT_LOW = 0.01
WEIGHT_HIGH = 0.1
C_LOW = 0.3
C_MID = 0.5
C_HIGH = 0.7


def pair_selector(i: int, j: int, n_unknowns: int) -> np.ndarray:
    """Selector for the squared distance between LU nodes i and j (0-based)."""
    if not (0 <= i < n_unknowns and 0 <= j < n_unknowns):
        raise IndexError(f"LU index out of range: ({i}, {j}) with N={n_unknowns}")
    if i == j:
        raise IndexError("selector needs two distinct LU nodes")
    v = np.zeros(n_unknowns + 2)
    v[i] = 1.0
    v[j] = -1.0
    return v


def anchor_selector(i: int, anchor: Point2, n_unknowns: int) -> np.ndarray:
    """Selector for the squared distance between LU node i and a fixed anchor.

    The anchor coordinates enter negated so that the quadratic form expands
    to ||x_i - a||^2 when Y = X^T X.
    """
    if not 0 <= i < n_unknowns:
        raise IndexError(f"LU index out of range: {i} with N={n_unknowns}")
    v = np.zeros(n_unknowns + 2)
    v[i] = 1.0
    v[n_unknowns] = -anchor[0]
    v[n_unknowns + 1] = -anchor[1]
    return v


def quad_form(d_matrix: np.ndarray, v: np.ndarray) -> float:
    """v^T D v for a symmetric matrix D."""
    d_matrix = np.asarray(d_matrix, dtype=float)
    v = np.asarray(v, dtype=float)
    if d_matrix.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: D is {d_matrix.shape}, v has {v.size} entries")
    return float(v @ d_matrix @ v)


def connectivity_weight(c: float) -> float:
    """Regularizer weight as a function of the connectivity measure.

    Zero for poorly connected networks (c <= 0.3) where the regularizer
    would do more harm than good, 0.01 up to c = 0.5, interpolated linearly
    up to 0.1 at c = 0.7, and 0.1 beyond.
    """
    if c <= C_LOW:
        return 0.0
    if c <= C_MID:
        return WEIGHT_LOW
    if c <= C_HIGH:
        return WEIGHT_LOW + (WEIGHT_HIGH - WEIGHT_LOW) * (c - C_MID) / (C_HIGH - C_MID)
    return WEIGHT_HIGH


@dataclass(frozen=True)
class RegularizerSpec:
    """Non-measured pairs to be pushed apart, with the weight to apply."""

    non_edge_lu_pairs: tuple[tuple[int, int], ...]
    non_edge_anchor_pairs: tuple[tuple[int, int], ...]
    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")


def regularizer_spec(meas: MeasurementSet, kappa: float) -> RegularizerSpec:
    """Complement of the measured edges over all LU-LU and LU-anchor pairs."""
    measured_uu = {(min(e.i, e.j), max(e.i, e.j)) for e in meas.edges if e.kind == "uu"}
    measured_ua = {(e.i, e.j) for e in meas.edges if e.kind == "ua"}
    lu_pairs = tuple(
        (a, b) for a in range(meas.n) for b in range(a + 1, meas.n) if (a, b) not in measured_uu
    )
    anchor_pairs = tuple(
        (a, k) for a in range(meas.n) for k in range(meas.m) if (a, k) not in measured_ua
    )
    return RegularizerSpec(non_edge_lu_pairs=lu_pairs, non_edge_anchor_pairs=anchor_pairs, kappa=kappa)


# ---------------------------------------------------------------------------
# Conic standard form.
#
# Variables are ordered as: the scalar (epigraph) variables, then the packed
# lower triangle of the PSD block.  Entry (i, j) with i >= j sits at packed
# offset i*(i+1)/2 + j.  A linear-expression coefficient on a packed
# off-diagonal entry multiplies D[i, j] (== D[j, i]) once, so a quadratic
# form v^T D v carries coefficient 2*v_i*v_j there and v_i^2 on diagonals.
# ---------------------------------------------------------------------------


def packed_size(dim: int) -> int:
    return dim * (dim + 1) // 2


def packed_index(i: int, j: int) -> int:
    if i < j:
        i, j = j, i
    return i * (i + 1) // 2 + j


def pack_symmetric(d_matrix: np.ndarray) -> np.ndarray:
    """Lower triangle of a symmetric matrix in packed order."""
    dim = d_matrix.shape[0]
    out = np.empty(packed_size(dim))
    for i in range(dim):
        out[packed_index(i, 0) : packed_index(i, i) + 1] = d_matrix[i, : i + 1]
    return out


def unpack_symmetric(packed: np.ndarray, dim: int) -> np.ndarray:
    out = np.empty((dim, dim))
    for i in range(dim):
        row = packed[packed_index(i, 0) : packed_index(i, i) + 1]
        out[i, : i + 1] = row
        out[: i + 1, i] = row
    return out


def quad_form_coeffs(v: np.ndarray) -> dict[int, float]:
    """Packed-entry coefficients of the linear functional D -> v^T D v."""
    coeffs: dict[int, float] = {}
    nz = [int(i) for i in np.nonzero(v)[0]]
    for a, i in enumerate(nz):
        coeffs[packed_index(i, i)] = float(v[i] * v[i])
        for j in nz[:a]:
            coeffs[packed_index(i, j)] = float(2.0 * v[i] * v[j])
    return coeffs


@dataclass(frozen=True)
class LinearConstraint:
    """coeffs . vars (sense) rhs, with vars = scalars then packed PSD entries."""

    coeffs: dict[int, float]
    sense: str  # "eq" or "ge"
    rhs: float

    def __post_init__(self):
        if self.sense not in ("eq", "ge"):
            raise ValueError(f"unknown sense {self.sense!r}")

    def lhs_at(self, x: np.ndarray) -> float:
        return float(sum(c * x[k] for k, c in self.coeffs.items()))

    def violation(self, x: np.ndarray) -> float:
        lhs = self.lhs_at(x)
        if self.sense == "eq":
            return abs(lhs - self.rhs)
        return max(0.0, self.rhs - lhs)


@dataclass(frozen=True)
class ConicProblem:
    """Linear objective and linear constraints over scalars plus one PSD block.

    The full variable vector is [scalars, packed PSD entries]; the PSD block
    must additionally be positive semidefinite.  ``pinned`` records the PSD
    entries held fixed by equality constraints (the identity sub-block).
    """

    num_scalar_vars: int
    psd_dim: int
    objective: np.ndarray
    constraints: tuple[LinearConstraint, ...]
    pinned: tuple[tuple[int, int, float], ...]

    @property
    def num_vars(self) -> int:
        return self.num_scalar_vars + packed_size(self.psd_dim)

    def full_vector(self, scalars: np.ndarray, psd_block: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(scalars, dtype=float), pack_symmetric(np.asarray(psd_block, dtype=float))])

    def objective_at(self, scalars: np.ndarray, psd_block: np.ndarray) -> float:
        return float(self.objective @ self.full_vector(scalars, psd_block))

    def max_violation(self, scalars: np.ndarray, psd_block: np.ndarray) -> float:
        """Worst linear-constraint violation at a candidate point."""
        x = self.full_vector(scalars, psd_block)
        return max(c.violation(x) for c in self.constraints)

    def to_debug_dict(self) -> dict:
        return {
            "num_scalar_vars": self.num_scalar_vars,
            "psd_dim": self.psd_dim,
            "objective": [[k, c] for k, c in enumerate(self.objective.tolist()) if c != 0.0],
            "constraints": [
                {"sense": c.sense, "rhs": c.rhs, "terms": sorted([k, v] for k, v in c.coeffs.items())}
                for c in self.constraints
            ],
            "pinned": [[i, j, val] for i, j, val in self.pinned],
        }

    def dumps_debug(self) -> str:
        return json.dumps(self.to_debug_dict(), indent=2) + "\n"


def _edge_selector(edge, anchors_reported, n: int) -> np.ndarray:
    if edge.kind == "uu":
        return pair_selector(edge.i, edge.j, n)
    return anchor_selector(edge.i, anchors_reported[edge.j], n)


def assemble_problem(meas: MeasurementSet, kappa: float) -> ConicProblem:
    """Build the regularized relaxation for one measurement set.

    One epigraph scalar t_e per edge, constrained by t_e >= q_e - dbar^2 and
    t_e >= dbar^2 - q_e where q_e is the edge's quadratic form in the PSD
    block.  Objective: sum of t_e minus kappa times the quadratic forms of
    all non-measured pairs.  The anchor coordinates used are the reported
    ones; the lower-right 2x2 of the PSD block is pinned to the identity.
    """
    if not meas.edges:
        raise ValueError("measurement set has no edges")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    n = meas.n
    dim = n + 2
    k = len(meas.edges)
    objective = np.zeros(k + packed_size(dim))
    objective[:k] = 1.0

    if kappa > 0:
        reg = regularizer_spec(meas, kappa)
        for a, b in reg.non_edge_lu_pairs:
            for idx, c in quad_form_coeffs(pair_selector(a, b, n)).items():
                objective[k + idx] -= kappa * c
        for a, j in reg.non_edge_anchor_pairs:
            for idx, c in quad_form_coeffs(anchor_selector(a, meas.anchors_reported[j], n)).items():
                objective[k + idx] -= kappa * c

    constraints = []
    for e, edge in enumerate(meas.edges):
        q = quad_form_coeffs(_edge_selector(edge, meas.anchors_reported, n))
        target = edge.dbar * edge.dbar
        upper = {e: 1.0}
        lower = {e: 1.0}
        for idx, c in q.items():
            upper[k + idx] = -c
            lower[k + idx] = c
        # t_e - q_e >= -dbar^2 and t_e + q_e >= dbar^2 together give
        # t_e >= |q_e - dbar^2|.
        constraints.append(LinearConstraint(coeffs=upper, sense="ge", rhs=-target))
        constraints.append(LinearConstraint(coeffs=lower, sense="ge", rhs=target))

    pinned = ((n, n, 1.0), (n + 1, n + 1, 1.0), (n + 1, n, 0.0))
    for i, j, value in pinned:
        constraints.append(LinearConstraint(coeffs={k + packed_index(i, j): 1.0}, sense="eq", rhs=value))

    return ConicProblem(
        num_scalar_vars=k,
        psd_dim=dim,
        objective=objective,
        constraints=tuple(constraints),
        pinned=pinned,
    )
