"""End-to-end position estimation from a measurement set.

Two methods share the same relaxation: "proposed" weights the spread
regularizer by the observed connectivity, "plain" runs the unregularized
baseline (weight zero).  Everything here consumes only the measurement
set, never ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .network import Point2, connectivity_measure, is_fully_connected
from .sdr import assemble_problem, connectivity_weight
from .simulate import MeasurementSet, measured_neighbor_sets
from .solver import SolverError, SolverOptions, extract_positions, solve, tightness

METHODS = ("proposed", "plain")


@dataclass(frozen=True)
class LocalizationResult:
    positions: tuple[Point2, ...]
    connectivity: float
    kappa_used: float
    objective: float
    tightness: float
    method: str

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "C": self.connectivity,
            "kappa": self.kappa_used,
            "objective": self.objective,
            "tightness": self.tightness,
            "positions": [[p.x, p.y] for p in self.positions],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LocalizationResult":
        return cls(
            positions=tuple(Point2(float(p[0]), float(p[1])) for p in obj["positions"]),
            connectivity=float(obj["C"]),
            kappa_used=float(obj["kappa"]),
            objective=float(obj["objective"]),
            tightness=float(obj["tightness"]),
            method=str(obj["method"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def localize(meas: MeasurementSet, method: str = "proposed", opts: SolverOptions | None = None) -> LocalizationResult:
    """Estimate all LU positions from one measurement set.

    The connectivity measure is computed from the measured edges, which is
    all a deployed estimator can see.  Raises ValueError on a disconnected
    measurement graph and SolverError if the conic solve fails.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    sets = measured_neighbor_sets(meas)
    if not is_fully_connected(sets, meas.n, meas.m):
        raise ValueError("measurement graph is disconnected; localization needs one connected component")
    connectivity = connectivity_measure(sets, meas.n, meas.m)
    kappa = connectivity_weight(connectivity) if method == "proposed" else 0.0

    problem = assemble_problem(meas, kappa)
    sol = solve(problem, opts)
    if not sol.ok:
        raise SolverError(
            f"conic solve failed for method={method} n={meas.n} m={meas.m} "
            f"kappa={kappa:.4g}: {sol.message}"
        )
    return LocalizationResult(
        positions=tuple(extract_positions(sol, meas.n)),
        connectivity=connectivity,
        kappa_used=kappa,
        objective=sol.objective_value,
        tightness=tightness(sol, meas.n),
        method=method,
    )
