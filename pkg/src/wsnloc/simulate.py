"""Deployment and measurement simulator.

Generates random connected deployments on the unit square, RSS-derived
distance estimates corrupted by log-normal shadowing, and anchor positions
perturbed by scaled Gaussian offsets.  All randomness is derived from an
integer seed through named substreams, so every output is reproducible
bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .network import NeighborSets, Point2, Scenario, is_fully_connected, neighbor_sets, true_distance

# Substream keys: one independent stream per deployment attempt, one for
# the measurement noise of the accepted deployment.
_DEPLOY_STREAM = 0
_MEASURE_STREAM = 1

DEFAULT_MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class ChannelParams:
    """Radio and error model parameters.

    Defaults are the typical experiment values: path-loss exponent 3,
    shadowing std 3.5 dB, anchor error scale 0.01 m, ranging limit 0.5 m.
    """

    gamma_p: float = 3.0
    sigma_db: float = 3.5
    epsilon: float = 0.01
    d_max: float = 0.5

    def __post_init__(self):
        if not self.gamma_p > 0:
            raise ValueError("gamma_p must be positive")
        if self.sigma_db < 0:
            raise ValueError("sigma_db must be nonnegative")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not self.d_max > 0:
            raise ValueError("d_max must be positive")


class Edge(NamedTuple):
    """One measured pair: kind is "uu" (LU-LU) or "ua" (LU-anchor).

    For "uu", i and j are LU indices with i < j; for "ua", i is the LU index
    and j the anchor index.  Indices are 0-based.
    """

    i: int
    j: int
    kind: str
    dbar: float


@dataclass(frozen=True)
class MeasurementSet:
    """Everything an estimator is allowed to see for one trial."""

    edges: tuple[Edge, ...]
    n: int
    m: int
    anchors_reported: tuple[Point2, ...]
    d_max: float

    def __post_init__(self):
        object.__setattr__(
            self, "anchors_reported", tuple(Point2(float(p[0]), float(p[1])) for p in self.anchors_reported)
        )
        object.__setattr__(self, "edges", tuple(Edge(int(e[0]), int(e[1]), str(e[2]), float(e[3])) for e in self.edges))
        seen = set()
        for e in self.edges:
            if e.kind not in ("uu", "ua"):
                raise ValueError(f"unknown edge kind {e.kind!r}")
            if not e.dbar > 0:
                raise ValueError(f"nonpositive distance estimate on edge {e}")
            if e.kind == "uu":
                if not (0 <= e.i < self.n and 0 <= e.j < self.n) or e.i == e.j:
                    raise ValueError(f"LU-LU edge endpoints out of range: {e}")
                key = ("uu", min(e.i, e.j), max(e.i, e.j))
            else:
                if not (0 <= e.i < self.n and 0 <= e.j < self.m):
                    raise ValueError(f"LU-anchor edge endpoints out of range: {e}")
                key = ("ua", e.i, e.j)
            if key in seen:
                raise ValueError(f"duplicate edge for pair {key}")
            seen.add(key)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d_max": self.d_max,
            "anchors_reported": [[p.x, p.y] for p in self.anchors_reported],
            "edges": [{"i": e.i, "j": e.j, "kind": e.kind, "dbar": e.dbar} for e in self.edges],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MeasurementSet":
        return cls(
            edges=tuple(Edge(e["i"], e["j"], e["kind"], e["dbar"]) for e in obj["edges"]),
            n=int(obj["n"]),
            m=int(obj["m"]),
            anchors_reported=obj["anchors_reported"],
            d_max=float(obj["d_max"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def _deploy_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(_DEPLOY_STREAM, attempt)))


def measurement_rng(seed: int) -> np.random.Generator:
    """The noise stream paired with generate_scenario(seed)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(_MEASURE_STREAM,)))


def perturb_anchor(a: Point2, epsilon: float, rng: np.random.Generator) -> Point2:
    """Reported anchor position: true position plus a scaled Gaussian offset.

    Draws a standard normal radius factor and an isotropic angle, so the
    offset has zero mean and expected squared norm epsilon^2.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    r = rng.normal()
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return Point2(a[0] + epsilon * r * math.cos(theta), a[1] + epsilon * r * math.sin(theta))


def fade_distance(d: float, params: ChannelParams, rng: np.random.Generator) -> float:
    """Distance estimate under log-normal shadowing.

    The dB-domain fading gain is Normal(0, sigma_db^2); the estimate is
    d * 10^(gain / (10 * gamma_p)).  Always positive for positive d.
    """
    if not d > 0:
        raise ValueError("true distance must be positive")
    alpha = rng.normal(0.0, params.sigma_db)
    return d * 10.0 ** (alpha / (10.0 * params.gamma_p))


def generate_scenario(
    n: int,
    m: int,
    params: ChannelParams,
    seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> Scenario:
    """Draw a connected deployment of n LU and m anchor nodes on [0,1]^2.

    Positions are i.i.d. uniform.  Deployments whose union graph is not a
    single connected component are rejected and redrawn from the next
    substream, so acceptance does not bias the point process locally.
    Reported anchor positions are perturbed with scale params.epsilon.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    for attempt in range(max_attempts):
        rng = _deploy_rng(seed, attempt)
        unknowns = [Point2(*p) for p in rng.uniform(size=(n, 2))]
        anchors = [Point2(*p) for p in rng.uniform(size=(m, 2))]
        scenario = Scenario(
            unknowns=unknowns,
            anchors_true=anchors,
            anchors_reported=anchors,
            d_max=params.d_max,
            seed=seed,
        )
        sets = neighbor_sets(scenario)
        if not is_fully_connected(sets, n, m):
            continue
        reported = [perturb_anchor(a, params.epsilon, rng) for a in anchors]
        return replace(scenario, anchors_reported=tuple(reported))
    raise RuntimeError(
        f"cannot generate connected network: n={n} m={m} d_max={params.d_max} "
        f"seed={seed} after {max_attempts} attempts"
    )


def make_measurements(scenario: Scenario, params: ChannelParams, rng: np.random.Generator) -> MeasurementSet:
    """Fading-corrupted distance estimates for every neighbor pair.

    Each unordered pair gets exactly one fading draw, so the estimate is
    symmetric.  Edge order is fixed (LU-LU pairs by index, then LU-anchor
    pairs) to keep the draw sequence reproducible.
    """
    sets = neighbor_sets(scenario)
    edges = []
    for a in range(scenario.n):
        for b in sorted(sets.lu_lu[a]):
            if b <= a:
                continue
            d = true_distance(scenario.unknowns[a], scenario.unknowns[b])
            edges.append(Edge(a, b, "uu", fade_distance(d, params, rng)))
    for a in range(scenario.n):
        for k in sorted(sets.lu_anchor[a]):
            d = true_distance(scenario.unknowns[a], scenario.anchors_true[k])
            edges.append(Edge(a, k, "ua", fade_distance(d, params, rng)))
    return MeasurementSet(
        edges=tuple(edges),
        n=scenario.n,
        m=scenario.m,
        anchors_reported=scenario.anchors_reported,
        d_max=scenario.d_max,
    )


def simulate_trial(n: int, m: int, params: ChannelParams, seed: int) -> tuple[Scenario, MeasurementSet]:
    """Generate one deployment plus its measurements from a single seed."""
    scenario = generate_scenario(n, m, params, seed)
    meas = make_measurements(scenario, params, measurement_rng(seed))
    return scenario, meas


def measured_neighbor_sets(meas: MeasurementSet) -> NeighborSets:
    """Neighbor sets as reconstructed from an edge list alone.

    This is what an estimator can observe; for measurements produced by
    make_measurements it coincides with the true-position sets.
    """
    lu = [set() for _ in range(meas.n)]
    la = [set() for _ in range(meas.n)]
    for e in meas.edges:
        if e.kind == "uu":
            lu[e.i].add(e.j)
            lu[e.j].add(e.i)
        else:
            la[e.i].add(e.j)
    return NeighborSets(
        lu_lu=tuple(frozenset(s) for s in lu),
        lu_anchor=tuple(frozenset(s) for s in la),
    )
