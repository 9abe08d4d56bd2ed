"""Network geometry: deployments, ranging-limited neighbor sets, connectivity.

A deployment has N location-unaware (LU) nodes at unknown positions and M
location-aware (LA) anchor nodes whose reported positions may be perturbed.
Two nodes can range against each other only when their true distance is at
most ``d_max``; the neighbor sets built here define the measurement graph.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple


class Point2(NamedTuple):
    """A 2-D position in meters."""

    x: float
    y: float


def _as_points(pts: Iterable) -> tuple[Point2, ...]:
    out = tuple(Point2(float(p[0]), float(p[1])) for p in pts)
    for p in out:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise ValueError(f"non-finite coordinate: {p}")
    return out


def true_distance(p: Point2, q: Point2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p[0] - q[0], p[1] - q[1])


@dataclass(frozen=True)
class Scenario:
    """Ground truth for one deployment: true positions, reported anchors, ranging radius.

    ``anchors_reported`` is what an estimator gets to see; ``unknowns`` and
    ``anchors_true`` are simulator-side knowledge used to build neighbor sets
    and to score estimates.
    """

    unknowns: tuple[Point2, ...]
    anchors_true: tuple[Point2, ...]
    anchors_reported: tuple[Point2, ...]
    d_max: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "unknowns", _as_points(self.unknowns))
        object.__setattr__(self, "anchors_true", _as_points(self.anchors_true))
        object.__setattr__(self, "anchors_reported", _as_points(self.anchors_reported))
        if len(self.unknowns) < 1:
            raise ValueError("need at least one LU node")
        if len(self.anchors_true) < 1:
            raise ValueError("need at least one anchor")
        if len(self.anchors_true) != len(self.anchors_reported):
            raise ValueError("anchors_true and anchors_reported lengths differ")
        if not self.d_max > 0:
            raise ValueError("d_max must be positive")

    @property
    def n(self) -> int:
        return len(self.unknowns)

    @property
    def m(self) -> int:
        return len(self.anchors_true)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d_max": self.d_max,
            "seed": self.seed,
            "unknowns": [[p.x, p.y] for p in self.unknowns],
            "anchors_true": [[p.x, p.y] for p in self.anchors_true],
            "anchors_reported": [[p.x, p.y] for p in self.anchors_reported],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Scenario":
        sc = cls(
            unknowns=obj["unknowns"],
            anchors_true=obj["anchors_true"],
            anchors_reported=obj["anchors_reported"],
            d_max=float(obj["d_max"]),
            seed=int(obj["seed"]),
        )
        if sc.n != int(obj["n"]) or sc.m != int(obj["m"]):
            raise ValueError("scenario JSON: n/m fields disagree with list lengths")
        return sc

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class NeighborSets:
    """Per-LU-node neighbor sets under the ranging limit.

    ``lu_lu[n]`` holds indices of LU nodes within range of LU node n (never n
    itself); ``lu_anchor[n]`` holds anchor indices within range of n.  All
    indices are 0-based.
    """

    lu_lu: tuple[frozenset, ...]
    lu_anchor: tuple[frozenset, ...]

    @property
    def n(self) -> int:
        return len(self.lu_lu)

    def degree_sum(self) -> int:
        return sum(len(s) for s in self.lu_lu) + sum(len(s) for s in self.lu_anchor)


def neighbor_sets(scenario: Scenario) -> NeighborSets:
    """Build neighbor sets from true positions.

    A pair is a neighbor pair iff its true distance is <= d_max (boundary
    included).  Membership is decided from true positions only; estimators
    receive the resulting edge list, never the positions.
    """
    n, m = scenario.n, scenario.m
    lu = [set() for _ in range(n)]
    la = [set() for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if true_distance(scenario.unknowns[a], scenario.unknowns[b]) <= scenario.d_max:
                lu[a].add(b)
                lu[b].add(a)
        for k in range(m):
            if true_distance(scenario.unknowns[a], scenario.anchors_true[k]) <= scenario.d_max:
                la[a].add(k)
    return NeighborSets(
        lu_lu=tuple(frozenset(s) for s in lu),
        lu_anchor=tuple(frozenset(s) for s in la),
    )


def connectivity_measure(sets: NeighborSets, n: int, m: int) -> float:
    """Normalized neighbor count of the LU nodes, in [0, 1).

    Sums |lu_lu[k]| + |lu_anchor[k]| over all LU nodes and divides by
    n^2 + n*m.  The denominator counts self-pairs, so the measure stays
    below 1 even for a complete graph.
    """
    return sets.degree_sum() / (n * n + n * m)


def is_fully_connected(sets: NeighborSets, n: int, m: int) -> bool:
    """True iff the union graph on all n + m nodes is one connected component.

    Anchors are vertices n..n+m-1; they connect only through LU nodes.
    """
    adjacency = [[] for _ in range(n + m)]
    for a in range(n):
        for b in sets.lu_lu[a]:
            adjacency[a].append(b)
        for k in sets.lu_anchor[a]:
            adjacency[a].append(n + k)
            adjacency[n + k].append(a)
    seen = [False] * (n + m)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n + m
