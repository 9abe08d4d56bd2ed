import json
import math

import numpy as np
import pytest

from wsnloc.network import Point2, true_distance
from wsnloc.sdr import (
    ConicProblem,
    anchor_selector,
    assemble_problem,
    connectivity_weight,
    pack_symmetric,
    packed_index,
    packed_size,
    pair_selector,
    quad_form,
    quad_form_coeffs,
    regularizer_spec,
    unpack_symmetric,
)
from wsnloc.simulate import ChannelParams, Edge, MeasurementSet, make_measurements, measurement_rng, generate_scenario


def block_matrix(x):
    """The (N+2) x (N+2) block [[X^T X, X^T], [X, I]] for a 2xN position matrix."""
    x = np.asarray(x, dtype=float)
    n = x.shape[1]
    d = np.zeros((n + 2, n + 2))
    d[:n, :n] = x.T @ x
    d[:n, n:] = x.T
    d[n:, :n] = x
    d[n:, n:] = np.eye(2)
    return d


def test_pair_selector_values():
    assert np.array_equal(pair_selector(0, 1, 3), [1, -1, 0, 0, 0])
    assert np.array_equal(pair_selector(1, 0, 2), [-1, 1, 0, 0])
    with pytest.raises(IndexError):
        pair_selector(0, 3, 3)
    with pytest.raises(IndexError):
        pair_selector(1, 1, 3)


def test_anchor_selector_values():
    assert np.array_equal(anchor_selector(0, Point2(1, 1), 1), [1, -1, -1])
    with pytest.raises(IndexError):
        anchor_selector(2, Point2(0, 0), 2)
    # zero anchor: the form reduces to the Y diagonal entry
    x = np.array([[0.4], [0.7]])
    d = block_matrix(x)
    assert abs(quad_form(d, anchor_selector(0, Point2(0, 0), 1)) - d[0, 0]) < 1e-15


def test_quad_form_basics():
    assert quad_form(np.eye(4), pair_selector(0, 1, 2)) == 2.0
    assert quad_form(np.eye(4), np.zeros(4)) == 0.0
    with pytest.raises(ValueError):
        quad_form(np.eye(3), np.zeros(4))


def test_selector_identities_random():
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        x = rng.normal(size=(2, n))
        d = block_matrix(x)
        if n >= 2:
            i, j = rng.choice(n, size=2, replace=False)
            want = float(np.sum((x[:, i] - x[:, j]) ** 2))
            got = quad_form(d, pair_selector(int(i), int(j), n))
            assert abs(got - want) <= 1e-12
        i = int(rng.integers(n))
        a = Point2(*rng.normal(size=2))
        want = float(np.sum((x[:, i] - np.asarray(a)) ** 2))
        got = quad_form(d, anchor_selector(i, a, n))
        assert abs(got - want) <= 1e-12


def test_connectivity_weight_table():
    assert connectivity_weight(0.2) == 0.0
    assert connectivity_weight(0.3) == 0.0  # boundary goes to the zero branch
    assert connectivity_weight(0.3 + 1e-9) == 0.01
    assert connectivity_weight(0.5) == 0.01
    assert abs(connectivity_weight(0.6) - 0.055) < 1e-15
    assert connectivity_weight(0.7) == 0.1
    assert connectivity_weight(0.9) == 0.1


def test_connectivity_weight_shape():
    grid = np.linspace(0.0, 1.0, 1001)
    vals = [connectivity_weight(float(c)) for c in grid]
    assert all(0.0 <= v <= 0.1 for v in vals)
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    # continuous above the low threshold
    for c in np.linspace(0.31, 0.999, 200):
        assert abs(connectivity_weight(float(c) + 1e-9) - connectivity_weight(float(c))) < 1e-8


def two_node_measurements():
    return MeasurementSet(
        edges=[Edge(0, 1, "uu", 0.3), Edge(0, 0, "ua", 0.2)],
        n=2, m=1, anchors_reported=[(0.1, 0.2)], d_max=0.5,
    )


def test_regularizer_spec_complement():
    spec = regularizer_spec(two_node_measurements(), kappa=0.1)
    assert spec.non_edge_lu_pairs == ()
    assert spec.non_edge_anchor_pairs == ((1, 0),)
    with pytest.raises(ValueError):
        regularizer_spec(two_node_measurements(), kappa=-0.1)


def test_regularizer_spec_counts_random():
    params = ChannelParams()
    for seed in range(4):
        sc = generate_scenario(7, 3, params, seed)
        meas = make_measurements(sc, params, measurement_rng(seed))
        spec = regularizer_spec(meas, kappa=0.05)
        total_pairs = 7 * 6 // 2 + 7 * 3
        assert len(spec.non_edge_lu_pairs) + len(spec.non_edge_anchor_pairs) == total_pairs - len(meas.edges)


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(13)
    for dim in (1, 2, 5, 9):
        a = rng.normal(size=(dim, dim))
        sym = (a + a.T) / 2
        packed = pack_symmetric(sym)
        assert packed.size == packed_size(dim)
        assert np.array_equal(unpack_symmetric(packed, dim), sym)
    assert packed_index(0, 0) == 0
    assert packed_index(2, 1) == packed_index(1, 2)


def test_quad_form_coeffs_match_quad_form():
    rng = np.random.default_rng(14)
    dim = 6
    a = rng.normal(size=(dim, dim))
    sym = (a + a.T) / 2
    packed = pack_symmetric(sym)
    for _ in range(20):
        v = rng.normal(size=dim)
        via_coeffs = sum(c * packed[k] for k, c in quad_form_coeffs(v).items())
        assert abs(via_coeffs - quad_form(sym, v)) < 1e-10


def test_assemble_problem_structure():
    meas = two_node_measurements()
    prob = assemble_problem(meas, kappa=0.1)
    assert prob.num_scalar_vars == 2
    assert prob.psd_dim == 4
    # two inequality rows per edge plus three pinned equalities
    senses = [c.sense for c in prob.constraints]
    assert senses.count("ge") == 4 and senses.count("eq") == 3
    assert prob.pinned == ((2, 2, 1.0), (3, 3, 1.0), (3, 2, 0.0))
    # every epigraph variable sits in exactly two inequality constraints
    for e in range(prob.num_scalar_vars):
        hits = [c for c in prob.constraints if c.sense == "ge" and e in c.coeffs]
        assert len(hits) == 2
    # the single non-edge pair contributes negative objective weight on the block
    assert prob.objective[: prob.num_scalar_vars].tolist() == [1.0, 1.0]
    assert prob.objective[prob.num_scalar_vars:].min() < 0

    plain = assemble_problem(meas, kappa=0.0)
    assert not plain.objective[plain.num_scalar_vars:].any()

    with pytest.raises(ValueError):
        assemble_problem(MeasurementSet(edges=[], n=1, m=1, anchors_reported=[(0, 0)], d_max=0.5), 0.0)
    with pytest.raises(ValueError):
        assemble_problem(meas, kappa=-1.0)


def test_assemble_problem_zero_at_truth():
    params = ChannelParams(sigma_db=0.0, epsilon=0.0)
    sc = generate_scenario(6, 3, params, seed=4)
    meas = make_measurements(sc, params, measurement_rng(4))
    prob = assemble_problem(meas, kappa=0.0)
    d = block_matrix(np.asarray(sc.unknowns).T)
    t = np.zeros(prob.num_scalar_vars)
    assert abs(prob.objective_at(t, d)) < 1e-12
    assert prob.max_violation(t, d) < 1e-12


def test_debug_dump_deterministic_and_parseable():
    prob = assemble_problem(two_node_measurements(), kappa=0.01)
    text = prob.dumps_debug()
    doc = json.loads(text)
    assert doc["num_scalar_vars"] == 2
    assert doc["psd_dim"] == 4
    assert len(doc["constraints"]) == 7
    assert text == assemble_problem(two_node_measurements(), kappa=0.01).dumps_debug()
