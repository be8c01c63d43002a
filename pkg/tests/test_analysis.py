"""Convergence predictors, distance bounds, and the linear eigen oracle."""

import numpy as np
import pytest

from signet.analysis import (
    Verdict,
    classify_edges,
    cluster_count_prediction,
    distance_bounds,
    equilibria_membership,
    equivalent_passivity_condition,
    network_linear_weights,
    predict,
    signed_laplacian_min_eigenvalue,
    strict_extremum_violations,
)
from signet.circuit import effective_resistance
from signet.edgefn import DeadZone, GridSpec, Linear, Negated, SampledTable
from signet.errors import Inapplicable, NonLinearEdges, NotAnInterval
from signet.graph import Edge, Graph
from signet.network import NetworkSystem
from signet.nodes import Identity
from signet.sim import OutcomeKind, SimConfig, classify_outcome, simulate

GRID = GridSpec(100.0, 2001)
COARSE = GridSpec(100.0, 401)


def series_plus_closing(w_neg):
    g = Graph(3, (Edge(1, 1, 2), Edge(2, 2, 3), Edge(3, 1, 3)))
    return NetworkSystem(
        g, [Identity()] * 3, [Linear(0.5), Linear(1.0), Linear(w_neg)]
    )


def test_predict_spanning_strictly_positive(six_agreement_network):
    pred = predict(six_agreement_network, GRID)
    assert pred.verdict is Verdict.AGREEMENT_GUARANTEED
    assert pred.applied_result == "spanning-strictly-positive-subnetwork"


def test_predict_all_strictly_positive(eleven_positive_network):
    pred = predict(eleven_positive_network, GRID)
    assert pred.verdict is Verdict.AGREEMENT_GUARANTEED
    assert pred.applied_result == "strictly-positive-network"


def test_predict_positive_network_without_spanning_core(six_clustering_network):
    pred = predict(six_clustering_network, GRID)
    assert pred.verdict is Verdict.CONVERGENCE_GUARANTEED
    assert pred.applied_result == "positive-network"


def test_predict_weak_negative_edge_agreement():
    pred = predict(series_plus_closing(-0.25), GRID, eq_samples=401)
    assert pred.verdict is Verdict.AGREEMENT_GUARANTEED
    assert pred.applied_result == "strict-equivalent-passivity"


def test_predict_boundary_weight_gives_cluster_counts():
    pred = predict(series_plus_closing(-1 / 3), GRID, eq_samples=401)
    assert pred.verdict is Verdict.CLUSTER_COUNT_PREDICTION
    assert pred.applied_result == "single-cycle-cluster-count"
    assert pred.cluster_counts == frozenset({1, 3})


def test_predict_strong_negative_edge_no_guarantee():
    pred = predict(series_plus_closing(-0.5), GRID, eq_samples=401)
    assert pred.verdict is Verdict.NO_GUARANTEE


def test_strong_negative_edge_diverges_in_simulation():
    # past the threshold the linear eigen oracle goes negative and the
    # simulated outputs blow up
    net = series_plus_closing(-0.5)
    cfg = SimConfig(t_end=120.0, dt=1e-2, record_every=100, u_tol=1e-9,
                    window=1.0, cluster_tol=1e-3, blowup_threshold=1e6)
    tr = simulate(net, np.array([3.0, 1.0, 0.0]), cfg)
    assert classify_outcome(net, tr, cfg).kind is OutcomeKind.DIVERGENCE


def test_predict_eleven_node_variants(
    eleven_f1_network, eleven_f3_network, eleven_positive_network
):
    pred1 = predict(eleven_f1_network, COARSE, eq_samples=401)
    assert pred1.verdict is Verdict.AGREEMENT_GUARANTEED
    assert pred1.applied_result == "strict-equivalent-passivity"

    from conftest import make_eleven_negative

    pred2 = predict(make_eleven_negative(Negated(Linear(1.0))), COARSE, eq_samples=401)
    assert pred2.verdict is Verdict.NO_GUARANTEE

    pred3 = predict(eleven_f3_network, COARSE, eq_samples=401)
    assert pred3.verdict is Verdict.CLUSTER_COUNT_PREDICTION
    assert pred3.cluster_counts == frozenset({1, 4})
    assert pred3.certificates["cycle_length"] == 4


def test_predict_cycle_separated_non_strict_edges():
    # two weak negative edges whose cycles share a node but no edge; the
    # per-edge equivalent condition applies to each separately
    edges = [(1, 1, 2), (2, 2, 3), (3, 3, 1), (4, 3, 4), (5, 4, 5), (6, 5, 3)]
    g = Graph(5, tuple(Edge(*e) for e in edges))
    fns = [Linear(1.0), Linear(1.0), Negated(Linear(0.05)),
           Linear(1.0), Linear(1.0), Negated(Linear(0.05))]
    net = NetworkSystem(g, [Identity()] * 5, fns)
    pred = predict(net, GRID, eq_samples=201)
    assert pred.verdict is Verdict.CONVERGENCE_GUARANTEED
    assert pred.applied_result == "cycle-separated-equivalent-passivity"
    assert len(pred.certificates["conditions"]) == 2


def test_equivalent_passivity_condition_linear_margins(series_network):
    rep = equivalent_passivity_condition(series_network, Linear(-0.25), 1, 3,
                                         100.0, 401)
    assert rep.holds and rep.strict
    np.testing.assert_allclose(rep.margin, rep.zetas**2 / 12.0, atol=1e-8)

    rep0 = equivalent_passivity_condition(series_network, Linear(-1 / 3), 1, 3,
                                          100.0, 401)
    assert rep0.holds and not rep0.strict
    assert np.max(np.abs(rep0.margin)) <= 1e-9 * (1 + rep0.zetas.max() ** 2)

    rep_bad = equivalent_passivity_condition(series_network, Linear(-0.5), 1, 3,
                                             100.0, 401)
    assert not rep_bad.holds


def test_distance_bounds_single_dead_zone_edge():
    g = Graph(2, (Edge(1, 1, 2),))
    net = NetworkSystem(g, [Identity()] * 2, [DeadZone(1.0, 1.0)])
    assert distance_bounds(net, 1, 2) == (-1.0, 1.0)
    assert distance_bounds(net, 2, 1) == (-1.0, 1.0)


def test_distance_bounds_linear_path_forces_equality():
    # two parallel routes; the all-linear one pins the difference to zero
    g = Graph(3, (Edge(1, 1, 2), Edge(2, 2, 3), Edge(3, 1, 3)))
    net = NetworkSystem(
        g, [Identity()] * 3, [Linear(1.0), Linear(1.0), DeadZone(1.0, 1.0)]
    )
    assert distance_bounds(net, 1, 3) == (0.0, 0.0)


def test_distance_bounds_series_dead_zones_with_simulation():
    g = Graph(3, (Edge(1, 1, 2), Edge(2, 2, 3)))
    net = NetworkSystem(
        g, [Identity()] * 3, [DeadZone(1.0, 1.0), DeadZone(1.0, 1.0)]
    )
    assert distance_bounds(net, 1, 3) == (-2.0, 2.0)
    cfg = SimConfig(t_end=100.0, dt=1e-3, record_every=100, u_tol=1e-9,
                    window=1.0, cluster_tol=1e-3)
    tr = simulate(net, np.array([4.0, 0.0, -4.0]), cfg)
    diff = tr.final_state[0] - tr.final_state[2]
    assert -2.0 - cfg.cluster_tol <= diff <= 2.0 + cfg.cluster_tol


def test_distance_bounds_respects_orientation():
    # edge stored 2 -> 1 with an asymmetric zero interval
    table = SampledTable((-1.0, -0.5, 0.0, 2.0, 3.0), (-1.0, 0.0, 0.0, 0.0, 1.0))
    g = Graph(2, (Edge(1, 2, 1),))
    net = NetworkSystem(g, [Identity()] * 2, [table])
    lo, hi = distance_bounds(net, 1, 2)
    # y1 - y2 = -zeta, zeta in [-0.5, 2] => difference in [-2, 0.5]
    assert (lo, hi) == (-2.0, 0.5)
    assert distance_bounds(net, 2, 1) == (-0.5, 2.0)


def test_distance_bounds_propagates_not_an_interval():
    from signet.edgefn import Sinusoid

    g = Graph(2, (Edge(1, 1, 2),))
    net = NetworkSystem(g, [Identity()] * 2, [Sinusoid(1.0)])
    with pytest.raises(NotAnInterval):
        distance_bounds(net, 1, 2)


def test_cluster_count_prediction_eleven(eleven_f3_network):
    info = cluster_count_prediction(eleven_f3_network, 14, COARSE)
    assert info.counts == frozenset({1, 4})


def test_cluster_count_prediction_boundary_triangle_matches_simulation():
    net = series_plus_closing(-1 / 3)
    info = cluster_count_prediction(net, 3, GRID)
    assert info.counts == frozenset({1, 3})
    cfg = SimConfig(t_end=120.0, dt=2e-3, record_every=100, u_tol=1e-9,
                    window=1.0, cluster_tol=1e-3)
    # start away from the boundary equilibrium so the run is a real test
    tr = simulate(net, np.array([4.0, 0.0, -1.0]), cfg)
    out = classify_outcome(net, tr, cfg)
    assert out.kind is OutcomeKind.CLUSTERING
    assert len(out.clusters) == 3


def test_cluster_count_prediction_inapplicable_cases():
    # negative edge on two cycles
    edges = [(1, 1, 2), (2, 2, 3), (3, 1, 3), (4, 1, 4), (5, 4, 3)]
    g = Graph(4, tuple(Edge(*e) for e in edges))
    fns = [Linear(1.0)] * 2 + [Negated(Linear(0.1))] + [Linear(1.0)] * 2
    net = NetworkSystem(g, [Identity()] * 4, fns)
    with pytest.raises(Inapplicable):
        cluster_count_prediction(net, 3, GRID)
    # more than one non-strictly-positive edge
    net2 = NetworkSystem(
        g, [Identity()] * 4,
        [DeadZone(1.0, 1.0), Linear(1.0), Negated(Linear(0.1)),
         Linear(1.0), Linear(1.0)],
    )
    with pytest.raises(Inapplicable):
        cluster_count_prediction(net2, 3, GRID)


def test_eigen_oracle_values(triangle_unit_network):
    tri = triangle_unit_network.graph
    assert signed_laplacian_min_eigenvalue(tri, [1.0, 1.0, 1.0]) == pytest.approx(3.0)
    assert abs(signed_laplacian_min_eigenvalue(tri, [0.5, 1.0, -1 / 3])) <= 1e-9
    assert signed_laplacian_min_eigenvalue(tri, [0.5, 1.0, -0.5]) < -1e-3


def test_network_linear_weights(six_agreement_network):
    net = series_plus_closing(-0.25)
    np.testing.assert_allclose(network_linear_weights(net), [0.5, 1.0, -0.25])
    with pytest.raises(NonLinearEdges):
        network_linear_weights(six_agreement_network)


def test_condition_agrees_with_eigen_oracle_on_random_linear_networks():
    # strict <=> positive restricted eigenvalue, holds <=> nonnegative
    rng = np.random.default_rng(77)
    for _ in range(100):
        n = int(rng.integers(3, 9))
        edges = [(int(rng.integers(1, v)), v) for v in range(2, n + 1)]
        pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)
                 if (a, b) not in edges]
        rng.shuffle(pairs)
        edges += pairs[: int(rng.integers(0, 3))]
        spare = [pq for pq in pairs if pq not in edges]
        if not spare:
            continue
        p, q = spare[0]
        w = rng.uniform(0.1, 5.0, size=len(edges))
        g = Graph(n, tuple(Edge(i + 1, a, b) for i, (a, b) in enumerate(edges)))
        net = NetworkSystem(g, [Identity()] * n, [Linear(float(v)) for v in w])
        r = effective_resistance(g, w, p, q)
        factor = float(rng.choice([0.3, 0.7, 1.0, 1.4, 2.5]))
        w_neg = -factor / r
        rep = equivalent_passivity_condition(net, Linear(w_neg), p, q, 50.0, 21)
        g_full = Graph(
            n, g.edges + (Edge(len(edges) + 1, p, q),)
        )
        lam = signed_laplacian_min_eigenvalue(g_full, np.append(w, w_neg))
        if lam > 1e-9:
            assert rep.holds and rep.strict
        elif lam < -1e-9:
            assert not rep.holds
        else:
            assert rep.holds and not rep.strict


def test_prediction_soundness_on_agreement_configs(
    six_agreement_network, eleven_f1_network
):
    # every configuration promised agreement must actually agree from
    # arbitrary starts
    rng = np.random.default_rng(99)
    cases = [
        (six_agreement_network,
         SimConfig(t_end=60.0, dt=1e-2, record_every=50, u_tol=1e-6,
                   window=1.0, cluster_tol=1e-3)),
        (series_plus_closing(-0.25),
         SimConfig(t_end=120.0, dt=5e-3, record_every=100, u_tol=1e-7,
                   window=1.0, cluster_tol=1e-3)),
        # no early stop here: with finite-time edges the input norm dips
        # below any high tolerance long before slow stragglers settle, so
        # the run goes to a horizon that covers the worst-case settle time
        (eleven_f1_network,
         SimConfig(t_end=25.0, dt=2e-3, record_every=100, u_tol=1e-9,
                   window=1.0, cluster_tol=0.01)),
    ]
    for net, cfg in cases:
        for _ in range(20):
            x0 = rng.uniform(-10, 10, size=net.node_count)
            tr = simulate(net, x0, cfg)
            out = classify_outcome(net, tr, cfg)
            assert out.kind is OutcomeKind.AGREEMENT
            assert out.spread < cfg.cluster_tol


def test_equilibria_membership_and_minmax_on_clustering_run(
    six_clustering_network, six_clustering_run, six_sim_cfg
):
    net = six_clustering_network
    zeta = net.tension(six_clustering_run.final_state)
    member = equilibria_membership(net, zeta, six_sim_cfg.cluster_tol)
    assert all(m is True for m in member)
    classes = classify_edges(net, GridSpec(10.0, 1001))
    sp = [e.id for e, c in zip(net.graph.edges, classes) if c.is_strictly_positive]
    assert strict_extremum_violations(
        net, six_clustering_run.final_state, sp, six_sim_cfg.cluster_tol
    ) == []


def test_final_differences_within_distance_bounds(
    six_clustering_network, six_clustering_run, six_sim_cfg
):
    final = six_clustering_run.final_state
    tol = six_sim_cfg.cluster_tol
    for i in range(1, 7):
        for j in range(i + 1, 7):
            lo, hi = distance_bounds(six_clustering_network, i, j)
            assert lo - tol <= final[i - 1] - final[j - 1] <= hi + tol
