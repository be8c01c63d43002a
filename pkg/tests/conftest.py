"""Shared fixtures: the reference networks used across the suite.

The heavyweight artifacts (equivalent-edge sweeps, long simulations) are
session-scoped so each is computed once; tests treat them as read-only.
"""

from pathlib import Path

import numpy as np
import pytest

from signet.edgefn import DeadZone, Linear, Negated, PowerSign, SampledTable
from signet.graph import Edge, Graph
from signet.network import NetworkSystem
from signet.nodes import Identity
from signet.sim import SimConfig, simulate
from signet import circuit

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

ELEVEN_W = [3, 2, 4, 1, 2, 1, 3, 2, 2, 1, 1, 1, 2]
ELEVEN_A = [0.4, 0.5, 0.2, 0.8, 0.4, 0.4, 0.5, 0.5, 0.5, 0.6, 0.8, 0.2, 0.5]
ELEVEN_EDGES = [
    (1, 1, 2), (2, 2, 3), (3, 3, 4), (4, 1, 5), (5, 1, 6), (6, 1, 7),
    (7, 2, 8), (8, 2, 9), (9, 3, 10), (10, 4, 11), (11, 5, 6), (12, 6, 7),
    (13, 8, 9),
]
ELEVEN_X0 = np.array([20, 4, -14, -22, 3, 8, 15, 13, 6, 1, -12], dtype=float)

SIX_EDGES = [
    (1, 1, 2), (2, 2, 3), (3, 3, 4), (4, 4, 5), (5, 1, 6),
    (6, 1, 3), (7, 2, 4), (8, 3, 5), (9, 2, 6),
]
SIX_X0 = np.array([3, 1, -3, -1, 0, -2], dtype=float)


@pytest.fixture(scope="session")
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture(scope="session")
def series_network() -> NetworkSystem:
    """Three-node chain: mu1 = zeta/2 and mu2 = zeta."""
    g = Graph(3, (Edge(1, 1, 2), Edge(2, 2, 3)))
    return NetworkSystem(g, [Identity()] * 3, [Linear(0.5), Linear(1.0)])


@pytest.fixture(scope="session")
def triangle_unit_network() -> NetworkSystem:
    g = Graph(3, (Edge(1, 1, 2), Edge(2, 2, 3), Edge(3, 1, 3)))
    return NetworkSystem(g, [Identity()] * 3, [Linear(1.0)] * 3)


def make_six_node(first_edge_fn):
    g = Graph(6, tuple(Edge(*e) for e in SIX_EDGES))
    fns = (
        [first_edge_fn]
        + [Linear(1.0)] * 4
        + [DeadZone(1.0, 1.0)] * 4
    )
    return NetworkSystem(g, [Identity()] * 6, fns)


@pytest.fixture(scope="session")
def six_agreement_network() -> NetworkSystem:
    return make_six_node(Linear(1.0))


@pytest.fixture(scope="session")
def six_clustering_network() -> NetworkSystem:
    return make_six_node(DeadZone(1.0, 1.0))


@pytest.fixture(scope="session")
def six_sim_cfg() -> SimConfig:
    return SimConfig(
        t_end=200.0, dt=1e-3, record_every=100,
        u_tol=1e-6, window=1.0, cluster_tol=1e-3,
    )


@pytest.fixture(scope="session")
def six_agreement_run(six_agreement_network, six_sim_cfg):
    return simulate(six_agreement_network, SIX_X0, six_sim_cfg)


@pytest.fixture(scope="session")
def six_clustering_run(six_clustering_network, six_sim_cfg):
    return simulate(six_clustering_network, SIX_X0, six_sim_cfg)


@pytest.fixture(scope="session")
def eleven_positive_network() -> NetworkSystem:
    g = Graph(11, tuple(Edge(*e) for e in ELEVEN_EDGES))
    fns = [PowerSign(w, a) for w, a in zip(ELEVEN_W, ELEVEN_A)]
    return NetworkSystem(g, [Identity()] * 11, fns)


@pytest.fixture(scope="session")
def eleven_table(eleven_positive_network):
    """Equivalent edge function of the positive eleven-node network, 1 <-> 4."""
    return circuit.equivalent_edge_function(
        eleven_positive_network, 1, 4, 100.0, 2001, check_preconditions=False
    )


def make_eleven_negative(psi_14):
    g = Graph(11, tuple(Edge(*e) for e in ELEVEN_EDGES) + (Edge(14, 1, 4),))
    fns = [PowerSign(w, a) for w, a in zip(ELEVEN_W, ELEVEN_A)] + [psi_14]
    return NetworkSystem(g, [Identity()] * 11, fns)


@pytest.fixture(scope="session")
def eleven_f1_network():
    return make_eleven_negative(Negated(Linear(0.05)))


@pytest.fixture(scope="session")
def eleven_f3_function(eleven_table):
    """Negated copy of the equivalent function, saturated at |zeta| = 9."""
    z = eleven_table.zetas
    clamped = np.interp(np.clip(z, -9.0, 9.0), z, eleven_table.mus)
    return Negated(SampledTable(tuple(z), tuple(clamped)))


@pytest.fixture(scope="session")
def eleven_f3_network(eleven_f3_function):
    return make_eleven_negative(eleven_f3_function)


@pytest.fixture(scope="session")
def eleven_f1_cfg():
    return SimConfig(
        t_end=60.0, dt=5e-4, record_every=200,
        u_tol=1.0, window=10.0, cluster_tol=0.01,
    )


@pytest.fixture(scope="session")
def eleven_f3_cfg():
    return SimConfig(
        t_end=150.0, dt=1e-3, record_every=100,
        u_tol=0.5, window=80.0, cluster_tol=0.05,
    )


@pytest.fixture(scope="session")
def eleven_f1_run(eleven_f1_network, eleven_f1_cfg):
    return simulate(eleven_f1_network, ELEVEN_X0, eleven_f1_cfg)


@pytest.fixture(scope="session")
def eleven_f3_run(eleven_f3_network, eleven_f3_cfg):
    return simulate(eleven_f3_network, ELEVEN_X0, eleven_f3_cfg)
