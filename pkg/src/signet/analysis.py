"""Convergence predictors: decide, before simulating, what a network will do.

The dispatcher tries the strongest applicable sufficient condition and
returns a verdict with the certificates that back it:

* a connected spanning subnetwork of strictly positive edges guarantees
  agreement of all outputs;
* an all-positive network always converges, possibly into clusters;
* with exactly one non-strictly-positive edge, passivity of that edge
  function plus the equivalent edge function of the remaining strictly
  positive two-terminal network guarantees convergence (agreement when the
  sum is strictly passive), and a unique cycle through the edge pins the
  possible cluster counts to {1, cycle length};
* several non-strictly-positive edges are handled the same way when no two
  of them share a cycle.

All passivity tests are grid tests with recorded grids; verdicts are
certificates over the grid, not symbolic proofs.  Failure of every
hypothesis yields NoGuarantee, never a divergence claim: the sufficient
conditions say nothing about what happens when they fail (the linear
eigenvalue oracle is the exception, and is exposed separately).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import edgefn as ef
from .circuit import EquivalentEdgeTable, equivalent_edge_function
from .errors import (
    CapExceeded,
    Inapplicable,
    NonLinearEdges,
    ValidationError,
)
from .graph import (
    Graph,
    Path,
    all_simple_paths,
    connected_components,
    cycles_through_edge,
    edge_subgraph,
    incidence,
)
from .network import NetworkSystem

_STRICTNESS_TOL = 1e-9


class Verdict(enum.Enum):
    AGREEMENT_GUARANTEED = "agreement_guaranteed"
    CONVERGENCE_GUARANTEED = "convergence_guaranteed"
    CLUSTER_COUNT_PREDICTION = "cluster_count_prediction"
    NO_GUARANTEE = "no_guarantee"


@dataclass(frozen=True)
class PassivityConditionReport:
    """Grid evaluation of s(z) = (psi_hat(z) + equivalent(z)) * z.

    ``holds`` means s >= -1e-9 at every sample; ``strict`` additionally
    requires s > 0 away from a 1e-9 neighborhood of the origin.
    """

    holds: bool
    strict: bool
    zetas: np.ndarray
    margin: np.ndarray
    table: EquivalentEdgeTable


@dataclass(frozen=True)
class CycleClusterCount:
    """Possible steady cluster counts for a single-cycle negative edge."""

    counts: frozenset[int]
    cycle: Path


@dataclass(frozen=True)
class Prediction:
    verdict: Verdict
    applied_result: str
    cluster_counts: Optional[frozenset[int]] = None
    certificates: dict = field(default_factory=dict)


def classify_edges(
    system: NetworkSystem, grid: ef.GridSpec
) -> tuple[ef.SignClass, ...]:
    """Sign class of every edge function on the given grid."""
    return tuple(ef.classify_sign(f, grid) for f in system.edge_functions)


def positive_subnetwork(
    system: NetworkSystem, keep_edge_ids: Sequence[int]
) -> tuple[NetworkSystem, dict[int, int]]:
    """Subsystem on the given edges (same nodes); raises if disconnected."""
    sub, id_map = edge_subgraph(system.graph, keep_edge_ids)
    fns = [system.edge_functions[old - 1] for old in sorted(id_map)]
    return NetworkSystem(sub, system.node_dynamics, fns), id_map


def equivalent_passivity_condition(
    positive_part: NetworkSystem,
    psi_hat: ef.EdgeFunction,
    p: int,
    q: int,
    half_width: float = 100.0,
    samples: int = 2001,
    table: Optional[EquivalentEdgeTable] = None,
) -> PassivityConditionReport:
    """Test passivity of psi_hat plus the two-terminal equivalent function.

    The equivalent edge function of the remaining network between p and q is
    sampled over [-half_width, half_width]; the report carries the margin
    curve s(z) = (psi_hat(z) + equivalent(z)) * z on that grid.  Passing a
    precomputed ``table`` (for the same network and terminals) skips the
    sweep.
    """
    if table is None:
        table = equivalent_edge_function(
            positive_part, p, q, half_width, samples, check_preconditions=False
        )
    zetas = table.zetas
    hat_vals = np.array([psi_hat(float(z)) for z in zetas])
    margin = (hat_vals + table.mus) * zetas
    # Scale-aware tolerance: solver residue in the sampled flows enters the
    # margin multiplied by zeta, so exact-zero margins (boundary cases) show
    # up as noise of order 1e-12 * zeta**2.
    tol = _STRICTNESS_TOL * (1.0 + zetas * zetas)
    holds = bool(np.all(margin >= -tol))
    off_origin = np.abs(zetas) > _STRICTNESS_TOL
    strict = holds and bool(np.all(margin[off_origin] > tol[off_origin]))
    return PassivityConditionReport(holds, strict, zetas, margin, table)


def cluster_count_prediction(
    system: NetworkSystem,
    edge_id: int,
    grid: ef.GridSpec,
    cap: int = 20,
) -> CycleClusterCount:
    """Cluster counts {1, cycle length} for a unique-cycle non-strict edge.

    Applicable only when the given edge is the single non-strictly-positive
    edge of the network and exactly one cycle passes through it; the steady
    outputs then form either one cluster or as many clusters as the cycle
    has nodes, and simulation decides which.
    """
    classes = classify_edges(system, grid)
    non_strict = [
        e.id for e, c in zip(system.graph.edges, classes)
        if not c.is_strictly_positive
    ]
    if non_strict != [edge_id]:
        raise Inapplicable(
            f"edge {edge_id} must be the only non-strictly-positive edge, "
            f"found {non_strict}"
        )
    cycles = cycles_through_edge(system.graph, edge_id, cap=cap)
    if len(cycles) != 1:
        raise Inapplicable(
            f"expected exactly one cycle through edge {edge_id}, "
            f"found {len(cycles)}"
        )
    cycle = cycles[0]
    return CycleClusterCount(frozenset({1, cycle.node_count()}), cycle)


def _edges_share_cycle(g: Graph, a: int, b: int, cap: int) -> bool:
    """True when some simple cycle contains both edges."""
    for cycle in cycles_through_edge(g, a, cap=cap):
        if any(step.edge_id == b for step in cycle.steps):
            return True
    return False


def predict(
    system: NetworkSystem,
    grid: Optional[ef.GridSpec] = None,
    eq_half_width: float = 100.0,
    eq_samples: int = 2001,
    cap: int = 20,
) -> Prediction:
    """Strongest applicable convergence verdict with certificates.

    Dispatch order: spanning strictly positive subnetwork (agreement), all
    edges positive (convergence), single non-strict edge with the
    equivalent-passivity test (agreement when strict; cluster counts when a
    unique cycle exists), several cycle-separated non-strict edges, and
    otherwise NoGuarantee.
    """
    grid = grid or ef.GridSpec(100.0, 2001)
    classes = classify_edges(system, grid)
    certificates: dict = {"sign_classes": classes, "grid": grid}
    sp_ids = [
        e.id for e, c in zip(system.graph.edges, classes) if c.is_strictly_positive
    ]
    certificates["strictly_positive_edges"] = tuple(sp_ids)
    all_positive = all(c.is_positive for c in classes)
    sp_blocks = connected_components(
        system.graph, lambda e: e.id in set(sp_ids)
    )

    if all_positive and len(sp_blocks) == 1:
        tag = (
            "strictly-positive-network"
            if len(sp_ids) == system.edge_count
            else "spanning-strictly-positive-subnetwork"
        )
        return Prediction(Verdict.AGREEMENT_GUARANTEED, tag, None, certificates)

    non_strict = [e.id for e in system.graph.edges if e.id not in set(sp_ids)]

    if len(non_strict) == 1:
        single = _predict_single(
            system, non_strict[0], certificates, eq_half_width, eq_samples, cap
        )
        if single is not None:
            return single

    if all_positive:
        return Prediction(
            Verdict.CONVERGENCE_GUARANTEED, "positive-network", None, certificates
        )

    if len(non_strict) >= 2:
        multi = _predict_cycle_separated(
            system, non_strict, certificates, eq_half_width, eq_samples, cap
        )
        if multi is not None:
            return multi

    return Prediction(Verdict.NO_GUARANTEE, "none", None, certificates)


def _predict_single(
    system, hat_id, certificates, eq_half_width, eq_samples, cap
):
    """Single non-strict edge: equivalent-passivity dispatch."""
    hat_edge = system.graph.edge(hat_id)
    rest = [e.id for e in system.graph.edges if e.id != hat_id]
    if not rest:
        return None
    try:
        positive_part, _ = positive_subnetwork(system, rest)
    except ValidationError:
        return None  # positive part disconnected: no equivalent function
    grid = certificates["grid"]
    for f in positive_part.edge_functions:
        if not ef.is_monotone_increasing(f, grid).nondecreasing:
            return None
    psi_hat = system.edge_functions[hat_id - 1]
    report = equivalent_passivity_condition(
        positive_part, psi_hat, hat_edge.tail, hat_edge.head,
        eq_half_width, eq_samples,
    )
    certificates["condition"] = report
    certificates["terminal_edge"] = hat_id
    if not report.holds:
        return Prediction(Verdict.NO_GUARANTEE, "none", None, certificates)
    if report.strict:
        return Prediction(
            Verdict.AGREEMENT_GUARANTEED,
            "strict-equivalent-passivity",
            None,
            certificates,
        )
    try:
        cycle_info = cluster_count_prediction(system, hat_id, grid, cap=cap)
    except (Inapplicable, CapExceeded):
        cycle_info = None
    if cycle_info is not None:
        certificates["cycle"] = cycle_info.cycle
        certificates["cycle_length"] = cycle_info.cycle.node_count()
        return Prediction(
            Verdict.CLUSTER_COUNT_PREDICTION,
            "single-cycle-cluster-count",
            cycle_info.counts,
            certificates,
        )
    return Prediction(
        Verdict.CONVERGENCE_GUARANTEED,
        "equivalent-passivity",
        None,
        certificates,
    )


def _predict_cycle_separated(
    system, non_strict, certificates, eq_half_width, eq_samples, cap
):
    """Several non-strict edges, no two on a common cycle."""
    try:
        for i, a in enumerate(non_strict):
            for b in non_strict[i + 1 :]:
                if _edges_share_cycle(system.graph, a, b, cap):
                    return None
    except CapExceeded:
        return None
    rest = [e.id for e in system.graph.edges if e.id not in set(non_strict)]
    if not rest:
        return None
    try:
        positive_part, _ = positive_subnetwork(system, rest)
    except ValidationError:
        return None
    grid = certificates["grid"]
    for f in positive_part.edge_functions:
        if not ef.is_monotone_increasing(f, grid).nondecreasing:
            return None
    reports = {}
    for hat_id in non_strict:
        hat_edge = system.graph.edge(hat_id)
        psi_hat = system.edge_functions[hat_id - 1]
        report = equivalent_passivity_condition(
            positive_part, psi_hat, hat_edge.tail, hat_edge.head,
            eq_half_width, eq_samples,
        )
        reports[hat_id] = report
        if not report.holds:
            certificates["conditions"] = reports
            return Prediction(Verdict.NO_GUARANTEE, "none", None, certificates)
    certificates["conditions"] = reports
    return Prediction(
        Verdict.CONVERGENCE_GUARANTEED,
        "cycle-separated-equivalent-passivity",
        None,
        certificates,
    )


def distance_bounds(
    system: NetworkSystem, i: int, j: int, cap: int = 20
) -> tuple[float, float]:
    """Bracket for the limit of y_i - y_j in a positive network.

    Every path from i to j bounds the difference by the sum of the edges'
    equilibria intervals, orientation-corrected (an edge walked against its
    orientation contributes its negated, swapped interval); the bracket is
    the tightest combination over all simple paths.

    Raises CapExceeded past the enumeration cap and propagates
    NotAnInterval from edges without an interval-shaped zero set.
    """
    intervals = [f.equilibria() for f in system.edge_functions]
    paths = all_simple_paths(system.graph, i, j, cap=cap)
    if not paths:
        raise ValidationError(f"no path between nodes {i} and {j}")
    z_min = -math.inf
    z_max = math.inf
    for path in paths:
        lo = hi = 0.0
        for step in path.steps:
            iv = intervals[step.edge_id - 1]
            if step.flip == 0:
                lo += iv.lower
                hi += iv.upper
            else:
                lo -= iv.upper
                hi -= iv.lower
        z_min = max(z_min, lo)
        z_max = min(z_max, hi)
    return z_min, z_max


def network_linear_weights(system: NetworkSystem) -> np.ndarray:
    """Per-edge weights of an all-linear network; NonLinearEdges otherwise."""
    ws = []
    for e, f in zip(system.graph.edges, system.edge_functions):
        w = ef.linear_coefficient(f)
        if w is None:
            raise NonLinearEdges(f"edge {e.id} is not a linear function")
        ws.append(w)
    return np.array(ws, dtype=float)


def signed_laplacian_min_eigenvalue(g: Graph, weights) -> float:
    """Smallest eigenvalue of the weighted Laplacian on the agreement
    complement.

    For all-linear networks its sign separates agreement (positive) from
    divergence (negative); zero is the clustering boundary.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (g.edge_count,):
        raise ValidationError(
            f"weight vector has shape {w.shape}, expected ({g.edge_count},)"
        )
    E = incidence(g)
    L = (E * w) @ E.T
    n = g.node_count
    if n == 1:
        return 0.0
    basis = np.linalg.qr(np.eye(n) - np.ones((n, n)) / n)[0][:, : n - 1]
    return float(np.linalg.eigvalsh(basis.T @ L @ basis).min())


def equilibria_membership(
    system: NetworkSystem, zeta: np.ndarray, tol: float
) -> tuple[Optional[bool], ...]:
    """Per-edge test that the tension sits in the edge's zero interval.

    Entries are None for edges whose zero set is not an interval.
    """
    out: list[Optional[bool]] = []
    for f, z in zip(system.edge_functions, zeta):
        try:
            interval = f.equilibria()
        except Exception:
            out.append(None)
            continue
        out.append(interval.contains(float(z), tol=tol))
    return tuple(out)


def strict_extremum_violations(
    system: NetworkSystem,
    y_final: np.ndarray,
    strictly_positive_ids: Sequence[int],
    tol: float,
) -> list[int]:
    """Nodes incident only to strictly positive edges that stick out.

    At a settled state such a node must lie between the minimum and maximum
    of its neighbors' outputs (within tol); the returned list of violators
    is empty when the min-max property holds.
    """
    sp = set(strictly_positive_ids)
    neighbors: dict[int, list[int]] = {v: [] for v in range(1, system.node_count + 1)}
    only_sp = {v: True for v in range(1, system.node_count + 1)}
    for e in system.graph.edges:
        neighbors[e.tail].append(e.head)
        neighbors[e.head].append(e.tail)
        if e.id not in sp:
            only_sp[e.tail] = False
            only_sp[e.head] = False
    bad = []
    for v in range(1, system.node_count + 1):
        if not only_sp[v] or not neighbors[v]:
            continue
        vals = [y_final[w - 1] for w in neighbors[v]]
        if y_final[v - 1] > max(vals) + tol or y_final[v - 1] < min(vals) - tol:
            bad.append(v)
    return bad
