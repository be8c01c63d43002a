"""Simulation and passivity analysis of diffusively coupled nonlinear networks.

The package models networks of nonlinear integrators coupled through static
scalar edge functions, classifies edges by passivity (signed nonlinear
networks), computes equivalent edge functions of two-terminal resistive
subnetworks by cocontent minimization, and predicts agreement, clustering,
or divergence of the closed loop.
"""

from .analysis import (
    CycleClusterCount,
    PassivityConditionReport,
    Prediction,
    Verdict,
    classify_edges,
    cluster_count_prediction,
    distance_bounds,
    equivalent_passivity_condition,
    network_linear_weights,
    predict,
    signed_laplacian_min_eigenvalue,
)
from .circuit import (
    EquivalentEdgeTable,
    OperatingPoint,
    effective_resistance,
    equivalent_edge_function,
    solve_operating_point,
    tellegen_residual,
    total_cocontent,
)
from .config import NetworkConfig, load_config, parse_config
from .edgefn import (
    DeadZone,
    EdgeFunction,
    EquilibriaInterval,
    GridSpec,
    Linear,
    MonotonicityReport,
    Negated,
    PowerSign,
    SampledTable,
    SignClass,
    SignLabel,
    Sinusoid,
    Sum,
    classify_sign,
    cocontent,
    equilibria,
    is_monotone_increasing,
)
from .errors import (
    CapExceeded,
    DimensionMismatch,
    Disconnected,
    Inapplicable,
    InvalidGrid,
    NoConvergence,
    NonFiniteState,
    NonLinearEdges,
    NotAnInterval,
    NotSteady,
    ParseError,
    SignetError,
    UnsupportedDynamics,
    ValidationError,
)
from .graph import (
    Edge,
    Graph,
    Path,
    PathStep,
    all_simple_paths,
    connected_components,
    cycle_indicator,
    cycles_through_edge,
    edge_subgraph,
    incidence,
    is_connected,
)
from .network import NetworkSystem
from .nodes import Identity, NodeDynamics, Saturating, SignPower, drift, sector_check, storage
from .sim import (
    Cluster,
    Outcome,
    OutcomeKind,
    SimConfig,
    SteadyTension,
    Trajectory,
    classify_outcome,
    cocontent_profile,
    quadratic_storage_profile,
    simulate,
    steady_tension,
    write_trajectory_csv,
)

__version__ = "0.1.0"
