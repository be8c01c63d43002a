"""Resistive-circuit layer: operating points, equivalent edge functions.

With the node inputs forced to zero the network is a nonlinear resistive
circuit.  Pinning two terminal potentials (y_p = zeta_pq, y_q = 0) and
minimizing the total cocontent over the free potentials yields the circuit's
operating point: the minimizer satisfies Kirchhoff's current law at every
free node, and the flow entering terminal p defines the equivalent edge
function of the two-terminal network, the nonlinear counterpart of the
inverse effective resistance.

The objective is convex whenever every edge function is monotonically
nondecreasing, so the solver is a damped Newton method with an Armijo
backtracking line search and a plain gradient fallback where the Hessian is
unavailable (dead-zone flats) or unbounded (power laws at zero tension).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Optional, TextIO

import numpy as np

from . import edgefn as ef
from .errors import (
    Disconnected,
    DimensionMismatch,
    NoConvergence,
    ValidationError,
)
from .graph import Graph, incidence, is_connected
from .network import NetworkSystem

# Derivatives beyond this are clamped when assembling the Newton system;
# power-law edges have infinite slope at zero tension and the clamp simply
# pins those tensions, which is where their optimum sits anyway.
_DERIV_CLAMP = 1e12
_ARMIJO_C = 1e-4
_MAX_HALVINGS = 60


@dataclass(frozen=True)
class OperatingPoint:
    """Solution of the augmented network equations for one terminal tension.

    Arrays cover the augmented edge set: the real edges in id order plus the
    virtual terminal edge (oriented p -> q) last.  ``terminal_flow`` is the
    flow entering the network at p, i.e. the equivalent edge function value;
    the virtual edge itself carries the negative of it.
    """

    y: np.ndarray
    zeta_bar: np.ndarray
    mu_bar: np.ndarray
    terminal_flow: float
    terminals: tuple[int, int]
    iterations: int
    degenerate: bool

    @property
    def zeta(self) -> np.ndarray:
        """Tension on the real edges only."""
        return self.zeta_bar[:-1]

    @property
    def mu(self) -> np.ndarray:
        """Flow on the real edges only."""
        return self.mu_bar[:-1]


def total_cocontent(system: NetworkSystem, zeta: np.ndarray) -> float:
    """Sum of the edge cocontents at the given tension vector."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (system.edge_count,):
        raise DimensionMismatch(
            f"tension vector has shape {zeta.shape}, expected ({system.edge_count},)"
        )
    return float(
        sum(f.cocontent(float(z)) for f, z in zip(system.edge_functions, zeta))
    )


def check_equivalent_edge_preconditions(
    system: NetworkSystem, grid: Optional[ef.GridSpec] = None
) -> None:
    """Warn when the uniqueness conditions for operating points look violated.

    Existence and uniqueness are guaranteed for strictly increasing edge
    functions whose flow grows without bound.  The check is advisory: the
    minimizer is still returned for merely nondecreasing edges, but interior
    tensions may then be non-unique (the terminal flow stays unique while
    the objective is convex).
    """
    grid = grid or ef.GridSpec(100.0, 401)
    for e, f in zip(system.graph.edges, system.edge_functions):
        report = ef.is_monotone_increasing(f, grid)
        if not report.nondecreasing:
            warnings.warn(
                f"edge {e.id}: function is not monotone on the check grid; "
                "the cocontent objective may be nonconvex",
                stacklevel=2,
            )
        elif not (report.strictly and report.unbounded):
            warnings.warn(
                f"edge {e.id}: function is not strictly increasing and "
                "unbounded; the operating point may be non-unique",
                stacklevel=2,
            )


def _harmonic_start(system: NetworkSystem, p: int, q: int, zeta_pq: float):
    """Initial potentials: unweighted harmonic interpolation of the terminals.

    Keeps interior tensions away from zero so power-law edges start with a
    finite slope.
    """
    n = system.node_count
    y = np.zeros(n)
    y[p - 1] = zeta_pq
    free = [i for i in range(n) if i not in (p - 1, q - 1)]
    if not free:
        return y, np.array(free, dtype=int)
    L = system.E @ system.ET
    rhs = -(L[np.ix_(free, [p - 1])].ravel() * zeta_pq)
    y[free] = np.linalg.solve(L[np.ix_(free, free)], rhs)
    return y, np.array(free, dtype=int)


def solve_operating_point(
    system: NetworkSystem,
    p: int,
    q: int,
    zeta_pq: float,
    grad_tol: float = 1e-10,
    max_iter: int = 10_000,
    warm_start: Optional[np.ndarray] = None,
    check_preconditions: bool = True,
) -> OperatingPoint:
    """Operating point of the two-terminal network at a given terminal tension.

    Minimizes the total cocontent over the free potentials with y_p pinned
    to zeta_pq and y_q grounded at 0.  At the returned point the net flow at
    every free node is below grad_tol in infinity norm.

    Raises NoConvergence when the iteration cap is hit.
    """
    graph = system.graph
    for v in (p, q):
        if not (1 <= v <= graph.node_count):
            raise ValidationError(f"terminal {v} out of range")
    if p == q:
        raise ValidationError("terminals must be distinct nodes")
    if check_preconditions:
        check_equivalent_edge_preconditions(system)

    E, ET = system.E, system.ET
    fns = system.edge_functions
    y, free = _harmonic_start(system, p, q, zeta_pq)
    if warm_start is not None:
        y = np.array(warm_start, dtype=float)
        y[p - 1] = zeta_pq
        y[q - 1] = 0.0
    E_free = E[free] if free.size else np.zeros((0, system.edge_count))

    def objective(yv: np.ndarray) -> float:
        zeta = ET @ yv
        return sum(f.cocontent(float(z)) for f, z in zip(fns, zeta))

    def gradient(yv: np.ndarray):
        zeta = ET @ yv
        mu = system._flow(zeta)
        return (E @ mu)[free], zeta, mu

    def clamped_slopes(zeta: np.ndarray, mu: np.ndarray) -> np.ndarray:
        """Per-edge model slopes for the Newton system.

        Uses the larger of the pointwise derivative and the chord slope
        mu/zeta.  For concave flow laws (power functions) the chord
        majorizes the curvature toward the origin, which stops Newton from
        zigzagging across the kink; for linear edges the two coincide.
        """
        d = np.array([f.derivative(float(z)) for f, z in zip(fns, zeta)])
        d = np.where(np.isfinite(d), d, _DERIV_CLAMP)
        with np.errstate(divide="ignore", invalid="ignore"):
            chord = np.where(np.abs(zeta) > 1e-300, mu / zeta, d)
        chord = np.where(np.isfinite(chord), chord, d)
        return np.minimum(np.maximum(d, chord), _DERIV_CLAMP)

    degenerate = False
    iterations = 0
    g, zeta, mu = gradient(y)
    if free.size:
        F = objective(y)
        g_norm = float(np.max(np.abs(g)))
        for iterations in range(1, max_iter + 1):
            if g_norm <= grad_tol:
                break
            # Newton direction on the free block; the derivative clamp keeps
            # the system solvable when power-law slopes blow up at zero
            # tension (it pins those tensions, which is their optimum).
            d = clamped_slopes(zeta, mu)
            direction = None
            if np.all(d >= 0.0):
                H = (E_free * d) @ E_free.T
                try:
                    direction = np.linalg.solve(H, -g)
                except np.linalg.LinAlgError:
                    try:
                        reg = 1e-10 * (1.0 + float(d.max()))
                        direction = np.linalg.solve(
                            H + reg * np.eye(free.size), -g
                        )
                    except np.linalg.LinAlgError:
                        direction = None
                if direction is not None and not float(g @ direction) < 0.0:
                    direction = None
            if direction is None:
                direction = -g
            # A clamped-slope Newton system can pin coordinates that must
            # move (power-law edges sitting exactly at zero tension); when
            # the step degenerates to numerically nothing, take a gradient
            # step to pull those edges off the kink.
            if float(np.max(np.abs(direction))) < 1e-13 * (
                1.0 + float(np.max(np.abs(y)))
            ):
                direction = -g
            slope = float(g @ direction)
            accepted = False
            step = 1.0
            for _ in range(_MAX_HALVINGS):
                y_try = y.copy()
                y_try[free] += step * direction
                F_try = objective(y_try)
                g_try, zeta_try, mu_try = gradient(y_try)
                g_try_norm = float(np.max(np.abs(g_try)))
                armijo = F_try <= F + _ARMIJO_C * step * slope
                # Near the minimum the objective drop falls below float
                # resolution before the gradient does; accept on gradient
                # decrease as long as the objective does not visibly grow.
                floor_ok = (
                    g_try_norm <= 0.9 * g_norm
                    and F_try <= F + 1e-12 * (1.0 + abs(F))
                )
                if armijo or floor_ok:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                if g_norm <= 1e1 * grad_tol:
                    break
                raise NoConvergence(
                    f"line search stalled at zeta_pq = {zeta_pq:.6g}, "
                    f"gradient norm {g_norm:.3e}"
                )
            y, F = y_try, F_try
            g, zeta, mu = g_try, zeta_try, mu_try
            g_norm = g_try_norm
        else:
            raise NoConvergence(
                f"no operating point after {max_iter} iterations at "
                f"zeta_pq = {zeta_pq:.6g}"
            )
        # Degeneracy flag: singular Hessian at the solution means interior
        # tensions are not unique (dead-zone flats), though the terminal
        # flow stays unique while the objective is convex.
        d = clamped_slopes(zeta, mu)
        if np.all(d >= 0.0):
            H = (E_free * d) @ E_free.T
            try:
                np.linalg.cholesky(H)
            except np.linalg.LinAlgError:
                degenerate = True

    terminal_flow = float((E @ mu)[p - 1])
    zeta_bar = np.append(zeta, zeta_pq)
    mu_bar = np.append(mu, -terminal_flow)
    return OperatingPoint(
        y=y,
        zeta_bar=zeta_bar,
        mu_bar=mu_bar,
        terminal_flow=terminal_flow,
        terminals=(p, q),
        iterations=iterations,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class EquivalentEdgeTable:
    """Sampled equivalent edge function between two terminals.

    Stores the flow into the network at p for each sampled terminal tension,
    with piecewise-linear interpolation between samples.  Serializes to a
    two-column CSV (zeta, mu) and re-imports as a SampledTable edge function.
    """

    zetas: np.ndarray
    mus: np.ndarray
    terminals: tuple[int, int]
    max_tellegen_residual: float = 0.0
    degenerate: bool = False

    def __post_init__(self):
        z = np.asarray(self.zetas, dtype=float)
        m = np.asarray(self.mus, dtype=float)
        if z.shape != m.shape or z.ndim != 1:
            raise ValidationError("table columns must be 1-d and equal length")
        if np.any(np.diff(z) <= 0):
            raise ValidationError("table zeta values must be strictly increasing")
        object.__setattr__(self, "zetas", z)
        object.__setattr__(self, "mus", m)
        object.__setattr__(
            self, "_fn", ef.SampledTable(tuple(z), tuple(m))
        )

    def __call__(self, zeta: float) -> float:
        return self._fn(zeta)

    def as_edge_function(self) -> ef.SampledTable:
        return self._fn

    def save_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["zeta", "mu"])
        for z, m in zip(self.zetas, self.mus):
            writer.writerow([format(float(z), ".17g"), format(float(m), ".17g")])


def equivalent_edge_function(
    system: NetworkSystem,
    p: int,
    q: int,
    half_width: float = 100.0,
    samples: int = 2001,
    grad_tol: float = 1e-10,
    check_preconditions: bool = True,
) -> EquivalentEdgeTable:
    """Sample the equivalent edge function over [-half_width, half_width].

    For each of ``samples`` uniformly spaced terminal tensions (odd count, so
    zero is sampled exactly) the operating point is solved and the terminal
    flow recorded.  Sweeps outward from zero, warm-starting each solve with
    its neighbor, so the table is deterministic and cheap.
    """
    if samples < 3 or samples % 2 == 0:
        raise ValidationError("sample count must be odd and at least 3")
    if not (half_width > 0):
        raise ValidationError("sampling half-width must be positive")
    if check_preconditions:
        check_equivalent_edge_preconditions(system)
    zetas = np.linspace(-half_width, half_width, samples)
    mus = np.zeros(samples)
    mid = samples // 2
    max_residual = 0.0
    degenerate = False

    def record(i: int, op: OperatingPoint):
        nonlocal max_residual, degenerate
        mus[i] = op.terminal_flow
        scale = float(
            np.linalg.norm(op.mu_bar) * np.linalg.norm(op.zeta_bar)
        )
        residual = abs(float(op.mu_bar @ op.zeta_bar))
        max_residual = max(max_residual, residual / scale if scale > 0 else residual)
        degenerate = degenerate or op.degenerate

    def sweep(indices):
        warm = None
        for i in indices:
            op = solve_operating_point(
                system,
                p,
                q,
                float(zetas[i]),
                grad_tol=grad_tol,
                warm_start=warm,
                check_preconditions=False,
            )
            record(i, op)
            # The all-zero solution pins power-law edges at their kink, so
            # it makes a poor predictor; chain warm starts only off-center.
            warm = op.y if float(zetas[i]) != 0.0 else None

    try:
        sweep(range(mid, samples))
        sweep(range(mid, -1, -1))
    except NoConvergence as exc:
        raise NoConvergence(f"equivalent edge sweep failed: {exc}") from exc
    return EquivalentEdgeTable(
        zetas=zetas,
        mus=mus,
        terminals=(p, q),
        max_tellegen_residual=max_residual,
        degenerate=degenerate,
    )


def effective_resistance(
    g: Graph, weights, p: int, q: int
) -> float:
    """Two-terminal effective resistance of a positively weighted graph.

    Computed as (e_p - e_q)^T L^+ (e_p - e_q) with L the weighted Laplacian
    and L^+ its Moore-Penrose pseudoinverse.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (g.edge_count,):
        raise DimensionMismatch(
            f"weight vector has shape {w.shape}, expected ({g.edge_count},)"
        )
    if np.any(w <= 0):
        raise ValidationError("effective resistance needs strictly positive weights")
    for v in (p, q):
        if not (1 <= v <= g.node_count):
            raise ValidationError(f"terminal {v} out of range")
    if not is_connected(g):
        raise Disconnected("effective resistance needs a connected graph")
    if p == q:
        return 0.0
    E = incidence(g)
    L = (E * w) @ E.T
    b = np.zeros(g.node_count)
    b[p - 1] = 1.0
    b[q - 1] = -1.0
    return float(b @ np.linalg.pinv(L, hermitian=True) @ b)


def tellegen_residual(op: OperatingPoint) -> float:
    """|mu_bar . zeta_bar| at an operating point; zero in exact arithmetic.

    Tensions derived from potentials are orthogonal to flows satisfying the
    current law, so this residual measures solver quality.
    """
    return abs(float(op.mu_bar @ op.zeta_bar))
