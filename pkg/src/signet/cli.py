"""Command-line interface: simulate / classify / eqfun / predict.

Every command reads a JSON config and writes its artifacts into the output
directory.  Outputs are deterministic: identical inputs produce
byte-identical files.  Exit codes: 0 success, 2 validation error, 3 solver
failure, 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, circuit
from .config import NetworkConfig, load_config
from .edgefn import GridSpec
from .errors import (
    CapExceeded,
    NoConvergence,
    NonFiniteState,
    SignetError,
    ValidationError,
)
from .sim import OutcomeKind, classify_outcome, simulate, write_trajectory_csv

_EXIT_VALIDATION = 2
_EXIT_SOLVER = 3
_EXIT_CAP = 4


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _cmd_simulate(cfg: NetworkConfig, out: Path, grid: GridSpec) -> None:
    if cfg.sim is None or cfg.initial_state is None:
        raise ValidationError("simulate needs 'sim' and 'initial_state' sections")
    system = cfg.build_system()
    tr = simulate(system, cfg.initial_state, cfg.sim)
    with open(out / "trajectory.csv", "w", newline="") as fh:
        write_trajectory_csv(tr, fh)
    outcome = classify_outcome(system, tr, cfg.sim)
    lines = [
        f"outcome: {outcome.kind.value}",
        f"t_final: {_g17(tr.times[-1])}",
        f"final_u_norm: {_g17(tr.final_u_norm)}",
    ]
    if not np.isnan(outcome.spread):
        lines.append(f"spread: {_g17(outcome.spread)}")
    if outcome.kind is OutcomeKind.AGREEMENT:
        lines.append(f"beta: {_g17(outcome.beta)}")
    if outcome.kind is OutcomeKind.CLUSTERING:
        lines.append(f"clusters: {len(outcome.clusters)}")
        for i, c in enumerate(outcome.clusters, start=1):
            nodes = ",".join(str(v) for v in c.nodes)
            lines.append(f"cluster {i}: value={_g17(c.value)} nodes={nodes}")
    if outcome.steady_tension is not None:
        zeta = outcome.steady_tension
        lines.append(
            "steady_tension: " + ",".join(_g17(z) for z in zeta)
        )
        member = analysis.equilibria_membership(system, zeta, cfg.sim.cluster_tol)
        rendered = ",".join(
            f"{e.id}=" + ("n/a" if m is None else ("yes" if m else "no"))
            for e, m in zip(system.graph.edges, member)
        )
        lines.append(f"equilibria_membership: {rendered}")
    (out / "outcome.txt").write_text("\n".join(lines) + "\n")


def _cmd_classify(cfg: NetworkConfig, out: Path, grid: GridSpec) -> None:
    system = cfg.build_system()
    classes = analysis.classify_edges(system, grid)
    rows = ["edge_id,label,margin,witness"]
    for e, c in zip(system.graph.edges, classes):
        witness = "" if c.witness is None else _g17(c.witness)
        rows.append(f"{e.id},{c.label.value},{_g17(c.margin)},{witness}")
    (out / "classification.csv").write_text("\n".join(rows) + "\n")


def _cmd_eqfun(cfg: NetworkConfig, out: Path, grid: GridSpec) -> None:
    if cfg.eqfun is None:
        raise ValidationError("eqfun command needs an 'eqfun' section")
    system = cfg.build_system()
    table = circuit.equivalent_edge_function(
        system,
        cfg.eqfun.p,
        cfg.eqfun.q,
        cfg.eqfun.half_width,
        cfg.eqfun.samples,
    )
    with open(out / "eqfun.csv", "w", newline="") as fh:
        table.save_csv(fh)


def _cmd_predict(cfg: NetworkConfig, out: Path, grid: GridSpec) -> None:
    system = cfg.build_system()
    pred = analysis.predict(
        system, grid, eq_half_width=grid.n, eq_samples=grid.samples
    )
    lines = [
        f"verdict: {pred.verdict.value}",
        f"applied_result: {pred.applied_result}",
        f"grid_n: {_g17(grid.n)}",
        f"grid_m: {grid.samples}",
    ]
    classes = pred.certificates.get("sign_classes", ())
    if classes:
        rendered = " ".join(
            f"{e.id}={c.label.value}"
            for e, c in zip(system.graph.edges, classes)
        )
        lines.append(f"edge_classes: {rendered}")
    if pred.cluster_counts is not None:
        lines.append(
            "cluster_counts: "
            + ",".join(str(c) for c in sorted(pred.cluster_counts))
        )
    condition = pred.certificates.get("condition")
    if condition is not None:
        off = np.abs(condition.zetas) > 1e-9
        lines.append(f"condition_holds: {'yes' if condition.holds else 'no'}")
        lines.append(f"condition_strict: {'yes' if condition.strict else 'no'}")
        lines.append(f"margin_min: {_g17(condition.margin[off].min())}")
    (out / "prediction.txt").write_text("\n".join(lines) + "\n")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "classify": _cmd_classify,
    "eqfun": _cmd_eqfun,
    "predict": _cmd_predict,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="signet",
        description="Simulate and analyze diffusively coupled nonlinear networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate the network and classify the outcome"),
        ("classify", "passivity sign class of every edge"),
        ("eqfun", "equivalent edge function between the config terminals"),
        ("predict", "convergence verdict from the sufficient conditions"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON network config")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument(
            "--grid-n", type=float, default=100.0,
            help="half-width of classification/sampling grids (default 100)",
        )
        cmd.add_argument(
            "--grid-m", type=int, default=2001,
            help="number of grid samples (default 2001)",
        )
    args = parser.parse_args(argv)

    try:
        grid = GridSpec(args.grid_n, args.grid_m)
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out, grid)
    except CapExceeded as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_CAP
    except (NoConvergence, NonFiniteState) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_SOLVER
    except (SignetError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
