"""Undirected graphs with fixed edge orientations and incidence-matrix algebra.

Nodes are numbered 1..node_count and every edge carries an arbitrary but
fixed orientation (tail -> head).  The orientation is an input, never chosen
internally, so that tension signs are reproducible across runs.  Graphs here
are small (tens of nodes); storage is dense and enumeration routines are
guarded by an explicit node-count cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import CapExceeded, ValidationError

# Simple-path / cycle enumeration is exponential in the worst case; refuse
# graphs beyond this many nodes unless the caller raises the cap explicitly.
DEFAULT_ENUMERATION_CAP = 20


class Edge(NamedTuple):
    """Oriented edge: dense 1-based id, tail node, head node."""

    id: int
    tail: int
    head: int


class PathStep(NamedTuple):
    """One edge of a path.

    ``flip`` is 0 when the stored tail->head orientation agrees with the
    traversal direction and 1 when the edge is walked against it.
    """

    edge_id: int
    flip: int


@dataclass(frozen=True)
class Path:
    """Simple path between two nodes, as an ordered list of oriented steps."""

    steps: tuple[PathStep, ...]
    start: int
    end: int

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> "Path":
        """The same path walked end -> start, with every flip toggled."""
        steps = tuple(PathStep(s.edge_id, 1 - s.flip) for s in self.steps[::-1])
        return Path(steps, self.end, self.start)

    def node_count(self) -> int:
        return len(self.steps) + 1


@dataclass(frozen=True)
class Graph:
    """Undirected graph with oriented edges.

    Invariants enforced at construction: no self-loops, node indices in
    [1, node_count], edge ids unique and dense (1..edge_count).  Instances
    are immutable and safe to share between threads.
    """

    node_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.node_count < 1:
            raise ValidationError("graph needs at least one node")
        edges = tuple(sorted((Edge(*e) for e in self.edges), key=lambda e: e.id))
        if [e.id for e in edges] != list(range(1, len(edges) + 1)):
            raise ValidationError("edge ids must be unique and dense (1..|E|)")
        for e in edges:
            if e.tail == e.head:
                raise ValidationError(f"edge {e.id} is a self-loop")
            for v in (e.tail, e.head):
                if not (1 <= v <= self.node_count):
                    raise ValidationError(
                        f"edge {e.id} references node {v}, valid range is "
                        f"1..{self.node_count}"
                    )
        object.__setattr__(self, "edges", edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge(self, edge_id: int) -> Edge:
        if not (1 <= edge_id <= len(self.edges)):
            raise ValidationError(f"no edge with id {edge_id}")
        return self.edges[edge_id - 1]


def incidence(g: Graph) -> np.ndarray:
    """Dense node-by-edge incidence matrix.

    Column k has +1 at the tail of edge k and -1 at its head; all other
    entries are zero.  Columns therefore sum to zero, and for a connected
    graph the matrix has rank node_count - 1.
    """
    mat = np.zeros((g.node_count, g.edge_count))
    for e in g.edges:
        mat[e.tail - 1, e.id - 1] = 1.0
        mat[e.head - 1, e.id - 1] = -1.0
    return mat


def _adjacency(g: Graph, keep: Optional[Callable[[Edge], bool]]):
    """Node -> sorted list of (neighbor, edge) over edges passing ``keep``."""
    adj: dict[int, list[tuple[int, Edge]]] = {v: [] for v in range(1, g.node_count + 1)}
    for e in g.edges:
        if keep is not None and not keep(e):
            continue
        adj[e.tail].append((e.head, e))
        adj[e.head].append((e.tail, e))
    for v in adj:
        adj[v].sort(key=lambda item: (item[1].id, item[0]))
    return adj

def connected_components(
    g: Graph, edge_filter: Optional[Callable[[Edge], bool]] = None
) -> list[list[int]]:
    """Partition of the nodes under the edges passing ``edge_filter``.

    Two nodes share a block iff they are joined by a path of kept edges.
    Blocks are sorted internally and listed by their smallest node.
    """
    adj = _adjacency(g, edge_filter)
    seen: set[int] = set()
    blocks: list[list[int]] = []
    for root in range(1, g.node_count + 1):
        if root in seen:
            continue
        stack, block = [root], []
        seen.add(root)
        while stack:
            v = stack.pop()
            block.append(v)
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        blocks.append(sorted(block))
    return blocks


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


def all_simple_paths(
    g: Graph, i: int, j: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[Path]:
    """Every simple path from node i to node j.

    Each step records whether the stored edge orientation agrees with the
    traversal direction (flip = 0) or not (flip = 1).  Deterministic order:
    depth-first, neighbors visited in increasing edge-id order.

    Raises CapExceeded when node_count exceeds ``cap``.
    """
    for v in (i, j):
        if not (1 <= v <= g.node_count):
            raise ValidationError(f"node {v} out of range")
    if g.node_count > cap:
        raise CapExceeded(
            f"graph has {g.node_count} nodes, enumeration cap is {cap}"
        )
    if i == j:
        return [Path((), i, j)]
    adj = _adjacency(g, None)
    out: list[Path] = []
    steps: list[PathStep] = []
    visited = {i}

    def dfs(v: int):
        for w, e in adj[v]:
            if w in visited:
                continue
            steps.append(PathStep(e.id, 0 if e.tail == v else 1))
            if w == j:
                out.append(Path(tuple(steps), i, j))
            else:
                visited.add(w)
                dfs(w)
                visited.remove(w)
            steps.pop()

    dfs(i)
    return out


def cycles_through_edge(
    g: Graph, edge_id: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[Path]:
    """All simple cycles containing the given edge.

    Each cycle is returned as the simple path from the edge's head back to
    its tail that avoids the edge itself; closing it with the edge yields
    the cycle.  A tree edge yields an empty list.
    """
    e = g.edge(edge_id)
    if g.node_count > cap:
        raise CapExceeded(
            f"graph has {g.node_count} nodes, enumeration cap is {cap}"
        )
    if g.edge_count == 1:
        return []
    others = [x for x in g.edges if x.id != edge_id]
    sub, id_map = edge_subgraph(g, [x.id for x in others])
    back = {new: old for old, new in id_map.items()}
    paths = all_simple_paths(sub, e.head, e.tail, cap=cap)
    return [
        Path(tuple(PathStep(back[s.edge_id], s.flip) for s in p.steps), e.head, e.tail)
        for p in paths
    ]


def cycle_indicator(g: Graph, edge_id: int, closing_path: Path) -> np.ndarray:
    """Signed edge-indicator vector of the cycle (edge + closing path).

    The cycle is traversed tail -> head along the edge, then back along the
    path; entries are +1/-1 for edges traversed with/against their stored
    orientation.  The result lies in the null space of the incidence matrix.
    """
    vec = np.zeros(g.edge_count)
    vec[edge_id - 1] = 1.0
    for s in closing_path.steps:
        vec[s.edge_id - 1] = 1.0 if s.flip == 0 else -1.0
    return vec


def edge_subgraph(g: Graph, edge_ids) -> tuple[Graph, dict[int, int]]:
    """Subgraph on the same nodes keeping only ``edge_ids``.

    Kept edges are renumbered densely in increasing original-id order.
    Returns the subgraph and the mapping old id -> new id.
    """
    keep = sorted(set(edge_ids))
    for k in keep:
        g.edge(k)
    id_map = {old: new + 1 for new, old in enumerate(keep)}
    edges = tuple(
        Edge(id_map[e.id], e.tail, e.head) for e in g.edges if e.id in id_map
    )
    return Graph(g.node_count, edges), id_map
