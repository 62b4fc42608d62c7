"""
Graphs, transition matrices and node marking.

Node ids are 1-indexed at every public boundary (``V = {1, ..., n}``) and
0-indexed inside numpy arrays. Edges are stored as ordered pairs ``(u, v)``
with ``u < v``.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

ROW_SUM_TOL = 1e-12
MIN_NODES_FOR_MARKING = 4


class GraphError(ValueError):
    """Invalid graph, matrix or marking."""


class EdgeListParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _canonical(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``1..n``."""

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise GraphError(f"node count must be a positive integer, got {self.n!r}")
        canon = set()
        for pair in self.edges:
            u, v = (int(x) for x in pair)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphError(f"edge {{{u},{v}}} has an endpoint outside 1..{self.n}")
            canon.add(_canonical(u, v))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", frozenset(canon))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def complete_edge_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return _canonical(u, v) in self.edges

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (0-indexed)."""
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u - 1, v - 1] = a[v - 1, u - 1] = 1.0
        return a

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return deg

    def is_connected(self) -> bool:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u - 1].append(v - 1)
            nbrs[v - 1].append(u - 1)
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class MarkedSet:
    """Ordered set of marked node ids (1-indexed, duplicates dropped)."""

    members: tuple[int, ...] = ()

    def __post_init__(self):
        seen: dict[int, None] = {}
        for x in self.members:
            seen.setdefault(int(x), None)
        object.__setattr__(self, "members", tuple(seen))

    @property
    def m(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def validate(self, n: int) -> None:
        for x in self.members:
            if not 1 <= x <= n:
                raise GraphError(f"marked node {x} outside 1..{n}")

    def indices(self) -> np.ndarray:
        """0-based indices, in member order."""
        return np.array([x - 1 for x in self.members], dtype=int)


def as_marked_set(marked: MarkedSet | Iterable[int]) -> MarkedSet:
    return marked if isinstance(marked, MarkedSet) else MarkedSet(tuple(marked))


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic transition matrix; row index is the source vertex.

    ``marked`` lists the absorbing nodes whose rows are standard basis rows.
    The entry array is stored read-only.
    """

    entries: np.ndarray
    marked: MarkedSet = MarkedSet()

    def __post_init__(self):
        p = np.array(self.entries, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise GraphError(f"transition matrix must be square and non-empty, got shape {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise GraphError("transition matrix has negative or non-finite entries")
        sums = p.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if bad.size:
            raise GraphError(
                f"row {bad[0] + 1} sums to {sums[bad[0]]!r}, matrix is not row-stochastic"
            )
        marked = as_marked_set(self.marked)
        marked.validate(p.shape[0])
        for x in marked.indices():
            if p[x, x] != 1.0:
                raise GraphError(f"marked node {x + 1} does not have a delta row")
        p.setflags(write=False)
        object.__setattr__(self, "entries", p)
        object.__setattr__(self, "marked", marked)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def unmarked_indices(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.marked.indices()] = False
        return np.flatnonzero(mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return (
            self.marked.members == other.marked.members
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None  # type: ignore[assignment]


# --------------------------------------------------------------------------
# Input formats
# --------------------------------------------------------------------------

def _read_text(text: str | TextIO) -> str:
    return text if isinstance(text, str) else text.read()


def parse_edge_list(text: str | TextIO) -> Graph:
    """Parse the edge-list text format.

    One edge ``u v`` per line, ``#`` starts a comment, and an optional
    ``n <int>`` header raises the node count above the largest id seen.
    """
    content = _read_text(text)
    header_n: int | None = None
    edges: set[tuple[int, int]] = set()
    max_id = 0
    saw_content = False
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        saw_content = True
        tokens = line.split()
        if tokens[0].lower() == "n":
            if len(tokens) != 2:
                raise EdgeListParseError("header must be 'n <int>'", lineno)
            try:
                header_n = int(tokens[1])
            except ValueError:
                raise EdgeListParseError(f"non-integer node count {tokens[1]!r}", lineno) from None
            if header_n < 1:
                raise EdgeListParseError(f"node count must be positive, got {header_n}", lineno)
            continue
        if len(tokens) != 2:
            raise EdgeListParseError(f"expected two node ids, got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer token in {line!r}", lineno) from None
        if u < 1 or v < 1:
            raise EdgeListParseError(f"node ids are 1-indexed, got {u} {v}", lineno)
        if u == v:
            raise EdgeListParseError(f"self-loop on node {u}", lineno)
        edges.add(_canonical(u, v))
        max_id = max(max_id, u, v)
    if not saw_content:
        raise EdgeListParseError("empty edge list")
    n = max_id if header_n is None else header_n
    if header_n is not None and header_n < max_id:
        raise EdgeListParseError(f"header n {header_n} is smaller than node id {max_id}")
    return Graph(n, frozenset(edges))


def parse_adjacency_csv(text: str | TextIO) -> Graph:
    """Parse a symmetric 0/1 adjacency matrix given as CSV rows."""
    rows = [r for r in csv.reader(io.StringIO(_read_text(text))) if any(c.strip() for c in r)]
    if not rows:
        raise EdgeListParseError("empty adjacency matrix")
    n = len(rows)
    a = np.zeros((n, n), dtype=int)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise EdgeListParseError(f"row has {len(row)} entries, expected {n}", i + 1)
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise EdgeListParseError(f"entry {cell!r} is not 0 or 1", i + 1)
            a[i, j] = int(cell)
    if np.any(np.diag(a)):
        i = int(np.flatnonzero(np.diag(a))[0])
        raise EdgeListParseError(f"self-loop on node {i + 1}", i + 1)
    if not np.array_equal(a, a.T):
        raise EdgeListParseError("adjacency matrix is not symmetric")
    iu, ju = np.nonzero(np.triu(a))
    return Graph(n, frozenset((int(i) + 1, int(j) + 1) for i, j in zip(iu, ju)))


def load_graph(path: str | Path) -> Graph:
    """Load ``.csv`` files as adjacency matrices and anything else as an edge list."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return parse_adjacency_csv(text)
    return parse_edge_list(text)


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Generators and edits
# --------------------------------------------------------------------------

def complete_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"complete graph needs n >= 1, got {n}")
    return Graph(n, frozenset((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)))


def star_graph(n: int) -> Graph:
    """Node 1 joined to every other node."""
    if n < 2:
        raise GraphError(f"star graph needs n >= 2, got {n}")
    return Graph(n, frozenset((1, v) for v in range(2, n + 1)))


def path_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"path graph needs n >= 1, got {n}")
    return Graph(n, frozenset((v, v + 1) for v in range(1, n)))


def remove_edges(g: Graph, victims: Iterable[tuple[int, int]]) -> Graph:
    """Return a copy of ``g`` without ``victims``; each must currently be an edge."""
    remaining = set(g.edges)
    for u, v in victims:
        pair = _canonical(int(u), int(v))
        if pair not in remaining:
            raise GraphError(f"edge {{{pair[0]},{pair[1]}}} is not in the graph")
        remaining.remove(pair)
    return Graph(g.n, frozenset(remaining))


# --------------------------------------------------------------------------
# Markov chain
# --------------------------------------------------------------------------

def transition_matrix(g: Graph) -> StochasticMatrix:
    """Uniform random-walk matrix ``p_xy = 1/deg(x)`` on the edges of ``g``."""
    a = g.adjacency()
    deg = a.sum(axis=1)
    isolated = np.flatnonzero(deg == 0)
    if isolated.size:
        raise GraphError(f"node {isolated[0] + 1} is isolated; its row cannot be normalized")
    return StochasticMatrix(a / deg[:, None])


def mark_nodes(p: StochasticMatrix, marked: MarkedSet | Iterable[int]) -> StochasticMatrix:
    """Replace the rows of marked nodes by delta rows (absorbing states).

    Marking an already-marked node is a no-op, so the operation is idempotent.
    """
    marked = as_marked_set(marked)
    marked.validate(p.n)
    entries = np.array(p.entries)
    for x in marked.indices():
        entries[x] = 0.0
        entries[x, x] = 1.0
    combined = MarkedSet(p.marked.members + marked.members)
    return StochasticMatrix(entries, combined)


def is_complete_classical(g: Graph) -> bool:
    """Check every node pair for an edge (the classical O(n^2) baseline)."""
    for u in range(1, g.n + 1):
        for v in range(u + 1, g.n + 1):
            if (u, v) not in g.edges:
                return False
    return True


def optimal_marked_count(n: int, a: float) -> int:
    """Nearest integer to ``(n - 1) / a``, exact halves rounded up."""
    if n < MIN_NODES_FOR_MARKING:
        raise GraphError(f"graph too small for optimal marking: n={n} < {MIN_NODES_FOR_MARKING}")
    if not a > 1:
        raise GraphError(f"slope a must exceed 1, got {a}")
    m = math.floor((n - 1) / a + 0.5)
    return min(max(m, 1), n - 1)
