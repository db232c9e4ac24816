"""Sparse undirected graphs: file ingestion, preprocessing, degree normalization."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

COLUMN_STOCHASTIC = "column"
SYMMETRIC = "symmetric"
VARIANTS = (COLUMN_STOCHASTIC, SYMMETRIC)


class GraphParseError(ValueError):
    """Malformed row in an edge or label stream."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class GraphValidationError(ValueError):
    """Input that parses but violates a structural requirement."""


@dataclass(frozen=True)
class LoadReport:
    """Counts gathered while loading a graph from raw streams."""

    raw_nodes: int
    raw_edge_rows: int
    retained_nodes: int
    undirected_edges: int
    self_loops_dropped: int
    isolated_removed: int
    labels_attached: int
    labels_dropped: int
    n_labels: int


@dataclass(eq=False)
class Graph:
    """Undirected weighted graph over contiguous integer node ids.

    ``edges`` holds one row per undirected edge in canonical ``u <= v`` order
    with no duplicates; ``labels`` maps every node to a dense label id, with
    ``-1`` meaning unlabeled. Instances are shared freely across solver
    workers, so treat them as immutable after construction.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    id_map: dict[str, int]
    label_names: list[str]

    @cached_property
    def _adjacency(self) -> sp.csr_matrix:
        u = self.edges[:, 0]
        v = self.edges[:, 1]
        off = u != v  # self-loops get a single diagonal entry
        rows = np.concatenate([u, v[off]])
        cols = np.concatenate([v, u[off]])
        data = np.concatenate([self.weights, self.weights[off]])
        mat = sp.coo_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return mat.tocsr()

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric weighted adjacency matrix (CSR). Do not mutate."""
        return self._adjacency

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degree per node; a self-loop contributes its weight once."""
        return np.asarray(self._adjacency.sum(axis=1)).ravel()

    def neighbors(self, node: int) -> np.ndarray:
        adj = self._adjacency
        return adj.indices[adj.indptr[node]:adj.indptr[node + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors(u)

    def label_sets(self) -> dict[int, np.ndarray]:
        """Nodes per label id, sorted, for every label that occurs."""
        out: dict[int, np.ndarray] = {}
        for label in np.unique(self.labels):
            if label >= 0:
                out[int(label)] = np.flatnonzero(self.labels == label)
        return out

    def with_edges_added(self, pairs: Sequence[tuple[int, int]], weight: float = 1.0) -> "Graph":
        """New graph with extra undirected edges; existing arrays are shared.

        Raises GraphValidationError for out-of-range endpoints, self-loops,
        or pairs that duplicate an existing edge.
        """
        if len(pairs) == 0:
            return self
        extra = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if extra.min() < 0 or extra.max() >= self.n:
            raise GraphValidationError("edge endpoint out of range")
        if np.any(extra[:, 0] == extra[:, 1]):
            raise GraphValidationError("self-loops cannot be added")
        extra = np.sort(extra, axis=1)
        seen = {(int(a), int(b)) for a, b in self.edges}
        for a, b in extra:
            key = (int(a), int(b))
            if key in seen:
                raise GraphValidationError(f"edge {key} already present")
            seen.add(key)
        edges = np.vstack([self.edges, extra])
        weights = np.concatenate([self.weights, np.full(len(extra), float(weight))])
        return Graph(self.n, edges, weights, self.labels, self.id_map, self.label_names)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Sequence[float] | None = None,
        labels: Mapping[int, int] | Sequence[int] | None = None,
        label_names: Sequence[str] | None = None,
        keep_self_loops: bool = False,
    ) -> "Graph":
        """Build a graph from integer edge pairs.

        Duplicate pairs (either orientation) collapse to one undirected edge
        keeping the maximum weight. Self-loops are dropped unless
        ``keep_self_loops``. Every node must end up with at least one
        incident edge; ``labels`` may be a ``{node: label_id}`` mapping or a
        full length-``n`` sequence using ``-1`` for unlabeled.
        """
        if n < 1:
            raise GraphValidationError("graph needs at least one node")
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphValidationError("edge endpoint out of range")
        w = np.ones(len(arr)) if weights is None else np.asarray(weights, dtype=np.float64)
        if w.shape != (len(arr),):
            raise GraphValidationError("weights must align with edges")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise GraphValidationError("edge weights must be finite and nonnegative")
        loops = arr[:, 0] == arr[:, 1]
        if not keep_self_loops and loops.any():
            arr, w = arr[~loops], w[~loops]
        arr = np.sort(arr, axis=1)
        best: dict[tuple[int, int], float] = {}
        for (a, b), wt in zip(arr, w):
            key = (int(a), int(b))
            best[key] = max(best.get(key, 0.0), float(wt))
        if not best:
            raise GraphValidationError("empty graph after preprocessing")
        keys = sorted(best)
        edge_arr = np.asarray(keys, dtype=np.int64)
        weight_arr = np.asarray([best[k] for k in keys])
        present = np.zeros(n, dtype=bool)
        present[edge_arr.ravel()] = True
        if not present.all():
            missing = np.flatnonzero(~present)
            raise GraphValidationError(f"isolated nodes not allowed: {missing.tolist()}")
        label_arr = np.full(n, -1, dtype=np.int64)
        if labels is not None:
            if isinstance(labels, Mapping):
                for node, lab in labels.items():
                    if not 0 <= int(node) < n:
                        raise GraphValidationError(f"label references unknown node {node}")
                    label_arr[int(node)] = int(lab)
            else:
                given = np.asarray(labels, dtype=np.int64)
                if given.shape != (n,):
                    raise GraphValidationError("label sequence must have one entry per node")
                label_arr = given.copy()
        names = list(label_names) if label_names is not None else []
        return cls(n, edge_arr, weight_arr, label_arr, {}, names)

    @classmethod
    def from_adjacency(
        cls,
        adjacency: sp.spmatrix | np.ndarray,
        labels: Mapping[int, int] | Sequence[int] | None = None,
        label_names: Sequence[str] | None = None,
    ) -> "Graph":
        """Build a graph from a symmetric nonnegative adjacency matrix.

        Diagonal entries are kept as self-loops.
        """
        mat = sp.csr_matrix(adjacency)
        if mat.shape[0] != mat.shape[1]:
            raise GraphValidationError("adjacency must be square")
        if mat.nnz and (not np.all(np.isfinite(mat.data)) or np.any(mat.data < 0)):
            raise GraphValidationError("adjacency entries must be finite and nonnegative")
        gap = mat - mat.T
        if gap.nnz and np.max(np.abs(gap.data)) > 1e-12:
            raise GraphValidationError("adjacency must be symmetric")
        coo = sp.triu(mat).tocoo()
        edges = np.column_stack([coo.row, coo.col]).astype(np.int64)
        return cls.from_edges(
            mat.shape[0], edges, coo.data, labels, label_names, keep_self_loops=True
        )


def _read_lines(source) -> Iterator[tuple[int, str]]:
    if hasattr(source, "read"):
        for number, line in enumerate(source, 1):
            yield number, line
    else:
        with open(source, "r", encoding="utf-8") as handle:
            for number, line in enumerate(handle, 1):
                yield number, line


def _data_rows(source) -> Iterator[tuple[int, list[str]]]:
    for number, line in _read_lines(source):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def load_graph(edge_source, label_source) -> tuple[Graph, LoadReport]:
    """Read whitespace-delimited edge and label files into a preprocessed Graph.

    Edge rows are ``<src> <dst> [weight]`` with node ids as opaque strings
    and an optional nonnegative weight (default 1.0). Label rows are
    ``<node> <label>``. Blank lines and ``#`` comments are skipped in both.

    Preprocessing: duplicate directed pairs collapse to one undirected edge
    of maximum weight, self-loops are dropped, nodes left with no edge
    (including nodes that only appear in the label stream) are removed, and
    surviving nodes are renumbered contiguously in first-seen order. Label
    strings get dense ids in first-seen order over the label stream.

    Parameters
    ----------
    edge_source, label_source : path or text file object

    Returns
    -------
    (Graph, LoadReport)
    """
    ids: dict[str, int] = {}

    def intern(token: str) -> int:
        if token not in ids:
            ids[token] = len(ids)
        return ids[token]

    edge_rows: list[tuple[int, int, float]] = []
    raw_edge_rows = 0
    for number, fields in _data_rows(edge_source):
        if len(fields) not in (2, 3):
            raise GraphParseError(f"expected 2 or 3 fields, got {len(fields)}", number)
        weight = 1.0
        if len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError:
                raise GraphParseError(f"bad edge weight {fields[2]!r}", number) from None
            if not np.isfinite(weight) or weight < 0:
                raise GraphParseError(f"edge weight must be finite and nonnegative, got {weight}", number)
        raw_edge_rows += 1
        edge_rows.append((intern(fields[0]), intern(fields[1]), weight))

    label_rows: list[tuple[int, int]] = []
    label_to_id: dict[str, int] = {}
    for number, fields in _data_rows(label_source):
        if len(fields) != 2:
            raise GraphParseError(f"expected 2 fields, got {len(fields)}", number)
        node = intern(fields[0])
        label = label_to_id.setdefault(fields[1], len(label_to_id))
        label_rows.append((node, label))

    raw_nodes = len(ids)
    best: dict[tuple[int, int], float] = {}
    self_loops = 0
    for src, dst, weight in edge_rows:
        if src == dst:
            self_loops += 1
            continue
        key = (src, dst) if src < dst else (dst, src)
        best[key] = max(best.get(key, 0.0), weight)
    if not best:
        raise GraphValidationError("empty graph after preprocessing")

    degree = np.zeros(raw_nodes, dtype=np.int64)
    for a, b in best:
        degree[a] += 1
        degree[b] += 1
    keep = degree > 0
    remap = np.full(raw_nodes, -1, dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    retained = int(keep.sum())

    keys = sorted(best)
    edges = np.asarray([(remap[a], remap[b]) for a, b in keys], dtype=np.int64)
    edges = np.sort(edges, axis=1)  # remapping can reorder a pair
    weights = np.asarray([best[k] for k in keys])

    labels = np.full(retained, -1, dtype=np.int64)
    dropped = 0
    for node, label in label_rows:
        if keep[node]:
            labels[remap[node]] = label
        else:
            dropped += 1

    id_map = {token: int(remap[raw]) for token, raw in ids.items() if keep[raw]}
    label_names = [name for name, _ in sorted(label_to_id.items(), key=lambda item: item[1])]
    graph = Graph(retained, edges, weights, labels, id_map, label_names)
    report = LoadReport(
        raw_nodes=raw_nodes,
        raw_edge_rows=raw_edge_rows,
        retained_nodes=retained,
        undirected_edges=len(best),
        self_loops_dropped=self_loops,
        isolated_removed=raw_nodes - retained,
        labels_attached=int((labels >= 0).sum()),
        labels_dropped=dropped,
        n_labels=len(label_to_id),
    )
    return graph, report


@dataclass(eq=False)
class TransitionMatrix:
    """Degree-normalized sparse walk operator, column-accessible."""

    variant: str
    matrix: sp.csc_matrix
    column_sums: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _normalized(graph: Graph, variant: str) -> TransitionMatrix:
    deg = graph.degrees
    if np.any(deg <= 0):
        bad = np.flatnonzero(deg <= 0)
        raise GraphValidationError(f"nodes with zero weighted degree: {bad.tolist()}")
    u = graph.edges[:, 0]
    v = graph.edges[:, 1]
    w = graph.weights
    off = u != v
    if variant == COLUMN_STOCHASTIC:
        # entry (row=i, col=j) = w_ij / deg_j: probability of stepping j -> i
        rows = np.concatenate([v, u[off]])
        cols = np.concatenate([u, v[off]])
        data = np.concatenate([w / deg[u], w[off] / deg[v[off]]])
    else:
        # same value for both orientations keeps the matrix exactly symmetric
        scaled = w / np.sqrt(deg[u] * deg[v])
        rows = np.concatenate([u, v[off]])
        cols = np.concatenate([v, u[off]])
        data = np.concatenate([scaled, scaled[off]])
    mat = sp.coo_matrix((data, (rows, cols)), shape=(graph.n, graph.n)).tocsc()
    return TransitionMatrix(variant, mat, np.asarray(mat.sum(axis=0)).ravel())


def column_stochastic(graph: Graph) -> TransitionMatrix:
    """Adjacency with each column scaled to sum to one."""
    return _normalized(graph, COLUMN_STOCHASTIC)


def symmetric_normalize(graph: Graph) -> TransitionMatrix:
    """Symmetric normalization: adjacency scaled by inverse square-root degrees."""
    return _normalized(graph, SYMMETRIC)
