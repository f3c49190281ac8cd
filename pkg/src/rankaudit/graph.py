"""Sparse graph container with the conventions the auditing math relies on.

Matrix convention
-----------------
The adjacency is stored in *column* convention: entry ``A[d, s]`` holds the
weight of the arc ``s -> d``, so column ``s`` lists the out-arcs of node
``s`` and row ``d`` lists its in-arcs. Under ``NormMode.COLUMN_STOCHASTIC``
every column with at least one arc is scaled to sum to one, which makes the
matrix the usual PageRank transition matrix. All public APIs take and
report arcs as ``(src, dst)`` pairs; only :meth:`Graph.matrix` exposes the
column-convention storage.

Graphs are immutable: mutating operations return new snapshots. Raw input
weights are kept as the source of truth so that removals re-normalize
exactly, independent of the order in which elements were removed.
"""

import enum
import json
import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ._kernels import column_sums
from .errors import EdgeListParseError, ElementNotFoundError, ValidationError

_STOCHASTIC_TOL = 1e-12


class NormMode(enum.Enum):
    COLUMN_STOCHASTIC = "column"
    RAW = "raw"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown normalization mode {value!r}; expected 'column' or 'raw'"
            ) from None


class ElementKind(enum.Enum):
    EDGES = "edges"
    NODES = "nodes"
    SUBGRAPH = "subgraph"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown element kind {value!r}; expected 'edges', 'nodes' or 'subgraph'"
            ) from None


@dataclass(frozen=True)
class ElementSet:
    """An ordered, duplicate-free collection of graph elements.

    ``members`` holds ``(src, dst)`` node-id pairs for ``EDGES`` and node
    ids for ``NODES``/``SUBGRAPH``. For subgraphs only the node set is
    stored; the induced arc set is always derived from the graph at hand.
    """

    kind: ElementKind
    members: tuple

    def __post_init__(self):
        kind = ElementKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ElementKind.EDGES:
            members = tuple((int(u), int(v)) for u, v in self.members)
        else:
            members = tuple(int(v) for v in self.members)
        if len(set(members)) != len(members):
            raise ValidationError("element set contains duplicates")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)


def _as_canonical_csc(mat, n):
    csc = sp.csc_matrix(mat, shape=(n, n), dtype=np.float64, copy=True)
    csc.sum_duplicates()
    csc.sort_indices()
    csc.eliminate_zeros()
    return csc


def _freeze(csc):
    csc.data.flags.writeable = False
    csc.indices.flags.writeable = False
    csc.indptr.flags.writeable = False
    return csc


class Graph:
    """Immutable weighted graph indexed by dense node ids ``0..n-1``."""

    def __init__(self, raw, directed, norm_mode, labels=None):
        if raw.shape[0] != raw.shape[1]:
            raise ValidationError("adjacency matrix must be square")
        n = raw.shape[0]
        raw = _as_canonical_csc(raw, n)
        if raw.nnz and not np.all(np.isfinite(raw.data)):
            raise ValidationError("arc weights must be finite")
        if raw.nnz and raw.data.min() < 0.0:
            raise ValidationError("arc weights must be non-negative")
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise ValidationError(
                    f"label table has {len(labels)} entries for {n} nodes")
            if len(set(labels)) != n:
                raise ValidationError("node labels must be unique")
        if not directed:
            if (raw != raw.T).nnz != 0:
                raise ValidationError(
                    "undirected graph requires a symmetric arc multiset")
        self.n = n
        self.directed = bool(directed)
        self.norm_mode = NormMode.parse(norm_mode)
        self.labels = labels
        self._raw = _freeze(raw)
        if self.norm_mode is NormMode.COLUMN_STOCHASTIC:
            sums = column_sums(raw.indptr, raw.data)
            scale = np.repeat(sums, np.diff(raw.indptr))
            data = np.divide(raw.data, scale, out=np.zeros_like(raw.data),
                             where=scale > 0.0)
            effective = sp.csc_matrix((data, raw.indices.copy(), raw.indptr.copy()),
                                      shape=(n, n))
        else:
            effective = raw
        self._csc = _freeze(effective)
        self._csr = effective.tocsr()
        self._csr.sort_indices()

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_adjacency(cls, matrix, directed=True, norm_mode=NormMode.COLUMN_STOCHASTIC,
                       labels=None):
        """Build from a conventional adjacency where ``M[i, j]`` is arc ``i -> j``."""
        m = sp.csc_matrix(matrix, dtype=np.float64)
        return cls(m.T.tocsc(), directed, norm_mode, labels)

    @classmethod
    def from_edges(cls, src, dst, weight=None, n=None, directed=True,
                   norm_mode=NormMode.COLUMN_STOCHASTIC, labels=None):
        """Build from parallel arrays of logical edges.

        For undirected graphs each pair is mirrored automatically (self
        loops are stored once). Duplicate arcs merge by summing weights.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if weight is None:
            weight = np.ones(len(src))
        weight = np.asarray(weight, dtype=np.float64)
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        if len(src) and (src.min() < 0 or dst.min() < 0 or
                         src.max() >= n or dst.max() >= n):
            raise ValidationError("edge endpoints out of range")
        if not directed:
            keep = src != dst
            mirrored_src = dst[keep]
            mirrored_dst = src[keep]
            src = np.concatenate([src, mirrored_src])
            dst = np.concatenate([dst, mirrored_dst])
            weight = np.concatenate([weight, weight[keep]])
        raw = sp.coo_matrix((weight, (dst, src)), shape=(n, n)).tocsc()
        return cls(raw, directed, norm_mode, labels)

    # -- basic accessors -------------------------------------------------

    @property
    def arc_count(self):
        """Number of stored arcs (an undirected edge contributes two)."""
        return self._raw.nnz

    @cached_property
    def _self_loop_count(self):
        return int(np.count_nonzero(self._raw.diagonal()))

    @property
    def m(self):
        """Logical edge count; an undirected edge counts once."""
        if self.directed:
            return self.arc_count
        return (self.arc_count + self._self_loop_count) // 2

    def node_id(self, label):
        try:
            return self._label_ids[str(label)]
        except KeyError:
            raise ElementNotFoundError(f"unknown node label {label!r}") from None

    @cached_property
    def _label_ids(self):
        return {lab: i for i, lab in enumerate(self.labels)}

    def matrix(self, raw=False):
        """Column-convention adjacency (CSC). Treat as read-only."""
        return self._raw if raw else self._csc

    @cached_property
    def _arc_src(self):
        return np.repeat(np.arange(self.n, dtype=np.int64),
                         np.diff(self._raw.indptr))

    @cached_property
    def _arc_dst(self):
        return self._raw.indices.astype(np.int64)

    def arcs(self, raw=False):
        """All stored arcs as ``(src, dst, weight)`` arrays sorted by (src, dst)."""
        data = self._raw.data if raw else self._csc.data
        return self._arc_src, self._arc_dst, data

    @cached_property
    def edge_index(self):
        """Canonical logical edge list as ``(u, v)`` arrays.

        Directed graphs list every arc; undirected graphs list each edge
        once with ``u <= v``. Order is lexicographic by ``(u, v)``, which
        all tie-breaking in the package relies on.
        """
        src, dst, _ = self.arcs()
        if self.directed:
            return src, dst
        keep = src <= dst
        return src[keep], dst[keep]

    def has_arc(self, src, dst):
        return self._arc_position(src, dst) >= 0

    def arc_weight(self, src, dst, raw=False):
        pos = self._arc_position(src, dst)
        if pos < 0:
            raise ElementNotFoundError(
                f"arc ({self.labels[src]} -> {self.labels[dst]}) not present")
        return float((self._raw if raw else self._csc).data[pos])

    def out_degree(self, v):
        return int(self._raw.indptr[v + 1] - self._raw.indptr[v])

    def in_degree(self, v):
        csr = self._csr
        return int(csr.indptr[v + 1] - csr.indptr[v])

    def degrees(self):
        """Arc-count degrees: out-arcs for undirected graphs, in+out for directed."""
        out = np.diff(self._raw.indptr)
        if not self.directed:
            return out.astype(np.int64)
        inn = np.diff(self._csr.indptr)
        return (out + inn).astype(np.int64)

    def _arc_position(self, src, dst):
        """Storage position of arc ``src -> dst`` in the CSC arrays, or -1."""
        if not (0 <= src < self.n and 0 <= dst < self.n):
            raise ValidationError(f"node id out of range: {(src, dst)}")
        lo, hi = self._raw.indptr[src], self._raw.indptr[src + 1]
        rows = self._raw.indices[lo:hi]
        k = int(np.searchsorted(rows, dst))
        if k < len(rows) and rows[k] == dst:
            return int(lo + k)
        return -1

    # -- mutation (returns new snapshots) ---------------------------------

    def _without_positions(self, positions):
        positions = np.unique(np.asarray(positions, dtype=np.int64))
        keep = np.ones(self._raw.nnz, dtype=bool)
        keep[positions] = False
        removed_per_col = np.zeros(self.n, dtype=np.int64)
        cols = np.searchsorted(self._raw.indptr, positions, side="right") - 1
        np.add.at(removed_per_col, cols, 1)
        indptr = np.concatenate(
            [[0], np.cumsum(np.diff(self._raw.indptr) - removed_per_col)])
        raw = sp.csc_matrix(
            (self._raw.data[keep], self._raw.indices[keep], indptr),
            shape=(self.n, self.n))
        return Graph(raw, self.directed, self.norm_mode, self.labels)

    def _edge_positions(self, src, dst):
        pos = self._arc_position(src, dst)
        if pos < 0:
            raise ElementNotFoundError(
                f"arc ({self.labels[src]} -> {self.labels[dst]}) not present")
        positions = [pos]
        if not self.directed and src != dst:
            positions.append(self._arc_position(dst, src))
        return positions

    def remove_edge(self, src, dst):
        """New graph without arc ``src -> dst`` (and its mirror if undirected)."""
        return self._without_positions(self._edge_positions(src, dst))

    def _node_positions(self, v):
        if not 0 <= v < self.n:
            raise ValidationError(f"node id out of range: {v}")
        out = np.arange(self._raw.indptr[v], self._raw.indptr[v + 1],
                        dtype=np.int64)
        inn = np.flatnonzero(self._raw.indices == v).astype(np.int64)
        return np.concatenate([out, inn])

    def remove_node_edges(self, v):
        """New graph with node ``v`` isolated; node count is unchanged."""
        return self._without_positions(self._node_positions(v))

    def _induced_positions(self, nodes):
        member = np.zeros(self.n, dtype=bool)
        ids = np.asarray(list(nodes), dtype=np.int64)
        if len(ids) and (ids.min() < 0 or ids.max() >= self.n):
            raise ValidationError("node id out of range in subgraph")
        member[ids] = True
        src, dst, _ = self.arcs()
        return np.flatnonzero(member[src] & member[dst]).astype(np.int64)

    def remove_induced_arcs(self, nodes):
        """New graph without the arcs whose both endpoints lie in ``nodes``."""
        return self._without_positions(self._induced_positions(nodes))

    def remove_elements(self, elements):
        """Remove an :class:`ElementSet` in one shot (order independent)."""
        if elements.kind is ElementKind.EDGES:
            positions = []
            for src, dst in elements.members:
                positions.extend(self._edge_positions(src, dst))
            positions = np.asarray(positions, dtype=np.int64)
        elif elements.kind is ElementKind.NODES:
            positions = np.concatenate(
                [self._node_positions(v) for v in elements.members]
                or [np.empty(0, dtype=np.int64)])
        else:
            positions = self._induced_positions(elements.members)
        return self._without_positions(positions)

    def reverse(self):
        """Transpose view serving the adjoint solves.

        Both the raw and the effective matrices are transposed exactly;
        weights are deliberately not re-normalized, so for column-stochastic
        graphs the reversed effective matrix is generally not stochastic.
        """
        out = Graph.__new__(Graph)
        out.n = self.n
        out.directed = self.directed
        out.norm_mode = self.norm_mode
        out.labels = self.labels
        out._raw = _freeze(self._raw.T.tocsc())
        out._csc = _freeze(self._csc.T.tocsc())
        out._csr = out._csc.tocsr()
        out._csr.sort_indices()
        return out

    def augment_node_attributes(self, weights, attr_labels=None):
        """Append attribute nodes fed by node->attribute arcs.

        ``weights`` is an ``a x n`` non-negative matrix; entry ``[i, s]``
        becomes the raw weight of arc ``s -> attribute_i``. Attribute nodes
        have no out-arcs, and normalization is re-applied over the widened
        raw matrix. The result is directed: attribute arcs are one-way.
        """
        w = sp.csc_matrix(weights, dtype=np.float64)
        if w.shape[0] == 0:
            return self
        if w.shape[1] != self.n:
            raise ValidationError(
                f"attribute matrix has {w.shape[1]} columns for {self.n} nodes")
        if w.nnz and w.data.min() < 0.0:
            raise ValidationError("attribute weights must be non-negative")
        a = w.shape[0]
        raw = sp.bmat([[self._raw, sp.csc_matrix((self.n, a))],
                       [w, sp.csc_matrix((a, a))]], format="csc")
        if attr_labels is None:
            attr_labels = [f"attr{i}" for i in range(a)]
        labels = self.labels + tuple(str(x) for x in attr_labels)
        return Graph(raw, True, self.norm_mode, labels)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return (f"Graph(n={self.n}, m={self.m}, {kind}, "
                f"norm={self.norm_mode.value})")


def load_edge_list(path, directed=None, norm_mode=None):
    """Parse a whitespace-separated ``src dst [weight]`` edge list.

    Lines starting with ``#`` are comments; weight defaults to 1.0 and
    duplicate arcs merge by summing. Node labels are arbitrary
    whitespace-free tokens and get dense ids in first-appearance order.
    ``directed``/``norm_mode`` default from the optional JSON sidecar
    ``<path>.json`` (keys ``directed``, ``normalization``), then to an
    undirected column-stochastic graph.
    """
    sidecar = _read_sidecar(path)
    if directed is None:
        directed = sidecar.get("directed", False)
    if norm_mode is None:
        norm_mode = sidecar.get("normalization", NormMode.COLUMN_STOCHASTIC)
    norm_mode = NormMode.parse(norm_mode)

    labels = []
    ids = {}

    def intern(token):
        i = ids.get(token)
        if i is None:
            i = len(labels)
            ids[token] = i
            labels.append(token)
        return i

    src, dst, wts = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) not in (2, 3):
                raise EdgeListParseError(
                    f"{path}:{lineno}: expected 'src dst [weight]', got {text!r}")
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise EdgeListParseError(
                        f"{path}:{lineno}: invalid weight {parts[2]!r}") from None
                if not math.isfinite(w):
                    raise ValidationError(
                        f"{path}:{lineno}: weight must be finite")
            if w < 0.0:
                raise ValidationError(
                    f"{path}:{lineno}: negative weight {w}")
            src.append(intern(parts[0]))
            dst.append(intern(parts[1]))
            wts.append(w)
    if not src:
        raise ValidationError(f"{path}: no edges found")
    return Graph.from_edges(src, dst, wts, n=len(labels), directed=directed,
                            norm_mode=norm_mode, labels=labels)


def _sidecar_path(path):
    return os.fspath(path) + ".json"


def _read_sidecar(path):
    sidecar = _sidecar_path(path)
    if not os.path.exists(sidecar):
        return {}
    try:
        with open(sidecar, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{sidecar}: unreadable metadata sidecar: {exc}")
    if not isinstance(meta, dict):
        raise ValidationError(f"{sidecar}: sidecar must be a JSON object")
    return meta


def write_sidecar(path, directed, norm_mode):
    """Record directedness and normalization next to an edge-list file."""
    meta = {"directed": bool(directed),
            "normalization": NormMode.parse(norm_mode).value}
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True)
        fh.write("\n")
