"""Closed-form influence of graph elements on a loss over the ranking.

The derivative of ``f(r)`` with respect to the adjacency entry at matrix
position ``(i, j)`` factors as ``c * y[i] * r[j]`` where
``y = (I - c*A')^{-1} grad_f(r)``; the full gradient matrix is the rank-one
outer product ``c * y r'`` and is never materialized. In the column
convention used by :class:`~rankaudit.graph.Graph` the matrix position of
arc ``src -> dst`` is ``(dst, src)``, so the influence of that arc is
``c * y[dst] * r[src]``; all public edge APIs here take ``(src, dst)``
pairs and do this mapping internally.

For undirected graphs a weight perturbation touches both stored arcs, so
the influence of edge ``{u, v}`` is the symmetrized sum
``entry(u, v) + entry(v, u)`` for ``u != v`` and the bare diagonal entry
for self loops.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import ElementKind
from .losses import SquaredL2
from .solvers import (DEFAULT_MAX_ITER, DEFAULT_TOL, RankVector,
                      resolvent_transpose_apply)


class GradientVariant(enum.Enum):
    PLAIN = "plain"
    L1_NORMALIZED = "l1-normalized"


@dataclass(frozen=True)
class GradientFactors:
    """The two dense factors of the edge-gradient matrix; memory is O(n).

    ``entry(i, j)`` is the derivative of the loss with respect to the
    adjacency entry at row ``i``, column ``j`` (that is: the arc
    ``j -> i``).
    """

    y: np.ndarray
    ranking: RankVector
    damping: float
    variant: GradientVariant
    directed: bool

    def __post_init__(self):
        self.y.flags.writeable = False

    def entry(self, i, j):
        return self.damping * self.y[i] * self.ranking.values[j]

    def entries(self, rows, cols):
        """Vectorized :meth:`entry` over index arrays."""
        return self.damping * self.y[rows] * self.ranking.values[cols]


def gradient_factors(graph, ranking, loss, c, tol=DEFAULT_TOL,
                     max_iter=DEFAULT_MAX_ITER):
    """Factorize the gradient of ``loss`` at ``ranking`` on ``graph``.

    ``ranking`` must be the converged ranking of ``graph`` at damping
    ``c``; the left factor is obtained with one adjoint resolvent solve on
    the loss gradient (for squared L2 that is twice the reverse-graph
    personalized ranking of ``r``).
    """
    grad = np.asarray(loss.gradient(ranking.values), dtype=np.float64)
    y = resolvent_transpose_apply(graph, grad, c, tol, max_iter)
    return GradientFactors(y=y, ranking=ranking, damping=float(c),
                           variant=GradientVariant.PLAIN,
                           directed=graph.directed)


def gradient_factors_normalized(graph, ranking, loss, c, tol=DEFAULT_TOL,
                                max_iter=DEFAULT_MAX_ITER):
    """Gradient factors for the loss evaluated on the L1-normalized ranking.

    Supports squared L2 only: with ``s = sum(r)`` and ``rhat = r / s`` the
    gradient of ``f(rhat)`` with respect to ``r`` is
    ``(2/s) * rhat - (2*f(rhat)/s) * 1``, which feeds the same adjoint
    solve; the right factor stays the raw ranking. Entries of the result
    are invariant to any positive rescaling of the teleport vector.
    """
    if not isinstance(loss, SquaredL2):
        raise ValidationError(
            "the normalized-ranking variant is defined for the squared-L2 "
            f"loss only, got {loss.describe()}")
    values = ranking.values
    total = float(values.sum())
    if total <= 0.0:
        raise ValidationError(
            f"ranking mass must be positive for normalization, got {total!r}")
    rhat = values / total
    fhat = loss.value(rhat)
    b = (2.0 / total) * rhat - (2.0 * fhat / total)
    y = resolvent_transpose_apply(graph, b, c, tol, max_iter)
    return GradientFactors(y=y, ranking=ranking, damping=float(c),
                           variant=GradientVariant.L1_NORMALIZED,
                           directed=graph.directed)


def make_gradient_factors(graph, ranking, loss, c, tol=DEFAULT_TOL,
                          max_iter=DEFAULT_MAX_ITER, normalized=False):
    """Dispatch between the plain and normalized-ranking variants."""
    fn = gradient_factors_normalized if normalized else gradient_factors
    return fn(graph, ranking, loss, c, tol, max_iter)


def edge_influence(factors, src, dst):
    """Influence of the edge ``src -> dst`` (must exist in the graph).

    Directed: the gradient entry at the arc's matrix position. Undirected:
    the symmetrized value (both stored arcs move together); self loops use
    the single diagonal entry.
    """
    if factors.directed:
        return float(factors.entry(dst, src))
    if src == dst:
        return float(factors.entry(src, src))
    return float(factors.entry(src, dst) + factors.entry(dst, src))


def edge_influence_table(factors, graph):
    """Influence of every existing logical edge, in canonical edge order.

    Returns ``(u, v, values)`` aligned with ``graph.edge_index``; for
    undirected graphs each edge appears once with its symmetrized value.
    """
    u, v = graph.edge_index
    if factors.directed:
        vals = factors.entries(v, u)
    else:
        vals = np.where(u == v, factors.entries(u, u),
                        factors.entries(u, v) + factors.entries(v, u))
    return u, v, vals


def node_influence(factors, graph, node):
    """Aggregate influence of every existing arc incident to ``node``.

    Summing the directed influence of each stored arc gives each
    undirected edge its symmetrized value exactly once (the two stored
    arcs contribute the two halves); a self loop contributes its diagonal
    entry once.
    """
    if not 0 <= node < graph.n:
        raise ValidationError(f"node id out of range: {node}")
    r = factors.ranking.values
    y = factors.y
    c = factors.damping
    raw = graph.matrix(raw=True)
    out_targets = raw.indices[raw.indptr[node]:raw.indptr[node + 1]]
    csr = graph._csr
    in_sources = csr.indices[csr.indptr[node]:csr.indptr[node + 1]]
    total = c * r[node] * float(y[out_targets[out_targets != node]].sum())
    total += c * y[node] * float(r[in_sources[in_sources != node]].sum())
    if graph.has_arc(node, node):
        total += c * y[node] * r[node]
    return float(total)


def node_influence_table(factors, graph):
    """Vectorized :func:`node_influence` for all nodes at once."""
    r = factors.ranking.values
    y = factors.y
    c = factors.damping
    raw = graph.matrix(raw=True)
    csr = graph._csr
    n = graph.n
    out_y = np.bincount(np.repeat(np.arange(n), np.diff(raw.indptr)),
                        weights=y[raw.indices], minlength=n)
    in_r = np.bincount(np.repeat(np.arange(n), np.diff(csr.indptr)),
                       weights=r[csr.indices], minlength=n)
    loops = raw.diagonal() != 0.0
    # Self loops land in both sums; Definition counts them once.
    out_y[loops] -= y[loops]
    in_r[loops] -= r[loops]
    vals = c * (r * out_y + y * in_r)
    vals[loops] += c * y[loops] * r[loops]
    return vals


def subgraph_influence(factors, graph, nodes):
    """Aggregate influence of the arcs induced by ``nodes``.

    As with nodes, summing stored-arc influences yields symmetrized
    undirected values counted once per edge.
    """
    member = np.zeros(graph.n, dtype=bool)
    ids = np.asarray(list(nodes), dtype=np.int64)
    if len(ids) and (ids.min() < 0 or ids.max() >= graph.n):
        raise ValidationError("node id out of range in subgraph")
    member[ids] = True
    src, dst, _ = graph.arcs()
    pick = member[src] & member[dst]
    return float(factors.entries(dst[pick], src[pick]).sum())


def element_set_influence(factors, graph, elements):
    """Static influence of an element set under fixed gradient factors.

    Edges and subgraphs follow their aggregation rules; a node set scores
    the sum of its members' node influences.
    """
    if elements.kind is ElementKind.EDGES:
        return float(sum(edge_influence(factors, u, v)
                         for u, v in elements.members))
    if elements.kind is ElementKind.NODES:
        return float(sum(node_influence(factors, graph, v)
                         for v in elements.members))
    return subgraph_influence(factors, graph, elements.members)
