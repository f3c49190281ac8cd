"""Scikit-learn style front ends for the auditors and baseline selectors.

Every estimator follows the usual contract: constructor arguments are
stored verbatim (``get_params``/``set_params``/``clone`` work), ``fit``
does the work and exposes trailing-underscore attributes, ``transform``
returns the input graph with the fitted selection removed, and ``score``
reports the goodness of the selection on a graph. ``fit`` accepts either
a :class:`~rankaudit.graph.Graph` or a square adjacency matrix in the
conventional orientation (``M[i, j]`` is the arc ``i -> j``).
"""

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator

from . import baselines as _baselines
from .audit import audit as _run_audit
from .audit import evaluate_delta_f as _evaluate_delta_f
from ._validation import (as_graph, check_budget, check_damping, check_tol,
                          resolve_loss, resolve_teleport)
from .graph import ElementKind, Graph
from .solvers import DEFAULT_MAX_ITER, DEFAULT_TOL


class _BaseSelector(BaseEstimator):
    """Shared fit/transform/score plumbing for all selection estimators."""

    _kind = None

    def _fit_graph(self, X):
        graph = as_graph(X, directed=getattr(self, "directed", None))
        self.graph_ = graph
        self.n_nodes_in_ = graph.n
        return graph

    def _select(self, graph):
        raise NotImplementedError

    def fit(self, X, y=None):
        graph = self._fit_graph(X)
        self.selection_ = self._select(graph)
        return self

    def transform(self, X=None):
        """Return the graph with the fitted selection removed.

        With ``X=None`` the graph seen by ``fit`` is used. Sparse input
        comes back as a sparse adjacency in the same orientation it was
        given; Graph input comes back as a Graph.
        """
        self._check_fitted()
        if X is None:
            graph = self.graph_
            as_matrix = False
        else:
            as_matrix = not isinstance(X, Graph)
            graph = as_graph(X, directed=getattr(self, "directed", None))
        reduced = graph.remove_elements(self.selection_)
        if as_matrix:
            return sp.csr_matrix(reduced.matrix(raw=True).T)
        return reduced

    def score(self, X=None, y=None):
        """Goodness score of the fitted selection evaluated on ``X``."""
        self._check_fitted()
        graph = self.graph_ if X is None else as_graph(
            X, directed=getattr(self, "directed", None))
        return _evaluate_delta_f(
            graph, self.selection_, loss=resolve_loss(getattr(self, "loss", None)),
            damping=check_damping(getattr(self, "damping", None)),
            teleport=resolve_teleport(getattr(self, "teleport", None), graph),
            tol=check_tol(getattr(self, "tol", DEFAULT_TOL)),
            max_iter=int(getattr(self, "max_iter", DEFAULT_MAX_ITER)),
            normalized=bool(getattr(self, "normalized_ranking", False)))

    def _check_fitted(self):
        if not hasattr(self, "selection_"):
            raise AttributeError(
                f"this {type(self).__name__} instance is not fitted yet; "
                "call fit first")


class _GreedyAuditor(_BaseSelector):
    """Common implementation of the three greedy influence auditors."""

    def __init__(self, k=10, loss="l2sq", damping=None, teleport="uniform",
                 tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                 normalized_ranking=False, abs_influence=False,
                 directed=None):
        self.k = k
        self.loss = loss
        self.damping = damping
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.normalized_ranking = normalized_ranking
        self.abs_influence = abs_influence
        self.directed = directed

    def _select(self, graph):
        result = _run_audit(
            graph, self._kind,
            check_budget(self.k, 2 if self._kind is ElementKind.SUBGRAPH else 1),
            loss=resolve_loss(self.loss),
            damping=check_damping(self.damping),
            teleport=resolve_teleport(self.teleport, graph),
            tol=check_tol(self.tol), max_iter=int(self.max_iter),
            normalized=bool(self.normalized_ranking),
            abs_influence=bool(self.abs_influence))
        self.result_ = result
        self.influences_ = np.array([s.influence for s in result.steps])
        self.delta_f_trajectory_ = np.array([s.delta_f for s in result.steps])
        self.delta_f_ = result.delta_f
        return result.element_set()


class EdgeInfluenceAuditor(_GreedyAuditor):
    """Greedily select the k edges most influential on the ranking loss."""

    _kind = ElementKind.EDGES


class NodeInfluenceAuditor(_GreedyAuditor):
    """Greedily select the k nodes most influential on the ranking loss."""

    _kind = ElementKind.NODES


class SubgraphInfluenceAuditor(_GreedyAuditor):
    """Greedily grow the k-node induced subgraph most influential on the loss."""

    _kind = ElementKind.SUBGRAPH


class RandomBaseline(_BaseSelector):
    """Seeded uniform random selection of k elements."""

    def __init__(self, k=10, kind="edges", seed=0, loss="l2sq", damping=None,
                 teleport="uniform", tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, directed=None):
        self.k = k
        self.kind = kind
        self.seed = seed
        self.loss = loss
        self.damping = damping
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.directed = directed

    def _select(self, graph):
        return _baselines.select_random(graph, check_budget(self.k),
                                        self.kind, seed=self.seed)


class DegreeBaseline(_BaseSelector):
    """Top-k selection by arc-count degree scores."""

    def __init__(self, k=10, kind="edges", loss="l2sq", damping=None,
                 teleport="uniform", tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, directed=None):
        self.k = k
        self.kind = kind
        self.loss = loss
        self.damping = damping
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.directed = directed

    def _select(self, graph):
        return _baselines.select_degree(graph, check_budget(self.k), self.kind)


class PageRankBaseline(_BaseSelector):
    """Top-k selection by ranking scores under uniform teleportation."""

    def __init__(self, k=10, kind="edges", damping=None, loss="l2sq",
                 teleport="uniform", tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, directed=None):
        self.k = k
        self.kind = kind
        self.damping = damping
        self.loss = loss
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.directed = directed

    def _select(self, graph):
        return _baselines.select_pagerank(
            graph, check_budget(self.k), self.kind,
            damping=check_damping(self.damping), tol=check_tol(self.tol),
            max_iter=int(self.max_iter))


class HitsBaseline(_BaseSelector):
    """Top-k selection by hub/authority scores."""

    def __init__(self, k=10, kind="edges", hits_tol=1e-10, loss="l2sq",
                 damping=None, teleport="uniform", tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, directed=None):
        self.k = k
        self.kind = kind
        self.hits_tol = hits_tol
        self.loss = loss
        self.damping = damping
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.directed = directed

    def _select(self, graph):
        return _baselines.select_hits(graph, check_budget(self.k), self.kind,
                                      tol=check_tol(self.hits_tol),
                                      max_iter=int(self.max_iter))


class ExhaustiveBaseline(_BaseSelector):
    """Exact optimum by exhaustive enumeration; refuses oversized searches."""

    def __init__(self, k=1, kind="edges", loss="l2sq", damping=None,
                 teleport="uniform", tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER,
                 limit=_baselines.DEFAULT_BRUTE_LIMIT,
                 normalized_ranking=False, directed=None):
        self.k = k
        self.kind = kind
        self.loss = loss
        self.damping = damping
        self.teleport = teleport
        self.tol = tol
        self.max_iter = max_iter
        self.limit = limit
        self.normalized_ranking = normalized_ranking
        self.directed = directed

    def _select(self, graph):
        selection, delta = _baselines.brute_force(
            graph, check_budget(self.k), self.kind,
            loss=resolve_loss(self.loss),
            damping=check_damping(self.damping),
            teleport=resolve_teleport(self.teleport, graph),
            tol=check_tol(self.tol), max_iter=int(self.max_iter),
            limit=int(self.limit),
            normalized=bool(self.normalized_ranking))
        self.delta_f_ = delta
        return selection
