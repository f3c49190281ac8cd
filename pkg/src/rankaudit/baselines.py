"""Reference selectors: random, degree, ranking-score, HITS, exhaustive.

All selectors return an :class:`~rankaudit.graph.ElementSet` of exactly
``min(k, population)`` distinct elements, with lexicographic tie-breaking,
so they plug into the same evaluation harness as the greedy auditors.
"""

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import ConvergenceError, ResourceLimitError, ValidationError
from .graph import ElementKind, ElementSet, NormMode
from .losses import SquaredL2
from .solvers import (DEFAULT_MAX_ITER, DEFAULT_TOL, TeleportSpec,
                      default_damping, pagerank)

DEFAULT_BRUTE_LIMIT = 10_000_000


def _edge_population(graph):
    u, v = graph.edge_index
    return list(zip(u.tolist(), v.tolist()))


def _population(graph, kind):
    kind = ElementKind.parse(kind)
    if kind is ElementKind.EDGES:
        return _edge_population(graph)
    return list(range(graph.n))


def _clamp_budget(k, population, kind):
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"budget k must be a positive integer, got {k!r}")
    if k > len(population):
        warnings.warn(
            f"budget {k} exceeds the {len(population)} available "
            f"{ElementKind.parse(kind).value}; clamped", RuntimeWarning,
            stacklevel=3)
        return len(population)
    return int(k)


def select_random(graph, k, kind, seed=0):
    """Uniform sample without replacement, reproducible by seed."""
    kind = ElementKind.parse(kind)
    population = _population(graph, kind)
    k = _clamp_budget(k, population, kind)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(population), size=k, replace=False)
    return ElementSet(kind, tuple(population[i] for i in picks))


def _top_k(scored, k):
    """Top-k elements by score, ties broken by lexicographic element order."""
    ranked = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
    return tuple(element for element, _ in ranked[:k])


def _edge_score_table(graph, node_scores):
    """Edge scores ``(s(u)+s(v)) * max(s)`` undirected, ``* s(u)`` directed."""
    u, v = graph.edge_index
    su, sv = node_scores[u], node_scores[v]
    if graph.directed:
        mult = su
    else:
        mult = np.maximum(su, sv)
    return list(zip(zip(u.tolist(), v.tolist()), ((su + sv) * mult).tolist()))


def _select_by_node_scores(graph, k, kind, node_scores):
    kind = ElementKind.parse(kind)
    if kind is ElementKind.EDGES:
        scored = _edge_score_table(graph, node_scores)
    else:
        scored = list(zip(range(graph.n), node_scores.tolist()))
    k = _clamp_budget(k, scored, kind)
    return ElementSet(kind, _top_k(scored, k))


def select_degree(graph, k, kind):
    """Top-k elements by arc-count degree.

    Node degree counts out-arcs for undirected graphs and in+out arcs for
    directed ones; subgraphs are induced by the top-k-degree nodes.
    """
    return _select_by_node_scores(graph, k, kind,
                                  graph.degrees().astype(np.float64))


def select_pagerank(graph, k, kind, damping=None, tol=DEFAULT_TOL,
                    max_iter=DEFAULT_MAX_ITER):
    """Top-k elements by ranking score (uniform teleportation)."""
    if damping is None:
        damping = default_damping(graph)
    ranking = pagerank(graph, TeleportSpec.uniform(), damping, tol, max_iter)
    return _select_by_node_scores(graph, k, kind, ranking.values)


@dataclass(frozen=True)
class HitsScores:
    """Mutually reinforcing hub/authority scores, each L2-normalized."""

    hub: np.ndarray
    auth: np.ndarray
    iterations: int
    residual: float


def hits(graph, tol=1e-10, max_iter=1000):
    """Classic hub/authority iteration on the raw arc weights.

    Alternates ``auth ~ sum of source hubs`` and ``hub ~ sum of target
    auths`` with L2 normalization each half-step until the larger of the
    two iterate differences drops to ``tol``.
    """
    if graph.arc_count == 0:
        raise ValidationError("HITS needs a graph with at least one arc")
    mat = graph.matrix(raw=True)          # auth = mat @ hub
    mat_t = graph._raw.T.tocsr()          # hub  = mat' @ auth
    n = graph.n
    hub = np.full(n, 1.0 / math.sqrt(n))
    auth = np.full(n, 1.0 / math.sqrt(n))
    for sweep in range(1, max_iter + 1):
        new_auth = mat @ hub
        new_auth /= np.linalg.norm(new_auth)
        new_hub = mat_t @ new_auth
        new_hub /= np.linalg.norm(new_hub)
        resid = max(float(np.linalg.norm(new_hub - hub)),
                    float(np.linalg.norm(new_auth - auth)))
        hub, auth = new_hub, new_auth
        if resid <= tol:
            return HitsScores(hub=hub, auth=auth, iterations=sweep,
                              residual=resid)
    raise ConvergenceError(
        f"HITS did not reach tol={tol} within {max_iter} iterations "
        f"(residual {resid:.3e})", residual=resid, iterations=max_iter)


def select_hits(graph, k, kind, tol=1e-10, max_iter=1000):
    """Top-k by ``hub(u)*hub(v) + auth(u)*auth(v)`` (edges) or ``hub+auth``."""
    kind = ElementKind.parse(kind)
    scores = hits(graph, tol, max_iter)
    if kind is ElementKind.EDGES:
        u, v = graph.edge_index
        vals = scores.hub[u] * scores.hub[v] + scores.auth[u] * scores.auth[v]
        scored = list(zip(zip(u.tolist(), v.tolist()), vals.tolist()))
    else:
        vals = scores.hub + scores.auth
        scored = list(zip(range(graph.n), vals.tolist()))
    k = _clamp_budget(k, scored, kind)
    return ElementSet(kind, _top_k(scored, k))


def _element_positions(graph, kind, population):
    """Raw-matrix positions removed by each population element, padded."""
    rows = []
    if kind is ElementKind.EDGES:
        for u, v in population:
            rows.append(graph._edge_positions(u, v))
    else:
        for v in population:
            rows.append(graph._node_positions(v).tolist())
    width = max((len(r) for r in rows), default=1)
    table = np.full((len(rows), max(width, 1)), -1, dtype=np.int64)
    lengths = np.zeros(len(rows), dtype=np.int64)
    for i, r in enumerate(rows):
        table[i, :len(r)] = r
        lengths[i] = len(r)
    return table, lengths


def _csc_to_csr_permutation(csc):
    """``csr_data[t] == csc_data[perm[t]]`` for the same matrix."""
    marker = csc.copy()
    marker.data = np.arange(csc.nnz, dtype=np.float64)
    return marker.tocsr().data.astype(np.int64)


class _SubsetEvaluator:
    """Per-subset goodness evaluation sharing the solver's exact arithmetic.

    Removal zeroes raw-weight positions and re-normalizes every column
    from the surviving raw weights, which reproduces bit-for-bit what a
    fresh :class:`Graph` build of the reduced graph computes.
    """

    def __init__(self, graph, loss, damping, teleport, tol, max_iter,
                 normalized=False):
        self.graph = graph
        self.loss = loss
        self.normalized = normalized
        self.c = damping
        self.tol = tol
        self.max_iter = max_iter
        raw = graph.matrix(raw=True)
        self.csc_indptr = raw.indptr
        self.csc_indices = raw.indices
        self.raw_data = raw.data
        self.perm = _csc_to_csr_permutation(raw)
        csr_pattern = raw.tocsr()
        self.csr_indptr = csr_pattern.indptr
        self.csr_indices = csr_pattern.indices
        self.stochastic = graph.norm_mode is NormMode.COLUMN_STOCHASTIC
        self.b = (1.0 - damping) * teleport.vector(graph.n)
        self.f_base = self.score(np.empty(0, dtype=np.int64))

    def solve(self, remove_pos):
        x, resid, sweeps = _kernels._solve_with_removed(
            self.csc_indptr, self.csc_indices, self.raw_data, self.perm,
            self.csr_indptr, self.csr_indices,
            np.asarray(remove_pos, dtype=np.int64), self.stochastic,
            self.b, self.c, self.b.copy(), self.tol, self.max_iter)
        if sweeps < 0:
            raise ConvergenceError(
                f"ranking solve did not reach tol={self.tol} within "
                f"{self.max_iter} iterations", residual=resid,
                iterations=self.max_iter)
        return x

    def score(self, remove_pos):
        values = self.solve(remove_pos)
        if self.normalized:
            total = float(values.sum())
            if total <= 0.0:
                raise ValidationError(
                    "ranking mass must be positive for normalization")
            values = values / total
        return self.loss.value(values)

    def delta_f(self, remove_pos):
        diff = self.f_base - self.score(remove_pos)
        return diff * diff


def brute_force(graph, k, kind, loss=None, damping=None, teleport=None,
                tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                limit=DEFAULT_BRUTE_LIMIT, normalized=False):
    """Exhaustive search for the k-subset with the largest goodness score.

    Enumerates every k-subset of edges/nodes (or every k-node set for
    subgraphs) in lexicographic order, evaluating each removal exactly;
    ties keep the lexicographically first optimum. Refuses with a
    :class:`ResourceLimitError` when the combination count exceeds
    ``limit``. Returns ``(ElementSet, delta_f)``.
    """
    kind = ElementKind.parse(kind)
    loss = loss if loss is not None else SquaredL2()
    if damping is None:
        damping = default_damping(graph)
    if teleport is None:
        teleport = TeleportSpec.uniform()
    population = _population(graph, kind)
    k = _clamp_budget(k, population, kind)
    count = math.comb(len(population), k)
    if count > limit:
        raise ResourceLimitError(
            f"brute force over {len(population)} {kind.value} at k={k} "
            f"needs {count} evaluations, above the limit of {limit}")
    evaluator = _SubsetEvaluator(graph, loss, damping, teleport, tol,
                                 max_iter, normalized)
    fast = isinstance(loss, SquaredL2) and not normalized
    if fast and kind is ElementKind.SUBGRAPH:
        best_idx, best, ok = _kernels.brute_best_node_subset(
            len(population), k, evaluator.csc_indptr, evaluator.csc_indices,
            evaluator.raw_data, evaluator.perm, evaluator.csr_indptr,
            evaluator.csr_indices, evaluator.stochastic, evaluator.b,
            evaluator.c, evaluator.b.copy(), tol, max_iter,
            evaluator.f_base)
        if not ok:
            raise ConvergenceError(
                "ranking solve failed during exhaustive search")
        members = tuple(population[i] for i in best_idx)
        return ElementSet(kind, members), float(best)
    if fast:
        table, lengths = _element_positions(graph, kind, population)
        best_idx, best, ok = _kernels.brute_best_subset(
            table, lengths, len(population), k, evaluator.csc_indptr,
            evaluator.csc_indices, evaluator.raw_data, evaluator.perm,
            evaluator.csr_indptr, evaluator.csr_indices,
            evaluator.stochastic, evaluator.b, evaluator.c,
            evaluator.b.copy(), tol, max_iter, evaluator.f_base)
        if not ok:
            raise ConvergenceError(
                "ranking solve failed during exhaustive search")
        members = tuple(population[i] for i in best_idx)
        return ElementSet(kind, members), float(best)
    # Generic path for other losses: same per-subset kernel, loss in Python.
    best = -1.0
    best_members = None
    if kind is ElementKind.SUBGRAPH:
        for subset in combinations(range(len(population)), k):
            members = [population[i] for i in subset]
            pos = graph._induced_positions(members)
            delta = evaluator.delta_f(pos)
            if delta > best:
                best, best_members = delta, tuple(members)
    else:
        table, lengths = _element_positions(graph, kind, population)
        for subset in combinations(range(len(population)), k):
            pos = np.concatenate([table[i, :lengths[i]] for i in subset])
            delta = evaluator.delta_f(pos)
            if delta > best:
                best, best_members = delta, tuple(population[i]
                                                  for i in subset)
    return ElementSet(kind, best_members), float(best)
