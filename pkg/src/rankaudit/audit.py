"""Greedy auditors: pick the k elements whose removal moves the loss most.

Each auditor repeats the same loop: solve the ranking on the current
graph, factorize the loss gradient, select the existing element with the
largest influence (ties break to the lexicographically smallest ids),
remove it, and record the goodness score
``delta_f = (f(r_original) - f(r_after_removal))^2`` of the selection so
far. The ranking is re-solved from scratch after every removal, so the
reported trajectory carries no accumulated drift.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import ElementKind, ElementSet
from .influence import (edge_influence_table, make_gradient_factors,
                        node_influence_table)
from .losses import LossFunction, SquaredL2
from .solvers import (DEFAULT_MAX_ITER, DEFAULT_TOL, TeleportSpec,
                      default_damping, pagerank)


@dataclass(frozen=True)
class AuditStep:
    """One greedy iteration: what was selected and what it did to the loss."""

    index: int
    element: tuple
    element_label: str
    influence: float
    loss_after: float
    delta_f: float


@dataclass(frozen=True)
class AuditResult:
    """Ordered selection with its influence and goodness-score trajectory."""

    kind: ElementKind
    budget: int
    steps: tuple
    config: dict
    warnings: tuple = ()

    @property
    def delta_f(self):
        """Goodness score of the full selection (0.0 for an empty result)."""
        return self.steps[-1].delta_f if self.steps else 0.0

    def element_set(self):
        if self.kind is ElementKind.SUBGRAPH:
            members = [v for step in self.steps for v in step.element]
        else:
            members = [step.element for step in self.steps]
        return ElementSet(self.kind, tuple(members))

    def to_csv(self):
        """Steps table: step, element, influence, delta_f."""
        lines = ["step,element,influence,delta_f"]
        lines.extend(
            f"{s.index},{s.element_label},{s.influence!r},{s.delta_f!r}"
            for s in self.steps)
        return "\n".join(lines) + "\n"

    def to_json(self):
        payload = {
            "kind": self.kind.value,
            "budget": self.budget,
            "config": self.config,
            "warnings": list(self.warnings),
            "steps": [
                {
                    "step": s.index,
                    "element": s.element_label,
                    "influence": s.influence,
                    "loss_after": s.loss_after,
                    "delta_f": s.delta_f,
                }
                for s in self.steps
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def format_element(graph, kind, element):
    """Stable human-readable form: 'u->v', 'u--v', 'label', or 'a+b'."""
    labels = graph.labels
    if kind is ElementKind.EDGES:
        sep = "->" if graph.directed else "--"
        return f"{labels[element[0]]}{sep}{labels[element[1]]}"
    if kind is ElementKind.NODES:
        return labels[element]
    return "+".join(labels[v] for v in element)


def _resolve_run_config(graph, k, loss, damping, teleport, tol, max_iter,
                        normalized, abs_influence=False):
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise ValidationError(f"budget k must be a positive integer, got {k!r}")
    if not isinstance(loss, LossFunction):
        raise ValidationError(f"loss must be a LossFunction, got {loss!r}")
    auto_damping = damping is None
    c = default_damping(graph) if auto_damping else float(damping)
    if teleport is None:
        teleport = TeleportSpec.uniform()
    config = {
        "kind": None,
        "k": int(k),
        "damping": c,
        "damping_auto": auto_damping,
        "loss": loss.describe(),
        "teleport": teleport.describe(),
        "tol": tol,
        "max_iter": max_iter,
        "normalized_ranking": bool(normalized),
        "abs_influence": bool(abs_influence),
        "directed": graph.directed,
        "norm_mode": graph.norm_mode.value,
        "n": graph.n,
        "m": graph.m,
    }
    return c, teleport, config


def _score(loss, ranking, normalized):
    values = ranking.values
    if normalized:
        total = float(values.sum())
        if total <= 0.0:
            raise ValidationError(
                f"ranking mass must be positive for normalization, got {total!r}")
        values = values / total
    return loss.value(values)


def _argmax_first(values):
    """Index of the maximum; exact ties resolve to the first occurrence."""
    return int(np.argmax(values))


def audit_edges(graph, k, loss=None, damping=None, teleport=None,
                tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                normalized=False, abs_influence=False):
    """Greedy selection of the k most influential edges.

    Each iteration scores every existing edge from fresh gradient factors,
    removes the winner (both arcs for undirected graphs) and re-solves.
    Selection uses the signed influence unless ``abs_influence`` is set.
    """
    loss = loss if loss is not None else SquaredL2()
    c, teleport, config = _resolve_run_config(
        graph, k, loss, damping, teleport, tol, max_iter, normalized,
        abs_influence)
    config["kind"] = ElementKind.EDGES.value
    warnings_out = []
    if graph.arc_count == 0:
        warnings_out.append("graph has no edges; nothing to audit")
        return AuditResult(ElementKind.EDGES, k, (), config,
                           tuple(warnings_out))
    ranking = pagerank(graph, teleport, c, tol, max_iter)
    f_base = _score(loss, ranking, normalized)
    current = graph
    steps = []
    warned_nonpositive = False
    for _ in range(k):
        if current.arc_count == 0:
            warnings_out.append(
                f"ran out of edges after {len(steps)} selections")
            break
        factors = make_gradient_factors(current, ranking, loss, c, tol,
                                        max_iter, normalized)
        u, v, vals = edge_influence_table(factors, current)
        ranked = np.abs(vals) if abs_influence else vals
        pick = _argmax_first(ranked)
        if ranked[pick] <= 0.0 and not warned_nonpositive:
            warned_nonpositive = True
            warnings_out.append(
                "selected an element with non-positive influence; the "
                "greedy continues regardless")
        element = (int(u[pick]), int(v[pick]))
        current = current.remove_edge(*element)
        ranking = pagerank(current, teleport, c, tol, max_iter)
        f_after = _score(loss, ranking, normalized)
        diff = f_base - f_after
        steps.append(AuditStep(
            index=len(steps) + 1, element=element,
            element_label=format_element(graph, ElementKind.EDGES, element),
            influence=float(vals[pick]), loss_after=f_after,
            delta_f=diff * diff))
    return AuditResult(ElementKind.EDGES, k, tuple(steps), config,
                       tuple(warnings_out))


def audit_nodes(graph, k, loss=None, damping=None, teleport=None,
                tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                normalized=False, abs_influence=False):
    """Greedy selection of the k most influential nodes.

    A selected node is isolated (all incident arcs removed) but keeps its
    id, so ids and the teleport vector stay stable across iterations.
    Only nodes with at least one incident arc are candidates.
    """
    loss = loss if loss is not None else SquaredL2()
    c, teleport, config = _resolve_run_config(
        graph, k, loss, damping, teleport, tol, max_iter, normalized,
        abs_influence)
    config["kind"] = ElementKind.NODES.value
    warnings_out = []
    if graph.arc_count == 0:
        warnings_out.append("graph has no edges; nothing to audit")
        return AuditResult(ElementKind.NODES, k, (), config,
                           tuple(warnings_out))
    ranking = pagerank(graph, teleport, c, tol, max_iter)
    f_base = _score(loss, ranking, normalized)
    current = graph
    steps = []
    warned_nonpositive = False
    for _ in range(k):
        if current.arc_count == 0:
            warnings_out.append(
                f"ran out of non-isolated nodes after {len(steps)} selections")
            break
        factors = make_gradient_factors(current, ranking, loss, c, tol,
                                        max_iter, normalized)
        vals = node_influence_table(factors, current)
        ranked = np.abs(vals) if abs_influence else vals.copy()
        ranked[current.degrees() == 0] = -np.inf
        pick = _argmax_first(ranked)
        if ranked[pick] <= 0.0 and not warned_nonpositive:
            warned_nonpositive = True
            warnings_out.append(
                "selected an element with non-positive influence; the "
                "greedy continues regardless")
        current = current.remove_node_edges(pick)
        ranking = pagerank(current, teleport, c, tol, max_iter)
        f_after = _score(loss, ranking, normalized)
        diff = f_base - f_after
        steps.append(AuditStep(
            index=len(steps) + 1, element=int(pick),
            element_label=format_element(graph, ElementKind.NODES, pick),
            influence=float(vals[pick]), loss_after=f_after,
            delta_f=diff * diff))
    return AuditResult(ElementKind.NODES, k, tuple(steps), config,
                       tuple(warnings_out))


def audit_subgraph(graph, k, loss=None, damping=None, teleport=None,
                   tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                   normalized=False, abs_influence=False):
    """Greedy growth of an influential k-node vertex-induced subgraph.

    Each iteration finds the most influential existing edge; while the
    budget allows, both endpoints join the subgraph, otherwise the
    endpoint with the higher node influence does (falling back to the
    other when already selected). Arcs between selected nodes are removed
    as the set grows, and the reported goodness compares the original
    ranking against the graph without the induced arc set.
    """
    loss = loss if loss is not None else SquaredL2()
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 2:
        raise ValidationError(
            "subgraph audits need a budget of at least 2 nodes; a 1-node "
            "vertex-induced subgraph has no edges")
    c, teleport, config = _resolve_run_config(
        graph, int(k), loss, damping, teleport, tol, max_iter, normalized,
        abs_influence)
    config["kind"] = ElementKind.SUBGRAPH.value
    warnings_out = []
    if k > graph.n:
        warnings_out.append(
            f"budget {k} exceeds node count {graph.n}; clamped")
        k = graph.n
        config["k"] = int(k)
    if graph.arc_count == 0:
        warnings_out.append("graph has no edges; nothing to audit")
        return AuditResult(ElementKind.SUBGRAPH, k, (), config,
                           tuple(warnings_out))
    ranking = pagerank(graph, teleport, c, tol, max_iter)
    f_base = _score(loss, ranking, normalized)
    current = graph
    selected = []
    in_set = set()
    steps = []
    while len(selected) < k:
        if current.arc_count == 0:
            warnings_out.append(
                f"ran out of edges after selecting {len(selected)} nodes")
            break
        factors = make_gradient_factors(current, ranking, loss, c, tol,
                                        max_iter, normalized)
        u, v, vals = edge_influence_table(factors, current)
        ranked = np.abs(vals) if abs_influence else vals
        pick = _argmax_first(ranked)
        eu, ev = int(u[pick]), int(v[pick])
        added = []
        if len(selected) + 2 <= k:
            for node in (eu, ev):
                if node not in in_set:
                    selected.append(node)
                    in_set.add(node)
                    added.append(node)
        else:
            node_vals = node_influence_table(factors, current)
            first, second = ((eu, ev) if node_vals[eu] >= node_vals[ev]
                             else (ev, eu))
            node = first if first not in in_set else second
            selected.append(node)
            in_set.add(node)
            added.append(node)
        current = current.remove_induced_arcs(selected)
        ranking = pagerank(current, teleport, c, tol, max_iter)
        f_after = _score(loss, ranking, normalized)
        diff = f_base - f_after
        steps.append(AuditStep(
            index=len(steps) + 1, element=tuple(added),
            element_label=format_element(graph, ElementKind.SUBGRAPH,
                                         tuple(added)),
            influence=float(vals[pick]), loss_after=f_after,
            delta_f=diff * diff))
    return AuditResult(ElementKind.SUBGRAPH, k, tuple(steps), config,
                       tuple(warnings_out))


def audit(graph, kind, k, **kwargs):
    """Dispatch to the edge/node/subgraph auditor by element kind."""
    kind = ElementKind.parse(kind)
    fn = {ElementKind.EDGES: audit_edges,
          ElementKind.NODES: audit_nodes,
          ElementKind.SUBGRAPH: audit_subgraph}[kind]
    return fn(graph, k, **kwargs)


def evaluate_delta_f(graph, elements, loss=None, damping=None, teleport=None,
                     tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                     normalized=False):
    """Goodness score of removing ``elements`` from ``graph``.

    Builds the reduced graph (edges: listed arcs; nodes: all incident
    arcs; subgraph: the induced arc set), re-solves the ranking and
    returns ``(f(r) - f(r_reduced))^2``.
    """
    loss = loss if loss is not None else SquaredL2()
    if damping is None:
        damping = default_damping(graph)
    if teleport is None:
        teleport = TeleportSpec.uniform()
    reduced = graph.remove_elements(elements)
    base = pagerank(graph, teleport, damping, tol, max_iter)
    after = pagerank(reduced, teleport, damping, tol, max_iter)
    diff = _score(loss, base, normalized) - _score(loss, after, normalized)
    return diff * diff
