import json

import numpy as np
import pytest
import scipy.sparse as sp

from rankaudit import (ElementKind, ElementSet, Graph, SquaredL2,
                       TeleportSpec, ValidationError, audit, audit_edges,
                       audit_nodes, audit_subgraph, brute_force,
                       evaluate_delta_f, pagerank)
from rankaudit.influence import (edge_influence, gradient_factors,
                                 node_influence)


def two_node():
    return Graph.from_edges([0], [1], n=2, directed=True)


def triangle(mode="column"):
    return Graph.from_edges([0, 0, 1], [1, 2, 2], n=3, directed=False,
                            norm_mode=mode)


class TestAuditEdges:
    def test_single_candidate(self):
        g = two_node()
        res = audit_edges(g, 1, damping=0.5)
        assert res.steps[0].element == (0, 1)
        f_full = SquaredL2().value(pagerank(g, c=0.5).values)
        f_empty = SquaredL2().value(pagerank(g.remove_edge(0, 1),
                                             c=0.5).values)
        assert res.delta_f == pytest.approx((f_full - f_empty) ** 2,
                                            rel=1e-10)

    def test_budget_exhaustion(self):
        g = triangle()
        res = audit_edges(g, 10, damping=0.5)
        assert len(res.steps) == 3
        assert any("ran out" in w for w in res.warnings)
        labels = [s.element for s in res.steps]
        assert len(set(labels)) == 3

    def test_empty_graph_warns(self):
        g = Graph(sp.csc_matrix((3, 3)), True, "raw")
        res = audit_edges(g, 2, damping=0.5)
        assert res.steps == ()
        assert res.warnings

    def test_prefix_property(self, karate_raw):
        short = audit_edges(karate_raw, 3, damping=0.07)
        longer = audit_edges(karate_raw, 4, damping=0.07)
        assert [s.element for s in short.steps] == \
            [s.element for s in longer.steps[:3]]

    def test_recorded_influence_matches_recomputation(self, karate_raw):
        c = 0.07
        res = audit_edges(karate_raw, 3, damping=c)
        current = karate_raw
        for step in res.steps:
            ranking = pagerank(current, c=c)
            gf = gradient_factors(current, ranking, SquaredL2(), c)
            assert step.influence == pytest.approx(
                edge_influence(gf, *step.element), rel=1e-12)
            current = current.remove_edge(*step.element)

    def test_delta_f_matches_from_scratch_evaluation(self, karate_raw):
        c = 0.07
        res = audit_edges(karate_raw, 3, damping=c)
        for end in range(1, 4):
            subset = ElementSet("edges",
                                tuple(s.element for s in res.steps[:end]))
            assert res.steps[end - 1].delta_f == pytest.approx(
                evaluate_delta_f(karate_raw, subset, damping=c), rel=1e-12)

    def test_determinism(self, karate):
        a = audit_edges(karate, 4, damping=0.5)
        b = audit_edges(karate, 4, damping=0.5)
        assert a.to_csv() == b.to_csv()
        assert a.to_json() == b.to_json()

    def test_negative_influence_warns(self):
        g = Graph.from_edges([0, 1], [1, 2], n=3, directed=True,
                             norm_mode="raw")
        res = audit_edges(g, 1, damping=0.3,
                          teleport=TeleportSpec.raw(np.array([-1.0, 2.0, -2.0])))
        assert any("non-positive" in w for w in res.warnings)
        assert len(res.steps) == 1  # the greedy still selects

    def test_bad_budget(self, karate):
        with pytest.raises(ValidationError):
            audit_edges(karate, 0)
        with pytest.raises(ValidationError):
            audit_edges(karate, True)

    def test_abs_influence_flag(self):
        g = Graph.from_edges([0, 1], [1, 2], n=3, directed=True,
                             norm_mode="raw")
        tele = TeleportSpec.raw(np.array([-1.0, 2.0, -2.0]))
        plain = audit_edges(g, 1, damping=0.3, teleport=tele)
        flipped = audit_edges(g, 1, damping=0.3, teleport=tele,
                              abs_influence=True)
        # signed argmax picks the least-negative arc; |.| picks the largest
        assert abs(flipped.steps[0].influence) >= abs(plain.steps[0].influence)

    def test_csv_schema(self, karate):
        res = audit_edges(karate, 2, damping=0.5)
        lines = res.to_csv().splitlines()
        assert lines[0] == "step,element,influence,delta_f"
        assert len(lines) == 3
        payload = json.loads(res.to_json())
        assert payload["kind"] == "edges"
        assert len(payload["steps"]) == 2


class TestAuditNodes:
    def test_star_selects_center(self):
        g = Graph.from_edges([0, 0, 0, 0], [1, 2, 3, 4], n=5, directed=False)
        res = audit_nodes(g, 1, damping=0.5)
        assert res.steps[0].element == 0
        # brute-force enumeration oracle
        _, best = brute_force(g, 1, "nodes", damping=0.5)
        assert res.delta_f == pytest.approx(best, rel=1e-12)

    def test_karate_k1_matches_brute_force(self, karate_raw):
        c = 0.07
        res = audit_nodes(karate_raw, 1, damping=c)
        _, best = brute_force(karate_raw, 1, "nodes", damping=c)
        assert res.delta_f == pytest.approx(best, rel=1e-12)

    def test_isolates_only_warns(self):
        g = Graph(sp.csc_matrix((4, 4)), False, "raw")
        res = audit_nodes(g, 2, damping=0.5)
        assert res.steps == ()
        assert res.warnings

    def test_selected_nodes_isolated_not_deleted(self, karate):
        res = audit_nodes(karate, 2, damping=0.5)
        assert res.config["n"] == 34

    def test_recorded_influence_matches_recomputation(self, karate_raw):
        c = 0.07
        res = audit_nodes(karate_raw, 3, damping=c)
        current = karate_raw
        for step in res.steps:
            ranking = pagerank(current, c=c)
            gf = gradient_factors(current, ranking, SquaredL2(), c)
            assert step.influence == pytest.approx(
                node_influence(gf, current, step.element), rel=1e-12)
            current = current.remove_node_edges(step.element)

    def test_prefix_property(self, karate_raw):
        short = audit_nodes(karate_raw, 2, damping=0.07)
        longer = audit_nodes(karate_raw, 3, damping=0.07)
        assert [s.element for s in short.steps] == \
            [s.element for s in longer.steps[:2]]


class TestAuditSubgraph:
    def test_k1_rejected(self, karate):
        with pytest.raises(ValidationError, match="at least 2"):
            audit_subgraph(karate, 1)

    def test_triangle_k2_selects_top_edge_endpoints(self):
        g = triangle()
        res = audit_subgraph(g, 2, damping=0.5)
        members = res.element_set().members
        assert len(members) == 2
        # must be the endpoints of the most influential edge
        ranking = pagerank(g, c=0.5)
        gf = gradient_factors(g, ranking, SquaredL2(), 0.5)
        vals = {(u, v): edge_influence(gf, u, v)
                for (u, v) in [(0, 1), (0, 2), (1, 2)]}
        top = max(sorted(vals), key=lambda e: vals[e])
        assert set(members) == set(top)

    def test_budget_clamped_to_n(self):
        g = triangle()
        res = audit_subgraph(g, 5, damping=0.5)
        assert any("clamped" in w for w in res.warnings)
        assert len(res.element_set().members) <= 3

    def test_full_budget_removes_all_induced(self, karate):
        res = audit_subgraph(karate, 34, damping=0.5)
        selected = res.element_set().members
        if len(selected) == 34:
            f0 = SquaredL2().value(pagerank(karate, c=0.5).values)
            edgeless = karate.remove_induced_arcs(range(34))
            f_end = SquaredL2().value(pagerank(edgeless, c=0.5).values)
            assert res.delta_f == pytest.approx((f0 - f_end) ** 2, rel=1e-10)

    def test_delta_f_matches_induced_removal(self, karate_raw):
        c = 0.07
        res = audit_subgraph(karate_raw, 4, damping=c)
        sofar = []
        for step in res.steps:
            sofar.extend(step.element)
            assert step.delta_f == pytest.approx(
                evaluate_delta_f(karate_raw,
                                 ElementSet("subgraph", tuple(sofar)),
                                 damping=c), rel=1e-12)

    def test_prefix_growth_is_incremental(self, karate_raw):
        res4 = audit_subgraph(karate_raw, 4, damping=0.07)
        res6 = audit_subgraph(karate_raw, 6, damping=0.07)
        m4 = res4.element_set().members
        assert res6.element_set().members[:len(m4)] == m4


class TestEvaluateDeltaF:
    def test_empty_set_is_zero(self, karate):
        assert evaluate_delta_f(karate, ElementSet("edges", ()),
                                damping=0.5) == 0.0

    def test_all_edges_reaches_teleport_fixed_point(self):
        g = triangle()
        u, v = g.edge_index
        s = ElementSet("edges", tuple(zip(u.tolist(), v.tolist())))
        c = 0.5
        f0 = SquaredL2().value(pagerank(g, c=c).values)
        f_end = SquaredL2().value(np.full(3, (1 - c) / 3))
        assert evaluate_delta_f(g, s, damping=c) == pytest.approx(
            (f0 - f_end) ** 2, rel=1e-9)

    def test_karate_top1_equals_max_single_edge(self, karate_raw):
        c = 0.07
        u, v = karate_raw.edge_index
        deltas = [evaluate_delta_f(karate_raw,
                                   ElementSet("edges", ((int(a), int(b)),)),
                                   damping=c)
                  for a, b in zip(u, v)]
        sel, best = brute_force(karate_raw, 1, "edges", damping=c)
        assert best == max(deltas)

    def test_missing_element_raises(self, karate):
        from rankaudit.errors import ElementNotFoundError
        assert not karate.has_arc(0, 17)
        with pytest.raises(ElementNotFoundError):
            evaluate_delta_f(karate, ElementSet("edges", ((0, 17),)),
                             damping=0.5)

    def test_node_and_subgraph_kinds(self, karate):
        nodes = evaluate_delta_f(karate, ElementSet("nodes", (0,)),
                                 damping=0.5)
        sub = evaluate_delta_f(karate, ElementSet("subgraph", (0, 1)),
                               damping=0.5)
        assert nodes > 0 and sub > 0

    def test_normalized_variant_uses_normalized_loss(self, karate_raw):
        c = 0.07
        s = ElementSet("nodes", (0,))
        plain = evaluate_delta_f(karate_raw, s, damping=c)
        norm = evaluate_delta_f(karate_raw, s, damping=c, normalized=True)
        assert norm != plain


class TestDispatch:
    def test_kind_routing(self, karate):
        res = audit(karate, "nodes", 1, damping=0.5)
        assert res.kind is ElementKind.NODES

    def test_config_snapshot(self, karate):
        res = audit(karate, "edges", 1, damping=0.5)
        cfg = res.config
        assert cfg["kind"] == "edges" and cfg["damping"] == 0.5
        assert cfg["loss"] == "l2sq" and cfg["n"] == 34 and cfg["m"] == 78
        assert cfg["damping_auto"] is False

    def test_auto_damping_recorded(self, karate):
        res = audit(karate, "edges", 1)
        assert res.config["damping_auto"] is True
        assert res.config["damping"] == pytest.approx(0.5, abs=1e-9)
