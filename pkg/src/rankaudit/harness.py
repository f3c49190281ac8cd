"""Experiment runner: method comparisons, k-sweeps and scaling benchmarks.

Reports are plain rows of ``(dataset, kind, method, k, delta_f,
wall_time_ms)`` plus an environment fingerprint; ``emit_tables`` writes
them as stably ordered CSV/JSON so that analytical columns are
byte-reproducible (timing columns are inherently run-dependent).
"""

import csv
import io
import json
import os
import platform
import sys
import time
from dataclasses import dataclass, field, fields
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .audit import audit, evaluate_delta_f
from .baselines import (DEFAULT_BRUTE_LIMIT, brute_force, select_degree,
                        select_hits, select_pagerank, select_random)
from .errors import RankAuditError, ValidationError
from .graph import ElementKind, Graph, NormMode, load_edge_list
from .losses import parse_loss
from .solvers import DEFAULT_MAX_ITER, DEFAULT_TOL, TeleportSpec

KNOWN_METHODS = ("audit", "random", "degree", "pagerank", "hits", "oracle")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a comparison run.

    Round-trips losslessly through a ``key = value`` text file; list
    values are comma separated.
    """

    datasets: tuple = ()
    kinds: tuple = ("edges",)
    k_values: tuple = (1, 5, 10)
    methods: tuple = ("audit", "random", "degree", "pagerank", "hits")
    loss: str = "l2sq"
    damping: float = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    oracle_limit: int = DEFAULT_BRUTE_LIMIT
    out_dir: str = "."

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "kinds",
                           tuple(ElementKind.parse(k).value for k in self.kinds))
        object.__setattr__(self, "k_values",
                           tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.k_values:
            raise ValidationError("config needs at least one k value")
        if not self.methods:
            raise ValidationError("config needs at least one method")
        unknown = set(self.methods) - set(KNOWN_METHODS)
        if unknown:
            raise ValidationError(
                f"unknown methods {sorted(unknown)}; known: {KNOWN_METHODS}")

    def to_text(self):
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                text = ",".join(str(v) for v in value)
            elif value is None:
                text = ""
            else:
                text = str(value)
            out.append(f"{f.name} = {text}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(
                    f"config line {lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in known:
                raise ValidationError(f"config line {lineno}: unknown key {key!r}")
            kwargs[key] = _parse_config_value(key, value)
        return cls(**kwargs)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def _parse_config_value(key, value):
    tuple_keys = {"datasets", "kinds", "k_values", "methods"}
    if key in tuple_keys:
        items = [v.strip() for v in value.split(",") if v.strip()]
        if key == "k_values":
            return tuple(int(v) for v in items)
        return tuple(items)
    if value == "":
        return None
    if key in {"damping", "tol"}:
        return float(value)
    if key in {"seed", "oracle_limit", "max_iter"}:
        return int(value)
    return value


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    kind: str
    method: str
    k: int
    delta_f: float = None
    wall_time_ms: float = None
    error: str = ""


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple
    fingerprint: dict = field(default_factory=dict)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.dataset, r.kind,
                                                r.method, r.k))


def environment_fingerprint():
    import numba
    import scipy
    try:
        pkg = version("rankaudit")
    except PackageNotFoundError:
        pkg = "unknown"
    return {
        "package": f"rankaudit {pkg}",
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "platform": platform.platform(),
    }


def _select(method, graph, kind, k, cfg, loss, teleport):
    if method == "audit":
        result = audit(graph, kind, k, loss=loss, damping=cfg.damping,
                       teleport=teleport, tol=cfg.tol, max_iter=cfg.max_iter)
        return result.element_set()
    if method == "random":
        return select_random(graph, k, kind, seed=cfg.seed)
    if method == "degree":
        return select_degree(graph, k, kind)
    if method == "pagerank":
        return select_pagerank(graph, k, kind, damping=cfg.damping,
                               tol=cfg.tol, max_iter=cfg.max_iter)
    if method == "hits":
        return select_hits(graph, k, kind, max_iter=cfg.max_iter)
    selection, _ = brute_force(graph, k, kind, loss=loss,
                               damping=cfg.damping, teleport=teleport,
                               tol=cfg.tol, max_iter=cfg.max_iter,
                               limit=cfg.oracle_limit)
    return selection


def run_comparison(cfg):
    """Evaluate every (dataset, kind, method, k) cell of the config.

    Each cell runs the method's selection and scores it with the shared
    goodness metric; failures are recorded in the row's ``error`` column
    and the run continues.
    """
    loss = parse_loss(cfg.loss)
    rows = []
    for path in cfg.datasets:
        name = os.path.splitext(os.path.basename(path))[0]
        graph = load_edge_list(path)
        teleport = TeleportSpec.uniform()
        for kind in cfg.kinds:
            for method in cfg.methods:
                for k in cfg.k_values:
                    start = time.perf_counter()
                    try:
                        if kind == "subgraph" and k < 2:
                            raise ValidationError(
                                "subgraph audits need k >= 2")
                        selection = _select(method, graph, kind, k, cfg,
                                            loss, teleport)
                        delta = evaluate_delta_f(
                            graph, selection, loss=loss, damping=cfg.damping,
                            teleport=teleport, tol=cfg.tol,
                            max_iter=cfg.max_iter)
                        elapsed = (time.perf_counter() - start) * 1e3
                        rows.append(ReportRow(name, kind, method, k,
                                              delta_f=delta,
                                              wall_time_ms=elapsed))
                    except RankAuditError as exc:
                        elapsed = (time.perf_counter() - start) * 1e3
                        rows.append(ReportRow(name, kind, method, k,
                                              wall_time_ms=elapsed,
                                              error=str(exc)))
    return ExperimentReport(tuple(rows), environment_fingerprint())


def erdos_renyi_graph(n, avg_degree=10.0, seed=0, directed=False):
    """Seeded G(n, m) graph with ``m = n * avg_degree / 2`` distinct edges."""
    if n < 2:
        raise ValidationError("need at least two nodes")
    m_target = int(round(n * avg_degree / 2.0))
    max_edges = n * (n - 1) // 2
    if m_target > max_edges:
        raise ValidationError(
            f"average degree {avg_degree} infeasible for n={n}")
    rng = np.random.default_rng(seed)
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < m_target:
        need = m_target - len(chosen)
        u = rng.integers(0, n, size=int(need * 1.3) + 8, dtype=np.int64)
        v = rng.integers(0, n, size=len(u), dtype=np.int64)
        ok = u != v
        u, v = u[ok], v[ok]
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        chosen = np.unique(np.concatenate([chosen, lo * n + hi]))
    if len(chosen) > m_target:
        chosen = rng.permutation(chosen)[:m_target]
    src = chosen // n
    dst = chosen % n
    return Graph.from_edges(src, dst, n=n, directed=directed,
                            norm_mode=NormMode.COLUMN_STOCHASTIC)


def preferential_attachment_graph(n, attach=3, seed=0):
    """Seeded scale-free graph: each new node links to ``attach`` old ones.

    Attachment targets are sampled proportionally to degree (repeat-edge
    draws are dropped), giving the hub-heavy degree profile typical of
    collaboration networks. Deterministic for a fixed seed.
    """
    if n <= attach:
        raise ValidationError(f"need n > attach, got n={n}, attach={attach}")
    rng = np.random.default_rng(seed)
    src, dst = [], []
    # Repeated-endpoint pool implements degree-proportional sampling.
    pool = []
    for u in range(attach):
        for v in range(u + 1, attach):
            src.append(u)
            dst.append(v)
            pool.extend((u, v))
    for u in range(attach, n):
        targets = set()
        while len(targets) < attach:
            draw = int(rng.integers(0, len(pool) + len(targets) + 1))
            if draw < len(pool):
                targets.add(pool[draw])
            else:
                targets.add(int(rng.integers(0, u)))
        for v in sorted(targets):
            src.append(u)
            dst.append(v)
            pool.extend((u, v))
    return Graph.from_edges(src, dst, n=n, directed=False,
                            norm_mode=NormMode.COLUMN_STOCHASTIC)


def run_scaling(n_values, k_values, kind="edges", avg_degree=10.0, seed=0,
                damping=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                repeats=3):
    """Wall-time rows for the greedy auditor across graph sizes and budgets.

    Each cell runs one untimed warmup plus ``repeats`` timed runs on a
    seeded random graph with fixed average degree and reports the fastest
    run (the standard low-noise statistic for scaling measurements).
    """
    if any(k < 1 for k in k_values):
        raise ValidationError("budgets must be >= 1")
    if not n_values or not k_values:
        raise ValidationError("need at least one size and one budget")
    rows = []
    for n in n_values:
        graph = erdos_renyi_graph(int(n), avg_degree, seed)
        name = f"er-n{int(n)}-d{avg_degree:g}-s{seed}"
        for k in k_values:
            audit(graph, kind, int(k), damping=damping, tol=tol,
                  max_iter=max_iter)
            times = []
            delta = None
            for _ in range(repeats):
                start = time.perf_counter()
                result = audit(graph, kind, int(k), damping=damping,
                               tol=tol, max_iter=max_iter)
                times.append((time.perf_counter() - start) * 1e3)
                delta = result.delta_f
            rows.append(ReportRow(name, ElementKind.parse(kind).value,
                                  "audit", int(k), delta_f=delta,
                                  wall_time_ms=float(min(times))))
    return ExperimentReport(tuple(rows), environment_fingerprint())


_CSV_COLUMNS = ("dataset", "kind", "method", "k", "delta_f", "wall_time_ms",
                "error")


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def emit_tables(report, out_dir, formats=("csv", "json"), stem="report"):
    """Write the report in stable order; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    rows = report.sorted_rows()
    if "csv" in formats:
        path = os.path.join(out_dir, f"{stem}.csv")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, col))
                             for col in _CSV_COLUMNS])
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        written.append(path)
    if "json" in formats:
        path = os.path.join(out_dir, f"{stem}.json")
        payload = {
            "fingerprint": report.fingerprint,
            "rows": [{col: getattr(row, col) for col in _CSV_COLUMNS}
                     for row in rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        written.append(path)
    return written


def read_report_csv(path):
    """Parse a CSV written by :func:`emit_tables` back into a report."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != _CSV_COLUMNS:
            raise ValidationError(
                f"{path}: unexpected columns {reader.fieldnames}")
        for rec in reader:
            rows.append(ReportRow(
                dataset=rec["dataset"], kind=rec["kind"],
                method=rec["method"], k=int(rec["k"]),
                delta_f=float(rec["delta_f"]) if rec["delta_f"] else None,
                wall_time_ms=(float(rec["wall_time_ms"])
                              if rec["wall_time_ms"] else None),
                error=rec["error"]))
    return ExperimentReport(tuple(rows))
