#!/usr/bin/env python3
"""Regenerate the bundled edge lists from networkx's built-in datasets.

Run from the repository root:  python scripts/make_datasets.py
Writes datasets/karate.txt and datasets/lesmis.txt plus JSON sidecars.
"""

import os
import sys

import networkx as nx

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
from rankaudit import write_sidecar  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "datasets")


def dump(graph, name):
    path = os.path.join(OUT, name)
    nodes = sorted(graph.nodes(), key=str)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {name}: {graph.number_of_nodes()} nodes, "
                 f"{graph.number_of_edges()} undirected edges\n")
        for u in nodes:
            for v in sorted(graph.neighbors(u), key=str):
                if str(u) <= str(v):
                    fh.write(f"{u} {v}\n")
    write_sidecar(path, directed=False, norm_mode="column")
    print(f"wrote {path}")


def main():
    os.makedirs(OUT, exist_ok=True)
    dump(nx.karate_club_graph(), "karate.txt")
    dump(nx.les_miserables_graph(), "lesmis.txt")


if __name__ == "__main__":
    main()
