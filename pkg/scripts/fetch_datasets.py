#!/usr/bin/env python3
"""Fetch the optional benchmark datasets that cannot be bundled.

Karate and Les Miserables ship with the repository (see
make_datasets.py). Two further public datasets are referenced by the
acceptance suite and are skipped when absent; on a machine with network
access this script downloads and converts them:

  dolphins.txt  Lusseau's bottlenose dolphin social network (62 nodes,
                159 undirected edges), from the UCI/Newman network
                collection GML file.
  grqc.txt      arXiv GR-QC collaboration network (5242 nodes, 14496
                undirected edges), from the SNAP text dump.

Usage:  python scripts/fetch_datasets.py [--dest datasets/]
"""

import argparse
import gzip
import io
import os
import re
import sys
import urllib.request

DOLPHINS_URLS = [
    "https://websites.umich.edu/~mejn/netdata/dolphins.zip",
    "http://www-personal.umich.edu/~mejn/netdata/dolphins.zip",
]
GRQC_URL = "https://snap.stanford.edu/data/ca-GrQc.txt.gz"


def fetch(url):
    print(f"downloading {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def parse_gml_edges(text):
    """Minimal GML edge extraction: source/target pairs inside edge blocks."""
    edges = []
    for block in re.findall(r"edge\s*\[(.*?)\]", text, flags=re.S):
        src = re.search(r"source\s+(\d+)", block)
        dst = re.search(r"target\s+(\d+)", block)
        if src and dst:
            edges.append((int(src.group(1)), int(dst.group(1))))
    return edges


def write_edge_list(path, edges, comment):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {comment}\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")
    sidecar = path + ".json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        fh.write('{"directed": false, "normalization": "column"}\n')
    print(f"wrote {path} ({len(edges)} edges)")


def fetch_dolphins(dest):
    import zipfile
    last_error = None
    for url in DOLPHINS_URLS:
        try:
            blob = fetch(url)
            break
        except Exception as exc:
            last_error = exc
    else:
        raise SystemExit(f"could not download dolphins: {last_error}")
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        name = next(n for n in zf.namelist() if n.endswith(".gml"))
        text = zf.read(name).decode("utf-8", errors="replace")
    edges = parse_gml_edges(text)
    if len(edges) != 159:
        raise SystemExit(f"expected 159 dolphin edges, parsed {len(edges)}")
    write_edge_list(os.path.join(dest, "dolphins.txt"), edges,
                    "dolphins: 62 nodes, 159 undirected edges")


def fetch_grqc(dest):
    blob = gzip.decompress(fetch(GRQC_URL))
    seen = set()
    edges = []
    for line in blob.decode("utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        a, b = line.split()
        u, v = sorted((int(a), int(b)))
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            edges.append((u, v))
    if len(edges) != 14496:
        raise SystemExit(f"expected 14496 GrQc edges, parsed {len(edges)}")
    write_edge_list(os.path.join(dest, "grqc.txt"), edges,
                    "grqc: 5242 nodes, 14496 undirected edges")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=os.path.join(
        os.path.dirname(__file__), "..", "datasets"))
    args = parser.parse_args()
    os.makedirs(args.dest, exist_ok=True)
    fetch_dolphins(args.dest)
    fetch_grqc(args.dest)


if __name__ == "__main__":
    main()
