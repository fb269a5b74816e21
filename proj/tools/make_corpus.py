#!/usr/bin/env python3
"""Builds the bundled mini-corpus under data/corpus.

Classic networks come from networkx; the planted-partition synthetics are
produced by `cfit gen` with the seeds listed below.

usage: tools/make_corpus.py --cfit build/tools/cfit [--out data/corpus]
"""
import argparse
import pathlib
import subprocess

import networkx as nx

CLASSIC = [
    ("karate", "social", nx.karate_club_graph),
    ("lesmis", "social", nx.les_miserables_graph),
    ("florentine", "social", nx.florentine_families_graph),
    ("davis", "social", nx.davis_southern_women_graph),
]

# name, nodes, groups, p_in, p_out, seed
SYNTHETIC = [
    ("planted_n40_k2", 40, 2, 0.40, 0.05, 101),
    ("planted_n50_k2", 50, 2, 0.30, 0.04, 102),
    ("planted_n60_k3", 60, 3, 0.35, 0.03, 103),
    ("planted_n60_k2_weak", 60, 2, 0.15, 0.06, 104),
    ("planted_n70_k3", 70, 3, 0.25, 0.03, 105),
    ("planted_n80_k4", 80, 4, 0.35, 0.02, 106),
    ("planted_n80_k2", 80, 2, 0.12, 0.03, 107),
    ("planted_n90_k3", 90, 3, 0.20, 0.02, 108),
    ("planted_n90_k5", 90, 5, 0.40, 0.02, 109),
    ("planted_n100_k4", 100, 4, 0.20, 0.02, 110),
    ("planted_n100_k2", 100, 2, 0.10, 0.02, 111),
    ("planted_n110_k5", 110, 5, 0.25, 0.015, 112),
    ("planted_n120_k3", 120, 3, 0.12, 0.02, 113),
    ("planted_n120_k6", 120, 6, 0.30, 0.01, 114),
    ("planted_n130_k4", 130, 4, 0.15, 0.015, 115),
    ("planted_n140_k5", 140, 5, 0.18, 0.01, 116),
]


def export_classic(out: pathlib.Path, name: str, build) -> None:
    g = nx.convert_node_labels_to_integers(build(), ordering="sorted")
    lines = [f"# {name}: {g.number_of_nodes()} nodes, {g.number_of_edges()} edges (networkx)"]
    lines += [f"{min(u, v)} {max(u, v)}" for u, v in sorted(g.edges()) if u != v]
    (out / f"{name}.txt").write_text("\n".join(lines) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cfit", required=True)
    ap.add_argument("--out", default="data/corpus")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["name,path,domain"]
    for name, domain, build in CLASSIC:
        export_classic(out, name, build)
        rows.append(f"{name},{name}.txt,{domain}")
    for name, n, k, p_in, p_out, seed in SYNTHETIC:
        subprocess.run(
            [args.cfit, "gen", "--nodes", str(n), "--groups", str(k), "--p-in", str(p_in),
             "--p-out", str(p_out), "--seed", str(seed), "--largest-component",
             "--out", str(out / f"{name}.txt"), "--labels", str(out / f"{name}.labels")],
            check=True)
        rows.append(f"{name},{name}.txt,synthetic")
    (out / "manifest.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
