#!/usr/bin/env python3
"""Regenerate the committed desk-scale fixture at data/synthcora.

The parameters below were calibrated so the graph behaves like a small
citation network: raw features alone classify at ~0.59, a trained
contrastive encoder reaches ~0.85-0.87, leaving measurable headroom
between loss variants. Committed output keeps runs reproducible across
numpy versions; rerun this script only when intentionally changing the
fixture (tests pin its content).
"""

from pathlib import Path

from muxgcl.datasets import save_dataset
from muxgcl.synthetic import make_synthetic_graph

FIXTURE = dict(
    num_nodes=1400,
    num_classes=7,
    num_features=800,
    avg_degree=3.5,
    homophily=0.65,
    words_per_node=16,
    signal=0.35,
    seed=42,
    name="synthcora",
)


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "data" / "synthcora"
    g = make_synthetic_graph(**FIXTURE)
    save_dataset(g, out)
    print(f"wrote {out}: {g.num_nodes} nodes, {g.num_edges} edges, "
          f"{g.num_features} features, {g.num_classes} classes")


if __name__ == "__main__":
    main()
