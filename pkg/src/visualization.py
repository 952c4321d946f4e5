"""Visualization: certificate drawings, reduction-kind counts, final-charge distributions."""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import networkx as nx
import numpy as np

from .orchestrator import BatchRun
from .plane_graph import PlaneGraph
from .reducer import Certificate

COLORS = {
    "matching": "#e74c3c",
    "arc": "#34495e",
    "root": "#f39c12",
    "vertex": "#3498db",
    "v0": "#9b59b6",
    "f0": "#1abc9c",
}


def _layout(G: PlaneGraph) -> dict[int, np.ndarray]:
    g = G.to_networkx()
    if g.number_of_nodes() <= 2:
        return nx.circular_layout(g)
    planar, embedding = nx.check_planarity(g)
    if planar:
        return nx.planar_layout(embedding)
    return nx.spring_layout(g, seed=0)


def plot_certificate(G: PlaneGraph, cert: Certificate, output_path: str = "data/certificate.png") -> str:
    """Matching edges thick, oriented arcs as arrows, root highlighted."""
    pos = _layout(G)
    fig, ax = plt.subplots(figsize=(8, 8))

    digraph = cert.orientation.to_digraph()
    nx.draw_networkx_edges(
        digraph, pos, ax=ax, edge_color=COLORS["arc"], arrows=True, arrowsize=16, width=1.5
    )
    nx.draw_networkx_edges(
        G.to_networkx(), pos, ax=ax, edgelist=sorted(cert.matching.edges),
        edge_color=COLORS["matching"], width=5,
    )
    node_colors = [COLORS["root"] if v == G.root else COLORS["vertex"] for v in G.vertices]
    nx.draw_networkx_nodes(G.to_networkx(), pos, ax=ax, nodelist=list(G.vertices),
                           node_color=node_colors, node_size=420)
    nx.draw_networkx_labels(G.to_networkx(), pos, ax=ax, font_color="white", font_size=10)
    ax.set_title(
        f"|M| = {len(cert.matching)}, root {G.root}, max out-degree {cert.orientation.max_out_degree}",
        fontsize=12, fontweight="bold",
    )
    ax.axis("off")

    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return output_path


def plot_reduction_kinds(run: BatchRun, output_path: str = "data/reduction_kinds.png") -> str:
    """Bar chart of how often each reduction (and the brute-force base) was applied."""
    counts = sorted(run.stats.kind_counts.items())
    fig, ax = plt.subplots(figsize=(12, 6))
    if counts:
        names, values = zip(*counts)
        ax.bar(names, values, color=COLORS["vertex"])
        ax.tick_params(axis="x", rotation=30)
    ax.set_ylabel("Applications", fontsize=12)
    ax.set_title(f"Reductions applied (l={run.stats.l}, {run.stats.graphs} graphs)",
                 fontsize=14, fontweight="bold")
    ax.grid(True, axis="y", alpha=0.3)

    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return output_path


def plot_final_charges(run: BatchRun, output_path: str = "data/final_charges.png") -> str:
    """Histograms of the final charge of v0 and of f0 across the batch."""
    v0 = np.array([float(o.v0_final) for o in run.outcomes if o.v0_final is not None])
    f0 = np.array([float(o.f0_final) for o in run.outcomes if o.f0_final is not None])

    fig, ax = plt.subplots(figsize=(12, 6))
    if v0.size or f0.size:
        lo = float(min(v0.min(initial=0), f0.min(initial=0)))
        hi = float(max(v0.max(initial=0), f0.max(initial=0)))
        bins = np.linspace(lo - 0.5, hi + 0.5, 25)
        ax.hist(v0, bins=bins, alpha=0.6, color=COLORS["v0"], label="ch*(v0)")
        ax.hist(f0, bins=bins, alpha=0.6, color=COLORS["f0"], label="ch*(f0)")
        ax.legend(fontsize=10)
    ax.set_xlabel("Final charge", fontsize=12)
    ax.set_ylabel("Graphs", fontsize=12)
    ax.set_title(f"Final charges of v0 and f0 (l={run.stats.l})", fontsize=14, fontweight="bold")
    ax.grid(True, alpha=0.3)

    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return output_path


def generate_batch_plots(run: BatchRun, output_dir: str = "data") -> list[str]:
    return [
        plot_reduction_kinds(run, f"{output_dir}/reduction_kinds_l{run.stats.l}.png"),
        plot_final_charges(run, f"{output_dir}/final_charges_l{run.stats.l}.png"),
    ]
