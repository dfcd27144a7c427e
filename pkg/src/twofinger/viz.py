"""Figure rendering for reports: convergence curves, keyboard diagrams, and
layout comparisons. All functions write a file and return its path."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import Layout, QapInstance

_ZONE_GAP = 2.0


def plot_history(history, path, title: str = "Objective by generation"):
    """Line chart of (best, mean) objective per generation."""
    gens = range(len(history))
    best = [h[0] for h in history]
    mean = [h[1] for h in history]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(gens, best, label="best", color="tab:blue")
    ax.plot(gens, mean, label="population mean", color="tab:orange", alpha=0.7)
    ax.set_xlabel("generation")
    ax.set_ylabel("objective")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_layout(layout: Layout, instance: QapInstance, path, title: str = "Keyboard layout"):
    """Keyboard diagram: one labeled square per key, zones side by side."""
    symbols = instance.alphabet.symbols
    parts = layout.part_lists()
    fig, ax = plt.subplots(figsize=(10, 3.6))
    x_shift = 0.0
    for part, zone in enumerate(instance.geometry.zones):
        if part > 0:
            prev = instance.geometry.zones[part - 1]
            x_shift += max(x for x, _ in prev) + _ZONE_GAP
        for loc, (x, y) in enumerate(zone):
            px = x + x_shift
            ax.add_patch(
                plt.Rectangle((px - 0.45, y - 0.45), 0.9, 0.9, fill=True,
                              facecolor="#eef2f7", edgecolor="#33415c")
            )
            ax.text(px, y, symbols[parts[part][loc]], ha="center", va="center", fontsize=13)
    ax.set_xlim(-1, x_shift + max(x for x, _ in instance.geometry.zones[-1]) + 1)
    ax.set_ylim(max(y for zone in instance.geometry.zones for _, y in zone) + 1, -1)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_comparison(rows, path, title: str = "Layout comparison"):
    """Bar chart of total objective per named layout, best first."""
    names = [r.name for r in rows]
    totals = [r.total for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(names, totals, color="#5886a5")
    bars[0].set_color("#2a9d8f")
    ax.set_ylabel("objective")
    ax.set_title(title)
    for rect, value in zip(bars, totals):
        ax.annotate(f"{value:,.0f}", (rect.get_x() + rect.get_width() / 2, rect.get_height()),
                    ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
