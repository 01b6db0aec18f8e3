"""Figure rendering for the report data (opt-in via ``--plots DIR``).

Every function draws from the same structures the CLI serialises, so the
figures are a faithful view of the delimited output, never an alternative
computation.  Files land in the chosen directory as PNGs; stdout stays
untouched.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FACTOR_UP = "#c0392b"
_FACTOR_DOWN = "#2471a3"


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_local_factors(names, values, contributions, baseline, prediction, path, top: int = 15):
    """Horizontal per-feature factor bars on a log scale around 1."""
    contributions = np.asarray(contributions, dtype=np.float64)
    order = np.argsort(-np.abs(np.log(contributions)), kind="stable")[:top][::-1]
    labels = [f"{names[j]} = {values[j]:.4g}" for j in order]
    factors = contributions[order]
    colors = [_FACTOR_UP if f >= 1.0 else _FACTOR_DOWN for f in factors]
    fig, ax = plt.subplots(figsize=(7, 0.4 * len(order) + 1.6))
    ax.barh(np.arange(len(order)), np.log(factors), color=colors)
    ax.set_yticks(np.arange(len(order)), labels=labels, fontsize=8)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ticks = ax.get_xticks()
    ax.set_xticks(ticks, labels=[f"{np.exp(t):.2f}" for t in ticks])
    ax.set_xlabel("multiplicative factor")
    ax.set_title(f"prediction {prediction:.4g} = baseline {baseline:.4g} x factors")
    _finish(fig, path)


def plot_importance(names, importance, path, top: int = 20):
    """Bar chart of global feature importance (already sorted descending)."""
    k = min(top, len(names))
    fig, ax = plt.subplots(figsize=(7, 0.35 * k + 1.4))
    ax.barh(np.arange(k)[::-1], np.asarray(importance[:k]), color="#7d3c98")
    ax.set_yticks(np.arange(k)[::-1], labels=list(names[:k]), fontsize=8)
    ax.set_xlabel("global importance (geometric mean of max(psi, 1/psi))")
    ax.axvline(1.0, color="black", linewidth=0.8)
    _finish(fig, path)


def plot_summary(names, importance, pairs, path, top: int = 15):
    """Jittered factor strips per feature, colored by feature value, with the
    importance bars underneath."""
    k = min(top, len(names))
    rng = np.random.default_rng(0)  # jitter only; cosmetic
    fig, ax = plt.subplots(figsize=(8, 0.5 * k + 1.6))
    for rank in range(k):
        points = np.asarray(pairs[rank])
        y = (k - 1 - rank) + rng.uniform(-0.18, 0.18, len(points))
        vals = points[:, 0]
        span = vals.max() - vals.min()
        shade = (vals - vals.min()) / span if span > 0 else np.full(len(vals), 0.5)
        ax.scatter(points[:, 1], y, c=shade, cmap="coolwarm", s=9, alpha=0.8)
        ax.barh(
            k - 1 - rank,
            importance[rank] - 1.0,
            left=1.0,
            height=0.8,
            color="#d5d8dc",
            zorder=0,
        )
    ax.set_yticks(np.arange(k)[::-1], labels=list(names[:k]), fontsize=8)
    ax.set_xscale("log")
    ax.axvline(1.0, color="black", linewidth=0.8)
    ax.set_xlabel("multiplicative contribution")
    ax.set_title("contribution summary (bars: global importance)")
    _finish(fig, path)


def plot_partial_dependence(name, edges, pd_values, counts, path):
    """Step plot of binned partial dependence; empty bins leave gaps."""
    edges = np.asarray(edges, dtype=np.float64)
    values = np.asarray(pd_values, dtype=np.float64)
    centers = 0.5 * (edges[:-1] + edges[1:])
    fig, (ax, axc) = plt.subplots(
        2, 1, figsize=(7, 5), sharex=True, height_ratios=[3, 1]
    )
    ok = ~np.isnan(values)
    ax.step(centers[ok], values[ok], where="mid", color="#1e8449")
    ax.scatter(centers[ok], values[ok], s=14, color="#1e8449")
    ax.set_ylabel("partial dependence")
    ax.set_title(f"partial dependence of {name}")
    axc.bar(centers, counts, width=0.9 * np.diff(edges), color="#d5d8dc")
    axc.set_ylabel("count")
    axc.set_xlabel(name)
    _finish(fig, path)


def plot_group_contributions(labels, names, matrix, path, top: int = 15):
    """Grouped factor bars per feature for each observation group."""
    matrix = np.asarray(matrix, dtype=np.float64)
    spread = np.abs(np.log(matrix)).max(axis=0)
    order = np.argsort(-spread, kind="stable")[:top]
    k = len(order)
    width = 0.8 / len(labels)
    fig, ax = plt.subplots(figsize=(8, 0.5 * k + 1.6))
    for g, label in enumerate(labels):
        ax.barh(
            np.arange(k)[::-1] + (g - (len(labels) - 1) / 2) * width,
            np.log(matrix[g, order]),
            height=width,
            label=label,
        )
    ax.set_yticks(np.arange(k)[::-1], labels=[names[j] for j in order], fontsize=8)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ticks = ax.get_xticks()
    ax.set_xticks(ticks, labels=[f"{np.exp(t):.2f}" for t in ticks])
    ax.set_xlabel("group factor")
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_convergence(budgets, errors, path):
    """Relative contribution error against the largest coalition budget."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(budgets, errors, marker="o", color="#b9770e")
    ax.set_xscale("log")
    positive = [e for e in errors if e > 0]
    if positive:
        ax.set_yscale("log")
    ax.set_xlabel("coalition budget")
    ax.set_ylabel("max relative contribution change vs final budget")
    ax.set_title("contribution convergence")
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)
