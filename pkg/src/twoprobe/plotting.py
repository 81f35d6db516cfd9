"""Figures written next to the CSV reports."""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import Table  # noqa: E402


def _figure(width=6.0, height=None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    for spine in ("top", "right"):
        ax.spines[spine].set_visible(False)
    return fig, ax


def _save(fig, path) -> None:
    fig.tight_layout()
    # drop version and date stamps so repeated runs are byte-identical
    suffix = str(path).rsplit(".", 1)[-1].lower()
    metadata = {"png": {"Software": None}, "pdf": {"CreationDate": None, "Producer": None},
                "svg": {"Date": None}}.get(suffix)
    if suffix == "svg":
        plt.rcParams["svg.hashsalt"] = "twoprobe"
    fig.savefig(path, dpi=120, metadata=metadata)
    plt.close(fig)


def bounds_figure(rows, path) -> None:
    """log10 of both bounds against n, one line pair per m."""
    by_m = defaultdict(list)
    for row in rows:
        by_m[row.m].append(row)
    fig, ax = _figure()
    for m, group in sorted(by_m.items()):
        group.sort(key=lambda r: r.n)
        ns = [r.n for r in group]
        line, = ax.plot(ns, [math.log10(r.restricted_bound) for r in group], marker="o", ms=3,
                        label=f"restricted, m={m:.3g}")
        general = [(r.n, math.log10(r.general_bound)) for r in group if r.general_bound]
        if general:
            ax.plot(*zip(*general), ls="--", color=line.get_color(), label=f"general, m={m:.3g}")
    ax.set_xlabel("subset size n")
    ax.set_ylabel("log10 space bound")
    ax.legend(fontsize=7, frameon=False)
    _save(fig, path)


def transform_figure(report, path) -> None:
    """Per-index set counts of tables B and C at each stage of the pipeline."""
    rows = report.rows()
    ks = [r[0] for r in rows]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
    width = 0.2
    for ax, table, offset in ((axes[0], Table.B, 1), (axes[1], Table.C, 2)):
        for stage in range(4):
            heights = [r[offset + 2 * stage] for r in rows]
            ax.bar([k + (stage - 1.5) * width for k in ks], heights, width=width, label=f"stage {stage}")
        ax.set_title(f"table {table}")
        ax.set_xlabel("index k")
        ax.axvline(2 * report.i + 2.5, color="0.5", lw=0.8, ls=":")
    axes[0].set_ylabel("number of sets")
    axes[0].legend(fontsize=7, frameon=False)
    _save(fig, path)


def ratio_figure(rows, path) -> None:
    """Distribution of the universe-size ratio per t."""
    by_t = defaultdict(list)
    for row in rows:
        by_t[row["t"]].append(row["ratio"])
    fig, ax = _figure()
    ts = sorted(by_t)
    if ts:
        ax.boxplot([by_t[t] for t in ts])
        ax.set_xticks(range(1, len(ts) + 1), [str(t) for t in ts])
    ax.set_xlabel("t")
    ax.set_ylabel("universe-size ratio")
    _save(fig, path)


def synth_figure(results, path) -> None:
    """Minimal B/C table size against m, one series per (n, b)."""
    series = defaultdict(list)
    for res in results:
        if res.minimal_s is not None:
            series[(res.n, res.b)].append((res.m, res.minimal_s))
    fig, ax = _figure()
    for (n, b), pts in sorted(series.items()):
        pts.sort()
        ax.plot(*zip(*pts), marker="o", label=f"n={n}, b={b}")
    ax.set_xlabel("universe size m")
    ax.set_ylabel("minimal table size")
    ax.legend(fontsize=7, frameon=False)
    _save(fig, path)
