"""Figure rendering for reports.

Every function takes already-computed objects and writes a PNG; nothing
here recomputes mathematics.  Rendering uses the Agg backend so the CLI
works headless.  Layouts are deterministic: element positions depend
only on the order data, never on dict iteration or randomness.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import specialization_pairs

_INF = math.inf


def _layers(n, lt):
    """Longest-chain height of each node; lt is a predicate on indices."""
    height = [0] * n
    order = sorted(range(n), key=lambda i: sum(1 for j in range(n) if lt(j, i)))
    for i in order:
        below = [height[j] + 1 for j in range(n) if lt(j, i)]
        height[i] = max(below, default=0)
    return height


def _layout(n, lt):
    height = _layers(n, lt)
    rows = {}
    for i in range(n):
        rows.setdefault(height[i], []).append(i)
    pos = {}
    for h, members in rows.items():
        k = len(members)
        for c, i in enumerate(members):
            pos[i] = (c - (k - 1) / 2.0, h)
    return pos


def _draw_order(ax, labels, lt, covers, dashed=()):
    n = len(labels)
    pos = _layout(n, lt)
    for i, j in covers:
        (x0, y0), (x1, y1) = pos[i], pos[j]
        ax.plot([x0, x1], [y0, y1], color="0.55", lw=1.0, zorder=1)
    for i in range(n):
        x, y = pos[i]
        style = "--" if i in dashed else "-"
        ax.scatter([x], [y], s=900, facecolor="white", edgecolor="0.2",
                   linestyle=style, zorder=2)
        ax.annotate(str(labels[i]), (x, y), ha="center", va="center",
                    fontsize=9, zorder=3)
    ax.set_axis_off()
    ax.margins(0.2)


def hasse_figure(top, path, title=None):
    """Cover diagram; non-idempotent elements drawn with dashed borders."""
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    dashed = {i for i in range(top.n) if not top.is_idempotent(i)}
    _draw_order(ax, top.labels, top.lt, top.covers(), dashed)
    ax.set_title(title or (top.name or "order"), fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def space_figure(fs, path, title=None):
    """Specialization graph of a finite space, drawn like a cover diagram."""
    n = len(fs.points)
    rel = set(specialization_pairs(fs))

    def lt(i, j):
        return (i, j) in rel and (j, i) not in rel

    covers = [(i, j) for i, j in sorted(rel)
              if not any((i, k) in rel and (k, j) in rel
                         for k in range(n) if k not in (i, j))]
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    _draw_order(ax, fs.points, lt, covers)
    ax.set_title(title or "specialization", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def sigma_figure(obs, top, path, title=None):
    """Bar chart of the observable: one bar per element, height sigma."""
    labels = [str(l) for l in top.labels]
    vals = [obs.sigma[i] for i in range(top.n)]
    finite = [v for v in vals if v != _INF]
    cap = (max(finite) if finite else 0) + 1
    heights = [cap if v == _INF else v for v in vals]
    colors = ["0.75" if v == _INF else "#4878a8" for v in vals]
    fig, ax = plt.subplots(figsize=(4.6, 3.0))
    bars = ax.bar(range(top.n), heights, color=colors, edgecolor="0.2")
    for b, v in zip(bars, vals):
        if v == _INF:
            b.set_hatch("//")
    ax.set_xticks(range(top.n))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("sigma")
    ax.set_title(title or "observable", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def levels_figure(f, path, title=None):
    """Step plot of a filtration: gamma against the level's order height."""
    top = f.base
    height = _layers(top.n, top.lt)
    xs = list(f.gamma.labels)
    ys = [height[lv] for lv in f.levels]
    fig, ax = plt.subplots(figsize=(4.6, 3.0))
    ax.step(range(len(xs)), ys, where="post", color="#4878a8", lw=1.6)
    ax.scatter(range(len(xs)), ys, color="#4878a8", zorder=3)
    for i, lv in enumerate(f.levels):
        ax.annotate(str(top.labels[lv]), (i, ys[i]),
                    textcoords="offset points", xytext=(0, 7),
                    ha="center", fontsize=8)
    ax.set_xticks(range(len(xs)))
    ax.set_xticklabels([str(g) for g in xs], fontsize=8)
    ax.set_xlabel("gamma")
    ax.set_ylabel("order height")
    ax.set_ylim(-0.5, max(height) + 0.9)
    ax.set_title(title or (f.name or "filtration"), fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def dims_figure(fam, path, title=None):
    """Bar chart of subspace dimensions along a spectral family."""
    xs = [str(g) for g in fam.gamma.labels]
    ys = [lv.rank for lv in fam.levels]
    fig, ax = plt.subplots(figsize=(4.6, 3.0))
    ax.bar(range(len(xs)), ys, color="#4878a8", edgecolor="0.2")
    ax.set_xticks(range(len(xs)))
    ax.set_xticklabels(xs, fontsize=8)
    ax.set_xlabel("gamma")
    ax.set_ylabel("dim")
    ax.set_yticks(range(max(ys) + 2 if ys else 2))
    ax.set_title(title or "level dimensions", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def timeline_figure(system, strings, path, title=None):
    """Support intervals of accessible strings over the timeline."""
    labels = [str(l) for l in system.timeline.labels]
    fig, ax = plt.subplots(figsize=(4.8, 2.2 + 0.3 * len(strings)))
    for row, s in enumerate(strings):
        lo, hi = min(s.support), max(s.support)
        ax.plot([lo, hi], [row, row], color="#4878a8", lw=4, alpha=0.7,
                solid_capstyle="butt")
        ax.scatter([s.anchor], [row], color="#a84848", zorder=3, s=24)
        for k, t in enumerate(s.support):
            space = system.spaces[t]
            ax.annotate(str(space.labels[s.components[k]]), (t, row),
                        textcoords="offset points", xytext=(0, 6),
                        ha="center", fontsize=7)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_yticks(range(len(strings)))
    ax.set_yticklabels(["s%d" % i for i in range(len(strings))], fontsize=8)
    ax.set_ylim(-0.7, len(strings) - 0.3)
    ax.invert_yaxis()
    ax.set_title(title or "accessible strings", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
