"""Report rendering: automaton sketches and language profiles as figures.

The report path writes the byte-stable language dump next to two PNG
figures: a sketch of the cell complex (vertices, labelled edges, shaded
squares) and a histogram of language members by size and width.  Layout
is deterministic, so reports are reproducible.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Polygon

from . import ipomset as ip
from .langset import Language, Truncation, dump_language
from .pathlang import enumerate_language
from .pcset import Hda


def _vertex_layout(x: Hda) -> dict[str, tuple[float, float]]:
    """Deterministic layout: vertices on a circle, relaxed a few rounds
    towards the midpoints of their edge neighbourhoods."""
    vertices = sorted(c for c, cell in x.cells.items() if cell.dim == 0)
    pos = {}
    k = max(len(vertices), 1)
    for i, v in enumerate(vertices):
        ang = 2 * math.pi * i / k
        pos[v] = (math.cos(ang), math.sin(ang))
    edges = [cell for cell in x.cells.values() if cell.dim == 1]
    for _ in range(30):
        force = {v: [0.0, 0.0, 0] for v in vertices}
        for e in edges:
            a, b = e.d0[0], e.d1[0]
            if a in pos and b in pos:
                for u, w in ((a, b), (b, a)):
                    force[u][0] += pos[w][0]
                    force[u][1] += pos[w][1]
                    force[u][2] += 1
        for v in vertices:
            fx, fy, cnt = force[v]
            if cnt:
                ox, oy = pos[v]
                pos[v] = (0.6 * ox + 0.4 * fx / cnt + 0.02 * math.cos(hash(v) % 7),
                          0.6 * oy + 0.4 * fy / cnt + 0.02 * math.sin(hash(v) % 5))
    return pos


def render_hda_figure(x: Hda, path: str, title: Optional[str] = None) -> None:
    """Sketch the 0/1/2-skeleton with start/accept markers."""
    pos = _vertex_layout(x)
    fig, ax = plt.subplots(figsize=(6, 6))
    for cell in sorted(x.cells.values(), key=lambda c: c.cid):
        if cell.dim != 2:
            continue
        corners = []
        for a, b in (((0, 1), ()), ((1,), (0,)), ((0,), (1,)), ((), (0, 1))):
            try:
                corners.append(pos[x.pcset.face(cell.cid, a, b)])
            except Exception:
                pass
        if len(corners) >= 3:
            ax.add_patch(Polygon(corners, closed=True, alpha=0.15,
                                 facecolor="tab:blue", edgecolor="none"))
    for cell in sorted(x.cells.values(), key=lambda c: c.cid):
        if cell.dim != 1:
            continue
        a, b = cell.d0[0], cell.d1[0]
        if a is None or b is None or a not in pos or b not in pos:
            continue
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", color="0.3", lw=1.0))
        ax.text((x0 + x1) / 2, (y0 + y1) / 2, cell.iev.labels[0],
                fontsize=9, color="tab:red", ha="center", va="bottom")
    for v, (vx, vy) in pos.items():
        marker = "o"
        color = "0.2"
        if v in x.start and v in x.accept:
            color = "tab:purple"
        elif v in x.start:
            color = "tab:green"
        elif v in x.accept:
            color = "tab:orange"
        ax.plot([vx], [vy], marker, color=color, markersize=6)
    ax.set_title(title or f"{len(x.cells)} cells, dim {x.dim()}")
    ax.set_aspect("equal")
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_language_profile(lang: Language, path: str) -> None:
    """Bar chart of member counts grouped by (size, width)."""
    counts = Counter(
        (ip.twice_size(p) / 2, ip.width(p)) for p in lang.members)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    keys = sorted(counts)
    ax.bar(range(len(keys)), [counts[k] for k in keys], color="tab:blue")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels([f"s={s:g}\nw={w}" for s, w in keys], fontsize=8)
    ax.set_ylabel("members")
    ax.set_title(f"{len(lang.members)} members within "
                 f"size {lang.trunc.size}, width {lang.trunc.width}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(x: Hda, trunc: Truncation, outdir: str,
                 stem: str = "report") -> list[str]:
    """Write the language dump and both figures; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    lang = enumerate_language(x, trunc)
    paths = []
    dump_path = os.path.join(outdir, f"{stem}_language.txt")
    with open(dump_path, "w", encoding="utf-8") as fh:
        fh.write(dump_language(lang))
    paths.append(dump_path)
    fig_path = os.path.join(outdir, f"{stem}_complex.png")
    render_hda_figure(x, fig_path)
    paths.append(fig_path)
    prof_path = os.path.join(outdir, f"{stem}_profile.png")
    render_language_profile(lang, prof_path)
    paths.append(prof_path)
    return paths
