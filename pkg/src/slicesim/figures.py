"""Render exported chart documents to PNG files with matplotlib.

This is a plotting frontend over the chart-data documents in an output
directory's ``charts/`` tree: one pie per chart document, plus a concentric
(sunburst-style) composition figure per cloud from the layered nesting
document. The documents stay the canonical artifacts; figures are derived.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_RING_WIDTH = 0.28


def render_pie(doc: dict, path: str) -> None:
    """One labelled pie from a chart document."""
    weights = doc["weights"]
    labels = doc["labels"]
    fig, ax = plt.subplots(figsize=(6, 6))
    if sum(weights) > 0:
        shown = [lbl if w > 0 else "" for lbl, w in zip(labels, weights)]
        ax.pie(weights, labels=shown, autopct="%1.1f%%", startangle=90)
    else:
        ax.text(0.5, 0.5, "empty", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(doc.get("title", ""))
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_sunburst(cloud_doc: dict, dimension: str, path: str) -> None:
    """Concentric NF / slice / service rings for one cloud."""
    fig, ax = plt.subplots(figsize=(7, 7))
    # Unused arcs at every level are carried down as blank wedges so the
    # three rings cover the same full circle and stay angle-aligned.
    inner: list[tuple[str, float]] = []
    middle: list[tuple[str, float]] = []
    outer: list[tuple[str, float]] = []
    for nf in cloud_doc.get("nfs", []):
        inner.append((nf["name"] or "", nf["weight"]))
        for s in nf.get("slices", []):
            middle.append((s["name"] or "", s["weight"]))
            for svc in s.get("services", []):
                outer.append((svc["name"] or "", svc["weight"]))
            outer.append(("", s["unused"]))
        middle.append(("", nf["unused"]))
        outer.append(("", nf["unused"]))
    for ring in (inner, middle, outer):
        ring.append(("", cloud_doc["unused"]))
    for radius, segments, cmap in (
        (0.44, inner, plt.cm.Blues),
        (0.72, middle, plt.cm.Greens),
        (1.0, outer, plt.cm.Oranges),
    ):
        weights = [max(w, 0.0) for _, w in segments]
        if sum(weights) <= 0:
            continue
        colors = [
            cmap(0.35 + 0.5 * i / max(len(segments) - 1, 1)) if label else "#eeeeee"
            for i, (label, _) in enumerate(segments)
        ]
        ax.pie(
            weights,
            labels=[label for label, _ in segments],
            radius=radius,
            colors=colors,
            startangle=90,
            wedgeprops={"width": _RING_WIDTH, "edgecolor": "white"},
            textprops={"fontsize": 7},
        )
    ax.set_title(f"{cloud_doc['name']} composition ({dimension})")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_figures(out_dir: str) -> list[str]:
    """Render every chart document under ``out_dir/charts`` to
    ``out_dir/figures``; returns the written paths."""
    charts_dir = os.path.join(out_dir, "charts")
    figures_dir = os.path.join(out_dir, "figures")
    os.makedirs(figures_dir, exist_ok=True)
    written: list[str] = []
    for entry in sorted(os.listdir(charts_dir)):
        if not entry.endswith(".json"):
            continue
        with open(os.path.join(charts_dir, entry), "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        stem = entry[: -len(".json")]
        if entry == "layered.json":
            for cloud_doc in doc.get("clouds", []):
                path = os.path.join(figures_dir, f"layered.{cloud_doc['cloud_id']}.sunburst.png")
                render_sunburst(cloud_doc, doc.get("dimension", "compute"), path)
                written.append(path)
            continue
        path = os.path.join(figures_dir, f"{stem}.png")
        render_pie(doc, path)
        written.append(path)
    return written
