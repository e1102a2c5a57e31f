"""Metrics summaries, chart-data documents, and file export.

This layer is pure transformation: it turns a registry plus a trace into
documents that any plotting frontend can consume. Numbers are rendered with
17 significant decimal digits so exported files are byte-stable and
re-import to the exact same float values (stdlib json offers no control
over float rendering, hence the small emitter here).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

from .engine import TraceRecord
from .managers import Registry
from .model import DIMENSIONS, Nf, entity_sort_key

UNUSED_LABEL = "Unused"

CLOUD_UTILIZATION = "cloud-utilization"
NF_SLICE_SHARES = "nf-slice-shares"
LAYERED_COMPOSITION = "layered-composition"


# JSON rendering with fixed-precision floats


def _render_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot render non-finite number {value!r}")
    text = format(value, ".17g")
    # Keep a decimal marker so re-imported values stay floats.
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"
    return text


def render_json(value, indent: int | None = None) -> str:
    """Serialize to JSON with 17-significant-digit floats."""
    return "".join(_emit(value, indent, 0)) + ("\n" if indent is not None else "")


def _emit(value, indent, depth):
    if value is None or isinstance(value, bool):
        yield json.dumps(value)
    elif isinstance(value, float):
        yield _render_float(value)
    elif isinstance(value, int):
        yield str(value)
    elif isinstance(value, str):
        yield json.dumps(value)
    elif isinstance(value, dict):
        yield from _emit_block(
            [(json.dumps(str(k)) + ": ", v) for k, v in value.items()],
            "{", "}", indent, depth,
        )
    elif isinstance(value, (list, tuple)):
        yield from _emit_block([("", v) for v in value], "[", "]", indent, depth)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit_block(items, open_ch, close_ch, indent, depth):
    if not items:
        yield open_ch + close_ch
        return
    if indent is None:
        yield open_ch
        for i, (prefix, v) in enumerate(items):
            if i:
                yield ", "
            yield prefix
            yield from _emit(v, indent, depth)
        yield close_ch
        return
    pad = " " * (indent * (depth + 1))
    yield open_ch + "\n"
    for i, (prefix, v) in enumerate(items):
        yield pad + prefix
        yield from _emit(v, indent, depth + 1)
        yield ",\n" if i < len(items) - 1 else "\n"
    yield " " * (indent * depth) + close_ch


# Metrics


@dataclass
class MetricsSummary:
    """Per-entity metrics for one completed run."""

    clouds: dict = field(default_factory=dict)
    nfs: dict = field(default_factory=dict)
    slices: dict = field(default_factory=dict)
    services: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "meta": self.meta,
            "clouds": self.clouds,
            "nfs": self.nfs,
            "slices": self.slices,
            "services": self.services,
        }


def summarize(registry: Registry, trace: list[TraceRecord], meta: dict | None = None) -> MetricsSummary:
    """Deterministic metrics from a registry snapshot and a time-ordered trace.

    Slice peak (and mean) loads are taken over post-event values; service
    rejection ratios are None when a service saw no arrivals.
    """
    summary = MetricsSummary(meta=dict(meta or {}))
    for cid in registry.registration_order:
        cloud = registry.clouds[cid]
        summary.clouds[cid] = {
            "name": cloud.name,
            "capacity": cloud.capacity.as_dict(),
            "allocated": cloud.allocated().as_dict(),
            "residual": cloud.residual().as_dict(),
            "utilization": cloud.utilization_ratios(),
        }
    for nid in sorted(registry.nfs, key=entity_sort_key):
        nf = registry.nfs[nid]
        summary.nfs[nid] = {
            "name": nf.name,
            "requirement": nf.requirement.as_dict(),
            "placement": nf.placement,
            "placement_name": registry.clouds[nf.placement].name if nf.placement else None,
            "slice_shares": {
                sid: nf.slice_shares[sid] for sid in sorted(nf.slice_shares, key=entity_sort_key)
            },
            "utilization": nf.utilization(),
            "remaining_share": nf.remaining_share(),
        }
    loads_seen: dict[str, list[float]] = {}
    counts: dict[str, dict[str, int]] = {}
    for record in trace:
        for sid, load in record.loads.items():
            loads_seen.setdefault(sid, []).append(load)
        if record.outcome in ("admitted", "rejected"):
            per = counts.setdefault(record.service_id, {"admitted": 0, "rejected": 0})
            per[record.outcome] += 1
    for sid in sorted(registry.slices, key=entity_sort_key):
        s = registry.slices[sid]
        seen = loads_seen.get(sid, [])
        summary.slices[sid] = {
            "name": s.name,
            "deployed": s.deployed,
            "composition": {
                nid: s.composition[nid] for nid in sorted(s.composition, key=entity_sort_key)
            },
            "mean_load": sum(seen) / len(seen) if seen else 0.0,
            "peak_load": max(seen) if seen else 0.0,
        }
    service_ids = set(registry.services) | set(counts)
    for svid in sorted(service_ids, key=entity_sort_key):
        svc = registry.services.get(svid)
        admitted = counts.get(svid, {}).get("admitted", 0)
        rejected = counts.get(svid, {}).get("rejected", 0)
        total = admitted + rejected
        summary.services[svid] = {
            "name": svc.name if svc else None,
            "priority": svc.priority if svc else None,
            "composition": (
                {sid: svc.composition[sid] for sid in sorted(svc.composition, key=entity_sort_key)}
                if svc
                else {}
            ),
            "admitted": admitted,
            "rejected": rejected,
            "rejection_ratio": rejected / total if total else None,
        }
    return summary


# Chart data


@dataclass(frozen=True)
class ChartData:
    """Labels/weights for one pie-style view; weights are non-negative."""

    kind: str
    title: str
    labels: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise ValueError("labels and weights must have equal length")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "title": self.title,
            "labels": list(self.labels),
            "weights": [float(w) for w in self.weights],
        }


def _non_negative(value: float) -> float:
    # Admission tolerance can leave an unused share a hair below zero.
    return value if value > 0.0 else 0.0


def nf_slice_chart(nf: Nf, registry: Registry) -> ChartData:
    """Share of one NF per riding slice, in ascending slice-id order, with a
    trailing "Unused" wedge so weights always total 100."""
    if nf.id is None or registry.nfs.get(nf.id) is not nf:
        raise ValueError(f"NF {nf.name!r} is not part of this registry")
    labels: list[str] = []
    weights: list[float] = []
    for sid in sorted(nf.slice_shares, key=entity_sort_key):
        labels.append(registry.slices[sid].name)
        weights.append(nf.slice_shares[sid])
    labels.append(UNUSED_LABEL)
    weights.append(_non_negative(nf.remaining_share()))
    return ChartData(kind=NF_SLICE_SHARES, title=nf.name, labels=tuple(labels), weights=tuple(weights))


def cloud_utilization_chart(cloud_id: str, registry: Registry, dimension: str = "compute") -> ChartData:
    """Percentage of one cloud dimension held per hosted NF, plus "Unused"."""
    cloud = registry.clouds[cloud_id]
    cap = cloud.capacity.get(dimension)
    labels: list[str] = []
    weights: list[float] = []
    for nid, rv in cloud.allocations.items():
        labels.append(registry.nfs[nid].name)
        weights.append(100.0 * rv.get(dimension) / cap)
    labels.append(UNUSED_LABEL)
    weights.append(_non_negative(100.0 * cloud.residual().get(dimension) / cap))
    return ChartData(
        kind=CLOUD_UTILIZATION,
        title=f"{cloud.name} ({dimension})",
        labels=tuple(labels),
        weights=tuple(weights),
    )


@dataclass
class LayeredView:
    """Nested cloud -> NF -> slice -> service breakdown for one dimension.

    `charts` maps a path slug to the ring sitting under that parent, and
    `nesting` is the single machine-readable document tying them together.
    Each ring's weights sum to its parent's weight (the cloud itself is 1).
    """

    dimension: str
    charts: dict[str, ChartData]
    nesting: dict


def layered_view(registry: Registry, dimension: str = "compute") -> LayeredView:
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    charts: dict[str, ChartData] = {}
    cloud_docs = []
    for cid in registry.registration_order:
        cloud = registry.clouds[cid]
        cap = cloud.capacity.get(dimension)
        nf_docs = []
        nf_labels: list[str] = []
        nf_weights: list[float] = []
        for nid, rv in cloud.allocations.items():
            nf = registry.nfs[nid]
            weight = rv.get(dimension) / cap
            nf_labels.append(nf.name)
            nf_weights.append(weight)
            nf_docs.append(_layered_nf(registry, cid, nf, weight, charts))
        unused = _non_negative(cloud.residual().get(dimension) / cap)
        nf_labels.append(UNUSED_LABEL)
        nf_weights.append(unused)
        charts[cid] = ChartData(
            kind=LAYERED_COMPOSITION,
            title=f"{cloud.name} ({dimension})",
            labels=tuple(nf_labels),
            weights=tuple(nf_weights),
        )
        cloud_docs.append(
            {
                "cloud_id": cid,
                "name": cloud.name,
                "weight": 1.0,
                "nfs": nf_docs,
                "unused": unused,
            }
        )
    nesting = {"kind": LAYERED_COMPOSITION, "dimension": dimension, "clouds": cloud_docs}
    return LayeredView(dimension=dimension, charts=charts, nesting=nesting)


def _layered_nf(registry: Registry, cid: str, nf: Nf, weight: float, charts: dict) -> dict:
    slice_docs = []
    labels: list[str] = []
    weights: list[float] = []
    for sid in sorted(nf.slice_shares, key=entity_sort_key):
        s = registry.slices[sid]
        slice_weight = weight * nf.slice_shares[sid] / 100.0
        labels.append(s.name)
        weights.append(slice_weight)
        slice_docs.append(_layered_slice(registry, cid, nf.id, s.id, s.name, slice_weight, charts))
    unused = _non_negative(weight * nf.remaining_share() / 100.0)
    labels.append(UNUSED_LABEL)
    weights.append(unused)
    charts[f"{cid}.{nf.id}"] = ChartData(
        kind=LAYERED_COMPOSITION,
        title=f"{registry.clouds[cid].name} / {nf.name}",
        labels=tuple(labels),
        weights=tuple(weights),
    )
    return {
        "nf_id": nf.id,
        "name": nf.name,
        "weight": weight,
        "slices": slice_docs,
        "unused": unused,
    }


def _layered_slice(
    registry: Registry, cid: str, nf_id: str, slice_id: str, slice_name: str,
    weight: float, charts: dict,
) -> dict:
    # Service wedges reflect admitted consumption (active instances), which
    # admission control keeps within the slice; template shares are not
    # bounded that way.
    consumed: dict[str, float] = {}
    for inst in registry.active_instances.values():
        pct = inst.held_shares.get(slice_id)
        if pct:
            consumed[inst.service_id] = consumed.get(inst.service_id, 0.0) + pct
    service_docs = []
    labels: list[str] = []
    weights: list[float] = []
    for svid in sorted(consumed, key=entity_sort_key):
        svc = registry.services.get(svid)
        service_weight = weight * consumed[svid] / 100.0
        labels.append(svc.name if svc else svid)
        weights.append(service_weight)
        service_docs.append(
            {"service_id": svid, "name": svc.name if svc else None, "weight": service_weight}
        )
    unused = _non_negative(weight - sum(weights))
    labels.append(UNUSED_LABEL)
    weights.append(unused)
    charts[f"{cid}.{nf_id}.{slice_id}"] = ChartData(
        kind=LAYERED_COMPOSITION,
        title=f"{registry.clouds[cid].name} / {registry.nfs[nf_id].name} / {slice_name}",
        labels=tuple(labels),
        weights=tuple(weights),
    )
    return {
        "slice_id": slice_id,
        "name": slice_name,
        "weight": weight,
        "services": service_docs,
        "unused": unused,
    }


def build_charts(registry: Registry, dimension: str = "compute") -> dict[str, ChartData]:
    """All chart documents for a registry, keyed by output file stem."""
    charts: dict[str, ChartData] = {}
    for cid in registry.registration_order:
        for dim in DIMENSIONS:
            charts[f"{CLOUD_UTILIZATION}.{cid}.{dim}"] = cloud_utilization_chart(cid, registry, dim)
    for nid in sorted(registry.nfs, key=entity_sort_key):
        charts[f"{NF_SLICE_SHARES}.{nid}"] = nf_slice_chart(registry.nfs[nid], registry)
    layered = layered_view(registry, dimension)
    for slug, chart in layered.charts.items():
        charts[f"layered.{slug}"] = chart
    return charts


# Trace and file export


def trace_record_to_document(record: TraceRecord) -> dict:
    return {
        "time": float(record.time),
        "slicelet_id": record.slicelet_id,
        "service_id": record.service_id,
        "outcome": record.outcome,
        "reason": record.reason,
        "loads": {sid: record.loads[sid] for sid in sorted(record.loads, key=entity_sort_key)},
    }


def trace_record_from_document(doc: dict) -> TraceRecord:
    return TraceRecord(
        time=doc["time"],
        slicelet_id=doc["slicelet_id"],
        service_id=doc["service_id"],
        outcome=doc["outcome"],
        reason=doc.get("reason"),
        loads=dict(doc.get("loads", {})),
    )


def write_trace(trace: list[TraceRecord], path: str) -> None:
    """Line-delimited JSON, one record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in trace:
            fh.write(render_json(trace_record_to_document(record)))
            fh.write("\n")


def read_trace(path: str) -> list[TraceRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(trace_record_from_document(json.loads(line)))
    return records


def write_trace_csv(trace: list[TraceRecord], path: str) -> None:
    slice_ids = sorted({sid for r in trace for sid in r.loads}, key=entity_sort_key)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "slicelet_id", "service_id", "outcome", "reason"]
                        + [f"load:{sid}" for sid in slice_ids])
        for r in trace:
            writer.writerow(
                [_render_float(float(r.time)), r.slicelet_id, r.service_id, r.outcome, r.reason or ""]
                + [_render_float(r.loads[sid]) if sid in r.loads else "" for sid in slice_ids]
            )


def write_summary(summary: MetricsSummary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_json(summary.to_document(), indent=2))


def export_run(
    registry: Registry,
    trace: list[TraceRecord],
    out_dir: str,
    meta: dict | None = None,
    formats: tuple[str, ...] = ("json", "jsonl"),
    dimension: str = "compute",
) -> dict[str, str]:
    """Write summary, trace and chart documents under `out_dir`.

    Always emits the canonical summary.json / trace.jsonl / charts tree;
    "csv" in formats adds trace.csv. Returns a name -> path map of
    everything written.
    """
    os.makedirs(out_dir, exist_ok=True)
    charts_dir = os.path.join(out_dir, "charts")
    os.makedirs(charts_dir, exist_ok=True)
    written: dict[str, str] = {}

    summary_path = os.path.join(out_dir, "summary.json")
    write_summary(summarize(registry, trace, meta), summary_path)
    written["summary"] = summary_path

    trace_path = os.path.join(out_dir, "trace.jsonl")
    write_trace(trace, trace_path)
    written["trace"] = trace_path

    if "csv" in formats:
        csv_path = os.path.join(out_dir, "trace.csv")
        write_trace_csv(trace, csv_path)
        written["trace_csv"] = csv_path

    for slug, chart in build_charts(registry, dimension).items():
        path = os.path.join(charts_dir, f"{slug}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_json(chart.to_document(), indent=2))
        written[slug] = path

    layered = layered_view(registry, dimension)
    nesting_path = os.path.join(charts_dir, "layered.json")
    with open(nesting_path, "w", encoding="utf-8") as fh:
        fh.write(render_json(layered.nesting, indent=2))
    written["layered_nesting"] = nesting_path
    return written
