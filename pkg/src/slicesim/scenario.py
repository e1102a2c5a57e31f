"""Scenario files: the YAML schema the CLI validates and executes.

A scenario names every entity (names, not generated ids, are the file-level
cross-reference keys) and declares the full lifecycle: clouds, placement
policy, NFs, slices, services, workloads, run parameters and output
settings. ``check`` returns all problems at once as diagnostics; only
error-severity diagnostics block a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import yaml

from .errors import ScenarioError
from .model import SHARE_EPSILON
from .policy import POLICIES
from .workload import ExplicitEntry, ExplicitWorkload, PoissonWorkload, WorkloadSpec

KNOWN_FORMATS = ("json", "jsonl", "csv", "png")
DEFAULT_FORMATS = ("json", "jsonl", "png")

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    location: str
    message: str

    def __str__(self):
        return f"{self.severity}: {self.location}: {self.message}"


@dataclass
class EntitySpec:
    name: str
    compute: float
    memory: float
    storage: float


@dataclass
class SliceSpec:
    name: str
    composition: dict[str, float]  # NF name -> pct


@dataclass
class ServiceSpec:
    name: str
    priority: int
    composition: dict[str, float]  # slice name -> pct


@dataclass
class Scenario:
    """Validated, typed view of one scenario file."""

    clouds: list[EntitySpec] = field(default_factory=list)
    policy: str = "first-available-method"
    nfs: list[EntitySpec] = field(default_factory=list)
    slices: list[SliceSpec] = field(default_factory=list)
    services: list[ServiceSpec] = field(default_factory=list)
    workloads: list[WorkloadSpec] = field(default_factory=list)
    until: float = 0.0
    seed: int = 0
    out_dir: str = "out"
    formats: tuple[str, ...] = DEFAULT_FORMATS


def load_raw(path: str) -> dict:
    """Read and parse the YAML document; raises ScenarioError on failure."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"cannot parse scenario {path}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ScenarioError(f"scenario {path} must be a mapping, got {type(raw).__name__}")
    return raw


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _check_names(items: list, section: str, diags: list[Diagnostic]) -> None:
    seen = set()
    for i, item in enumerate(items):
        name = item.get("name") if isinstance(item, dict) else None
        if not isinstance(name, str) or not name:
            diags.append(Diagnostic(ERROR, f"{section}[{i}]", "missing or empty name"))
        elif name in seen:
            diags.append(Diagnostic(ERROR, f"{section}[{i}]", f"duplicate name {name!r}"))
        else:
            seen.add(name)


def _check_resources(item: dict, where: str, diags: list[Diagnostic], positive: bool) -> None:
    for dim in ("compute", "memory", "storage"):
        value = item.get(dim)
        if not _is_number(value):
            diags.append(Diagnostic(ERROR, where, f"{dim} must be a finite number"))
        elif positive and value <= 0:
            diags.append(Diagnostic(ERROR, where, f"{dim} must be > 0, got {value}"))
        elif not positive and value < 0:
            diags.append(Diagnostic(ERROR, where, f"{dim} must be >= 0, got {value}"))


def _check_composition(comp: Any, where: str, known: set[str], ref_kind: str,
                       diags: list[Diagnostic]) -> None:
    if not isinstance(comp, dict) or not comp:
        diags.append(Diagnostic(ERROR, where, "composition must be a non-empty mapping"))
        return
    for ref, pct in comp.items():
        if ref not in known:
            diags.append(Diagnostic(ERROR, where, f"references unknown {ref_kind} {ref!r}"))
        if not _is_number(pct) or not 0 < pct <= 100:
            diags.append(Diagnostic(ERROR, where, f"share for {ref!r} must be in (0, 100], got {pct!r}"))


def _section(raw: dict, key: str, diags: list[Diagnostic]) -> list:
    value = raw.get(key, [])
    if value is None:
        return []
    if not isinstance(value, list):
        diags.append(Diagnostic(ERROR, key, "must be a list"))
        return []
    return value


def check(raw: dict) -> list[Diagnostic]:
    """All diagnostics for a parsed scenario document, not just the first."""
    diags: list[Diagnostic] = []
    for key in raw:
        if key not in ("clouds", "policy", "nfs", "slices", "services", "workloads", "run", "output"):
            diags.append(Diagnostic(WARNING, key, "unknown section (ignored)"))

    clouds = _section(raw, "clouds", diags)
    nfs = _section(raw, "nfs", diags)
    slices = _section(raw, "slices", diags)
    services = _section(raw, "services", diags)
    workloads = _section(raw, "workloads", diags)

    _check_names(clouds, "clouds", diags)
    _check_names(nfs, "nfs", diags)
    _check_names(slices, "slices", diags)
    _check_names(services, "services", diags)

    for i, cloud in enumerate(clouds):
        if isinstance(cloud, dict):
            _check_resources(cloud, f"clouds[{i}]", diags, positive=True)
    for i, nf in enumerate(nfs):
        if isinstance(nf, dict):
            _check_resources(nf, f"nfs[{i}]", diags, positive=False)

    policy = raw.get("policy", "first-available-method")
    if policy not in POLICIES:
        diags.append(
            Diagnostic(ERROR, "policy", f"unknown policy {policy!r}; known: {', '.join(sorted(POLICIES))}")
        )

    nf_names = {nf.get("name") for nf in nfs if isinstance(nf, dict)}
    slice_names = {s.get("name") for s in slices if isinstance(s, dict)}
    service_names = {s.get("name") for s in services if isinstance(s, dict)}

    # Static share accounting: every declared slice deploys at setup, so a
    # per-NF total over 100 is a guaranteed setup failure.
    nf_totals: dict[str, float] = {}
    for i, s in enumerate(slices):
        if not isinstance(s, dict):
            diags.append(Diagnostic(ERROR, f"slices[{i}]", "must be a mapping"))
            continue
        _check_composition(s.get("composition"), f"slices[{i}]", nf_names, "NF", diags)
        if isinstance(s.get("composition"), dict):
            for ref, pct in s["composition"].items():
                if _is_number(pct):
                    nf_totals[ref] = nf_totals.get(ref, 0.0) + float(pct)
    for nf_name, total in sorted(nf_totals.items()):
        if total > 100.0 + SHARE_EPSILON:
            diags.append(
                Diagnostic(ERROR, "slices", f"declared slices claim {total} of NF {nf_name!r} (> 100)")
            )

    for i, svc in enumerate(services):
        if not isinstance(svc, dict):
            diags.append(Diagnostic(ERROR, f"services[{i}]", "must be a mapping"))
            continue
        priority = svc.get("priority", 0)
        if not isinstance(priority, int) or isinstance(priority, bool) or priority < 0:
            diags.append(Diagnostic(ERROR, f"services[{i}]", f"priority must be an integer >= 0, got {priority!r}"))
        _check_composition(svc.get("composition"), f"services[{i}]", slice_names, "slice", diags)

    for i, w in enumerate(workloads):
        where = f"workloads[{i}]"
        if not isinstance(w, dict):
            diags.append(Diagnostic(ERROR, where, "must be a mapping"))
            continue
        kind = w.get("kind")
        if kind == "poisson":
            if w.get("service") not in service_names:
                diags.append(Diagnostic(ERROR, where, f"references unknown service {w.get('service')!r}"))
            for key in ("rate", "mean_duration", "horizon"):
                if not _is_number(w.get(key)) or w.get(key) <= 0:
                    diags.append(Diagnostic(ERROR, where, f"{key} must be > 0, got {w.get(key)!r}"))
            seed = w.get("seed")
            if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
                diags.append(Diagnostic(ERROR, where, f"seed must be an integer, got {seed!r}"))
        elif kind == "explicit":
            entries = w.get("entries")
            if not isinstance(entries, list) or not entries:
                diags.append(Diagnostic(ERROR, where, "entries must be a non-empty list"))
                continue
            for j, entry in enumerate(entries):
                ewhere = f"{where}.entries[{j}]"
                if not isinstance(entry, dict):
                    diags.append(Diagnostic(ERROR, ewhere, "must be a mapping"))
                    continue
                if entry.get("service") not in service_names:
                    diags.append(Diagnostic(ERROR, ewhere, f"references unknown service {entry.get('service')!r}"))
                if not _is_number(entry.get("arrival")) or entry.get("arrival") < 0:
                    diags.append(Diagnostic(ERROR, ewhere, f"arrival must be >= 0, got {entry.get('arrival')!r}"))
                if not _is_number(entry.get("duration")) or entry.get("duration") <= 0:
                    diags.append(Diagnostic(ERROR, ewhere, f"duration must be > 0, got {entry.get('duration')!r}"))
        else:
            diags.append(Diagnostic(ERROR, where, f"kind must be 'explicit' or 'poisson', got {kind!r}"))

    run = raw.get("run", {}) or {}
    if not isinstance(run, dict):
        diags.append(Diagnostic(ERROR, "run", "must be a mapping"))
        run = {}
    until = run.get("until", 0)
    if not _is_number(until) or until < 0:
        diags.append(Diagnostic(ERROR, "run", f"until must be >= 0, got {until!r}"))
    seed = run.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        diags.append(Diagnostic(ERROR, "run", f"seed must be an integer, got {seed!r}"))

    output = raw.get("output", {}) or {}
    if not isinstance(output, dict):
        diags.append(Diagnostic(ERROR, "output", "must be a mapping"))
        output = {}
    formats = output.get("formats", list(DEFAULT_FORMATS))
    if not isinstance(formats, list):
        diags.append(Diagnostic(ERROR, "output", "formats must be a list"))
    else:
        for fmt in formats:
            if fmt not in KNOWN_FORMATS:
                diags.append(Diagnostic(ERROR, "output", f"unknown format {fmt!r}; known: {', '.join(KNOWN_FORMATS)}"))
    directory = output.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        diags.append(Diagnostic(ERROR, "output", "directory must be a non-empty string"))

    # Advisory capacity check: an NF bigger than every declared cloud can
    # never deploy; the run would abort at setup.
    if not any(d.severity == ERROR for d in diags):
        for i, nf in enumerate(nfs):
            fits_somewhere = any(
                all(nf[dim] <= cloud[dim] for dim in ("compute", "memory", "storage"))
                for cloud in clouds
            )
            if clouds and not fits_somewhere:
                diags.append(
                    Diagnostic(
                        WARNING,
                        f"nfs[{i}]",
                        f"requirement of NF {nf.get('name')!r} exceeds every declared cloud's capacity",
                    )
                )
    return diags


def validate(path: str) -> list[Diagnostic]:
    """Parse and check a scenario file; parse failures raise ScenarioError."""
    return check(load_raw(path))


def build(raw: dict) -> Scenario:
    """Typed scenario from a checked document (error diagnostics assumed absent)."""
    scenario = Scenario()
    scenario.clouds = [
        EntitySpec(c["name"], float(c["compute"]), float(c["memory"]), float(c["storage"]))
        for c in raw.get("clouds") or []
    ]
    scenario.policy = raw.get("policy", "first-available-method")
    scenario.nfs = [
        EntitySpec(n["name"], float(n["compute"]), float(n["memory"]), float(n["storage"]))
        for n in raw.get("nfs") or []
    ]
    scenario.slices = [
        SliceSpec(s["name"], {ref: float(pct) for ref, pct in s["composition"].items()})
        for s in raw.get("slices") or []
    ]
    scenario.services = [
        ServiceSpec(
            s["name"],
            int(s.get("priority", 0)),
            {ref: float(pct) for ref, pct in s["composition"].items()},
        )
        for s in raw.get("services") or []
    ]
    scenario.workloads = []
    for w in raw.get("workloads") or []:
        if w["kind"] == "poisson":
            scenario.workloads.append(
                PoissonWorkload(
                    service=w["service"],
                    rate=float(w["rate"]),
                    mean_duration=float(w["mean_duration"]),
                    horizon=float(w["horizon"]),
                    seed=w.get("seed"),
                )
            )
        else:
            scenario.workloads.append(
                ExplicitWorkload(
                    ExplicitEntry(e["service"], float(e["arrival"]), float(e["duration"]))
                    for e in w["entries"]
                )
            )
    run = raw.get("run") or {}
    scenario.until = float(run.get("until", 0))
    scenario.seed = int(run.get("seed", 0))
    output = raw.get("output") or {}
    scenario.out_dir = output.get("directory", "out")
    scenario.formats = tuple(output.get("formats", list(DEFAULT_FORMATS)))
    return scenario
