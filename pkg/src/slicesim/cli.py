"""Command-line entry point: validate, run, and report on scenarios.

Exit codes: 0 success, 1 validation error, 2 setup-stage rejection,
3 I/O error. Slicelet rejections during a run are outcomes, not failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import report as report_mod
from . import scenario as scenario_mod
from .engine import Engine
from .errors import DeploymentError, ScenarioError
from .managers import NfManager, Registry, ServiceManager, SliceManager
from .model import Cloud, Nf, ResourceVector, Service, StaticSlice
from .workload import derive_seed, materialize_all

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SETUP = 2
EXIT_IO = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicesim",
        description="Deterministic flow-level simulator for end-to-end network slicing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file, reporting every problem")
    p_validate.add_argument("file")

    p_run = sub.add_parser("run", help="execute a scenario end to end and export results")
    p_run.add_argument("file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario's master seed")
    p_run.add_argument("--policy", default=None, help="override the scenario's placement policy")
    p_run.add_argument("--out", default=None, help="override the scenario's output directory")

    p_report = sub.add_parser("report", help="render summary tables from an output directory")
    p_report.add_argument("dir")
    p_report.add_argument(
        "--figures", action="store_true", help="re-render figures from the chart documents"
    )
    return parser


def _print_diagnostics(diags) -> None:
    for diag in diags:
        stream = sys.stderr if diag.severity == scenario_mod.ERROR else sys.stdout
        print(str(diag), file=stream)


def cmd_validate(args) -> int:
    try:
        diags = scenario_mod.validate(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _print_diagnostics(diags)
    if any(d.severity == scenario_mod.ERROR for d in diags):
        return EXIT_VALIDATION
    print(f"{args.file}: ok ({len(diags)} warning(s))" if diags else f"{args.file}: ok")
    return EXIT_OK


def _setup(scenario, policy_name: str, master_seed: int) -> Registry:
    """Create -> register -> deploy lifecycle; raises DeploymentError on any
    setup-stage rejection."""
    registry = Registry()
    nf_mgr = NfManager(registry)
    slice_mgr = SliceManager(registry)
    service_mgr = ServiceManager(registry)

    for spec in scenario.clouds:
        nf_mgr.register_cloud(
            Cloud(name=spec.name, capacity=ResourceVector(spec.compute, spec.memory, spec.storage))
        )
    nf_mgr.set_scheduler_policy(policy_name, seed=derive_seed(master_seed, 0))

    nf_ids: dict[str, str] = {}
    for spec in scenario.nfs:
        nf = Nf(name=spec.name, requirement=ResourceVector(spec.compute, spec.memory, spec.storage))
        decision = nf_mgr.deploy_nf(nf)
        if not decision.placed:
            raise DeploymentError(f"cannot deploy NF {spec.name!r}: {decision.reason}")
        nf_ids[spec.name] = nf.id

    slice_ids: dict[str, str] = {}
    for spec in scenario.slices:
        s = StaticSlice(
            name=spec.name,
            composition={nf_ids[ref]: pct for ref, pct in spec.composition.items()},
        )
        result = slice_mgr.deploy_slice(s)
        if not result.accepted:
            raise DeploymentError(f"cannot deploy slice {spec.name!r}: {result.reason}")
        slice_ids[spec.name] = s.id

    for spec in scenario.services:
        svc = Service(
            name=spec.name,
            priority=spec.priority,
            composition={slice_ids[ref]: pct for ref, pct in spec.composition.items()},
        )
        result = service_mgr.deploy_service(svc)
        if not result.accepted:
            raise DeploymentError(f"cannot deploy service {spec.name!r}: {result.reason}")
    return registry


def run_scenario(path: str, seed: int | None = None, policy: str | None = None,
                 out_dir: str | None = None) -> int:
    """Full lifecycle for one scenario file; returns the process exit code."""
    try:
        raw = scenario_mod.load_raw(path)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    diags = scenario_mod.check(raw)
    _print_diagnostics(diags)
    if any(d.severity == scenario_mod.ERROR for d in diags):
        return EXIT_VALIDATION
    scenario = scenario_mod.build(raw)

    master_seed = seed if seed is not None else scenario.seed
    policy_name = policy if policy is not None else scenario.policy
    destination = out_dir if out_dir is not None else scenario.out_dir

    try:
        registry = _setup(scenario, policy_name, master_seed)
    except DeploymentError as exc:
        print(f"setup failed: {exc}", file=sys.stderr)
        return EXIT_SETUP

    engine = Engine(registry)
    slicelets = materialize_all(scenario.workloads, registry, master_seed)
    for slicelet in slicelets:
        engine.schedule_slicelet(slicelet)
    trace = engine.run(scenario.until)

    with open(path, "rb") as fh:
        scenario_hash = hashlib.sha256(fh.read()).hexdigest()
    meta = {
        "scenario": os.path.basename(path),
        "scenario_sha256": scenario_hash,
        "seed": master_seed,
        "policy": policy_name,
        "until": scenario.until,
    }
    try:
        report_mod.export_run(
            registry, trace, destination, meta=meta, formats=scenario.formats
        )
        if "png" in scenario.formats:
            from . import figures  # deferred: matplotlib import is heavy

            figures.render_figures(destination)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    admitted = sum(1 for r in trace if r.outcome == "admitted")
    rejected = sum(1 for r in trace if r.outcome == "rejected")
    print(f"run complete: {len(slicelets)} slicelet(s), {admitted} admitted, "
          f"{rejected} rejected; outputs in {destination}")
    return EXIT_OK


def cmd_run(args) -> int:
    return run_scenario(args.file, seed=args.seed, policy=args.policy, out_dir=args.out)


def _format_table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    def line(parts):
        return "  ".join(p.ljust(w) for p, w in zip(parts, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in cells)
    return "\n".join(out)


def _ratio(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def cmd_report(args) -> int:
    summary_path = os.path.join(args.dir, "summary.json")
    trace_path = os.path.join(args.dir, "trace.jsonl")
    try:
        with open(summary_path, "r", encoding="utf-8") as fh:
            summary = json.load(fh)
        trace = report_mod.read_trace(trace_path)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read run outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    meta = summary.get("meta", {})
    if meta:
        print(f"scenario={meta.get('scenario')} policy={meta.get('policy')} seed={meta.get('seed')}")
        print()
    print("Clouds")
    print(_format_table(
        ["id", "name", "compute", "memory", "storage"],
        [
            [cid, c["name"]]
            + [f"{c['allocated'][d]:g}/{c['capacity'][d]:g} ({100 * c['utilization'][d]:.2f}%)"
               for d in ("compute", "memory", "storage")]
            for cid, c in summary.get("clouds", {}).items()
        ],
    ))
    print()
    print("Network functions")
    print(_format_table(
        ["id", "name", "placement", "utilization", "remaining"],
        [
            [nid, n["name"], n.get("placement_name") or "-",
             f"{n['utilization']:g}%", f"{n['remaining_share']:g}%"]
            for nid, n in summary.get("nfs", {}).items()
        ],
    ))
    print()
    print("Slices")
    print(_format_table(
        ["id", "name", "deployed", "mean load", "peak load"],
        [
            [sid, s["name"], "yes" if s["deployed"] else "no",
             f"{s['mean_load']:.4f}", f"{s['peak_load']:.4f}"]
            for sid, s in summary.get("slices", {}).items()
        ],
    ))
    print()
    print("Services")
    print(_format_table(
        ["id", "name", "priority", "admitted", "rejected", "rejection ratio"],
        [
            [svid, s["name"] or "-", s["priority"] if s["priority"] is not None else "-",
             s["admitted"], s["rejected"], _ratio(s["rejection_ratio"])]
            for svid, s in summary.get("services", {}).items()
        ],
    ))
    print()
    print(f"Trace: {len(trace)} record(s)")

    if args.figures:
        try:
            from . import figures

            written = figures.render_figures(args.dir)
        except OSError as exc:
            print(f"cannot render figures: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"rendered {len(written)} figure(s)")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args)
    if args.command == "run":
        return cmd_run(args)
    return cmd_report(args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
