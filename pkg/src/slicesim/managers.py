"""Stateful orchestration layer: all mutations of the entity graph.

Three managers share one Registry, mirroring the usual split of management
roles in slice orchestration stacks: NF lifecycle (register clouds, place
and deploy NFs), slice lifecycle (compose shares over deployed NFs), and
service lifecycle (templates instantiated per slicelet by the engine).

The registry is a single-writer state machine; read-only snapshots can be
taken at any time and compared for equality.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from . import policy as policy_mod
from .errors import DeploymentError
from .model import (
    DIMENSIONS,
    SHARE_EPSILON,
    Cloud,
    Nf,
    Service,
    StaticSlice,
    entity_sort_key,
)
from .policy import CloudView, PlacementDecision

if TYPE_CHECKING:
    from .engine import ServiceInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeployResult:
    """Outcome of a slice or service deployment attempt."""

    accepted: bool
    reason: str | None = None

    @staticmethod
    def deployed() -> "DeployResult":
        return DeployResult(True)

    @staticmethod
    def rejected(reason: str) -> "DeployResult":
        return DeployResult(False, reason)


@dataclass
class Registry:
    """The shared entity graph plus bookkeeping owned by the managers.

    `active_instances` is written by the engine (one entry per admitted,
    not-yet-departed slicelet) and read here for dependency protection and
    by the report layer for consumption views.
    """

    clouds: dict[str, Cloud] = field(default_factory=dict)
    nfs: dict[str, Nf] = field(default_factory=dict)
    slices: dict[str, StaticSlice] = field(default_factory=dict)
    services: dict[str, Service] = field(default_factory=dict)
    active_policy: str | None = None
    registration_order: list[str] = field(default_factory=list)
    active_instances: dict[str, "ServiceInstance"] = field(default_factory=dict)
    _counters: dict[str, int] = field(default_factory=dict, repr=False)

    def next_id(self, kind: str) -> str:
        n = self._counters.get(kind, 0) + 1
        self._counters[kind] = n
        return f"{kind}-{n}"

    def cloud_views(self) -> list[CloudView]:
        """Immutable snapshot of all clouds, in registration order."""
        return [
            CloudView(
                cloud_id=cid,
                capacity=self.clouds[cid].capacity,
                residual=self.clouds[cid].residual(),
                registration_index=index,
            )
            for index, cid in enumerate(self.registration_order)
        ]

    def snapshot(self) -> dict:
        """Deep, comparable copy of all entity state (id counters excluded)."""
        return {
            "clouds": {
                cid: {
                    "name": c.name,
                    "capacity": c.capacity.as_tuple(),
                    "allocations": {nid: rv.as_tuple() for nid, rv in c.allocations.items()},
                }
                for cid, c in self.clouds.items()
            },
            "nfs": {
                nid: {
                    "name": nf.name,
                    "requirement": nf.requirement.as_tuple(),
                    "placement": nf.placement,
                    "slice_shares": dict(nf.slice_shares),
                }
                for nid, nf in self.nfs.items()
            },
            "slices": {
                sid: {
                    "name": s.name,
                    "composition": dict(s.composition),
                    "deployed": s.deployed,
                }
                for sid, s in self.slices.items()
            },
            "services": {
                svid: {
                    "name": sv.name,
                    "priority": sv.priority,
                    "composition": dict(sv.composition),
                }
                for svid, sv in self.services.items()
            },
            "active_policy": self.active_policy,
            "registration_order": list(self.registration_order),
            "active_instances": {
                lid: {
                    "service_id": inst.service_id,
                    "held_shares": dict(inst.held_shares),
                    "admitted_at": inst.admitted_at,
                }
                for lid, inst in self.active_instances.items()
            },
        }

    def verify(self) -> None:
        """Referential-integrity and invariant sweep; raises on violation.

        Meant for test builds: call after every mutation to catch orphaned
        shares, capacity overruns, or share-sum overflow.
        """
        if sorted(self.registration_order) != sorted(self.clouds):
            raise AssertionError("registration_order out of sync with clouds")
        if len(set(self.registration_order)) != len(self.registration_order):
            raise AssertionError("duplicate cloud in registration_order")
        for cid, cloud in self.clouds.items():
            used = cloud.allocated()
            for dim in DIMENSIONS:
                if used.get(dim) > cloud.capacity.get(dim):
                    raise AssertionError(f"cloud {cid} over capacity on {dim}")
            for nid in cloud.allocations:
                nf = self.nfs.get(nid)
                if nf is None or nf.placement != cid:
                    raise AssertionError(f"allocation for {nid} on {cid} has no matching NF")
                if cloud.allocations[nid] != nf.requirement:
                    raise AssertionError(f"allocation for {nid} differs from its requirement")
        for nid, nf in self.nfs.items():
            if nf.placement is not None:
                cloud = self.clouds.get(nf.placement)
                if cloud is None or nid not in cloud.allocations:
                    raise AssertionError(f"NF {nid} placement dangles")
            elif nf.slice_shares:
                raise AssertionError(f"undeployed NF {nid} holds slice shares")
            if nf.utilization() > 100.0 + SHARE_EPSILON:
                raise AssertionError(f"NF {nid} share sum exceeds 100")
            for sid, pct in nf.slice_shares.items():
                s = self.slices.get(sid)
                if s is None or not s.deployed or s.composition.get(nid) != pct:
                    raise AssertionError(f"share of {sid} on {nid} is orphaned")
        for sid, s in self.slices.items():
            if not s.deployed:
                continue
            for nid, pct in s.composition.items():
                nf = self.nfs.get(nid)
                if nf is None or nf.slice_shares.get(sid) != pct:
                    raise AssertionError(f"slice {sid} entry for {nid} not mirrored")
        for svid, sv in self.services.items():
            for sid in sv.composition:
                s = self.slices.get(sid)
                if s is None or not s.deployed:
                    raise AssertionError(f"service {svid} references missing slice {sid}")
        for lid, inst in self.active_instances.items():
            if inst.service_id not in self.services:
                raise AssertionError(f"active slicelet {lid} references missing service")


class NfManager:
    """Cloud registration, placement-policy selection, NF deploy/undeploy."""

    def __init__(self, registry: Registry):
        self.registry = registry
        self._rng = random.Random(0)

    def register_cloud(self, cloud: Cloud) -> str:
        """Add a cloud to the pool; returns its assigned id."""
        for dim in DIMENSIONS:
            if cloud.capacity.get(dim) <= 0:
                raise DeploymentError(
                    f"cloud {cloud.name!r} capacity must be > 0 in every "
                    f"dimension, got {dim}={cloud.capacity.get(dim)}"
                )
        if cloud.id is not None and cloud.id in self.registry.clouds:
            raise DeploymentError(f"cloud {cloud.id} already registered")
        if cloud.id is None:
            cloud.id = self.registry.next_id("cloud")
        self.registry.clouds[cloud.id] = cloud
        self.registry.registration_order.append(cloud.id)
        return cloud.id

    def set_scheduler_policy(self, name: str, seed: int | None = None) -> None:
        """Select the placement policy used by subsequent deploy_nf calls.

        `seed` feeds the "random" policy's PRNG stream (default 0).
        """
        if name not in policy_mod.POLICIES:
            known = ", ".join(sorted(policy_mod.POLICIES))
            raise DeploymentError(f"unknown policy {name!r}; known policies: {known}")
        self.registry.active_policy = name
        self._rng = random.Random(seed if seed is not None else 0)

    def deploy_nf(self, nf: Nf) -> PlacementDecision:
        """Place the NF on a cloud per the active policy and reserve resources.

        On rejection the registry is untouched and the NF stays undeployed.
        """
        if self.registry.active_policy is None:
            raise DeploymentError("no scheduler policy set")
        if nf.placement is not None:
            raise DeploymentError(f"NF {nf.name!r} is already deployed")
        views = self.registry.cloud_views()
        name = self.registry.active_policy
        if name == "random":
            decision = policy_mod.place_random_seeded(nf.requirement, views, self._rng)
        else:
            decision = policy_mod.POLICIES[name](nf.requirement, views)
        if not decision.placed:
            if not any(nf.requirement.fits_within(c.capacity) for c in self.registry.clouds.values()):
                logger.warning(
                    "NF %r requirement %s exceeds the total capacity of every registered cloud",
                    nf.name, nf.requirement.as_tuple(),
                )
            return decision
        if nf.id is None:
            nf.id = self.registry.next_id("nf")
        self.registry.nfs[nf.id] = nf
        self.registry.clouds[decision.cloud_id].allocations[nf.id] = nf.requirement
        nf.placement = decision.cloud_id
        return decision

    def undeploy_nf(self, nf_id: str) -> None:
        """Release the NF's reservation; refused while any slice rides it."""
        nf = self.registry.nfs.get(nf_id)
        if nf is None:
            raise DeploymentError(f"unknown NF {nf_id!r}")
        if nf.placement is None:
            raise DeploymentError(f"NF {nf_id} is not deployed")
        if nf.slice_shares:
            holders = ", ".join(sorted(nf.slice_shares, key=entity_sort_key))
            raise DeploymentError(f"NF {nf_id} still powers slices: {holders}")
        del self.registry.clouds[nf.placement].allocations[nf_id]
        nf.placement = None

    def dump_cloud_info(self) -> list[dict]:
        """Per-cloud capacity, residual and utilization ratios, in registration order."""
        out = []
        for cid in self.registry.registration_order:
            cloud = self.registry.clouds[cid]
            out.append(
                {
                    "cloud_id": cid,
                    "name": cloud.name,
                    "capacity": cloud.capacity.as_dict(),
                    "allocated": cloud.allocated().as_dict(),
                    "residual": cloud.residual().as_dict(),
                    "utilization": cloud.utilization_ratios(),
                    "hosted_nfs": sorted(cloud.allocations, key=entity_sort_key),
                }
            )
        return out

    def dump_nf_info(self) -> list[dict]:
        """Per-NF placement, requirement, share map and utilization."""
        out = []
        for nid in sorted(self.registry.nfs, key=entity_sort_key):
            nf = self.registry.nfs[nid]
            out.append(
                {
                    "nf_id": nid,
                    "name": nf.name,
                    "requirement": nf.requirement.as_dict(),
                    "placement": nf.placement,
                    "slice_shares": {
                        sid: nf.slice_shares[sid]
                        for sid in sorted(nf.slice_shares, key=entity_sort_key)
                    },
                    "utilization": nf.utilization(),
                    "remaining_share": nf.remaining_share(),
                }
            )
        return out


class SliceManager:
    """Slice composition over deployed NFs; deployment is all-or-nothing."""

    def __init__(self, registry: Registry):
        self.registry = registry

    def deploy_slice(self, s: StaticSlice) -> DeployResult:
        """Record the slice's shares on every composed NF, atomically.

        Any infeasible entry (unknown or undeployed NF, share out of range,
        not enough remaining share) rejects the whole deployment with no NF
        modified.
        """
        if s.deployed:
            raise DeploymentError(f"slice {s.name!r} is already deployed")
        if not s.composition:
            return DeployResult.rejected(f"slice {s.name!r} has an empty composition")
        for nf_id, pct in s.composition.items():
            nf = self.registry.nfs.get(nf_id)
            if nf is None:
                return DeployResult.rejected(f"slice {s.name!r} references unknown NF {nf_id!r}")
            if nf.placement is None:
                return DeployResult.rejected(f"slice {s.name!r} references undeployed NF {nf_id!r}")
            if not 0 < pct <= 100:
                return DeployResult.rejected(
                    f"slice {s.name!r} share for {nf_id} must be in (0, 100], got {pct}"
                )
            if nf.utilization() + pct > 100.0 + SHARE_EPSILON:
                return DeployResult.rejected(
                    f"NF {nf_id} ({nf.name!r}) has only {nf.remaining_share()} "
                    f"remaining, cannot hold {pct}"
                )
        if s.id is None:
            s.id = self.registry.next_id("slice")
        for nf_id, pct in s.composition.items():
            self.registry.nfs[nf_id].slice_shares[s.id] = float(pct)
        s.deployed = True
        self.registry.slices[s.id] = s
        return DeployResult.deployed()

    def undeploy_slice(self, slice_id: str) -> None:
        """Remove the slice's shares from its NFs; refused while a service uses it."""
        s = self.registry.slices.get(slice_id)
        if s is None:
            raise DeploymentError(f"unknown slice {slice_id!r}")
        if not s.deployed:
            raise DeploymentError(f"slice {slice_id} is not deployed")
        users = [
            svid
            for svid, svc in self.registry.services.items()
            if slice_id in svc.composition
        ]
        if users:
            raise DeploymentError(
                f"slice {slice_id} is referenced by services: "
                + ", ".join(sorted(users, key=entity_sort_key))
            )
        for nf_id in s.composition:
            self.registry.nfs[nf_id].slice_shares.pop(slice_id, None)
        s.deployed = False

    def dump_slices(self) -> list[dict]:
        return [
            {
                "slice_id": sid,
                "name": self.registry.slices[sid].name,
                "composition": dict(self.registry.slices[sid].composition),
                "deployed": self.registry.slices[sid].deployed,
            }
            for sid in sorted(self.registry.slices, key=entity_sort_key)
        ]


class ServiceManager:
    """Service templates; resources are consumed per slicelet, not here."""

    def __init__(self, registry: Registry):
        self.registry = registry

    def deploy_service(self, service: Service) -> DeployResult:
        """Register the service template; consumes nothing until slicelets run."""
        if service.id is not None and service.id in self.registry.services:
            raise DeploymentError(f"service {service.id} is already deployed")
        if not service.composition:
            return DeployResult.rejected(f"service {service.name!r} has an empty composition")
        for slice_id, pct in service.composition.items():
            s = self.registry.slices.get(slice_id)
            if s is None or not s.deployed:
                return DeployResult.rejected(
                    f"service {service.name!r} references undeployed slice {slice_id!r}"
                )
            if not 0 < pct <= 100:
                return DeployResult.rejected(
                    f"service {service.name!r} share for {slice_id} must be in (0, 100], got {pct}"
                )
        if service.id is None:
            service.id = self.registry.next_id("service")
        self.registry.services[service.id] = service
        return DeployResult.deployed()

    def undeploy_service(self, service_id: str) -> None:
        """Remove the template; refused while any admitted slicelet is active."""
        if service_id not in self.registry.services:
            raise DeploymentError(f"unknown service {service_id!r}")
        active = [
            lid
            for lid, inst in self.registry.active_instances.items()
            if inst.service_id == service_id
        ]
        if active:
            raise DeploymentError(
                f"service {service_id} has active slicelets: "
                + ", ".join(sorted(active, key=entity_sort_key))
            )
        del self.registry.services[service_id]
