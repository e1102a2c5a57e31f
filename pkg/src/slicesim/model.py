"""Domain entities and the resource algebra.

Everything here is a plain value type: no time semantics, no placement
policy, no I/O. All mutation of the entity graph happens in the manager
layer; the engine drives slicelet lifecycles.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

# Tolerance on percentage-share sums (a slice composition adding up to an
# exact 100 must never be rejected because of float noise).
SHARE_EPSILON = 1e-9

DIMENSIONS = ("compute", "memory", "storage")

_ID_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def entity_sort_key(entity_id: str) -> tuple[str, int]:
    """Sort key putting generated ids ("nf-2", "nf-10") in numeric order."""
    m = _ID_SUFFIX.match(entity_id)
    if m:
        return (m.group(1), int(m.group(2)))
    return (entity_id, -1)


@dataclass(frozen=True)
class ResourceVector:
    """A (compute, memory, storage) triple in abstract resource units.

    Components are finite and non-negative; arithmetic that would produce
    anything else raises ValueError.
    """

    compute: float
    memory: float
    storage: float

    def __post_init__(self):
        for dim in DIMENSIONS:
            value = getattr(self, dim)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{dim} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{dim} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{dim} must be >= 0, got {value!r}")

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(
            self.compute + other.compute,
            self.memory + other.memory,
            self.storage + other.storage,
        )

    def __sub__(self, other: "ResourceVector") -> "ResourceVector":
        """Componentwise difference; raises if any component would go negative."""
        return ResourceVector(
            self.compute - other.compute,
            self.memory - other.memory,
            self.storage - other.storage,
        )

    def fits_within(self, residual: "ResourceVector") -> bool:
        """True iff self <= residual in all three components."""
        return (
            self.compute <= residual.compute
            and self.memory <= residual.memory
            and self.storage <= residual.storage
        )

    def get(self, dimension: str) -> float:
        if dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {dimension!r}")
        return getattr(self, dimension)

    def as_dict(self) -> dict[str, float]:
        return {dim: float(getattr(self, dim)) for dim in DIMENSIONS}

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.compute, self.memory, self.storage)


ZERO = ResourceVector(0.0, 0.0, 0.0)


def _check_share(pct, what: str) -> float:
    if not isinstance(pct, (int, float)) or isinstance(pct, bool):
        raise ValueError(f"{what} must be a number, got {pct!r}")
    if not math.isfinite(pct) or not 0 < pct <= 100:
        raise ValueError(f"{what} must be in (0, 100], got {pct!r}")
    return float(pct)


@dataclass
class Cloud:
    """A capacity pool hosting network functions.

    `allocations` records the absolute resources granted to each hosted NF,
    keyed by NF id. The componentwise sum of allocations never exceeds
    `capacity`; residual capacity is derived, never stored.
    """

    name: str
    capacity: ResourceVector
    id: str | None = None
    allocations: dict[str, ResourceVector] = field(default_factory=dict)

    def allocated(self) -> ResourceVector:
        total = ZERO
        for rv in self.allocations.values():
            total = total + rv
        return total

    def residual(self) -> ResourceVector:
        return self.capacity - self.allocated()

    def utilization_ratios(self) -> dict[str, float]:
        """Per-dimension allocated/capacity ratio."""
        used = self.allocated()
        return {
            dim: used.get(dim) / self.capacity.get(dim) if self.capacity.get(dim) else 0.0
            for dim in DIMENSIONS
        }


@dataclass
class Nf:
    """A deployable network function.

    `requirement` is the absolute demand reserved on the hosting cloud;
    `slice_shares` maps slice id -> percentage of this NF held by that slice.
    Shares can only exist while the NF is deployed.
    """

    name: str
    requirement: ResourceVector
    id: str | None = None
    placement: str | None = None
    slice_shares: dict[str, float] = field(default_factory=dict)

    def utilization(self) -> float:
        """Overall share of this NF consumed by overlying slices, in [0, 100]."""
        return sum(self.slice_shares.values())

    def remaining_share(self) -> float:
        """Unused share of this NF; the exact complement of utilization()."""
        return 100.0 - self.utilization()


@dataclass
class StaticSlice:
    """An M:N composition of percentage shares over deployed NFs."""

    name: str
    composition: dict[str, float] = field(default_factory=dict)
    id: str | None = None
    deployed: bool = False

    def compose(self, nf_id: str, share_pct: float) -> "StaticSlice":
        """Add (or replace) one NF entry; share_pct must be in (0, 100]."""
        self.composition[nf_id] = _check_share(share_pct, f"share for {nf_id}")
        return self


@dataclass
class Service:
    """A consumer-facing service built from percentage shares of slices.

    `priority` is an ordering key only: lower value means higher priority,
    used to break equal-time arrival ties in the engine.
    """

    name: str
    priority: int = 0
    composition: dict[str, float] = field(default_factory=dict)
    id: str | None = None

    def __post_init__(self):
        if not isinstance(self.priority, int) or isinstance(self.priority, bool) or self.priority < 0:
            raise ValueError(f"priority must be an integer >= 0, got {self.priority!r}")

    def compose(self, slice_id: str, share_pct: float) -> "Service":
        self.composition[slice_id] = _check_share(share_pct, f"share for {slice_id}")
        return self


@dataclass(frozen=True)
class Slicelet:
    """One timed request to consume a service instance for a duration."""

    id: str
    service_id: str
    arrival: float
    duration: float

    def __post_init__(self):
        if not math.isfinite(self.arrival) or self.arrival < 0:
            raise ValueError(f"arrival must be finite and >= 0, got {self.arrival!r}")
        if not math.isfinite(self.duration) or self.duration <= 0:
            raise ValueError(f"duration must be finite and > 0, got {self.duration!r}")
