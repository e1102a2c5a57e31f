"""Deterministic discrete-event loop for slicelet arrivals and departures.

Event ordering is total and fixed: time ascending; at equal times departures
before arrivals (a slicelet arriving exactly when another departs sees the
freed capacity); equal-time arrivals by service priority (lower value first)
then scheduling order. Rejected arrivals are dropped, not queued (loss
system), so blocking ratios are well defined.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .errors import SimulationError
from .managers import Registry
from .model import SHARE_EPSILON, Service, Slicelet, entity_sort_key

ARRIVAL = "arrival"
DEPARTURE = "departure"


@dataclass(frozen=True)
class Event:
    """One queued state change; seq breaks ties deterministically."""

    time: float
    kind: str
    slicelet_id: str
    seq: int


@dataclass(frozen=True)
class ServiceInstance:
    """Shares held by one admitted slicelet, copied at admission time."""

    slicelet_id: str
    service_id: str
    held_shares: dict[str, float]
    admitted_at: float


@dataclass(frozen=True)
class TraceRecord:
    """One observable outcome plus the per-slice loads right after it."""

    time: float
    slicelet_id: str
    service_id: str
    outcome: str  # "admitted" | "rejected" | "departed"
    reason: str | None
    loads: dict[str, float]


def admission_check(service: Service, loads: dict[str, float]) -> str | None:
    """Pure admission predicate: fit the whole composition or nothing.

    Returns None to admit, else the first violating slice id in ascending
    id order. Raises if a composed slice is missing from `loads`.
    """
    for slice_id in sorted(service.composition, key=entity_sort_key):
        if slice_id not in loads:
            raise SimulationError(f"no load known for slice {slice_id!r}")
        if loads[slice_id] + service.composition[slice_id] > 100.0 + SHARE_EPSILON:
            return slice_id
    return None


@dataclass
class Engine:
    """Applies timed slicelet workloads to a registry, emitting a trace."""

    registry: Registry
    clock: float = 0.0
    _heap: list[tuple] = field(default_factory=list, repr=False)
    _next_seq: int = 0
    _slicelets: dict[str, Slicelet] = field(default_factory=dict, repr=False)
    # Per-slice map of slicelet id -> held share; loads are recomputed from
    # these so a fully drained slice returns to an exact 0.0.
    _holders: dict[str, dict[str, float]] = field(default_factory=dict, repr=False)

    def schedule_slicelet(self, slicelet: Slicelet) -> None:
        """Queue the arrival; the departure is queued only upon admission."""
        if slicelet.arrival < self.clock:
            raise SimulationError(
                f"slicelet {slicelet.id} arrival {slicelet.arrival} is in the "
                f"past (clock is {self.clock})"
            )
        service = self.registry.services.get(slicelet.service_id)
        if service is None:
            raise SimulationError(
                f"slicelet {slicelet.id} references unknown service {slicelet.service_id!r}"
            )
        if slicelet.id in self._slicelets:
            raise SimulationError(f"slicelet id {slicelet.id!r} already scheduled")
        self._slicelets[slicelet.id] = slicelet
        self._push(slicelet.arrival, ARRIVAL, slicelet.id, priority=service.priority)

    def slice_loads(self) -> dict[str, float]:
        """Current active load per deployed slice."""
        return {
            sid: self._load(sid)
            for sid, s in self.registry.slices.items()
            if s.deployed
        }

    def run(self, until: float) -> list[TraceRecord]:
        """Process every queued event with time <= until, in order.

        Returns the trace records produced by this call; the clock ends at
        `until`. Admission rejections are outcomes, never errors.
        """
        if until < self.clock:
            raise SimulationError(f"cannot run to {until}; clock already at {self.clock}")
        trace: list[TraceRecord] = []
        while self._heap and self._heap[0][0] <= until:
            _, _, _, _, event = heapq.heappop(self._heap)
            self.clock = event.time
            if event.kind == ARRIVAL:
                trace.append(self._arrive(event))
            else:
                trace.append(self._depart(event))
        self.clock = until
        return trace

    # internals

    def _push(self, time: float, kind: str, slicelet_id: str, priority: int = 0) -> None:
        # Departures sort before arrivals at equal time; priority only
        # orders equal-time arrivals.
        kind_rank = 0 if kind == DEPARTURE else 1
        seq = self._next_seq
        self._next_seq += 1
        event = Event(time=time, kind=kind, slicelet_id=slicelet_id, seq=seq)
        heapq.heappush(self._heap, (time, kind_rank, priority if kind == ARRIVAL else 0, seq, event))

    def _load(self, slice_id: str) -> float:
        return sum(self._holders.get(slice_id, {}).values(), 0.0)

    def _arrive(self, event: Event) -> TraceRecord:
        slicelet = self._slicelets[event.slicelet_id]
        service = self.registry.services.get(slicelet.service_id)
        if service is None:
            del self._slicelets[slicelet.id]
            return self._record(slicelet, "rejected", f"service {slicelet.service_id} is no longer deployed")
        loads = {sid: self._load(sid) for sid in service.composition}
        violation = admission_check(service, loads)
        if violation is not None:
            # Dropped, not queued: the id may be rescheduled later.
            del self._slicelets[slicelet.id]
            return self._record(slicelet, "rejected", f"slice {violation} is at capacity")
        held = {sid: float(pct) for sid, pct in service.composition.items()}
        for sid, pct in held.items():
            self._holders.setdefault(sid, {})[slicelet.id] = pct
        self.registry.active_instances[slicelet.id] = ServiceInstance(
            slicelet_id=slicelet.id,
            service_id=service.id,
            held_shares=held,
            admitted_at=event.time,
        )
        self._push(event.time + slicelet.duration, DEPARTURE, slicelet.id)
        return self._record(slicelet, "admitted", None)

    def _depart(self, event: Event) -> TraceRecord:
        slicelet = self._slicelets.pop(event.slicelet_id)
        instance = self.registry.active_instances.pop(event.slicelet_id)
        for sid in instance.held_shares:
            self._holders[sid].pop(event.slicelet_id, None)
        return self._record(slicelet, "departed", None)

    def _record(self, slicelet: Slicelet, outcome: str, reason: str | None) -> TraceRecord:
        return TraceRecord(
            time=self.clock,
            slicelet_id=slicelet.id,
            service_id=slicelet.service_id,
            outcome=outcome,
            reason=reason,
            loads=self.slice_loads(),
        )
