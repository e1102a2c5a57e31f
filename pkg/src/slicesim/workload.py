"""Slicelet generation: explicit schedules and seeded Poisson traffic.

Traffic is decoupled from topology so one topology can be replayed under
many patterns. Stochastic generation is reproducible by construction: a
stdlib Mersenne Twister stream per workload, consuming only ``random()``
draws (the one method with a cross-version stability guarantee), and
exponential variates via the inverse transform -ln(1 - u) * mean.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .managers import Registry
from .model import Slicelet

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """Mix (master seed, stream index) into an independent 64-bit seed.

    splitmix64 finalizer; tiny master/index changes produce unrelated
    streams, so per-workload streams never overlap in practice.
    """
    x = (master_seed ^ (index * 0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def sample_exponential(rng: random.Random, mean: float) -> float:
    """Inverse-transform exponential draw; strictly positive."""
    u = rng.random()
    while u <= 0.0:  # random() is [0, 1); a 0 draw would yield a zero sample
        u = rng.random()
    return -math.log1p(-u) * mean


@dataclass(frozen=True)
class ExplicitEntry:
    service: str  # service name, resolved against the registry
    arrival: float
    duration: float

    def __post_init__(self):
        if not math.isfinite(self.arrival) or self.arrival < 0:
            raise ValueError(f"arrival must be finite and >= 0, got {self.arrival!r}")
        if not math.isfinite(self.duration) or self.duration <= 0:
            raise ValueError(f"duration must be finite and > 0, got {self.duration!r}")


@dataclass(frozen=True)
class ExplicitWorkload:
    """A fixed list of (service, arrival, duration) requests."""

    entries: tuple[ExplicitEntry, ...]

    def __init__(self, entries):
        object.__setattr__(self, "entries", tuple(entries))


@dataclass(frozen=True)
class PoissonWorkload:
    """Poisson arrivals at `rate`, exponential durations of `mean_duration`,
    truncated at `horizon`. `seed` may be left unset and derived later from
    the run's master seed."""

    service: str
    rate: float
    mean_duration: float
    horizon: float
    seed: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be > 0, got {self.rate!r}")
        if not (math.isfinite(self.mean_duration) and self.mean_duration > 0):
            raise ValueError(f"mean_duration must be > 0, got {self.mean_duration!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be > 0, got {self.horizon!r}")


WorkloadSpec = ExplicitWorkload | PoissonWorkload


def _resolve_service(registry: Registry, name: str) -> str:
    matches = [svid for svid, svc in registry.services.items() if svc.name == name]
    if not matches:
        raise ValueError(f"unknown service name {name!r}")
    if len(matches) > 1:
        raise ValueError(f"service name {name!r} is ambiguous: {matches}")
    return matches[0]


def materialize(spec: WorkloadSpec, registry: Registry) -> list[Slicelet]:
    """Expand one workload spec into concrete slicelets (in creation order).

    Slicelet ids come from the registry's id counter. A PoissonWorkload must
    carry a concrete seed by this point.
    """
    slicelets: list[Slicelet] = []
    if isinstance(spec, ExplicitWorkload):
        for entry in spec.entries:
            service_id = _resolve_service(registry, entry.service)
            slicelets.append(
                Slicelet(
                    id=registry.next_id("slicelet"),
                    service_id=service_id,
                    arrival=float(entry.arrival),
                    duration=float(entry.duration),
                )
            )
        return slicelets
    if isinstance(spec, PoissonWorkload):
        if spec.seed is None:
            raise ValueError("PoissonWorkload needs a seed before materialization")
        service_id = _resolve_service(registry, spec.service)
        rng = random.Random(spec.seed)
        t = 0.0
        while True:
            t += sample_exponential(rng, 1.0 / spec.rate)
            if t > spec.horizon:
                break
            duration = sample_exponential(rng, spec.mean_duration)
            slicelets.append(
                Slicelet(
                    id=registry.next_id("slicelet"),
                    service_id=service_id,
                    arrival=t,
                    duration=duration,
                )
            )
        return slicelets
    raise TypeError(f"unknown workload spec {spec!r}")


def materialize_all(
    specs: list[WorkloadSpec], registry: Registry, master_seed: int
) -> list[Slicelet]:
    """Materialize every spec and merge by arrival time.

    Each Poisson spec without an explicit seed gets an independent stream
    derived from (master_seed, 1-based spec index); index 0 is reserved for
    the placement policy. Ties on arrival keep creation order (spec order,
    then entry order within a spec).
    """
    merged: list[Slicelet] = []
    for index, spec in enumerate(specs):
        if isinstance(spec, PoissonWorkload) and spec.seed is None:
            spec = PoissonWorkload(
                service=spec.service,
                rate=spec.rate,
                mean_duration=spec.mean_duration,
                horizon=spec.horizon,
                seed=derive_seed(master_seed, index + 1),
            )
        merged.extend(materialize(spec, registry))
    merged.sort(key=lambda s: s.arrival)  # stable: ties keep creation order
    return merged
