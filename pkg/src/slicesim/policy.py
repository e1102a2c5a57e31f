"""Pluggable NF-placement policies.

Each policy is a pure function over an immutable snapshot of cloud states
(a list of CloudView, ordered by registration index). Policies never touch
live clouds, which keeps decisions replayable and property-testable.

Registered names (the strings accepted by scenario files and
``set_scheduler_policy``): ``first-available-method``, ``best-fit``,
``worst-fit``, ``random``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import ResourceVector


@dataclass(frozen=True)
class CloudView:
    """Read-only decision input: one cloud's capacity and free headroom."""

    cloud_id: str
    capacity: ResourceVector
    residual: ResourceVector
    registration_index: int

    def __post_init__(self):
        if not self.residual.fits_within(self.capacity):
            raise ValueError(f"residual exceeds capacity for {self.cloud_id}")
        if self.registration_index < 0:
            raise ValueError("registration_index must be >= 0")


@dataclass(frozen=True)
class PlacementDecision:
    """Outcome of a placement attempt: a target cloud id, or a reason."""

    cloud_id: str | None = None
    reason: str | None = None

    @property
    def placed(self) -> bool:
        return self.cloud_id is not None

    @staticmethod
    def place(cloud_id: str) -> "PlacementDecision":
        return PlacementDecision(cloud_id=cloud_id)

    @staticmethod
    def reject(reason: str) -> "PlacementDecision":
        return PlacementDecision(reason=reason)


def _feasible(requirement: ResourceVector, clouds: list[CloudView]) -> list[CloudView]:
    return [view for view in clouds if requirement.fits_within(view.residual)]


def _no_fit(requirement: ResourceVector, clouds: list[CloudView]) -> PlacementDecision:
    if not clouds:
        return PlacementDecision.reject("no clouds registered")
    return PlacementDecision.reject(
        f"no registered cloud fits requirement {requirement.as_tuple()}"
    )


def _slack_score(requirement: ResourceVector, view: CloudView) -> float:
    """Capacity-normalized slack left after placing, summed over dimensions."""
    return sum(
        (view.residual.get(dim) - requirement.get(dim)) / view.capacity.get(dim)
        for dim in ("compute", "memory", "storage")
    )


def place_first_available(requirement: ResourceVector, clouds: list[CloudView]) -> PlacementDecision:
    """Pick the first cloud, in registration order, whose residual fits."""
    for view in clouds:
        if requirement.fits_within(view.residual):
            return PlacementDecision.place(view.cloud_id)
    return _no_fit(requirement, clouds)


def place_best_fit(requirement: ResourceVector, clouds: list[CloudView]) -> PlacementDecision:
    """Pick the feasible cloud with the least post-placement slack.

    Ties go to the lowest registration index.
    """
    best: CloudView | None = None
    best_score = 0.0
    for view in _feasible(requirement, clouds):
        score = _slack_score(requirement, view)
        if best is None or score < best_score:
            best, best_score = view, score
    if best is None:
        return _no_fit(requirement, clouds)
    return PlacementDecision.place(best.cloud_id)


def place_worst_fit(requirement: ResourceVector, clouds: list[CloudView]) -> PlacementDecision:
    """Pick the feasible cloud with the most post-placement slack."""
    best: CloudView | None = None
    best_score = 0.0
    for view in _feasible(requirement, clouds):
        score = _slack_score(requirement, view)
        if best is None or score > best_score:
            best, best_score = view, score
    if best is None:
        return _no_fit(requirement, clouds)
    return PlacementDecision.place(best.cloud_id)


def place_random_seeded(
    requirement: ResourceVector, clouds: list[CloudView], rng: random.Random
) -> PlacementDecision:
    """Uniform choice among feasible clouds, driven by the supplied PRNG.

    Consumes exactly one rng.random() draw when any cloud is feasible and
    none otherwise, so rejected attempts leave the stream untouched.
    """
    feasible = _feasible(requirement, clouds)
    if not feasible:
        return _no_fit(requirement, clouds)
    index = min(int(rng.random() * len(feasible)), len(feasible) - 1)
    return PlacementDecision.place(feasible[index].cloud_id)


# Policies selectable by name. "random" takes the extra rng argument and is
# dispatched specially by the NF manager.
POLICIES = {
    "first-available-method": place_first_available,
    "best-fit": place_best_fit,
    "worst-fit": place_worst_fit,
    "random": place_random_seeded,
}
