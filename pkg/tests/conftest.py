import random

import pytest

from slicesim import (
    Cloud,
    Nf,
    NfManager,
    Registry,
    ResourceVector,
    ServiceManager,
    SliceManager,
    StaticSlice,
)


class Managers:
    """One registry plus its three managers, for compact test setup."""

    def __init__(self):
        self.registry = Registry()
        self.nf = NfManager(self.registry)
        self.slice = SliceManager(self.registry)
        self.service = ServiceManager(self.registry)


@pytest.fixture
def managers():
    return Managers()


def build_golden(m: Managers):
    """The two-cloud / four-NF / two-slice reference topology.

    Expected state afterwards: placements [c1, c2, c1, c2], NF utilizations
    [70, 54, 80, 32].
    """
    c1 = Cloud(name="c1", capacity=ResourceVector(1000, 10, 10000))
    c2 = Cloud(name="c2", capacity=ResourceVector(2000, 20, 20000))
    m.nf.register_cloud(c1)
    m.nf.register_cloud(c2)
    m.nf.set_scheduler_policy("first-available-method")
    nfs = []
    for i, req in enumerate([(100, 9, 1234), (100, 9, 1234), (200, 1, 1234), (200, 1, 1234)], start=1):
        nf = Nf(name=f"NF {i}", requirement=ResourceVector(*req))
        decision = m.nf.deploy_nf(nf)
        assert decision.placed
        nfs.append(nf)
    vs = StaticSlice(name="Vedio Streaming Slice")
    for nf in nfs:
        vs.compose(nf.id, 20)
    es = StaticSlice(name="Emergency Slice")
    for nf, pct in zip(nfs, [50, 34, 60, 12]):
        es.compose(nf.id, pct)
    assert m.slice.deploy_slice(vs).accepted
    assert m.slice.deploy_slice(es).accepted
    return c1, c2, nfs, vs, es


@pytest.fixture
def golden(managers):
    c1, c2, nfs, vs, es = build_golden(managers)
    managers.clouds = (c1, c2)
    managers.nfs = nfs
    managers.vs = vs
    managers.es = es
    return managers


# Dyadic values (integers, sixteenths) keep every float operation exact, so
# exact-equality invariants can be asserted without tolerance fudging.


def dyadic(rng: random.Random, lo: int = 0, hi: int = 1600) -> float:
    return rng.randrange(lo, hi + 1) / 16.0


def random_vector(rng: random.Random, lo: int = 0, hi: int = 1600) -> ResourceVector:
    return ResourceVector(dyadic(rng, lo, hi), dyadic(rng, lo, hi), dyadic(rng, lo, hi))
