import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicesim import Nf, ResourceVector, Service, Slicelet, StaticSlice

# Dyadic components make float addition/subtraction exact, so algebraic
# properties can be asserted with ==.
components = st.integers(min_value=0, max_value=2**40).map(lambda n: n / 256.0)
vectors = st.builds(ResourceVector, components, components, components)


class TestResourceVector:
    def test_add_identity(self):
        assert ResourceVector(0, 0, 0) + ResourceVector(5, 1, 2) == ResourceVector(5, 1, 2)

    def test_add_componentwise(self):
        assert ResourceVector(100, 9, 1234) + ResourceVector(200, 1, 1234) == ResourceVector(300, 10, 2468)

    def test_add_small(self):
        assert ResourceVector(1, 2, 3) + ResourceVector(4, 5, 6) == ResourceVector(5, 7, 9)

    def test_add_overflow_rejected(self):
        big = ResourceVector(1e308, 0, 0)
        with pytest.raises(ValueError):
            big + big

    def test_rejects_negative_and_non_finite(self):
        with pytest.raises(ValueError):
            ResourceVector(-1, 0, 0)
        with pytest.raises(ValueError):
            ResourceVector(0, math.nan, 0)
        with pytest.raises(ValueError):
            ResourceVector(0, 0, math.inf)

    def test_fits_within(self):
        assert ResourceVector(100, 9, 1234).fits_within(ResourceVector(1000, 10, 10000))
        # c1 residual after the first golden deployment: memory is exhausted
        assert not ResourceVector(100, 9, 1234).fits_within(ResourceVector(900, 1, 8766))
        assert ResourceVector(0, 0, 0).fits_within(ResourceVector(0, 0, 0))

    @given(vectors, vectors)
    def test_add_commutative(self, a, b):
        assert a + b == b + a

    @given(vectors, vectors, vectors)
    def test_add_associative(self, a, b, c):
        assert (a + b) + c == a + (b + c)

    @given(vectors, vectors, vectors)
    def test_fits_chain(self, d, d2, r):
        """fits(d, r) and fits(d2, r - d) together imply fits(d + d2, r)."""
        if d.fits_within(r) and d2.fits_within(r - d):
            assert (d + d2).fits_within(r)


class TestNfShares:
    def _nf(self, shares):
        nf = Nf(name="n", requirement=ResourceVector(1, 1, 1), placement="cloud-1")
        nf.slice_shares = dict(shares)
        return nf

    def test_utilization_sum(self):
        assert self._nf({"vs": 20, "es": 50}).utilization() == 70

    def test_utilization_empty(self):
        assert self._nf({}).utilization() == 0

    def test_utilization_full(self):
        assert self._nf({"a": 60, "b": 40}).utilization() == 100

    def test_remaining(self):
        assert self._nf({"vs": 20, "es": 60}).remaining_share() == 20
        assert self._nf({}).remaining_share() == 100
        assert self._nf({"a": 60, "b": 40}).remaining_share() == 0

    @given(st.lists(st.integers(min_value=1, max_value=1600), max_size=10))
    def test_complement_exact(self, sixteenths):
        """utilization + remaining_share is exactly 100."""
        shares = {f"s{i}": v / 16.0 for i, v in enumerate(sixteenths)}
        nf = self._nf(shares)
        assert nf.utilization() + nf.remaining_share() == 100.0


class TestValidation:
    def test_compose_rejects_bad_share(self):
        s = StaticSlice(name="s")
        for bad in (0, -5, 101, math.nan):
            with pytest.raises(ValueError):
                s.compose("nf-1", bad)

    def test_service_priority(self):
        with pytest.raises(ValueError):
            Service(name="svc", priority=-1)
        with pytest.raises(ValueError):
            Service(name="svc", priority=1.5)

    def test_slicelet_times(self):
        with pytest.raises(ValueError):
            Slicelet("x", "svc-1", arrival=-1.0, duration=1.0)
        with pytest.raises(ValueError):
            Slicelet("x", "svc-1", arrival=0.0, duration=0.0)
        with pytest.raises(ValueError):
            Slicelet("x", "svc-1", arrival=math.inf, duration=1.0)
