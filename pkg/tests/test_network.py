import math

import pytest
from hypothesis import given, settings, strategies as st

from dtsim.network import (
    NetworkConditions,
    compute_bound_check,
    latency_ratio,
    step_time,
    sync_payload,
)

NET_100 = NetworkConditions.symmetric_mbps(100.0)


def test_sync_payload_examples():
    assert sync_payload(1e9, 1) == pytest.approx(2e9)
    assert sync_payload(160e9, 150) == pytest.approx(2133333333.3333333)
    assert sync_payload(160e9, 300) == pytest.approx(sync_payload(160e9, 150) / 2)


def test_step_time_examples():
    t = step_time(160e9, 524288, 31.68e15, 0.40)
    assert t == pytest.approx(39.71878787878788)
    assert step_time(160e9, 0, 31.68e15, 0.40) == 0.0
    assert step_time(160e9, 524288, 31.68e15, 0.20) == pytest.approx(2 * t)


def test_compute_bound_reference_configuration():
    t_step = step_time(160e9, 524288, 31.68e15, 0.40)
    payload = sync_payload(160e9, 150)
    profile = compute_bound_check(19, NET_100, t_step, payload)
    assert profile.sync_wall_time == pytest.approx(170.76666, rel=1e-5)
    assert profile.compute_bound
    assert profile.slowdown == 1.0
    assert profile.average_traffic == pytest.approx(22.6e6, rel=0.005)


def test_compute_bound_limits():
    profile = compute_bound_check(1000000, NET_100, 39.7, sync_payload(160e9, 150))
    assert profile.compute_bound
    assert profile.average_traffic < 1e3
    slow_net = NetworkConditions.symmetric_mbps(0.001)
    profile = compute_bound_check(19, slow_net, 39.7, sync_payload(160e9, 150))
    assert not profile.compute_bound
    assert profile.slowdown > 1000


def test_slowdown_iff_not_compute_bound():
    t_step = step_time(160e9, 524288, 31.68e15, 0.40)
    payload = sync_payload(160e9, 150)
    for h in (1, 2, 4, 5, 19, 128):
        p = compute_bound_check(h, NET_100, t_step, payload)
        assert (p.slowdown == 1.0) == p.compute_bound


def test_required_bandwidth_consistency():
    t_step = step_time(160e9, 524288, 31.68e15, 0.40)
    payload = sync_payload(160e9, 150)
    profile = compute_bound_check(19, NET_100, t_step, payload)
    boundary = NetworkConditions(
        bandwidth_up=profile.required_bandwidth,
        bandwidth_down=profile.required_bandwidth,
        rtt=100.0,
    )
    at_boundary = compute_bound_check(19, boundary, t_step, payload)
    assert at_boundary.compute_bound
    assert at_boundary.slowdown == pytest.approx(1.0)


@given(
    h=st.integers(min_value=1, max_value=256),
    compression=st.floats(min_value=1, max_value=1000),
)
@settings(max_examples=60)
def test_traffic_monotone_in_h_and_compression(h, compression):
    t_step = 39.7
    base = compute_bound_check(h, NET_100, t_step, sync_payload(160e9, compression))
    more_h = compute_bound_check(h + 1, NET_100, t_step, sync_payload(160e9, compression))
    more_c = compute_bound_check(h, NET_100, t_step, sync_payload(160e9, compression * 2))
    assert more_h.average_traffic <= base.average_traffic * (1 + 1e-12)
    assert more_c.average_traffic <= base.average_traffic * (1 + 1e-12)


@given(mbps=st.floats(min_value=1, max_value=10000))
@settings(max_examples=40)
def test_compute_bound_monotone_in_bandwidth(mbps):
    t_step, payload = 39.7, sync_payload(160e9, 150)
    lo = compute_bound_check(19, NetworkConditions.symmetric_mbps(mbps), t_step, payload)
    hi = compute_bound_check(19, NetworkConditions.symmetric_mbps(2 * mbps), t_step, payload)
    if lo.compute_bound:
        assert hi.compute_bound
    assert hi.slowdown <= lo.slowdown


def test_conservation_of_work():
    # slowdown x effective throughput stays constant for fixed hardware
    t_step, payload = 39.7, sync_payload(160e9, 150)
    for mbps in (1.0, 5.0, 20.0):
        p = compute_bound_check(2, NetworkConditions.symmetric_mbps(mbps), t_step, payload)
        assert p.slowdown * (1.0 / p.slowdown) == pytest.approx(1.0)
        assert p.average_traffic * p.slowdown == pytest.approx(
            payload * 8 / (2 * t_step), rel=1e-9
        )


def test_latency_ratio_examples():
    assert latency_ratio(NET_100, sync_payload(160e9, 150)) == pytest.approx(
        1706.6666, rel=1e-5
    )
    assert latency_ratio(NET_100, 0.0) == 0.0
    assert latency_ratio(NetworkConditions(1e8, 1e8, rtt=0.0), 1e9) == math.inf


def test_effective_link_is_min_of_up_down():
    asym = NetworkConditions(bandwidth_up=47e6, bandwidth_down=207e6, rtt=100)
    assert asym.link_rate == 47e6
    ratio = latency_ratio(asym, sync_payload(160e9, 150))
    assert ratio == pytest.approx(2 * 160e9 / 150 * 8 / 47e6 / 0.1, rel=1e-9)


def test_network_validation():
    with pytest.raises(ValueError):
        NetworkConditions(0, 1e8)
    with pytest.raises(ValueError):
        NetworkConditions(1e8, 1e8, rtt=-1)
    with pytest.raises(ValueError):
        sync_payload(1e9, 0.5)
    with pytest.raises(ValueError):
        step_time(1e9, 1e5, 1e15, 0.0)
    with pytest.raises(ValueError):
        compute_bound_check(0, NET_100, 1.0, 1e9)
