"""
Ramp geometry and the intelligent driver model.
"""
from pydantic import ValidationError
from pytest import approx, raises

from merge_advisor.traffic import (
    IdmParams,
    RampGeometry,
    RampSegment,
    acceleration,
    desired_gap,
    equilibrium_gap,
    free_acceleration,
    segment_of,
    virtual_position,
)
from merge_advisor.utils import DomainError


def test_segment_boundaries(geometry):
    assert segment_of(0, geometry) == RampSegment.R1
    assert segment_of(geometry.len_r1, geometry) == RampSegment.R2
    assert segment_of(geometry.len_r1 - 1e-9, geometry) == RampSegment.R1
    assert segment_of(200, geometry) == RampSegment.R3
    assert segment_of(160, geometry) == RampSegment.R3
    assert segment_of(geometry.ramp_length, geometry) == RampSegment.R3


def test_segment_out_of_range(geometry):
    with raises(DomainError):
        segment_of(-0.1, geometry)
    with raises(DomainError):
        segment_of(geometry.ramp_length + 0.1, geometry)


def test_segments_partition_the_ramp(geometry, rng):
    for x in rng.uniform(0, geometry.ramp_length, 1000):
        seg = segment_of(x, geometry)
        inside = [
            x < geometry.len_r1,
            geometry.len_r1 <= x < geometry.r3_start,
            x >= geometry.r3_start,
        ]
        assert sum(inside) == 1
        assert [RampSegment.R1, RampSegment.R2, RampSegment.R3][inside.index(True)] == seg


def test_virtual_position(geometry):
    total = geometry.ramp_length
    assert virtual_position(total, geometry) == geometry.merge_point_x
    assert virtual_position(total - 50, geometry) == approx(geometry.merge_point_x - 50)


def test_virtual_position_is_isometry(geometry, rng):
    for a, b in rng.uniform(0, geometry.ramp_length, (200, 2)):
        a, b = min(a, b), max(a, b)
        assert virtual_position(b, geometry) - virtual_position(a, geometry) == approx(b - a)
        if a < b:
            assert virtual_position(a, geometry) < virtual_position(b, geometry)


def test_geometry_validation():
    with raises(ValidationError):
        RampGeometry(len_r2=0)
    with raises(ValidationError):
        RampGeometry(merge_point_x=1200, mainline_length=1000)
    with raises(ValidationError):
        RampGeometry(speed_limit_r1=40)
    with raises(ValidationError):
        RampGeometry(merge_point_x=300)


def test_desired_gap(idm_params):
    assert desired_gap(0, 0, idm_params) == idm_params.s_min
    assert desired_gap(10, 0, idm_params) == approx(17.0)
    assert desired_gap(10, 2, idm_params) == approx(22.7735, abs=1e-4)


def test_desired_gap_clamped(idm_params):
    assert desired_gap(20, -30, idm_params) == 0.0


def test_free_road(idm_params):
    p = idm_params
    assert acceleration(0, 1e6, 0, p) == approx(p.a_m, rel=1e-6)
    a = acceleration(p.v_max, 1e6, 0, p)
    assert a <= 0
    assert a == approx(0, abs=1e-6)


def test_free_acceleration(idm_params):
    p = idm_params
    assert free_acceleration(0, p) == p.a_m
    assert free_acceleration(p.v_max, p) == approx(0)
    assert free_acceleration(p.v_max / 2, p) == approx(0.9375 * p.a_m)


def test_acceleration_needs_positive_gap(idm_params):
    with raises(DomainError):
        acceleration(10, 0, 0, idm_params)
    with raises(DomainError):
        acceleration(10, -1, 0, idm_params)


def test_acceleration_clamped(idm_params):
    p = idm_params
    assert acceleration(30, 0.01, 20, p) == -p.b_hard
    assert acceleration(0, 1e9, -50, p) <= p.a_m


def test_equilibrium_gap(idm_params):
    p = idm_params
    assert equilibrium_gap(0, p) == p.s_min
    assert equilibrium_gap(0.999999 * p.v_max, p) > 1e3
    with raises(DomainError):
        equilibrium_gap(p.v_max, p)
    with raises(DomainError):
        equilibrium_gap(40, p)


def test_equilibrium_gap_matches_bisection(idm_params):
    p = idm_params
    lo, hi = 1.0, 1e4
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if acceleration(20, mid, 0, p) < 0:
            lo = mid
        else:
            hi = mid
    assert equilibrium_gap(20, p) == approx(0.5 * (lo + hi), abs=1e-6)


def random_params(rng):
    return IdmParams(
        a_m=rng.uniform(0.5, 3.0),
        b_n=rng.uniform(1.0, 4.0),
        v_max=rng.uniform(15.0, 40.0),
        s_min=rng.uniform(1.0, 5.0),
        t_s=rng.uniform(0.5, 2.5),
        delta=rng.uniform(2.0, 6.0),
        b_hard=8.0,
    )


def test_equilibrium_property(rng):
    for _ in range(1000):
        p = random_params(rng)
        v = rng.uniform(0, 0.95 * p.v_max)
        assert acceleration(v, equilibrium_gap(v, p), 0, p) == approx(0, abs=1e-9)


def test_acceleration_monotone(rng):
    for _ in range(1000):
        p = random_params(rng)
        v = rng.uniform(0, 0.9 * p.v_max)
        s1 = rng.uniform(1.0, 100.0)
        s2 = s1 * rng.uniform(1.1, 2.0)
        a1, a2 = acceleration(v, s1, 0, p), acceleration(v, s2, 0, p)
        assert a1 < a2 or a1 == a2 == -p.b_hard

        v2 = min(v + rng.uniform(0.5, 3.0), 0.99 * p.v_max)
        b1, b2 = acceleration(v, s1, 0, p), acceleration(v2, s1, 0, p)
        assert b2 < b1 or b1 == b2 == -p.b_hard


def test_with_speed_limit(idm_params):
    p = idm_params.with_speed_limit(11.11)
    assert p.v_max == 11.11
    assert p.a_m == idm_params.a_m
    assert idm_params.with_speed_limit(idm_params.v_max) is idm_params


def test_params_validation():
    with raises(ValidationError):
        IdmParams(a_m=0)
    with raises(ValidationError):
        IdmParams(b_n=3, b_hard=2)
