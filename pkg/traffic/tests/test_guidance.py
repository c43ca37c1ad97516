"""
Vehicle grouping, merge eligibility, target selection and speed guidance.
"""
from math import sqrt

import numpy as np
from pytest import approx, raises

from merge_advisor.traffic import (
    MergeCriteria,
    Road,
    VehicleGroups,
    VehicleState,
    classify_vehicles,
    compute_guidance,
    desired_gap,
    merge_eligible,
    select_target,
    virtual_position,
)
from merge_advisor.utils import DomainError


def ramp(vid, position, speed=10.0, **kw):
    return VehicleState(vid, Road.RAMP, position, speed, **kw)


def main(vid, position, speed=20.0, **kw):
    return VehicleState(vid, Road.MAINLINE, position, speed, **kw)


def test_classify_empty(geometry):
    groups = classify_vehicles([], geometry)
    assert groups == VehicleGroups()


def test_classify_single_r2(geometry):
    groups = classify_vehicles([ramp("a", geometry.len_r1 + 1)], geometry)
    assert [v.id for v in groups.r2] == ["a"]
    assert groups.r1 == groups.r3 == groups.mainline == []


def test_classify_sorted_leading_first(geometry):
    snapshot = [ramp("a", 70), ramp("b", 140), ramp("c", 100), main("m", 300)]
    groups = classify_vehicles(snapshot, geometry)
    assert [v.id for v in groups.r2] == ["b", "c", "a"]
    assert [v.id for v in groups.mainline] == ["m"]


def ego_in_r3(geometry, speed=20.0):
    return ramp("ego", 200, speed)


def test_merge_empty_mainline(geometry):
    check = merge_eligible(ego_in_r3(geometry), [], MergeCriteria(), geometry)
    assert check
    assert check.leader_id is None and check.follower_id is None


def test_merge_follower_at_zero_gap(geometry):
    ego = ego_in_r3(geometry)
    x = virtual_position(ego.position, geometry)
    follower = main("f", x - ego.length, 20)
    check = merge_eligible(ego, [follower], MergeCriteria(), geometry)
    assert not check
    assert check.follower_gap == approx(0)


def test_merge_example_both_sides(geometry):
    ego = ego_in_r3(geometry, 20)
    x = virtual_position(ego.position, geometry)
    leader = main("l", x + 40 + 5, 20)
    follower = main("f", x - ego.length - 40, 20)
    check = merge_eligible(ego, [leader, follower], MergeCriteria(), geometry)
    assert check
    assert check.leader_gap == approx(40)
    assert check.follower_gap == approx(40)
    assert check.required_leader_gap == approx(32)
    assert check.required_follower_gap == approx(32)


def test_merge_relaxed_follower(geometry):
    ego = ego_in_r3(geometry, 10)
    x = virtual_position(ego.position, geometry)
    follower = main("f", x - ego.length - 60, 25)
    assert not merge_eligible(ego, [follower], MergeCriteria(), geometry)
    relaxed = MergeCriteria(require_follower_gap=False)
    check = merge_eligible(ego, [follower], relaxed, geometry)
    assert check
    # 15 m/s of closing speed shed at 2 m/s^2 takes 56.25 m
    assert check.required_follower_gap == approx(2 + 56.25)


def test_relaxed_follower_still_needs_braking_room(geometry):
    relaxed = MergeCriteria(require_follower_gap=False)
    ego = ego_in_r3(geometry, 0.0)
    x = virtual_position(ego.position, geometry)
    close = main("f", x - ego.length - 15, 25)
    assert not merge_eligible(ego, [close], relaxed, geometry)
    slower = main("f", x - ego.length - 3, 0.0)
    assert merge_eligible(ego, [slower], relaxed, geometry)


def test_merge_requires_r3(geometry):
    with raises(DomainError):
        merge_eligible(ramp("a", 100), [], MergeCriteria(), geometry)
    with raises(DomainError):
        merge_eligible(main("m", 500), [], MergeCriteria(), geometry)


def test_merge_monotone_in_gaps(geometry, rng):
    crit = MergeCriteria()
    for _ in range(500):
        ego = ramp("ego", rng.uniform(geometry.r3_start, geometry.ramp_length), rng.uniform(0, 30))
        x = virtual_position(ego.position, geometry)
        lead_gap, follow_gap = rng.uniform(0, 80, 2)
        v_lead, v_follow = rng.uniform(0, 33, 2)
        before = merge_eligible(
            ego,
            [main("l", x + 5 + lead_gap, v_lead), main("f", x - 5 - follow_gap, v_follow)],
            crit,
            geometry,
        )
        extra_lead, extra_follow = rng.uniform(0, 30, 2)
        after = merge_eligible(
            ego,
            [
                main("l", x + 5 + lead_gap + extra_lead, v_lead),
                main("f", x - 5 - follow_gap - extra_follow, v_follow),
            ],
            crit,
            geometry,
        )
        assert not (before and not after)


def test_select_target_prefers_r3(geometry):
    groups = classify_vehicles([ramp("r3", 200), ramp("v2", 140), ramp("v5", 80)], geometry)
    assert select_target(groups) == "r3"


def test_select_target_leading_r2(geometry):
    groups = classify_vehicles([ramp("v2", 140), ramp("v5", 80)], geometry)
    assert select_target(groups) == "v2"


def test_select_target_skips_ready_r3(geometry):
    groups = classify_vehicles(
        [ramp("ready", 250, lane_change_ready=True), ramp("waiting", 180), ramp("v2", 140)],
        geometry,
    )
    assert select_target(groups) == "waiting"


def test_select_target_never_r1(geometry):
    groups = classify_vehicles([ramp("a", 10), ramp("b", 30), main("m", 500)], geometry)
    assert select_target(groups) is None


def test_select_target_only_ramp(geometry, rng):
    for _ in range(200):
        snapshot = [ramp(f"r{i}", x) for i, x in enumerate(rng.uniform(0, 310, 4))]
        snapshot += [main(f"m{i}", x) for i, x in enumerate(rng.uniform(0, 1000, 4))]
        groups = classify_vehicles(snapshot, geometry)
        target = select_target(groups)
        allowed = {v.id for v in groups.r2 + groups.r3}
        assert target is None or target in allowed


def test_guidance_free_road_at_limit(geometry, idm_params):
    target = ramp("t", 100, idm_params.v_max)
    cmd = compute_guidance(target, [], geometry, idm_params, now=12.0)
    assert cmd.recommended_accel == approx(0)
    assert cmd.leader_id is None
    assert cmd.issued_at == 12.0
    assert cmd.recommended_speed == approx(idm_params.v_max)


def test_guidance_distant_leader_from_rest(geometry, idm_params):
    target = ramp("t", 100, 0.0)
    x = virtual_position(100, geometry)
    cmd = compute_guidance(target, [main("far", x + 1e6, 20)], geometry, idm_params, 0)
    assert cmd.recommended_accel == approx(idm_params.a_m, rel=1e-6)
    assert cmd.leader_id == "far"


def test_guidance_opening_gap(geometry, idm_params):
    target = ramp("t", 100, 20.0)
    x = virtual_position(100, geometry)
    leader = main("l", x + 30 + 5, 25.0)
    cmd = compute_guidance(target, [leader], geometry, idm_params, 0)
    s_star = 2 + 30 + 20 * (-5) / (2 * sqrt(1.5 * 2.0))
    expected = 1.5 * (1 - (20 / 33.33) ** 4 - (s_star / 30) ** 2)
    assert s_star == approx(3.1325, abs=1e-4)
    assert cmd.recommended_accel == approx(expected, abs=1e-12)
    assert cmd.recommended_accel == approx(1.290, abs=1e-3)
    assert cmd.recommended_speed == approx(20 + expected)
    assert cmd.leader_id == "l"


def test_guidance_overlap(geometry, idm_params):
    target = ramp("t", 100, 15.0)
    x = virtual_position(100, geometry)
    cmd = compute_guidance(target, [main("on-top", x + 2, 20)], geometry, idm_params, 0)
    assert cmd.overlap
    assert cmd.recommended_accel == -idm_params.b_hard
    assert cmd.recommended_speed == approx(15.0 - idm_params.b_hard)


def test_guidance_rejects_mainline_and_r1(geometry, idm_params):
    with raises(DomainError):
        compute_guidance(main("m", 500), [], geometry, idm_params, 0)
    with raises(DomainError):
        compute_guidance(ramp("r", 10), [], geometry, idm_params, 0)


def test_guidance_leader_oracle_and_bounds(geometry, idm_params, rng):
    p = idm_params
    for _ in range(300):
        pos = rng.uniform(geometry.r2_start, geometry.ramp_length)
        target = ramp("t", pos, rng.uniform(0, 33))
        positions = rng.uniform(0, 1000, 6)
        mainline = [main(f"m{i}", x, rng.uniform(0, 33)) for i, x in enumerate(positions)]
        cmd = compute_guidance(target, mainline, geometry, p, 0)

        d = positions - virtual_position(pos, geometry)
        ahead = np.where(d > 0, d, np.inf)
        expected = None if np.all(np.isinf(ahead)) else f"m{int(np.argmin(ahead))}"
        assert cmd.leader_id == expected
        assert -p.b_hard <= cmd.recommended_accel <= p.a_m
        assert 0 <= cmd.recommended_speed <= p.v_max


def test_required_gap_uses_follower_params(geometry):
    ego = ego_in_r3(geometry, 15)
    x = virtual_position(ego.position, geometry)
    follower = main("f", x - ego.length - 50, 25)
    timid = MergeCriteria(follower=MergeCriteria().follower.model_copy(update={"t_s": 2.5}))
    check = merge_eligible(ego, [follower], timid, geometry)
    assert check.required_follower_gap == approx(desired_gap(25, 10, timid.follower))
