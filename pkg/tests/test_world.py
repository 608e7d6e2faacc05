import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pedcross.geometry import Point
from pedcross.world import (
    LayoutError,
    PlacementDistribution,
    Side,
    draw_raw_positions,
    has_crossed,
    in_lateral_band,
    in_motion_area,
    make_layout,
    progress,
    reentry_step,
    sample_initial_positions,
)

WEST = make_layout(3.0, 3.6, 43.62, 1.0)


def test_west_crosswalk_layout():
    assert WEST.crosswalk_rect() == (3.0, 0.0, 46.62, 3.6)
    assert WEST.motion_rect() == (3.0, -1.0, 46.62, 4.6)


def test_north_crosswalk_layout():
    north = make_layout(3.0, 6.4, 47.69, 1.0)
    assert north.far_curb == pytest.approx(50.69)
    assert north.y_max == pytest.approx(7.4)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_layout_rejects_nonpositive_dimensions(bad):
    with pytest.raises(LayoutError, match="beta"):
        make_layout(bad, 3.6, 43.62, 1.0)
    with pytest.raises(LayoutError, match="buffer"):
        make_layout(3.0, 3.6, 43.62, bad)


def test_no_pedestrians_no_positions():
    assert sample_initial_positions(WEST, Side.LEFT, 0, PlacementDistribution.NORMAL, np.random.default_rng(0)) == []


def test_normal_placement_fills_the_waiting_area_about_95_percent():
    layout = make_layout(3.0, 3.6, 43.62, 0.5)
    xy = draw_raw_positions(layout, Side.LEFT, 1_000_000, PlacementDistribution.NORMAL, np.random.default_rng(5))
    inside = (xy[:, 0] >= 0) & (xy[:, 0] <= layout.beta) & (xy[:, 1] >= 0) & (xy[:, 1] <= layout.width)
    frac = inside.mean()
    assert frac == pytest.approx(0.955, abs=0.01)
    # with y ~ N(W/2, W/4) the joint rate can never pass P(|z| < 2)
    assert frac < 0.9545


@pytest.mark.parametrize("dist", list(PlacementDistribution))
def test_placement_families_share_mean_and_spread(dist):
    xy = draw_raw_positions(WEST, Side.LEFT, 200_000, dist, np.random.default_rng(2))
    assert xy[:, 1].mean() == pytest.approx(WEST.width / 2, abs=0.01)
    assert xy[:, 1].std() == pytest.approx(WEST.width / 4, rel=0.02)
    assert (xy[:, 0] <= WEST.near_curb).all()


def test_right_side_mirrors_left():
    left = draw_raw_positions(WEST, Side.LEFT, 1000, PlacementDistribution.NORMAL, np.random.default_rng(3))
    right = draw_raw_positions(WEST, Side.RIGHT, 1000, PlacementDistribution.NORMAL, np.random.default_rng(3))
    assert (right[:, 0] >= WEST.far_curb).all()
    np.testing.assert_allclose(WEST.near_curb - left[:, 0], right[:, 0] - WEST.far_curb)
    np.testing.assert_array_equal(left[:, 1], right[:, 1])


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 40),
    st.sampled_from(list(PlacementDistribution)),
    st.sampled_from(list(Side)),
    st.integers(0, 2**32 - 1),
)
def test_sampled_positions_never_overlap(n, dist, side, seed):
    r = 0.2
    pts = sample_initial_positions(WEST, side, n, dist, np.random.default_rng(seed), radii=r)
    assert len(pts) == n
    for i, p in enumerate(pts):
        assert not in_motion_area(WEST, p) or p.x in (WEST.near_curb, WEST.far_curb)
        for q in pts[:i]:
            assert p.distance(q) >= 2 * r - 1e-9


def test_sampling_respects_already_occupied_spots():
    rng = np.random.default_rng(0)
    first = sample_initial_positions(WEST, Side.LEFT, 20, PlacementDistribution.NORMAL, rng, radii=0.3)
    occupied = [(p, 0.3) for p in first]
    second = sample_initial_positions(WEST, Side.LEFT, 20, PlacementDistribution.NORMAL, rng, radii=0.3, occupied=occupied)
    for p in second:
        assert all(p.distance(q) >= 0.6 - 1e-9 for q in first)


def test_crowded_waiting_area_still_places_everyone():
    # far more people than fit in beta x W; the overflow spills out behind the curb
    pts = sample_initial_positions(WEST, Side.LEFT, 300, PlacementDistribution.NORMAL, np.random.default_rng(1), radii=0.3)
    assert len(pts) == 300
    assert all(p.x <= WEST.near_curb for p in pts)


def test_explicit_positions_bypass_sampling():
    pts = sample_initial_positions(
        WEST, Side.LEFT, 2, PlacementDistribution.NORMAL, np.random.default_rng(0), explicit=[(1.0, 1.0), (2.0, 2.5)]
    )
    assert pts == [Point(1.0, 1.0), Point(2.0, 2.5)]
    with pytest.raises(ValueError):
        sample_initial_positions(WEST, Side.LEFT, 3, PlacementDistribution.NORMAL, np.random.default_rng(0), explicit=[(1, 1)])


def test_motion_area_membership():
    b, w, d = WEST.beta, WEST.width, WEST.buffer
    assert in_motion_area(WEST, Point(b + 1, -d / 2))
    assert not in_motion_area(WEST, Point(b + 1, w + d + 0.01))
    assert not in_motion_area(WEST, Point(b - 0.01, w / 2))
    assert in_lateral_band(WEST, Point(b - 0.01, w / 2))


def test_completion_is_inclusive_at_the_far_curb():
    far = WEST.far_curb
    assert has_crossed(WEST, Point(far, 1.0), Side.LEFT)
    assert not has_crossed(WEST, Point(far - 0.01, 1.0), Side.LEFT)
    assert has_crossed(WEST, Point(WEST.near_curb, 1.0), Side.RIGHT)
    assert not has_crossed(WEST, Point(WEST.near_curb + 0.01, 1.0), Side.RIGHT)


def test_progress_is_measured_from_the_near_curb():
    assert progress(WEST, Point(13.0, 0), Side.LEFT) == pytest.approx(10.0)
    assert progress(WEST, Point(36.62, 0), Side.RIGHT) == pytest.approx(10.0)


def test_reentry_moves_straight_back():
    above = Point(10.0, WEST.y_max + 2.0)
    step = reentry_step(WEST, above, 1.5, 1.0)
    assert step == Point(10.0, WEST.y_max + 0.5)
    assert reentry_step(WEST, step, 1.5, 1.0) == Point(10.0, WEST.y_max)
    below = Point(10.0, WEST.y_min - 0.3)
    assert reentry_step(WEST, below, 1.0, 1.0) == Point(10.0, WEST.y_min)
    with pytest.raises(ValueError):
        reentry_step(WEST, Point(10.0, 1.0), 1.0, 1.0)
