import math

import numpy as np
import pytest

from kpzkit.errors import InvalidParameterError, OutOfWindowError
from kpzkit.growth import (
    DropletRegion,
    FlatRegion,
    NucleationSet,
    droplet_origin_heights,
    flat_origin_heights,
    png_droplet_sample,
    png_evolve,
    png_flat_sample,
    png_multiline,
    sample_droplet_events,
)
from kpzkit.lpp import lis_patience


def test_empty_event_set_stays_flat():
    ev = NucleationSet([], [])
    np.testing.assert_array_equal(png_evolve(ev, 2.0, [-1.0, 0.0, 1.5]),
                                  [0, 0, 0])


def test_single_nucleation_plateau():
    ev = NucleationSet([0.0], [0.5])
    assert png_evolve(ev, 1.0, [0.0])[0] == 1
    # plateau spread is |x| <= t - 0.5
    assert png_evolve(ev, 1.0, [0.6])[0] == 0
    assert png_evolve(ev, 1.0, [0.49])[0] == 1


def test_plateau_contains_endpoints():
    ev = NucleationSet([0.0], [0.5])
    assert png_evolve(ev, 1.0, [-0.5])[0] == 1
    assert png_evolve(ev, 1.0, [0.5])[0] == 1


def test_lis_identity_100_droplets():
    # exact identity: h(0,t) equals the LIS of the permutation induced by
    # ordering events by u = s+x and ranking by v = s-x
    rng = np.random.default_rng(2024)
    hits = 0
    for _ in range(100):
        events, h0, _ = png_droplet_sample(3.0, rng)
        u = events.s + events.x
        v = events.s - events.x
        order = np.argsort(u)
        ranks = np.argsort(np.argsort(v[order])) + 1
        if len(ranks) == 0:
            hits += h0 == 0
        else:
            hits += h0 == lis_patience(ranks)
    assert hits == 100


def test_droplet_event_count_is_poisson_t_squared():
    rng = np.random.default_rng(5)
    t = 2.0
    counts = [len(sample_droplet_events(t, rng)) for _ in range(4000)]
    mean = np.mean(counts)
    sigma = math.sqrt(t * t / 4000)
    assert abs(mean - t * t) <= 4 * sigma


def test_droplet_void_probability():
    # P(h(0,1) = 0) = e^{-1}
    rng = np.random.default_rng(12)
    n = 100_000
    hs = droplet_origin_heights(1.0, n, rng)
    p = math.exp(-1.0)
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(np.mean(hs == 0) - p) <= 3 * sigma


def test_droplet_region_validation():
    with pytest.raises(InvalidParameterError):
        NucleationSet([0.9], [0.95], region=DropletRegion(1.0, 0.0))
    # legal corner events pass
    NucleationSet([0.45], [0.5], region=DropletRegion(1.0, 0.0))


def test_query_outside_covered_cone_raises():
    rng = np.random.default_rng(3)
    events = sample_droplet_events(2.0, rng, halfwidth=0.0)
    with pytest.raises(OutOfWindowError):
        png_evolve(events, 2.0, [0.5])
    events = sample_droplet_events(2.0, rng, halfwidth=1.0)
    png_evolve(events, 2.0, [0.5, -1.0])   # now covered
    with pytest.raises(OutOfWindowError):
        png_evolve(events, 2.0, [1.2])


def test_flat_window_coverage():
    rng = np.random.default_rng(4)
    heights, events = png_flat_sample(1.0, [-2.0, 0.0, 2.0], rng,
                                      return_events=True)
    assert heights.shape == (3,)
    with pytest.raises(OutOfWindowError):
        png_evolve(events, 1.0, [2.5])


def test_flat_small_t_limit_is_flat():
    rng = np.random.default_rng(6)
    h = png_flat_sample(1e-9, [0.0, 1.0], rng)
    np.testing.assert_array_equal(h, [0, 0])


def test_droplet_sample_grid_heights_match_point_queries():
    rng = np.random.default_rng(9)
    grid = np.array([-2.0, -0.5, 0.0, 1.0, 2.5])
    events, h0, heights = png_droplet_sample(4.0, rng, xs=grid)
    assert h0 == png_evolve(events, 4.0, [0.0])[0]
    for x, h in zip(grid, heights):
        assert png_evolve(events, 4.0, [x])[0] == h


def test_droplet_heights_vanish_outside_light_cone():
    rng = np.random.default_rng(10)
    t = 2.0
    events, _, heights = png_droplet_sample(t, rng, xs=[2.5, 3.0, -2.1])
    np.testing.assert_array_equal(heights, [0, 0, 0])


def test_flat_mean_height_grows_linearly():
    rng = np.random.default_rng(21)
    m8 = np.mean(flat_origin_heights(4.0, 3000, rng))
    m16 = np.mean(flat_origin_heights(8.0, 3000, rng))
    assert 1.7 <= m16 / m8 <= 2.3


def test_batched_and_single_droplet_heights_agree_in_law():
    # same t, two independent routes; compare first moments loosely
    rng = np.random.default_rng(33)
    batched = droplet_origin_heights(3.0, 4000, rng)
    single = np.array([png_droplet_sample(3.0, rng)[1] for _ in range(1500)])
    se = math.sqrt(np.var(batched) / 4000 + np.var(single) / 1500)
    assert abs(batched.mean() - single.mean()) <= 4 * se


# ---------------------------------------------------------------------------
# multi-line ensemble
# ---------------------------------------------------------------------------

def _ensemble_breakpoints(ens):
    pts = [0.0]
    for line in ens.lines:
        pts.extend(p for p, _ in line.steps)
    pts = np.unique(np.asarray(pts, dtype=float))
    mids = 0.5 * (pts[1:] + pts[:-1])
    t = ens.time
    return np.concatenate([pts, mids, [-t - 1.0, t + 1.0]])


def test_multiline_no_events():
    ens = png_multiline(NucleationSet([], []), 1.5)
    assert ens.j_min == 0
    for j in (0, -1, -5):
        assert ens.height(j, 0.3) == j


def test_multiline_top_line_equals_png_evolve():
    rng = np.random.default_rng(17)
    for _ in range(20):
        events = sample_droplet_events(2.5, rng)
        ens = png_multiline(events, 2.5)
        xs = np.linspace(-3.0, 3.0, 41)
        top = np.array([ens.height(0, x) for x in xs])
        np.testing.assert_array_equal(top, png_evolve(
            NucleationSet(events.x, events.s), 2.5, xs))


def test_multiline_two_event_merge_hand_trace():
    # droplet-legal events at (+-0.5, 1.0): their plateaus merge at
    # (x, s) = (0, 1.5); that annihilation seeds line -1, which reaches 0.
    events = NucleationSet([-0.5, 0.5], [1.0, 1.0])
    ens = png_multiline(events, 2.0)
    assert len(ens.lines) == 2 and ens.j_min == -1
    assert ens.height(0, 0.0) == 1          # merged plateau on top line
    assert ens.height(-1, 0.0) == 0         # second line reached 0
    assert ens.height(-1, 0.49) == 0        # plateau |x| <= 0.5 at t=2
    assert ens.height(-1, 0.6) == -1
    assert max(ens.height(-1, x) for x in np.linspace(-2, 2, 81)) == 0


def test_multiline_non_crossing_and_pinning():
    rng = np.random.default_rng(99)
    for _ in range(25):
        t = 2.0
        events = sample_droplet_events(t, rng)
        ens = png_multiline(events, t)
        xs = _ensemble_breakpoints(ens)
        for j in range(0, ens.j_min - 1, -1):
            upper = np.array([ens.height(j, x) for x in xs])
            lower = np.array([ens.height(j - 1, x) for x in xs])
            assert np.all(lower < upper)
        # boundary pinning at x = +-t (events keep |x| <= s < t a.s.)
        for j in range(0, ens.j_min - 2, -1):
            assert ens.height(j, t) == j
            assert ens.height(j, -t) == j


def test_flat_region_descriptor_contains():
    reg = FlatRegion(2.0, -3.0, 3.0)
    assert bool(np.all(reg.contains(np.array([0.0, -3.0]),
                                    np.array([0.1, 2.0]))))
    assert not reg.covers_query(1.5, 2.0)
    assert reg.covers_query(0.5, 2.0)
