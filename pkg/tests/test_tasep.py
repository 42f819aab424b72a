import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpzkit.errors import InvalidParameterError
from kpzkit.growth import (
    HeightFunction,
    make_initial,
    particle_positions,
    tasep_ct_run,
    tasep_discrete_run,
    tasep_parallel_step,
)


def zigzag(n=4, boundary="frozen"):
    inc = np.tile([1, -1], n // 2).astype(np.int8)
    return HeightFunction(0, inc, boundary=boundary)


def test_parallel_q0_deterministic_periodic():
    rng = np.random.default_rng(0)
    out = tasep_parallel_step(zigzag(boundary="periodic"), 0.0, rng)
    np.testing.assert_array_equal(out.heights(), [2, 1, 2, 1, 2])


def test_parallel_q1_frozen():
    rng = np.random.default_rng(0)
    h = zigzag()
    out = tasep_parallel_step(h, 1.0, rng)
    np.testing.assert_array_equal(out.heights(), h.heights())
    assert out.time == h.time + 1


def test_parallel_invalid_q():
    with pytest.raises(InvalidParameterError):
        tasep_parallel_step(zigzag(), 1.5, np.random.default_rng(0))


def test_parallel_raise_frequency_matches_bernoulli():
    # single interior minimum, q = 0.5: raise frequency 1-q within 3 sigma
    rng = np.random.default_rng(42)
    h = zigzag()
    n = 100_000
    raised = 0
    for _ in range(n):
        out = tasep_parallel_step(h, 0.5, rng)
        raised += out.height_at(2) == 2
    phat = raised / n
    sigma = math.sqrt(0.25 / n)
    assert abs(phat - 0.5) <= 3 * sigma


@given(st.integers(min_value=0, max_value=2**32 - 1),
       st.floats(min_value=0.0, max_value=1.0),
       st.integers(min_value=1, max_value=12))
@settings(max_examples=50, deadline=None)
def test_updates_preserve_admissibility(seed, q, steps):
    rng = np.random.default_rng(seed)
    h = make_initial(
        "bernoulli", (-8, 8), rng) if seed % 2 else make_initial(
        "wedge", (-8, 8))
    for update in ("parallel", "sequential"):
        out = tasep_discrete_run(h, q, steps, update, rng)
        diffs = np.diff(out.heights())
        assert np.all(np.abs(diffs) == 1)
        # frozen boundary: edge heights never move
        assert out.height_at(out.window[0]) == h.height_at(h.window[0])


def test_discrete_zero_steps_returns_initial():
    rng = np.random.default_rng(1)
    h = make_initial("wedge", (-3, 3))
    out = tasep_discrete_run(h, 0.3, 0, "parallel", rng)
    np.testing.assert_array_equal(out.heights(), h.heights())


def test_discrete_q1_frozen_any_steps():
    rng = np.random.default_rng(2)
    h = make_initial("wedge", (-3, 3))
    for update in ("parallel", "sequential"):
        out = tasep_discrete_run(h, 1.0, 17, update, rng)
        np.testing.assert_array_equal(out.heights(), h.heights())


def test_sequential_sweep_is_right_to_left():
    # particles at 0,1 with holes at 2,3; q=0: under the sequential rule the
    # left particle follows into the freshly vacated site, under the parallel
    # rule it stays blocked for one step.
    h = HeightFunction(0, np.array([-1, -1, 1, 1], dtype=np.int8), h0=2)
    rng = np.random.default_rng(0)
    seq = tasep_discrete_run(h, 0.0, 1, "sequential", rng)
    np.testing.assert_array_equal(particle_positions(seq), [2, 1])
    par = tasep_discrete_run(h, 0.0, 1, "parallel", rng)
    np.testing.assert_array_equal(particle_positions(par), [2, 0])


def test_ct_run_zero_time():
    rng = np.random.default_rng(3)
    h = make_initial("wedge", (-2, 2))
    traj = tasep_ct_run(h, 0.0, rng)
    np.testing.assert_array_equal(traj.final.heights(), h.heights())
    assert traj.final.time == 0.0


def test_ct_run_single_minimum_exponential_law():
    # P(no jump by t=1) = e^{-1}
    rng = np.random.default_rng(7)
    base = HeightFunction(-1, np.array([-1, 1], dtype=np.int8), h0=1)
    n = 100_000
    still = 0
    for _ in range(n):
        traj = tasep_ct_run(base, 1.0, rng)
        still += traj.final.height_at(0) == 0
    p = math.exp(-1)
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(still / n - p) <= 3 * sigma


def test_ct_run_records_event_times():
    rng = np.random.default_rng(11)
    h = make_initial("wedge", (-4, 4))
    traj = tasep_ct_run(h, 2.0, rng, record="events")
    times = np.array(traj.times)
    assert times[0] == 0.0 and times[-1] == 2.0
    assert np.all(np.diff(times) >= 0)
    # every recorded profile admissible
    for prof in traj.profiles:
        assert np.all(np.abs(np.diff(prof.heights())) == 1)


def test_ct_run_negative_time_rejected():
    with pytest.raises(InvalidParameterError):
        tasep_ct_run(make_initial("wedge", (-2, 2)), -1.0,
                     np.random.default_rng(0))


def test_particle_positions_step_ic():
    h = make_initial("wedge", (-3, 5))
    np.testing.assert_array_equal(particle_positions(h), [-1, -2, -3])


def test_flat_growth_is_linear_in_time():
    # mean height at the origin grows ~ linearly: doubling t roughly doubles
    # the mean (ratio clearly above 1.6 for the window 8 -> 16)
    rng = np.random.default_rng(5)
    means = []
    for t in (8.0, 16.0):
        acc = 0.0
        reps = 150
        for _ in range(reps):
            h = make_initial("flat", (-64, 64))
            traj = tasep_ct_run(h, t, rng)
            acc += traj.final.height_at(0)
        means.append(acc / reps)
    assert means[1] / means[0] > 1.6
