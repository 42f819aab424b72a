"""TASEP height dynamics: parallel, sequential and continuous-time updates.

All three variants act on the same representation: a height profile grows by
+2 at a local minimum, equivalently a particle (down-step) swaps with the
hole (up-step) to its right.  Randomness is drawn from a single
``numpy.random.Generator`` in a documented order so runs are reproducible
from (seed, parameters) alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np

from ..errors import InvalidParameterError
from .heights import HeightFunction


def _check_q(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise InvalidParameterError(f"q must lie in [0, 1], got {q}")
    return q


def tasep_parallel_step(h: HeightFunction, q: float,
                        rng: np.random.Generator) -> HeightFunction:
    """One parallel update: every local minimum is raised by 2 w.p. 1-q.

    Draw order: one uniform per local minimum, minima enumerated left to
    right.  q=0 is deterministic growth, q=1 freezes the profile.
    """
    q = _check_q(q)
    minima = h.local_minima()
    if minima.size == 0:
        out = h.copy()
        out.time = h.time + 1
        return out
    u = rng.random(minima.size)
    out = h.raise_at(minima[u < 1.0 - q])
    out.time = h.time + 1
    return out


def _sequential_step(h: HeightFunction, q: float,
                     rng: np.random.Generator) -> HeightFunction:
    """One sequential update sweeping particles right to left.

    A particle at site x (increment -1) with a hole at x+1 jumps with
    probability 1-q.  Because the sweep runs right to left, a particle whose
    right neighbour vacated earlier in the same sweep may jump too — this is
    what distinguishes the sequential from the parallel rule.  One uniform is
    drawn per mobile particle, in sweep order.
    """
    inc = h.increments.copy()
    n = inc.size
    if h.boundary == "periodic":
        # sweep from the rightmost increment; the wrap pair (n-1, 0) is
        # handled like any other adjacent pair
        ks = range(n - 1, -1, -1)
        for k in ks:
            knext = (k + 1) % n
            if inc[k] == -1 and inc[knext] == 1:
                if rng.random() < 1.0 - q:
                    inc[k] = 1
                    inc[knext] = -1
    else:
        for k in range(n - 2, -1, -1):
            if inc[k] == -1 and inc[k + 1] == 1:
                if rng.random() < 1.0 - q:
                    inc[k] = 1
                    inc[k + 1] = -1
    out = h.copy()
    out.increments = inc
    out.time = h.time + 1
    return out


def tasep_discrete_run(h0: HeightFunction, q: float, steps: int,
                       update: Literal["parallel", "sequential"],
                       rng: np.random.Generator) -> HeightFunction:
    """Apply `steps` discrete updates of the chosen kind."""
    q = _check_q(q)
    if steps < 0:
        raise InvalidParameterError("steps must be >= 0")
    if update not in ("parallel", "sequential"):
        raise InvalidParameterError(f"unknown update rule {update!r}")
    h = h0.copy()
    for _ in range(int(steps)):
        if update == "parallel":
            h = tasep_parallel_step(h, q, rng)
        else:
            h = _sequential_step(h, q, rng)
    return h


@dataclass
class Trajectory:
    """Event-time snapshots of a continuous-time run.

    ``times[k]`` is the time stamp of ``profiles[k]``; the first entry is the
    initial condition, the last one the state at ``t_end``.
    """

    times: List[float] = field(default_factory=list)
    profiles: List[HeightFunction] = field(default_factory=list)

    def append(self, t: float, h: HeightFunction) -> None:
        self.times.append(float(t))
        self.profiles.append(h)

    @property
    def final(self) -> HeightFunction:
        return self.profiles[-1]

    def __len__(self) -> int:
        return len(self.profiles)


def tasep_ct_run(h0: HeightFunction, t_end: float, rng: np.random.Generator,
                 record: Literal["final", "events"] = "final") -> Trajectory:
    """Continuous-time TASEP: each local minimum fires at rate 1.

    Implemented as a Gillespie chain — with k minima the next event comes
    after an Exp(k) waiting time and hits a uniformly chosen minimum, which
    by memorylessness is equivalent to independent unit-rate clocks that are
    reset whenever the local geometry changes.  Draw order per event: one
    exponential, then one integer index.

    record="events" stores a snapshot after every jump; "final" keeps just
    the initial and final profiles.
    """
    t_end = float(t_end)
    if t_end < 0.0:
        raise InvalidParameterError("t_end must be >= 0")
    traj = Trajectory()
    h = h0.copy()
    traj.append(h.time, h.copy())
    t = float(h.time)
    horizon = t + t_end
    while True:
        minima = h.local_minima()
        if minima.size == 0:
            break
        t += rng.exponential(1.0 / minima.size)
        if t > horizon:
            break
        h = h.raise_at([minima[rng.integers(minima.size)]])
        h.time = t
        if record == "events":
            traj.append(t, h.copy())
    h = h.copy()
    h.time = horizon
    traj.append(horizon, h)
    return traj


def particle_positions(h: HeightFunction) -> np.ndarray:
    """Particle positions encoded by the profile, rightmost first.

    A particle sits at site x when h(x+1) - h(x) = -1, so the wedge profile
    h(x) = |x| on [-N, ...] carries particles at -1, -2, ..., -N, i.e. the
    step initial condition x_j(0) = -j with x_1 the rightmost.
    """
    sites = h.origin + np.nonzero(h.increments == -1)[0]
    return sites[::-1].copy()
