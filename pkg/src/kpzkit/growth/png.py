"""Polynuclear growth: droplet, flat window, and the multi-line extension.

The dynamics is deterministic transport of unit steps at speed ±1 with pair
annihilation, driven by a finite set of nucleation events.  Everything here
wraps the event-driven kernel in ``kpzkit._kernels``; heights are read off
the surviving step list, with the convention that a plateau contains both of
its endpoints (up-steps at p <= x and down-steps at p < x contribute to
h(x)).

Sampling regions.  A nucleation set optionally carries a region descriptor
declaring where events were (or could have been) sampled.  A height query at
(x, t) is answerable exactly iff the backward light cone
{(x', s): |x' - x| <= t - s} intersected with the model's nucleation support
lies inside the declared region; otherwise the query raises
``OutOfWindowError``.  Event sets without a region (hand-built
configurations) are taken as complete and every query is allowed.

For the droplet the nucleation support is the forward cone |x| <= s.  A
droplet region with query halfwidth 0 is exactly the rotated square
{|x| <= s, |x| <= t - s} — sufficient for the height at the origin, with
Poisson(2) mean count t² and void probability e^{-t²}.  Off-origin queries
up to |x| <= halfwidth enlarge the region to {|x| <= min(s, halfwidth+t-s)}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .. import _kernels
from ..errors import InvalidParameterError, OutOfWindowError

_EPS = 1e-12


@dataclass(frozen=True)
class DropletRegion:
    """Droplet sampling region {0 <= s <= t, |x| <= min(s, halfwidth + t - s)}.

    Queries (x', t') are covered iff t' <= t and |x'| + t' <= halfwidth + t.
    halfwidth >= t degenerates to the full forward cone {|x| <= s <= t}.
    """

    t: float
    halfwidth: float = 0.0

    def area(self) -> float:
        t, w = self.t, min(self.halfwidth, self.t)
        a = 0.5 * (w + t)            # crossover time s = (w+t)/2
        return a * a + (t - a) * (2.0 * w + t - a)

    def contains(self, x: np.ndarray, s: np.ndarray) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        s = np.asarray(s, dtype=float)
        return ((s >= -_EPS) & (s <= self.t + _EPS)
                & (ax <= s + _EPS)
                & (ax <= self.halfwidth + self.t - s + _EPS))

    def covers_query(self, x: float, t: float) -> bool:
        return (t <= self.t + _EPS
                and abs(x) + t <= self.halfwidth + self.t + _EPS)


@dataclass(frozen=True)
class FlatRegion:
    """Flat-geometry sampling box [xmin, xmax] x [0, t]."""

    t: float
    xmin: float
    xmax: float

    def contains(self, x: np.ndarray, s: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        return ((s >= -_EPS) & (s <= self.t + _EPS)
                & (x >= self.xmin - _EPS) & (x <= self.xmax + _EPS))

    def covers_query(self, x: float, t: float) -> bool:
        return (t <= self.t + _EPS and x - t >= self.xmin - _EPS
                and x + t <= self.xmax + _EPS)


Region = Union[DropletRegion, FlatRegion]


@dataclass
class NucleationSet:
    """Space-time nucleation events (x_i, s_i) with sampling metadata.

    ``region=None`` marks a hand-built, complete configuration.  Events are
    kept sorted lexicographically by (s, x), which is the order the transport
    kernel consumes them in.
    """

    x: np.ndarray
    s: np.ndarray
    intensity: float = 2.0
    region: Optional[Region] = None

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64).ravel()
        s = np.asarray(self.s, dtype=np.float64).ravel()
        if x.shape != s.shape:
            raise InvalidParameterError("x and s must have equal length")
        if x.size and np.any(s < 0):
            raise InvalidParameterError("nucleation times must be >= 0")
        order = np.lexsort((x, s))
        self.x, self.s = x[order], s[order]
        if self.region is not None and x.size:
            if not bool(np.all(self.region.contains(self.x, self.s))):
                raise InvalidParameterError(
                    "events violate the declared region")

    def __len__(self) -> int:
        return self.x.size


@dataclass
class PngState:
    """Step configuration of one PNG line at a fixed time.

    ``baseline`` is the height left of every step; ``steps`` is the sorted
    list of (position, orientation) with orientation +1 for an up-step and
    -1 for a down-step.  Heights are integer everywhere by construction.
    """

    baseline: int
    steps: List[Tuple[float, int]]
    time: float

    def positions(self) -> np.ndarray:
        return np.array([p for p, _ in self.steps], dtype=float)

    def height_at(self, x: float) -> int:
        h = self.baseline
        for p, v in self.steps:
            if (v == 1 and p <= x) or (v == -1 and p < x):
                h += v
        return h

    def heights(self, xs: Sequence[float]) -> np.ndarray:
        return np.array([self.height_at(x) for x in xs], dtype=np.int64)


def _evolved_state(events: NucleationSet, t: float,
                   baseline: int = 0) -> Tuple[PngState, np.ndarray,
                                               np.ndarray]:
    """Run the transport kernel up to time t; also return annihilations."""
    keep = events.s <= t
    step_x, step_v, ann_x, ann_t = _kernels.png_evolve_steps(
        events.x[keep], events.s[keep], float(t))
    state = PngState(baseline,
                     [(float(p), int(v)) for p, v in zip(step_x, step_v)],
                     float(t))
    return state, ann_x, ann_t


def _heights_from_steps(step_x: np.ndarray, step_v: np.ndarray,
                        xs: np.ndarray) -> np.ndarray:
    """Vectorized plateau-inclusive height read-off at query positions."""
    out = np.zeros(xs.shape, dtype=np.int64)
    if step_x.size:
        up = step_v == 1
        # up-steps: count p <= x ; down-steps: count p < x
        out += np.searchsorted(step_x[up], xs, side="right")
        out -= np.searchsorted(step_x[~up], xs, side="left")
    return out


def png_evolve(events: NucleationSet, t: float,
               xs: Sequence[float]) -> np.ndarray:
    """Heights h(x, t) of the PNG interface driven by the given events.

    Nucleations after time t are ignored (they have not happened yet).  If
    the event set declares a sampling region, every query must have its
    backward cone covered, else ``OutOfWindowError``.
    """
    t = float(t)
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    xs = np.asarray(xs, dtype=np.float64).ravel()
    if events.region is not None:
        for x in xs:
            if not events.region.covers_query(float(x), t):
                raise OutOfWindowError(
                    f"query ({x}, {t}) is outside the simulated light cone")
    state, _, _ = _evolved_state(events, t)
    step_x = state.positions()
    step_v = np.array([v for _, v in state.steps], dtype=np.int8)
    return _heights_from_steps(step_x, step_v, xs)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def sample_droplet_events(t: float, rng: np.random.Generator,
                          halfwidth: float = 0.0) -> NucleationSet:
    """Poisson(2) nucleations on the droplet region with given halfwidth.

    halfwidth=0 samples in rotated coordinates u = s+x, v = s-x, where the
    region is the square [0, t]² and intensity 2 becomes intensity 1 — the
    number of events is Poisson(t²).  Wider regions are sampled by rejection
    from the bounding box.  Draw order: count, then all x (or u), then all
    s (or v).
    """
    t = float(t)
    if t <= 0:
        raise InvalidParameterError("t must be > 0")
    region = DropletRegion(t, float(halfwidth))
    if region.halfwidth <= 0.0:
        n = rng.poisson(t * t)
        u = rng.uniform(0.0, t, n)
        v = rng.uniform(0.0, t, n)
        return NucleationSet(0.5 * (u - v), 0.5 * (u + v), 2.0, region)
    b = min(t, 0.5 * (min(region.halfwidth, t) + t))
    n = rng.poisson(2.0 * (2.0 * b) * t)
    x = rng.uniform(-b, b, n)
    s = rng.uniform(0.0, t, n)
    keep = region.contains(x, s)
    return NucleationSet(x[keep], s[keep], 2.0, region)


def png_droplet_sample(
    t: float, rng: np.random.Generator,
    xs: Optional[Sequence[float]] = None,
) -> Tuple[NucleationSet, int, np.ndarray]:
    """One PNG droplet realization at time t.

    Returns (events, h(0, t), heights on the grid xs).  With xs=None the
    grid is just the origin and the sampling region is the minimal one (the
    rotated square); otherwise the region is widened so that every grid
    height is exact.
    """
    if xs is None:
        grid = np.zeros(1)
        halfwidth = 0.0
    else:
        grid = np.asarray(xs, dtype=np.float64).ravel()
        halfwidth = float(np.max(np.abs(grid))) if grid.size else 0.0
    events = sample_droplet_events(t, rng, halfwidth)
    heights = png_evolve(events, t, grid)
    h0 = heights[0] if xs is None else png_evolve(events, t, [0.0])[0]
    return events, int(h0), heights


def png_flat_sample(t: float, xs: Sequence[float], rng: np.random.Generator,
                    eps: float = 1e-9,
                    return_events: bool = False):
    """Flat-geometry PNG heights at positions xs and time t.

    Nucleations fill the box [min(xs)-t-eps, max(xs)+t+eps] x [0, t], which
    contains the backward cones of all queries, so the restriction to a
    finite window is exact.  Draw order: count, all x, all s.
    """
    t = float(t)
    if t <= 0:
        raise InvalidParameterError("t must be > 0")
    xs = np.asarray(xs, dtype=np.float64).ravel()
    if xs.size == 0:
        raise InvalidParameterError("xs must be nonempty")
    region = FlatRegion(t, float(xs.min() - t - eps), float(xs.max() + t + eps))
    n = rng.poisson(2.0 * (region.xmax - region.xmin) * t)
    ex = rng.uniform(region.xmin, region.xmax, n)
    es = rng.uniform(0.0, t, n)
    events = NucleationSet(ex, es, 2.0, region)
    heights = png_evolve(events, t, xs)
    if return_events:
        return heights, events
    return heights


def droplet_origin_heights(t: float, n: int,
                           rng: np.random.Generator) -> np.ndarray:
    """h(0, t) for n independent droplet replicas (batched kernel path).

    Sampling happens in rotated coordinates; h(0, t) is then the transport
    height of each replica's event set.  Draw order: all counts, then the
    concatenated u block, then the concatenated v block.
    """
    t = float(t)
    counts = rng.poisson(t * t, int(n))
    total = int(counts.sum())
    u = rng.uniform(0.0, t, total)
    v = rng.uniform(0.0, t, total)
    ex, es = 0.5 * (u - v), 0.5 * (u + v)
    ex, es, offsets = _pack_replicas(ex, es, counts)
    return _kernels.png_origin_height_batch(ex, es, offsets, t)


def flat_origin_heights(t: float, n: int,
                        rng: np.random.Generator) -> np.ndarray:
    """h(0, t) for n independent flat-geometry replicas (batched)."""
    t = float(t)
    eps = 1e-9
    lo, hi = -t - eps, t + eps
    counts = rng.poisson(2.0 * (hi - lo) * t, int(n))
    total = int(counts.sum())
    ex = rng.uniform(lo, hi, total)
    es = rng.uniform(0.0, t, total)
    ex, es, offsets = _pack_replicas(ex, es, counts)
    return _kernels.png_origin_height_batch(ex, es, offsets, t)


def _pack_replicas(ex: np.ndarray, es: np.ndarray, counts: np.ndarray):
    """Sort each replica's slice by (s, x) with one global lexsort."""
    offsets = np.zeros(counts.size + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    rep = np.repeat(np.arange(counts.size, dtype=np.int64), counts)
    order = np.lexsort((ex, es, rep))
    return ex[order], es[order], offsets


# ---------------------------------------------------------------------------
# multi-line extension
# ---------------------------------------------------------------------------

@dataclass
class LineEnsemble:
    """Non-crossing line family λ_0 > λ_-1 > ... built by the multi-line rules.

    ``lines[k]`` is the profile of line j = -k with baseline j; lines below
    ``j_min = -(len(lines)-1)`` never left their initial flat value j.
    Boundary pinning: every stored line satisfies λ_j(±t, t) = j because no
    surviving step can travel beyond |x| = t.
    """

    lines: List[PngState]
    time: float

    @property
    def j_min(self) -> int:
        return -(len(self.lines) - 1)

    def line(self, j: int) -> PngState:
        if j > 0:
            raise IndexError("lines are indexed j = 0, -1, -2, ...")
        if j <= self.j_min - 1:
            return PngState(j, [], self.time)
        return self.lines[-j]

    def height(self, j: int, x: float) -> int:
        if j <= self.j_min - 1:
            return j
        return self.lines[-j].height_at(x)


def png_multiline(events: NucleationSet, t: float) -> LineEnsemble:
    """Evolve the multi-line PNG ensemble driven by droplet events.

    Line 0 runs the ordinary dynamics; every annihilation on line j is
    copied instantaneously as a nucleation on line j-1.  Annihilations that
    occur at the same instant are handed down in position order (a
    convention; the kernel reports them sorted by (t, x)).  Recursion stops
    at the first line that receives no events, below which all lines are
    flat.  Termination is guaranteed: a line with n nucleations produces at
    most n-1 annihilations, so the event count drops on every level.
    """
    t = float(t)
    if t < 0:
        raise InvalidParameterError("t must be >= 0")
    lines: List[PngState] = []
    ex, es = events.x[events.s <= t], events.s[events.s <= t]
    j = 0
    while True:
        feed = NucleationSet(ex, es, events.intensity, None)
        state, ann_x, ann_t = _evolved_state(feed, t, baseline=j)
        lines.append(state)
        if ann_x.size == 0:
            break
        order = np.lexsort((ann_x, ann_t))
        ex, es = ann_x[order], ann_t[order]
        j -= 1
    return LineEnsemble(lines, t)
