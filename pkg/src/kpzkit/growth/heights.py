"""Admissible height functions on a finite lattice window.

A profile is stored as a base height at the left edge of the window plus a
vector of ±1 increments, so admissibility (|h(x+1)-h(x)| = 1) is structural
rather than something we have to re-check after every update.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Optional, Union

import numpy as np

from ..errors import InvalidParameterError

Boundary = Literal["frozen", "periodic"]


@dataclass
class HeightFunction:
    """Height profile h on the integer window [origin, origin + len(increments)].

    ``increments[k] = h(origin + k + 1) - h(origin + k)`` and each entry is ±1.
    ``h0`` is the height at ``origin``.  ``boundary`` records how updates treat
    the window edges: "frozen" pins the edge heights, "periodic" wraps the
    increment sequence (which then must sum to zero).
    """

    origin: int
    increments: np.ndarray
    time: float = 0.0
    boundary: Boundary = "frozen"
    h0: int = 0

    def __post_init__(self) -> None:
        inc = np.asarray(self.increments, dtype=np.int8)
        if inc.ndim != 1 or inc.size == 0:
            raise ValueError("increments must be a nonempty 1-d sequence")
        if not np.all(np.abs(inc) == 1):
            raise ValueError("profile not admissible: increments must be +-1")
        if self.boundary == "periodic" and int(inc.sum()) != 0:
            raise ValueError("periodic profile needs zero net slope")
        self.increments = inc

    # -- basic geometry -------------------------------------------------

    @property
    def window(self) -> tuple[int, int]:
        """Inclusive site range [left, right] on which h is defined."""
        return self.origin, self.origin + self.increments.size

    def heights(self) -> np.ndarray:
        """All heights h(origin), ..., h(origin + n) as int64."""
        out = np.empty(self.increments.size + 1, dtype=np.int64)
        out[0] = self.h0
        np.cumsum(self.increments, out=out[1:])
        out[1:] += self.h0
        return out

    def height_at(self, x: int) -> int:
        lo, hi = self.window
        if not lo <= x <= hi:
            raise IndexError(f"site {x} outside window [{lo}, {hi}]")
        return self.h0 + int(self.increments[: x - lo].sum())

    def local_minima(self) -> np.ndarray:
        """Sites x with h(x-1) = h(x+1) = h(x)+1, i.e. a (-1, +1) increment pair.

        For a periodic boundary the pair is read cyclically, so the left edge
        site can be a minimum too; for a frozen boundary edges never move.
        """
        inc = self.increments
        if self.boundary == "periodic":
            down = inc == -1
            up = np.roll(inc, -1) == 1
            idx = np.nonzero(down & up)[0]
            return self.origin + ((idx + 1) % inc.size)
        idx = np.nonzero((inc[:-1] == -1) & (inc[1:] == 1))[0]
        return self.origin + idx + 1

    def raise_at(self, sites: Iterable[int]) -> "HeightFunction":
        """Return a copy with h(x) -> h(x) + 2 at each given local minimum."""
        inc = self.increments.copy()
        n = inc.size
        h0 = self.h0
        for x in sites:
            k = x - self.origin
            if self.boundary == "periodic":
                k %= n
                kprev = (k - 1) % n
                if k == 0:
                    h0 += 2   # the raised site is the stored base height
            else:
                kprev = k - 1
                if kprev < 0 or k >= n:
                    raise IndexError(f"cannot raise boundary site {x}")
            if inc[kprev] != -1 or inc[k] != 1:
                raise ValueError(f"site {x} is not a local minimum")
            inc[kprev] = 1
            inc[k] = -1
        return replace(self, increments=inc, h0=h0)

    def copy(self) -> "HeightFunction":
        return replace(self, increments=self.increments.copy())


@dataclass(frozen=True)
class InitialCondition:
    """Descriptor for the standard initial profiles.

    kind:
      * "flat"      — alternating 0,1,0,1 (zero slope),
      * "wedge"     — |x| around the origin (curved / droplet seed),
      * "bernoulli" — i.i.d. increments with mean slope ``m`` in [-1, 1].
    """

    kind: Literal["flat", "wedge", "bernoulli"]
    m: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("flat", "wedge", "bernoulli"):
            raise InvalidParameterError(f"unknown initial condition {self.kind!r}")
        if self.kind == "bernoulli" and not -1.0 <= self.m <= 1.0:
            raise InvalidParameterError("bernoulli slope must lie in [-1, 1]")


def make_initial(
    kind: Union[InitialCondition, str],
    window: tuple[int, int],
    rng: Optional[np.random.Generator] = None,
    *,
    boundary: Boundary = "frozen",
) -> HeightFunction:
    """Build an admissible initial profile on [window[0], window[1]].

    ``window`` is the inclusive site range; it must contain at least two
    sites.  Flat profiles satisfy h(x) = 0 for even x and 1 for odd x; the
    wedge is h(x) = |x| (window must straddle 0); bernoulli(m) draws
    increments +1 with probability (1+m)/2.
    """
    if isinstance(kind, str):
        kind = InitialCondition(kind)
    lo, hi = int(window[0]), int(window[1])
    n = hi - lo
    if n < 1:
        raise InvalidParameterError("window must contain at least two sites")

    if kind.kind == "flat":
        # h(x) = x mod 2: increment +1 leaving an even site, -1 leaving odd.
        sites = np.arange(lo, hi)
        inc = np.where(sites % 2 == 0, 1, -1).astype(np.int8)
        return HeightFunction(lo, inc, boundary=boundary, h0=abs(lo) % 2)

    if kind.kind == "wedge":
        if not lo < 0 < hi:
            raise InvalidParameterError("wedge window must contain the origin strictly")
        sites = np.arange(lo, hi)
        inc = np.where(sites >= 0, 1, -1).astype(np.int8)
        return HeightFunction(lo, inc, boundary=boundary, h0=-lo)

    # bernoulli slope m: independent ±1 increments, P(+1) = (1+m)/2
    if rng is None:
        raise InvalidParameterError("bernoulli initial condition needs an rng")
    p = 0.5 * (1.0 + kind.m)
    inc = np.where(rng.random(n) < p, 1, -1).astype(np.int8)
    return HeightFunction(lo, inc, boundary=boundary, h0=0)
