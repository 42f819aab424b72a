"""Tiling documents: lozenge facets from interlaced arrays, dominoes from
shuffle states.

Lozenge side.  For each pair of consecutive levels (s, s+1), s = 0..N-1
(level 0 is empty), the counting profile
m_s(x) = #{i: x_i^{s+1} <= x} - #{i: x_i^s <= x} takes values in {0, 1} by
the interlacing, and the strip of columns between the two levels decomposes
into three facet classes: "riser" at every level-(s+1) particle site, "run"
where m_s = 1 and "flat" where m_s = 0.  Facets are drawn in sheared
(unit-square) coordinates — one facet per (column, strip) slot — with the
orientation carried by the class attribute; the packed initial array gives
the perfectly ordered picture (risers in one solid staircase block, flats
left of it, runs right of it) and a single particle jump changes only the
facets bordering that particle.

Domino side.  Shuffle states after t steps and order-t Aztec diamond
tilings are both counted by 2^{t(t+1)/2}, but no local level-by-level rule
can map one to the other (the two state spaces are non-isomorphic as
lattices), so the renderer pairs them through canonical rankings: the
z-array is ranked lexicographically by a level-interlacing DP, and the
tiling of equal rank is built by a transfer DP over the diamond's NW-SE
diagonals (every domino joins adjacent diagonals, cell a -> a+1 for a
horizontal domino, a -> a for a vertical one; horizontal branches are
explored first).  With this ordering the packed initial state maps to the
all-horizontal tiling and the maximal state to the all-vertical one.  The
transfer state space is exponential in the order — the renderer is for
display and test sizes, not asymptotics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidParameterError
from .interlace import AztecArray, InterlacedArray

_MAX_DOMINO_ORDER = 10

_SVG_COLORS = {
    "flat": "#dce8f5",
    "run": "#f5e3c3",
    "riser": "#c94f4f",
    "horizontal": "#4f77c9",
    "vertical": "#e0c34d",
}


@dataclass(frozen=True)
class Facet:
    """One tile: an orientation class, the unit cells covered, the polygon."""

    cls: str
    cells: Tuple[Tuple[int, int], ...]
    vertices: Tuple[Tuple[float, float], ...]


@dataclass
class TilingDocument:
    """A facet list plus the region it must tile, verified on construction.

    kind is "lozenge" or "domino"; region describes the target: a
    (window, levels) slab for lozenges, an (order,) diamond for dominoes.
    Construction checks exact cover: every region cell covered by exactly
    one facet and no facet sticking out.
    """

    kind: str
    facets: List[Facet]
    region: Dict

    def __post_init__(self) -> None:
        if self.kind not in ("lozenge", "domino"):
            raise InvalidParameterError(f"unknown tiling kind {self.kind!r}")
        target = self.region_cells()
        seen = set()
        for f in self.facets:
            for c in f.cells:
                if c in seen:
                    raise InvalidParameterError(f"cell {c} covered twice")
                if c not in target:
                    raise InvalidParameterError(f"cell {c} outside the region")
                seen.add(c)
        if seen != target:
            missing = sorted(target - seen)[:4]
            raise InvalidParameterError(f"region not covered, e.g. {missing}")

    def region_cells(self) -> set:
        if self.kind == "lozenge":
            lo, hi = self.region["window"]
            N = self.region["levels"]
            return {(x, s) for x in range(lo, hi) for s in range(N)}
        t = self.region["order"]
        return set(_aztec_cells(t))

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for f in self.facets:
            out[f.cls] = out.get(f.cls, 0) + 1
        return out

    def key(self) -> tuple:
        """Canonical hashable identity of the tiling (kind + facet slots)."""
        return (self.kind,
                tuple(sorted((f.cls, f.cells) for f in self.facets)))

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "region": self.region,
            "facets": [{"class": f.cls,
                        "cells": [list(c) for c in f.cells],
                        "vertices": [list(v) for v in f.vertices]}
                       for f in self.facets],
        })

    def to_svg(self, unit: float = 20.0) -> str:
        """SVG rendering: one polygon per facet, class per orientation."""
        verts = [v for f in self.facets for v in f.vertices]
        if not verts:
            return ('<svg xmlns="http://www.w3.org/2000/svg" '
                    'viewBox="0 0 1 1"/>')
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]
        pad = 0.5
        x0, y1 = min(xs) - pad, max(ys) + pad
        w = (max(xs) - min(xs) + 2 * pad) * unit
        h = (max(ys) - min(ys) + 2 * pad) * unit
        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="0 0 {w:.0f} {h:.0f}">',
            "<style>",
        ]
        for cls in sorted({f.cls for f in self.facets}):
            color = _SVG_COLORS.get(cls, "#cccccc")
            lines.append(
                f".{cls} {{ fill: {color}; stroke: #333; stroke-width: 1; }}")
        lines.append("</style>")
        # y axis flipped so larger levels draw upward
        for f in sorted(self.facets, key=lambda f: f.cells):
            pts = " ".join(f"{(vx - x0) * unit:.1f},{(y1 - vy) * unit:.1f}"
                           for vx, vy in f.vertices)
            lines.append(f'<polygon class="{f.cls}" points="{pts}"/>')
        lines.append("</svg>")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# lozenge facets from an interlaced array
# ---------------------------------------------------------------------------

def _lozenge_document(S: InterlacedArray,
                      window: Optional[Tuple[int, int]]) -> TilingDocument:
    S.validate()
    N = S.N
    allpos = np.concatenate(S.levels)
    if window is None:
        window = (int(allpos.min()) - 1, int(allpos.max()) + 2)
    lo, hi = int(window[0]), int(window[1])
    if lo >= hi:
        raise InvalidParameterError("window must be nonempty")
    facets = []
    for s in range(N):
        upper = set(S.levels[s].tolist())            # level s+1
        lower = S.levels[s - 1] if s >= 1 else np.empty(0, dtype=np.int64)
        xs = np.arange(lo, hi)
        m = (np.searchsorted(S.levels[s], xs, side="right")
             - np.searchsorted(lower, xs, side="right"))
        if np.any((m < 0) | (m > 1)):
            raise InvalidParameterError(
                f"levels {s} and {s + 1} do not interlace")
        for x, mx in zip(xs.tolist(), m.tolist()):
            if x in upper:
                cls = "riser"
            elif mx == 1:
                cls = "run"
            else:
                cls = "flat"
            facets.append(Facet(cls, ((x, s),),
                                ((x, s), (x + 1, s), (x + 1, s + 1),
                                 (x, s + 1))))
    return TilingDocument("lozenge", facets,
                          {"window": (lo, hi), "levels": N})


# ---------------------------------------------------------------------------
# domino facets from a shuffle state: the rank-pairing bijection
# ---------------------------------------------------------------------------

def _aztec_cells(t: int) -> List[Tuple[int, int]]:
    """Unit cells (a, b) of the order-t diamond: |a+1/2| + |b+1/2| <= t."""
    return [(a, b)
            for a in range(-t - 1, t + 1)
            for b in range(-t - 1, t + 1)
            if abs(a + 0.5) + abs(b + 0.5) <= t]


class _DominoCoder:
    """Rank (arrays) and unrank (tilings) DPs for one diamond order."""

    def __init__(self, t: int):
        self.t = t
        # NW-SE diagonals m = a+b+1 in [-t, t]; a-coordinates per diagonal
        self.avals = []
        for m in range(-t, t + 1):
            cells = [(a, m - 1 - a) for a in range(-t - 1, t + 1)
                     if abs(a + 0.5) + abs(m - 1 - a + 0.5) <= t]
            self.avals.append(tuple(sorted(a for a, _ in cells)))
        self._count_from = lru_cache(maxsize=None)(self._count_from_impl)
        self._count_below = lru_cache(maxsize=None)(self._count_below_impl)
        self._level_configs = lru_cache(maxsize=None)(self._level_configs_impl)

    # --- tiling side: transfer over diagonal interfaces ---

    def _matchings(self, sources, targets):
        """Injective a -> a+1 (horizontal) or a -> a (vertical) assignments,
        horizontal branch first, sources ascending."""
        sources = sorted(sources)
        tset = set(targets)
        out = []

        def rec(i, used, pairs):
            if i == len(sources):
                out.append((frozenset(used), tuple(pairs)))
                return
            a = sources[i]
            for tgt in (a + 1, a):
                if tgt in tset and tgt not in used:
                    used.add(tgt)
                    pairs.append((a, tgt))
                    rec(i + 1, used, pairs)
                    used.discard(tgt)
                    pairs.pop()

        rec(0, set(), [])
        return out

    def _count_from_impl(self, k, covered):
        if k == len(self.avals) - 1:
            return 1 if covered == frozenset(self.avals[k]) else 0
        sources = [a for a in self.avals[k] if a not in covered]
        return sum(self._count_from(k + 1, nxt)
                   for nxt, _ in self._matchings(sources, self.avals[k + 1]))

    def tiling_count(self) -> int:
        return self._count_from(0, frozenset())

    def unrank_tiling(self, r: int) -> List[Tuple[str, Tuple[int, int]]]:
        """The r-th tiling in transfer order, as (class, root cell) pairs."""
        if not 0 <= r < self.tiling_count():
            raise InvalidParameterError("tiling rank out of range")
        dominoes = []
        covered = frozenset()
        for k in range(len(self.avals) - 1):
            m = -self.t + k
            sources = [a for a in self.avals[k] if a not in covered]
            for nxt, pairs in self._matchings(sources, self.avals[k + 1]):
                c = self._count_from(k + 1, nxt)
                if r < c:
                    for a, tgt in pairs:
                        b = m - 1 - a
                        if tgt == a + 1:
                            dominoes.append(("horizontal", (a, b)))
                        else:
                            dominoes.append(("vertical", (a, b)))
                    covered = nxt
                    break
                r -= c
        return dominoes

    # --- array side: lexicographic interlacing DP ---

    def _level_configs_impl(self, n, prev):
        """Level-n configurations given level n-1, lexicographically
        ascending; positions obey the box i-1 <= z_i <= i-1 + (t-n+1) and
        the weak interlacing against prev."""
        t = self.t
        out = []

        def rec(i, cur):
            if i > n:
                out.append(tuple(cur))
                return
            lo = i - 1
            if cur:
                lo = max(lo, cur[-1])
            if i >= 2:
                lo = max(lo, prev[i - 2])
            hi = i - 1 + (t - n + 1)
            if i <= n - 1:
                hi = min(hi, prev[i - 1])
            for z in range(lo, hi + 1):
                cur.append(z)
                rec(i + 1, cur)
                cur.pop()

        rec(1, [])
        return tuple(out)

    def _count_below_impl(self, n, prev):
        if n > self.t:
            return 1
        return sum(self._count_below(n + 1, c)
                   for c in self._level_configs(n, prev))

    def array_count(self) -> int:
        return self._count_below(1, ())

    def rank_array(self, levels: Sequence[Sequence[int]]) -> int:
        r = 0
        prev = ()
        for n in range(1, self.t + 1):
            target = tuple(int(z) for z in levels[n - 1])
            cfgs = self._level_configs(n, prev)
            if target not in cfgs:
                raise InvalidParameterError(
                    f"level {n} = {list(target)} is not an order-{self.t} "
                    "shuffle state")
            for cfg in cfgs:
                if cfg == target:
                    break
                r += self._count_below(n + 1, cfg)
            prev = target
        return r


@lru_cache(maxsize=8)
def _coder(t: int) -> _DominoCoder:
    return _DominoCoder(t)


def _domino_document(Z: AztecArray) -> TilingDocument:
    Z.validate()
    t = Z.step
    if t > Z.N:
        raise InvalidParameterError(
            f"after {t} steps an order-{t} diamond needs {t} tracked levels, "
            f"got N={Z.N}; rerun the shuffle with N >= steps")
    if t > _MAX_DOMINO_ORDER:
        raise InvalidParameterError(
            f"domino rendering is exponential in the order; order {t} "
            f"exceeds the supported maximum {_MAX_DOMINO_ORDER}")
    if t == 0:
        return TilingDocument("domino", [], {"order": 0})
    coder = _coder(t)
    dominoes = coder.unrank_tiling(coder.rank_array(Z.levels[:t]))
    facets = []
    for cls, (a, b) in dominoes:
        if cls == "horizontal":
            cells = ((a, b), (a + 1, b))
            verts = ((a, b), (a + 2, b), (a + 2, b + 1), (a, b + 1))
        else:
            cells = ((a, b), (a, b + 1))
            verts = ((a, b), (a + 1, b), (a + 1, b + 2), (a, b + 2))
        facets.append(Facet(cls, cells, tuple((float(u), float(v))
                                              for u, v in verts)))
    return TilingDocument("domino", facets, {"order": t})


def render_tiling(array: Union[InterlacedArray, AztecArray],
                  window: Optional[Tuple[int, int]] = None) -> TilingDocument:
    """Tiling document of a particle array.

    An InterlacedArray renders as a lozenge slab over ``window`` (default:
    the particle span plus one column of margin on each side); an
    AztecArray renders as the order-``step`` diamond tiling paired to the
    state by the rank bijection (``window`` does not apply).
    """
    if isinstance(array, InterlacedArray):
        return _lozenge_document(array, window)
    if isinstance(array, AztecArray):
        if window is not None:
            raise InvalidParameterError(
                "window applies to lozenge renderings only")
        return _domino_document(array)
    raise InvalidParameterError(
        f"cannot render a {type(array).__name__} as a tiling")
