"""Directed last passage percolation and its slicing maps.

G(n, m) is the maximal total weight collected by an up-right lattice path
from (1, 1) to (n, m).  Exact couplings identify G-level sets with PNG
heights (t = i+j-1, x = i-j), continuous-time TASEP arrival times
(exponential weights) and the discrete-time updates (geometric weights:
plain for the sequential rule, shifted by +1 for the parallel rule).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import InvalidParameterError, OutOfWindowError

_LAWS = ("geometric", "geometric+1", "exponential")


@dataclass
class WeightGrid:
    """I.i.d. weight field ω(i, j) on a rectangular index window.

    ``weights[a, b]`` holds ω(origin[0] + a, origin[1] + b); the default
    origin (1, 1) covers the standard quadrant problem, other origins carry
    the slab windows used by the point-to-line problem.
    """

    weights: np.ndarray
    law: str
    q: Optional[float] = None
    origin: Tuple[int, int] = (1, 1)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise InvalidParameterError("weights must be a 2-d array")
        if np.any(w < 0):
            raise InvalidParameterError("weights must be nonnegative")
        if self.law not in _LAWS:
            raise InvalidParameterError(f"unknown law {self.law!r}")
        if self.law.startswith("geometric") and np.any(w != np.floor(w)):
            raise InvalidParameterError("geometric weights must be integers")
        self.weights = w

    def window(self) -> Tuple[int, int, int, int]:
        """(i_lo, i_hi, j_lo, j_hi), inclusive."""
        i0, j0 = self.origin
        return (i0, i0 + self.weights.shape[0] - 1,
                j0, j0 + self.weights.shape[1] - 1)

    def at(self, i: int, j: int) -> float:
        i0, j0 = self.origin
        return float(self.weights[i - i0, j - j0])


@dataclass
class PathResult:
    value: float
    path: List[Tuple[int, int]]
    endpoint: Tuple[int, int]


def sample_weights(law: str, dims: Tuple[int, int], rng: np.random.Generator,
                   q: Optional[float] = None,
                   origin: Tuple[int, int] = (1, 1)) -> WeightGrid:
    """I.i.d. weight grid of the requested law.

    geometric(q): P(ω = k) = (1-q) q^k for k >= 0 (mean q/(1-q));
    geometric+1 shifts every weight up by one; exponential has mean 1.
    """
    n, m = int(dims[0]), int(dims[1])
    if n < 1 or m < 1:
        raise InvalidParameterError("dims must be positive")
    if law not in _LAWS:
        raise InvalidParameterError(f"unknown law {law!r}")
    if law == "exponential":
        w = rng.exponential(1.0, size=(n, m))
        return WeightGrid(w, law, None, origin)
    if q is None or not 0.0 <= q < 1.0:
        raise InvalidParameterError("geometric laws need q in [0, 1)")
    # numpy's geometric counts trials to first success; subtracting 1 gives
    # the number of failures, i.e. P(k) = (1-q) q^k
    w = (rng.geometric(1.0 - q, size=(n, m)) - 1).astype(np.float64)
    if law == "geometric+1":
        w += 1.0
    return WeightGrid(w, law, float(q), origin)


def lpp_grid(w: WeightGrid) -> np.ndarray:
    """Full DP table G over the grid, G = ω + max(G_up, G_left), edges open.

    Entry [a, b] is G(origin + (a, b)); the maximum over paths entering from
    outside the window is taken as 0, which is the quadrant convention when
    origin = (1, 1).
    """
    return _kernels.lpp_fill(w.weights)


def lpp_point_to_point(w: WeightGrid, n: int, m: int) -> PathResult:
    """G(n, m) and one maximizing up-right path from (1, 1).

    Ties during backtracking prefer the (0,1) step, i.e. the predecessor in
    the same row, which makes reported paths deterministic.
    """
    i0, j0 = w.origin
    if w.origin != (1, 1):
        raise InvalidParameterError(
            "point-to-point LPP expects a (1,1)-based quadrant grid")
    i_lo, i_hi, j_lo, j_hi = w.window()
    if not (i_lo <= n <= i_hi and j_lo <= m <= j_hi):
        raise OutOfWindowError(f"endpoint ({n}, {m}) outside the grid")
    G = _kernels.lpp_fill(w.weights[:n, :m])
    path = [(n, m)]
    i, j = n, m
    while (i, j) != (1, 1):
        if i == 1:
            j -= 1
        elif j == 1:
            i -= 1
        else:
            # prefer the (0,1) step into (i, j) on ties
            if G[i - 1 - 1, j - 1] > G[i - 1, j - 2]:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return PathResult(float(G[n - 1, m - 1]), path, (n, m))


def lpp_point_to_line(w: WeightGrid, n: int, m: int) -> PathResult:
    """Max weight over up-right paths started anywhere on the line i+j = 2.

    The weight window must cover the full backward cone
    {(i, j): i <= n, j <= m, i + j >= 2} of the endpoint; otherwise the
    problem is not exactly solvable and an out-of-window error is raised.
    """
    i_lo, i_hi, j_lo, j_hi = w.window()
    if not (i_hi >= n and j_hi >= m and i_lo <= min(2 - m, n)
            and j_lo <= min(2 - n, m)):
        raise OutOfWindowError(
            "window must cover the backward cone {i<=n, j<=m, i+j>=2}")
    ni = n - i_lo + 1
    nj = m - j_lo + 1
    sub = w.weights[:ni, :nj]
    G = np.full((ni, nj), -np.inf)
    for a in range(ni):
        for b in range(nj):
            i, j = i_lo + a, j_lo + b
            if i + j < 2:
                continue
            if i + j == 2:
                G[a, b] = sub[a, b]
                continue
            best = -np.inf
            if a > 0 and G[a - 1, b] > best:
                best = G[a - 1, b]
            if b > 0 and G[a, b - 1] > best:
                best = G[a, b - 1]
            G[a, b] = sub[a, b] + best
    a, b = n - i_lo, m - j_lo
    # backtrack, preferring the (0,1) step on ties
    path = [(n, m)]
    while i_lo + a + j_lo + b > 2:
        up = G[a - 1, b] if a > 0 else -np.inf
        left = G[a, b - 1] if b > 0 else -np.inf
        if up > left:
            a -= 1
        else:
            b -= 1
        path.append((i_lo + a, j_lo + b))
    path.reverse()
    return PathResult(float(G[n - i_lo, m - j_lo]), path, (n, m))


def png_slice(G: np.ndarray, x: int, t: int) -> float:
    """Read h(x, t) of the discrete-time PNG droplet off a G table.

    The slicing is t = i+j-1, x = i-j, so x and t-1 must have equal parity
    and both i, j must be >= 1.
    """
    x, t = int(x), int(t)
    if (x - (t - 1)) % 2 != 0:
        raise InvalidParameterError(
            f"parity violation: x={x} and t-1={t-1} must have equal parity")
    i = (t + 1 + x) // 2
    j = (t + 1 - x) // 2
    if i < 1 or j < 1:
        raise InvalidParameterError(f"({x}, {t}) maps to ({i}, {j}) off-grid")
    if i > G.shape[0] or j > G.shape[1]:
        raise OutOfWindowError(f"slice needs G({i}, {j}) beyond the table")
    return float(G[i - 1, j - 1])


def tasep_slice(w: WeightGrid, tau: float, n: int, m: int) -> bool:
    """Coupling event {G(n, m) <= tau} = {x_m(tau) >= n - m}.

    Under the exponential-weight coupling, G(n, m) is the time at which
    particle m (starting from -m in the step initial condition) arrives at
    site n - m, so the indicator below has exactly the law of the
    particle-position event on the right-hand side.
    """
    if w.law != "exponential":
        raise InvalidParameterError(
            "the continuous-time slicing needs exponential weights")
    G = _kernels.lpp_fill(w.weights[:n, :m])
    return bool(G[n - 1, m - 1] <= tau)


def tasep_positions_from_grid(G: np.ndarray, tau: float,
                              row_shift: float = 0.0) -> np.ndarray:
    """All particle positions x_m(tau), m = 1..M, from one filled G table.

    Column m of G is nondecreasing in n, so the arrival count
    n*(m) = #{n : G(n, m) + row_shift*n <= tau} gives x_m(tau) = n*(m) - m
    (n* = 0 means the particle is still at its initial site -m).

    row_shift encodes the update rule of the coupled discrete TASEP:
    0 for exponential weights (continuous time) and for geometric+1 weights
    (parallel update); 1 for plain geometric weights (sequential update),
    whose coupling reads {x_m(tau) >= n-m} = {G(n,m) <= tau - n}.
    """
    if row_shift:
        G = G + row_shift * np.arange(1, G.shape[0] + 1)[:, None]
    counts = (G <= tau).sum(axis=0)
    if np.any(counts == G.shape[0]):
        raise OutOfWindowError(
            "G table too short: some particle may have outrun the grid")
    return counts - np.arange(1, G.shape[1] + 1)


def lis_patience(perm) -> int:
    """Longest increasing subsequence of a permutation, via patience sorting."""
    p = np.asarray(perm, dtype=np.int64).ravel()
    if p.size == 0 or np.any(np.sort(p) != np.arange(1, p.size + 1)):
        raise InvalidParameterError("input is not a permutation of 1..n")
    return int(_kernels.lis_length(p.astype(np.float64)))
