"""Interlaced 2+1-dimensional particle arrays and their 1+1-d projections.

Two triangular particle systems live here.  The continuous-time array
{x_i^n, 1 <= i <= n <= N} obeys strict/weak interlacing
x_i^{n+1} < x_i^n <= x_{i+1}^{n+1}; each particle carries a unit-rate clock,
jumps are suppressed when they would collide with level n-1 and drag the
(i+l, n+l) diagonal along when needed, so the edge {x_1^n} is exactly the
continuous-time TASEP with step initial data.  The discrete-time array
{z_i^n} obeys weak interlacing z_i^{n+1} <= z_i^n <= z_{i+1}^{n+1}, level n
is frozen before step n, and unforced, unblocked particles jump with
probability q per step; this is the domino-shuffling growth of an Aztec
diamond (q = 1/2 gives the uniform tiling).

Within a shuffle step, levels are resolved in increasing n and both the
blocking and the forcing tests read the already-updated level n-1; this is
the unique order for which the order-2 and order-3 state distributions at
q = 1/2 come out uniform (checked exactly in the tests).  One consequence,
pinned by an enumeration test: the edge projection x_1^n = z_1^n - n of this
dynamics is a *sequential*-update TASEP (each particle sees its already
updated right neighbour) with the level-n freeze, not the parallel-update
chain; only the first particle x_1^1, which is never blocked or forced, has
the parallel Binomial(t, q) marginal.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import List, Sequence, Union

import numpy as np

from .errors import InvalidParameterError


def _as_levels(levels: Sequence[Sequence[int]]) -> List[np.ndarray]:
    out = []
    for n, row in enumerate(levels, start=1):
        arr = np.asarray(row, dtype=np.int64)
        if arr.ndim != 1 or arr.size != n:
            raise InvalidParameterError(
                f"level {n} must hold exactly {n} positions, got shape "
                f"{arr.shape}")
        out.append(arr.copy())
    if not out:
        raise InvalidParameterError("need at least one level")
    return out


@dataclass
class InterlacedArray:
    """Triangular array x_i^n, strict below / weak above.

    ``levels[n-1][i-1]`` holds x_i^n.  The invariant is
    x_i^{n+1} < x_i^n <= x_{i+1}^{n+1} for every pair of consecutive levels;
    ``validate`` raises on any violation and is called on construction and
    after every event in the dynamics.
    """

    levels: List[np.ndarray]
    time: float = 0.0

    def __post_init__(self) -> None:
        self.levels = _as_levels(self.levels)
        self.validate()

    @property
    def N(self) -> int:
        return len(self.levels)

    def position(self, i: int, n: int) -> int:
        return int(self.levels[n - 1][i - 1])

    def validate(self) -> None:
        for n in range(1, self.N):
            a, b = self.levels[n - 1], self.levels[n]
            if not (np.all(b[:n] < a) and np.all(a <= b[1:])):
                raise InvalidParameterError(
                    f"interlacing violated between levels {n} and {n + 1}: "
                    f"{a.tolist()} vs {b.tolist()}")

    def copy(self) -> "InterlacedArray":
        out = object.__new__(InterlacedArray)
        out.levels = [lv.copy() for lv in self.levels]
        out.time = self.time
        return out

    def to_csv(self, path_or_buf=None) -> Union[str, None]:
        """Write the array as ``n,i,position`` rows (header included)."""
        return _levels_to_csv(self.levels, path_or_buf)


@dataclass
class AztecArray:
    """Triangular array z_i^n of the shuffling dynamics, weak interlacing.

    ``levels[n-1][i-1]`` holds z_i^n; ``step`` counts completed shuffle
    steps and ``q`` is the jump probability.  The invariant is
    z_i^{n+1} <= z_i^n <= z_{i+1}^{n+1} (ties allowed on both sides).
    """

    levels: List[np.ndarray]
    step: int = 0
    q: float = 0.5

    def __post_init__(self) -> None:
        self.levels = _as_levels(self.levels)
        self.q = float(self.q)
        if not 0.0 <= self.q <= 1.0:
            raise InvalidParameterError(f"q must lie in [0, 1], got {self.q}")
        if self.step < 0:
            raise InvalidParameterError("step must be >= 0")
        self.validate()

    @property
    def N(self) -> int:
        return len(self.levels)

    def position(self, i: int, n: int) -> int:
        return int(self.levels[n - 1][i - 1])

    def validate(self) -> None:
        for n in range(1, self.N):
            a, b = self.levels[n - 1], self.levels[n]
            if not (np.all(b[:n] <= a) and np.all(a <= b[1:])):
                raise InvalidParameterError(
                    f"interlacing violated between levels {n} and {n + 1}: "
                    f"{a.tolist()} vs {b.tolist()}")

    def copy(self) -> "AztecArray":
        out = object.__new__(AztecArray)
        out.levels = [lv.copy() for lv in self.levels]
        out.step = self.step
        out.q = self.q
        return out

    def to_csv(self, path_or_buf=None) -> Union[str, None]:
        """Write the array as ``n,i,position`` rows (header included)."""
        return _levels_to_csv(self.levels, path_or_buf)


def _levels_to_csv(levels: List[np.ndarray], path_or_buf):
    buf = io.StringIO()
    buf.write("n,i,position\n")
    for n, row in enumerate(levels, start=1):
        for i, pos in enumerate(row, start=1):
            buf.write(f"{n},{i},{int(pos)}\n")
    text = buf.getvalue()
    if path_or_buf is None:
        return text
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
        return None
    with open(path_or_buf, "w") as fh:
        fh.write(text)
    return None


def interlace_init(N: int) -> InterlacedArray:
    """Packed initial condition x_i^n = i - n - 1.

    The edge column is the step initial condition x_1^n = -n; every level is
    a left-packed block ending at -1.
    """
    N = int(N)
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    return InterlacedArray(
        [np.arange(1, n + 1, dtype=np.int64) - n - 1 for n in range(1, N + 1)])


def aztec_init(N: int, q: float = 0.5) -> AztecArray:
    """Packed initial condition z_i^n = i - 1 (projection x_i^n = i - n - 1)."""
    N = int(N)
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    return AztecArray(
        [np.arange(n, dtype=np.int64) for n in range(1, N + 1)], 0, q)


def _attempt_jump(levels: List[np.ndarray], i: int, n: int) -> bool:
    """One jump attempt of particle (i, n); returns True if it moved.

    The attempt is suppressed when level n-1 sits immediately right
    (x_i^n + 1 == x_i^{n-1}); otherwise the particle advances and drags the
    (i+l, n+l) diagonal along: every particle sharing the old position moves
    too, which is exactly what keeps the interlacing intact.
    """
    p = levels[n - 1][i - 1]
    if i <= n - 1 and p + 1 == levels[n - 2][i - 1]:
        return False
    levels[n - 1][i - 1] = p + 1
    l = 1
    while n + l <= len(levels) and levels[n + l - 1][i + l - 1] == p:
        levels[n + l - 1][i + l - 1] = p + 1
        l += 1
    return True


def interlace_attempt(S: InterlacedArray, i: int, n: int) -> InterlacedArray:
    """One jump attempt of particle (i, n), as a new array.

    Returns the post-attempt state: unchanged when the attempt is blocked by
    (i, n-1), otherwise with the particle advanced and its (i+l, n+l)
    push cascade applied.
    """
    if not (1 <= n <= S.N and 1 <= i <= n):
        raise InvalidParameterError(f"no particle ({i}, {n}) in the array")
    out = S.copy()
    _attempt_jump(out.levels, i, n)
    return out


def interlace_ct_run(S: InterlacedArray, t: float,
                     rng: np.random.Generator,
                     check: bool = False) -> InterlacedArray:
    """Evolve the array for a time window t under the unit-rate dynamics.

    Gillespie form: with M = N(N+1)/2 particles the next attempt arrives
    after an Exp(M) waiting time and hits a uniformly chosen particle (by
    memorylessness this equals independent unit-rate clocks).  Blocked
    attempts consume their clock ring.  Draw order per event: one
    exponential, then one integer in [0, M).  With check=True the
    interlacing is re-validated after every event.
    """
    t = float(t)
    if t < 0.0:
        raise InvalidParameterError("t must be >= 0")
    out = S.copy()
    M = out.N * (out.N + 1) // 2
    # particle k <-> (i, n): level n occupies slots n(n-1)/2 .. n(n+1)/2 - 1
    index = [(k - n * (n - 1) // 2 + 1, n)
             for n in range(1, out.N + 1)
             for k in range(n * (n - 1) // 2, n * (n + 1) // 2)]
    horizon = out.time + t
    clock = out.time
    while True:
        clock += rng.exponential(1.0 / M)
        if clock > horizon:
            break
        i, n = index[int(rng.integers(M))]
        _attempt_jump(out.levels, i, n)
        if check:
            out.validate()
    out.time = horizon
    return out


def project_level_edge(S: InterlacedArray) -> np.ndarray:
    """Edge column {x_1^n, n = 1..N}: continuous-time TASEP with step IC.

    At time 0 this is x_1^n = -n, and the interlacing makes the column
    strictly decreasing in n at all times (an exclusion configuration).
    """
    return np.array([lv[0] for lv in S.levels], dtype=np.int64)


def aztec_shuffle_step(Z: AztecArray, rng: np.random.Generator) -> AztecArray:
    """One discrete shuffle step (step counter t -> t+1).

    Levels n <= t+1 are mobile.  Coins are drawn up front for every mobile
    particle (level-major, then index-major order), then levels resolve in
    increasing n: particle (i, n) moves if forced (the already-updated
    (i-1, n-1) jumped off a shared site, i.e. z_{i-1}^{n-1} == z_i^n + 1
    after its update), stays if blocked (z_i^n == z_i^{n-1} after the
    update), and otherwise follows its coin.  Forced and blocked are
    mutually exclusive by the within-level ordering of level n-1.
    """
    out = Z.copy()
    t = out.step + 1
    top = min(t, out.N)
    coins = {}
    for n in range(1, top + 1):
        flips = rng.random(n) < out.q
        for i in range(1, n + 1):
            coins[(i, n)] = bool(flips[i - 1])
    for n in range(1, top + 1):
        row = out.levels[n - 1]
        above = out.levels[n - 2] if n >= 2 else None
        for i in range(1, n + 1):
            z = row[i - 1]
            if i >= 2 and above[i - 2] == z + 1:
                row[i - 1] = z + 1          # forced along with (i-1, n-1)
            elif i <= n - 1 and above[i - 1] == z:
                continue                    # blocked by (i, n-1)
            elif coins[(i, n)]:
                row[i - 1] = z + 1
    out.step = t
    return out


def aztec_shuffle_run(N: int, q: float, steps: int,
                      rng: np.random.Generator,
                      check: bool = False) -> AztecArray:
    """Run the shuffle for a number of steps from the packed initial state.

    steps may exceed N (the array simply keeps evolving; levels beyond N are
    not tracked).  With check=True the weak interlacing is re-validated
    after every step.
    """
    steps = int(steps)
    if steps < 0:
        raise InvalidParameterError("steps must be >= 0")
    Z = aztec_init(N, q)
    for _ in range(steps):
        Z = aztec_shuffle_step(Z, rng)
        if check:
            Z.validate()
    return Z


def aztec_to_tasep(Z: AztecArray) -> np.ndarray:
    """Edge column of the projection x_i^n := z_i^n - n.

    Returns {x_1^n, n = 1..N}; at step 0 this is the step initial condition
    x_1^n = -n.  The first entry x_1^1 has the Binomial(step, q) - 1 law of
    the discrete parallel-update TASEP's first particle; the full column is
    the sequential-update chain with the level-n freeze (see the module
    docstring).
    """
    return np.array([lv[0] - (n + 1) for n, lv in enumerate(Z.levels)],
                    dtype=np.int64)
