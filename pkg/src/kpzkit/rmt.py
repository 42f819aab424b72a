"""GUE sampling and Hermitian matrix diffusions.

The stationary ensemble here has density proportional to
exp[-tr(A**2)/(2N)], i.e. diagonal entries of variance N and off-diagonal
real/imaginary parts of variance N/2.  With this normalization the
spectrum fills [-2N, 2N] and the largest eigenvalue fluctuates on the
N**(1/3) scale, (lambda_N - 2N)/N**(1/3) -> xi_2.

Dynamics, all sampled exactly through Gaussian transitions (no SDE
discretization):

* the stationary matrix Ornstein-Uhlenbeck process, whose two-time law is
  A(t) = q A(0) + sqrt(1 - q**2) * fresh GUE with q = exp(-t/(2N));
* Hermitian Brownian motion normalized so that <f, B(t) f> is a standard
  Brownian motion for every unit vector f (diagonal entry variance t,
  off-diagonal real/imag variance t/2) -- exactly the noise for which the
  Ornstein-Uhlenbeck process above is stationary;
* the matrix Brownian bridge A(t) = B(T+t) - ((T+t)/(2T)) B(2T) on
  [-T, T], pinned to the zero matrix at both ends.

Edge scaling: sampling the stationary process at times 2 N**(2/3) tau and
recording N**(-1/3) (lambda_N - 2N) gives tuples whose joint law
approaches the stationary Airy_2 process; see ``edge_process_samples``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "HermitianMatrix",
    "EigenPath",
    "sample_gue",
    "ou_two_time",
    "gue_brownian_path",
    "gue_bridge_path",
    "gue_bridge_ensemble",
    "edge_process_samples",
]


@dataclass(frozen=True)
class HermitianMatrix:
    """Hermitian matrix stored as a real diagonal plus a strict lower triangle.

    ``dense()`` assembles ``L + L* + diag(d)``, so hermiticity is exact by
    construction rather than a floating-point coincidence.
    """

    diag: np.ndarray
    lower: np.ndarray

    def __post_init__(self) -> None:
        diag = np.asarray(self.diag, dtype=np.float64)
        lower = np.asarray(self.lower, dtype=np.complex128)
        if diag.ndim != 1 or diag.size == 0:
            raise InvalidParameterError("diag must be a nonempty 1-d real array")
        n = diag.size
        if lower.shape != (n, n):
            raise InvalidParameterError("lower must be an (N, N) array")
        if np.any(np.triu(lower) != 0):
            raise InvalidParameterError(
                "lower must vanish on and above the diagonal")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "lower", lower)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return self.lower + self.lower.conj().T + np.diag(self.diag)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in nondecreasing order."""
        return np.linalg.eigvalsh(self.dense())


def _lin(a: float, x: HermitianMatrix, b: float,
         y: HermitianMatrix) -> HermitianMatrix:
    """a*x + b*y on the structured storage (stays exactly Hermitian)."""
    if x.n != y.n:
        raise InvalidParameterError("dimension mismatch")
    return HermitianMatrix(a * x.diag + b * y.diag, a * x.lower + b * y.lower)


@dataclass(frozen=True)
class EigenPath:
    """Sorted eigenvalues along a time grid.

    ``levels[k, j]`` is the j-th smallest eigenvalue at ``times[k]``.  Rows
    are nondecreasing by construction; away from deterministic degeneracies
    (a bridge pinned to the zero matrix has all eigenvalues equal there) the
    ordering is strict with probability one, and ``strict_rows()`` reports
    where it holds.
    """

    times: np.ndarray
    levels: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        levels = np.asarray(self.levels, dtype=np.float64)
        if times.ndim != 1 or times.size == 0:
            raise InvalidParameterError("times must be a nonempty 1-d array")
        if np.any(np.diff(times) <= 0):
            raise InvalidParameterError("times must be strictly increasing")
        if levels.ndim != 2 or levels.shape[0] != times.size:
            raise InvalidParameterError(
                "levels must have shape (len(times), N)")
        if np.any(np.diff(levels, axis=1) < 0):
            raise InvalidParameterError("levels rows must be sorted")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return self.levels.shape[1]

    def strict_rows(self) -> np.ndarray:
        """Boolean mask of times where the ordering is strict."""
        if self.n == 1:
            return np.ones(self.times.size, dtype=bool)
        return np.all(np.diff(self.levels, axis=1) > 0, axis=1)

    def line(self, j: int) -> np.ndarray:
        """Trajectory of the j-th smallest eigenvalue (j = 1 .. N)."""
        if not 1 <= j <= self.n:
            raise InvalidParameterError(f"line index {j} out of range")
        return self.levels[:, j - 1]


def _check_dim(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError("N must be a positive integer")
    return int(n)


def _gaussian_hermitian(n: int, diag_var: float, off_var: float,
                        rng: np.random.Generator) -> HermitianMatrix:
    """Centered Gaussian Hermitian matrix with the given entry variances."""
    diag = rng.normal(0.0, np.sqrt(diag_var), size=n)
    lower = np.zeros((n, n), dtype=np.complex128)
    if n > 1:
        rows, cols = np.tril_indices(n, k=-1)
        scale = np.sqrt(off_var)
        lower[rows, cols] = (rng.normal(0.0, scale, size=rows.size)
                             + 1j * rng.normal(0.0, scale, size=rows.size))
    return HermitianMatrix(diag, lower)


def sample_gue(n: int, rng: np.random.Generator) -> HermitianMatrix:
    """Draw from the ensemble with density ~ exp[-tr(A**2)/(2N)].

    Diagonal entries are N(0, N); off-diagonal real and imaginary parts are
    each N(0, N/2), so the exponent is exactly tr(A**2)/(2N).
    """
    n = _check_dim(n)
    return _gaussian_hermitian(n, float(n), n / 2.0, rng)


def ou_two_time(n: int, t: float,
                rng: np.random.Generator) -> Tuple[HermitianMatrix,
                                                   HermitianMatrix]:
    """Stationary Ornstein-Uhlenbeck pair (A(0), A(t)).

    Sampled exactly: A(t) = q A(0) + sqrt(1-q**2) * fresh with
    q = exp(-t/(2N)).  At t = 0 the two members are identical.
    """
    n = _check_dim(n)
    t = float(t)
    if not t >= 0.0:
        raise InvalidParameterError("t must be nonnegative")
    first = sample_gue(n, rng)
    q = np.exp(-t / (2.0 * n))
    fresh = sample_gue(n, rng)
    return first, _lin(q, first, np.sqrt(1.0 - q * q), fresh)


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise InvalidParameterError("grid must be a nonempty 1-d array")
    if np.any(np.diff(g) <= 0):
        raise InvalidParameterError("grid must be strictly increasing")
    return g


def gue_brownian_path(n: int, big_t: float, grid: Sequence[float],
                      rng: np.random.Generator) -> list:
    """Hermitian Brownian motion B sampled on a grid inside [0, 2T].

    Entry variances grow as diag ~ t, off-diagonal re/im ~ t/2, which makes
    <f, B(t) f> a standard Brownian motion for every unit vector f and is
    the unique normalization keeping the Ornstein-Uhlenbeck process of
    ``ou_two_time`` stationary.  Returns one HermitianMatrix per grid time.
    """
    n = _check_dim(n)
    big_t = float(big_t)
    if not big_t > 0.0:
        raise InvalidParameterError("T must be positive")
    g = _check_grid(grid)
    if g[0] < 0.0 or g[-1] > 2.0 * big_t:
        raise InvalidParameterError("grid must lie inside [0, 2T]")
    out = []
    cur = _gaussian_hermitian(n, g[0], g[0] / 2.0, rng)
    out.append(cur)
    for dt in np.diff(g):
        step = _gaussian_hermitian(n, dt, dt / 2.0, rng)
        cur = _lin(1.0, cur, 1.0, step)
        out.append(cur)
    return out


def gue_bridge_path(n: int, big_t: float, grid: Sequence[float],
                    rng: np.random.Generator) -> list:
    """Matrix Brownian bridge A(t) = B(T+t) - ((T+t)/(2T)) B(2T) on [-T, T].

    Returns one HermitianMatrix per grid time.  The subtraction is carried
    out on the structured storage, so A(-T) and A(T) are exactly zero.
    """
    n = _check_dim(n)
    big_t = float(big_t)
    if not big_t > 0.0:
        raise InvalidParameterError("T must be positive")
    g = _check_grid(grid)
    if g[0] < -big_t or g[-1] > big_t:
        raise InvalidParameterError("grid must lie inside [-T, T]")
    shifted = big_t + g
    full = np.append(shifted, 2.0 * big_t) if shifted[-1] < 2.0 * big_t \
        else shifted
    path = gue_brownian_path(n, big_t, full, rng)
    end = path[-1]
    out = []
    for tau, mat in zip(shifted, path):
        out.append(_lin(1.0, mat, -tau / (2.0 * big_t), end))
    return out


def gue_bridge_ensemble(n: int, big_t: float, grid: Sequence[float],
                        rng: np.random.Generator) -> EigenPath:
    """Eigenvalue paths of the matrix Brownian bridge on [-T, T]."""
    path = gue_bridge_path(n, big_t, grid, rng)
    levels = np.vstack([mat.eigenvalues() for mat in path])
    return EigenPath(np.asarray(grid, dtype=np.float64), levels)


def edge_process_samples(kind: str, n: int, times: Sequence[float],
                         rng: np.random.Generator, *,
                         replicas: int = 1) -> np.ndarray:
    """Rescaled largest-eigenvalue tuples of the stationary edge process.

    The stationary Ornstein-Uhlenbeck process is sampled at physical times
    2 N**(2/3) tau for the given tau values, and each largest eigenvalue is
    recorded as N**(-1/3) (lambda_N - 2N).  Returns an array of shape
    (replicas, len(times)); the tuples approach the stationary Airy_2
    process as N grows (marginals TW-GUE, lag covariance g_2).

    ``kind`` selects the dynamics; only "ou-stationary" is implemented.
    """
    if not isinstance(kind, str) or kind.lower() not in (
            "ou-stationary", "ou_stationary"):
        raise InvalidParameterError(f"unknown edge process kind {kind!r}")
    n = _check_dim(n)
    taus = _check_grid(times)
    if not isinstance(replicas, (int, np.integer)) or replicas < 1:
        raise InvalidParameterError("replicas must be a positive integer")
    dts = 2.0 * n ** (2.0 / 3.0) * np.diff(taus)
    qs = np.exp(-dts / (2.0 * n))
    mix = np.sqrt(1.0 - qs * qs)
    out = np.empty((replicas, taus.size))
    for r in range(replicas):
        cur = sample_gue(n, rng)
        out[r, 0] = cur.eigenvalues()[-1]
        for k, (q, c) in enumerate(zip(qs, mix)):
            cur = _lin(q, cur, c, sample_gue(n, rng))
            out[r, k + 1] = cur.eigenvalues()[-1]
    return (out - 2.0 * n) / n ** (1.0 / 3.0)
