"""Exact finite-system distribution formulas.

Two independent exact routes to the droplet height law at the origin — a
Toeplitz determinant with modified-Bessel entries and a spectral
projection of a discrete Stark-type operator — plus the determinant
formula for transition probabilities of finitely many exclusion
particles, the one-parameter family of lattice functions ``f_n`` it is
built from, a small-system uniformization oracle, and the signed
line-ensemble weights whose marginals recover the transition
determinant.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, ive
from scipy.stats import poisson

from .errors import AccuracyError, InvalidParameterError, OutOfWindowError

__all__ = [
    "DiscreteOperator",
    "SchuetzInput",
    "determinantal_measure_weight",
    "f_n",
    "master_equation_oracle",
    "png_cdf_fredholm_discrete",
    "png_cdf_toeplitz",
    "png_height_pmf",
    "schuetz_transition",
]

# Cancellation in the Bessel-Toeplitz LU grows like the symbol's condition
# number e^{4t}; beyond this t (or for very large matrices) we switch to
# arbitrary precision.
_TOEPLITZ_FLOAT64_T = 6.0
_TOEPLITZ_FLOAT64_N = 40


def _as_int(value, name: str) -> int:
    try:
        return operator.index(value)
    except TypeError:
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")


def _as_time(value, name: str = "t", *, positive: bool = False) -> float:
    t = float(value)
    if not math.isfinite(t) or t < 0.0 or (positive and t == 0.0):
        bound = "positive" if positive else "nonnegative"
        raise InvalidParameterError(f"{name} must be a finite {bound} real, got {value!r}")
    return t


def png_cdf_toeplitz(n, t) -> float:
    """P(h(0,t) <= n) for the droplet, as an n x n Toeplitz determinant.

    The entries are modified Bessel functions I_{j-k}(2t); the value is
    e^{-t^2} times the determinant, and the empty (n=0) determinant is 1,
    reproducing the void probability of the relevant quadrant.

    Entries are evaluated in exponentially scaled form so the LU stays in
    float64 range; for large ``t`` (or ``n``) the determinant loses about
    4t/ln(10) digits to cancellation, so those cases run under mpmath.
    """
    n = _as_int(n, "n")
    t = _as_time(t, positive=True)
    if n < 0:
        raise InvalidParameterError(f"matrix size n must be >= 0, got {n}")
    if n == 0:
        return float(np.exp(-t * t))
    if t <= _TOEPLITZ_FLOAT64_T and n <= _TOEPLITZ_FLOAT64_N:
        offsets = np.subtract.outer(np.arange(n), np.arange(n))
        scaled = ive(offsets, 2.0 * t)  # I_k(2t) e^{-2t}
        sign, logdet = np.linalg.slogdet(scaled)
        if sign <= 0:  # pragma: no cover - SPD matrix, defensive only
            raise AccuracyError(f"Toeplitz determinant lost positivity at n={n}, t={t}")
        return float(np.exp(-t * t + 2.0 * n * t + logdet))
    return _toeplitz_mp(n, t)


def _toeplitz_mp(n: int, t: float) -> float:
    import mpmath as mp

    digits = 30 + int(2.0 * t) + n // 4
    with mp.workdps(digits):
        entries = [mp.besseli(k, 2 * mp.mpf(t)) for k in range(n)]
        A = mp.matrix(n, n)
        for j in range(n):
            for k in range(n):
                A[j, k] = entries[abs(j - k)]
        value = mp.exp(-mp.mpf(t) ** 2) * mp.det(A)
        return float(value)


@dataclass(frozen=True)
class DiscreteOperator:
    """Finite section of the lattice operator -f(x+1) - f(x-1) + (x/t) f(x).

    The section lives on sites x in [-M, M].  Its exact (untruncated)
    spectrum is the arithmetic ladder {k/t : k integer} with orthonormal
    eigenfunctions J_{x-k}(2t) — a discrete Wannier–Stark ladder — which
    is what makes the spectral projection below robust to compute.
    """

    t: float
    truncation: int

    def __post_init__(self):
        object.__setattr__(self, "t", _as_time(self.t, positive=True))
        M = _as_int(self.truncation, "truncation")
        if M < 0:
            raise InvalidParameterError(f"truncation must be >= 0, got {M}")
        object.__setattr__(self, "truncation", M)

    @property
    def sites(self) -> np.ndarray:
        M = self.truncation
        return np.arange(-M, M + 1)

    def diagonal(self) -> np.ndarray:
        return self.sites / self.t

    def dense(self) -> np.ndarray:
        d = self.diagonal()
        A = np.diag(d)
        m = d.size - 1
        A[np.arange(m), np.arange(1, m + 1)] = -1.0
        A[np.arange(1, m + 1), np.arange(m)] = -1.0
        return A

    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvectors."""
        return _ladder(self.t, self.truncation)


@lru_cache(maxsize=32)
def _ladder(t: float, M: int) -> Tuple[np.ndarray, np.ndarray]:
    diag = np.arange(-M, M + 1) / t
    if M == 0:
        w, V = diag.copy(), np.ones((1, 1))
    else:
        w, V = eigh_tridiagonal(diag, -np.ones(2 * M))
    w.flags.writeable = False
    V.flags.writeable = False
    return w, V


def _fredholm_value(n: int, t: float, M: int) -> float:
    w, V = _ladder(t, M)
    # The spectrum is exactly {k/t}, but the finite section lands the k=0
    # eigenvalue on either side of zero at machine precision.  Cutting at
    # the gap midpoint keeps the zero mode in the projection, which is
    # what "projection onto B <= 0" means for the untruncated operator.
    kept = V[:, w <= 0.5 / t]
    sel = np.arange(-M, M + 1) > n
    block = kept[sel, :]
    K = block @ block.T
    sign, logdet = np.linalg.slogdet(np.eye(K.shape[0]) - K)
    return float(sign * np.exp(logdet))


def png_cdf_fredholm_discrete(n, t, M: Optional[int] = None) -> float:
    """P(h(0,t) <= n) via the spectral projection of :class:`DiscreteOperator`.

    Computes det(1 - theta_n P theta_n) on the sites x in (n, M], where P
    projects onto the nonpositive part of the operator's spectrum.

    With ``M=None`` the truncation starts at n + ceil(4t) + 20 and doubles
    until the value moves by less than 1e-10.  An explicit ``M`` must
    satisfy M >= n + ceil(4t) and is verified by a sensitivity check
    against M + 20; an unconverged truncation raises
    :class:`~kpzkit.errors.AccuracyError`.
    """
    n = _as_int(n, "n")
    t = _as_time(t, positive=True)
    if n < 0:
        raise InvalidParameterError(f"height level n must be >= 0, got {n}")
    floor = n + math.ceil(4.0 * t)
    if M is not None:
        M = _as_int(M, "M")
        if M < floor:
            raise InvalidParameterError(f"truncation M={M} below required minimum {floor}")
        value = _fredholm_value(n, t, M)
        probe = _fredholm_value(n, t, M + 20)
        if abs(value - probe) > 1e-9:
            raise AccuracyError(
                f"truncation M={M} not converged: value shifts by "
                f"{abs(value - probe):.3e} on M -> M+20"
            )
        return value
    M = floor + 20
    value = _fredholm_value(n, t, M)
    for _ in range(6):
        M *= 2
        probe = _fredholm_value(n, t, M)
        if abs(value - probe) < 1e-10:
            return probe
        value = probe
    raise AccuracyError(  # pragma: no cover - decay is superexponential
        f"no truncation convergence up to M={M} at n={n}, t={t}"
    )


def png_height_pmf(t, *, tail: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """Exact pmf of the droplet height h(0,t) on 0..n_max.

    Returns ``(levels, pmf)`` where the cumulative sum of ``pmf`` reaches
    1 - ``tail``.  One eigendecomposition is shared across all levels, so
    tabulating a whole distribution costs little more than a single CDF
    evaluation.
    """
    t = _as_time(t, positive=True)
    n_max = int(math.ceil(2.0 * t + 9.0 * max(t, 1.0) ** (1.0 / 3.0) + 12.0))
    while True:
        M = n_max + math.ceil(4.0 * t) + 20
        w, V = _ladder(t, M)
        kept = V[:, w <= 0.5 / t]
        full = kept @ kept.T
        sites = np.arange(-M, M + 1)
        cdf = np.empty(n_max + 1)
        for n in range(n_max + 1):
            sel = sites > n
            K = full[np.ix_(sel, sel)]
            sign, logdet = np.linalg.slogdet(np.eye(K.shape[0]) - K)
            cdf[n] = sign * np.exp(logdet)
        if cdf[-1] >= 1.0 - tail:
            break
        n_max += 20
    pmf = np.diff(cdf, prepend=0.0)
    return np.arange(n_max + 1), np.clip(pmf, 0.0, None)


def _pois_pmf(x: int, t: float) -> float:
    if x < 0:
        return 0.0
    if t == 0.0:
        return 1.0 if x == 0 else 0.0
    return float(np.exp(-t + x * math.log(t) - gammaln(x + 1)))


def f_n(n, x, t) -> float:
    """The lattice functions behind the transition determinant.

    ``f_n(0, x, t)`` is the Poisson(t) pmf at x.  Negative orders are
    iterated forward differences (a finite signed sum); positive orders
    are iterated tail sums, evaluated as a single binomially weighted
    Poisson tail with a certified remainder.  They satisfy

        f_n(n, x, t) - f_n(n, x + 1, t) = f_n(n - 1, x, t).
    """
    n = _as_int(n, "n")
    x = _as_int(x, "x")
    t = _as_time(t)
    if n == 0:
        return _pois_pmf(x, t)
    if n < 0:
        m = -n
        return float(
            sum(
                (-1) ** j * math.comb(m, j) * _pois_pmf(x + j, t)
                for j in range(m + 1)
            )
        )
    # Iterating the tail sum n times gives binomial weights
    # C(n-1+y-x, n-1) against the Poisson pmf.
    total = 0.0
    y = max(x, 0)
    stop = max(2.0 * t, float(y)) + 10.0
    while True:
        term = math.comb(n - 1 + y - x, n - 1) * _pois_pmf(y, t)
        total += term
        # Past the stop point term ratios are < 1/2 (Poisson factor t/(y+1)
        # < 1/2 and binomial factor <= 2), so the remainder is below the
        # last term — negligible once terms fall under 1e-18 of the total.
        if y >= stop and term < 1e-18 * (total + 1e-300):
            return total
        y += 1
        if y - max(x, 0) > 200_000:  # pragma: no cover - defensive only
            raise AccuracyError(f"tail sum for f_n({n}, {x}, {t}) did not settle")


@dataclass(frozen=True)
class SchuetzInput:
    """Initial/final particle positions and elapsed time for N particles.

    Positions are labelled right to left: ``y[0] > y[1] > ...`` initially
    and likewise for ``x`` at time ``t``.
    """

    y: Tuple[int, ...]
    x: Tuple[int, ...]
    t: float

    def __post_init__(self):
        y = tuple(_as_int(v, "y") for v in self.y)
        x = tuple(_as_int(v, "x") for v in self.x)
        if len(y) == 0 or len(y) != len(x):
            raise InvalidParameterError("x and y must be equally long and nonempty")
        for name, seq in (("y", y), ("x", x)):
            if any(a <= b for a, b in zip(seq, seq[1:])):
                raise InvalidParameterError(f"{name} must be strictly decreasing")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", _as_time(self.t))

    @property
    def n_particles(self) -> int:
        return len(self.y)


def schuetz_transition(inp: SchuetzInput) -> float:
    """Transition probability of N exclusion particles as an N x N determinant.

    Entry (i, j) is f_{i-j} evaluated at x_{N+1-i} - y_{N+1-j} (1-based),
    so a single particle reduces to the free Poisson kernel.
    """
    N = inp.n_particles
    A = np.empty((N, N))
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            A[i - 1, j - 1] = f_n(i - j, inp.x[N - i] - inp.y[N - j], inp.t)
    return float(np.linalg.det(A))


def master_equation_oracle(
    y: Sequence[int],
    t,
    window: Tuple[int, int],
    *,
    tail_tol: float = 1e-12,
) -> Dict[Tuple[int, ...], float]:
    """Distribution of N <= 4 exclusion particles by uniformization.

    Solves the forward equation exactly on the configuration space of the
    finite ``window = (lo, hi)``.  The truncation error is bounded by the
    escape probability of the right-most particle, P(Poisson(t) > hi -
    y[0]); if that bound exceeds ``tail_tol`` the window must be enlarged.

    Returns a dict mapping ordered configurations to probabilities.
    """
    y = tuple(_as_int(v, "y") for v in y)
    if not 1 <= len(y) <= 4:
        raise InvalidParameterError("oracle supports 1 to 4 particles")
    if any(a <= b for a, b in zip(y, y[1:])):
        raise InvalidParameterError("y must be strictly decreasing")
    t = _as_time(t)
    lo, hi = (_as_int(v, "window") for v in window)
    if lo > y[-1] or hi < y[0]:
        raise InvalidParameterError(f"window [{lo}, {hi}] does not contain y={y}")
    escape = float(poisson.sf(hi - y[0], t)) if t > 0 else 0.0
    if escape > tail_tol:
        raise OutOfWindowError(
            f"escape bound {escape:.3e} exceeds {tail_tol:.1e}; enlarge window"
        )
    N = len(y)
    sites = range(hi, lo - 1, -1)
    configs = list(itertools.combinations(sites, N))
    index = {c: i for i, c in enumerate(configs)}
    size = len(configs)
    if size > 300_000:
        raise InvalidParameterError(f"window too large: {size} configurations")

    # Uniformized transition matrix at rate N (an upper bound on the total
    # jump rate from any configuration); rows have at most N+1 entries.
    rows, cols, vals = [], [], []
    for c, i in index.items():
        occupied = frozenset(c)
        moves = 0
        for p in range(N):
            target = c[p] + 1
            if target <= hi and target not in occupied:
                moved = list(c)
                moved[p] = target
                rows.append(i)
                cols.append(index[tuple(moved)])
                vals.append(1.0 / N)
                moves += 1
        rows.append(i)
        cols.append(i)
        vals.append(1.0 - moves / N)
    from scipy.sparse import csr_matrix

    P = csr_matrix((vals, (rows, cols)), shape=(size, size))

    dist = np.zeros(size)
    dist[index[y]] = 1.0
    out = np.zeros(size)
    rate = N * t
    n_terms = int(poisson.isf(1e-15, rate)) + 10 if rate > 0 else 0
    weights = poisson.pmf(np.arange(n_terms + 1), rate)
    for k in range(n_terms + 1):
        out += weights[k] * dist
        if k < n_terms:
            dist = dist @ P
    return {c: float(p) for c, p in zip(configs, out)}


def determinantal_measure_weight(
    lines: Sequence[Sequence[int]], y: Sequence[int], t
) -> float:
    """Signed weight of one line-ensemble configuration.

    ``lines[n-1]`` holds the n variables of level n, for n = 1..N.  The
    weight is the product over levels of (n+1) x (n+1) indicator
    determinants — rows are 1(x_i^n > x_j^{n+1}) plus a final all-ones row
    standing in for the virtual variable — times the N x N determinant of
    negative-order ``f_n`` columns anchored at the initial positions
    ``y``.  Weights can be negative; only marginals are probabilities.
    """
    y = tuple(_as_int(v, "y") for v in y)
    if any(a <= b for a, b in zip(y, y[1:])):
        raise InvalidParameterError("y must be strictly decreasing")
    t = _as_time(t)
    N = len(y)
    if len(lines) != N:
        raise InvalidParameterError(f"expected {N} levels, got {len(lines)}")
    levels = []
    for n, row in enumerate(lines, start=1):
        vals = [_as_int(v, f"lines[{n - 1}]") for v in row]
        if len(vals) != n:
            raise InvalidParameterError(f"level {n} must hold {n} variables, got {len(vals)}")
        levels.append(vals)

    weight = 1.0
    for n in range(1, N):
        upper, lower = levels[n - 1], levels[n]
        A = np.ones((n + 1, n + 1))
        for i in range(n):
            for j in range(n + 1):
                A[i, j] = 1.0 if upper[i] > lower[j] else 0.0
        weight *= np.linalg.det(A)
    psi = np.empty((N, N))
    for i in range(1, N + 1):
        for j in range(N):
            psi[i - 1, j] = f_n(-i + 1, levels[N - 1][j] - y[N - i], t)
    return float(weight * np.linalg.det(psi))
