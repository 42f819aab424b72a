"""Tests for GUE sampling and the Hermitian matrix diffusions."""

import numpy as np
import pytest
from scipy.interpolate import PchipInterpolator
from scipy.stats import ks_2samp

from kpzkit.airy import tw2_cdf
from kpzkit.errors import InvalidParameterError
from kpzkit.rmt import (
    EigenPath,
    HermitianMatrix,
    edge_process_samples,
    gue_bridge_ensemble,
    gue_bridge_path,
    gue_brownian_path,
    ou_two_time,
    sample_gue,
)
from kpzkit.stats import ks_distance

# airy_covariance("A2", 1.0) at default settings; quadrature error 1.9e-06.
G2_LAG1 = 0.3032624803


@pytest.fixture(scope="module")
def f2_interp():
    grid = np.arange(-5.5, 3.51, 0.25)
    interp = PchipInterpolator(grid, [tw2_cdf(float(s)) for s in grid])
    return lambda v: np.clip(interp(v), 0.0, 1.0)


def _haar_unitary(n, rng):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestHermitianMatrix:
    def test_dense_exactly_hermitian(self):
        rng = np.random.default_rng(1)
        mat = sample_gue(7, rng).dense()
        assert np.array_equal(mat, mat.conj().T)

    def test_eigenvalues_sorted(self):
        rng = np.random.default_rng(2)
        lam = sample_gue(9, rng).eigenvalues()
        assert np.all(np.diff(lam) > 0)

    def test_dimension(self):
        rng = np.random.default_rng(3)
        assert sample_gue(4, rng).n == 4

    def test_rejects_bad_shapes(self):
        with pytest.raises(InvalidParameterError):
            HermitianMatrix(np.zeros((2, 2)), np.zeros((2, 2), complex))
        with pytest.raises(InvalidParameterError):
            HermitianMatrix(np.zeros(3), np.zeros((2, 2), complex))

    def test_rejects_upper_triangle_content(self):
        bad = np.zeros((2, 2), dtype=complex)
        bad[0, 1] = 1.0
        with pytest.raises(InvalidParameterError):
            HermitianMatrix(np.zeros(2), bad)
        ok = np.zeros((2, 2), dtype=complex)
        ok[1, 0] = 1.0 + 2.0j
        dense = HermitianMatrix(np.zeros(2), ok).dense()
        assert dense[0, 1] == 1.0 - 2.0j


class TestEigenPath:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            EigenPath([0.0, 0.0], np.zeros((2, 3)))
        with pytest.raises(InvalidParameterError):
            EigenPath([0.0, 1.0], np.zeros((3, 3)))
        with pytest.raises(InvalidParameterError):
            EigenPath([0.0], np.array([[2.0, 1.0]]))

    def test_lines_and_strictness(self):
        path = EigenPath([0.0, 1.0], np.array([[0.0, 0.0], [-1.0, 2.0]]))
        assert list(path.strict_rows()) == [False, True]
        assert np.array_equal(path.line(2), [0.0, 2.0])
        with pytest.raises(InvalidParameterError):
            path.line(3)


class TestSampleGue:
    def test_scalar_case_is_unit_gaussian(self):
        rng = np.random.default_rng(20260815)
        draws = np.array([sample_gue(1, rng).dense()[0, 0].real
                          for _ in range(40000)])
        assert abs(draws.mean()) < 3.0 / np.sqrt(40000)
        assert abs(draws.var() - 1.0) < 3.0 * np.sqrt(2.0 / 40000)

    def test_entry_variance_pattern(self):
        rng = np.random.default_rng(4)
        n, reps = 6, 20000
        diag = np.empty(reps)
        off_re = np.empty(reps)
        off_im = np.empty(reps)
        for k in range(reps):
            mat = sample_gue(n, rng)
            diag[k] = mat.diag[2]
            off_re[k] = mat.lower[4, 1].real
            off_im[k] = mat.lower[4, 1].imag
        band = 3.0 * np.sqrt(2.0 / reps)
        assert abs(diag.var() / n - 1.0) < band
        assert abs(off_re.var() / (n / 2.0) - 1.0) < band
        assert abs(off_im.var() / (n / 2.0) - 1.0) < band

    def test_second_spectral_moment_matches_semicircle(self):
        # E tr(A^2)/N = N^2 is the second moment of the semicircle on
        # [-2N, 2N], tying the entry normalization to the spectral scale.
        rng = np.random.default_rng(5)
        n, reps = 120, 300
        vals = np.array([np.sum(sample_gue(n, rng).eigenvalues() ** 2) / n
                         for _ in range(reps)])
        se = vals.std(ddof=1) / np.sqrt(reps)
        assert abs(vals.mean() - n * n) < 3.0 * se

    def test_largest_eigenvalue_tracy_widom(self, f2_interp):
        rng = np.random.default_rng(20260815)
        n = 200
        lam = np.array([sample_gue(n, rng).eigenvalues()[-1]
                        for _ in range(2000)])
        scaled = (lam - 2.0 * n) / n ** (1.0 / 3.0)
        assert ks_distance(scaled, f2_interp) <= 0.1
        assert abs(scaled.mean() + 1.77) < 0.1

    def test_rejects_bad_dimension(self):
        rng = np.random.default_rng(6)
        with pytest.raises(InvalidParameterError):
            sample_gue(0, rng)
        with pytest.raises(InvalidParameterError):
            sample_gue(2.5, rng)


class TestOuTwoTime:
    def test_zero_lag_is_identity(self):
        rng = np.random.default_rng(7)
        first, second = ou_two_time(8, 0.0, rng)
        assert np.array_equal(first.dense(), second.dense())

    def test_entry_correlation_decay(self):
        # corr(A(0)_11, A(t)_11) = exp(-t/(2N)).
        rng = np.random.default_rng(20260815)
        n, t, reps = 20, 10.0, 100000
        a0 = np.empty(reps)
        at = np.empty(reps)
        for k in range(reps):
            first, second = ou_two_time(n, t, rng)
            a0[k] = first.diag[0]
            at[k] = second.diag[0]
        rho = np.exp(-t / (2.0 * n))
        observed = np.corrcoef(a0, at)[0, 1]
        assert abs(observed - rho) < 3.0 * (1.0 - rho * rho) / np.sqrt(reps)

    def test_long_lag_decorrelates(self):
        rng = np.random.default_rng(8)
        n, reps = 5, 4000
        a0 = np.empty(reps)
        at = np.empty(reps)
        for k in range(reps):
            first, second = ou_two_time(n, 1e6, rng)
            a0[k] = first.diag[1]
            at[k] = second.diag[1]
        assert abs(np.corrcoef(a0, at)[0, 1]) < 3.0 / np.sqrt(reps)

    def test_second_member_is_stationary(self):
        rng = np.random.default_rng(9)
        n, reps = 6, 20000
        diag = np.empty(reps)
        off_re = np.empty(reps)
        for k in range(reps):
            _, second = ou_two_time(n, 3.7, rng)
            diag[k] = second.diag[0]
            off_re[k] = second.lower[3, 2].real
        band = 3.0 * np.sqrt(2.0 / reps)
        assert abs(diag.var() / n - 1.0) < band
        assert abs(off_re.var() / (n / 2.0) - 1.0) < band

    def test_rejects_negative_lag(self):
        rng = np.random.default_rng(10)
        with pytest.raises(InvalidParameterError):
            ou_two_time(4, -0.5, rng)


class TestBrownianPath:
    def test_increment_variances(self):
        # One long path: increments are independent with diag var dt and
        # off-diagonal real/imag var dt/2.
        rng = np.random.default_rng(11)
        grid = np.linspace(0.25, 1250.0, 5000)
        path = gue_brownian_path(3, 1000.0, grid, rng)
        diag = np.diff([m.diag[1] for m in path])
        off = np.diff([m.lower[2, 0] for m in path])
        dt = grid[1] - grid[0]
        band = 3.0 * np.sqrt(2.0 / diag.size)
        assert abs(diag.var() / dt - 1.0) < band
        assert abs(off.real.var() / (dt / 2.0) - 1.0) < band
        assert abs(off.imag.var() / (dt / 2.0) - 1.0) < band

    def test_quadratic_form_is_standard_brownian(self):
        # Var <f, B(t) f> = t for unit f, at every grid time.
        rng = np.random.default_rng(20260815)
        f = np.array([0.6, 0.48 + 0.64j])
        f = f / np.linalg.norm(f)
        times = np.array([0.5, 1.0, 2.0, 4.0])
        reps = 3000
        vals = np.empty((reps, times.size))
        for r in range(reps):
            for k, mat in enumerate(gue_brownian_path(2, 2.5, times, rng)):
                vals[r, k] = (f.conj() @ mat.dense() @ f).real
        variances = vals.var(axis=0, ddof=1)
        band = 3.0 * np.sqrt(2.0 / reps)
        assert np.all(np.abs(variances / times - 1.0) < band)

    def test_rotation_invariance_of_spectrum(self):
        rng = np.random.default_rng(20260815)
        n, reps = 12, 1500
        plain = np.empty(reps)
        rotated = np.empty(reps)
        for k in range(reps):
            mat = gue_brownian_path(n, 1.0, (2.0,), rng)[0].dense()
            unitary = _haar_unitary(n, rng)
            plain[k] = np.linalg.eigvalsh(mat)[-1]
            rotated[k] = np.linalg.eigvalsh(
                unitary @ mat @ unitary.conj().T)[-1]
        assert ks_2samp(plain, rotated).pvalue > 0.01

    def test_grid_validation(self):
        rng = np.random.default_rng(12)
        with pytest.raises(InvalidParameterError):
            gue_brownian_path(3, 1.0, (0.5, 0.5), rng)
        with pytest.raises(InvalidParameterError):
            gue_brownian_path(3, 1.0, (1.0, 0.5), rng)
        with pytest.raises(InvalidParameterError):
            gue_brownian_path(3, 1.0, (0.5, 2.5), rng)
        with pytest.raises(InvalidParameterError):
            gue_brownian_path(3, 1.0, (-0.5, 0.5), rng)
        with pytest.raises(InvalidParameterError):
            gue_brownian_path(3, 0.0, (0.5,), rng)


class TestBridge:
    def test_pinned_exactly_at_both_ends(self):
        rng = np.random.default_rng(13)
        mats = gue_bridge_path(5, 1.5, (-1.5, -0.3, 0.9, 1.5), rng)
        zero = np.zeros((5, 5), dtype=complex)
        assert np.array_equal(mats[0].dense(), zero)
        assert np.array_equal(mats[-1].dense(), zero)

    def test_midpoint_entry_variance(self):
        # Bridge covariance (T^2 - t^2)/(2T) at t=0 gives T/2 per unit
        # pattern: diag var T/2, off-diagonal re/im var T/4.
        rng = np.random.default_rng(20260815)
        big_t, reps = 2.0, 20000
        diag = np.empty(reps)
        off_re = np.empty(reps)
        for k in range(reps):
            mat = gue_bridge_path(2, big_t, (0.0,), rng)[0]
            diag[k] = mat.diag[0]
            off_re[k] = mat.lower[1, 0].real
        band = 3.0 * np.sqrt(2.0 / reps)
        assert abs(diag.var() / (big_t / 2.0) - 1.0) < band
        assert abs(off_re.var() / (big_t / 4.0) - 1.0) < band

    def test_ensemble_pinning_and_interior_order(self):
        rng = np.random.default_rng(14)
        grid = np.linspace(-1.0, 1.0, 7)
        for _ in range(25):
            path = gue_bridge_ensemble(10, 1.0, grid, rng)
            strict = path.strict_rows()
            assert np.array_equal(path.levels[0], np.zeros(10))
            assert np.array_equal(path.levels[-1], np.zeros(10))
            assert np.all(strict[1:-1])

    def test_top_line_mean_is_concave(self):
        rng = np.random.default_rng(20260815)
        grid = np.linspace(-1.0, 1.0, 9)
        reps = 2000
        top = np.empty((reps, grid.size))
        for r in range(reps):
            top[r] = gue_bridge_ensemble(25, 1.0, grid, rng).levels[:, -1]
        second = top[:, 2:] - 2.0 * top[:, 1:-1] + top[:, :-2]
        mean = second.mean(axis=0)
        se = second.std(axis=0, ddof=1) / np.sqrt(reps)
        assert np.all(mean + 3.0 * se < 0.0)

    def test_grid_validation(self):
        rng = np.random.default_rng(15)
        with pytest.raises(InvalidParameterError):
            gue_bridge_path(3, 1.0, (-1.5, 0.0), rng)
        with pytest.raises(InvalidParameterError):
            gue_bridge_path(3, 1.0, (0.0, 1.5), rng)


class TestEdgeProcess:
    def test_kind_validation(self):
        rng = np.random.default_rng(16)
        with pytest.raises(InvalidParameterError):
            edge_process_samples("dyson", 10, (0.0, 1.0), rng)
        with pytest.raises(InvalidParameterError):
            edge_process_samples("ou-stationary", 10, (0.0, 1.0), rng,
                                 replicas=0)

    def test_single_time_reduces_to_gue_edge(self):
        seed = 20260815
        out = edge_process_samples("ou-stationary", 30, (0.7,),
                                   np.random.default_rng(seed))
        lam = sample_gue(30, np.random.default_rng(seed)).eigenvalues()[-1]
        expected = (lam - 60.0) / 30.0 ** (1.0 / 3.0)
        assert out.shape == (1, 1)
        assert out[0, 0] == expected

    def test_marginals_are_stationary(self):
        rng = np.random.default_rng(20260815)
        samples = edge_process_samples("ou-stationary", 50, (0.0, 1.0), rng,
                                       replicas=1500)
        # The pooled marginals are identically distributed; positive
        # cross-correlation only shrinks the two-sample statistic, so the
        # independent-pairs threshold is conservative.
        stat = ks_2samp(samples[:, 0], samples[:, 1]).statistic
        assert stat <= 1.628 * np.sqrt(2.0 / 1500)

    def test_two_time_covariance_tracks_airy(self):
        rng = np.random.default_rng(20260815)
        samples = edge_process_samples("ou-stationary", 100, (0.0, 1.0), rng,
                                       replicas=4000)
        cov = np.cov(samples[:, 0], samples[:, 1])[0, 1]
        assert abs(cov / G2_LAG1 - 1.0) < 0.25
