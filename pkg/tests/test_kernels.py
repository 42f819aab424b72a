"""Backend equivalence and direct kernel checks.

The compiled extension and the pure-Python fallback implement the same
arithmetic; integer outputs must agree exactly and float outputs
bit-for-bit.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from kpzkit import _kernels
from kpzkit._kernels import fallback

try:
    from kpzkit._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None,
                                    reason="compiled backend not built")


def random_droplet(rng, t=2.5):
    n = rng.poisson(t * t)
    u = rng.uniform(0, t, n)
    v = rng.uniform(0, t, n)
    x, s = 0.5 * (u - v), 0.5 * (u + v)
    order = np.lexsort((x, s))
    return x[order], s[order], t


def test_lis_known_values():
    assert _kernels.lis_length([3.0, 1.0, 4.0, 2.0, 5.0]) == 3
    assert _kernels.lis_length([]) == 0
    assert _kernels.lis_length([2.0, 2.0, 2.0]) == 1   # strict increase


def test_lpp_fill_small():
    G = _kernels.lpp_fill(np.array([[1.0, 2.0], [3.0, 4.0]]))
    np.testing.assert_array_equal(G, [[1.0, 3.0], [4.0, 8.0]])


def test_transport_two_event_merge_geometry():
    # events at (+-1, 0.2): inner steps meet at (0, 1.2); outer steps keep
    # travelling and sit at +-2.8 at t=2
    x = np.array([-1.0, 1.0])
    s = np.array([0.2, 0.2])
    sx, sv, ax, at_ = _kernels.png_evolve_steps(x, s, 2.0)
    np.testing.assert_allclose(sx, [-2.8, 2.8])
    np.testing.assert_array_equal(sv, [1, -1])
    np.testing.assert_allclose(ax, [0.0])
    np.testing.assert_allclose(at_, [1.2])


def test_transport_height_equals_cone_lis():
    # h(x*, t) = longest chain of events inside the backward cone, checked
    # for droplet clouds at several query points
    rng = np.random.default_rng(77)
    for _ in range(60):
        x, s, t = random_droplet(rng)
        for qx in (-0.7, 0.0, 1.3):
            sx, sv, _, _ = _kernels.png_evolve_steps(x, s, t)
            h = 0
            for p, v in zip(sx, sv):
                if (v == 1 and p <= qx) or (v == -1 and p < qx):
                    h += v
            u, w = s + x, s - x
            inside = (u <= t + qx) & (w <= t - qx)
            order = np.argsort(u[inside])
            assert h == _kernels.lis_length(w[inside][order])


@needs_compiled
def test_backends_agree_bitwise_on_transport():
    rng = np.random.default_rng(101)
    for _ in range(80):
        x, s, t = random_droplet(rng)
        out_c = _core.png_evolve_steps(x, s, t)
        out_p = fallback.png_evolve_steps(x, s, t)
        for a, b in zip(out_c, out_p):
            np.testing.assert_array_equal(np.asarray(a), np.asarray(b))


@needs_compiled
def test_backends_agree_on_lis_and_lpp():
    rng = np.random.default_rng(55)
    for _ in range(40):
        vals = rng.random(int(rng.integers(0, 200)))
        assert _core.lis_length(vals) == fallback.lis_length(vals)
    w = rng.random((30, 17))
    np.testing.assert_array_equal(_core.lpp_fill(w), fallback.lpp_fill(w))


@needs_compiled
def test_backends_agree_on_batched_heights():
    rng = np.random.default_rng(66)
    xs, ss, offs = [], [], [0]
    for _ in range(50):
        x, s, _ = random_droplet(rng, t=2.0)
        xs.append(x)
        ss.append(s)
        offs.append(offs[-1] + len(x))
    xcat = np.concatenate(xs)
    scat = np.concatenate(ss)
    offsets = np.array(offs, dtype=np.int64)
    hc = _core.png_origin_height_batch(xcat, scat, offsets, 2.0)
    hp = fallback.png_origin_height_batch(xcat, scat, offsets, 2.0)
    np.testing.assert_array_equal(hc, hp)


def test_env_var_forces_python_backend():
    env = dict(os.environ, KPZKIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "import kpzkit._kernels as k; print(k.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_backend_info_reports_selection():
    assert _kernels.backend_info() in ("compiled", "python")
