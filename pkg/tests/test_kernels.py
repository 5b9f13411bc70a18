"""Kernel layer: backend equivalence, root tracking, segment quadrature."""

import json
import math
import os
import subprocess
import sys

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localp2 import _kernels as K

# ---------------------------------------------------------------------------
# oracle: mpmath for gamma/digamma/elliptic/2F1 reference values
# ---------------------------------------------------------------------------


def mp_gamma(z):
    return complex(mp.gamma(complex(z)))


def mp_digamma(z):
    return complex(mp.digamma(complex(z)))


def mp_hyp_half(z):
    return complex(mp.hyp2f1(mp.mpf(1) / 2, mp.mpf(1) / 2, 1, complex(z)))


SAMPLE_Z = [0.3 + 0.0j, -1.7 + 2.2j, 4.5 - 3.1j, 0.5 + 0.8660254j, -6.0 + 0.25j]


def test_gamma_against_mpmath():
    for z in SAMPLE_Z:
        got = complex(K.gamma_array(z)[0])
        want = mp_gamma(z)
        assert abs(got - want) <= 1e-12 * abs(want)


def test_digamma_against_mpmath():
    for z in SAMPLE_Z:
        got = complex(K.digamma_array(z)[0])
        want = mp_digamma(z)
        assert abs(got - want) <= 1e-11 * max(1.0, abs(want))


def test_hyp2f1_half_against_mpmath():
    for z in (0.25, -0.75, 0.2 + 0.6j, -2.0 + 1.0j, 0.5 + 0.8660254037844386j):
        vals, ok = K.hyp2f1_half_array(complex(z))
        assert ok
        want = mp_hyp_half(z)
        assert abs(complex(vals[0]) - want) <= 1e-12 * abs(want)


def test_ellipke_against_mpmath():
    for k in (0.2, 0.9, 0.3 + 0.4j):
        kk, ee, ok = K.ellipke_array(complex(k))
        assert ok
        want_k = complex(mp.ellipk(complex(k) ** 2))
        want_e = complex(mp.ellipe(complex(k) ** 2))
        assert abs(complex(kk[0]) - want_k) <= 1e-12 * abs(want_k)
        assert abs(complex(ee[0]) - want_e) <= 1e-12 * abs(want_e)


# segment integral: Euler-branch identity oracle on a fixed triple.
# 2 * seg(xa -> xb | xc) = 2 pi F(sigma) / sqrt(xc - xa), sigma = (xb-xa)/(xc-xa)
def test_segment_integral_euler_identity():
    xa, xb, xc = 0.0 + 0j, 1.0 + 0j, 2.0 + 0j
    sigma = (xb - xa) / (xc - xa)
    want = math.pi * mp_hyp_half(sigma) / math.sqrt(2.0)
    got = complex(K.segment_integral(xa, xb, xc, 96))
    assert abs(got - want) <= 1e-12 * abs(want)


def test_segment_integral_converges_spectrally():
    xa, xb, xc = -0.3 + 0.1j, 0.9 - 0.4j, 1.4 + 1.1j
    v64 = K.segment_integral(xa, xb, xc, 64)
    v128 = K.segment_integral(xa, xb, xc, 128)
    v256 = K.segment_integral(xa, xb, xc, 256)
    assert abs(v128 - v256) <= max(1e-13, abs(v64 - v128))
    assert abs(v128 - v256) < 1e-12


@given(st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_cubic_roots_vieta(z):
    roots = K.cubic_roots(complex(z))
    h = 0.5 * complex(z)
    s1 = roots.sum()
    s2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
    s3 = roots.prod()
    scale = 1.0 + abs(h) ** 2
    assert abs(s1 + h * h) <= 1e-12 * scale
    assert abs(s2 - h) <= 1e-12 * scale
    assert abs(s3 + 0.25) <= 1e-12 * scale


def test_track_roots_continuity():
    seed = K.cubic_roots(0j)
    zs = np.linspace(0, 2.5, 400) * np.exp(0.3j)
    tracked = K.track_roots(zs.astype(np.complex128), seed)
    steps = np.abs(np.diff(tracked, axis=0))
    assert steps.max() < 0.05
    # labels must match the seed at the start
    assert np.allclose(tracked[0], seed, atol=1e-10)


def test_backend_flag_reports():
    assert K.BACKEND in ("numba", "numpy")


@pytest.mark.skipif(K.BACKEND != "numba", reason="needs the compiled backend in-process")
def test_numpy_backend_matches_numba():
    """Same numbers from both backends, checked through a subprocess with the
    fallback flag set."""
    script = (
        "import json, numpy as np\n"
        "from localp2 import _kernels as K\n"
        "zs = [0.3+0j, -1.7+2.2j, 0.5+0.8660254j]\n"
        "out = {'backend': K.BACKEND}\n"
        "out['gamma'] = [[complex(K.gamma_array(z)[0]).real,"
        " complex(K.gamma_array(z)[0]).imag] for z in zs]\n"
        "out['hyp'] = [[complex(K.hyp2f1_half_array(z)[0][0]).real,"
        " complex(K.hyp2f1_half_array(z)[0][0]).imag] for z in zs]\n"
        "seg = K.segment_integral(-0.3+0.1j, 0.9-0.4j, 1.4+1.1j, 128)\n"
        "out['seg'] = [seg.real, seg.imag]\n"
        "print(json.dumps(out))\n"
    )
    env = dict(os.environ, LOCALP2_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", script], env=env,
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    other = json.loads(proc.stdout)
    assert other["backend"] == "numpy"
    zs = [0.3 + 0j, -1.7 + 2.2j, 0.5 + 0.8660254j]
    for z, pair in zip(zs, other["gamma"]):
        assert abs(complex(K.gamma_array(z)[0]) - complex(*pair)) < 1e-13
    for z, pair in zip(zs, other["hyp"]):
        assert abs(complex(K.hyp2f1_half_array(z)[0][0]) - complex(*pair)) < 1e-13
    seg = K.segment_integral(-0.3 + 0.1j, 0.9 - 0.4j, 1.4 + 1.1j, 128)
    assert abs(seg - complex(*other["seg"])) < 1e-13
