import math
import os
import subprocess
import sys

import numpy as np
import pytest

from darboux import kernels

PRM = {"Free": np.zeros(3), "P1": np.array([0.5, 0.2, 0.1]), "P2": np.array([0.5, 0.3, 0.2]),
       "P3": np.array([1.0, 0.0, 0.0])}


def test_backend_selection_reports_a_known_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.available_backends()


def test_pure_python_forced_by_environment():
    env = dict(os.environ, DARBOUX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import darboux.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_numerov_oscillator_ground_state(backend):
    # psi'' + (1 - x^2) psi = 0 has psi = exp(-x^2/2); sweep the left half from the exact tail
    h = 1e-3
    x = np.arange(-8, h / 2, h)
    q = 1 - x * x
    exact = np.exp(-0.5 * x * x)
    y, nodes = backend.numerov_sweep(q, exact[0], exact[1], h)
    assert nodes == 0
    assert np.max(np.abs(y / y[-1] - exact)) < 1e-9


def test_numerov_sine_nodes(backend):
    h = 1e-3
    x = np.arange(0, 3 * math.pi + 0.5, h)
    q = np.ones_like(x)
    yl, yp, nodes = backend.numerov_shoot(q, 0.0, math.sin(h), h)
    assert nodes == 3
    assert yl == pytest.approx(math.sin(x[-1]), abs=1e-9)
    assert yp == pytest.approx(math.sin(x[-2]), abs=1e-9)


def test_numerov_start_sign_change_counts(backend):
    q = np.zeros(5)
    assert backend.numerov_shoot(q, 1.0, -1.0, 0.1)[2] == backend.numerov_sweep(q, 1.0, -1.0, 0.1)[1]


def test_numerov_rescaling_keeps_sign_and_shape(backend):
    h = 1e-2
    x = np.arange(0, 400, h)
    q = -np.ones_like(x)  # exp(x) growth overflows without rescaling
    yl, yp, nodes = backend.numerov_shoot(q, 1.0, math.exp(h), h)
    assert math.isfinite(yl) and yl > 0 and nodes == 0
    assert yl / yp == pytest.approx(math.exp(h), rel=1e-6)


def test_backends_agree_on_numerov():
    backs = kernels.available_backends()
    if len(backs) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(1)
    q = rng.uniform(-3, 3, 5000)
    a = backs["python"].numerov_sweep(q, 0.0, 1e-3, 1e-3)
    b = backs["cython"].numerov_sweep(q, 0.0, 1e-3, 1e-3)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-13, atol=0)
    assert a[1] == b[1]
    assert backs["python"].numerov_shoot(q, 0.0, 1e-3, 1e-3)[2] == backs["cython"].numerov_shoot(q, 0.0, 1e-3, 1e-3)[2]


@pytest.mark.parametrize("model", sorted(PRM))
def test_backends_agree_on_midpoint(model):
    backs = kernels.available_backends()
    if len(backs) < 2:
        pytest.skip("compiled backend not built")
    y0 = np.array([2.0, 0.5, 0.3, 0.4])
    code = kernels.MODEL_CODES[model]
    a, na, sa = backs["python"].midpoint_run(y0, code, PRM[model], 1e-3, 500, 1e-13, 50)
    b, nb, sb = backs["cython"].midpoint_run(y0, code, PRM[model], 1e-3, 500, 1e-13, 50)
    assert (na, sa) == (nb, sb) == (500, kernels.OK)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)


def test_midpoint_domain_exit_status(backend):
    # a strong inward kick drives u through zero
    y, status = backend.midpoint_step(np.array([0.01, 0.0, -5.0, 0.0]), 0, np.zeros(3), 1.0, 1e-13, 50)
    assert status in (kernels.DOMAIN_EXIT, kernels.NO_CONVERGENCE)


def test_midpoint_fixed_point(backend):
    y, status = backend.midpoint_step(np.array([1.0, 0.0, 0.0, 0.0]), 0, np.zeros(3), 0.01, 1e-13, 50)
    assert status == kernels.OK
    np.testing.assert_array_equal(y, [1.0, 0.0, 0.0, 0.0])
