"""The compiled kernels and the numpy fallback must agree."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from geoch import _fallback as py
from geoch import catalog as cat
from geoch import quantum as q

cy = pytest.importorskip("geoch._kernels")

CHM = cat.make_probability("geometric_tripartite_ch")
MERMIN = cat.to_correlation_form(cat.make_separation("geometric_tripartite_ch"))
RNG_SEEDS = range(5)


def _inputs(seed, mode):
    rng = np.random.default_rng(seed)
    per = 2 if mode == 0 else 1
    return rng.uniform(0, 2 * math.pi, 3 * 2 * per), rng.uniform(0.3, 1.0)


@pytest.mark.parametrize("mode", [0, 1, 2])
@pytest.mark.parametrize("kind", [0, 1])
def test_setting_ops_and_bell_matrix(mode, kind):
    coeffs, m = q.coefficient_tensor(CHM)
    for seed in RNG_SEEDS:
        x, eta = _inputs(seed, mode)
        a = py.setting_ops(x, 3, m, eta, mode, kind)
        b = cy.setting_ops(x, 3, m, eta, mode, kind)
        assert np.allclose(a, b, atol=1e-14)
        assert np.allclose(py.bell_matrix(coeffs, a), cy.bell_matrix(coeffs, b), atol=1e-12)


def test_local_moments():
    rho = q.make_state("w", [0.4, 1.1], visibility=0.7)
    x, eta = _inputs(1, 0)
    ops = cy.setting_ops(x, 3, 2, eta, 0, 0)
    assert np.allclose(py.local_moments(rho, ops), cy.local_moments(rho, ops), atol=1e-13)


def test_bell_matrix_matches_reference_operator():
    x, eta = _inputs(2, 0)
    coeffs, m = q.coefficient_tensor(CHM)
    ops = cy.setting_ops(x, 3, m, eta, 0, 0)
    ref = q.bell_operator(CHM, q.settings_from_angles(x, 3, 2), eta)
    assert np.allclose(cy.bell_matrix(coeffs, ops), ref, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 32])
def test_jacobi(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = np.ascontiguousarray(a + a.conj().T)
    wa, va, sa = py.jacobi_eigh(h)
    wb, vb, sb = cy.jacobi_eigh(h)
    assert sa >= 0 and sb >= 0
    ref = np.linalg.eigvalsh(h)
    assert np.allclose(wa, ref, atol=1e-10) and np.allclose(wb, ref, atol=1e-10)
    for w, v in ((wa, va), (wb, vb)):
        assert np.linalg.norm(h @ v - v * w) < 1e-9
        assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)


def test_jacobi_reports_non_convergence():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    h = np.ascontiguousarray(a + a.T, dtype=complex)
    assert py.jacobi_eigh(h, max_sweeps=1)[2] == -1
    assert cy.jacobi_eigh(h, max_sweeps=1)[2] == -1


@pytest.mark.parametrize("objective", ["expect", "eig"])
@pytest.mark.parametrize("ineq", [CHM, MERMIN], ids=["probability", "correlation"])
def test_problem_evaluate(objective, ineq):
    if isinstance(ineq, cat.CorrelationInequality):
        coeffs, m = q.correlation_tensor(ineq)
        kind = 1
    else:
        coeffs, m = q.coefficient_tensor(ineq)
        kind = 0
    rho = q.make_state("ghz", [0.6])
    extra = {"rho": rho} if objective == "expect" else {"basis": q.W_EPR_BASIS}
    for mode in (0, 1, 2):
        x, eta = _inputs(3 + mode, mode)
        a = py.Problem(coeffs, 3, m, eta, mode, kind, objective, **extra)
        b = cy.Problem(coeffs, 3, m, eta, mode, kind, objective, **extra)
        assert a.nvar == b.nvar == len(x)
        assert a.evaluate(x) == pytest.approx(b.evaluate(x), abs=1e-12)


def test_problem_minimize_agrees():
    coeffs, m = q.coefficient_tensor(CHM)
    rho = q.make_state("ghz", [math.pi / 4])
    x0 = np.full(6, 0.3)
    a = py.Problem(coeffs, 3, m, 1.0, 1, 0, "expect", rho=rho)
    b = cy.Problem(coeffs, 3, m, 1.0, 1, 0, "expect", rho=rho)
    xa, fa, _, _ = a.minimize(x0, 0.5, 1e-12, 1e-9, 2000)
    xb, fb, _, _ = b.minimize(x0, 0.5, 1e-12, 1e-9, 2000)
    assert fa == pytest.approx(fb, abs=1e-9)
    assert a.evaluations > 0 and b.evaluations > 0


def test_pure_python_switch():
    env = dict(os.environ, GEOCH_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import geoch; print(geoch.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_pure_python_pipeline_matches():
    code = (
        "import math, geoch\n"
        "from geoch import catalog as cat, quantum as q, violation as vio\n"
        "cfg = vio.OptimizerConfig(starts=2, plane='xy')\n"
        "ineq = cat.make_probability('geometric_tripartite_ch')\n"
        "print(geoch.BACKEND, repr(vio.min_expectation(ineq, q.state_vector('ghz', [math.pi / 4]), 1.0, cfg)[1]))\n"
    )
    values = {}
    for pure in ("0", "1"):
        env = dict(os.environ, GEOCH_PURE=pure)
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        backend, value = out.stdout.split()
        values[backend] = float(value)
    assert set(values) == {"python", "cython"}
    assert values["python"] == pytest.approx(values["cython"], abs=1e-8)
    assert values["cython"] == pytest.approx(-0.5, abs=1e-8)
