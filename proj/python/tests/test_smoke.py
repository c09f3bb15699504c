import cmath
import math

import numpy as np
import pytest

import btlab


def test_poincare_identity():
    pd = btlab.poincare_data(np.eye(4))
    assert pd["nu"] == pytest.approx(4.0)
    assert np.allclose(pd["Q"], 2 * np.eye(4))
    assert np.allclose(pd["R"], 0)


def test_non_symplectic_raises():
    with pytest.raises(ValueError):
        btlab.poincare_data(np.diag([1.0, 2.0]))


def test_polar_of_rotation():
    t = 0.8
    R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    O, P = btlab.polar_decompose(R)
    assert np.allclose(O, R)
    assert np.allclose(P, np.eye(2))


def test_gaussian():
    v = btlab.gaussian_closed_form(2 * np.eye(2), np.zeros(2), np.zeros(2), 0.0)
    assert abs(v - math.pi) < 1e-14


def test_model_phase():
    H, Hinv, sig = btlab.model_phase_hessian(0.3, 1.0)
    assert np.array_equal(H @ Hinv, np.eye(4))
    assert round(np.linalg.det(H)) == 1
    assert sig == 0


def test_level_and_kernel():
    L = btlab.level(12)
    assert L.dim == 13
    x = np.array([1.0, 0.0], dtype=complex)
    assert btlab.szego_kernel(L, x, x) == pytest.approx(13 / math.pi)
    T = btlab.toeplitz(L, lambda n: n[2])
    assert np.allclose(T, T.conj().T)
    assert np.allclose(np.sort(np.linalg.eigvalsh(T)), np.arange(-12, 13, 2) / 14)


def test_evolution_and_lefschetz():
    k, th = 20, 0.9
    U = btlab.evolution(btlab.level(k), "rotation", th)
    assert np.allclose(U.conj().T @ U, np.eye(k + 1))
    geo = math.sin((k + 1) * th / 2) / math.sin(th / 2)
    assert abs(np.trace(U) - geo) < 1e-10
    assert abs(btlab.predict_trace_fixed("rotation", th, k) - geo) < 1e-10
    assert abs(btlab.exact_weight_trace("rotation", k, th) - geo) < 1e-10


def test_rescaled_prediction_conjugates():
    a = btlab.predict_trace_rescaled("rotation", 64, 1.0)
    b = btlab.predict_trace_rescaled("rotation", 64, -1.0)
    assert abs(a - b.conjugate()) < 1e-12
    with pytest.raises(ValueError):
        btlab.predict_trace_rescaled("rotation", 64, 1.0, C=0.4)


def test_run_trace_fixed():
    rep = btlab.run("trace-fixed", {"hamiltonian": "rotation", "tau0": 0.9, "k": [4, 8, 16],
                                    "tolerances": {"exact": 1e-8}})
    assert rep["pass"]
    assert [r["k"] for r in rep["series"][0]["rows"]] == [4, 8, 16]


def test_bad_config():
    with pytest.raises(ValueError):
        btlab.run("trace-fixed", {"k": [8, 4]})


def test_selftest_deterministic():
    a, b = btlab.selftest(3), btlab.selftest(3)
    assert a == b
    assert a["pass"]
