"""The compiled and pure-numpy kernel paths must agree bit-for-bit-ish."""

import importlib
import os

import numpy as np
import pytest

import deltapart._kernels as kernels


def _structured(n):
    xs, ys = np.meshgrid(np.linspace(0, 1, n + 1), np.linspace(0, 1, n + 1),
                         indexing="ij")
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    a = (i * (n + 1) + j).ravel()
    b = ((i + 1) * (n + 1) + j).ravel()
    c = (i * (n + 1) + j + 1).ravel()
    d = ((i + 1) * (n + 1) + j + 1).ravel()
    tris = np.vstack([np.column_stack([a, b, c]),
                      np.column_stack([b, d, c])])
    return pts, np.ascontiguousarray(tris, dtype=np.int64)


def test_p1_elements_reference_values():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2]], dtype=np.int64)
    stiff, mass, area = kernels.p1_elements(pts, tris)
    assert area[0] == pytest.approx(0.5)
    # exact P1 element mass: area/12 * [[2,1,1],[1,2,1],[1,1,2]]
    m_ref = (0.5 / 12.0) * np.array([2, 1, 1, 1, 2, 1, 1, 1, 2], dtype=float)
    assert np.allclose(mass[0], m_ref, rtol=0, atol=1e-16)
    k_ref = 0.5 * np.array([2, -1, -1, -1, 1, 0, -1, 0, 1], dtype=float)
    assert np.allclose(stiff[0], k_ref, rtol=0, atol=1e-15)


def test_linear_algebra_kernels_against_lapack():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((40, 40))
    S = np.ascontiguousarray(B @ B.T + 40 * np.eye(40))
    L = kernels.cholesky_lower(S)
    assert np.max(np.abs(L @ L.T - S)) <= 1e-11 * np.max(np.abs(S))
    X = kernels.solve_lower(L, np.eye(40))
    assert np.max(np.abs(L @ X - np.eye(40))) <= 1e-12
    C = np.ascontiguousarray(0.5 * (B + B.T))
    d, e = kernels.tridiagonalize(C)
    ev = np.sort(kernels.tridiag_eigenvalues(d, e))
    assert np.max(np.abs(ev - np.linalg.eigvalsh(C))) <= 1e-11


def test_cholesky_signals_non_spd():
    L = kernels.cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert L.shape[0] == 0


def test_both_paths_agree():
    """Reload the module under the fallback flag and compare outputs."""
    pts, tris = _structured(12)
    a = kernels.p1_elements(pts, tris)
    orig_numba = kernels.USING_NUMBA
    flag = os.environ.get("DELTAPART_NO_NUMBA")
    try:
        os.environ["DELTAPART_NO_NUMBA"] = "1" if orig_numba else "0"
        other = importlib.reload(kernels)
        if other.USING_NUMBA == orig_numba:
            pytest.skip("only one kernel path available")
        b = other.p1_elements(pts, tris)
        for x, y in zip(a, b):
            assert np.max(np.abs(x - y)) <= 1e-15
    finally:
        if flag is None:
            os.environ.pop("DELTAPART_NO_NUMBA", None)
        else:
            os.environ["DELTAPART_NO_NUMBA"] = flag
        importlib.reload(kernels)
