import math

import numpy as np
import pytest

import til


def test_spectral_gap_of_uniform_measure():
    r = til.spectral_gap(np.zeros(8), 3)
    assert r["poincare"] == pytest.approx(1.0)
    assert r["convention"] == "kernel"
    assert len(r["eigenvalues"]) == 8


def test_tensor_roundtrip_and_norms():
    u = np.array([1.0, 0.0, 0.0])
    T = til.SymTensor4.rank1(u)
    assert T.n == 3
    assert T(0, 0, 0, 0) == pytest.approx(1.0)
    lo, hi, x = til.injective_norm(T)
    assert lo == pytest.approx(1.0, abs=1e-9)
    assert hi == pytest.approx(1.0, abs=1e-9)
    U = til.SymTensor4.from_json(T.to_json())
    assert np.allclose(U.potential_table(), T.potential_table())
    assert T.flatten().shape == (9, 9)


def test_certificate_and_constant():
    assert til.certificate(til.SymTensor4(4))["bound"] == 1.0
    assert til.spin_glass_constant() == pytest.approx(1205.568)
    big = til.certificate(til.SymTensor4.curie_weiss(4, 10.0))
    assert big["bound"] is None


def test_dobrushin_matrices():
    H = til.curie_weiss_potential(4, 0.1, 2.0)
    A = til.influence_matrix(H, 4)
    D = til.derivative_matrix(H, 4)
    assert A.shape == (4, 4)
    assert np.all(A <= D + 1e-12)


def test_beta_star_and_mixing():
    assert til.beta_star(4.0) == pytest.approx(0.5042495, abs=1e-6)
    t, bound = til.mixing_time(np.zeros(8), 3)
    assert t <= bound


def test_decompose_small():
    rng = np.random.default_rng(0)
    T = til.SymTensor4(3)
    for _ in range(4):
        T = T + til.SymTensor4.rank1(0.4 * rng.standard_normal(3))
    comps = til.decompose(T, seed=3, samples=2)
    assert len(comps) == 2
    assert all(c["ledger"]["all"] for c in comps)
    assert comps == til.decompose(T, seed=3, samples=2)


def test_errors_map_to_python():
    with pytest.raises(til.DimensionError):
        til.spectral_gap(np.zeros(2**13), 13)
    with pytest.raises(til.ParseError):
        til.SymTensor4.from_json('{"n": "x", "entries": []}')
    with pytest.raises(til.Error):
        til.beta_star(1.0)


def test_smoothed_projection_kills_v():
    Hb = np.eye(4)
    v = np.array([10.0, 0, 0, 0])
    C = til.smoothed_projection(Hb, v, np.zeros(4), 0.1)
    assert np.linalg.norm(C @ v) <= 0.1 + 1e-10
    assert math.isclose(np.trace(C), 3.0, abs_tol=1e-10)
