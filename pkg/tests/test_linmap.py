import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tomosep.config import get_tolerances, tolerances
from tomosep.errors import DimensionMismatch, NotHermitianError, NotPositiveError, NotUnitaryError
from tomosep.linmap import (
    METRIC_G,
    SIGMA_1,
    SIGMA_3,
    DensityMatrix,
    Superoperator,
    action_superop,
    eig_hermitian,
    embedding_matrix,
    haar_unitary,
    hs_distance,
    random_density_matrix,
    random_hermitian,
    real_embed,
    real_unembed,
    sqrt_distance,
    unvec,
    vec,
)
from tomosep.separability import werner_state


def test_vec_row_major():
    assert np.array_equal(vec([[1, 2], [3, 4]]), [1, 2, 3, 4])
    assert np.array_equal(vec(np.eye(2)), [1, 0, 0, 1])
    assert np.array_equal(vec([[5, 6, 7]]), [5, 6, 7])


def test_unvec_inverse(rng):
    assert np.array_equal(unvec([1, 2, 3, 4], 2, 2), [[1, 2], [3, 4]])
    assert np.array_equal(unvec([1, 0, 0, 1], 2, 2), np.eye(2))
    for _ in range(50):
        r = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        assert np.array_equal(unvec(vec(r), 3, 4), r)


def test_unvec_size_mismatch():
    with pytest.raises(DimensionMismatch, match="5"):
        unvec(np.arange(5), 2, 2)


@pytest.mark.parametrize("mode", ["left", "right", "similarity", "adjoint"])
def test_action_identity(mode):
    assert np.allclose(action_superop(np.eye(3), mode).mat, np.eye(9), atol=0)


@pytest.mark.parametrize("mode", ["left", "right", "similarity", "adjoint"])
def test_action_consistency(mode, rng):
    for _ in range(100):
        g = haar_unitary(3, rng) if mode == "adjoint" else rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        want = {"left": g @ m, "right": m @ g, "similarity": g @ m @ np.linalg.inv(g),
                "adjoint": g @ m @ g.conj().T}[mode]
        got = unvec(action_superop(g, mode).mat @ vec(m), 3, 3)
        assert np.max(np.abs(got - want)) <= 1e-10


def test_similarity_sigma1_flips_sigma3():
    out = action_superop(SIGMA_1, "similarity").apply(SIGMA_3)
    assert np.allclose(out, -SIGMA_3, atol=1e-15)


def test_similarity_composition(rng):
    g1, g2 = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(2))
    lhs = (action_superop(g1, "similarity") @ action_superop(g2, "similarity")).mat
    assert np.max(np.abs(lhs - action_superop(g1 @ g2, "similarity").mat)) <= 1e-10


def test_similarity_singular_names_mode():
    with pytest.raises(ValueError, match="similarity"):
        action_superop(np.array([[1, 1], [1, 1]]), "similarity")


def test_adjoint_needs_unitary():
    with pytest.raises(NotUnitaryError):
        action_superop(np.array([[2, 0], [0, 1]]), "adjoint")


def test_metric_squares_to_identity():
    assert np.array_equal(METRIC_G @ METRIC_G, np.eye(4))


def test_real_embed_examples():
    assert np.allclose(real_embed(np.eye(2) / 2), [0.5, 0, 0, 0.5], atol=1e-15)
    assert np.allclose(real_embed((np.eye(2) + SIGMA_1) / 2), [0.5, math.sqrt(2) / 2, 0, 0.5], atol=1e-15)
    rho = np.array([[0.6, 0.1 - 0.2j], [0.1 + 0.2j, 0.4]])
    assert np.allclose(real_embed(rho), [0.6, math.sqrt(2) * 0.1, -math.sqrt(2) * 0.2, 0.4], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_real_embed_norm_and_inverse(n, rng):
    s = embedding_matrix(n)
    assert np.max(np.abs(s @ s.conj().T - np.eye(n * n))) <= 1e-12
    rho = random_density_matrix(n, rng)
    r = real_embed(rho)
    assert r.dtype.kind == "f"
    assert abs(r @ r - np.trace(rho @ rho).real) <= 1e-12
    assert np.max(np.abs(real_unembed(r) - rho)) <= 1e-12


def test_real_embed_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        real_embed(np.array([[1, 1], [0, 0]]))


def test_distances():
    plus, minus = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert hs_distance(plus, plus) == 0 and sqrt_distance(plus, plus) == 0
    assert hs_distance(plus, minus) ** 2 == pytest.approx(2, abs=1e-14)
    assert sqrt_distance(plus, minus) ** 2 == pytest.approx(2, abs=1e-14)


def test_hs_distance_matches_vector_norm(rng):
    a, b = random_density_matrix(3, rng), random_density_matrix(3, rng)
    assert hs_distance(a, b) ** 2 == pytest.approx(np.linalg.norm(vec(a) - vec(b)) ** 2, abs=1e-14)


def test_sqrt_distance_rejects_negative():
    with pytest.raises(NotPositiveError):
        sqrt_distance(np.diag([1.1, -0.1]), np.eye(2) / 2)


def test_eig_examples():
    lam, _ = eig_hermitian(SIGMA_3)
    assert np.array_equal(lam, [1, -1])
    lam, v = eig_hermitian(SIGMA_1)
    assert np.allclose(lam, [1, -1])
    assert np.allclose(np.abs(v), 1 / math.sqrt(2))
    lam, _ = eig_hermitian(werner_state(1.0).mat)
    assert np.allclose(lam, [1, 0, 0, 0], atol=1e-14)


@pytest.mark.parametrize("n", [1, 5, 17, 81])
def test_eig_reconstruction(n, rng):
    a = random_hermitian(n, rng)
    lam, v = eig_hermitian(a)
    assert np.all(np.diff(lam) <= 0)
    assert np.max(np.abs(v @ v.conj().T - np.eye(n))) <= 1e-10
    assert np.max(np.abs((v * lam) @ v.conj().T - a)) <= 1e-10


def test_eig_phase_canonical(rng):
    _, v = eig_hermitian(random_hermitian(4, rng))
    for col in v.T:
        k = np.argmax(np.abs(col))
        assert abs(col[k].imag) <= 1e-14 and col[k].real > 0


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_haar_basic():
    u = haar_unitary(1, np.random.default_rng(3))
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) <= 1e-15
    a = haar_unitary(4, np.random.default_rng(9))
    b = haar_unitary(4, np.random.default_rng(9))
    assert np.array_equal(a, b)
    assert np.max(np.abs(a @ a.conj().T - np.eye(4))) <= 1e-12


def test_haar_first_moment():
    rng = np.random.default_rng(1)
    mean = np.mean([abs(haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(2000)])
    assert abs(mean - 0.5) <= 0.03


def test_haar_phase_distribution():
    # Plain QR fixes the sign of R's diagonal; the phase correction makes u11's phase uniform.
    rng = np.random.default_rng(2)
    phases = np.array([np.angle(haar_unitary(2, rng)[0, 0]) for _ in range(4000)])
    assert abs(np.mean(np.cos(phases))) < 0.05 and abs(np.mean(np.sin(phases))) < 0.05


def test_density_matrix_invariants():
    DensityMatrix(np.eye(2) / 2)
    with pytest.raises(NotHermitianError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotPositiveError) as exc:
        DensityMatrix(np.diag([1.2, -0.2]))
    assert exc.value.min_eigenvalue == pytest.approx(-0.2)
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(4) / 4, (2, 3))


def test_density_matrix_immutable():
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_tolerance_override():
    assert get_tolerances().spectral == 1e-10
    with tolerances(spectral=0.5):
        DensityMatrix(np.diag([1.2, -0.2]))
    assert get_tolerances().spectral == 1e-10


def test_superoperator_identity():
    ident = Superoperator.identity(3)
    m = np.arange(9).reshape(3, 3)
    assert np.array_equal(ident.apply(m), m)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_vec_round_trip_any_shape(rows, cols, seed):
    r = np.random.default_rng(seed)
    m = r.normal(size=(rows, cols)) + 1j * r.normal(size=(rows, cols))
    v = vec(m)
    assert v.shape == (rows * cols,) and v[cols * (rows - 1)] == m[rows - 1, 0]
    assert np.array_equal(unvec(v, rows, cols), m)
