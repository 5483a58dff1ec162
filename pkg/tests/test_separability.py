import itertools

import numpy as np
import pytest

from tomosep.channels import KrausMap, depolarizing, kraus_superop, transpose_superop
from tomosep.errors import DimensionMismatch, NotPositiveError
from tomosep.linmap import Superoperator, eig_hermitian, haar_unitary, random_density_matrix, random_hermitian
from tomosep.separability import (
    ANTIDIAGONAL_G0,
    BELL_BASIS,
    ENTANGLED,
    SEPARABLE_CONSISTENT,
    WERNER_G0,
    MapProbe,
    SubsystemMapEnsemble,
    depolarizing_probes,
    ensemble_superop,
    generalized_werner,
    generalized_werner_eigenvalues,
    ghz_state,
    multipartite_depolarize,
    partial_trace,
    partial_transpose,
    peres_test,
    qutrit_pair,
    random_separable_state,
    transpose_probes,
    werner_state,
    witness_F,
    witness_scan,
    x_state_check,
    x_state_margins,
)
from tomosep.tomography import unitary_tomogram


def _local(dims, k, m):
    maps = [Superoperator.identity(d) for d in dims]
    maps[k] = m
    return SubsystemMapEnsemble.single(maps)


def _random_cp_superop(n, rng):
    raw = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(2)]
    lam, w = np.linalg.eigh(sum(v.conj().T @ v for v in raw))
    s = (w / np.sqrt(lam)) @ w.conj().T
    return kraus_superop(KrausMap(tuple(v @ s for v in raw)))


def test_partial_transpose_product(rng):
    r1, r2 = random_density_matrix(2, rng), random_density_matrix(3, rng)
    pt = partial_transpose(np.kron(r1, r2), (2, 3), 1)
    assert np.allclose(pt, np.kron(r1, r2.T), atol=1e-15)
    assert np.linalg.eigvalsh(pt)[0] >= -1e-12


def test_partial_transpose_involution_and_trace(rng):
    rho = random_density_matrix(6, rng)
    for k in (0, 1):
        pt = partial_transpose(rho, (2, 3), k)
        assert np.array_equal(partial_transpose(pt, (2, 3), k), rho)
        assert np.trace(pt) == pytest.approx(np.trace(rho))
    both = partial_transpose(partial_transpose(rho, (2, 3), 0), (2, 3), 1)
    assert np.array_equal(both, rho.T)


def test_partial_transpose_bad_index():
    with pytest.raises(IndexError):
        partial_transpose(np.eye(4) / 4, (2, 2), 2)


def test_werner_examples():
    assert np.allclose(werner_state(0).mat, np.eye(4) / 4)
    w = werner_state(1).mat
    assert w[0, 0] == w[3, 3] == w[0, 3] == 0.5 and w[1, 1] == w[2, 2] == 0
    for p in (0, 0.4, 1):
        for keep in ([0], [1]):
            assert np.allclose(partial_trace(werner_state(p).mat, (2, 2), keep), np.eye(2) / 2)
    with pytest.raises(ValueError):
        werner_state(1.2)
    lam, _ = eig_hermitian(werner_state(0.6).mat)
    assert np.allclose(lam, [(1 + 3 * 0.6) / 4] + [(1 - 0.6) / 4] * 3)


def test_werner_p1_negative_partial_transpose():
    assert np.linalg.eigvalsh(partial_transpose(werner_state(1).mat, (2, 2), 1))[0] == pytest.approx(-0.5)


def test_peres_examples(rng):
    assert peres_test(werner_state(0.2))[0]
    ppt, lam = peres_test(werner_state(0.5))
    assert not ppt and lam == pytest.approx((1 - 3 * 0.5) / 4)
    assert peres_test(np.kron(random_density_matrix(2, rng), random_density_matrix(2, rng)), (2, 2))[0]


def test_x_state_check():
    assert x_state_margins(werner_state(1 / 3))[1] == pytest.approx(0, abs=1e-12)
    assert x_state_check(werner_state(0.9)) == (True, False)
    assert x_state_check(np.diag([0.1, 0.2, 0.3, 0.4])) == (True, True)
    with pytest.raises(ValueError):
        x_state_check(np.full((4, 4), 0.25))


def test_generalized_werner():
    assert np.allclose(generalized_werner([0, 0, 0]).mat, np.eye(4) / 4)
    lam = np.sort(np.linalg.eigvalsh(generalized_werner([-1, -1, -1]).mat))[::-1]
    assert np.allclose(lam, [1, 0, 0, 0], atol=1e-15)
    mu = [0.2, -0.3, 0.1]
    assert np.allclose(np.sort(np.linalg.eigvalsh(generalized_werner(mu).mat)),
                       np.sort(generalized_werner_eigenvalues(mu)), atol=1e-12)
    with pytest.raises(NotPositiveError):
        generalized_werner([1, 1, 1])


def test_generalized_werner_partial_transpose_flips_signs():
    mu = [0.2, -0.3, 0.1]
    pt = partial_transpose(generalized_werner(mu).mat, (2, 2), 1)
    # transposing the second factor flips sigma_2 only; a local sigma_2 rotation then flips all three
    flipped = np.sort(np.linalg.eigvalsh(pt))
    assert np.allclose(flipped, np.sort(generalized_werner_eigenvalues([-m for m in mu])), atol=1e-12)


def test_octahedron():
    grid = np.linspace(-1, 1, 9)
    for mu in itertools.product(grid, repeat=3):
        if generalized_werner_eigenvalues(mu).min() < -1e-12:
            continue
        assert peres_test(generalized_werner(mu))[0] == (sum(map(abs, mu)) <= 1 + 1e-12)


def test_qutrit_pair_schmidt():
    for kind, want in (("three-term", [1 / 3] * 3), ("two-term", [0.5, 0.5, 0])):
        rho = qutrit_pair(kind)
        assert np.trace(rho.mat) == pytest.approx(1) and np.linalg.matrix_rank(rho.mat) == 1
        assert np.allclose(np.sort(np.linalg.eigvalsh(partial_trace(rho.mat, (3, 3), [0])))[::-1], want)


def test_ensemble_identity(rng):
    assert np.allclose(ensemble_superop(SubsystemMapEnsemble.identity((2, 3)), (2, 3)).mat, np.eye(36))


def test_ensemble_transpose_is_partial_transpose(rng):
    rho = random_density_matrix(6, rng)
    for k, d in enumerate((2, 3)):
        e = _local((2, 3), k, transpose_superop(d))
        assert np.allclose(ensemble_superop(e, (2, 3)).apply(rho), partial_transpose(rho, (2, 3), k), atol=0)


def test_ensemble_depolarizing_second(rng):
    rho, eps = random_density_matrix(6, rng), 0.4
    out = ensemble_superop(_local((2, 3), 1, depolarizing(3, eps)), (2, 3)).apply(rho)
    want = -eps * rho + (1 + eps) / 3 * np.kron(partial_trace(rho, (2, 3), [0]), np.eye(3))
    assert np.allclose(out, want, atol=1e-14)


def test_ensemble_matches_product_action(rng):
    a, b = _random_cp_superop(2, rng), _random_cp_superop(3, rng)
    r1, r2 = random_density_matrix(2, rng), random_density_matrix(3, rng)
    out = ensemble_superop(SubsystemMapEnsemble.single([a, b]), (2, 3)).apply(np.kron(r1, r2))
    assert np.allclose(out, np.kron(a.apply(r1), b.apply(r2)), atol=1e-13)


def test_ensemble_weights_validated():
    ident = [Superoperator.identity(2)] * 2
    with pytest.raises(ValueError, match="sum to 1"):
        SubsystemMapEnsemble(((0.5, ident), (0.4, ident)))
    with pytest.raises(DimensionMismatch):
        ensemble_superop(SubsystemMapEnsemble.single(ident), (2, 3))


def test_witness_identity_is_one(rng):
    rho = random_density_matrix(4, rng)
    for _ in range(10):
        assert witness_F(rho, (2, 2), SubsystemMapEnsemble.identity((2, 2)), haar_unitary(4, rng)) == \
            pytest.approx(1, abs=1e-12)


def test_witness_werner_peak():
    e = _local((2, 2), 1, depolarizing(2, 1.0))
    assert witness_F(werner_state(1), (2, 2), e, WERNER_G0) == pytest.approx(2, abs=1e-12)
    # the anti-diagonal element only permutes the Werner diagonal
    assert witness_F(werner_state(1), (2, 2), e, ANTIDIAGONAL_G0) == pytest.approx(1, abs=1e-12)


def test_witness_werner_closed_form():
    for p, eps in itertools.product(np.linspace(-1 / 3, 1, 21), np.linspace(-1, 1, 21)):
        f = witness_F(werner_state(p), (2, 2), _local((2, 2), 1, depolarizing(2, eps)), BELL_BASIS)
        assert abs(f - (3 * abs((1 + eps * p) / 4) + abs((1 - 3 * p * eps) / 4))) <= 1e-12


def test_exactness_of_eigenvector_g(rng):
    for n in (2, 4, 6):
        a = random_hermitian(n, rng)
        lam, v = eig_hermitian(a)
        top = unitary_tomogram(a, v).abs_sum()
        assert abs(top - np.abs(lam).sum()) <= 1e-10
        for _ in range(100):
            assert unitary_tomogram(a, haar_unitary(n, rng)).abs_sum() <= top + 1e-12


def test_scan_werner_with_haar_samples():
    probes = [MapProbe({"eps": e}, _local((2, 2), 1, depolarizing(2, float(e))))
              for e in np.round(np.arange(-1, 1.0001, 0.1), 10)]
    res = witness_scan(werner_state(0.2), (2, 2), probes, g_samples=100, rng=np.random.default_rng(0))
    assert abs(res.f_max - 1) <= 1e-9 and res.verdict == SEPARABLE_CONSISTENT and res.samples_used == 100


def test_scan_werner_p1():
    res = witness_scan(werner_state(1.0), (2, 2), depolarizing_probes((2, 2), 41, "last"))
    assert res.f_max == pytest.approx(2, abs=1e-12) and res.argmax_params["eps"][-1] == 1.0
    assert res.verdict == ENTANGLED


@pytest.mark.parametrize("kind,expected", [("three-term", 5 / 3), ("two-term", 3 / 2)])
def test_scan_qutrit(kind, expected):
    res = witness_scan(qutrit_pair(kind), (3, 3), depolarizing_probes((3, 3), 41, "last"))
    assert abs(res.f_max - expected) <= 1e-12 and res.argmax_params["eps"][-1] == pytest.approx(0.5)


def test_scan_deterministic_across_workers():
    kw = dict(g_samples=10, eps_grid=11)
    a = witness_scan(werner_state(0.6), (2, 2), rng=np.random.default_rng(4), **kw)
    b = witness_scan(werner_state(0.6), (2, 2), rng=np.random.default_rng(4), workers=4, **kw)
    assert a.f_max == b.f_max and a.argmax_params == b.argmax_params
    assert np.array_equal(a.argmax_g, b.argmax_g)


def test_separable_states_never_flagged(rng):
    for _ in range(50):
        rho = random_separable_state((2, 3), rng)
        probes = transpose_probes((2, 3))
        for _ in range(2):
            t1 = [_random_cp_superop(2, rng), transpose_superop(3) @ _random_cp_superop(3, rng)]
            t2 = [transpose_superop(2) @ _random_cp_superop(2, rng), _random_cp_superop(3, rng)]
            probes.append(MapProbe({"map": "random"}, SubsystemMapEnsemble(((0.5, t1), (0.5, t2)))))
        res = witness_scan(rho, (2, 3), probes + depolarizing_probes((2, 3), 9))
        assert abs(res.f_max - 1) <= 1e-9


def test_multipartite_depolarize(rng):
    rho = ghz_state(3)
    assert np.allclose(multipartite_depolarize(rho, None, [-1, -1, -1]), rho.mat, atol=0)
    with pytest.raises(DimensionMismatch):
        multipartite_depolarize(rho, None, [0.5, 0.5])
    prod = random_separable_state((2, 2, 2), rng, terms=1)
    for eps in itertools.product([0, 0.5, 1], repeat=3):
        out = multipartite_depolarize(prod, None, eps)
        assert abs(np.trace(out) - 1) <= 1e-12
        _, v = eig_hermitian(out)
        assert unitary_tomogram(out, v).abs_sum() == pytest.approx(1, abs=1e-12)
    res = witness_scan(rho, None, depolarizing_probes((2, 2, 2), 5, "product"))
    assert res.f_max > 1 + 1e-9
