"""Tomographic separability criterion and partial-transpose tests.

A state rho on subsystems (d_1, ..., d_N) is pushed through a convex mix
of products of positive subsystem maps, ``L = sum_s p_s L_s^(1) (x) ... (x)
L_s^(N)``.  For a separable rho the image rho_L is again a state, so its
tomogram is a probability table and

    F(g, L) = sum_m |w_{rho_L}(m, g)| = 1      for every unitary g.

If some L makes rho_L non-positive, F exceeds 1 for suitable g.  The
maximum of F over g is the trace norm of rho_L, attained at the unitary
whose columns are eigenvectors of rho_L, so the scan over g is exact.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .channels import depolarizing, positive_eps_range, transpose_superop
from .config import get_tolerances
from .errors import DimensionMismatch, NotHermitianError
from .linmap import (
    PAULIS,
    DensityMatrix,
    Superoperator,
    as_matrix,
    eig_hermitian,
    haar_unitary,
    pure_state,
    random_density_matrix,
)
from .tomography import unitary_tomogram

ENTANGLED = "entangled"
SEPARABLE_CONSISTENT = "separable-consistent"

_r = 1 / math.sqrt(2)
# Columns: Phi+, Phi-, Psi+, Psi-.  Diagonalizes every Werner state.
BELL_BASIS = np.array(
    [
        [_r, _r, 0, 0],
        [0, 0, _r, _r],
        [0, 0, _r, -_r],
        [_r, -_r, 0, 0],
    ],
    dtype=complex,
)
WERNER_G0 = BELL_BASIS
# The anti-diagonal permutation exchanging |00> and |11>.  It only permutes
# the diagonal of a Werner state; kept for comparison with WERNER_G0.
ANTIDIAGONAL_G0 = np.array(
    [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]], dtype=complex
)


def _dims(rho, dims) -> tuple[int, ...]:
    if dims is None:
        dims = rho.dims if isinstance(rho, DensityMatrix) else None
    n = as_matrix(rho).shape[0]
    dims = tuple(int(d) for d in dims) if dims else (n,)
    if math.prod(dims) != n:
        raise DimensionMismatch(f"dims {dims} do not multiply to {n}")
    return dims


def partial_transpose(rho, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transpose the indices of one tensor factor (0-based ``subsystem``)."""
    a = as_matrix(rho)
    dims = _dims(rho, dims)
    k = len(dims)
    if not 0 <= subsystem < k:
        raise IndexError(f"subsystem {subsystem} out of range for {k} subsystems")
    t = a.reshape(dims + dims)
    t = np.swapaxes(t, subsystem, k + subsystem)
    return t.reshape(a.shape).copy()


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    a = as_matrix(rho)
    dims = _dims(rho, dims)
    k = len(dims)
    keep = sorted(keep)
    t = a.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:k])
    col = [row[i] if i not in keep else letters[k + i] for i in range(k)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    res = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    d = math.prod(dims[i] for i in keep)
    return res.reshape(d, d)


def peres_test(rho, dims: Sequence[int] | None = None) -> tuple[bool, float]:
    """(is_ppt, min eigenvalue of the partial transpose on the last factor)."""
    dims = _dims(rho, dims)
    if len(dims) != 2:
        raise DimensionMismatch(f"Peres test needs a bipartite state, got dims {dims}")
    pt = partial_transpose(rho, dims, 1)
    lam = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    return lam >= -get_tolerances().spectral, lam


_X_PATTERN = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool
)


def x_state_margins(rho) -> tuple[float, float]:
    """(R11 R22 - |rho12|^2, rho11 rho22 - |R12|^2) for a two-qubit X state."""
    a = as_matrix(rho)
    if a.shape != (4, 4):
        raise DimensionMismatch("X-state check needs a 4x4 matrix")
    off = np.max(np.abs(a[~_X_PATTERN]))
    if off > get_tolerances().structural:
        raise ValueError(f"matrix is not of X form (off-pattern entry {off:.3g})")
    big = (a[0, 0] * a[3, 3]).real - abs(a[1, 2]) ** 2
    small = (a[1, 1] * a[2, 2]).real - abs(a[0, 3]) ** 2
    return float(big), float(small)


def x_state_check(rho) -> tuple[bool, bool]:
    """Positivity of the partially transposed X state, as two inequalities."""
    tol = get_tolerances().structural
    c1, c2 = x_state_margins(rho)
    return c1 >= -tol, c2 >= -tol


def _pairing_permutation(dims: Sequence[int]) -> np.ndarray:
    """Map from (i1 j1 i2 j2 ...) ordering of vec slots to (i1 i2 ... j1 j2 ...)."""
    k = len(dims)
    n = math.prod(dims)
    full = np.arange(n * n).reshape(tuple(dims) + tuple(dims))
    axes = [ax for i in range(k) for ax in (i, k + i)]
    return full.transpose(axes).reshape(-1)


def local_superop(maps: Sequence[Superoperator], dims: Sequence[int]) -> Superoperator:
    """Superoperator of L^(1) (x) ... (x) L^(N), each factor acting on its subsystem."""
    dims = tuple(dims)
    if len(maps) != len(dims):
        raise DimensionMismatch(f"need {len(dims)} subsystem maps, got {len(maps)}")
    for k, (m, d) in enumerate(zip(maps, dims)):
        if m.dim_in != d:
            raise DimensionMismatch(f"map #{k} acts on dimension {m.dim_in}, subsystem has {d}")
    kron = reduce(np.kron, [m.mat for m in maps])
    perm = _pairing_permutation(dims)
    mat = np.empty_like(kron)
    mat[np.ix_(perm, perm)] = kron
    return Superoperator(mat, semigroup=all(m.semigroup for m in maps), label="local")


@dataclass(frozen=True, eq=False)
class SubsystemMapEnsemble:
    """sum_s p_s (L_s^(1) (x) ... (x) L_s^(N))."""

    terms: tuple[tuple[float, tuple[Superoperator, ...]], ...]

    def __post_init__(self):
        terms = tuple((float(p), tuple(maps)) for p, maps in self.terms)
        if not terms:
            raise ValueError("ensemble needs at least one term")
        ps = np.array([p for p, _ in terms])
        if np.any(ps < 0) or abs(ps.sum() - 1) > get_tolerances().structural:
            raise ValueError(f"weights must be nonnegative and sum to 1 (sum {ps.sum():.15g})")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, maps: Sequence[Superoperator]) -> "SubsystemMapEnsemble":
        return cls(((1.0, tuple(maps)),))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "SubsystemMapEnsemble":
        return cls.single([Superoperator.identity(d) for d in dims])


def ensemble_superop(e: SubsystemMapEnsemble, dims: Sequence[int]) -> Superoperator:
    mats = [p * local_superop(maps, dims).mat for p, maps in e.terms]
    return Superoperator(sum(mats), semigroup=all(
        m.semigroup for _, maps in e.terms for m in maps), label="ensemble")


def transformed_state(rho, dims, e: SubsystemMapEnsemble) -> np.ndarray:
    """rho_L; raises if the image is not Hermitian."""
    dims = _dims(rho, dims)
    out = ensemble_superop(e, dims).apply(as_matrix(rho))
    if np.max(np.abs(out - out.conj().T)) > get_tolerances().spectral:
        raise NotHermitianError("the ensemble does not preserve Hermiticity on this input")
    return (out + out.conj().T) / 2


def witness_F(rho, dims, e: SubsystemMapEnsemble, g) -> float:
    """F(g, L) = sum over outcomes of |w_{rho_L}(m, g)|."""
    dims = _dims(rho, dims)
    return unitary_tomogram(transformed_state(rho, dims, e), g, dims).abs_sum()


@dataclass(frozen=True)
class MapProbe:
    """One point of a map-parameter scan."""

    params: dict
    ensemble: SubsystemMapEnsemble = field(compare=False, repr=False)


def depolarizing_probes(dims: Sequence[int], points: int = 41,
                        mode: str = "single") -> list[MapProbe]:
    """Depolarizing maps with eps on a grid over each subsystem's positive range.

    mode ``single``: one subsystem at a time (others identity, i.e. eps = -1);
    ``last``: only the last subsystem; ``product``: the full eps-vector grid.
    The grid for a d-level factor spans [-1, 1/(d-1)] with ``points`` nodes.
    """
    dims = tuple(dims)
    if points < 1:
        raise ValueError("grid needs at least one point")
    grids = [np.linspace(*positive_eps_range(d), points) if points > 1
             else np.array([positive_eps_range(d)[1]]) for d in dims]
    probes = []

    def probe(eps):
        maps = [depolarizing(d, float(x)) for d, x in zip(dims, eps)]
        return MapProbe({"map": "depolarize", "eps": [float(x) for x in eps]},
                        SubsystemMapEnsemble.single(maps))

    if mode == "product":
        for eps in itertools.product(*grids):
            probes.append(probe(eps))
    elif mode in ("single", "last"):
        targets = range(len(dims)) if mode == "single" else [len(dims) - 1]
        for k in targets:
            for x in grids[k]:
                eps = [-1.0] * len(dims)
                eps[k] = x
                probes.append(probe(eps))
    else:
        raise ValueError(f"unknown mode {mode!r}; expected single, last or product")
    return probes


def transpose_probes(dims: Sequence[int]) -> list[MapProbe]:
    out = []
    for k, d in enumerate(dims):
        maps = [Superoperator.identity(x) for x in dims]
        maps[k] = transpose_superop(d)
        out.append(MapProbe({"map": "transpose", "subsystem": k},
                            SubsystemMapEnsemble.single(maps)))
    return out


def default_probes(dims: Sequence[int], points: int = 41) -> list[MapProbe]:
    return depolarizing_probes(dims, points, "single") + transpose_probes(dims)


@dataclass(frozen=True, eq=False)
class WitnessResult:
    f_max: float
    argmax_g: np.ndarray
    argmax_params: dict
    samples_used: int
    verdict: str
    evaluations: int = 0


def witness_scan(rho, dims: Sequence[int] | None = None,
                 probes: Iterable[MapProbe] | None = None, *,
                 eps_grid: int = 41, g_samples: int = 0,
                 rng: np.random.Generator | None = None,
                 threshold: float = 1e-9, workers: int | None = None) -> WitnessResult:
    """Maximize F over map probes and group elements.

    For each probe F is evaluated at the eigenvector matrix of rho_L (where
    it equals the trace norm of rho_L) and at ``g_samples`` Haar unitaries
    drawn once from ``rng`` and shared by all probes.  Results do not depend
    on ``workers``: the reduction runs in probe order.
    """
    dims = _dims(rho, dims)
    a = as_matrix(rho)
    n = a.shape[0]
    probes = list(default_probes(dims, eps_grid) if probes is None else probes)
    if not probes:
        raise ValueError("no map probes to scan")
    haar = []
    if g_samples > 0:
        rng = np.random.default_rng() if rng is None else rng
        haar = [haar_unitary(n, rng) for _ in range(g_samples)]

    def evaluate(probe: MapProbe):
        rl = transformed_state(a, dims, probe.ensemble)
        _, v = eig_hermitian(rl)
        best_f, best_g = unitary_tomogram(rl, v, dims).abs_sum(), v
        for g in haar:
            f = unitary_tomogram(rl, g, dims).abs_sum()
            if f > best_f:
                best_f, best_g = f, g
        return best_f, best_g

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(evaluate, probes))
    else:
        results = [evaluate(p) for p in probes]

    best = max(range(len(probes)), key=lambda i: (results[i][0], -i))
    f_max, g_max = results[best]
    return WitnessResult(
        f_max=float(f_max),
        argmax_g=g_max,
        argmax_params=dict(probes[best].params),
        samples_used=len(haar),
        verdict=ENTANGLED if f_max > 1 + threshold else SEPARABLE_CONSISTENT,
        evaluations=len(probes) * (1 + len(haar)),
    )


def werner_state(p: float) -> DensityMatrix:
    """Mixture of the maximally mixed state and |Phi+><Phi+| with weight p."""
    if not -1 / 3 - 1e-15 <= p <= 1 + 1e-15:
        raise ValueError(f"Werner state is positive only for -1/3 <= p <= 1, got {p}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = (1 + p) / 4
    rho[1, 1] = rho[2, 2] = (1 - p) / 4
    rho[0, 3] = rho[3, 0] = p / 2
    return DensityMatrix(rho, (2, 2))


def generalized_werner(mu: Sequence[float]) -> DensityMatrix:
    """(1 + sum_k mu_k sigma_k (x) sigma_k) / 4; must lie inside the tetrahedron."""
    mu = [float(x) for x in mu]
    if len(mu) != 3:
        raise ValueError("need three correlation coefficients")
    rho = np.eye(4, dtype=complex)
    for m, s in zip(mu, PAULIS):
        rho = rho + m * np.kron(s, s)
    return DensityMatrix(rho / 4, (2, 2))


def generalized_werner_eigenvalues(mu: Sequence[float]) -> np.ndarray:
    m1, m2, m3 = mu
    return np.array([
        1 - m1 - m2 - m3,
        1 + m1 + m2 - m3,
        1 + m1 - m2 + m3,
        1 - m1 + m2 + m3,
    ]) / 4


def qutrit_pair(kind: str) -> DensityMatrix:
    """Maximally entangled two-qutrit projectors in the computational basis.

    ``three-term``: (|+1,+1> + |0,0> + |-1,-1>)/sqrt3;
    ``two-term``: (|+1,+1> + |0,0>)/sqrt2.  Basis index 0 is m = +1.
    """
    psi = np.zeros(9, dtype=complex)
    if kind == "three-term":
        terms = (0, 1, 2)
    elif kind == "two-term":
        terms = (0, 1)
    else:
        raise ValueError(f"unknown kind {kind!r}; expected three-term or two-term")
    for m in terms:
        psi[3 * m + m] = 1
    return DensityMatrix(pure_state(psi), (3, 3))


def ghz_state(n_qubits: int) -> DensityMatrix:
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[0] = psi[-1] = 1
    return DensityMatrix(pure_state(psi), (2,) * n_qubits)


def multipartite_depolarize(rho, dims: Sequence[int] | None, eps: Sequence[float]) -> np.ndarray:
    dims = _dims(rho, dims)
    if len(eps) != len(dims):
        raise DimensionMismatch(f"need {len(dims)} eps values, got {len(eps)}")
    maps = [depolarizing(d, float(x)) for d, x in zip(dims, eps)]
    return transformed_state(rho, dims, SubsystemMapEnsemble.single(maps))


def random_separable_state(dims: Sequence[int], rng: np.random.Generator,
                           terms: int = 4) -> DensityMatrix:
    """Random convex mixture of random product states."""
    w = rng.dirichlet(np.ones(terms))
    rho = sum(p * reduce(np.kron, [random_density_matrix(d, rng) for d in dims]) for p in w)
    return DensityMatrix.from_array(rho, dims)
