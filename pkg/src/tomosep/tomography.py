"""Unitary spin tomograms.

For a Hermitian matrix ``A`` and a unitary ``g`` the tomogram is the list
of diagonal elements of ``g^dag A g``::

    w(m, g) = <m| g^dag A g |m>

indexed by the outcome multi-index ``m = (m_1, ..., m_N)``.  Outcome index 0
of a spin-j factor corresponds to projection ``m = +j`` and index ``2j`` to
``m = -j``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .config import get_tolerances, tolerances
from .errors import DimensionMismatch, NotHermitianError, RankDeficientError
from .linmap import DensityMatrix, as_matrix, check_unitary, eig_hermitian, haar_unitary, vec


@dataclass(frozen=True, eq=False)
class Tomogram:
    dims: tuple[int, ...]
    values: np.ndarray
    group_element: np.ndarray

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def total(self) -> float:
        return float(self.values.sum())

    def abs_sum(self) -> float:
        return float(np.abs(self.values).sum())

    def rows(self) -> list[tuple[tuple[int, ...], float]]:
        return [(tuple(int(i) for i in idx), float(v)) for idx, v in np.ndenumerate(self.values)]


@dataclass(frozen=True)
class SpinDirection:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", self.phi % (2 * math.pi))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([math.cos(self.phi) * st, math.sin(self.phi) * st, math.cos(self.theta)])


@dataclass(frozen=True)
class PositivityVerdict:
    positive: bool
    max_abs_diagonal_sum: float
    trace: float
    candidates: int


def _dims_for(n: int, dims: Sequence[int] | None) -> tuple[int, ...]:
    dims = tuple(dims) if dims else (n,)
    if math.prod(dims) != n:
        raise DimensionMismatch(f"dims {dims} do not multiply to {n}")
    return dims


def unitary_tomogram(a, g, dims: Sequence[int] | None = None) -> Tomogram:
    if dims is None and isinstance(a, DensityMatrix):
        dims = a.dims
    a = as_matrix(a)
    tol = get_tolerances()
    if np.max(np.abs(a - a.conj().T)) > tol.spectral:
        raise NotHermitianError("tomograms are defined for Hermitian matrices")
    g = check_unitary(g)
    if g.shape != a.shape:
        raise DimensionMismatch(f"g has shape {g.shape}, matrix has {a.shape}")
    d = np.einsum("ji,jk,ki->i", g.conj(), a, g)
    dims = _dims_for(a.shape[0], dims)
    values = d.real.reshape(dims).copy()
    values.setflags(write=False)
    return Tomogram(dims, values, g.copy())


def angular_momentum(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_x, J_y, J_z) for spin j, basis ordered m = j, j-1, ..., -j."""
    n = int(round(2 * j)) + 1
    if abs((n - 1) / 2 - j) > 1e-12:
        raise ValueError(f"spin must be a nonnegative half-integer, got {j}")
    m = j - np.arange(n)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        # <m+1| J+ |m> with m = m[k], m + 1 = m[k-1]
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jm = jp.conj().T
    return (jp + jm) / 2, (jp - jm) / 2j, jz


def _expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t H) for Hermitian H."""
    lam, v = eig_hermitian(h)
    return (v * np.exp(-1j * t * lam)) @ v.conj().T


def rotation(j: float, direction: SpinDirection) -> np.ndarray:
    """exp(-i phi J_z) exp(-i theta J_y); the third Euler angle is fixed to 0."""
    _, jy, jz = angular_momentum(j)
    rz = np.diag(np.exp(-1j * direction.phi * np.diag(jz).real))
    return rz @ _expm_hermitian(jy, direction.theta)


def spin_tomogram(rho, direction: SpinDirection | Sequence[SpinDirection],
                  dims: Sequence[int] | None = None) -> Tomogram:
    """Spin tomogram along one direction per subsystem.

    A single direction is used for every subsystem; for a multipartite
    state the rotation is the tensor product of per-subsystem rotations.
    """
    if dims is None and isinstance(rho, DensityMatrix):
        dims = rho.dims
    a = as_matrix(rho)
    dims = _dims_for(a.shape[0], dims)
    dirs = [direction] * len(dims) if isinstance(direction, SpinDirection) else list(direction)
    if len(dirs) != len(dims):
        raise DimensionMismatch(f"need {len(dims)} directions, got {len(dirs)}")
    u = reduce(np.kron, [rotation((d - 1) / 2, o) for d, o in zip(dims, dirs)])
    return unitary_tomogram(a, u, dims)


def basic_symbols(g, j: int, k: int, dims: Sequence[int] | None = None) -> Tomogram:
    """Tomogram of the transition operator E_jk: w(m) = <m|g^dag E_jk g|m>.

    E_jk is not Hermitian for j != k, so this returns the real and imaginary
    parts packed as a complex array in ``values``.
    """
    g = check_unitary(g)
    n = g.shape[0]
    if not (0 <= j < n and 0 <= k < n):
        raise IndexError(f"indices ({j}, {k}) out of range for dimension {n}")
    # <m|g^dag|j><k|g|m> = conj(g[j, m]) g[k, m]
    values = (g[j, :].conj() * g[k, :]).reshape(_dims_for(n, dims))
    return Tomogram(_dims_for(n, dims), values, g.copy())


def tomogram_from_symbols(a, g, dims: Sequence[int] | None = None) -> np.ndarray:
    """sum_jk A_jk w_jk(m, g), the tomogram assembled from basic symbols."""
    a = as_matrix(a)
    n = a.shape[0]
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        for k in range(n):
            if a[j, k] != 0:
                out += a[j, k] * basic_symbols(g, j, k).flat()
    return out.reshape(_dims_for(n, dims))


def tomographic_purity(t: Tomogram, k: int) -> float:
    if k < 1:
        raise ValueError("order k must be >= 1")
    return float(np.sum(np.abs(t.values) ** k))


def positivity_test(a, samples: int, rng: np.random.Generator | None = None,
                    atol: float = 1e-9) -> PositivityVerdict:
    """Decide A >= 0 from diagonal sums of U A U^dag.

    A is PSD iff sum_m |(U A U^dag)_mm| equals Tr A for every unitary U.
    The maximum over U is the trace norm, reached at the eigenvector
    matrix, which is always among the candidates; Haar samples are added
    on top of it.
    """
    a = as_matrix(a)
    if np.max(np.abs(a - a.conj().T)) > get_tolerances().spectral:
        raise NotHermitianError("positivity test needs a Hermitian matrix")
    n = a.shape[0]
    _, v = eig_hermitian(a)
    candidates = [v.conj().T]
    if samples > 0:
        rng = np.random.default_rng() if rng is None else rng
        candidates += [haar_unitary(n, rng) for _ in range(samples)]
    best = max(float(np.abs(np.einsum("ij,jk,ik->i", u, a, u.conj())).sum()) for u in candidates)
    tr = float(np.trace(a).real)
    return PositivityVerdict(abs(best - tr) <= atol, best, tr, len(candidates))


def tomograms(a, gs: Iterable, dims: Sequence[int] | None = None,
              workers: int | None = None) -> list[Tomogram]:
    """Tomograms for a batch of group elements, in input order."""
    gs = list(gs)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(lambda g: unitary_tomogram(a, g, dims), gs))
    return [unitary_tomogram(a, g, dims) for g in gs]


def reconstruct(measurements: Sequence[tuple], dims: Sequence[int] | None = None) -> DensityMatrix:
    """Linear-inversion estimate of rho from (g, tomogram) pairs.

    Each outcome gives Tr(P rho) with P = g|m><m|g^dag, a linear equation
    in vec(rho).  The least-squares solution is Hermitized and rescaled to
    unit trace.  With noisy data the estimate can be slightly non-positive;
    the returned DensityMatrix is then validated only for Hermiticity/trace.
    """
    rows, rhs = [], []
    n = None
    for g, t in measurements:
        g = check_unitary(g)
        n = g.shape[0] if n is None else n
        if g.shape != (n, n):
            raise DimensionMismatch("all group elements must share one dimension")
        vals = t.flat() if isinstance(t, Tomogram) else np.asarray(t, dtype=float).reshape(-1)
        if vals.size != n:
            raise DimensionMismatch(f"tomogram has {vals.size} values, expected {n}")
        for m in range(n):
            p = np.outer(g[:, m], g[:, m].conj())
            rows.append(vec(p.T))
            rhs.append(vals[m])
    if n is None:
        raise ValueError("no measurements given")
    a = np.array(rows)
    rank = int(np.linalg.matrix_rank(a, tol=1e-10 * max(1.0, np.abs(a).max())))
    if rank < n * n:
        raise RankDeficientError(
            f"measurement set has rank {rank}; {n * n} independent settings are needed",
            rank, n * n,
        )
    x, *_ = np.linalg.lstsq(a, np.array(rhs, dtype=complex), rcond=None)
    rho = x.reshape(n, n)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    dims = _dims_for(n, dims)
    if np.linalg.eigvalsh(rho)[0] >= -get_tolerances().spectral:
        return DensityMatrix(rho, dims)
    with tolerances(spectral=np.inf):
        return DensityMatrix(rho, dims)
