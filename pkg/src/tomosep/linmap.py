"""Complex-matrix core: row-major vectorization, superoperators, real embedding.

Matrices are plain ``numpy`` complex arrays.  A matrix ``M`` is flattened
row by row, ``vec(M)[i * cols + d] = M[i, d]``, so that for square factors

    vec(A @ M @ B) == np.kron(A, B.T) @ vec(M)

Every linear map on ``n x n`` matrices is then an ``n**2 x n**2`` matrix
(a :class:`Superoperator`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import get_tolerances
from .errors import (
    DimensionMismatch,
    NotHermitianError,
    NotPositiveError,
    NotUnitaryError,
)

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)

# Metric of the trace scalar product <A|B> = Tr(A^dag B) written on vec'd
# 2x2 matrices; it swaps the two off-diagonal slots and squares to 1.
METRIC_G = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(x) -> np.ndarray:
    """Return the complex array behind ``x`` (DensityMatrix or array-like)."""
    if isinstance(x, DensityMatrix):
        return x.mat
    return np.asarray(x, dtype=complex)


def is_hermitian(a, atol: float | None = None) -> bool:
    a = as_matrix(a)
    if atol is None:
        atol = get_tolerances().structural
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - a.conj().T), initial=0.0) <= atol
    )


def is_unitary(g, atol: float | None = None) -> bool:
    g = as_matrix(g)
    if atol is None:
        atol = get_tolerances().unitary
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        return False
    return bool(np.max(np.abs(g.conj().T @ g - np.eye(g.shape[0]))) <= atol)


def check_unitary(g, what: str = "g") -> np.ndarray:
    g = as_matrix(g)
    if not is_unitary(g):
        raise NotUnitaryError(f"{what} is not unitary to {get_tolerances().unitary:g}")
    return g


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix with subsystem dims.

    ``dims`` lists the subsystem dimensions, slowest-varying factor first;
    it defaults to a single subsystem.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        mat = _readonly(self.mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {mat.shape}")
        n = mat.shape[0]
        dims = tuple(int(d) for d in self.dims) if self.dims else (n,)
        if math.prod(dims) != n:
            raise DimensionMismatch(f"dims {dims} do not multiply to {n}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)
        self._validate()

    def _validate(self):
        tol = get_tolerances()
        herm = np.max(np.abs(self.mat - self.mat.conj().T))
        if herm > tol.structural:
            raise NotHermitianError(f"matrix is not Hermitian (residual {herm:.3g})")
        tr = np.trace(self.mat)
        if abs(tr - 1) > tol.structural:
            raise ValueError(f"trace is {tr.real:.15g}, expected 1")
        lam = np.linalg.eigvalsh(self.mat)[0]
        if lam < -tol.spectral:
            raise NotPositiveError(
                f"matrix is not positive semidefinite (min eigenvalue {lam:.6g})", lam
            )

    @classmethod
    def from_array(cls, mat, dims: Sequence[int] = (), hermitize: bool = True):
        """Build from a numerically computed array, symmetrizing round-off first."""
        mat = np.asarray(mat, dtype=complex)
        if hermitize:
            mat = (mat + mat.conj().T) / 2
        return cls(mat, tuple(dims))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)[::-1]


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on n x n matrices, stored as an n^2 x n^2 matrix on vec(M).

    ``semigroup`` is False for maps built outside the parameter range of
    their positive-map family (e.g. depolarizing with |eps| > 1).
    """

    mat: np.ndarray
    semigroup: bool = True
    label: str = field(default="", compare=False)

    def __post_init__(self):
        mat = _readonly(self.mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"superoperator must be square, got {mat.shape}")
        n = math.isqrt(mat.shape[0])
        if n * n != mat.shape[0]:
            raise DimensionMismatch(f"superoperator size {mat.shape[0]} is not a square")
        object.__setattr__(self, "mat", mat)

    @property
    def dim_in(self) -> int:
        return math.isqrt(self.mat.shape[0])

    def apply(self, m) -> np.ndarray:
        m = as_matrix(m)
        n = self.dim_in
        if m.shape != (n, n):
            raise DimensionMismatch(f"map acts on {n}x{n} matrices, got {m.shape}")
        return unvec(self.mat @ vec(m), n, n)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if not isinstance(other, Superoperator):
            return NotImplemented
        if other.dim_in != self.dim_in:
            raise DimensionMismatch(
                f"cannot compose maps on dimensions {self.dim_in} and {other.dim_in}"
            )
        return Superoperator(self.mat @ other.mat, self.semigroup and other.semigroup)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(np.eye(n * n), label="identity")


def vec(m) -> np.ndarray:
    """Row-major flattening: component ``i * cols + d`` is ``M[i, d]``."""
    return np.array(as_matrix(m), dtype=complex).reshape(-1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != rows * cols:
        raise DimensionMismatch(
            f"vector of length {v.size} cannot be reshaped to {rows}x{cols}"
        )
    return v.reshape(rows, cols).copy()


def action_superop(g, mode: str) -> Superoperator:
    """Superoperator of the left, right, similarity or adjoint action of ``g``.

    ===========  =================  ==============
    mode         matrix             action on M
    ===========  =================  ==============
    left         g (x) 1            g M
    right        1 (x) g^T          M g
    similarity   g (x) (g^-1)^T     g M g^-1
    adjoint      g (x) g^*          g M g^dag
    ===========  =================  ==============
    """
    g = as_matrix(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"group element must be square, got {g.shape}")
    n = g.shape[0]
    one = np.eye(n)
    if mode == "left":
        mat = np.kron(g, one)
    elif mode == "right":
        mat = np.kron(one, g.T)
    elif mode == "similarity":
        if np.linalg.cond(g) > 1e12:
            raise ValueError("similarity mode needs an invertible g; got a singular matrix")
        mat = np.kron(g, np.linalg.inv(g).T)
    elif mode == "adjoint":
        check_unitary(g, "adjoint-mode g")
        mat = np.kron(g, g.conj())
    else:
        raise ValueError(
            f"unknown mode {mode!r}; expected left, right, similarity or adjoint"
        )
    return Superoperator(mat, label=f"{mode} action")


def embedding_matrix(n: int) -> np.ndarray:
    """Unitary S with S vec(rho) real for Hermitian rho.

    Diagonal slots pass through; each off-diagonal pair (rho_jk, rho_kj),
    j < k, is mixed by (1/sqrt2)[[1, 1], [-i, i]] into
    (sqrt2 Re rho_jk, sqrt2 Im rho_jk) at slots (j*n + k, k*n + j).
    """
    s = np.zeros((n * n, n * n), dtype=complex)
    r = 1 / math.sqrt(2)
    for j in range(n):
        s[j * n + j, j * n + j] = 1
        for k in range(j + 1, n):
            a, b = j * n + k, k * n + j
            s[a, a], s[a, b] = r, r
            s[b, a], s[b, b] = -1j * r, 1j * r
    return s


def real_embed(rho) -> np.ndarray:
    m = as_matrix(rho)
    out = embedding_matrix(m.shape[0]) @ vec(m)
    resid = np.max(np.abs(out.imag), initial=0.0)
    if resid > get_tolerances().spectral:
        raise NotHermitianError(f"input is not Hermitian (imaginary residue {resid:.3g})")
    return out.real


def real_unembed(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    n = math.isqrt(r.size)
    if n * n != r.size:
        raise DimensionMismatch(f"real vector length {r.size} is not a square")
    return unvec(embedding_matrix(n).conj().T @ r, n, n)


def sqrtm_psd(a) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues in [-spectral tol, 0) clip to 0."""
    a = as_matrix(a)
    lam, v = np.linalg.eigh((a + a.conj().T) / 2)
    if lam[0] < -get_tolerances().spectral:
        raise NotPositiveError(
            f"matrix square root needs a PSD input (min eigenvalue {lam[0]:.6g})", lam[0]
        )
    lam = np.clip(lam, 0.0, None)
    return (v * np.sqrt(lam)) @ v.conj().T


def hs_distance(rho1, rho2) -> float:
    """D with D^2 = Tr (rho1 - rho2)^2."""
    d = as_matrix(rho1) - as_matrix(rho2)
    if d.shape[0] != d.shape[1]:
        raise DimensionMismatch("distance needs square matrices")
    return math.sqrt(max(float(np.real(np.trace(d @ d))), 0.0))


def sqrt_distance(rho1, rho2) -> float:
    """D with D^2 = Tr (sqrt(rho1) - sqrt(rho2))^2."""
    d = sqrtm_psd(rho1) - sqrtm_psd(rho2)
    return math.sqrt(max(float(np.real(np.trace(d @ d))), 0.0))


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition ``A = V diag(lam) V^dag`` with canonical ordering.

    Eigenvalues come back in descending order.  Each eigenvector is
    rephased so its largest-magnitude component is real and positive, and
    eigenvectors of (numerically) equal eigenvalues are ordered by the real
    parts of their components, compared lexicographically, largest first.
    """
    a = as_matrix(a)
    if not is_hermitian(a, get_tolerances().spectral):
        raise NotHermitianError("eig_hermitian needs a Hermitian matrix")
    lam, v = np.linalg.eigh((a + a.conj().T) / 2)
    lam, v = lam[::-1].copy(), v[:, ::-1].copy()
    for c in range(v.shape[1]):
        col = v[:, c]
        k = int(np.argmax(np.abs(col)))
        v[:, c] = col * (abs(col[k]) / col[k])

    tol = get_tolerances().spectral
    order = list(range(len(lam)))
    start = 0
    while start < len(lam):
        stop = start + 1
        while stop < len(lam) and lam[start] - lam[stop] <= tol:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            block.sort(key=lambda c: tuple(-np.round(v[:, c].real, 12)))
            order[start:stop] = block
        start = stop
    return lam[order], v[:, order]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary.

    QR of a complex Ginibre matrix, with the phases of R's diagonal pushed
    back into Q so the result does not depend on the QR sign convention.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state from a Ginibre matrix, ``G G^dag / Tr``."""
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())
