"""Positive maps on density matrices and their superoperator matrices.

Completely positive maps are given by Kraus operators; maps that are
positive but not completely positive (transpose, depolarizing with
eps > 0) carry an extra negatively weighted Kraus family, so that

    rho -> sum_k V_k rho V_k^dag - sum_s v_s rho v_s^dag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import get_tolerances
from .errors import DimensionMismatch
from .linmap import (
    SIGMA_0,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    DensityMatrix,
    Superoperator,
    as_matrix,
    check_unitary,
    vec,
)


@dataclass(frozen=True, eq=False)
class KrausMap:
    positive: tuple[np.ndarray, ...]
    negative: tuple[np.ndarray, ...] = ()
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        pos = tuple(np.asarray(v, dtype=complex) for v in self.positive)
        neg = tuple(np.asarray(v, dtype=complex) for v in self.negative)
        if not pos:
            raise ValueError("a Kraus map needs at least one positive operator")
        n = pos[0].shape[0]
        for v in pos + neg:
            if v.shape != (n, n):
                raise DimensionMismatch(f"Kraus operators must all be {n}x{n}, got {v.shape}")
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)
        if self.check:
            resid = np.max(np.abs(self.completeness() - np.eye(n)))
            if resid > get_tolerances().spectral:
                raise ValueError(
                    f"Kraus operators violate sum V^dag V - sum v^dag v = 1 (residual {resid:.3g})"
                )

    @property
    def dim(self) -> int:
        return self.positive[0].shape[0]

    def completeness(self) -> np.ndarray:
        total = sum(v.conj().T @ v for v in self.positive)
        for v in self.negative:
            total = total - v.conj().T @ v
        return total

    @property
    def completely_positive(self) -> bool:
        return not self.negative


@dataclass(frozen=True)
class MomentMap:
    """Second moments of a random SU(2) matrix [[a, b], [-b*, a*]].

    ell = <|a|^2>, m = <a b*>, n = <a b>, s = <a^2>, q = <b^2>.
    """

    ell: float
    m: complex
    n: complex
    s: complex
    q: complex

    def __post_init__(self):
        if not 0.0 <= self.ell <= 1.0:
            raise ValueError(f"ell must lie in [0, 1], got {self.ell}")
        for name in ("m", "n", "s", "q"):
            if abs(getattr(self, name)) > 1 + 1e-12:
                raise ValueError(f"|{name}| must not exceed 1, got {abs(getattr(self, name))}")


@dataclass(frozen=True)
class ChannelReport:
    kappa: float
    trace_preserved: bool
    hermiticity_preserved: bool
    min_output_eigenvalue: float
    semigroup: bool = True
    output_trace: float = 1.0


def kraus_apply(k: KrausMap, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (k.dim, k.dim):
        raise DimensionMismatch(f"map acts on dimension {k.dim}, state has shape {rho.shape}")
    out = sum(v @ rho @ v.conj().T for v in k.positive)
    for v in k.negative:
        out = out - v @ rho @ v.conj().T
    return out


def kraus_superop(k: KrausMap) -> Superoperator:
    mat = sum(np.kron(v, v.conj()) for v in k.positive)
    for v in k.negative:
        mat = mat - np.kron(v, v.conj())
    return Superoperator(mat, label="kraus")


def projective_decoherence(n: int) -> KrausMap:
    """Kraus map with V_k = |k><k|; removes every off-diagonal element."""
    ops = []
    for k in range(n):
        v = np.zeros((n, n), dtype=complex)
        v[k, k] = 1
        ops.append(v)
    return KrausMap(tuple(ops))


def transpose_kraus_qubit() -> KrausMap:
    """rho^T = (rho + s1 rho s1 - s2 rho s2 + s3 rho s3) / 2 as a signed Kraus set."""
    r = 1 / math.sqrt(2)
    return KrausMap((r * SIGMA_0, r * SIGMA_1, r * SIGMA_3), (r * SIGMA_2,))


def transpose_superop(n: int) -> Superoperator:
    """Permutation matrix exchanging vec slots (i, j) and (j, i)."""
    mat = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            mat[j * n + i, i * n + j] = 1
    return Superoperator(mat, label="transpose")


def depolarizing_kraus(n: int, eps: float) -> KrausMap:
    """Signed Kraus form of rho -> -eps rho + (1 + eps)/n Tr(rho) 1.

    The constant part uses sum_jk E_jk rho E_kj = Tr(rho) 1; needs eps >= -1.
    """
    if eps < -1:
        raise ValueError("depolarizing Kraus form needs eps >= -1")
    c = math.sqrt((1 + eps) / n)
    ops = []
    for j in range(n):
        for k in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = c
            ops.append(e)
    one = np.eye(n, dtype=complex)
    if eps > 0:
        return KrausMap(tuple(ops), (math.sqrt(eps) * one,))
    return KrausMap(tuple(ops) + (math.sqrt(-eps) * one,))


def depolarizing(n: int, eps: float) -> Superoperator:
    """rho -> -eps rho + (1 + eps)/n Tr(rho) 1.

    eps = -1 is the identity, eps = 0 sends everything to 1/n.  The map is
    positive for -1 <= eps <= 1/(n-1); outside [-1, 1] it is still built
    but flagged as not belonging to the semigroup.
    """
    one = vec(np.eye(n))
    mat = -eps * np.eye(n * n) + (1 + eps) / n * np.outer(one, one)
    return Superoperator(mat, semigroup=-1 <= eps <= 1, label=f"depolarizing({eps:g})")


def positive_eps_range(n: int) -> tuple[float, float]:
    """Interval of eps on which depolarizing(n, eps) is a positive map."""
    return -1.0, (1.0 if n <= 2 else 1.0 / (n - 1))


def phase_damping(n: int, lam: float) -> Superoperator:
    diag = np.full((n, n), lam, dtype=complex)
    np.fill_diagonal(diag, 1)
    return Superoperator(np.diag(diag.reshape(-1)), semigroup=abs(lam) <= 1,
                         label=f"phase_damping({lam:g})")


def diagonal_complement(n: int, trace_preserving: bool = False) -> Superoperator:
    """rho -> (Tr(rho) 1 - diag rho) / n.

    As written this map does not preserve the trace (it yields (n-1)/n);
    ``trace_preserving=True`` divides by n - 1 instead.
    """
    if trace_preserving and n < 2:
        raise ValueError("trace-preserving variant needs n >= 2")
    one = vec(np.eye(n))
    mat = np.outer(one, one) - np.diag(one)
    return Superoperator(mat / ((n - 1) if trace_preserving else n),
                         semigroup=trace_preserving, label="diagonal_complement")


def random_unitary_mix(weights: Sequence[float], unitaries: Sequence) -> Superoperator:
    """sum_k p_k U_k (x) U_k^*."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(unitaries) or len(w) == 0:
        raise ValueError("need one weight per unitary")
    if np.any(w < 0) or abs(w.sum() - 1) > get_tolerances().structural:
        raise ValueError(f"weights must be nonnegative and sum to 1 (sum {w.sum():.15g})")
    us = [check_unitary(u, f"unitary #{i}") for i, u in enumerate(unitaries)]
    n = us[0].shape[0]
    if any(u.shape != (n, n) for u in us):
        raise DimensionMismatch("all unitaries must share one dimension")
    mat = sum(p * np.kron(u, u.conj()) for p, u in zip(w, us))
    return Superoperator(mat, label="random_unitary_mix")


def moments_from_unitaries(weights: Sequence[float], unitaries: Sequence) -> MomentMap:
    """Moments of a weighted ensemble of 2x2 unitaries.

    Each U is rescaled into SU(2) first; U (x) U^* ignores the global phase.
    """
    ell = 0.0
    m = n = s = q = 0j
    for p, u in zip(weights, unitaries):
        u = np.asarray(u, dtype=complex)
        u = u / np.sqrt(np.linalg.det(u))
        a, b = u[0, 0], u[0, 1]
        ell += p * abs(a) ** 2
        m += p * a * np.conj(b)
        n += p * a * b
        s += p * a * a
        q += p * b * b
    return MomentMap(min(max(float(ell), 0.0), 1.0), complex(m), complex(n), complex(s), complex(q))


def build_moment_map(mm: MomentMap) -> Superoperator:
    l, m, n, s, q = mm.ell, mm.m, mm.n, mm.s, mm.q
    mc, nc, sc, qc = np.conj(m), np.conj(n), np.conj(s), np.conj(q)
    mat = np.array(
        [
            [l, m, mc, 1 - l],
            [-n, s, -q, n],
            [-nc, -qc, sc, nc],
            [1 - l, -m, -mc, l],
        ],
        dtype=complex,
    )
    return Superoperator(mat, label="moment_map")


def moment_determinant(mm: MomentMap) -> float:
    l, m, n, s, q = mm.ell, mm.m, mm.n, mm.s, mm.q
    return float(
        (1 - 2 * l) * (abs(q) ** 2 - abs(s) ** 2)
        + 4 * np.real(np.conj(q) * np.conj(m) * n + m * n * np.conj(s))
    )


def block_structure_residual(L) -> float:
    """Max deviation from D = s2 A^* s2 and C = -s2 B^* s2 for a 4x4 map."""
    mat = L.mat if isinstance(L, Superoperator) else np.asarray(L, dtype=complex)
    if mat.shape != (4, 4):
        raise DimensionMismatch("block structure is defined for 4x4 (qubit) maps")
    a, b = mat[:2, :2], mat[:2, 2:]
    c, d = mat[2:, :2], mat[2:, 2:]
    r1 = np.max(np.abs(d - SIGMA_2 @ a.conj() @ SIGMA_2))
    r2 = np.max(np.abs(c + SIGMA_2 @ b.conj() @ SIGMA_2))
    return float(max(r1, r2))


def check_block_structure(L, atol: float | None = None) -> bool:
    atol = get_tolerances().spectral if atol is None else atol
    return block_structure_residual(L) <= atol


def entanglement_breaking(states: Sequence, effects: Sequence) -> Superoperator:
    """rho -> sum_k r_k Tr(R_k rho) for states r_k and a POVM {R_k}."""
    if len(states) != len(effects) or not states:
        raise ValueError("need one effect per state")
    tol = get_tolerances().spectral
    rs = [as_matrix(r) for r in states]
    es = [as_matrix(e) for e in effects]
    n = es[0].shape[0]
    for i, e in enumerate(es):
        if np.max(np.abs(e - e.conj().T)) > tol or np.linalg.eigvalsh(e)[0] < -tol:
            raise ValueError(f"effect #{i} is not positive semidefinite")
    resid = np.max(np.abs(sum(es) - np.eye(n)))
    if resid > tol:
        raise ValueError(f"effects do not sum to the identity (residual {resid:.3g})")
    # Tr(R rho) = vec(R^T) . vec(rho)
    mat = sum(np.outer(vec(r), vec(e.T)) for r, e in zip(rs, es))
    return Superoperator(mat, label="entanglement_breaking")


def compose(l1: Superoperator, l2: Superoperator) -> Superoperator:
    """Matrix product: apply ``l2`` first, then ``l1``."""
    return l1 @ l2


def contraction_kappa(L: Superoperator, rho) -> ChannelReport:
    """Purity ratio Tr(L rho)^2 / Tr rho^2 together with basic diagnostics."""
    tol = get_tolerances()
    r = as_matrix(rho)
    out = L.apply(r)
    herm = bool(np.max(np.abs(out - out.conj().T)) <= tol.spectral)
    out_h = (out + out.conj().T) / 2
    mu_in = float(np.real(np.trace(r @ r)))
    mu_out = float(np.real(np.trace(out_h @ out_h)))
    tr = complex(np.trace(out))
    return ChannelReport(
        kappa=mu_out / mu_in,
        trace_preserved=bool(abs(tr - np.trace(r)) <= tol.spectral),
        hermiticity_preserved=herm,
        min_output_eigenvalue=float(np.linalg.eigvalsh(out_h)[0]),
        semigroup=L.semigroup,
        output_trace=tr.real,
    )


def _fiducial_vector(p0) -> np.ndarray:
    p0 = as_matrix(p0)
    lam, v = np.linalg.eigh((p0 + p0.conj().T) / 2)
    if abs(lam[-1] - 1) > 1e-8 or np.any(np.abs(lam[:-1]) > 1e-8):
        raise ValueError("fiducial P0 must be a rank-one projector")
    return v[:, -1]


def purify(weights: Sequence[float], states: Sequence, p0) -> DensityMatrix:
    """Nonlinear purification of sum_k p_k rho_k with a fiducial projector P0.

    The result is N * sum_kj sqrt(p_k p_j) rho_k P0 rho_j / sqrt(Tr rho_k P0 rho_j P0),
    always a pure state |chi><chi| with chi ~ sum_k sqrt(p_k) rho_k|phi> / sqrt(<phi|rho_k|phi>).
    """
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states) or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("weights must be a probability vector with one entry per state")
    phi = _fiducial_vector(p0)
    p0 = np.outer(phi, phi.conj())
    rs = [as_matrix(r) for r in states]
    total = np.zeros_like(rs[0])
    for k, rk in enumerate(rs):
        for j, rj in enumerate(rs):
            if w[k] == 0 or w[j] == 0:
                continue
            t = np.trace(rk @ p0 @ rj @ p0)
            if abs(t) <= 1e-14:
                bad = k if np.real(phi.conj() @ rk @ phi) <= 1e-7 else j
                raise ValueError(f"fiducial projector is orthogonal to state #{bad}")
            total = total + math.sqrt(w[k] * w[j]) * (rk @ p0 @ rj) / np.sqrt(t)
    total = total / np.trace(total)
    dims = states[0].dims if isinstance(states[0], DensityMatrix) else ()
    return DensityMatrix.from_array(total, dims)


def decohered_mixture(p1: float, p2: float, rho1, rho2, kappa: float, p0) -> np.ndarray:
    """p1 rho1 + p2 rho2 + kappa sqrt(p1 p2) (rho1 P0 rho2 + h.c.) / sqrt(Tr rho1 P0 rho2 P0).

    kappa = 0 is the plain mixture; for orthogonal pure rho1, rho2 and
    kappa = 1 the result is the purified state.
    """
    if abs(p1 + p2 - 1) > 1e-12 or p1 < 0 or p2 < 0:
        raise ValueError("p1, p2 must be nonnegative and sum to 1")
    if not 0 <= kappa <= 1:
        raise ValueError("kappa must lie in [0, 1]")
    phi = _fiducial_vector(p0)
    p0 = np.outer(phi, phi.conj())
    r1, r2 = as_matrix(rho1), as_matrix(rho2)
    t = np.trace(r1 @ p0 @ r2 @ p0)
    if abs(t) <= 1e-14:
        bad = 0 if np.real(phi.conj() @ r1 @ phi) <= 1e-7 else 1
        raise ValueError(f"fiducial projector is orthogonal to state #{bad}")
    cross = (r1 @ p0 @ r2 + r2 @ p0 @ r1) / np.sqrt(t)
    return p1 * r1 + p2 * r2 + kappa * math.sqrt(p1 * p2) * cross
