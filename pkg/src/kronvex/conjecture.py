"""Constraint set, objective and margin for the 4x4 conjecture.

For traceless 4x4 ``A``, ``B`` with ``|A|_F^2 + |B|_F^2 = 1/4`` the conjectured
bound is ``sigma_1(X)^2 + sigma_2(X)^2 <= 1/2`` where ``X = A (x) I + I (x) B``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from kronvex.linalg import (
    as_matrix,
    eigenvalues,
    kron_sum,
    kron_sum_batch,
    singular_values,
    top_singular_triplets,
    unvec,
)

DIM = 4
NORM_SQ_TARGET = 0.25
BOUND = 0.5
FEASIBILITY_TOL = 1e-10
DISTINCT_TOL = 1e-8


@dataclass(frozen=True)
class MatrixPair:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, square=True).copy()
        B = as_matrix(self.B, square=True).copy()
        if A.shape != (DIM, DIM) or B.shape != (DIM, DIM):
            raise ValueError(f"pair must be 4x4, got {A.shape} and {B.shape}")
        A.flags.writeable = False
        B.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @cached_property
    def trace_A(self) -> complex:
        return complex(np.trace(self.A))

    @cached_property
    def trace_B(self) -> complex:
        return complex(np.trace(self.B))

    @cached_property
    def norm_sq_A(self) -> float:
        return float(np.sum(np.abs(self.A) ** 2))

    @cached_property
    def norm_sq_B(self) -> float:
        return float(np.sum(np.abs(self.B) ** 2))

    @property
    def norm_sq_sum(self) -> float:
        return self.norm_sq_A + self.norm_sq_B

    def kron_sum(self) -> np.ndarray:
        return kron_sum(self.A, self.B)

    def digest(self) -> str:
        return pair_digest(self.A, self.B)

    def __eq__(self, other):
        if not isinstance(other, MatrixPair):
            return NotImplemented
        return np.array_equal(self.A, other.A) and np.array_equal(self.B, other.B)

    __hash__ = None


def pair_digest(A, B) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(A, dtype=np.complex128).tobytes())
    h.update(np.ascontiguousarray(B, dtype=np.complex128).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class ConstraintReport:
    trace_A: complex
    trace_B: complex
    norm_sq_sum: float
    in_X: bool
    min_eigen_gap_A: float
    min_eigen_gap_B: float
    in_Y: bool


@dataclass(frozen=True)
class SpectralSummary:
    sigma1: float
    sigma2: float
    phi: float
    margin: float


def min_eigen_gap(M) -> float:
    """Smallest pairwise distance between eigenvalues (Schur diagonal)."""
    lam = eigenvalues(M)
    diffs = np.abs(lam[:, None] - lam[None, :])
    iu = np.triu_indices(len(lam), 1)
    return float(diffs[iu].min()) if len(lam) > 1 else np.inf


def check_constraints(p: MatrixPair, tol: float = FEASIBILITY_TOL,
                      gap_tol: float = DISTINCT_TOL) -> ConstraintReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    in_X = (abs(p.trace_A) <= tol and abs(p.trace_B) <= tol
            and abs(p.norm_sq_sum - NORM_SQ_TARGET) <= tol)
    gap_A = min_eigen_gap(p.A)
    gap_B = min_eigen_gap(p.B)
    in_Y = in_X and gap_A > gap_tol and gap_B > gap_tol
    return ConstraintReport(p.trace_A, p.trace_B, p.norm_sq_sum, in_X, gap_A, gap_B, in_Y)


def feasibility_residuals(As, Bs):
    """Per-pair ``(|Tr A|, |Tr B|, |norm_sq_sum - 1/4|)`` for stacks."""
    tA = np.abs(np.trace(As, axis1=-2, axis2=-1))
    tB = np.abs(np.trace(Bs, axis1=-2, axis2=-1))
    ns = np.sum(np.abs(As) ** 2, axis=(-2, -1)) + np.sum(np.abs(Bs) ** 2, axis=(-2, -1))
    return tA, tB, np.abs(ns - NORM_SQ_TARGET)


def project_batch(As, Bs):
    """Remove traces, then rescale each pair jointly onto the norm sphere."""
    As = np.array(As, dtype=np.complex128)
    Bs = np.array(Bs, dtype=np.complex128)
    eye = np.eye(DIM)
    As -= (np.trace(As, axis1=-2, axis2=-1) / DIM)[..., None, None] * eye
    Bs -= (np.trace(Bs, axis1=-2, axis2=-1) / DIM)[..., None, None] * eye
    s = np.sum(np.abs(As) ** 2, axis=(-2, -1)) + np.sum(np.abs(Bs) ** 2, axis=(-2, -1))
    if np.any(s <= 1e-14):
        raise ValueError("pair is (numerically) zero after trace removal; cannot project")
    f = np.sqrt(NORM_SQ_TARGET / s)[..., None, None]
    return As * f, Bs * f


def project_to_manifold(p: MatrixPair) -> MatrixPair:
    A, B = project_batch(p.A, p.B)
    return MatrixPair(A, B)


def phi_batch(As, Bs) -> np.ndarray:
    """``sigma_1^2 + sigma_2^2`` of the Kronecker sum, for stacks of pairs."""
    sig = singular_values(kron_sum_batch(As, Bs).reshape(-1, DIM * DIM, DIM * DIM))
    return sig[:, 0] ** 2 + sig[:, 1] ** 2


def phi(p: MatrixPair) -> SpectralSummary:
    sig = singular_values(p.kron_sum())
    s1, s2 = float(sig[0]), float(sig[1])
    value = s1 * s1 + s2 * s2
    return SpectralSummary(s1, s2, value, BOUND - value)


def pair_norm(p: MatrixPair) -> float:
    return float(np.sqrt(p.norm_sq_sum))


def pair_distance(p: MatrixPair, q: MatrixPair) -> float:
    d = np.sum(np.abs(p.A - q.A) ** 2) + np.sum(np.abs(p.B - q.B) ** 2)
    return float(np.sqrt(d))


def variational_phi(p: MatrixPair, *, return_vectors: bool = False):
    """Evaluate ``|B V1 + V1 A^T|^2 + |B V2 + V2 A^T|^2`` at the maximizing pair.

    ``V1``, ``V2`` are the top two right singular vectors of the Kronecker sum,
    reshaped to 4x4 with the column-stacking convention of :func:`vec`.
    """
    X = p.kron_sum()
    _, _, V = top_singular_triplets(X[None], k=2)
    Vs = [unvec(V[0][:, j], DIM) for j in range(2)]
    total = 0.0
    for Vi in Vs:
        R = p.B @ Vi + Vi @ p.A.T
        total += float(np.sum(np.abs(R) ** 2))
    if return_vectors:
        return total, Vs
    return total
