"""Dense complex linear algebra for the 2x2 .. 16x16 matrices used here.

Matrices are plain ``complex128`` numpy arrays.  Decompositions are computed
by the Jacobi and shifted-QR kernels in :mod:`kronvex.linalg._kernels`;
LAPACK is never called on these paths so that it can serve as an
independent check in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kronvex.linalg import _kernels

ComplexMatrix = np.ndarray

JACOBI_TOL = 1e-13
MAX_SWEEPS = 100
SCHUR_MAX_ITER = 60


class ConvergenceError(ArithmeticError):
    """An iterative decomposition hit its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual


def as_matrix(M, *, square=False) -> np.ndarray:
    """Validate and convert ``M`` to a 2-D finite complex array."""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _as_stack(Ms) -> np.ndarray:
    arr = np.asarray(Ms, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise ValueError(f"expected a stack of matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix stack has non-finite entries")
    return np.ascontiguousarray(arr)


def vec(M) -> np.ndarray:
    """Stack the columns of ``M`` into one vector."""
    return as_matrix(M).reshape(-1, order="F")


def unvec(v, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    cols = rows if cols is None else cols
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (rows * cols,):
        raise ValueError(f"cannot reshape vector of shape {v.shape} to {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def kron(A, B) -> np.ndarray:
    """Kronecker product: the block matrix whose (i, j) block is ``a_ij * B``."""
    A = as_matrix(A)
    B = as_matrix(B)
    m, n = A.shape
    p, q = B.shape
    return (A[:, None, :, None] * B[None, :, None, :]).reshape(m * p, n * q)


def kron_sum_batch(As, Bs) -> np.ndarray:
    """``A (x) I + I (x) B`` for stacks of equally sized square matrices."""
    As = np.asarray(As, dtype=np.complex128)
    Bs = np.asarray(Bs, dtype=np.complex128)
    if As.shape != Bs.shape or As.shape[-1] != As.shape[-2]:
        raise ValueError(f"kron_sum needs equal square shapes, got {As.shape} and {Bs.shape}")
    n = As.shape[-1]
    eye = np.eye(n)
    X = (As[..., :, None, :, None] * eye[:, None, :]
         + eye[:, None, :, None] * Bs[..., None, :, None, :])
    return X.reshape(As.shape[:-2] + (n * n, n * n))


def kron_sum(A, B) -> np.ndarray:
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    if A.shape != B.shape:
        raise ValueError(f"kron_sum needs equal dimensions, got {A.shape} and {B.shape}")
    return kron_sum_batch(A, B)


def frobenius_norm(M) -> float:
    M = np.asarray(M, dtype=np.complex128)
    return float(np.sqrt(np.sum(M.real ** 2 + M.imag ** 2)))


def inner_product(A, B) -> complex:
    """``Tr(A^* B)``."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return complex(np.sum(A.conj() * B))


def sylvester_apply(B, A, D) -> np.ndarray:
    """The Sylvester operator ``D -> B D + D A^T``."""
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    D = as_matrix(D, square=True)
    if not A.shape == B.shape == D.shape:
        raise ValueError(f"shape mismatch: {A.shape}, {B.shape}, {D.shape}")
    return B @ D + D @ A.T


@dataclass(frozen=True)
class SvdResult:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


@dataclass(frozen=True)
class SchurResult:
    unitary: np.ndarray
    upper_triangular: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.upper_triangular).copy()


def _complete_orthonormal(U, k):
    """Replace columns ``k:`` of ``U`` by an orthonormal completion."""
    m = U.shape[0]
    basis = [U[:, j] for j in range(k)]
    for e in np.eye(m, dtype=np.complex128):
        if len(basis) == U.shape[1]:
            break
        w = e.copy()
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        nw = np.linalg.norm(w)
        if nw > 1e-8:
            basis.append(w / nw)
    return np.stack(basis, axis=1)


def _pow2_scale(Xs):
    """Per-matrix powers of two bringing the largest entry near 1 (exact rescaling)."""
    mx = np.abs(Xs).max(axis=(-2, -1))
    _, e = np.frexp(np.where(mx > 0, mx, 1.0))
    return np.ldexp(1.0, -e)


def _jacobi_svd_stack(Xs, tol, want_vectors):
    f = _pow2_scale(Xs)
    sig, W, V, sweeps = _kernels.jacobi_svd_batch(
        np.ascontiguousarray(Xs * f[:, None, None]), tol, MAX_SWEEPS, want_vectors)
    sig = sig / f[:, None]
    W = W / f[:, None, None]
    if np.any(sweeps < 0):
        bad = int(np.argmax(sweeps < 0))
        G = W[bad].conj().T @ W[bad]
        off = np.linalg.norm(G - np.diag(np.diag(G)))
        raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps", off)
    order = np.argsort(-sig, axis=1, kind="stable")
    return sig, W, V, order


def singular_values(Ms, tol: float = JACOBI_TOL) -> np.ndarray:
    """Descending singular values of a matrix or of each matrix in a stack."""
    arr = np.asarray(Ms)
    single = arr.ndim == 2
    Xs = _as_stack(arr)
    if Xs.shape[1] < Xs.shape[2]:
        Xs = np.ascontiguousarray(np.swapaxes(Xs, 1, 2).conj())
    sig, _, _, order = _jacobi_svd_stack(Xs, tol, False)
    sig = np.take_along_axis(sig, order, axis=1)
    return sig[0] if single else sig


def top_singular_triplets(Xs, k: int = 2, tol: float = JACOBI_TOL):
    """Leading ``k`` singular values and vectors for a stack of square matrices.

    Returns ``(sigma, U, V)`` with ``sigma`` holding *all* singular values
    (descending) and ``U``, ``V`` of shape ``(N, n, k)``.  Left vectors for
    zero singular values are returned as zeros.
    """
    Xs = _as_stack(Xs)
    sig, W, V, order = _jacobi_svd_stack(Xs, tol, True)
    sig = np.take_along_axis(sig, order, axis=1)
    top = order[:, :k]
    W = np.take_along_axis(W, top[:, None, :], axis=2)
    V = np.take_along_axis(V, top[:, None, :], axis=2)
    s = sig[:, None, :k]
    U = np.divide(W, s, out=np.zeros_like(W), where=s > 0)
    return sig, U, V


def svd(M, tol: float = JACOBI_TOL) -> SvdResult:
    """Thin SVD ``M = U diag(s) V^*`` by one-sided Jacobi.

    For ``m x n`` input with ``m >= n``, ``U`` is ``m x n``; wide inputs are
    handled through the conjugate transpose.
    """
    M = as_matrix(M)
    m, n = M.shape
    if m < n:
        r = svd(M.conj().T, tol)
        return SvdResult(r.singular_values, r.right_vectors, r.left_vectors)
    sig, W, V, order = _jacobi_svd_stack(np.ascontiguousarray(M[None]), tol, True)
    o = order[0]
    s = sig[0][o]
    W = W[0][:, o]
    V = V[0][:, o]
    scale = max(1.0, float(s[0]) if n else 1.0)
    nz = int(np.sum(s > 1e-14 * scale))
    U = np.zeros((m, n), dtype=np.complex128)
    U[:, :nz] = W[:, :nz] / s[:nz]
    if nz < n:
        U = _complete_orthonormal(U, nz)
    return SvdResult(s, U, V)


def _check_hermitian(Hs):
    dev = np.sqrt(np.sum(np.abs(Hs - np.swapaxes(Hs, -1, -2).conj()) ** 2, axis=(-2, -1)))
    nrm = np.sqrt(np.sum(np.abs(Hs) ** 2, axis=(-2, -1)))
    bad = dev > 1e-10 * np.maximum(1.0, nrm)
    if np.any(bad):
        raise ValueError(f"matrix is not Hermitian (deviation {dev[bad].max():.3e})")


def hermitian_eigenvalues(H, tol: float = JACOBI_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix (or stack), descending."""
    arr = np.asarray(H)
    single = arr.ndim == 2
    Hs = _as_stack(arr)
    if Hs.shape[1] != Hs.shape[2]:
        raise ValueError(f"expected square matrices, got {Hs.shape[1:]}")
    f = _pow2_scale(Hs)
    Hs = Hs * f[:, None, None]
    _check_hermitian(Hs)
    Hs = 0.5 * (Hs + np.swapaxes(Hs, 1, 2).conj())
    vals, sweeps = _kernels.jacobi_eigh_batch(np.ascontiguousarray(Hs), tol, MAX_SWEEPS)
    vals = vals / f[:, None]
    if np.any(sweeps < 0):
        raise ConvergenceError(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")
    vals = -np.sort(-vals, axis=1)
    return vals[0] if single else vals


def schur_triangularize(M) -> SchurResult:
    """Unitary triangularization ``M = Q T Q^*`` with ``T`` upper triangular."""
    M = as_matrix(M, square=True)
    n = M.shape[0]
    f = float(_pow2_scale(M[None])[0])
    T = M * f
    Q = np.eye(n, dtype=np.complex128)
    its = _kernels.schur_one(T, Q, SCHUR_MAX_ITER)
    T /= f
    if its < 0:
        sub = np.abs(np.diag(T, -1)).max() if n > 1 else 0.0
        raise ConvergenceError("shifted QR did not converge", float(sub))
    return SchurResult(Q, np.triu(T))


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues of a general square matrix, read off its Schur form."""
    return schur_triangularize(M).eigenvalues


def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Haar-distributed ``n x n`` unitaries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    Z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=1, axis2=2)
    # fixing the phases of diag(R) makes the QR map equivariant, hence Haar
    return Q * (d / np.abs(d))[:, None, :]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return haar_unitaries(n, 1, rng)[0]
