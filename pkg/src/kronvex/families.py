"""Matrix families with a proven bound: 2x2 block-diagonal pairs, the
``B = -U A^T U^*`` / ``B = -U A U^*`` families and pairs with one normal matrix.

Each family comes with a sampler producing feasible pairs and, for the
counterexample search, a projector onto the (linear or conic) set of pairs
that have the family's shape.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable

import numpy as np

from kronvex.conjecture import DIM, NORM_SQ_TARGET, MatrixPair, project_batch, project_to_manifold
from kronvex.linalg import haar_unitaries, haar_unitary, kron_sum
from kronvex.rng import complex_normal

CASE_KINDS = ("I", "II", "III", "III_general")


@dataclass(frozen=True)
class BlockDiagParams:
    """Entries of the block-diagonal pair with equalized diagonals.

    ``A = [[a, a12], [a21, a]] (+) [[-a, a34], [a43, -a]]`` and ``B`` likewise.
    """

    a: complex = 0j
    b: complex = 0j
    a12: complex = 0j
    a21: complex = 0j
    a34: complex = 0j
    a43: complex = 0j
    b12: complex = 0j
    b21: complex = 0j
    b34: complex = 0j
    b43: complex = 0j

    @property
    def offdiag(self):
        return (self.a12, self.a21, self.a34, self.a43, self.b12, self.b21, self.b34, self.b43)

    @property
    def norm_sq_sum(self) -> float:
        return 4 * (abs(self.a) ** 2 + abs(self.b) ** 2) + sum(abs(x) ** 2 for x in self.offdiag)

    @property
    def feasible(self) -> bool:
        return abs(self.norm_sq_sum - NORM_SQ_TARGET) <= 1e-10

    def scaled(self, t: float) -> "BlockDiagParams":
        return BlockDiagParams(**{f.name: getattr(self, f.name) * t for f in fields(self)})

    def normalized(self) -> "BlockDiagParams":
        s = self.norm_sq_sum
        if s <= 0:
            raise ValueError("cannot normalize zero parameters")
        return self.scaled(np.sqrt(NORM_SQ_TARGET / s))


@dataclass(frozen=True)
class YBlocks:
    Y11: np.ndarray
    Y22: np.ndarray
    Y33: np.ndarray
    Y44: np.ndarray

    def as_tuple(self):
        return (self.Y11, self.Y22, self.Y33, self.Y44)


def _block(d, x12, x21, sign=1):
    return np.array([[sign * d, x12], [x21, sign * d]], dtype=np.complex128)


def sub_blocks(params: BlockDiagParams):
    """The 2x2 diagonal blocks ``A11, A22, B11, B22``."""
    p = params
    return (_block(p.a, p.a12, p.a21), _block(p.a, p.a34, p.a43, -1),
            _block(p.b, p.b12, p.b21), _block(p.b, p.b34, p.b43, -1))


def build_block_pair(params: BlockDiagParams) -> MatrixPair:
    A11, A22, B11, B22 = sub_blocks(params)
    A = np.zeros((DIM, DIM), dtype=np.complex128)
    B = np.zeros((DIM, DIM), dtype=np.complex128)
    A[:2, :2], A[2:, 2:] = A11, A22
    B[:2, :2], B[2:, 2:] = B11, B22
    return MatrixPair(A, B)


def equalize_diagonal_2x2(M):
    """Unitary ``U`` and ``M' = U M U^*`` with equal diagonal entries."""
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (2, 2):
        raise ValueError("equalize_diagonal_2x2 needs a 2x2 matrix")
    d = 0.5 * (M[0, 0] - M[1, 1])
    if abs(d) <= 1e-15 * max(1.0, np.abs(M).max()):
        return np.eye(2, dtype=np.complex128), M.copy()
    # Pick the phase phi making w = e^{-i phi} m12 + e^{i phi} m21 parallel to d,
    # then the angle theta zeroing d cos(2 theta) + w sin(2 theta) / 2.
    p = M[0, 1] * np.conj(d)
    q = M[1, 0] * np.conj(d)
    x = -p.real + q.real
    y = p.imag + q.imag
    ph = np.arctan2(-y, x) if (x != 0 or y != 0) else 0.0
    r = (np.exp(-1j * ph) * p + np.exp(1j * ph) * q).real
    theta = 0.5 * np.arctan2(-2 * abs(d) ** 2, r)
    c, s = np.cos(theta), np.sin(theta)
    U = np.array([[c, np.exp(1j * ph) * s], [-np.exp(-1j * ph) * s, c]], dtype=np.complex128)
    return U, U @ M @ U.conj().T


def permutation_P() -> np.ndarray:
    """Permutation regrouping ``X`` of a block-diagonal pair into 4x4 blocks.

    In units of 2x2 identity blocks, block row ``i`` has its identity in block
    column ``(0, 2, 1, 3, 4, 6, 5, 7)[i]``.
    """
    order = (0, 2, 1, 3, 4, 6, 5, 7)
    P = np.zeros((16, 16))
    for i, j in enumerate(order):
        P[2 * i:2 * i + 2, 2 * j:2 * j + 2] = np.eye(2)
    return P


def y_blocks(params: BlockDiagParams) -> YBlocks:
    """The four 4x4 diagonal blocks of ``P X P^T``, written out entrywise."""
    p = params
    a, b = p.a, p.b

    def blk(d, x12, x21, y12, y21):
        # d on the diagonal; (x12, x21) from the A block, (y12, y21) from the B block
        return np.array([
            [d, y12, x12, 0],
            [y21, d, 0, x12],
            [x21, 0, d, y12],
            [0, x21, y21, d],
        ], dtype=np.complex128)

    return YBlocks(
        Y11=blk(b + a, p.a12, p.a21, p.b12, p.b21),
        Y22=blk(-b + a, p.a12, p.a21, p.b34, p.b43),
        Y33=blk(b - a, p.a34, p.a43, p.b12, p.b21),
        Y44=blk(-b - a, p.a34, p.a43, p.b34, p.b43),
    )


def y_block_norms_sq(params: BlockDiagParams):
    """Closed-form ``Tr(Y_ii^* Y_ii)`` for the four blocks."""
    p = params
    s = lambda *xs: sum(abs(x) ** 2 for x in xs)  # noqa: E731
    return (
        4 * abs(p.b + p.a) ** 2 + 2 * s(p.a12, p.a21, p.b12, p.b21),
        4 * abs(p.b - p.a) ** 2 + 2 * s(p.a12, p.a21, p.b34, p.b43),
        4 * abs(p.b - p.a) ** 2 + 2 * s(p.a34, p.a43, p.b12, p.b21),
        4 * abs(p.b + p.a) ** 2 + 2 * s(p.a34, p.a43, p.b34, p.b43),
    )


PARAM_NAMES = tuple(f.name for f in fields(BlockDiagParams))


def params_to_array(params: BlockDiagParams) -> np.ndarray:
    return np.array([getattr(params, k) for k in PARAM_NAMES], dtype=np.complex128)


def params_from_array(row) -> BlockDiagParams:
    return BlockDiagParams(**{k: complex(v) for k, v in zip(PARAM_NAMES, row)})


def sample_case_batch(kind: str, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` rows of feasible block parameters (columns in ``PARAM_NAMES`` order).

    ``I`` zeroes the second A and B blocks' off-diagonals, ``II`` zeroes
    ``a34, a43``, ``III`` takes ``a = b`` real and all off-diagonals real
    nonnegative, ``III_general`` is an unrestricted block pair.
    """
    if kind not in CASE_KINDS:
        raise ValueError(f"unknown case kind {kind!r}; expected one of {CASE_KINDS}")
    P = complex_normal(rng, (n, 10))
    if kind == "I":
        P[:, [4, 5, 8, 9]] = 0
    elif kind == "II":
        P[:, [4, 5]] = 0
    elif kind == "III":
        R = rng.standard_normal((n, 10))
        P = np.abs(R).astype(np.complex128)
        P[:, 0] = P[:, 1] = R[:, 0]
    s = 4 * (np.abs(P[:, 0]) ** 2 + np.abs(P[:, 1]) ** 2) + np.sum(np.abs(P[:, 2:]) ** 2, axis=1)
    return P * np.sqrt(NORM_SQ_TARGET / s)[:, None]


def sample_case(kind: str, rng: np.random.Generator) -> BlockDiagParams:
    """One random feasible parameter set with the structure of ``kind``."""
    return params_from_array(sample_case_batch(kind, rng, 1)[0])


def block_pairs_batch(P: np.ndarray):
    """Stacks ``(As, Bs)`` built from rows of block parameters."""
    n = P.shape[0]
    a, b, a12, a21, a34, a43, b12, b21, b34, b43 = P.T
    As = np.zeros((n, DIM, DIM), dtype=np.complex128)
    Bs = np.zeros_like(As)
    for M, d, x12, x21, x34, x43 in ((As, a, a12, a21, a34, a43), (Bs, b, b12, b21, b34, b43)):
        M[:, 0, 0] = M[:, 1, 1] = d
        M[:, 2, 2] = M[:, 3, 3] = -d
        M[:, 0, 1], M[:, 1, 0], M[:, 2, 3], M[:, 3, 2] = x12, x21, x34, x43
    return As, Bs


def y_blocks_batch(P: np.ndarray) -> np.ndarray:
    """Array ``(n, 4, 4, 4)``: the four Y-blocks of each parameter row."""
    a, b, a12, a21, a34, a43, b12, b21, b34, b43 = P.T
    specs = ((b + a, a12, a21, b12, b21), (-b + a, a12, a21, b34, b43),
             (b - a, a34, a43, b12, b21), (-b - a, a34, a43, b34, b43))
    Y = np.zeros((P.shape[0], 4, 4, 4), dtype=np.complex128)
    for k, (d, x12, x21, y12, y21) in enumerate(specs):
        for i in range(4):
            Y[:, k, i, i] = d
        Y[:, k, 0, 1] = Y[:, k, 2, 3] = y12
        Y[:, k, 1, 0] = Y[:, k, 3, 2] = y21
        Y[:, k, 0, 2] = Y[:, k, 1, 3] = x12
        Y[:, k, 2, 0] = Y[:, k, 3, 1] = x21
    return Y


def _check_unitary(U):
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (DIM, DIM):
        raise ValueError(f"U must be 4x4, got {U.shape}")
    dev = np.abs(U.conj().T @ U - np.eye(DIM)).max()
    if dev > 1e-10:
        raise ValueError(f"U is not unitary (deviation {dev:.3e})")
    return U


def family_minus_AT(A, U) -> MatrixPair:
    """Feasible rescaling of ``(A, -U A^T U^*)``."""
    U = _check_unitary(U)
    A = np.asarray(A, dtype=np.complex128)
    return project_to_manifold(MatrixPair(A, -U @ A.T @ U.conj().T))


def family_minus_A(A, U) -> MatrixPair:
    """Feasible rescaling of ``(A, -U A U^*)``."""
    U = _check_unitary(U)
    A = np.asarray(A, dtype=np.complex128)
    return project_to_manifold(MatrixPair(A, -U @ A @ U.conj().T))


def _traceless(M):
    return M - np.trace(M) / DIM * np.eye(DIM)


def sample_normal_A_pair(rng: np.random.Generator) -> MatrixPair:
    lam = complex_normal(rng, DIM)
    lam -= lam.mean()
    W = haar_unitary(DIM, rng)
    A = (W * lam) @ W.conj().T
    B = _traceless(complex_normal(rng, (DIM, DIM)))
    return project_to_manifold(MatrixPair(A, B))


def sample_uniform_pair(rng: np.random.Generator) -> MatrixPair:
    """Gaussian entries pushed onto the constraint set (rotation invariant)."""
    Z = complex_normal(rng, (2, DIM, DIM))
    return project_to_manifold(MatrixPair(Z[0], Z[1]))


def sample_uniform_batch(rng: np.random.Generator, n: int):
    Z = complex_normal(rng, (2, n, DIM, DIM))
    return project_batch(Z[0], Z[1])


# -- family registry used by the CLI and the search -------------------------

@dataclass(frozen=True)
class Family:
    """A sampler plus a shape projector.

    ``make_projector(rng)`` draws the family's fixed ingredients (e.g. the
    unitary ``U``) and returns ``(start_pair, project)`` where ``project`` maps
    an arbitrary ``(A, B)`` to the closest pair with the family's shape.  The
    projector commutes with trace removal and scaling, so projecting and then
    retracting onto the constraint set stays inside the family.
    """

    name: str
    sample: Callable[[np.random.Generator], MatrixPair]
    make_projector: Callable[[np.random.Generator], tuple]


def _identity_projector(rng):
    start = sample_uniform_pair(rng)
    return start, lambda A, B: (A, B)


def _minus_projector(transpose):
    def make(rng):
        U = haar_unitary(DIM, rng)
        Uh = U.conj().T
        if transpose:
            L = lambda A: -U @ A.T @ Uh            # noqa: E731
            Ladj = lambda G: -(Uh @ G @ U).T       # noqa: E731
        else:
            L = lambda A: -U @ A @ Uh              # noqa: E731
            Ladj = lambda G: -Uh @ G @ U           # noqa: E731

        def project(A, B):
            # orthogonal projection onto the graph {(A, L A)} of an isometry
            x = 0.5 * (A + Ladj(B))
            return x, L(x)

        A0 = _traceless(complex_normal(rng, (DIM, DIM)))
        start = project_to_manifold(MatrixPair(A0, L(A0)))
        return start, project
    return make


def _normal_projector(rng):
    W = haar_unitary(DIM, rng)
    Wh = W.conj().T

    def project(A, B):
        lam = np.diag(Wh @ A @ W)
        return (W * lam) @ Wh, B

    lam = complex_normal(rng, DIM)
    lam -= lam.mean()
    B0 = _traceless(complex_normal(rng, (DIM, DIM)))
    start = project_to_manifold(MatrixPair((W * lam) @ Wh, B0))
    return start, project


def _block_projector(kind):
    mask = np.zeros((DIM, DIM), dtype=bool)
    mask[:2, :2] = mask[2:, 2:] = True
    np.fill_diagonal(mask, False)
    mask_A = mask.copy()
    mask_B = mask.copy()
    if kind == "I":
        mask_A[2:, 2:] = mask_B[2:, 2:] = False
    elif kind == "II":
        mask_A[2:, 2:] = False
    signs = np.array([1.0, 1.0, -1.0, -1.0])

    def project(A, B):
        # diagonal pattern (d, d, -d, -d) plus masked off-diagonals
        dA = np.dot(signs, np.diag(A)) / 4
        dB = np.dot(signs, np.diag(B)) / 4
        if kind == "III":
            dA = dB = 0.5 * (dA + dB).real
            A = np.maximum(A.real, 0.0).astype(np.complex128)
            B = np.maximum(B.real, 0.0).astype(np.complex128)
        A2 = np.where(mask_A, A, 0) + np.diag(dA * signs)
        B2 = np.where(mask_B, B, 0) + np.diag(dB * signs)
        return A2, B2

    def make(rng):
        return build_block_pair(sample_case(kind, rng)), project
    return make


def _case_sampler(kind):
    return lambda rng: build_block_pair(sample_case(kind, rng))


def _minus_sampler(fn):
    def sample(rng):
        A = _traceless(complex_normal(rng, (DIM, DIM)))
        return fn(A, haar_unitary(DIM, rng))
    return sample


FAMILIES = {
    "case_i": Family("case_i", _case_sampler("I"), _block_projector("I")),
    "case_ii": Family("case_ii", _case_sampler("II"), _block_projector("II")),
    "case_iii": Family("case_iii", _case_sampler("III"), _block_projector("III")),
    "case_iii_general": Family("case_iii_general", _case_sampler("III_general"),
                               _block_projector("III_general")),
    "minus_at": Family("minus_at", _minus_sampler(family_minus_AT), _minus_projector(True)),
    "minus_a": Family("minus_a", _minus_sampler(family_minus_A), _minus_projector(False)),
    "normal": Family("normal", sample_normal_A_pair, _normal_projector),
    "uniform": Family("uniform", sample_uniform_pair, _identity_projector),
}


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None


_CASE_OF_FAMILY = {"case_i": "I", "case_ii": "II", "case_iii": "III",
                   "case_iii_general": "III_general"}


def normal_family_batch(rng: np.random.Generator, n: int):
    lam = complex_normal(rng, (n, DIM))
    lam -= lam.mean(axis=1, keepdims=True)
    W = haar_unitaries(DIM, n, rng)
    A = (W * lam[:, None, :]) @ np.swapaxes(W, 1, 2).conj()
    B = complex_normal(rng, (n, DIM, DIM))
    B -= (np.trace(B, axis1=1, axis2=2) / DIM)[:, None, None] * np.eye(DIM)
    return project_batch(A, B)


def sample_family_batch(name: str, rng: np.random.Generator, n: int):
    """Stacks ``(As, Bs)`` of ``n`` feasible pairs drawn from a named family."""
    get_family(name)
    if name == "uniform":
        return sample_uniform_batch(rng, n)
    if name in _CASE_OF_FAMILY:
        return block_pairs_batch(sample_case_batch(_CASE_OF_FAMILY[name], rng, n))
    if name == "normal":
        return normal_family_batch(rng, n)
    return minus_family_batch(rng, n, transpose=(name == "minus_at"))


def minus_family_batch(rng: np.random.Generator, n: int, transpose: bool):
    """Vectorized ``family_minus_AT`` / ``family_minus_A`` over Haar draws."""
    A = complex_normal(rng, (n, DIM, DIM))
    A -= (np.trace(A, axis1=1, axis2=2) / DIM)[:, None, None] * np.eye(DIM)
    U = haar_unitaries(DIM, n, rng)
    Uh = np.swapaxes(U, 1, 2).conj()
    inner = np.swapaxes(A, 1, 2) if transpose else A
    B = -U @ inner @ Uh
    return project_batch(A, B)


def kron_sum_of_blocks(params: BlockDiagParams) -> YBlocks:
    """Y-blocks assembled as Kronecker sums of the 2x2 sub-blocks."""
    A11, A22, B11, B22 = sub_blocks(params)
    return YBlocks(kron_sum(A11, B11), kron_sum(A11, B22), kron_sum(A22, B11), kron_sum(A22, B22))
