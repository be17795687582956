"""Pushing a constraint-set pair to one whose matrices have distinct eigenvalues.

The matrix is brought to Schur form ``A = Q T Q^*``; coincident diagonal
entries of ``T`` receive a traceless diagonal perturbation, the result is
rotated back and rescaled to the original Frobenius norm.  Because ``T`` stays
triangular, the perturbed eigenvalues are exactly the perturbed diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kronvex.conjecture import DISTINCT_TOL, MatrixPair, min_eigen_gap, pair_distance
from kronvex.linalg import frobenius_norm, schur_triangularize

MAX_RETRIES = 64
# Schur diagonal entries closer than this (relative to max(1, |A|_F)) are
# treated as one repeated eigenvalue.  It sits above the ~sqrt(eps) splitting
# that rounding produces for defective double eigenvalues.
CLUSTER_TOL = 1e-6

_CASE_BY_SIZE = {2: "two_equal", 3: "three_equal", 4: "four_equal"}


class PerturbationError(RuntimeError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class PerturbationCertificate:
    distance: float
    norm_preserved: bool
    traceless: bool
    min_gap: float
    epsilon_used: float
    case_applied: str
    radius: float

    @property
    def valid(self) -> bool:
        return (self.distance <= self.radius / np.sqrt(2) and self.norm_preserved
                and self.traceless and self.min_gap > DISTINCT_TOL)


def eigenvalue_gaps(A) -> float:
    """Minimum pairwise distance among the eigenvalues of ``A``."""
    return min_eigen_gap(A)


def coincidence_groups(values, tol):
    """Partition indices into clusters of values within ``tol`` (single linkage)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _pattern(size, eps):
    """Traceless offsets spreading ``size`` coincident entries apart."""
    if size == 2:
        return [eps, -eps]
    if size == 3:
        w = np.exp(2j * np.pi / 3)
        return [eps, eps * w, -eps - eps * w]
    if size == 4:
        return [eps, -eps, 1j * eps, -1j * eps]
    raise ValueError(f"no perturbation pattern for a group of {size}")


def _certify(A, A_y, radius, eps, case):
    nA = frobenius_norm(A)
    return PerturbationCertificate(
        distance=frobenius_norm(A_y - A),
        norm_preserved=bool(abs(frobenius_norm(A_y) - nA) <= 1e-12 * nA) if nA > 0 else False,
        traceless=bool(abs(np.trace(A_y)) <= 1e-12),
        min_gap=eigenvalue_gaps(A_y),
        epsilon_used=float(eps),
        case_applied=case,
        radius=float(radius),
    )


def perturb_to_distinct(A, r: float, rng: np.random.Generator):
    """Return ``(A_y, certificate)`` with distinct eigenvalues near ``A``.

    ``A_y`` is traceless, has the Frobenius norm of ``A`` and lies within
    ``r / sqrt(2)`` of it.  Raises :class:`PerturbationError` if no valid
    perturbation is found after ``MAX_RETRIES`` halvings of the step.
    """
    A = np.asarray(A, dtype=np.complex128)
    if r <= 0:
        raise ValueError("radius must be positive")
    if abs(np.trace(A)) > 1e-10:
        raise ValueError("perturb_to_distinct needs a traceless matrix")
    nA = frobenius_norm(A)
    if nA == 0.0:
        raise PerturbationError("the zero matrix cannot keep its norm and gain distinct eigenvalues")

    schur = schur_triangularize(A)
    Q, T = schur.unitary, schur.upper_triangular
    lam = np.diag(T)
    groups = coincidence_groups(lam, CLUSTER_TOL * max(1.0, nA))
    repeated = [g for g in groups if len(g) > 1]
    if not repeated:
        cert = _certify(A, A, r, 0.0, "none")
        if cert.valid:
            return A.copy(), cert
        raise PerturbationError("eigenvalues are neither clustered nor distinct", cert)

    case = _CASE_BY_SIZE[max(len(g) for g in repeated)]
    reps = [lam[g[0]] for g in groups]
    sep = [abs(x - y) for i, x in enumerate(reps) for y in reps[i + 1:]]
    eps = r / (4 * np.sqrt(2))
    if sep:
        eps = min(eps, 0.1 * min(sep))
    phase = np.exp(2j * np.pi * rng.random())

    cert = None
    for _ in range(MAX_RETRIES):
        offsets = np.zeros(len(lam), dtype=np.complex128)
        for g in repeated:
            offsets[g] = _pattern(len(g), eps * phase)
        A_eps = Q @ (T + np.diag(offsets)) @ Q.conj().T
        A_eps -= np.trace(A_eps) / len(lam) * np.eye(len(lam))
        A_y = A_eps * (nA / frobenius_norm(A_eps))
        cert = _certify(A, A_y, r, eps, case)
        if cert.valid:
            return A_y, cert
        eps *= 0.5
    raise PerturbationError(f"no valid perturbation after {MAX_RETRIES} retries", cert)


def _perturb_zero(n, r, rng):
    # A zero matrix has no norm to preserve; the four-equal pattern is used directly.
    eps = r / (4 * np.sqrt(2))
    phase = np.exp(2j * np.pi * rng.random())
    return np.diag(_pattern(n, eps * phase)).astype(np.complex128)


def densify_pair(p: MatrixPair, r: float, rng: np.random.Generator):
    """A pair with distinct eigenvalues within pair distance ``r`` of ``p``.

    Nonzero matrices are perturbed independently with their norms preserved.
    A zero matrix (possible in the constraint set, e.g. ``B = 0``) cannot keep
    norm zero and gain distinct eigenvalues, so it receives a small diagonal
    pattern and the other matrix is shrunk to restore the pair norm; its
    certificate then reports ``norm_preserved=False``.
    """
    certs = []
    outs = []
    zero = []
    for M in (p.A, p.B):
        if frobenius_norm(M) == 0.0:
            zero.append(True)
            outs.append(_perturb_zero(M.shape[0], r, rng))
            certs.append(None)
        else:
            zero.append(False)
            M_y, cert = perturb_to_distinct(M, r, rng)
            outs.append(M_y)
            certs.append(cert)
    if any(zero) and not all(zero):
        k = zero.index(False)
        extra = sum(frobenius_norm(outs[i]) ** 2 for i in range(2) if zero[i])
        nk = frobenius_norm(outs[k])
        outs[k] = outs[k] * np.sqrt(max(nk ** 2 - extra, 0.0)) / nk
    if any(zero):
        # the pair norm is kept by the rescale above, so recertify against the originals
        eps0 = r / (4 * np.sqrt(2))
        certs = [_certify(orig, out, r, eps0 if c is None else c.epsilon_used,
                          "four_equal" if c is None else c.case_applied)
                 for orig, out, c in zip((p.A, p.B), outs, certs)]
    return MatrixPair(outs[0], outs[1]), tuple(certs)


def densify_distance(p: MatrixPair, q: MatrixPair) -> float:
    return pair_distance(p, q)
