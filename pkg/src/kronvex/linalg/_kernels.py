"""Compiled kernels for small dense complex matrices.

All routines operate on a single matrix; the ``*_batch`` drivers loop over a
leading stack axis.  Every matrix is processed independently and identically,
so a result never depends on which other matrices share its batch.
"""

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps


@njit(cache=True, nogil=True)
def _rotation(alpha, beta, gamma):
    # Jacobi rotation annihilating gamma in [[alpha, gamma], [conj(gamma), beta]].
    ag = abs(gamma)
    zeta = (beta - alpha) / (2.0 * ag)
    sgn = 1.0 if zeta >= 0.0 else -1.0
    t = sgn / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = c * t
    phase = gamma.conjugate() / ag  # exp(-i arg gamma)
    return c, s, phase


@njit(cache=True, nogil=True)
def jacobi_svd_one(W, V, tol, max_sweeps, want_v):
    """One-sided Jacobi on the columns of ``W`` (modified in place).

    On exit the columns of ``W`` are mutually orthogonal, ``W = M V``.
    Returns the number of sweeps used, or -1 if the cap was hit.
    """
    m, n = W.shape
    total = 0.0
    for i in range(m):
        for j in range(n):
            total += W[i, j].real * W[i, j].real + W[i, j].imag * W[i, j].imag
    # columns below this squared norm are round-off residue of the whole matrix
    negligible = _EPS * _EPS * total
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0j
                for i in range(m):
                    wp = W[i, p]
                    wq = W[i, q]
                    alpha += wp.real * wp.real + wp.imag * wp.imag
                    beta += wq.real * wq.real + wq.imag * wq.imag
                    gamma += wp.conjugate() * wq
                if (abs(gamma) <= tol * np.sqrt(alpha * beta) or abs(gamma) == 0.0
                        or min(alpha, beta) <= negligible):
                    continue
                rotated = True
                c, s, phase = _rotation(alpha, beta, gamma)
                for i in range(m):
                    wp = W[i, p]
                    wq = W[i, q] * phase
                    W[i, p] = c * wp - s * wq
                    W[i, q] = s * wp + c * wq
                if want_v:
                    for i in range(n):
                        vp = V[i, p]
                        vq = V[i, q] * phase
                        V[i, p] = c * vp - s * vq
                        V[i, q] = s * vp + c * vq
        if not rotated:
            return sweep + 1
    return -1


@njit(cache=True, nogil=True)
def jacobi_svd_batch(Ms, tol, max_sweeps, want_v):
    N, m, n = Ms.shape
    W = Ms.copy()
    V = np.zeros((N, n, n), dtype=np.complex128)
    sig = np.empty((N, n))
    sweeps = np.empty(N, dtype=np.int64)
    for k in range(N):
        for i in range(n):
            V[k, i, i] = 1.0
        sweeps[k] = jacobi_svd_one(W[k], V[k], tol, max_sweeps, want_v)
        for j in range(n):
            acc = 0.0
            for i in range(m):
                w = W[k, i, j]
                acc += w.real * w.real + w.imag * w.imag
            sig[k, j] = np.sqrt(acc)
    return sig, W, V, sweeps


@njit(cache=True, nogil=True)
def _offdiag_norm(H):
    n = H.shape[0]
    off = 0.0
    tot = 0.0
    for i in range(n):
        for j in range(n):
            a = abs(H[i, j]) ** 2
            tot += a
            if i != j:
                off += a
    return np.sqrt(off), np.sqrt(tot)


@njit(cache=True, nogil=True)
def jacobi_eigh_one(H, tol, max_sweeps):
    """Cyclic Jacobi on a Hermitian matrix (modified in place to diagonal)."""
    n = H.shape[0]
    off, tot = _offdiag_norm(H)
    if off <= tol * tot:
        return 0
    for sweep in range(max_sweeps):
        for p in range(n - 1):
            for q in range(p + 1, n):
                gamma = H[p, q]
                if gamma == 0:
                    continue
                c, s, phase = _rotation(H[p, p].real, H[q, q].real, gamma)
                cphase = phase.conjugate()
                for i in range(n):
                    hp = H[i, p]
                    hq = H[i, q] * phase
                    H[i, p] = c * hp - s * hq
                    H[i, q] = s * hp + c * hq
                for j in range(n):
                    hp = H[p, j]
                    hq = H[q, j] * cphase
                    H[p, j] = c * hp - s * hq
                    H[q, j] = s * hp + c * hq
                H[p, q] = 0.0
                H[q, p] = 0.0
                H[p, p] = H[p, p].real
                H[q, q] = H[q, q].real
        off, tot = _offdiag_norm(H)
        if off <= tol * tot:
            return sweep + 1
    return -1


@njit(cache=True, nogil=True)
def jacobi_eigh_batch(Hs, tol, max_sweeps):
    N, n, _ = Hs.shape
    work = Hs.copy()
    vals = np.empty((N, n))
    sweeps = np.empty(N, dtype=np.int64)
    for k in range(N):
        sweeps[k] = jacobi_eigh_one(work[k], tol, max_sweeps)
        for i in range(n):
            vals[k, i] = work[k, i, i].real
    return vals, sweeps


@njit(cache=True, nogil=True)
def _givens(x, y):
    # G = [[c, s], [-conj(s), c]] with G @ [x, y] = [r, 0]
    ax = abs(x)
    nrm = np.sqrt(ax * ax + abs(y) ** 2)
    if nrm == 0.0:
        return 1.0, 0j
    if ax == 0.0:
        return 0.0, 1.0 + 0j
    alpha = x / ax
    return ax / nrm, alpha * y.conjugate() / nrm


@njit(cache=True, nogil=True)
def _apply_givens(H, Q, k, c, s, col_lo, row_hi):
    n = H.shape[0]
    sc = s.conjugate()
    for j in range(col_lo, n):
        a = H[k, j]
        b = H[k + 1, j]
        H[k, j] = c * a + s * b
        H[k + 1, j] = -sc * a + c * b
    for i in range(row_hi + 1):
        a = H[i, k]
        b = H[i, k + 1]
        H[i, k] = c * a + sc * b
        H[i, k + 1] = -s * a + c * b
    for i in range(n):
        a = Q[i, k]
        b = Q[i, k + 1]
        Q[i, k] = c * a + sc * b
        Q[i, k + 1] = -s * a + c * b


@njit(cache=True, nogil=True)
def schur_one(H, Q, max_iter):
    """Complex Schur form by Householder-Hessenberg reduction and shifted QR.

    ``H`` becomes upper triangular and ``Q`` accumulates the unitary factor,
    so that the input equals ``Q H Q^*``.  Returns the total number of QR
    iterations, or -1 when one eigenvalue needed more than ``max_iter``.
    """
    n = H.shape[0]
    # Hessenberg reduction.
    for k in range(n - 2):
        m = n - k - 1
        v = np.empty(m, dtype=np.complex128)
        xnorm = 0.0
        for i in range(m):
            v[i] = H[k + 1 + i, k]
            xnorm += abs(v[i]) ** 2
        xnorm = np.sqrt(xnorm)
        if xnorm == 0.0:
            continue
        x0 = v[0]
        ph = x0 / abs(x0) if abs(x0) > 0.0 else 1.0 + 0j
        v[0] = x0 + ph * xnorm
        vv = 0.0
        for i in range(m):
            vv += abs(v[i]) ** 2
        if vv == 0.0:
            continue
        # H <- P H P with P = I - 2 v v^* / (v^* v) acting on rows/cols k+1..
        for j in range(n):
            acc = 0j
            for i in range(m):
                acc += v[i].conjugate() * H[k + 1 + i, j]
            acc *= 2.0 / vv
            for i in range(m):
                H[k + 1 + i, j] -= v[i] * acc
        for i in range(n):
            acc = 0j
            for j in range(m):
                acc += H[i, k + 1 + j] * v[j]
            acc *= 2.0 / vv
            for j in range(m):
                H[i, k + 1 + j] -= acc * v[j].conjugate()
        for i in range(n):
            acc = 0j
            for j in range(m):
                acc += Q[i, k + 1 + j] * v[j]
            acc *= 2.0 / vv
            for j in range(m):
                Q[i, k + 1 + j] -= acc * v[j].conjugate()
        for i in range(k + 2, n):
            H[i, k] = 0.0
    hnorm = 0.0
    for i in range(n):
        for j in range(n):
            hnorm += abs(H[i, j]) ** 2
    hnorm = np.sqrt(hnorm)
    if hnorm == 0.0:
        hnorm = 1.0
    total = 0
    hi = n - 1
    its = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            scale = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if scale == 0.0:
                scale = hnorm
            # local test, plus an absolute floor far below the backward-error level
            if abs(H[lo, lo - 1]) <= _EPS * scale or abs(H[lo, lo - 1]) <= _EPS * _EPS * hnorm:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if its > max_iter:
            return -1
        if its % 10 == 0:
            mu = H[hi, hi] + abs(H[hi, hi - 1])
        else:
            a = H[hi - 1, hi - 1]
            b = H[hi - 1, hi]
            c = H[hi, hi - 1]
            d = H[hi, hi]
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        for k in range(lo, hi):
            if k == lo:
                x = H[k, k] - mu
                y = H[k + 1, k]
            else:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            cg, sg = _givens(x, y)
            _apply_givens(H, Q, k, cg, sg, max(k - 1, 0), min(k + 2, hi))
            if k > lo:
                H[k + 1, k - 1] = 0.0
    return total
