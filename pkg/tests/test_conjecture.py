import numpy as np
import pytest
from hypothesis import given, strategies as st

from kronvex.conjecture import (
    BOUND,
    MatrixPair,
    check_constraints,
    feasibility_residuals,
    pair_distance,
    pair_norm,
    phi,
    phi_batch,
    project_batch,
    project_to_manifold,
    variational_phi,
)
from kronvex.families import sample_uniform_batch, sample_uniform_pair
from kronvex.linalg import haar_unitary
from kronvex.rng import make_rng
from conftest import cnormal, witness

C = 1 / np.sqrt(8)
Z4 = np.zeros((4, 4))


def diag_pair():
    return MatrixPair(np.diag([C, -C, 0, 0]), Z4)


seeds = st.integers(0, 2 ** 32 - 1)


def test_matrix_pair_validation():
    with pytest.raises(ValueError):
        MatrixPair(np.eye(3), np.eye(3))
    with pytest.raises(ValueError):
        MatrixPair(np.full((4, 4), np.inf), Z4)
    p = diag_pair()
    with pytest.raises(ValueError):
        p.A[0, 0] = 1
    assert p == diag_pair()
    assert p.digest() == diag_pair().digest()


def test_check_constraints_examples():
    assert check_constraints(diag_pair()).in_X
    assert not check_constraints(MatrixPair(0.1 * np.eye(4), Z4)).in_X
    r = check_constraints(MatrixPair(Z4, Z4))
    assert not r.in_X and not r.in_Y


def test_in_Y_requires_distinct_eigenvalues():
    c = 0.25
    r = check_constraints(MatrixPair(np.diag([c, c, -c, -c]), Z4))
    assert r.in_X and not r.in_Y and r.min_eigen_gap_A == 0
    A = np.diag([0.3, 0.1, -0.1, -0.3])
    B = np.diag([0.2, 0.05, -0.05, -0.2])
    A, B = project_batch(A, B)
    r = check_constraints(MatrixPair(A, B))
    assert r.in_Y and r.in_X


def test_project_examples():
    p = project_to_manifold(MatrixPair(np.diag([2, -2, 0, 0]), Z4))
    assert np.allclose(p.A, np.diag([C, -C, 0, 0]), atol=1e-15)
    with pytest.raises(ValueError):
        project_to_manifold(MatrixPair(np.eye(4), np.eye(4)))
    q = diag_pair()
    assert np.allclose(project_to_manifold(q).A, q.A, atol=1e-12)


@given(seeds)
def test_project_feasible_and_idempotent(seed):
    rng = np.random.default_rng(seed)
    p = project_to_manifold(MatrixPair(cnormal(rng, (4, 4)) * 10, cnormal(rng, (4, 4))))
    assert abs(p.norm_sq_sum - 0.25) <= 1e-15
    assert check_constraints(p, tol=1e-12).in_X
    q = project_to_manifold(p)
    assert np.allclose(q.A, p.A, atol=1e-12) and np.allclose(q.B, p.B, atol=1e-12)


def test_phi_examples():
    s = phi(diag_pair())
    assert abs(s.sigma1 - C) <= 1e-14 and abs(s.sigma2 - C) <= 1e-14
    assert abs(s.phi - 0.25) <= 1e-14
    assert phi(MatrixPair(Z4, Z4)).phi == 0
    A, B = witness()
    s = phi(MatrixPair(A, B))
    assert abs(s.phi - BOUND) <= 1e-9 and abs(s.margin) <= 1e-9


def test_phi_matches_lapack_oracle(rng):
    As, Bs = sample_uniform_batch(rng, 50)
    X = np.stack([np.kron(a, np.eye(4)) + np.kron(np.eye(4), b) for a, b in zip(As, Bs)])
    s = np.linalg.svd(X, compute_uv=False)
    assert np.allclose(phi_batch(As, Bs), s[:, 0] ** 2 + s[:, 1] ** 2, atol=1e-13)


@given(seeds)
def test_spectral_summary_invariants(seed):
    s = phi(sample_uniform_pair(make_rng(seed)))
    assert s.sigma1 >= s.sigma2 >= 0
    assert s.phi == s.sigma1 ** 2 + s.sigma2 ** 2
    assert s.margin == BOUND - s.phi


@given(seeds, st.floats(-5, 5).filter(lambda t: abs(t) > 1e-3))
def test_phi_scale_covariance(seed, t):
    p = sample_uniform_pair(make_rng(seed))
    q = MatrixPair(t * p.A, t * p.B)
    assert abs(phi(q).phi - t * t * phi(p).phi) <= 1e-10 * max(1, t * t)


@given(seeds)
def test_phi_unitary_invariance(seed):
    rng = make_rng(seed)
    p = sample_uniform_pair(rng)
    U, V = haar_unitary(4, rng), haar_unitary(4, rng)
    q = MatrixPair(U @ p.A @ U.conj().T, V @ p.B @ V.conj().T)
    assert abs(phi(q).phi - phi(p).phi) <= 1e-9


def test_kron_sum_norm_is_one_on_feasible_set(rng):
    As, Bs = sample_uniform_batch(rng, 100)
    for a, b in zip(As, Bs):
        X = MatrixPair(a, b).kron_sum()
        assert abs(np.sum(np.abs(X) ** 2) - 1) <= 1e-10


def test_phi_continuity(rng):
    ratios = []
    for _ in range(1000):
        p = sample_uniform_pair(rng)
        d = cnormal(rng, (2, 4, 4))
        d *= rng.uniform(1e-6, 1e-3) / np.sqrt(np.sum(np.abs(d) ** 2))
        q = MatrixPair(p.A + d[0], p.B + d[1])
        ratios.append(abs(phi(q).phi - phi(p).phi) / pair_distance(p, q))
    assert max(ratios) <= 4


def test_pair_norm_and_distance():
    p = diag_pair()
    assert abs(pair_norm(p) - 0.5) <= 1e-15
    assert pair_distance(p, p) == 0
    A = np.diag([1.0, -1, 0, 0])
    B = np.diag([0, 0, 2.0, -2])
    assert abs(pair_distance(MatrixPair(A, Z4), MatrixPair(Z4, B)) - np.sqrt(2 + 8)) <= 1e-14


def test_variational_examples():
    assert variational_phi(MatrixPair(Z4, Z4)) == 0
    assert abs(variational_phi(diag_pair()) - 0.25) <= 1e-12
    A, B = witness()
    assert abs(variational_phi(MatrixPair(A, B)) - 0.5) <= 1e-9


def test_variational_agrees_with_phi_and_vectors_orthonormal():
    rng = make_rng(5, "variational")
    for _ in range(100):
        p = sample_uniform_pair(rng)
        val, (V1, V2) = variational_phi(p, return_vectors=True)
        assert abs(val - phi(p).phi) <= 1e-8
        assert abs(np.trace(V1.conj().T @ V2)) <= 1e-10
        assert abs(np.sum(np.abs(V1) ** 2) - 1) <= 1e-10
        assert abs(np.sum(np.abs(V2) ** 2) - 1) <= 1e-10


def test_variational_needs_column_major_unvec():
    # the row-major reshape gives a different value on generic pairs
    p = sample_uniform_pair(make_rng(1))
    _, (V1, V2) = variational_phi(p, return_vectors=True)
    wrong = sum(np.sum(np.abs(p.B @ V.T + V.T @ p.A.T) ** 2) for V in (V1, V2))
    assert abs(wrong - phi(p).phi) > 1e-6


def test_feasibility_residuals(rng):
    As, Bs = sample_uniform_batch(rng, 10)
    tA, tB, nr = feasibility_residuals(As, Bs)
    assert tA.max() <= 1e-14 and tB.max() <= 1e-14 and nr.max() <= 1e-15
