import numpy as np
import pytest
from hypothesis import given, strategies as st

from kronvex.conjecture import BOUND, MatrixPair, check_constraints, phi, phi_batch
from kronvex.families import (
    FAMILIES,
    BlockDiagParams,
    build_block_pair,
    equalize_diagonal_2x2,
    family_minus_A,
    family_minus_AT,
    get_family,
    kron_sum_of_blocks,
    params_from_array,
    permutation_P,
    sample_case,
    sample_case_batch,
    sample_family_batch,
    sample_normal_A_pair,
    y_block_norms_sq,
    y_blocks,
    y_blocks_batch,
)
from kronvex.linalg import haar_unitary
from kronvex.rng import make_rng
from conftest import cnormal

seeds = st.integers(0, 2 ** 32 - 1)
kinds = st.sampled_from(["I", "II", "III", "III_general"])


def random_params(rng):
    return params_from_array(cnormal(rng, 10))


# equalize_diagonal_2x2 -----------------------------------------------------------

def test_equalize_examples():
    M = np.array([[1.0, 2], [3, 1]])
    U, M2 = equalize_diagonal_2x2(M)
    assert np.array_equal(U, np.eye(2)) and np.array_equal(M2, M)
    U, M2 = equalize_diagonal_2x2(np.diag([1.0, -1.0]))
    assert np.allclose(np.diag(M2), 0, atol=1e-12)


@given(seeds)
def test_equalize_properties(seed):
    rng = np.random.default_rng(seed)
    M = cnormal(rng, (2, 2))
    U, M2 = equalize_diagonal_2x2(M)
    assert np.allclose(U.conj().T @ U, np.eye(2), atol=1e-12)
    assert abs(M2[0, 0] - M2[1, 1]) <= 1e-10
    assert np.allclose(np.sort_complex(np.linalg.eigvals(M2)), np.sort_complex(np.linalg.eigvals(M)), atol=1e-9)
    T = M - np.trace(M) / 2 * np.eye(2)
    _, T2 = equalize_diagonal_2x2(T)
    assert np.allclose(np.diag(T2), 0, atol=1e-10)


# block pairs and Y-blocks ---------------------------------------------------------

def test_build_block_pair_examples():
    p = build_block_pair(BlockDiagParams())
    assert not p.A.any() and not p.B.any()
    w = build_block_pair(BlockDiagParams(a12=0.25, a21=0.25, b12=0.25, b21=0.25))
    assert abs(phi(w).phi - 0.5) <= 1e-9
    a = 1 / np.sqrt(32)
    q = build_block_pair(BlockDiagParams(a=a, b=a))
    assert check_constraints(q).in_X
    assert abs(phi(q).phi - 0.25) <= 1e-12


@given(seeds)
def test_block_pair_traceless(seed):
    p = build_block_pair(random_params(np.random.default_rng(seed)))
    assert p.trace_A == 0 and p.trace_B == 0


def test_permutation_P():
    P = permutation_P()
    assert np.array_equal(P @ P.T, np.eye(16))
    assert np.array_equal(P @ np.eye(16) @ P.T, np.eye(16))


@given(seeds)
def test_y_blocks_match_permuted_kron_sum(seed):
    params = random_params(np.random.default_rng(seed))
    X = build_block_pair(params).kron_sum()
    Z = permutation_P() @ X @ permutation_P().T
    Y = y_blocks(params).as_tuple()
    off = Z.copy()
    for i in range(4):
        assert np.allclose(Z[4 * i:4 * i + 4, 4 * i:4 * i + 4], Y[i], atol=1e-12)
        off[4 * i:4 * i + 4, 4 * i:4 * i + 4] = 0
    assert np.abs(off).max() <= 1e-13
    for Yi, Ki in zip(Y, kron_sum_of_blocks(params).as_tuple()):
        assert np.allclose(Yi, Ki, atol=1e-12)


@given(seeds)
def test_y_block_norm_identities(seed):
    params = random_params(np.random.default_rng(seed))
    for Yi, ref in zip(y_blocks(params).as_tuple(), y_block_norms_sq(params)):
        assert abs(np.sum(np.abs(Yi) ** 2) - ref) <= 1e-12 * max(1, ref)


def test_zero_params_zero_blocks():
    assert all(not Y.any() for Y in y_blocks(BlockDiagParams()).as_tuple())


@given(seeds)
def test_spectrum_split(seed):
    params = random_params(np.random.default_rng(seed)).normalized()
    s_full = np.linalg.svd(build_block_pair(params).kron_sum(), compute_uv=False)
    s_blocks = np.sort(np.concatenate([np.linalg.svd(Y, compute_uv=False)
                                       for Y in y_blocks(params).as_tuple()]))[::-1]
    assert np.allclose(s_full, s_blocks, atol=1e-10)


def test_y_blocks_batch_matches_single(rng):
    P = sample_case_batch("II", rng, 5)
    Yb = y_blocks_batch(P)
    for i in range(5):
        Y = y_blocks(params_from_array(P[i])).as_tuple()
        for k in range(4):
            assert np.array_equal(Yb[i, k], Y[k])


# samplers ----------------------------------------------------------------------

@given(seeds, kinds)
def test_sample_case_structure(seed, kind):
    p = sample_case(kind, make_rng(seed))
    assert p.feasible
    if kind == "I":
        assert p.a34 == p.a43 == p.b34 == p.b43 == 0
    if kind == "II":
        assert p.a34 == p.a43 == 0
    if kind == "III":
        assert p.a == p.b and p.a.imag == 0
        assert all(x.imag == 0 and x.real >= 0 for x in p.offdiag)
    assert phi(build_block_pair(p)).phi <= BOUND + 1e-9


def test_case_i_budget_identity(rng):
    P = sample_case_batch("I", rng, 500)
    for row in P:
        p = params_from_array(row)
        y11 = np.sum(np.abs(y_blocks(p).Y11) ** 2)
        assert abs(y11 - (0.5 - 4 * abs(p.a - p.b) ** 2)) <= 1e-10


def test_sample_case_rejects_unknown_kind(rng):
    with pytest.raises(ValueError):
        sample_case("IV", rng)


def test_minus_family_examples():
    A = np.diag([0.1, 0.2, -0.05, -0.25]).astype(complex)
    for fam in (family_minus_A, family_minus_AT):
        p = fam(A, np.eye(4))
        assert np.allclose(p.B, -p.A, atol=1e-15)
    rng = np.random.default_rng(3)
    H = cnormal(rng, (4, 4))
    H = H + H.conj().T
    H -= np.trace(H) / 4 * np.eye(4)
    p = family_minus_AT(H, np.eye(4))
    assert np.allclose(p.B, -p.A.conj(), atol=1e-15)
    assert abs(p.norm_sq_A - p.norm_sq_B) <= 1e-15
    with pytest.raises(ValueError):
        family_minus_A(H, 2 * np.eye(4))


@given(seeds)
def test_minus_families_feasible_and_bounded(seed):
    rng = make_rng(seed)
    A = cnormal(rng, (4, 4))
    A -= np.trace(A) / 4 * np.eye(4)
    U = haar_unitary(4, rng)
    for fam in (family_minus_A, family_minus_AT):
        p = fam(A, U)
        assert abs(p.trace_B) <= 1e-12
        assert check_constraints(p).in_X
        assert phi(p).phi <= BOUND + 1e-9


@given(seeds)
def test_normal_sampler(seed):
    p = sample_normal_A_pair(make_rng(seed))
    A = p.A
    assert np.sqrt(np.sum(np.abs(A @ A.conj().T - A.conj().T @ A) ** 2)) <= 1e-10
    assert check_constraints(p).in_X
    assert phi(p).phi <= BOUND + 1e-9


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_family_batches_feasible_and_bounded(name):
    As, Bs = sample_family_batch(name, make_rng(0, name), 2000)
    for a, b in zip(As[:20], Bs[:20]):
        assert check_constraints(MatrixPair(a, b)).in_X
    assert phi_batch(As, Bs).max() <= BOUND + 1e-9


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_family_projector_keeps_shape(name):
    rng = make_rng(4, name)
    start, project = get_family(name).make_projector(rng)
    assert check_constraints(start).in_X
    A, B = project(start.A, start.B)
    assert np.allclose(A, start.A, atol=1e-12) and np.allclose(B, start.B, atol=1e-12)
    assert get_family(name).sample(rng).A.shape == (4, 4)


def test_unknown_family():
    with pytest.raises(ValueError):
        get_family("nope")
