"""Seeded randomized certification suites, one per proven statement.

Every suite draws its inputs in fixed-size shards; shard ``s`` uses the stream
``make_rng(seed, suite_id, s)``, so results do not depend on how many worker
threads evaluate the shards, and any sample can be replayed from
``(suite_id, seed, index)`` alone.

Each sample yields a signed margin (negative = the checked inequality failed)
and optional named sub-checks.  Sub-checks carry their own tolerances; the
sample margin is the minimum of all sub-check slacks rescaled to the suite
tolerance, so ``margin < -tolerance`` exactly when some sub-check fails.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from kronvex.conjecture import BOUND, DIM, MatrixPair, project_batch
from kronvex.families import (
    block_pairs_batch,
    normal_family_batch,
    sample_case_batch,
    sample_uniform_batch,
    y_blocks_batch,
)
from kronvex.linalg import (
    haar_unitaries,
    hermitian_eigenvalues,
    kron_sum_batch,
    singular_values,
    top_singular_triplets,
)
from kronvex.perturbation import PerturbationError, densify_pair
from kronvex.rng import complex_normal, make_rng

SHARD_SIZE = 500

TOL_ALGEBRAIC = 1e-12
TOL_EIGEN = 1e-10
TOL_PHI = 1e-9


@dataclass(frozen=True)
class Violation:
    index: int
    seed: int
    digest: str
    margin: float


@dataclass
class SuiteResult:
    suite_id: str
    samples: int
    worst_margin: float
    tolerance: float
    violations: list = field(default_factory=list)
    elapsed: float = 0.0
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        """Reproducible content only; ``elapsed`` is reported with the timestamps."""
        return {
            "suite_id": self.suite_id,
            "samples": self.samples,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "violations": [v.__dict__ for v in self.violations],
            "checks": self.checks,
        }


@dataclass(frozen=True)
class Suite:
    suite_id: str
    tolerance: float
    draw: Callable[[np.random.Generator, int], dict]
    evaluate: Callable[[dict], dict]   # name -> (slack array, tolerance)
    description: str = ""


def _norms(M):
    return np.sqrt(np.sum(np.abs(M) ** 2, axis=(-2, -1)))


def lambda_max_2x2(h11, h22, h12):
    """Largest eigenvalue of the Hermitian matrix ``[[h11, h12], [conj(h12), h22]]``."""
    h11 = np.asarray(h11, dtype=float)
    h22 = np.asarray(h22, dtype=float)
    return 0.5 * (h11 + h22) + np.sqrt((0.5 * (h11 - h22)) ** 2 + np.abs(h12) ** 2)


def _top_sv(Ms, k=1):
    shape = Ms.shape[:-2]
    sig = singular_values(Ms.reshape((-1,) + Ms.shape[-2:]))
    return sig[:, :k].reshape(shape + (k,))


# -- vec / Kronecker-sum identity ------------------------------------------

def _draw_vec(rng, n):
    scale = 10.0 ** rng.uniform(-3, 3, size=(n, 1, 1))
    return {"A": complex_normal(rng, (n, DIM, DIM)) * scale,
            "B": complex_normal(rng, (n, DIM, DIM)) * scale,
            "D": complex_normal(rng, (n, DIM, DIM))}


def _eval_vec(inp):
    A, B, D = inp["A"], inp["B"], inp["D"]
    X = kron_sum_batch(A, B)
    vecD = np.swapaxes(D, 1, 2).reshape(len(D), -1)
    lhs = np.einsum("nij,nj->ni", X, vecD)
    C = B @ D + D @ np.swapaxes(A, 1, 2)
    rhs = np.swapaxes(C, 1, 2).reshape(len(C), -1)
    scale = np.maximum(1.0, (_norms(A) + _norms(B)) * _norms(D))
    res = np.linalg.norm(lhs - rhs, axis=1) / scale
    return {"relative_residual": (-res, TOL_ALGEBRAIC)}


# -- commutator bounds ------------------------------------------------------

def _draw_commutator(rng, n):
    dims = rng.integers(2, 5, size=n)
    mask = (np.arange(DIM)[None, :] < dims[:, None])
    mask = mask[:, :, None] & mask[:, None, :]
    Y = complex_normal(rng, (n, DIM, DIM)) * mask
    Z = complex_normal(rng, (n, DIM, DIM)) * mask
    return {"dim": dims, "Y": Y / _norms(Y)[:, None, None], "Z": Z / _norms(Z)[:, None, None]}


def commutator_slacks(Y, Z):
    """``sqrt2 |Y| |Z| - |YZ - ZY|`` and ``sqrt2 |Y| |Z| - |YZ - Z Y^T|``."""
    bound = np.sqrt(2.0) * _norms(Y) * _norms(Z)
    c1 = _norms(Y @ Z - Z @ Y)
    c2 = _norms(Y @ Z - Z @ np.swapaxes(Y, -1, -2))
    return bound - c1, bound - c2


def _eval_commutator(inp):
    s1, s2 = commutator_slacks(inp["Y"], inp["Z"])
    return {"commutator": (s1, TOL_ALGEBRAIC), "transpose_commutator": (s2, TOL_ALGEBRAIC)}


# -- PSD block bound ---------------------------------------------------------

def _draw_psd(rng, n):
    rank = rng.integers(1, 5, size=n)
    M = complex_normal(rng, (n, DIM, DIM)) * (np.arange(DIM)[None, :, None] < rank[:, None, None])
    M /= _norms(M)[:, None, None]
    return {"rank": rank, "M": M}


def psd_block_slack(Z):
    top = hermitian_eigenvalues(Z)[:, 0]
    l1 = lambda_max_2x2(Z[:, 0, 0].real, Z[:, 1, 1].real, Z[:, 0, 1])
    l2 = lambda_max_2x2(Z[:, 2, 2].real, Z[:, 3, 3].real, Z[:, 2, 3])
    return l1 + l2 - top


def _eval_psd(inp):
    M = inp["M"]
    Z = np.swapaxes(M, 1, 2).conj() @ M
    return {"block_lambda_sum": (psd_block_slack(Z), TOL_EIGEN)}


# -- second-case inequality chain ------------------------------------------

def appendix_chain(P):
    """The six expressions of the second-case inequality chain, per row.

    Returns a dict with ``lambda_pair`` (lambda_max(Z11) + lambda_max(Z22)),
    ``block_sum`` (closed-form sum of the four 2x2 block maxima),
    ``block_sum_numeric`` (the same from an eigensolver),
    ``sqrt_majorant``, ``factored_majorant``, ``amgm_majorant`` and ``final``.
    """
    a, b, a12, a21, _, _, b12, b21, b34, b43 = P.T
    Y = y_blocks_batch(P)
    Z11 = Y[:, 0] @ np.swapaxes(Y[:, 0], 1, 2).conj()
    Z22 = Y[:, 1] @ np.swapaxes(Y[:, 1], 1, 2).conj()
    lam_pair = hermitian_eigenvalues(Z11)[:, 0] + hermitian_eigenvalues(Z22)[:, 0]
    blocks = np.stack([Z11[:, :2, :2], Z11[:, 2:, 2:], Z22[:, :2, :2], Z22[:, 2:, 2:]], axis=1)
    numeric = hermitian_eigenvalues(blocks.reshape(-1, 2, 2))[:, 0].reshape(-1, 4).sum(axis=1)

    def terms(x, w, y12, y21):
        X, W, P12, P21 = np.abs(x), np.abs(w), np.abs(y12), np.abs(y21)
        base = 2 * X ** 2 + 2 * W ** 2 + P12 ** 2 + P21 ** 2
        exact = np.sqrt((P12 ** 2 - P21 ** 2) ** 2
                        + 4 * np.abs(y21 * np.conj(w) + np.conj(y12) * w) ** 2)
        sq = np.sqrt((P12 - P21) ** 2 * (P12 + P21) ** 2 + 4 * (P21 + P12) ** 2 * W ** 2)
        fac = (P21 + P12) * np.sqrt((P12 - P21) ** 2 + 4 * W ** 2)
        am = 0.5 * (P21 + P12) ** 2 + 0.5 * (P12 - P21) ** 2 + 2 * W ** 2
        return [0.5 * (base + r) for r in (exact, sq, fac, am)]

    parts = [terms(a12, a + b, b12, b21), terms(a21, a + b, b12, b21),
             terms(a12, a - b, b34, b43), terms(a21, a - b, b34, b43)]
    block_sum, sq, fac, am = (sum(p[k] for p in parts) for k in range(4))
    final = (8 * np.abs(a) ** 2 + 8 * np.abs(b) ** 2
             + 2 * sum(np.abs(x) ** 2 for x in (a12, a21, b12, b21, b34, b43)))
    return {"lambda_pair": lam_pair, "block_sum": block_sum, "block_sum_numeric": numeric,
            "sqrt_majorant": sq, "factored_majorant": fac, "amgm_majorant": am, "final": final}


def _draw_chain(rng, n):
    return {"params": sample_case_batch("II", rng, n)}


def _eval_chain(inp):
    e = appendix_chain(inp["params"])
    t = TOL_EIGEN
    return {
        "psd_block_step": (e["block_sum"] - e["lambda_pair"], t),
        "closed_form_blocks": (-np.abs(e["block_sum"] - e["block_sum_numeric"]), t),
        "modulus_step": (e["sqrt_majorant"] - e["block_sum"], t),
        "factoring_step": (-np.abs(e["factored_majorant"] - e["sqrt_majorant"]), t),
        "amgm_step": (e["amgm_majorant"] - e["factored_majorant"], t),
        "collapse_step": (-np.abs(e["final"] - e["amgm_majorant"]), t),
        "final_is_half": (-np.abs(e["final"] - BOUND), t),
    }


# -- block-diagonal case bounds ---------------------------------------------

def phi_from_stack(As, Bs):
    sig = singular_values(kron_sum_batch(As, Bs))
    return sig[:, 0] ** 2 + sig[:, 1] ** 2


def case_checks(P, kind):
    """Sub-checks for block parameters ``P`` sampled for case ``kind``."""
    As, Bs = block_pairs_batch(P)
    out = {"phi_bound": (BOUND - phi_from_stack(As, Bs), TOL_PHI)}
    Y = y_blocks_batch(P)
    s1 = _top_sv(Y, 2)  # (n, 4, 2)
    # the three block placements of the two leading singular values
    out["one_block"] = (BOUND - (s1[:, 0, 0] ** 2 + s1[:, 0, 1] ** 2), TOL_PHI)
    out["blocks_11_22"] = (BOUND - (s1[:, 0, 0] ** 2 + s1[:, 1, 0] ** 2), TOL_PHI)
    out["blocks_11_44"] = (BOUND - (s1[:, 0, 0] ** 2 + s1[:, 3, 0] ** 2), TOL_PHI)
    a, b = P[:, 0], P[:, 1]
    if kind == "I":
        y11_sq = np.sum(np.abs(Y[:, 0]) ** 2, axis=(1, 2))
        out["budget_identity"] = (-np.abs(y11_sq - (BOUND - 4 * np.abs(a - b) ** 2)), TOL_EIGEN)
        out["frobenius_dominance"] = (y11_sq - (s1[:, 0, 0] ** 2 + s1[:, 0, 1] ** 2), TOL_EIGEN)
    if kind in ("III", "III_general"):
        absY = np.abs(Y[:, [0, 3]])
        out["entrywise_abs"] = ((_top_sv(absY, 1)[..., 0] - s1[:, [0, 3], 0]).min(axis=1), TOL_EIGEN)
    if kind == "III":
        c = third_case_chain(P)
        out["offdiag_closed_form"] = (-np.abs(c["offdiag_sq"] - c["offdiag_sq_numeric"]), TOL_EIGEN)
        out["offdiag_amgm"] = (c["offdiag_bound"] - c["offdiag_sq"], TOL_EIGEN)
        out["triangle_step"] = (c["triangle"] - c["pair_11_44"], TOL_EIGEN)
        out["square_step"] = (c["doubled"] - c["triangle"], TOL_EIGEN)
        out["doubled_is_half"] = (-np.abs(c["doubled"] - BOUND), TOL_EIGEN)
    return out


def third_case_chain(P):
    """Expressions of the third-case argument for real nonnegative, ``a = b`` rows."""
    a = P[:, 0].real
    a12, a21, a34, a43, b12, b21, b34, b43 = (P[:, k].real for k in range(2, 10))
    Y = y_blocks_batch(P)
    pair = _top_sv(Y[:, [0, 3]], 1)[..., 0]
    Y2 = Y.copy()
    for i in range(4):
        Y2[:, :, i, i] = 0
    s_off = _top_sv(Y2[:, [0, 3]], 1)[..., 0]

    def closed(x12, x21, y12, y21):
        s = x12 ** 2 + x21 ** 2 + y12 ** 2 + y21 ** 2
        r = np.sqrt(((x12 + x21) ** 2 + (y12 - y21) ** 2) * ((x12 - x21) ** 2 + (y12 + y21) ** 2))
        return 0.5 * (s + r), s

    c11, b11 = closed(a12, a21, b12, b21)
    c44, b44 = closed(a34, a43, b34, b43)
    diag = np.abs(2 * a)
    return {
        "pair_11_44": pair[:, 0] ** 2 + pair[:, 1] ** 2,
        "offdiag_sq": np.stack([c11, c44], axis=1),
        "offdiag_sq_numeric": s_off ** 2,
        "offdiag_bound": np.stack([b11, b44], axis=1),
        "triangle": (diag + s_off[:, 0]) ** 2 + (diag + s_off[:, 1]) ** 2,
        "doubled": 2 * (2 * diag ** 2 + b11 + b44),
    }


def _case_suite(kind):
    def draw(rng, n):
        return {"params": sample_case_batch(kind, rng, n)}

    def evaluate(inp):
        out = case_checks(inp["params"], kind)
        return {k: (v.min(axis=1) if v.ndim > 1 else v, t) for k, (v, t) in out.items()}
    return draw, evaluate


# -- unitarily-related and normal families ----------------------------------

def _draw_minus(rng, n):
    A = complex_normal(rng, (n, DIM, DIM))
    A -= (np.trace(A, axis1=1, axis2=2) / DIM)[:, None, None] * np.eye(DIM)
    return {"A": A, "U": haar_unitaries(DIM, n, rng)}


def _eval_minus(inp):
    A, U = inp["A"], inp["U"]
    Uh = np.swapaxes(U, 1, 2).conj()
    out = {}
    for name, inner in (("minus_transpose", np.swapaxes(A, 1, 2)), ("minus_plain", A)):
        As, Bs = project_batch(A, -U @ inner @ Uh)
        out[name] = (BOUND - phi_from_stack(As, Bs), TOL_PHI)
    return out


def _draw_normal(rng, n):
    As, Bs = normal_family_batch(rng, n)
    return {"A": As, "B": Bs}


def _eval_phi_pairs(inp):
    return {"phi_bound": (BOUND - phi_from_stack(inp["A"], inp["B"]), TOL_PHI)}


def _draw_uniform(rng, n):
    As, Bs = sample_uniform_batch(rng, n)
    return {"A": As, "B": Bs}


# -- variational form --------------------------------------------------------

def _eval_variational(inp):
    A, B = inp["A"], inp["B"]
    sig, _, V = top_singular_triplets(kron_sum_batch(A, B), k=2)
    direct = sig[:, 0] ** 2 + sig[:, 1] ** 2
    total = np.zeros(len(A))
    for j in range(2):
        Vj = np.swapaxes(V[:, :, j].reshape(-1, DIM, DIM), 1, 2)  # column-major unvec
        R = B @ Vj + Vj @ np.swapaxes(A, 1, 2)
        total += np.sum(np.abs(R) ** 2, axis=(1, 2))
    gram = np.einsum("nij,nik->njk", V.conj(), V)
    ortho = np.abs(gram - np.eye(2)).max(axis=(1, 2))
    return {"variational_equals_direct": (-np.abs(total - direct), 1e-8),
            "orthonormal_V": (-ortho, 1e-10)}


# -- density -----------------------------------------------------------------

REPEATED_PATTERNS = ("two_equal", "three_equal", "two_pairs", "defective_two",
                     "nilpotent_rank1", "nilpotent_square_zero")
ALL_PATTERNS = ("distinct",) + REPEATED_PATTERNS
DENSITY_RADII = (1e-3, 1e-6)


def engineered_matrix(pattern: str, rng: np.random.Generator) -> np.ndarray:
    """A traceless 4x4 matrix whose spectrum has the named coincidence pattern."""
    lam, mu = complex_normal(rng, 2)
    W = haar_unitaries(DIM, 1, rng)[0]
    if pattern == "distinct":
        return complex_normal(rng, (DIM, DIM))
    if pattern in ("nilpotent_rank1", "nilpotent_square_zero", "defective_two"):
        T = np.zeros((DIM, DIM), dtype=np.complex128)
        if pattern == "nilpotent_rank1":
            T[0, 3] = complex_normal(rng, 1)[0]
        elif pattern == "nilpotent_square_zero":
            T[:2, 2:] = complex_normal(rng, (2, 2))
        else:
            T = np.triu(complex_normal(rng, (DIM, DIM)), 1)
            T[np.diag_indices(DIM)] = (lam, lam, mu, -2 * lam - mu)
        return W @ T @ W.conj().T
    spectra = {
        "two_equal": (lam, lam, mu, -2 * lam - mu),
        "three_equal": (lam, lam, lam, -3 * lam),
        "two_pairs": (lam, lam, -lam, -lam),
    }
    d = np.array(spectra[pattern])
    # half the draws are non-normal but diagonalizable (moderate condition number)
    S = W if rng.random() < 0.5 else W @ (np.eye(DIM) + 0.3 * complex_normal(rng, (DIM, DIM)))
    return (S * d) @ np.linalg.inv(S)


def engineered_pair(rng: np.random.Generator):
    pa = REPEATED_PATTERNS[rng.integers(len(REPEATED_PATTERNS))]
    pb = ALL_PATTERNS[rng.integers(len(ALL_PATTERNS))]
    A = engineered_matrix(pa, rng)
    B = engineered_matrix(pb, rng)
    if rng.random() < 0.5:
        A, B, pa, pb = B, A, pb, pa
    As, Bs = project_batch(A, B)
    return As, Bs, pa, pb


def _draw_density(rng, n):
    As = np.empty((n, DIM, DIM), dtype=np.complex128)
    Bs = np.empty_like(As)
    pats = np.empty((n, 2), dtype=np.int64)
    for i in range(n):
        As[i], Bs[i], pa, pb = engineered_pair(rng)
        pats[i] = ALL_PATTERNS.index(pa), ALL_PATTERNS.index(pb)
    return {"A": As, "B": Bs, "patterns": pats, "stream": rng.integers(0, 2 ** 31, size=n)}


def _eval_density(inp):
    n = len(inp["A"])
    slack = {r: np.empty(n) for r in DENSITY_RADII}
    for i in range(n):
        p = MatrixPair(inp["A"][i], inp["B"][i])
        for r in DENSITY_RADII:
            rng = make_rng(int(inp["stream"][i]), "densify", int(round(-np.log10(r))))
            try:
                q, certs = densify_pair(p, r, rng)
            except PerturbationError:
                slack[r][i] = -np.inf
                continue
            dist = float(np.sqrt(np.sum(np.abs(q.A - p.A) ** 2) + np.sum(np.abs(q.B - p.B) ** 2)))
            ok = all(c.valid for c in certs)
            slack[r][i] = (r - dist) if ok else -np.inf
    return {f"radius_{r:g}": (slack[r], 0.0) for r in DENSITY_RADII}


SUITES = {
    s.suite_id: s for s in (
        Suite("vec_identity", TOL_ALGEBRAIC, _draw_vec, _eval_vec,
              "Kronecker sum acting on vec(D) equals vec(B D + D A^T)"),
        Suite("commutator_bounds", TOL_ALGEBRAIC, _draw_commutator, _eval_commutator,
              "|YZ - ZY|_F and |YZ - Z Y^T|_F are at most sqrt2 |Y|_F |Z|_F"),
        Suite("psd_block_bound", TOL_EIGEN, _draw_psd, _eval_psd,
              "lambda_max of a PSD matrix is at most the sum over its two diagonal blocks"),
        Suite("appendix_chain", TOL_EIGEN, _draw_chain, _eval_chain,
              "every step of the second-case inequality chain"),
        Suite("case_i", TOL_PHI, *_case_suite("I"), "first block case"),
        Suite("case_ii", TOL_PHI, *_case_suite("II"), "second block case"),
        Suite("case_iii", TOL_PHI, *_case_suite("III"), "third block case, real a = b reduction"),
        Suite("case_iii_general", TOL_PHI, *_case_suite("III_general"),
              "unrestricted block-diagonal pairs"),
        Suite("minus_families", TOL_PHI, _draw_minus, _eval_minus,
              "B = -U A^T U^* and B = -U A U^*"),
        Suite("normal", TOL_PHI, _draw_normal, _eval_phi_pairs, "A normal"),
        Suite("variational", TOL_PHI, _draw_uniform, _eval_variational,
              "variational form agrees with the direct singular values"),
        Suite("density", 0.0, _draw_density, _eval_density,
              "repeated-eigenvalue pairs are pushed into the distinct-eigenvalue set"),
        Suite("uniform", TOL_PHI, _draw_uniform, _eval_phi_pairs,
              "conjecture sampling on the whole constraint set"),
    )
}


def get_suite(suite_id: str) -> Suite:
    try:
        return SUITES[suite_id]
    except KeyError:
        raise ValueError(f"unknown suite {suite_id!r}; expected one of {sorted(SUITES)}") from None


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("KRONVEX_THREADS")
    return max(1, int(env)) if env else 1


def _shards(n_samples):
    return [(s, min(SHARD_SIZE, n_samples - s * SHARD_SIZE))
            for s in range((n_samples + SHARD_SIZE - 1) // SHARD_SIZE)]


def draw_shard(suite: Suite, seed: int, shard: int, count: int = SHARD_SIZE) -> dict:
    """Inputs of one shard.  A full shard is always drawn and then truncated, so
    sample ``index`` is the same whatever the total sample count."""
    inputs = suite.draw(make_rng(seed, suite.suite_id, shard), SHARD_SIZE)
    return {k: v[:count] for k, v in inputs.items()}


def sample_digest(inputs: dict, j: int) -> str:
    h = hashlib.sha256()
    for key in sorted(inputs):
        h.update(key.encode())
        h.update(np.ascontiguousarray(inputs[key][j]).tobytes())
    return h.hexdigest()[:16]


def _combine(checks, tol):
    """Per-sample margin: sub-check slacks rescaled so each fails exactly below ``-tol``."""
    margin = None
    for slack, t in checks.values():
        if t != tol and t > 0 and tol > 0:
            slack = slack * (tol / t)
        elif t != tol:
            raise ValueError("a zero tolerance must be shared by every sub-check")
        margin = slack if margin is None else np.minimum(margin, slack)
    return margin


def run_suite(suite_id: str, n_samples: int, seed: int = 0, workers: int | None = None) -> SuiteResult:
    suite = get_suite(suite_id)
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    t0 = time.perf_counter()

    def work(shard):
        s, count = shard
        inputs = draw_shard(suite, seed, s, count)
        checks = suite.evaluate(inputs)
        margin = _combine(checks, suite.tolerance)
        bad = np.flatnonzero(margin < -suite.tolerance)
        viol = [Violation(s * SHARD_SIZE + int(j), seed, sample_digest(inputs, j), float(margin[j]))
                for j in bad]
        mins = {k: float(v.min()) for k, (v, _) in checks.items()}
        return float(margin.min()), viol, mins

    shards = _shards(n_samples)
    nw = _worker_count(workers)
    if nw > 1 and len(shards) > 1:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(work, shards))
    else:
        results = [work(s) for s in shards]

    worst = min((r[0] for r in results), default=np.inf)
    violations = [v for r in results for v in r[1]]
    checks = {}
    for _, _, mins in results:
        for k, v in mins.items():
            checks[k] = min(checks.get(k, np.inf), v)
    return SuiteResult(suite_id, n_samples, float(worst), suite.tolerance, violations,
                       time.perf_counter() - t0, checks)


def replay(suite_id: str, seed: int, index: int) -> dict:
    """Reconstruct the inputs of sample ``index`` of a suite run."""
    suite = get_suite(suite_id)
    s, j = divmod(index, SHARD_SIZE)
    inputs = draw_shard(suite, seed, s)
    return {k: np.asarray(v)[j] for k, v in inputs.items()}


# thin named entry points -----------------------------------------------------

def suite_vec_identity(n_samples, seed=0, workers=None):
    return run_suite("vec_identity", n_samples, seed, workers)


def suite_commutator_bounds(n_samples, seed=0, workers=None):
    return run_suite("commutator_bounds", n_samples, seed, workers)


def suite_psd_block_bound(n_samples, seed=0, workers=None):
    return run_suite("psd_block_bound", n_samples, seed, workers)


def suite_appendix_chain(n_samples, seed=0, workers=None):
    return run_suite("appendix_chain", n_samples, seed, workers)


def suite_case_bounds(kind, n_samples, seed=0, workers=None):
    ids = {"I": "case_i", "II": "case_ii", "III": "case_iii", "III_general": "case_iii_general"}
    if kind not in ids:
        raise ValueError(f"unknown case kind {kind!r}")
    return run_suite(ids[kind], n_samples, seed, workers)


def suite_minus_families(n_samples, seed=0, workers=None):
    return run_suite("minus_families", n_samples, seed, workers)


def suite_normal(n_samples, seed=0, workers=None):
    return run_suite("normal", n_samples, seed, workers)


def suite_density(n_samples, seed=0, workers=None):
    return run_suite("density", n_samples, seed, workers)
