"""Multi-start projected ascent of phi over the constraint set.

Each restart owns the stream ``make_rng(seed, "restart", k)`` and runs
independently, so the campaign result does not depend on the number of worker
threads.  The ascent direction comes from the top-two singular triplets of
the Kronecker sum mapped back by partial traces, projected onto the tangent
space of the constraint set (traceless, orthogonal to the radial direction).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from kronvex.conjecture import BOUND, DIM, MatrixPair, phi_batch, project_batch
from kronvex.families import get_family, sample_uniform_batch
from kronvex.linalg import kron_sum_batch, singular_values, top_singular_triplets
from kronvex.rng import make_rng

VIOLATION_TOL = 1e-9
STATIONARY_TOL = 1e-8
DEGENERACY_GAP = 1e-6
REVERIFY_TOL = 1e-15
MIN_STEP = 1e-12
ARMIJO = 1e-4


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 200
    max_iters: int = 200
    step_init: float = 0.05
    step_shrink: float = 0.5
    grad_eps: float = 1e-6
    seed: int = 0
    family_filter: Optional[str] = None

    def __post_init__(self):
        for name in ("restarts", "max_iters"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        for name in ("step_init", "grad_eps"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        if not 0 < self.step_shrink < 1:
            raise ValueError(f"step_shrink must lie in (0, 1), got {self.step_shrink!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.family_filter is not None:
            get_family(self.family_filter)


@dataclass(frozen=True)
class AscentDirection:
    direction: MatrixPair
    norm: float
    finite_difference: bool
    stationary: bool


@dataclass
class RestartResult:
    restart: int
    best_phi: float
    best_pair: MatrixPair
    trajectory: list
    converged: bool
    fd_fallbacks: int
    violations: list


@dataclass
class SearchOutcome:
    best_phi: float
    best_pair: MatrixPair
    best_pair_digest: str
    best_restart: int
    trajectory: list            # (restart, iter, phi) for the start and every accepted step
    converged: bool             # every restart stopped before its iteration cap
    restarts_converged: int
    fd_fallbacks: int
    violations: list = field(default_factory=list)

    @property
    def margin(self) -> float:
        return BOUND - self.best_phi

    @property
    def verified_violation(self) -> bool:
        return any(v["verified"] for v in self.violations)


def _tangent(A, B):
    """Remove traces and the radial component at the current point."""
    eye = np.eye(DIM)
    A = A - np.trace(A) / DIM * eye
    B = B - np.trace(B) / DIM * eye
    return A, B


def _radial_free(dA, dB, A, B):
    r = np.vdot(A, dA).real + np.vdot(B, dB).real
    s = np.vdot(A, A).real + np.vdot(B, B).real
    return dA - (r / s) * A, dB - (r / s) * B


def _project_direction(GA, GB, A, B, project):
    if project is not None:
        GA, GB = project(GA, GB)
    GA, GB = _tangent(GA, GB)
    return _radial_free(GA, GB, A, B)


def analytic_gradient(A, B):
    """Euclidean gradient of phi in ``(A, B)`` and the gap ``sigma_2 - sigma_3``.

    With ``dphi = sum_i 2 sigma_i Re(u_i^* dX v_i)`` and ``dX = dA (x) I + I (x) dB``,
    the gradient is the partial trace of ``sum_i 2 sigma_i u_i v_i^*``.
    """
    sig, U, V = top_singular_triplets(kron_sum_batch(A, B)[None], k=2)
    M = np.einsum("k,ik,jk->ij", 2 * sig[0, :2], U[0], V[0].conj()).reshape(DIM, DIM, DIM, DIM)
    GA = np.einsum("imjm->ij", M)
    GB = np.einsum("mimj->ij", M)
    return GA, GB, float(sig[0, 1] - sig[0, 2])


def finite_difference_gradient(A, B, eps):
    """Central differences of phi along all 64 real coordinates of ``(A, B)``."""
    n = 2 * DIM * DIM
    x = np.concatenate([A.ravel(), B.ravel()])
    E = np.zeros((2 * n, 2 * n), dtype=np.complex128)  # rows: real then imaginary unit steps
    E[:n, :n] = np.eye(n)
    E[n:, :n] = 1j * np.eye(n)
    E = E[:, :n]
    pts = np.concatenate([x + eps * E, x - eps * E])
    As = pts[:, :DIM * DIM].reshape(-1, DIM, DIM)
    Bs = pts[:, DIM * DIM:].reshape(-1, DIM, DIM)
    vals = phi_batch(As, Bs)
    d = (vals[:2 * n] - vals[2 * n:]) / (2 * eps)
    g = d[:n] + 1j * d[n:]
    return g[:DIM * DIM].reshape(DIM, DIM), g[DIM * DIM:].reshape(DIM, DIM)


def phi_ascent_direction(p: MatrixPair, grad_eps: float = 1e-6,
                         project: Callable | None = None) -> AscentDirection:
    """Projected ascent direction of phi at a feasible pair.

    Uses the analytic gradient unless ``sigma_2 - sigma_3 <= DEGENERACY_GAP``,
    where phi is not differentiable; then central finite differences with step
    ``grad_eps`` are used and ``finite_difference`` is set.  ``project`` is an
    optional linear family projector applied before the tangent projection.
    """
    GA, GB, gap = analytic_gradient(p.A, p.B)
    fd = gap <= DEGENERACY_GAP
    if fd:
        GA, GB = finite_difference_gradient(p.A, p.B, grad_eps)
    dA, dB = _project_direction(GA, GB, p.A, p.B, project)
    norm = float(np.sqrt(np.vdot(dA, dA).real + np.vdot(dB, dB).real))
    stationary = norm < STATIONARY_TOL
    if stationary:
        dA = np.zeros_like(dA)
        dB = np.zeros_like(dB)
        norm = 0.0
    return AscentDirection(MatrixPair(dA, dB), norm, bool(fd), stationary)


def _phi_one(A, B, tol=None):
    X = kron_sum_batch(A, B)
    sig = singular_values(X) if tol is None else singular_values(X, tol=tol)
    return float(sig[0] ** 2 + sig[1] ** 2)


def _retract(A, B, project):
    if project is not None:
        A, B = project(A, B)
    A, B = project_batch(A, B)
    return A, B


def reverify(A, B) -> dict:
    """Recompute phi with a tightened Jacobi tolerance and with LAPACK."""
    X = kron_sum_batch(A, B)
    jac = _phi_one(A, B, tol=REVERIFY_TOL)
    s = np.linalg.svd(X, compute_uv=False)
    lap = float(s[0] ** 2 + s[1] ** 2)
    return {"phi_jacobi": jac, "phi_lapack": lap,
            "verified": bool(min(jac, lap) > BOUND + VIOLATION_TOL)}


def _start(config: SearchConfig, rng):
    if config.family_filter is None:
        A, B = sample_uniform_batch(rng, 1)
        return MatrixPair(A[0], B[0]), None
    start, project = get_family(config.family_filter).make_projector(rng)
    return start, project


def run_restart(config: SearchConfig, k: int, start: MatrixPair | None = None,
                project: Callable | None = None) -> RestartResult:
    rng = make_rng(config.seed, "restart", k)
    if start is None:
        start, project = _start(config, rng)
    A, B = _retract(start.A, start.B, project)
    f = _phi_one(A, B)
    traj = [(k, 0, f)]
    violations = []
    fd_count = 0
    step = config.step_init
    converged = False
    for it in range(1, config.max_iters + 1):
        d = phi_ascent_direction(MatrixPair(A, B), config.grad_eps, project)
        fd_count += d.finite_difference
        if d.stationary:
            converged = True
            break
        dA, dB = d.direction.A / d.norm, d.direction.B / d.norm
        t = min(config.step_init, 2 * step)
        accepted = False
        while t >= MIN_STEP:
            A1, B1 = _retract(A + t * dA, B + t * dB, project)
            f1 = _phi_one(A1, B1)
            if f1 >= f + ARMIJO * t * d.norm:
                accepted = True
                break
            t *= config.step_shrink
        if not accepted:
            converged = True
            break
        A, B, f, step = A1, B1, f1, t
        traj.append((k, it, f))
        if f > BOUND + VIOLATION_TOL:
            rec = reverify(A, B)
            rec.update({"restart": k, "iter": it, "phi": f, "pair": MatrixPair(A, B)})
            violations.append(rec)
    best = max(traj, key=lambda r: r[2])
    return RestartResult(k, best[2], MatrixPair(A, B), traj, converged, fd_count, violations)


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("KRONVEX_THREADS")
    return max(1, int(env)) if env else 1


def maximize_phi(config: SearchConfig, workers: int | None = None) -> SearchOutcome:
    """Run ``config.restarts`` independent ascents and reduce to the global best."""
    nw = _workers(workers)
    ks = range(config.restarts)
    if nw > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(lambda k: run_restart(config, k), ks))
    else:
        results = [run_restart(config, k) for k in ks]
    # max by value, ties to the lowest restart index
    best = min(results, key=lambda r: (-r.best_phi, r.restart))
    return SearchOutcome(
        best_phi=best.best_phi,
        best_pair=best.best_pair,
        best_pair_digest=best.best_pair.digest(),
        best_restart=best.restart,
        trajectory=[row for r in results for row in r.trajectory],
        converged=all(r.converged for r in results),
        restarts_converged=sum(r.converged for r in results),
        fd_fallbacks=sum(r.fd_fallbacks for r in results),
        violations=[v for r in results for v in r.violations],
    )


@dataclass(frozen=True)
class MarginHistogram:
    edges: np.ndarray
    counts: np.ndarray
    below: int          # margins under the lowest edge, i.e. < -VIOLATION_TOL
    total: int
    min_margin: float


def margin_histogram(n_samples: int, bins: int, rng: np.random.Generator,
                     chunk: int = 4096) -> MarginHistogram:
    """Histogram of ``1/2 - phi`` over uniform samples of the constraint set."""
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    edges = np.linspace(-VIOLATION_TOL, BOUND, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    below = 0
    lo = np.inf
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        As, Bs = sample_uniform_batch(rng, m)
        margins = BOUND - phi_batch(As, Bs)
        below += int(np.sum(margins < edges[0]))
        counts += np.histogram(np.clip(margins, None, edges[-1]), bins=edges)[0]
        lo = min(lo, float(margins.min()))
        done += m
    return MarginHistogram(edges, counts, below, n_samples, lo)
