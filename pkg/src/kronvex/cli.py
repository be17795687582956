"""Command-line entry point.

Exit codes: 0 success, 1 operational or usage error, 2 verifier violations,
3 a search iterate exceeded the bound and survived re-verification.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from kronvex import __version__
from kronvex.conjecture import BOUND, MatrixPair, feasibility_residuals, phi_batch
from kronvex.families import FAMILIES, sample_family_batch
from kronvex.io import RunManifest, pair_to_json, write_csv, write_json
from kronvex.rng import make_rng
from kronvex.search import SearchConfig, margin_histogram, maximize_phi
from kronvex.suites import SUITES, replay, run_suite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2
EXIT_COUNTEREXAMPLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_verify(args) -> int:
    ids = args.suite or list(SUITES)
    unknown = [s for s in ids if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    manifest = RunManifest("verify", args.seed, {"suites": ids, "n_samples": args.n})
    elapsed = {}
    failed = False
    for sid in ids:
        res = run_suite(sid, args.n, seed=args.seed, workers=args.workers)
        elapsed[sid] = res.elapsed
        manifest.add(res.to_dict())
        failed |= not res.passed
        status = "ok" if res.passed else f"{len(res.violations)} violations"
        print(f"{sid:18s} n={res.samples:<7d} worst_margin={res.worst_margin: .3e}  {status}",
              file=sys.stderr)
    manifest.finish()
    d = manifest.to_dict()
    d["timestamps"]["elapsed_seconds"] = elapsed
    write_json(args.out, d)
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_search(args) -> int:
    config = SearchConfig(restarts=args.restarts, max_iters=args.max_iters,
                          step_init=args.step_init, step_shrink=args.step_shrink,
                          grad_eps=args.grad_eps, seed=args.seed, family_filter=args.family)
    manifest = RunManifest("search", args.seed, dict(config.__dict__))
    t0 = time.perf_counter()
    out = maximize_phi(config, workers=args.workers)
    manifest.add({
        "best_phi": out.best_phi,
        "margin": out.margin,
        "best_pair_digest": out.best_pair_digest,
        "best_restart": out.best_restart,
        "best_pair": pair_to_json(out.best_pair),
        "converged": out.converged,
        "restarts_converged": out.restarts_converged,
        "finite_difference_fallbacks": out.fd_fallbacks,
        "accepted_steps": len(out.trajectory) - config.restarts,
        "violations": out.violations,
    })
    manifest.finish()
    d = manifest.to_dict()
    d["timestamps"]["elapsed_seconds"] = time.perf_counter() - t0
    write_json(args.out, d)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, ["restart", "iter", "phi", "margin"],
                      ((k, it, f, BOUND - f) for k, it, f in out.trajectory))
    print(f"best_phi={out.best_phi!r} margin={out.margin:.3e} restart={out.best_restart}",
          file=sys.stderr)
    return EXIT_COUNTEREXAMPLE if out.verified_violation else EXIT_OK


def cmd_family(args) -> int:
    if args.name not in FAMILIES:
        raise ValueError(f"unknown family {args.name!r}; choose from {sorted(FAMILIES)}")
    if args.n < 0:
        raise ValueError("-n must be nonnegative")
    rng = make_rng(args.seed, "family", args.name)
    if args.n:
        As, Bs = sample_family_batch(args.name, rng, args.n)
        phis = phi_batch(As, Bs)
        tA, tB, nr = feasibility_residuals(As, Bs)
    else:
        As = Bs = np.zeros((0, 4, 4), dtype=np.complex128)
        phis = tA = tB = nr = np.zeros(0)
    fh, close = _open_out(args.out)
    try:
        write_csv(fh, ["index", "phi", "margin", "trace_A_residual", "trace_B_residual",
                       "norm_residual"],
                  ((i, phis[i], BOUND - phis[i], tA[i], tB[i], nr[i]) for i in range(args.n)))
    finally:
        if close:
            fh.close()
    if args.dump:
        write_json(args.dump, {"format": "kronvex-v1", "family": args.name, "seed": args.seed,
                               "pairs": [pair_to_json(MatrixPair(a, b)) for a, b in zip(As, Bs)]})
    return EXIT_OK


def cmd_replay(args) -> int:
    if args.suite not in SUITES:
        raise ValueError(f"unknown suite {args.suite!r}")
    if args.index < 0:
        raise ValueError("--index must be nonnegative")
    inputs = replay(args.suite, args.seed, args.index)
    write_json(args.out, {"format": "kronvex-v1", "suite_id": args.suite, "seed": args.seed,
                          "index": args.index,
                          "inputs": {k: _encode(v) for k, v in inputs.items()}})
    return EXIT_OK


def _encode(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return {"shape": list(v.shape), "re": v.real.ravel(), "im": v.imag.ravel()}
    return {"shape": list(v.shape), "values": v.ravel()}


def cmd_histogram(args) -> int:
    h = margin_histogram(args.n, args.bins, make_rng(args.seed, "histogram"))
    fh, close = _open_out(args.out)
    try:
        write_csv(fh, ["bin_lo", "bin_hi", "count"],
                  ((h.edges[i], h.edges[i + 1], int(h.counts[i])) for i in range(len(h.counts))))
    finally:
        if close:
            fh.close()
    print(f"samples={h.total} below={h.below} min_margin={h.min_margin:.3e}", file=sys.stderr)
    return EXIT_VIOLATION if h.below else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kronvex", description="Numerical checks of the Kronecker-sum singular value bound.")
    p.add_argument("--version", action="version", version=f"kronvex {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_seed=0):
        sp.add_argument("--seed", type=int, default=default_seed)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")

    v = sub.add_parser("verify", help="run verifier suites")
    v.add_argument("--suite", action="append", help="suite id (repeatable; default: all)")
    v.add_argument("-n", type=int, default=1000, help="samples per suite")
    v.add_argument("--workers", type=int, default=None)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="multi-start ascent of phi")
    d = SearchConfig()
    s.add_argument("--restarts", type=int, default=d.restarts)
    s.add_argument("--max-iters", type=int, default=d.max_iters)
    s.add_argument("--step-init", type=float, default=d.step_init)
    s.add_argument("--step-shrink", type=float, default=d.step_shrink)
    s.add_argument("--grad-eps", type=float, default=d.grad_eps)
    s.add_argument("--family", default=None, choices=sorted(FAMILIES))
    s.add_argument("--csv", default=None, help="trajectory CSV path")
    s.add_argument("--workers", type=int, default=None)
    common(s)
    s.set_defaults(func=cmd_search)

    f = sub.add_parser("family", help="sample a structured family")
    f.add_argument("name")
    f.add_argument("-n", type=int, default=100)
    f.add_argument("--dump", default=None, help="JSON path for the full matrices")
    common(f)
    f.set_defaults(func=cmd_family)

    r = sub.add_parser("replay", help="reconstruct the inputs of one suite sample")
    r.add_argument("suite")
    r.add_argument("--index", type=int, required=True)
    common(r)
    r.set_defaults(func=cmd_replay)

    h = sub.add_parser("histogram", help="margin histogram over uniform samples")
    h.add_argument("-n", type=int, default=10000)
    h.add_argument("--bins", type=int, default=50)
    common(h)
    h.set_defaults(func=cmd_histogram)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"kronvex: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
