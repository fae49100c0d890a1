"""Multi-start simplicity check on a few exponent tuples, printed as a table."""

import argparse
import time

from pqeig import Exponents, SolverConfig, make_grid, multi_start

TRIPLES = [(2, 2, 1, 1), (2, 3, 1, 1.5), (3, 3, 1.5, 1.5), (1.5, 3, 0.75, 1.5), (4, 2, 2, 1)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--starts", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = make_grid(args.dim, args.n, 1.0)
    cfg = SolverConfig(n_starts=args.starts, seed=args.seed)
    print(f"{'(p, q, alpha, beta)':>24} {'lambda':>16} {'conv':>6} {'spread':>9} {'misfit':>9} {'min/max':>9} verdict")
    for t in TRIPLES:
        t0 = time.perf_counter()
        v = multi_start(grid, Exponents(*t), cfg)
        lam = min(l for l, c in zip(v.lambdas, v.converged) if c)
        print(
            f"{str(t):>24} {lam:16.10g} {sum(v.converged):>3}/{len(v.converged):<2} "
            f"{v.lambda_spread:9.1e} {v.misfit:9.1e} {v.min_to_max:9.2e} {v.verdict}"
            f"  ({time.perf_counter() - t0:.1f}s)"
        )


if __name__ == "__main__":
    main()
