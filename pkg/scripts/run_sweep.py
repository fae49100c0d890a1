"""Sweep lambda_1 over p with q = p, alpha = theta p, beta = (1 - theta) q.

    python scripts/run_sweep.py --theta 0.5 --n 100 --out sweep.csv
"""

import argparse

import numpy as np

from pqeig.cli import RunConfig, sweep_csv, sweep_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p-min", type=float, default=1.6)
    ap.add_argument("--p-max", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=16)
    ap.add_argument("--theta", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    ps = tuple(np.linspace(args.p_min, args.p_max, args.points))
    rows = sweep_rows(RunConfig(n=args.n, theta=args.theta, p_range=ps))
    with open(args.out, "w") as fh:
        fh.write(sweep_csv(rows))
    lams = np.array([r[4] for r in rows], dtype=float)
    slopes = np.abs(np.diff(lams) / np.diff(ps))
    for r in rows:
        print(f"p={r[0]:.4f}  lambda={r[4]:.10g}  iters={r[5]}  converged={r[8]}")
    print(f"max/median slope = {slopes.max() / np.median(slopes):.3f}")


if __name__ == "__main__":
    main()
