"""Energy drop along the p-mean path between two distinct pairs, as n is refined."""

import argparse

import numpy as np

from pqeig import Exponents, ScalarField, balance_project, make_grid
from pqeig.proofcheck import path_energy_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, default=3.0)
    ap.add_argument("--q", type=float, default=3.0)
    ap.add_argument("--theta", type=float, default=0.5)
    args = ap.parse_args()
    e = Exponents.from_theta(args.p, args.q, args.theta)

    for n in (25, 50, 100, 200, 400):
        g = make_grid(1, n, 1.0)
        x = g.coordinates()[0]
        u, v, _ = balance_project(ScalarField(g, np.sin(np.pi * x)), ScalarField(g, x * (1 - x)), e)
        phi, psi, _ = balance_project(
            ScalarField(g, x * (1 - x) * (1 + x)), ScalarField(g, np.sin(np.pi * x) ** 2), e
        )
        r = path_energy_check(u, v, phi, psi, e)
        print(f"n={n:4d}  delta={r.delta:.8f}  surplus={r.surplus:.3e}  I(w)/G(w)={r.quotient_bound:.8f}")


if __name__ == "__main__":
    main()
