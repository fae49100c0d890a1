"""Reference values for the reductions that admit one.

* p = q = 2, alpha = beta = 1: the system collapses to u = v, -Delta u = lam u,
  so the first eigenvalue is that of the discrete Dirichlet Laplacian.
* p = q, alpha = beta = p/2 in 1D: u = v solves the scalar p-Laplacian problem
  whose first eigenvalue is (pi_p / L)**p, with pi_p as below. (Writing it as
  (p - 1) (pi_p / L)**p is only right for the convention of pi_p without the
  (p - 1)**(1/p) factor; a shooting solve of the ODE pins the value.)
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import OracleError, ParameterError
from .mesh import Grid, ScalarField


def laplacian_matrix(grid: Grid) -> sp.csc_matrix:
    """Sparse (-1, 2, -1)/h**2 stencil (5-point in 2D) on interior nodes."""
    n, h = grid.n, grid.h
    T = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h**2
    if grid.dim == 1:
        return sp.csc_matrix(T)
    eye = sp.identity(n)
    return sp.csc_matrix(sp.kron(T, eye) + sp.kron(eye, T))


def stiffness_matrix(grid: Grid) -> sp.csc_matrix:
    """Matrix K with ``dirichlet_energy(u, 2) == u @ K @ u``."""
    return sp.csc_matrix(laplacian_matrix(grid) * grid.cell_volume)


def linear_first_eig(grid: Grid, tol: float = 1e-14, max_steps: int = 10_000):
    """Smallest eigenpair of the discrete Dirichlet Laplacian by inverse iteration.

    Returns ``(eigenvalue, field)`` with the field of unit 2-norm and positive mean.
    """
    A = laplacian_matrix(grid)
    lu = splu(A)
    x = np.ones(grid.size) / math.sqrt(grid.size)
    lam = x @ (A @ x)
    for _ in range(max_steps):
        y = lu.solve(x)
        y /= np.linalg.norm(y)
        lam_new = y @ (A @ y)
        res = np.linalg.norm(A @ y - lam_new * y)
        x = y
        if abs(lam_new - lam) <= tol * lam_new and res <= 1e-10 * lam_new:
            lam = lam_new
            break
        lam = lam_new
    else:
        raise OracleError(f"inverse iteration did not converge in {max_steps} steps")
    if x.sum() < 0:
        x = -x
    return float(lam), ScalarField(grid, x)


def pi_p(p: float) -> float:
    """Generalized pi: 2 pi (p-1)**(1/p) / (p sin(pi/p))."""
    if not p > 1:
        raise ParameterError(f"pi_p needs p > 1, got {p}")
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def plap1d_lambda1(p: float, L: float) -> float:
    """First Dirichlet eigenvalue of -Delta_p u = lam |u|**(p-2) u on (0, L).

    Equals min int |u'|**p / int |u|**p = (pi_p(p) / L)**p.
    """
    if not L > 0:
        raise ParameterError(f"length must be positive, got {L}")
    return (pi_p(p) / L) ** p
