"""Discrete energies of the coupled system and their nodal gradients.

Gradients are taken per cell by forward differences, with the zero Dirichlet
ghosts included, so the p-energy is summed over ``(n+1)**dim`` cells::

    E_p(u) = sum_cells |grad_h u|**p * h**dim

and for ``p = 2`` this is exactly the quadratic form of the 3-point (1D) or
5-point (2D) stiffness matrix. The coupling integral is a nodal sum::

    G(u, v) = sum_nodes |u|**(alpha-1) |v|**(beta-1) u v * h**dim

KKT convention. Stationarity of ``I - lam (G - 1)`` reads, after dividing
the u-row by alpha and the v-row by beta::

    grad E_p(u) / p = lam * |u|**(alpha-1) |v|**(beta-1) v * h**dim
    grad E_q(v) / q = lam * |u|**(alpha-1) |v|**(beta-1) u * h**dim

which is the weak form of the system with test functions the nodal hats.
Euler's identity for homogeneous functions then gives E_p = E_q = lam * G,
hence ``lam = I(u, v)`` whenever ``G = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .mesh import Grid, ScalarField

EPS_GRAD = 1e-10
EPS_U = 1e-12
ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class Exponents:
    p: float
    q: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.p > 1 or not self.q > 1:
            raise ParameterError(f"need p, q > 1, got p={self.p}, q={self.q}")
        if not self.alpha > 0 or not self.beta > 0:
            raise ParameterError(
                f"need alpha, beta > 0, got alpha={self.alpha}, beta={self.beta}"
            )
        s = self.alpha / self.p + self.beta / self.q
        if abs(s - 1.0) > ADMISSIBILITY_TOL:
            raise ParameterError(f"alpha/p + beta/q = {s:.12g} != 1")

    @classmethod
    def from_theta(cls, p: float, q: float, theta: float) -> "Exponents":
        """alpha = theta p, beta = (1 - theta) q, admissible for any theta in (0, 1)."""
        if not 0 < theta < 1:
            raise ParameterError(f"theta must lie in (0, 1), got {theta}")
        return cls(p, q, theta * p, (1.0 - theta) * q)

    def as_tuple(self):
        return (self.p, self.q, self.alpha, self.beta)


def _check_p(p):
    if not p > 1:
        raise ParameterError(f"exponent must exceed 1, got {p}")


def _same_grid(*fields: ScalarField) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ShapeError("fields live on different grids")
    return grid


# array-level kernels, shared with the solver to avoid wrapping every iterate


def _cell_diffs(vals: np.ndarray, grid: Grid):
    """Forward differences over all cells, ghosts included; one array per axis."""
    h = grid.h
    if grid.dim == 1:
        U = np.concatenate(([0.0], vals, [0.0]))
        return [np.diff(U) / h]
    n = grid.n
    U = np.zeros((n + 2, n + 2))
    U[1:-1, 1:-1] = vals.reshape(n, n)
    dx = (U[1:, :-1] - U[:-1, :-1]) / h
    dy = (U[:-1, 1:] - U[:-1, :-1]) / h
    return [dx, dy]


def _sq_grad(diffs):
    if len(diffs) == 1:
        return diffs[0] ** 2
    return diffs[0] ** 2 + diffs[1] ** 2


def energy_array(vals: np.ndarray, grid: Grid, p: float) -> float:
    diffs = _cell_diffs(vals, grid)
    if grid.dim == 1:
        dens = np.abs(diffs[0]) ** p
    else:
        dens = _sq_grad(diffs) ** (p / 2.0)
    return float(np.sum(dens) * grid.cell_volume)


def grad_energy_array(vals: np.ndarray, grid: Grid, p: float, eps_grad: float = EPS_GRAD):
    diffs = _cell_diffs(vals, grid)
    w = (_sq_grad(diffs) + eps_grad**2) ** ((p - 2.0) / 2.0)
    # d(cell diff)/d(node) = +-1/h, times cell volume h**dim
    scale = p * grid.h ** (grid.dim - 1)
    if grid.dim == 1:
        F = scale * w * diffs[0]
        return F[:-1] - F[1:]
    n = grid.n
    Fx = scale * w * diffs[0]
    Fy = scale * w * diffs[1]
    g = np.zeros((n + 2, n + 2))
    g[1:, :-1] += Fx
    g[:-1, :-1] -= Fx
    g[:-1, 1:] += Fy
    g[:-1, :-1] -= Fy
    return g[1:-1, 1:-1].ravel()


def _spow(x, a):
    """sign(x) |x|**a, the continuous extension of |x|**(a-1) x."""
    return np.sign(x) * np.abs(x) ** a


def coupling_array(u: np.ndarray, v: np.ndarray, e: Exponents, cell: float) -> float:
    return float(np.sum(_spow(u, e.alpha) * _spow(v, e.beta)) * cell)


def _abs_pow_reg(x, a, eps):
    """|x|**a for a >= 0, else (x**2 + eps**2)**(a/2)."""
    if a >= 0:
        return np.abs(x) ** a
    return (x * x + eps * eps) ** (a / 2.0)


def grad_coupling_array(u, v, e: Exponents, cell: float, eps_u: float = EPS_U):
    a, b = e.alpha, e.beta
    gu = a * _abs_pow_reg(u, a - 1.0, eps_u) * _spow(v, b) * cell
    gv = b * _abs_pow_reg(v, b - 1.0, eps_u) * _spow(u, a) * cell
    return gu, gv


# public API on ScalarField


def dirichlet_energy(u: ScalarField, p: float) -> float:
    """Discrete ``int |grad u|**p``; exact quadratic stiffness form when p = 2."""
    _check_p(p)
    return energy_array(u.values, u.grid, p)


def coupling(u: ScalarField, v: ScalarField, e: Exponents) -> float:
    grid = _same_grid(u, v)
    return coupling_array(u.values, v.values, e, grid.cell_volume)


def energy_total(u: ScalarField, v: ScalarField, e: Exponents) -> float:
    _same_grid(u, v)
    return (e.alpha / e.p) * dirichlet_energy(u, e.p) + (e.beta / e.q) * dirichlet_energy(
        v, e.q
    )


def grad_energy(u: ScalarField, p: float, eps_grad: float = EPS_GRAD) -> ScalarField:
    """Nodal gradient of ``dirichlet_energy``: a discrete ``-p * Delta_p u * h**dim``.

    The factor ``|grad u|**(p-2)`` is replaced by ``(|grad u|**2 + eps_grad**2)**((p-2)/2)``;
    at ``p = 2`` the result is exact for any ``eps_grad``.
    """
    _check_p(p)
    if eps_grad < 0:
        raise ParameterError("eps_grad must be nonnegative")
    return ScalarField(u.grid, grad_energy_array(u.values, u.grid, p, eps_grad))


def grad_coupling(
    u: ScalarField, v: ScalarField, e: Exponents, eps_u: float = EPS_U
) -> tuple[ScalarField, ScalarField]:
    """(dG/du, dG/dv) = (alpha |u|^(alpha-1) |v|^(beta-1) v, beta |u|^(alpha-1) |v|^(beta-1) u) h^d."""
    grid = _same_grid(u, v)
    if eps_u < 0:
        raise ParameterError("eps_u must be nonnegative")
    gu, gv = grad_coupling_array(u.values, v.values, e, grid.cell_volume, eps_u)
    return ScalarField(grid, gu), ScalarField(grid, gv)


def residual_arrays(u, v, lam, e: Exponents, grid: Grid, eps_grad=EPS_GRAD, eps_u=EPS_U):
    gu = grad_energy_array(u, grid, e.p, eps_grad) / e.p
    gv = grad_energy_array(v, grid, e.q, eps_grad) / e.q
    cu, cv = grad_coupling_array(u, v, e, grid.cell_volume, eps_u)
    return gu - lam * cu / e.alpha, gv - lam * cv / e.beta


def kkt_residual(
    u: ScalarField,
    v: ScalarField,
    lam: float,
    e: Exponents,
    eps_grad: float = EPS_GRAD,
    eps_u: float = EPS_U,
) -> tuple[float, float]:
    """2-norms of the weak-form defects of both equations (see module docstring)."""
    grid = _same_grid(u, v)
    ru, rv = residual_arrays(u.values, v.values, lam, e, grid, eps_grad, eps_u)
    return float(np.linalg.norm(ru)), float(np.linalg.norm(rv))


# increments f(x + dx) - f(x) evaluated without cancelling two large totals;
# the line search compares decreases far below the roundoff of E and G


def _pow_increment(s, ds, a):
    """(s + ds)**a - s**a for s >= 0, accurate when |ds| << s."""
    out = np.empty_like(s)
    pos = s > 0
    r = np.maximum(ds[pos] / s[pos], -1.0)
    with np.errstate(divide="ignore"):
        out[pos] = s[pos] ** a * np.expm1(a * np.log1p(r))
    zero = ~pos
    out[zero] = np.maximum(ds[zero], 0.0) ** a
    return out


def energy_increment_array(vals, dvals, grid: Grid, p: float) -> float:
    """E_p(u + du) - E_p(u)."""
    d0 = _cell_diffs(vals, grid)
    d1 = _cell_diffs(dvals, grid)
    s = _sq_grad(d0)
    ds = 2.0 * sum(a * b for a, b in zip(d0, d1)) + _sq_grad(d1)
    return float(np.sum(_pow_increment(s, ds, p / 2.0)) * grid.cell_volume)


def _spow_increment(x, dx, a):
    out = np.empty_like(x)
    same = (x != 0) & (dx / np.where(x == 0, 1.0, x) > -1.0)
    xs = x[same]
    out[same] = _spow(xs, a) * np.expm1(a * np.log1p(dx[same] / xs))
    other = ~same
    out[other] = _spow(x[other] + dx[other], a) - _spow(x[other], a)
    return out


def coupling_increment_array(u, v, du, dv, e: Exponents, cell: float) -> float:
    """G(u + du, v + dv) - G(u, v)."""
    fu, fv = _spow(u, e.alpha), _spow(v, e.beta)
    dfu = _spow_increment(u, du, e.alpha)
    dfv = _spow_increment(v, dv, e.beta)
    return float(np.sum(fu * dfv + dfu * fv + dfu * dfv) * cell)
