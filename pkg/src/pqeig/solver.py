"""Minimization of I(u, v) over {G(u, v) = 1} and a multi-start simplicity check.

Both I and G are separately homogeneous in u and v, so any pair with G > 0
can be rescaled onto the constraint set in closed form, choosing the
rescaling of least energy (``balance_project``). The resulting value

    mu(u, v) = min { I(s u, t v) : s, t > 0, G(s u, t v) = 1 }

is invariant under positive rescaling, and its gradient at a balanced pair is
the gradient of the Lagrangian ``I - mu G``. ``solve`` runs a monotone
descent on mu along that gradient, preconditioned by the inverse of the
p = 2 stiffness matrix (one sparse factorization per solve). For
p = q = 2, alpha = beta = 1 a unit step is exactly one sweep of inverse
iteration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import AlignmentError, ProjectionError, SolverError
from .functional import (
    EPS_GRAD,
    EPS_U,
    Exponents,
    coupling_array,
    coupling_increment_array,
    energy_array,
    energy_increment_array,
    grad_coupling_array,
    grad_energy_array,
)
from .mesh import Grid, ScalarField, random_field
from .oracle import stiffness_matrix

TERMINATIONS = ("lambda-stalled", "kkt-met", "max-iters")
PRECONDITIONERS = ("weighted", "laplace", "none")

# v is drawn from a stream disjoint from the u streams of nearby seeds
V_SEED_OFFSET = 1 << 32


@dataclass(frozen=True)
class SolverConfig:
    step_init: float = 1.0
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    tol_lambda: float = 1e-10
    tol_kkt: float = 1e-6
    max_iters: int = 50_000
    eps_grad: float = EPS_GRAD
    eps_u: float = EPS_U
    seed: int = 0
    n_starts: int = 1
    positive_init: bool = True
    # "weighted", "laplace", or "none" (plain Euclidean gradient)
    precondition: str = "weighted"
    # floor for the gradient weights of the weighted preconditioner, relative to rms |grad u|
    weight_floor: float = 1e-8
    max_backtracks: int = 60
    max_restarts: int = 8

    def __post_init__(self):
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if not 0 < self.armijo_shrink < 1 or not 0 < self.armijo_slope < 1:
            raise ValueError("armijo_shrink and armijo_slope must lie in (0, 1)")
        if not self.tol_lambda > 0 or not self.tol_kkt > 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1 or self.n_starts < 1:
            raise ValueError("max_iters and n_starts must be >= 1")
        if self.eps_grad < 0 or self.eps_u < 0:
            raise ValueError("regularizations must be nonnegative")
        if self.precondition not in PRECONDITIONERS:
            raise ValueError(f"precondition must be one of {PRECONDITIONERS}")


@dataclass(frozen=True, eq=False)
class EigenPair:
    u: ScalarField
    v: ScalarField
    lam: float
    exponents: Exponents

    @property
    def grid(self) -> Grid:
        return self.u.grid


@dataclass
class SolverReport:
    iterations: int
    lambda_history: list[float]
    kkt_history: list[tuple[float, float]]
    converged: bool
    termination: str

    @property
    def kkt(self) -> tuple[float, float]:
        return self.kkt_history[-1] if self.kkt_history else (math.inf, math.inf)


def _balance_scales(u, v, e: Exponents, grid: Grid):
    A = (e.alpha / e.p) * energy_array(u, grid, e.p)
    B = (e.beta / e.q) * energy_array(v, grid, e.q)
    G0 = coupling_array(u, v, e, grid.cell_volume)
    if not (G0 > 0 and A > 0 and B > 0) or not math.isfinite(A + B + G0):
        raise ProjectionError(
            f"cannot rescale onto the constraint set (G={G0:.3g}, A={A:.3g}, B={B:.3g})"
        )
    a, b = e.alpha / e.p, e.beta / e.q
    log_mu = -(math.log(G0) + a * math.log(e.alpha / (e.p * A)) + b * math.log(e.beta / (e.q * B)))
    mu = math.exp(log_mu)
    s = (mu * e.alpha / (e.p * A)) ** (1.0 / e.p)
    t = (mu * e.beta / (e.q * B)) ** (1.0 / e.q)
    return s, t, mu


def _project(u, v, e, grid):
    s, t, _ = _balance_scales(u, v, e, grid)
    u, v = s * u, t * v
    mu = (e.alpha / e.p) * energy_array(u, grid, e.p) + (e.beta / e.q) * energy_array(
        v, grid, e.q
    )
    return u, v, mu


def balance_project(u: ScalarField, v: ScalarField, e: Exponents):
    """Rescale (u, v) to (s u, t v) on {G = 1} with the least energy.

    With A = (alpha/p) E_p(u), B = (beta/q) E_q(v), G0 = G(u, v)::

        mu = 1 / (G0 (alpha/(p A))**(alpha/p) (beta/(q B))**(beta/q))
        s  = (mu alpha / (p A))**(1/p),   t = (mu beta / (q B))**(1/q)

    Returns ``(s u, t v, mu)``; the projected pair has energy_total equal to mu.
    Raises ProjectionError if G0 <= 0 or either energy vanishes.
    """
    if u.grid != v.grid:
        from .errors import ShapeError

        raise ShapeError("fields live on different grids")
    un, vn, mu = _project(u.values, v.values, e, u.grid)
    return ScalarField(u.grid, un), ScalarField(v.grid, vn), mu


def _mu_increment(u, v, du, dv, parts, e, grid):
    """mu(u + du, v + dv) - mu(u, v) from accurate increments of A, B and G.

    log mu = a log A + b log B - log G + const, with a = alpha/p, b = beta/q.
    """
    A, B, G0, mu = parts
    dA = (e.alpha / e.p) * energy_increment_array(u, du, grid, e.p)
    dB = (e.beta / e.q) * energy_increment_array(v, dv, grid, e.q)
    dG = coupling_increment_array(u, v, du, dv, e, grid.cell_volume)
    if not (A + dA > 0 and B + dB > 0 and G0 + dG > 0):
        return math.inf
    dlog = (
        (e.alpha / e.p) * math.log1p(dA / A)
        + (e.beta / e.q) * math.log1p(dB / B)
        - math.log1p(dG / G0)
    )
    if not math.isfinite(dlog):
        return math.inf
    return mu * math.expm1(dlog)


def _difference_operators(grid: Grid):
    """Sparse maps from interior values to per-cell forward differences (times h)."""
    n = grid.n
    D = sp.diags([-np.ones(n), np.ones(n)], [0, -1], shape=(n + 1, n), format="csr")
    if grid.dim == 1:
        return [D]
    # cells (i, j), i, j = 0..n; rows of the 2D cell array are the x-index
    P = sp.eye(n + 1, n, k=-1, format="csr")  # node j -> cell j + 1, cell 0 is the ghost row
    return [sp.kron(D, P, format="csr"), sp.kron(P, D, format="csr")]


def _weighted_stiffness(ops, grid, vals, p, floor):
    """Stiffness with cell weights (|grad u|**2 + d**2)**((p-2)/2).

    In 1D, p (p-1) times this matrix is the Hessian of E_p when d = 0.
    """
    diffs = [(D @ vals) / grid.h for D in ops]
    sq = sum(d * d for d in diffs)
    rms2 = float(np.mean(sq))
    w = (sq + (floor**2) * rms2) ** ((p - 2.0) / 2.0)
    W = sp.diags(w * grid.h ** (grid.dim - 2))
    return sp.csc_matrix(sum(D.T @ W @ D for D in ops))


def _initial_pair(grid, e, cfg):
    # restart k redraws from seed + k * 2**33
    for k in range(cfg.max_restarts):
        seed = cfg.seed + k * V_SEED_OFFSET * 2
        u = random_field(grid, seed, cfg.positive_init).values
        v = random_field(grid, seed + V_SEED_OFFSET, cfg.positive_init).values
        if coupling_array(u, v, e, grid.cell_volume) > 0:
            return u, v
    raise SolverError(f"no feasible random start after {cfg.max_restarts} draws")


def solve(grid: Grid, e: Exponents, cfg: SolverConfig = SolverConfig(), init=None):
    """Minimize I over the constraint set. Returns ``(EigenPair, SolverReport)``.

    ``init`` optionally supplies the starting pair (two ScalarFields);
    otherwise it is drawn with ``random_field`` from ``cfg.seed`` (u) and
    ``cfg.seed + 2**32`` (v).
    """
    if init is None:
        u, v = _initial_pair(grid, e, cfg)
    else:
        u, v = (np.array(f.values, dtype=float) for f in init)
    try:
        u, v, mu = _project(u, v, e, grid)
    except ProjectionError as exc:
        raise SolverError(f"starting pair is infeasible: {exc}") from exc

    lu = splu(stiffness_matrix(grid)) if cfg.precondition == "laplace" else None
    ops = _difference_operators(grid) if cfg.precondition == "weighted" else None
    cell = grid.cell_volume
    a_p, b_q = e.alpha / e.p, e.beta / e.q

    lam_hist = [mu]
    kkt_hist = []
    mu_prev = math.inf
    termination = "max-iters"
    converged = False
    iterations = 0

    while True:
        gu = a_p * grad_energy_array(u, grid, e.p, cfg.eps_grad)
        gv = b_q * grad_energy_array(v, grid, e.q, cfg.eps_grad)
        cu, cv = grad_coupling_array(u, v, e, cell, cfg.eps_u)
        ru = gu - mu * cu
        rv = gv - mu * cv
        kkt = (float(np.linalg.norm(ru)) / e.alpha, float(np.linalg.norm(rv)) / e.beta)
        kkt_hist.append(kkt)
        kkt_ok = max(kkt) < cfg.tol_kkt
        if abs(mu_prev - mu) < cfg.tol_lambda * mu and kkt_ok:
            termination, converged = "kkt-met", True
            break
        if iterations >= cfg.max_iters:
            break

        if ops is not None:
            Ku = _weighted_stiffness(ops, grid, u, e.p, cfg.weight_floor)
            Kv = _weighted_stiffness(ops, grid, v, e.q, cfg.weight_floor)
            du = -splu(Ku).solve(ru) / (e.alpha * (e.p - 1))
            dv = -splu(Kv).solve(rv) / (e.beta * (e.q - 1))
        elif lu is not None:
            # match the radial curvature of each block: alpha (p-1) E_p / E_2
            cu_scale = e.alpha * (e.p - 1) * energy_array(u, grid, e.p) / energy_array(u, grid, 2)
            cv_scale = e.beta * (e.q - 1) * energy_array(v, grid, e.q) / energy_array(v, grid, 2)
            du = -lu.solve(ru) / cu_scale
            dv = -lu.solve(rv) / cv_scale
        else:
            du, dv = -ru, -rv
        slope = float(ru @ du + rv @ dv)

        parts = (
            (e.alpha / e.p) * energy_array(u, grid, e.p),
            (e.beta / e.q) * energy_array(v, grid, e.q),
            coupling_array(u, v, e, cell),
            mu,
        )
        tau = cfg.step_init
        accepted = False
        if slope < 0:
            for _ in range(cfg.max_backtracks):
                with np.errstate(invalid="ignore", over="ignore"):
                    dmu = _mu_increment(u, v, tau * du, tau * dv, parts, e, grid)
                if dmu <= cfg.armijo_slope * tau * slope:
                    accepted = True
                    break
                tau *= cfg.armijo_shrink
        if not accepted:
            termination, converged = "lambda-stalled", kkt_ok
            break

        u, v, mu_new = _project(u + tau * du, v + tau * dv, e, grid)
        mu_prev, mu = mu, mu_new
        lam_hist.append(mu)
        iterations += 1

    pair = EigenPair(ScalarField(grid, u), ScalarField(grid, v), mu, e)
    report = SolverReport(iterations, lam_hist, kkt_hist, converged, termination)
    return pair, report


def align(a: EigenPair, b: EigenPair):
    """Least-squares factors with a.u ~ k1 b.u and a.v ~ k2 b.v, and the worse relative misfit."""
    if a.grid != b.grid:
        from .errors import ShapeError

        raise ShapeError("eigenpairs live on different grids")
    out = []
    for x, y in ((a.u.values, b.u.values), (a.v.values, b.v.values)):
        yy = float(y @ y)
        if yy == 0.0:
            raise AlignmentError("cannot align against a zero field")
        k = float(x @ y) / yy
        nx = float(np.linalg.norm(x))
        rel = float(np.linalg.norm(x - k * y)) / nx if nx > 0 else 0.0
        out.append((k, rel))
    (k1, m1), (k2, m2) = out
    return k1, k2, max(m1, m2)


def sign_normalized(f: ScalarField) -> ScalarField:
    return f.scaled(-1.0) if f.values.sum() < 0 else f


def _sign_stats(f: ScalarField):
    x = sign_normalized(f).values
    majority = 1.0 if np.sum(x > 0) >= np.sum(x < 0) else -1.0
    flipped = float(np.mean(np.sign(x) == -majority))
    return flipped, float(x.min() / np.abs(x).max())


@dataclass
class SimplicityVerdict:
    verdict: str
    lambdas: list
    converged: list[bool]
    lambda_spread: float
    misfit: float
    sign_fraction: float
    min_to_max: float
    pairs: list = field(default_factory=list, repr=False)
    reports: list = field(default_factory=list, repr=False)

    @property
    def simple(self) -> bool:
        return self.verdict == "simple"


SPREAD_TOL = 1e-6
MISFIT_TOL = 1e-3


def multi_start(grid: Grid, e: Exponents, cfg: SolverConfig = SolverConfig()) -> SimplicityVerdict:
    """Solve from seeds cfg.seed, ..., cfg.seed + n_starts - 1 and compare the results.

    Verdict is "simple" iff the converged runs agree in lambda (relative spread
    < 1e-6) and in shape (alignment misfit < 1e-3 after sign normalization).
    ``min_to_max`` is the most negative ratio min/max over all normalized
    eigenfunctions, ``sign_fraction`` the largest fraction of nodes whose sign
    disagrees with the majority.
    """
    pairs, reports, lambdas, conv = [], [], [], []
    for k in range(cfg.n_starts):
        try:
            pair, rep = solve(grid, e, replace(cfg, seed=cfg.seed + k))
        except SolverError:
            pairs.append(None)
            reports.append(None)
            lambdas.append(None)
            conv.append(False)
            continue
        pairs.append(pair)
        reports.append(rep)
        lambdas.append(pair.lam)
        conv.append(rep.converged)

    good = [
        EigenPair(sign_normalized(p.u), sign_normalized(p.v), p.lam, p.exponents)
        for p, c in zip(pairs, conv)
        if c
    ]
    if not good:
        raise SolverError("no multi-start run converged")

    lams = [p.lam for p in good]
    spread = (max(lams) - min(lams)) / min(lams)
    misfit = 0.0
    for a, b in itertools.combinations(good, 2):
        misfit = max(misfit, align(a, b)[2])
    sign_fraction, min_to_max = 0.0, math.inf
    for p in good:
        for f in (p.u, p.v):
            frac, ratio = _sign_stats(f)
            sign_fraction = max(sign_fraction, frac)
            min_to_max = min(min_to_max, ratio)

    verdict = "simple" if spread < SPREAD_TOL and misfit < MISFIT_TOL else "not simple"
    return SimplicityVerdict(
        verdict, lambdas, conv, spread, misfit, sign_fraction, min_to_max, pairs, reports
    )
