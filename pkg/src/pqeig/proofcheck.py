"""Numerical checks of the inequalities behind uniqueness of the first eigenpair.

Given two nonnegative pairs (u, v) and (phi, psi) the p-mean path

    w1 = ((u**p + phi**p) / 2)**(1/p),   w2 = ((v**q + psi**q) / 2)**(1/q)

has energy at most the mean of the two energies (convexity of |.|**p applied
to log-gradients), and its coupling density dominates the product of the
arithmetic means of u**alpha, phi**alpha and v**beta, psi**beta. Equality in
the energy bound forces the pairs to be proportional.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldError, ParameterError, ProjectionError
from .functional import Exponents, coupling, energy_total
from .mesh import ScalarField

DEFAULT_JENSEN_PS = (1.5, 2.0, 3.0, 4.7)


def _nonneg(*fields):
    for f in fields:
        vals = f.values if isinstance(f, ScalarField) else np.asarray(f)
        if np.any(vals < 0):
            raise FieldError("p-mean path needs nonnegative fields")


def _pmean(a, b, p):
    return ((a**p + b**p) / 2.0) ** (1.0 / p)


def midpoint_pair(u, phi, p, v, psi, q):
    """Nodewise p-mean of (u, phi) and q-mean of (v, psi)."""
    if not p > 1 or not q > 1:
        raise ParameterError(f"need p, q > 1, got p={p}, q={q}")
    _nonneg(u, phi, v, psi)
    w1 = ScalarField(u.grid, _pmean(u.values, phi.values, p))
    w2 = ScalarField(v.grid, _pmean(v.values, psi.values, q))
    return w1, w2


def jensen_gap(a1, a2, x1, x2, p):
    """Weighted mean of |x|**p minus |weighted mean of x|**p.

    ``x1``, ``x2`` are vectors along the last axis; leading axes broadcast
    against ``a1``, ``a2`` so a whole batch is evaluated at once.
    """
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    tot = a1 + a2
    w1, w2 = a1 / tot, a2 / tot
    n1 = np.linalg.norm(x1, axis=-1) ** p
    n2 = np.linalg.norm(x2, axis=-1) ** p
    mean = w1[..., None] * x1 + w2[..., None] * x2
    gap = w1 * n1 + w2 * n2 - np.linalg.norm(mean, axis=-1) ** p
    return float(gap) if np.ndim(gap) == 0 else gap


def jensen_suite(n_draws: int, seed: int = 0, ps=DEFAULT_JENSEN_PS, dim: int = 3):
    """Smallest gap over ``n_draws`` random (weights, vectors), split evenly across ``ps``.

    Weights uniform in (0, 1), vectors uniform in [-1, 1]**dim.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    per = -(-n_draws // len(ps))
    worst = np.inf
    for p in ps:
        a = rng.uniform(0.0, 1.0, size=(2, per))
        a[a == 0.0] = 0.5
        x = rng.uniform(-1.0, 1.0, size=(2, per, dim))
        worst = min(worst, float(np.min(jensen_gap(a[0], a[1], x[0], x[1], p))))
    return worst


def _concavity_gap(u, v, phi, psi, e: Exponents):
    lhs = ((u**e.p + phi**e.p) / 2.0) ** (e.alpha / e.p) * ((v**e.q + psi**e.q) / 2.0) ** (
        e.beta / e.q
    )
    rhs = ((u**e.alpha + phi**e.alpha) / 2.0) * ((v**e.beta + psi**e.beta) / 2.0)
    return rhs - lhs


def concavity_violation(u, v, phi, psi, e: Exponents) -> float:
    """max over nodes of ((u^a + phi^a)/2)((v^b + psi^b)/2) - w1^a w2^b; never positive in exact arithmetic."""
    _nonneg(u, v, phi, psi)
    vals = [f.values if isinstance(f, ScalarField) else np.asarray(f, float) for f in (u, v, phi, psi)]
    return float(np.max(_concavity_gap(*vals, e)))


def concavity_suite(n_trials: int, e: Exponents, seed: int = 0) -> float:
    rng = np.random.Generator(np.random.Philox(seed))
    quad = 1.0 - rng.uniform(0.0, 1.0, size=(4, n_trials))  # (0, 1]
    return concavity_violation(*quad, e)


@dataclass(frozen=True)
class PathReport:
    delta: float
    surplus: float
    energy_mean: float
    energy_midpoint: float
    quotient_bound: float


ON_C_TOL = 1e-6


def path_energy_check(u, v, phi, psi, e: Exponents) -> PathReport:
    """Energy along the p-mean path between two pairs on the constraint set.

    ``delta`` is mean(I(u, v), I(phi, psi)) - I(w1, w2), zero for identical
    pairs and positive otherwise (up to the discrete chain rule error in 2D).
    ``surplus`` is G(w1, w2) - 1 and ``quotient_bound`` is I(w1, w2) / G(w1, w2),
    an upper bound for the first eigenvalue.
    """
    _nonneg(u, v, phi, psi)
    for a, b in ((u, v), (phi, psi)):
        g = coupling(a, b, e)
        if abs(g - 1.0) > ON_C_TOL:
            raise ProjectionError(f"pair is off the constraint set: G = {g!r}")
    w1, w2 = midpoint_pair(u, phi, e.p, v, psi, e.q)
    mean = 0.5 * (energy_total(u, v, e) + energy_total(phi, psi, e))
    mid = energy_total(w1, w2, e)
    gw = coupling(w1, w2, e)
    return PathReport(mean - mid, gw - 1.0, mean, mid, mid / gw)


def four_normalization(u, v, phi, psi, e: Exponents):
    """Least-squares log-scales making all four mixed integrals equal to one.

    With A_uv = int u^a v^b, A_upsi, A_phiv, A_phipsi, the unknowns
    x = log(s_u, s_v, s_phi, s_psi) must satisfy ``a x_f + b x_g = -log A_fg``.
    The system has rank 3 (rows 1 - 2 equal rows 3 - 4), so it is solvable
    exactly iff A_uv A_phipsi = A_upsi A_phiv. Returns the minimum-norm scales
    and ``defect = |log A_uv + log A_phipsi - log A_upsi - log A_phiv|``; the
    least-squares residual has 2-norm ``defect / 2``.
    """
    _nonneg(u, v, phi, psi)
    a, b = e.alpha, e.beta
    ints = {}
    for name, f, g in (("uv", u, v), ("upsi", u, psi), ("phiv", phi, v), ("phipsi", phi, psi)):
        val = float(np.sum(f.values**a * g.values**b) * f.grid.cell_volume)
        if not val > 0:
            raise FieldError(f"integral {name} is not positive ({val!r})")
        ints[name] = val
    M = np.array(
        [
            [a, b, 0.0, 0.0],
            [a, 0.0, 0.0, b],
            [0.0, b, a, 0.0],
            [0.0, 0.0, a, b],
        ]
    )
    logs = np.log([ints["uv"], ints["upsi"], ints["phiv"], ints["phipsi"]])
    x = np.linalg.lstsq(M, -logs, rcond=None)[0]
    defect = abs(logs[0] + logs[3] - logs[1] - logs[2])
    return tuple(float(s) for s in np.exp(x)), float(defect)
