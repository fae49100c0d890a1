"""Independent oracles shared by the test modules."""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from pqeig import ScalarField


def smooth_field(grid, rng, positive=False, modes=4):
    """Random sine series; positive fields are dominated by the first mode.

    |sin(k t)| <= k |sin t| keeps sin(t) + sum c_k sin(k t) > 0 when sum k |c_k| < 1.
    """
    x = [c / grid.length for c in grid.coordinates()]

    def series():
        if positive:
            c = rng.uniform(-0.1, 0.1, size=modes)
            c[0] = 1.0
        else:
            c = rng.uniform(-1.0, 1.0, size=modes)
        return lambda t: sum(ck * np.sin((k + 1) * np.pi * t) for k, ck in enumerate(c))

    vals = np.ones(grid.size)
    for xi in x:
        vals = vals * series()(xi)
    return ScalarField(grid, vals)


def dense_stiffness(grid):
    """K with u @ K @ u = sum over cells of squared differences, by explicit edge loop."""
    n = grid.n
    idx = np.arange(grid.size).reshape(grid.shape)
    K = np.zeros((grid.size, grid.size))

    def edge(a, b):
        # a, b flat indices or None for a boundary ghost
        for i in (a, b):
            if i is not None:
                K[i, i] += 1.0
        if a is not None and b is not None:
            K[a, b] -= 1.0
            K[b, a] -= 1.0

    if grid.dim == 1:
        nodes = [None] + list(range(n)) + [None]
        for a, b in zip(nodes[:-1], nodes[1:]):
            edge(a, b)
        return K / grid.h
    for line in list(idx) + list(idx.T):
        nodes = [None] + list(line) + [None]
        for a, b in zip(nodes[:-1], nodes[1:]):
            edge(a, b)
    return K  # h**2 / h**2


def central_directional(f, x, w, tau=1e-6):
    return (f(x + tau * w) - f(x - tau * w)) / (2 * tau)


def _first_zero(lam, p):
    # u' = |phi|^(1/(p-1)) sign(phi), phi' = -lam |u|^(p-2) u, u(0) = 0, phi(0) = 1
    def rhs(x, y):
        u, phi = y
        return [np.sign(phi) * abs(phi) ** (1 / (p - 1)), -lam * np.sign(u) * abs(u) ** (p - 1)]

    def hit(x, y):
        return y[0]

    hit.terminal = True
    hit.direction = -1
    sol = solve_ivp(rhs, [1e-12, 20.0], [1e-12, 1.0], events=hit, rtol=1e-12, atol=1e-14)
    return sol.t_events[0][0]


def shooting_lambda1(p, L=1.0):
    """First eigenvalue of the scalar 1D p-Laplacian by shooting on the first zero."""
    lam = brentq(lambda l: _first_zero(l, p) - 1.0, 0.5, 500.0, xtol=1e-13)
    return lam / L**p


def grid_search_mu(A, B, G0, e, n=400, span=4.0):
    """min s^p A + t^q B subject to s^a t^b G0 = 1, by a 400 x 400 grid over (log s, log t).

    Each grid point is pushed onto the constraint along the ray r (s, t), so
    the grid samples the constraint curve densely.
    """
    ls0, lt0 = -np.log(A) / e.p, -np.log(B) / e.q
    ls, lt = np.meshgrid(
        np.linspace(ls0 - span, ls0 + span, n), np.linspace(lt0 - span, lt0 + span, n)
    )
    lr = -(np.log(G0) + e.alpha * ls + e.beta * lt) / (e.alpha + e.beta)
    s, t = np.exp(ls + lr), np.exp(lt + lr)
    return float(np.min(s**e.p * A + t**e.q * B))
