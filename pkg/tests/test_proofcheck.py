import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from helpers import smooth_field
from pqeig import (
    Exponents,
    FieldError,
    ParameterError,
    ProjectionError,
    ScalarField,
    balance_project,
    coupling,
    make_grid,
    random_field,
)
from pqeig.proofcheck import (
    concavity_suite,
    concavity_violation,
    four_normalization,
    jensen_gap,
    jensen_suite,
    midpoint_pair,
    path_energy_check,
)

E3 = Exponents(3, 3, 1.5, 1.5)


@pytest.fixture
def grid():
    return make_grid(1, 20, 1.0)


def test_midpoint_identity_and_constant(grid):
    u, v = random_field(grid, 1, True), random_field(grid, 2, True)
    w1, w2 = midpoint_pair(u, u, 3, v, v, 2)
    np.testing.assert_allclose(w1.values, u.values, rtol=1e-15)
    np.testing.assert_allclose(w2.values, v.values, rtol=1e-15)
    one = ScalarField(grid, np.ones(20))
    zero = ScalarField(grid, np.zeros(20))
    w1, _ = midpoint_pair(one, zero, 3, one, one, 2)
    np.testing.assert_allclose(w1.values, 0.5 ** (1 / 3), rtol=1e-15)


def test_midpoint_rejects(grid):
    u = random_field(grid, 1, True)
    with pytest.raises(ParameterError):
        midpoint_pair(u, u, 1.0, u, u, 2)
    with pytest.raises(FieldError):
        midpoint_pair(u.scaled(-1.0), u, 2, u, u, 2)


def test_jensen_equality_cases():
    x = np.array([0.3, -0.2, 0.9])
    assert abs(jensen_gap(0.4, 0.6, x, x, 3.0)) <= 1e-14
    assert abs(jensen_gap(0.4, 0.0, x, -x, 4.7)) <= 1e-14


vec3 = hnp.arrays(np.float64, 3, elements=st.floats(-1, 1))


@settings(max_examples=300)
@given(st.floats(0, 1), st.floats(1e-6, 1), vec3, vec3, st.sampled_from([1.5, 2.0, 3.0, 4.7]))
def test_jensen_nonnegative(a1, a2, x1, x2, p):
    scale = max(np.linalg.norm(x1) ** p, np.linalg.norm(x2) ** p, 1e-300)
    assert jensen_gap(a1, a2, x1, x2, p) >= -1e-14 * scale


def test_jensen_suite_small():
    assert jensen_suite(40_000, seed=3) >= -1e-14


def test_concavity_equality_cases(grid):
    u, v = random_field(grid, 1, True), random_field(grid, 2, True)
    assert concavity_violation(u, v, u, v, E3) <= 1e-15
    one = ScalarField(grid, np.ones(20))
    assert concavity_violation(one, one, one, one, E3) == pytest.approx(0.0, abs=1e-16)
    with pytest.raises(FieldError):
        concavity_violation(u.scaled(-1.0), v, u, v, E3)


@settings(max_examples=200)
@given(
    hnp.arrays(np.float64, 4, elements=st.floats(1e-6, 1)),
    st.sampled_from([E3, Exponents(2, 3, 1, 1.5), Exponents(1.5, 3, 0.75, 1.5)]),
)
def test_concavity_pointwise(quad, e):
    assert concavity_violation(*quad[:, None], e) <= 1e-12


@pytest.mark.parametrize("e", [E3, Exponents(2, 3, 1, 1.5)])
def test_concavity_suite(e):
    assert concavity_suite(10_000, e, seed=1) <= 1e-12


def _on_c(u, v, e):
    return balance_project(u, v, e)[:2]


def test_path_identical_pairs(grid):
    u, v = _on_c(random_field(grid, 1, True), random_field(grid, 2, True), E3)
    r = path_energy_check(u, v, u, v, E3)
    assert r.delta == pytest.approx(0.0, abs=1e-12)
    assert r.surplus == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("e", [E3, Exponents(2, 3, 1, 1.5), Exponents(1.5, 3, 0.75, 1.5)])
def test_path_proportional_pairs(grid, e):
    u, v = _on_c(random_field(grid, 1, True), random_field(grid, 2, True), e)
    phi, psi = _on_c(u.scaled(2.0), v.scaled(3.0), e)
    assert abs(path_energy_check(u, v, phi, psi, e).delta) <= 1e-10


def test_path_precondition(grid):
    u, v = random_field(grid, 1, True), random_field(grid, 2, True)
    with pytest.raises(ProjectionError):
        path_energy_check(u, v, u, v, E3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([E3, Exponents(2, 3, 1, 1.5), Exponents(1.5, 1.5, 0.75, 0.75)]))
def test_path_energy_never_increases_in_1d(seed, e):
    # in 1D the p-mean path obeys the discrete bound exactly (reverse triangle inequality)
    rng = np.random.default_rng(seed)
    g = make_grid(1, 30, 1.0)
    u, v = _on_c(smooth_field(g, rng, True), smooth_field(g, rng, True), e)
    phi, psi = _on_c(smooth_field(g, rng, True), smooth_field(g, rng, True), e)
    r = path_energy_check(u, v, phi, psi, e)
    assert r.delta >= -1e-12 * r.energy_mean
    assert r.surplus >= -1e-12


def test_path_strict_for_different_pairs():
    deltas = []
    for n in (50, 100, 200):
        g = make_grid(1, n, 1.0)
        u = g.coordinates()[0]
        a, b = _on_c(ScalarField(g, np.sin(np.pi * u)), ScalarField(g, u * (1 - u)), E3)
        c, d = _on_c(ScalarField(g, u * (1 - u) * (1 + u)), ScalarField(g, np.sin(np.pi * u) ** 2), E3)
        deltas.append(path_energy_check(a, b, c, d, E3).delta)
    assert min(deltas) > 0
    assert (max(deltas) - min(deltas)) / max(deltas) < 0.05


def test_four_normalization_identity(grid):
    u, v = random_field(grid, 1, True), random_field(grid, 2, True)
    scales, defect = four_normalization(u, v, u, v, E3)
    assert defect == pytest.approx(0.0, abs=1e-14)
    # alpha = beta makes all four scales coincide
    np.testing.assert_allclose(scales, scales[0], rtol=1e-12)
    scales, _ = four_normalization(u, v, u, v, Exponents(2, 3, 1, 1.5))
    assert scales[0] == pytest.approx(scales[2], rel=1e-12)
    assert scales[1] == pytest.approx(scales[3], rel=1e-12)


def _mixed(f, g, e):
    return float(np.sum(f.values**e.alpha * g.values**e.beta) * f.grid.cell_volume)


def test_four_normalization_proportional(grid):
    u, v = random_field(grid, 1, True), random_field(grid, 2, True)
    e = Exponents(2, 3, 1, 1.5)
    scales, defect = four_normalization(u, v, u.scaled(2.0), v.scaled(3.0), e)
    assert defect < 1e-13
    su, sv, sphi, spsi = scales
    for f, g in ((u.scaled(su), v.scaled(sv)), (u.scaled(su), v.scaled(3 * spsi)),
                 (u.scaled(2 * sphi), v.scaled(sv)), (u.scaled(2 * sphi), v.scaled(3 * spsi))):
        assert _mixed(f, g, e) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_four_normalization_defect_is_residual(grid, seed):
    e = Exponents(2, 3, 1, 1.5)
    u, v = random_field(grid, seed, True), random_field(grid, seed + 1, True)
    phi, psi = random_field(grid, seed + 2, True), random_field(grid, seed + 3, True)
    scales, defect = four_normalization(u, v, phi, psi, e)
    assert defect > 0
    x = np.log(scales)
    resid = [
        e.alpha * x[0] + e.beta * x[1] + np.log(_mixed(u, v, e)),
        e.alpha * x[0] + e.beta * x[3] + np.log(_mixed(u, psi, e)),
        e.alpha * x[2] + e.beta * x[1] + np.log(_mixed(phi, v, e)),
        e.alpha * x[2] + e.beta * x[3] + np.log(_mixed(phi, psi, e)),
    ]
    assert np.linalg.norm(resid) == pytest.approx(defect / 2, rel=1e-10)
    np.testing.assert_allclose(np.abs(resid), defect / 4, rtol=1e-9)


def test_four_normalization_rejects_zero(grid):
    u = random_field(grid, 1, True)
    z = ScalarField(grid, np.zeros(20))
    with pytest.raises(FieldError):
        four_normalization(u, z, u, u, E3)
