import math

import numpy as np
import pytest
from scipy import integrate

from hwlab.grid import l2_norm, make_grid
from hwlab.illposedness import (
    InflationSchedule,
    Mollifier,
    ProfileBuilder,
    bump,
    fractional_constant,
    geometric_schedule,
    hardy_translation_defect,
    inflation_grid,
    k_rho,
    k_rho_field,
    k_rho_line,
    k_rho_sobolev,
    loglog_slope,
    negative_frequency_fraction,
    ode_profile,
    ode_residual,
    tail_norms,
    tanghuru_build,
)


def test_k_rho_periodization_converges():
    y = np.linspace(-3, 3, 13)
    assert np.abs(k_rho(y, 0.1, 1e6) - k_rho(y, 0.1)).max() < 1e-5


def test_k_rho_is_one_sided():
    f = k_rho_line(0.2, 64.0, 4096)
    assert negative_frequency_fraction(f) < 1e-25


def test_k_rho_resolution_guard():
    with pytest.raises(ValueError, match="under-resolved"):
        k_rho_line(0.05, 256.0, 4096)
    with pytest.raises(ValueError, match="Gaussian"):
        k_rho_field(make_grid(8, 4096, 6.0, 64.0, unit_resolution=False), 0.2)


def test_hardy_translation_small_line():
    assert hardy_translation_defect(0.2, [0.5, 3.0, 17.0], 64.0, 4096) <= 1e-8


def test_fractional_constant_against_quadrature():
    for s in (0.3, 0.6):
        f = lambda u: (2 - 2 * math.cos(u)) * u ** (-1 - s)
        val = 2 * integrate.quad(f, 0, 50, limit=500)[0] + 2 * integrate.quad(lambda u: 2 * u ** (-1 - s), 50, np.inf)[0]
        # the tail uses the mean of 2 - 2cos; its oscillating part is O(50^{-1-s})
        assert val == pytest.approx(fractional_constant(s), rel=2e-3)
    assert fractional_constant(1.0) == pytest.approx(2 * math.pi)


def test_sobolev_routes_agree_at_one_radius():
    a = k_rho_sobolev(0.2, 0.5, "spectral")
    b = k_rho_sobolev(0.2, 0.5, "integral")
    assert a == pytest.approx(b, rel=3e-3)
    with pytest.raises(ValueError):
        k_rho_sobolev(0.2, 1.5)


def test_loglog_slope():
    x = np.array([1.0, 2.0, 4.0])
    assert loglog_slope(x, 3 * x**-1.5) == pytest.approx(-1.5)


def test_bump_and_mollifier():
    assert bump(np.array([0.0]))[0] == 1.0 and bump(np.array([1.0, 2.0])).max() == 0.0
    m = Mollifier()
    assert m.scaled_mass(0.05) == pytest.approx(1.0, abs=1e-12)
    assert m.hat(np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-13)
    assert np.all(np.diff(m.hat(np.linspace(0, 200, 50))) < 1e-12)


def test_mollifier_hat_matches_cartesian_transform():
    m = Mollifier(radius=1.0)
    x = np.linspace(-1, 1, 801)
    vals = m(x[:, None], x[None, :])
    for k in (0.5, 3.0):
        direct = integrate.trapezoid(integrate.trapezoid(vals * np.cos(k * x)[:, None], x, axis=1), x)
        assert m.hat(np.array([k]))[0] == pytest.approx(direct, abs=1e-7)


def test_ode_profile_is_phase_rotation():
    g = inflation_grid(4, 0.1, 64, 64)
    v0 = ProfileBuilder().profile(g, 4, 2.0)
    vt = ode_profile(v0, 0.3)
    assert np.allclose(np.abs(vt.physical()), np.abs(v0.physical()))
    assert l2_norm(vt) == pytest.approx(l2_norm(v0), rel=1e-13)
    assert ode_residual(np.linspace(0, 10, 101)) <= 1e-15


def test_schedule_rules():
    sch = InflationSchedule()
    for n in sch.ns:
        assert sch.driver(n) == pytest.approx(math.log(n) ** (2 * (sch.beta - sch.gamma)))
        assert sch.eps(n) == 1 / (100 * n)
    with pytest.raises(ValueError):
        InflationSchedule(gamma=0.95, beta=0.9)
    with pytest.raises(ValueError):
        InflationSchedule(ns=(1.0, 4.0))


def test_geometric_schedule():
    assert geometric_schedule(1, 3) == [4.0, 8.0, 16.0]
    assert geometric_schedule(2, 2) == [8.0, 16.0]


@pytest.fixture(scope="module")
def bubble_grid():
    return make_grid(512, 1024, 4.0, 2.0, unit_resolution=False)


def test_tanghuru_disjoint_supports(bubble_grid):
    data = tanghuru_build(bubble_grid, 1, 3, [-0.6, 0.0, 0.5])
    total = l2_norm(data.field) ** 2
    parts = sum(l2_norm(ProfileBuilder().profile(bubble_grid, b.n, b.amplitude, b.center)) ** 2 for b in data.bubbles)
    assert total == pytest.approx(parts, rel=1e-12)
    assert np.all(data.separations[np.triu_indices(3, 1)] > 0)
    norms = tail_norms(data, 1)
    assert len(norms) == 3 and norms[0] > norms[1] > norms[2]


def test_tanghuru_rejects_overlap_and_bad_counts(bubble_grid):
    with pytest.raises(ValueError, match="overlap"):
        tanghuru_build(bubble_grid, 1, 2, [0.0, 0.01])
    with pytest.raises(ValueError):
        tanghuru_build(bubble_grid, 1, 4, [0, 0.3, 0.6, 0.9])
    with pytest.raises(ValueError):
        tanghuru_build(bubble_grid, 1, 2, [0.0])


def test_single_bubble_is_the_profile(bubble_grid):
    data = tanghuru_build(bubble_grid, 2, 1, [(0.3, 0.2)])
    b = data.bubbles[0]
    ref = ProfileBuilder().profile(bubble_grid, 8.0, b.amplitude, (0.3, 0.2))
    assert np.array_equal(data.field.physical(), ref.physical())
