import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hwlab.grid import FOURIER, Field, from_function, l2_norm, make_grid, mixed_xy_norm
from hwlab.multipliers import project_band
from hwlab.norms import (
    BandBank,
    NormReport,
    RunningBandNorm,
    besov_recentered,
    dyadic_weight,
    dyadic_weight_leq,
    energy,
    mass,
    mixed_spacetime,
    sobolev_aniso,
    sobolev_components,
    time_norm,
    weighted_S,
    weighted_X,
    weighted_X_leq,
    y_norm,
)
from hwlab.trajectory import Trajectory

from conftest import random_field


def plane(g, mx, my):
    kx, ky = mx * 2 * np.pi / g.lx, my * g.d_eta
    return from_function(g, lambda X, Y: np.exp(1j * (kx * X + ky * Y))), kx, ky


def test_sobolev_of_plane_wave(small_grid):
    f, kx, ky = plane(small_grid, 2, 40)
    a, b = sobolev_components(f, 0.3)
    A = np.sqrt(small_grid.area)
    assert a == pytest.approx(A * (1 + ky**2) ** 0.15, rel=1e-12)
    assert b == pytest.approx(A * (1 + kx**2) ** 0.3, rel=1e-12)
    assert sobolev_aniso(f, 0.3, combine="max") == pytest.approx(max(a, b))
    with pytest.raises(ValueError):
        sobolev_aniso(f, 0.3, combine="median")


def test_mass_and_energy_of_plane_wave(small_grid):
    f, kx, ky = plane(small_grid, 1, 10)
    A = small_grid.area
    assert mass(f) == pytest.approx(A, rel=1e-13)
    assert energy(f, 2.0) == pytest.approx(0.5 * A * (kx**2 + ky) + 0.5 * A, rel=1e-12)


def test_time_norm_rules():
    t = np.linspace(-1, 1, 201)
    v = np.ones((201, 2))
    assert np.allclose(time_norm(v, t, 8), 2 ** (1 / 8))
    assert np.allclose(time_norm(v * 3, t, np.inf), 3)
    with pytest.raises(ValueError):
        time_norm(np.zeros((0, 2)), t[:0], 2)


def test_band_bank_partition(small_grid):
    f = random_field(small_grid, 1)
    bank = BandBank(small_grid)
    total = sum(bank.symbols)
    assert np.abs(total - 1).max() <= 1e-12
    direct = [l2_norm(project_band(f, M)) for M in bank.bands[:4]]
    assert np.allclose(bank.l2(f.fourier())[:4], direct, rtol=1e-12)


def test_band_bank_mixed_matches_direct(small_grid):
    f = random_field(small_grid, 2)
    bank = BandBank(small_grid, skip_rel=0.0)
    cx = np.fft.ifft(f.fourier(), axis=0, norm="forward")
    vals = bank.mixed(cx, 4, np.inf)
    direct = [mixed_xy_norm(project_band(f, M), 4, np.inf) for M in bank.bands[:4]]
    assert np.allclose(vals[:4], direct, rtol=1e-12)


def _constant_traj(f, T=0.1, n=5):
    ts = np.linspace(-T, T, 2 * n + 1)
    return Trajectory(f.grid, ts, np.repeat(f.fourier()[None], len(ts), axis=0), ts[1] - ts[0])


def test_weighted_norm_of_single_band(small_grid):
    f = project_band(random_field(small_grid, 3), 4)
    tr = _constant_traj(f)
    r = weighted_X(tr, 4, 1.0)
    assert r.band_breakdown[4] == pytest.approx(l2_norm(project_band(f, 4)), rel=1e-12)
    assert r.band_breakdown[8] == pytest.approx(2 * l2_norm(project_band(f, 8)), rel=1e-12)
    s = weighted_S(tr, 4, 1.0)
    assert s.interval == (-0.1, 0.1)
    assert s.value > 0
    with pytest.raises(ValueError):
        weighted_X(tr, 64, 1.0)


def test_leq_weight_is_flat_below(small_grid):
    M = np.array([1, 2, 4, 8, 16])
    assert np.array_equal(dyadic_weight_leq(4, M, 2), [1, 1, 1, 4, 16])
    assert np.array_equal(dyadic_weight(4, M, 1), [4, 2, 1, 2, 4])


def test_y_norm_sums_four_terms(small_grid):
    tr = _constant_traj(random_field(small_grid, 4), n=2)
    total = y_norm(tr, 4, 0.5, 0.1, 0.5, 1.0)
    assert total > weighted_X_leq(tr, 4, 1.0, 0.5).value


def test_besov_recentered_shift(small_grid):
    g = small_grid
    f = random_field(g, 5, band=3.0)
    shift = 102
    k = shift * g.d_eta
    shifted = Field(g, np.roll(f.fourier(), shift, axis=1), FOURIER)
    a = besov_recentered(_constant_traj(f, n=1), 0, 0.2, 0.5, 1.0, 8)
    b = besov_recentered(_constant_traj(shifted, n=1), k, 0.2, 0.5, 1.0, 8)
    assert b.value == pytest.approx(a.value, rel=1e-9)


def test_mixed_spacetime_constant_trajectory(small_grid):
    f = random_field(small_grid, 6)
    tr = _constant_traj(f)
    assert mixed_spacetime(tr, 2, 2, 2) == pytest.approx(np.sqrt(0.2) * l2_norm(f), rel=1e-12)


def test_norm_report_json_roundtrip(small_grid):
    r = weighted_X(_constant_traj(random_field(small_grid, 7), n=1), 4, 1.0)
    back = NormReport.from_dict(json.loads(r.to_json()))
    assert back.value == r.value and back.band_breakdown == r.band_breakdown


@given(st.integers(1, 30), st.sampled_from([8.0, np.inf]))
def test_running_norm_matches_batch(n, p):
    rng = np.random.default_rng(n)
    a = rng.random((n + 1, 3))
    b = rng.random((n + 1, 3))
    b[0] = a[0]
    run = RunningBandNorm(3, n, 0.1, p)
    for i in range(n + 1):
        run.push(i, a[i], b[i])
    times = np.arange(-n, n + 1) * 0.1
    vals = np.concatenate([b[:0:-1], a])
    assert np.allclose(run.value(n), time_norm(vals, times, p), rtol=1e-12)
    with pytest.raises(ValueError):
        run.push(n + 5, a[0], b[0])
