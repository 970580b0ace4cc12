import numpy as np
import pytest
from hypothesis import given, strategies as st

from hwlab.evolve import (
    CutoffState,
    Flow,
    RemainderContext,
    cutoff_theta,
    duhamel,
    duhamel_trajectory,
    potential_kick,
    remainder_forcing,
    remainder_forcing_reference,
    solve_adapted_linear,
    solve_nls,
    solve_remainder,
    trilinear,
)
from hwlab.grid import FOURIER, Field, ifft2, make_grid
from hwlab.multipliers import free_flow
from hwlab.norms import energy, mass
from hwlab.trajectory import Trajectory

from conftest import random_field


@pytest.fixture(scope="module")
def grid():
    return make_grid(16, 128, 8.0, 16.0, unit_resolution=False)


def test_cutoff_theta():
    x = np.array([-3, -2, -1.5, -1, 0, 1, 1.5, 2, 3])
    th = cutoff_theta(x)
    assert np.array_equal(th, th[::-1])
    assert np.all(th[[0, 1, -2, -1]] == 0) and np.all(th[3:6] == 1)
    assert th[2] == pytest.approx(0.5)


def test_trilinear_symmetry():
    rng = np.random.default_rng(0)
    a, b, c = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    assert np.allclose(trilinear(a, b, c), trilinear(c, a, b))
    assert np.allclose(trilinear(a, a, a), 3 * np.abs(a) ** 2 * a)
    assert np.allclose(trilinear(a, b, b), 2 * np.abs(b) ** 2 * a + b**2 * np.conj(a))


def _arrays(seed, n=7):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((4, n)) + 1j * rng.standard_normal((4, n))


@given(st.integers(0, 10**6), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_forcing_matches_term_by_term_form(seed, tF, tw, tL):
    F, u, Pu, w = _arrays(seed)
    fast = remainder_forcing(F, u, Pu, w, tF, tw, tL)
    ref = remainder_forcing_reference(F, u, Pu, w, tF, tw, tL)
    assert np.abs(fast - ref).max() <= 1e-12 * max(1.0, np.abs(ref).max())


@given(st.integers(0, 10**6))
def test_forcing_identity_with_unit_cutoffs(seed):
    F, u, Pu, w = _arrays(seed)
    v = u + F + w
    expected = np.abs(v) ** 2 * v - np.abs(u) ** 2 * u - trilinear(F, Pu, Pu)
    assert np.abs(remainder_forcing(F, u, Pu, w, 1.0, 1.0, 1.0) - expected).max() <= 1e-12


@given(st.integers(0, 10**6), st.floats(-0.5, 0.5))
def test_potential_kick_solves_frozen_system(seed, h):
    F, phi, _, _ = _arrays(seed)
    mu = 0.7
    # compare with the matrix exponential of the real 2x2 system
    from scipy.linalg import expm

    for j in range(F.size):
        p, q = 2 * abs(phi[j]) ** 2, phi[j] ** 2
        M = mu * np.array([[-1j * p, -1j * q], [1j * np.conj(q), 1j * p]])
        ref = (expm(M * h) @ np.array([F[j], np.conj(F[j])]))[0]
        assert potential_kick(F[j : j + 1], phi[j : j + 1], mu, h)[0] == pytest.approx(ref, abs=1e-12)


def test_nls_conserves_mass_and_energy(grid):
    f0 = random_field(grid, 2, scale=0.5)
    tr = solve_nls(f0, 0.2, 1e-3, 1.0, save_every=50)
    m = [mass(tr.snapshot(i)) for i in range(len(tr))]
    assert max(abs(x - m[0]) for x in m) / m[0] <= 1e-12
    e = [energy(tr.snapshot(i), 1.0) for i in range(len(tr))]
    assert max(abs(x - e[0]) for x in e) / abs(e[0]) < 1e-4
    assert not tr.flags["blowup"]


def test_nls_energy_error_is_second_order(grid):
    f0 = random_field(grid, 3, scale=2.0)
    drift = []
    for dt in (4e-3, 2e-3):
        tr = solve_nls(f0, 0.4, dt, 1.0, save_every=round(0.4 / dt), dealias=False)
        e = [energy(tr.snapshot(i), 1.0) for i in range(len(tr))]
        drift.append(max(abs(x - e[tr.i0]) for x in e))
    assert drift[0] / drift[1] == pytest.approx(4.0, abs=0.8)


def test_nls_linear_limit_is_free_flow(grid):
    f0 = random_field(grid, 4)
    tr = solve_nls(f0, 0.1, 0.01, 0.0)
    assert np.abs(tr.coeffs[-1] - free_flow(f0, 0.1).fourier()).max() <= 1e-14


def test_nls_marks_blowup(grid):
    f0 = random_field(grid, 5, scale=50.0)
    tr = solve_nls(f0, 0.1, 0.01, 1.0, ceiling=1e-3)
    assert tr.flags["blowup"]


def test_adapted_linear_is_real_linear(grid):
    a, b = random_field(grid, 6), random_field(grid, 7)
    phi = random_field(grid, 8, scale=3.0)
    sol = lambda f: solve_adapted_linear(f, phi, 0.05, 0.01).coeffs
    combo = Field(grid, 2.0 * a.fourier() - 0.5 * b.fourier(), FOURIER)
    assert np.abs(sol(combo) - (2.0 * sol(a) - 0.5 * sol(b))).max() <= 1e-13
    # not complex linear: the potential couples F and conj(F)
    ia = Field(grid, 1j * a.fourier(), FOURIER)
    assert np.abs(sol(ia) - 1j * sol(a)).max() > 1e-6


def test_adapted_linear_second_order(grid):
    init = random_field(grid, 9)
    phi = random_field(grid, 10, scale=3.0)
    ends = [solve_adapted_linear(init, phi, 0.2, dt, save_every=round(0.2 / dt)).coeffs[-1]
            for dt in (0.01, 0.005, 0.0025)]
    ratio = np.abs(ends[0] - ends[1]).max() / np.abs(ends[1] - ends[2]).max()
    assert ratio == pytest.approx(4.0, abs=0.8)


def test_remainder_reproduces_nonlinear_correction(grid):
    # with u = 0 and F free, F + w solves the cubic equation
    f0 = random_field(grid, 11, scale=3.0)
    flow = Flow(grid)
    c0 = f0.fourier()
    zero = np.zeros(grid.shape, dtype=complex)
    ctx = RemainderContext(
        fields=lambda t: (ifft2(flow.apply(c0, t)), zero, zero),
        theta_F=np.ones(101), theta_Fw=np.ones(101), mu=1.0,
    )
    errs = []
    for dt in (0.004, 0.002):
        T = 0.2
        w = solve_remainder(ctx, grid, T, dt, save_every=round(T / dt))
        ref = solve_nls(f0, T, dt / 8, 1.0, dealias=False, save_every=round(8 * T / dt))
        free = flow.apply(c0, T)
        errs.append(np.abs(w.coeffs[-1] + free - ref.coeffs[-1]).max())
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=1.0)


def test_duhamel_exact_for_flowed_forcing(grid):
    c0 = random_field(grid, 12).fourier()
    flow = Flow(grid)
    ts = np.linspace(-0.3, 0.3, 13)
    forcing = Trajectory(grid, ts, np.array([flow.apply(c0, t) for t in ts]), 0.05)
    for t in (0.3, -0.17):
        assert np.abs(duhamel(forcing, t).fourier() - t * flow.apply(c0, t)).max() <= 1e-13
    full = duhamel_trajectory(forcing)
    for i, t in enumerate(ts):
        assert np.abs(full.coeffs[i] - t * flow.apply(c0, t)).max() <= 1e-13
    with pytest.raises(ValueError):
        duhamel(forcing, 0.5)


def test_cutoff_state():
    ts = np.arange(5) * 0.1
    one = np.ones(5)
    assert CutoffState(ts, one, one, one).all_one()
    dip = one.copy()
    dip[3] = 0.9
    assert CutoffState(ts, one, dip, one).frozen_after == pytest.approx(0.3)
