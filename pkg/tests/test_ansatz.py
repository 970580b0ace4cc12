import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hwlab.ansatz import (
    MODES,
    AnsatzParams,
    block_decomposition,
    classify,
    convergence_report,
    general_n_step,
    interaction_split,
    measure_localization,
    paraproduct,
    probabilistic_strichartz_stats,
    residual,
    run_ladder,
)
from hwlab.evolve import trilinear
from hwlab.grid import ifft2, make_grid
from hwlab.norms import BandBank
from hwlab.random_data import combine_blocks, decaying_datum, gaussians

from conftest import random_field

# a reduced ladder: two levels (8, 16) above N0 = 4, ten steps each way
SMALL = dict(N0=4, Nmax=16, T0=0.1, dt=0.01, save_every=2)


@pytest.fixture(scope="module")
def f0():
    return decaying_datum(make_grid(16, 2048, 10.0, 64.0), 0.48)


@pytest.fixture(scope="module")
def state(f0):
    return run_ladder(f0, AnsatzParams(**SMALL))


def test_params_defaults_are_admissible():
    p = AnsatzParams()
    assert p.sigma < p.sigma_p < p.s and p.Dp > 2 * p.D + p.s + p.sigma_p + p.nu
    assert p.levels() == [16, 32, 64]
    with pytest.raises(ValueError, match="sigma' < s"):
        AnsatzParams(s=0.1)
    with pytest.raises(ValueError, match="dyadic"):
        AnsatzParams(N0=6)


def test_grid_band_check(f0):
    with pytest.raises(ValueError, match="4 Nmax"):
        run_ladder(f0, AnsatzParams(**{**SMALL, "Nmax": 32}))


def test_telescoping_reconstruction(state):
    total = state.base.coeffs.copy()
    for N in sorted(state.levels):
        total += state.levels[N].F.coeffs + state.levels[N].w.coeffs
    assert np.abs(state.u_top().coeffs - total).max() <= 1e-12


def test_cutoffs_and_existence_time(state):
    assert all(lvl.cutoffs.all_one() for lvl in state.levels.values())
    assert not state.t_omega_flag and state.t_omega == pytest.approx(0.1)


def test_block_superposition(state):
    assert block_decomposition(state, 8)["residual"] <= 1e-9


def test_seed_surgery_leaves_lower_levels_identical(f0, state):
    other = run_ladder(f0, AnsatzParams(**SMALL), gauss_override={k: 5.0 - 2j for k in range(-15, 16) if abs(k) >= 8})
    assert np.array_equal(other.base.coeffs, state.base.coeffs)
    assert np.array_equal(other.levels[8].F.coeffs, state.levels[8].F.coeffs)
    assert np.array_equal(other.levels[8].w.coeffs, state.levels[8].w.coeffs)
    assert not np.array_equal(other.levels[16].F.coeffs, state.levels[16].F.coeffs)


def test_general_step_at_level_top_matches_level(state):
    u = general_n_step(state, 16)
    assert np.abs(u.coeffs - state.levels[16].u.coeffs).max() <= 1e-14
    with pytest.raises(ValueError):
        general_n_step(state, 40)


def test_partial_step_adds_one_pair_of_blocks(f0, state):
    u9 = general_n_step(state, 9)
    added = u9.coeffs[u9.i0] - state.levels[8].u.coeffs[u9.i0]
    expected = combine_blocks(f0, [-8, 8], gaussians(state.params.seed, [-8, 8])).fourier()
    assert np.abs(added - expected).max() <= 1e-15


def test_residual_is_second_order(f0):
    res = []
    for dt in (0.01, 0.005):
        st_ = run_ladder(f0, AnsatzParams(**{**SMALL, "dt": dt}))
        res.append(residual(st_.u_top(), 1.0).max())
    assert res[0] / res[1] == pytest.approx(4.0, abs=0.8)


def test_localization_and_convergence(state):
    rep = measure_localization(state, 16)
    assert rep.extras["off_band_fraction"] <= 1e-3
    rows = convergence_report(state, 0.48, state.params.sigma)
    assert [r["N"] for r in rows] == [8, 16] and all(r["diff"] > 0 for r in rows)


def test_empty_ladder(f0):
    st_ = run_ladder(f0, AnsatzParams(**{**SMALL, "Nmax": 4}))
    assert st_.levels == {} and convergence_report(st_, 0.48, 0.07) == []
    assert st_.u_top() is st_.base and st_.t_omega == pytest.approx(0.1)


def test_monte_carlo_needs_three_levels(f0):
    with pytest.raises(ValueError):
        probabilistic_strichartz_stats(f0, AnsatzParams(**SMALL), 2)


# -- paraproducts -----------------------------------------------------------------


def test_classify_examples():
    assert classify(64, 1, 2) == "hi_lo_lo"
    assert classify(1, 64, 2) == "lo_hi_lo"
    assert classify(1, 2, 64) == "lo_hi_lo"
    assert classify(1, 32, 64) == "lo_hi_hi"
    assert classify(32, 64, 1) == "hi_hi"
    assert classify(8, 8, 8) == "hi_hi"


@given(st.sampled_from([1, 2, 4, 8, 16, 32, 64]), st.sampled_from([1, 2, 4, 8, 16, 32, 64]),
       st.sampled_from([1, 2, 4, 8, 16, 32, 64]))
def test_classify_is_permutation_consistent(a, b, c):
    assert classify(a, b, c) == classify(a, c, b)


def test_paraproduct_matches_brute_force():
    g = make_grid(8, 512, 4.0, 64.0)
    bank = BandBank(g)
    cs = [random_field(g, i).fourier() for i in range(3)]
    out = paraproduct(*cs, bank)
    pieces = [[ifft2(c * s[None, :]) for s in bank.symbols] for c in cs]
    brute = {m: 0 for m in MODES}
    for a, b, c in itertools.product(range(len(bank)), repeat=3):
        mode = classify(bank.bands[a], bank.bands[b], bank.bands[c])
        brute[mode] = brute[mode] + trilinear(pieces[0][a], pieces[1][b], pieces[2][c])
    scale = np.abs(out["total"]).max()
    for m in MODES:
        assert np.abs(out[m] - brute[m]).max() <= 1e-12 * scale
    assert np.abs(sum(out[m] for m in MODES) - out["total"]).max() <= 1e-14 * scale


def test_interaction_split_modes(state):
    F = state.levels[16].F
    u = state.levels[8].u
    rep = interaction_split(F, u, u, "hi_lo_lo", 16, state.params.nu, state.params.sigma, 0.5, 1.0)
    assert rep.value > 0 and len(rep.extras["terms"]) == 4
    with pytest.raises(ValueError):
        interaction_split(F, u, u, "sideways", 16, 0.6, 0.1, 0.5, 1.0)
