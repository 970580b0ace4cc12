import numpy as np
import pytest
from hypothesis import given, strategies as st

from hwlab.grid import l2_norm, make_grid
from hwlab.multipliers import dyadic_range
from hwlab.random_data import (
    RandomSpec,
    block_correlations,
    block_indices,
    block_norm_samples,
    combine_blocks,
    decaying_datum,
    gaussian,
    gaussians,
    khintchine_csv,
    khintchine_stats,
    leq_indices,
    quadratic_norms,
    random_block,
    randomize,
    seed_gaussians,
    truncate_leq,
    unit_gram,
)


@pytest.fixture(scope="module")
def datum(small_grid):
    return decaying_datum(small_grid, 0.48)


def test_gaussian_depends_only_on_seed_and_k():
    a = gaussians(7, [3, -2, 5])
    b = gaussians(7, [5, 3])
    assert a[0] == b[1] and a[2] == b[0]
    assert gaussian(7, 3) != gaussian(8, 3)
    assert gaussian(7, 3) != gaussian(7, -3)


def test_gaussian_moments():
    g = seed_gaussians(range(4000), [0, 1])
    assert np.mean(np.abs(g) ** 2) == pytest.approx(1.0, abs=0.05)
    assert abs(np.mean(g)) < 0.05
    assert abs(np.mean(g[:, 0] * np.conj(g[:, 1]))) < 0.05


def test_block_indices_are_half_open():
    assert list(block_indices(1)) == [0]
    assert list(block_indices(2)) == [-1, 1]
    assert list(block_indices(8)) == [-7, -6, -5, -4, 4, 5, 6, 7]
    assert list(leq_indices(3)) == [-2, -1, 0, 1, 2]


@given(st.sampled_from([1, 2, 4, 8, 16]))
def test_blocks_tile_the_truncation(N):
    covered = np.sort(np.concatenate([block_indices(M) for M in dyadic_range(N)]))
    assert np.array_equal(covered, leq_indices(N))


def test_block_sum_equals_truncation(datum):
    spec = RandomSpec(3)
    total = sum(random_block(datum, spec, M).fourier() for M in dyadic_range(16))
    assert np.abs(total - truncate_leq(datum, spec, 16).fourier()).max() <= 1e-15


def test_randomize_range_check(datum):
    with pytest.raises(ValueError, match="band"):
        randomize(datum, RandomSpec(0, -64, 64))


def test_randomize_is_linear_in_gaussians(datum):
    ks = np.arange(-4, 5)
    g1, g2 = gaussians(1, ks), gaussians(2, ks)
    lhs = combine_blocks(datum, ks, g1 + 2j * g2).fourier()
    rhs = combine_blocks(datum, ks, g1).fourier() + 2j * combine_blocks(datum, ks, g2).fourier()
    assert np.abs(lhs - rhs).max() <= 1e-15


def test_gram_reproduces_norms(datum):
    ks = block_indices(8)
    gs = seed_gaussians([0, 1, 2], ks)
    q = quadratic_norms(unit_gram(datum, ks), gs)
    direct = [l2_norm(combine_blocks(datum, ks, g)) for g in gs]
    assert np.allclose(q, direct, rtol=1e-12)


def test_decaying_datum_shape(small_grid, datum):
    assert l2_norm(datum) == pytest.approx(0.1, rel=1e-13)
    u = datum.physical()
    assert np.abs(u.imag).max() < 1e-15
    j = np.unravel_index(np.argmax(np.abs(u)), u.shape)
    assert abs(small_grid.y[j[1]]) < small_grid.dy and abs(small_grid.x[j[0]]) < small_grid.dx


def test_khintchine_second_moment_is_exact_for_unit_vector():
    r = khintchine_stats([1.0], 2, 20000, 0)
    assert r.ratio == pytest.approx(1.0, abs=0.02)


def test_khintchine_degenerate_and_csv():
    r = khintchine_stats(np.zeros(4), 4, 10, 0)
    assert r.degenerate and r.ratio == 0.0
    text = khintchine_csv([khintchine_stats(np.ones(4), 4, 1000, 5)])
    assert text.splitlines()[0] == "p,samples,ratio,stderr,seed"


def test_khintchine_reproducible():
    assert khintchine_stats(np.ones(8), 4, 5000, 11) == khintchine_stats(np.ones(8), 4, 5000, 11)


def test_block_correlations_small_ensemble(datum):
    samples = block_norm_samples(datum, [2, 4, 8], range(300))
    C = block_correlations(samples)
    assert C.shape == (3, 3) and np.allclose(np.diag(C), 1.0)
    assert np.abs(C - np.eye(3)).max() < 0.2
