import numpy as np
import pytest

from hwlab.evolve import Flow
from hwlab.grid import make_grid
from hwlab.trajectory import Trajectory

from conftest import random_field


@pytest.fixture()
def free_traj():
    g = make_grid(8, 64, 4.0, 64.0)
    c0 = random_field(g, 1).fourier()
    flow = Flow(g)
    ts = np.linspace(-0.2, 0.2, 9)
    return Trajectory(g, ts, np.array([flow.apply(c0, t) for t in ts]), 0.05), c0, flow


def test_interpolation_exact_for_free_flow(free_traj):
    tr, c0, flow = free_traj
    for t in (0.013, -0.137, 0.2):
        assert np.abs(tr.coeffs_at(t) - flow.apply(c0, t)).max() <= 1e-14
    with pytest.raises(ValueError):
        tr.coeffs_at(0.3)


def test_index_and_restrict(free_traj):
    tr, _, _ = free_traj
    assert tr.index(0.05) == 5 and tr.i0 == 4 and tr.T == pytest.approx(0.2)
    with pytest.raises(KeyError):
        tr.index(0.051)
    r = tr.restrict(0.1)
    assert len(r) == 5 and r.T == pytest.approx(0.1)


def test_arithmetic_requires_alignment(free_traj):
    tr, _, _ = free_traj
    assert np.abs((tr + tr.scaled(-1)).coeffs).max() == 0
    with pytest.raises(ValueError):
        tr + tr.restrict(0.1)
    with pytest.raises(ValueError):
        Trajectory(tr.grid, tr.times[::-1], tr.coeffs, tr.dt)


def test_export_load_roundtrip(tmp_path, free_traj):
    tr, _, _ = free_traj
    tr.flags["blowup"] = np.bool_(False)
    tr.export(tmp_path / "t")
    back = Trajectory.load(tmp_path / "t")
    assert np.array_equal(back.times, tr.times)
    assert np.abs(back.coeffs - tr.coeffs).max() <= 1e-15
    assert back.flags == {"blowup": False}
