import numpy as np
import pytest
from hypothesis import settings

from hwlab.grid import FOURIER, Field, make_grid

settings.register_profile("hwlab", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("hwlab")


@pytest.fixture(scope="session")
def small_grid():
    # eta_max = 25, unit resolution d_eta = 0.098
    return make_grid(16, 512, 10.0, 64.0)


def random_field(grid, seed=0, scale=1.0, band=None):
    """Smooth random field: Gaussian coefficients damped at high frequency."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    damp = np.exp(-0.5 * (grid.xi[:, None] / 3.0) ** 2 - 0.5 * (grid.eta[None, :] / 8.0) ** 2)
    if band is not None:
        damp = damp * (np.abs(grid.eta) <= band)[None, :]
    return Field(grid, scale * c * damp / np.sqrt(grid.area * np.sum(np.abs(c * damp) ** 2)), FOURIER)


# -- acceptance report -------------------------------------------------------

# criterion number -> list of (part, ok, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, part: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        body = "; ".join(f"{p}: {d} [{'ok' if ok else 'FAIL'}]" for p, ok, d in parts)
        tr.write_line(f"criterion {c:2d} {verdict}  {body}")
