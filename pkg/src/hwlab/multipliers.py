"""Fourier multipliers acting in the y-frequency (and the free propagator).

Bumps
-----
``smoothstep(t)`` is the C-infinity transition 1/(1 + exp(1/t - 1/(1-t))) on
(0, 1), extended by 0 and 1.  It satisfies s(t) + s(1-t) = 1, which is what
makes the unit-scale translates of ``phi_unit`` sum exactly to one.

``phi_unit``  equals 1 on [-1/4, 1/4], vanishes outside (-3/4, 3/4).
``phi_lp``    equals 1 on [-1, 1], vanishes outside (-2, 2).
``psi_lp(x) = phi_lp(x) - phi_lp(2x)``, supported in 1/2 <= |x| <= 2.

Dyadic pieces: ``P_1`` has symbol ``phi_lp(eta)`` and ``P_M`` (M >= 2) has
symbol ``psi_lp(eta / M)``, so that P_1 + sum_{2 <= M <= N} P_M telescopes to
``phi_lp(eta / N)``.  Recentered pieces ``P_{M,k}`` shift eta by k.

Every public operator takes and returns a :class:`~hwlab.grid.Field`.  The
``*_symbol`` helpers return the raw arrays, broadcastable against Fourier
coefficients of shape (nx, ny), for the solvers that stay in coefficient
space.
"""

from __future__ import annotations

import numpy as np

from .grid import FOURIER, Field, Grid


def smoothstep(t):
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 1.0, 1.0, 0.0)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        ti = t[inside]
        with np.errstate(over="ignore"):
            out[inside] = 1.0 / (1.0 + np.exp(1.0 / ti - 1.0 / (1.0 - ti)))
    return out if out.ndim else float(out)


def phi_unit(eta):
    a = np.abs(np.asarray(eta, dtype=float))
    return smoothstep(2.0 * (0.75 - a))


def phi_lp(eta):
    a = np.abs(np.asarray(eta, dtype=float))
    return smoothstep(2.0 - a)


def psi_lp(x):
    x = np.asarray(x, dtype=float)
    return phi_lp(x) - phi_lp(2.0 * x)


def psi_fat(x):
    """Fattened band bump: 1 on 1/2 <= |x| <= 2, supported in 1/4 <= |x| <= 4."""
    x = np.asarray(x, dtype=float)
    return phi_lp(x / 2.0) - phi_lp(4.0 * x)


def dyadic_range(n_max: float) -> list[int]:
    """Dyadic integers 1, 2, 4, ... up to and including n_max."""
    out, m = [], 1
    while m <= n_max:
        out.append(m)
        m *= 2
    return out


def covering_bands(grid: Grid) -> list[int]:
    """Dyadic bands whose symbols sum to one on every lattice frequency.

    The last band M_top is the first dyadic with M_top >= eta_max, so
    phi_lp(eta / M_top) = 1 on the whole lattice.
    """
    top = 1
    while top < grid.eta_max:
        top *= 2
    return dyadic_range(top)


# -- symbols ---------------------------------------------------------------


def unit_symbol(eta: np.ndarray, k: float) -> np.ndarray:
    return phi_unit(eta - k)


def band_symbol(eta: np.ndarray, M: int, k: float = 0.0) -> np.ndarray:
    if M < 1:
        raise ValueError("band index must be >= 1")
    if M == 1:
        return phi_lp(eta - k)
    return psi_lp((eta - k) / M)


def below_symbol(eta: np.ndarray, N: float) -> np.ndarray:
    return phi_lp(eta / N)


def fattened_symbol(eta: np.ndarray, N: int) -> np.ndarray:
    if N == 1:
        return phi_lp(eta / 2.0)
    return psi_fat(eta / N)


def japanese_symbol(freq: np.ndarray, s: float) -> np.ndarray:
    return (1.0 + freq**2) ** (s / 2.0)


def homogeneous_symbol(freq: np.ndarray, s: float) -> np.ndarray:
    a = np.abs(freq)
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = a[nz] ** s
    return out


def flow_symbol(grid: Grid, t: float) -> np.ndarray:
    """e^{itA} with A = d_xx - |D_y|, as an (nx, ny) array."""
    return np.exp(-1j * t * (grid.xi[:, None] ** 2 + np.abs(grid.eta)[None, :]))


# -- operators on fields ---------------------------------------------------


def _apply(f: Field, symbol: np.ndarray) -> Field:
    return Field(f.grid, f.fourier() * symbol, FOURIER)


def _check_band(grid: Grid, reach: float, what: str) -> None:
    if reach > grid.eta_max + 1e-12:
        raise ValueError(f"{what} reaches |eta| = {reach:g} beyond eta_max = {grid.eta_max:g}")


def project_unit(f: Field, k: int) -> Field:
    _check_band(f.grid, abs(k) + 1, f"unit block k={k}")
    return _apply(f, unit_symbol(f.grid.eta, k))


def project_band(f: Field, M: int, k: int = 0) -> Field:
    _check_band(f.grid, abs(k) + (2 * M if M > 1 else 2), f"band (M={M}, k={k})")
    return _apply(f, band_symbol(f.grid.eta, M, k))


def project_dyadic(f: Field, N: int) -> Field:
    return project_band(f, N, 0)


def project_fattened(f: Field, N: int) -> Field:
    _check_band(f.grid, 4 * N if N > 1 else 4, f"fattened band N={N}")
    return _apply(f, fattened_symbol(f.grid.eta, N))


def project_below(f: Field, N: float) -> Field:
    return _apply(f, below_symbol(f.grid.eta, N))


def fractional_y(f: Field, s: float, homogeneous: bool = False) -> Field:
    """<D_y>^s, or |D_y|^s with the zero mode sent to 0 when homogeneous."""
    sym = homogeneous_symbol(f.grid.eta, s) if homogeneous else japanese_symbol(f.grid.eta, s)
    return _apply(f, sym[None, :])


def free_flow(f: Field, t: float) -> Field:
    return _apply(f, flow_symbol(f.grid, t))
