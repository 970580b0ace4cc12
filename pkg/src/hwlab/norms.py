"""Norm functionals: anisotropic Sobolev, conserved quantities, mixed
space-time Lebesgue norms, and the dyadic weighted norms of the ladder.

Weighted norms are sums over dyadic y-bands M of ``weight(M) * ||P_M u||``
with an inner norm that is either L^inf_t L^2_{x,y} ("X" type) or
L^8_t L^4_x L^r_y ("S" type).  The dyadic sum runs over the bands returned by
:func:`hwlab.multipliers.covering_bands`, which tile every lattice frequency;
nothing beyond the Nyquist band exists on the grid, so the truncation is exact
for grid fields.

Time integrals use the trapezoid rule over the snapshot times; L^inf_t is the
maximum over snapshots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid, _mixed, ifft2, ifft_x, ifft_y
from .multipliers import band_symbol, covering_bands, homogeneous_symbol, japanese_symbol


@dataclass
class BandTerm:
    M: int
    weight: float
    contribution: float


@dataclass
class NormReport:
    label: str
    value: float
    interval: tuple[float, float]
    bands: list[BandTerm] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def band_breakdown(self) -> dict[int, float]:
        return {b.M: b.contribution for b in self.bands}

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "value": self.value,
            "interval": list(self.interval),
            "bands": [{"M": b.M, "weight": b.weight, "contribution": b.contribution} for b in self.bands],
        }
        if self.extras:
            d["extras"] = self.extras
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "NormReport":
        bands = [BandTerm(int(b["M"]), float(b["weight"]), float(b["contribution"])) for b in d["bands"]]
        return cls(d["label"], float(d["value"]), tuple(d["interval"]), bands, d.get("extras", {}))


# -- single-time functionals ----------------------------------------------


def sobolev_components(f: Field, s: float, homogeneous: bool = False) -> tuple[float, float]:
    """(||u||_{L^2_x H^s_y}, ||u||_{H^{2s}_x L^2_y})."""
    g = f.grid
    p = np.abs(f.fourier()) ** 2
    sym = homogeneous_symbol if homogeneous else japanese_symbol
    wy = sym(g.eta, s) ** 2
    wx = sym(g.xi, 2 * s) ** 2
    y_part = np.sqrt(g.area * np.sum(p.sum(axis=0) * wy))
    x_part = np.sqrt(g.area * np.sum(p.sum(axis=1) * wx))
    return float(y_part), float(x_part)


def sobolev_aniso(f: Field, s: float, homogeneous: bool = False, combine: str = "sum") -> float:
    """Norm of the intersection L^2_x H^s_y with H^{2s}_x L^2_y.

    ``combine='sum'`` adds the two components, ``'max'`` takes the larger one;
    the two choices are equivalent within a factor 2.
    """
    a, b = sobolev_components(f, s, homogeneous)
    if combine == "sum":
        return a + b
    if combine == "max":
        return max(a, b)
    raise ValueError(f"unknown combine rule {combine!r}")


def mass(f: Field) -> float:
    g = f.grid
    return float(g.area * np.sum(np.abs(f.fourier()) ** 2))


def energy(f: Field, mu: float) -> float:
    """1/2 (||d_x u||^2 + || |D_y|^{1/2} u||^2) + mu/4 ||u||_{L^4}^4."""
    g = f.grid
    c = f.fourier()
    sym = g.xi[:, None] ** 2 + np.abs(g.eta)[None, :]
    kinetic = 0.5 * g.area * np.sum(sym * np.abs(c) ** 2)
    u = f.physical()
    return float(kinetic + 0.25 * mu * g.cell * np.sum(np.abs(u) ** 4))


# -- time norms ------------------------------------------------------------


def time_norm(values: np.ndarray, times: np.ndarray, p: float) -> np.ndarray:
    """L^p over time of ``values`` (time along axis 0) by the trapezoid rule."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] == 0:
        raise ValueError("empty time series")
    if np.isinf(p):
        return values.max(axis=0)
    if values.shape[0] == 1:
        return np.zeros(values.shape[1:])
    w = np.zeros(len(times))
    dt = np.diff(times)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return np.tensordot(w, values**p, axes=(0, 0)) ** (1.0 / p)


def _window(traj, T):
    if T is None:
        return traj
    return traj.restrict(T)


def mixed_spacetime(traj, p: float, q: float, r: float, sigma_y: float = 0.0, T: float | None = None) -> float:
    """||<D_y>^sigma u||_{L^p_t L^q_x L^r_y} over the trajectory (or [-T, T])."""
    tr = _window(traj, T)
    if len(tr) == 0:
        raise ValueError("empty trajectory")
    wy = japanese_symbol(tr.grid.eta, sigma_y)[None, :]
    vals = np.array([_mixed(np.abs(ifft2(c * wy)), tr.grid, q, r) for c in tr.coeffs])
    return float(time_norm(vals, tr.times, p))


def sup_sobolev(traj, s: float, T: float | None = None) -> float:
    tr = _window(traj, T)
    return max(sobolev_aniso(tr.snapshot(i), s) for i in range(len(tr)))


def xs_sigma_norm(traj, s: float, sigma: float, T: float | None = None) -> float:
    """max(sup_t ||u||_{H^s}, ||<D_y>^sigma u||_{L^8_t L^4_x L^inf_y})."""
    return max(sup_sobolev(traj, s, T), mixed_spacetime(traj, 8, 4, np.inf, sigma, T))


# -- dyadic band machinery -------------------------------------------------


class BandBank:
    """Dyadic band symbols P_{M,k} for a grid, with per-band spatial norms.

    ``l2`` works from Fourier coefficients only; ``mixed`` needs one inverse
    y-transform per band.  Bands whose l^1 coefficient bound is below
    ``skip_rel`` times the largest weighted bound are reported as exact zeros;
    this only drops contributions at the roundoff level.
    """

    def __init__(self, grid: Grid, bands: list[int] | None = None, k: float = 0.0, skip_rel: float = 1e-15):
        self.grid = grid
        self.k = k
        if bands is None:
            bands = covering_bands(grid)
            top = bands[-1]
            while top < grid.eta_max + abs(k):
                top *= 2
                bands.append(top)
        self.bands = list(bands)
        self.symbols = np.array([band_symbol(grid.eta, M, k) for M in self.bands])
        self.skip_rel = skip_rel

    def __len__(self) -> int:
        return len(self.bands)

    def l2(self, coef: np.ndarray, wy: np.ndarray | None = None) -> np.ndarray:
        p = np.sum(np.abs(coef) ** 2, axis=0)
        if wy is not None:
            p = p * wy**2
        return np.sqrt(self.grid.area * (self.symbols**2 @ p))

    def mixed(self, coef_x: np.ndarray, q: float, r: float, wy: np.ndarray | None = None,
              importance: np.ndarray | None = None) -> np.ndarray:
        """L^q_x L^r_y of each band; ``coef_x`` is physical in x, Fourier in y."""
        g = self.grid
        c = coef_x if wy is None else coef_x * wy[None, :]
        a = np.abs(c)
        l1 = a @ self.symbols.T  # (nx, nb): pointwise bound on |P_M u|
        if np.isinf(q):
            ub = l1.max(axis=0)
        else:
            ub = (g.dx * np.sum(l1**q, axis=0)) ** (1.0 / q)
        if not np.isinf(r):
            ub = ub * g.ly ** (1.0 / r)
        imp = np.ones(len(self)) if importance is None else importance
        cut = self.skip_rel * np.max(ub * imp, initial=0.0)
        out = np.zeros(len(self))
        for m in range(len(self)):
            if ub[m] * imp[m] <= cut or ub[m] == 0.0:
                continue
            u = ifft_y(c * self.symbols[m][None, :])
            out[m] = _mixed(np.abs(u), g, q, r)
        return out


def dyadic_weight(N: float, M: np.ndarray, D: float) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return np.maximum(N / M, M / N) ** D


def dyadic_weight_leq(N: float, M: np.ndarray, D: float) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return np.maximum(1.0, M / N) ** D


def besov_weight(M: np.ndarray, rho: float, gamma: float, D: float, N: float) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return M**rho * np.maximum(1.0, M / N**gamma) ** D


def band_series(traj, bank: BandBank, kind: str, sigma: float = 0.0, r: float = np.inf) -> np.ndarray:
    """Per-snapshot, per-band spatial norms, shape (nt, nbands)."""
    wy = japanese_symbol(traj.grid.eta, sigma) if sigma else None
    if kind == "X":
        return np.array([bank.l2(c, wy) for c in traj.coeffs])
    if kind == "S":
        return np.array([bank.mixed(ifft_x(c), 4, r, wy) for c in traj.coeffs])
    raise ValueError(f"unknown inner norm {kind!r}")


def _report(label, weights, band_norms, bands, T) -> NormReport:
    contrib = weights * band_norms
    terms = [BandTerm(int(M), float(w), float(c)) for M, w, c in zip(bands, weights, contrib)]
    return NormReport(label, float(np.sum(contrib)), (-T, T), terms)


def _check_N(grid: Grid, N: float) -> None:
    if N > grid.eta_max:
        raise ValueError(f"N={N} lies beyond eta_max={grid.eta_max:g}")


def _weighted(traj, N, D, kind, leq, sigma, r, T, label) -> NormReport:
    _check_N(traj.grid, N)
    tr = _window(traj, T)
    bank = BandBank(tr.grid)
    vals = band_series(tr, bank, kind, sigma, r)
    p = np.inf if kind == "X" else 8
    band_norms = time_norm(vals, tr.times, p)
    w = (dyadic_weight_leq if leq else dyadic_weight)(N, np.array(bank.bands), D)
    return _report(label, w, band_norms, bank.bands, tr.T)


def weighted_X(traj, N: int, D: float, sigma: float = 0.0, T: float | None = None) -> NormReport:
    return _weighted(traj, N, D, "X", False, sigma, np.inf, T, f"X_{{{N},{D}}}")


def weighted_X_leq(traj, N: int, D: float, sigma: float = 0.0, T: float | None = None) -> NormReport:
    return _weighted(traj, N, D, "X", True, sigma, np.inf, T, f"X_{{<={N},{D}}}")


def weighted_S(traj, N: int, D: float, r: float = np.inf, sigma: float = 0.0, T: float | None = None) -> NormReport:
    return _weighted(traj, N, D, "S", False, sigma, r, T, f"S^{r}_{{{N},{D}}}")


def weighted_S_leq(traj, N: int, D: float, r: float = np.inf, sigma: float = 0.0,
                   T: float | None = None) -> NormReport:
    return _weighted(traj, N, D, "S", True, sigma, r, T, f"S^{r}_{{<={N},{D}}}")


def besov_recentered(traj, k: int, rho: float, gamma: float, D: float, N: int,
                     T: float | None = None) -> NormReport:
    """sum_M M^rho max(1, M/N^gamma)^D ||P_{M,k} u||_{L^inf_t L^2}."""
    tr = _window(traj, T)
    bank = BandBank(tr.grid, k=k)
    band_norms = time_norm(band_series(tr, bank, "X"), tr.times, np.inf)
    w = besov_weight(np.array(bank.bands), rho, gamma, D, N)
    return _report(f"B^{{{rho},{gamma}}}_{{{k},{D}}}", w, band_norms, bank.bands, tr.T)


def y_norm_terms(traj, N: int, nu: float, sigma: float, alpha: float, D: float,
                 T: float | None = None) -> list[NormReport]:
    return [
        weighted_X(traj, N, alpha, nu, T),
        weighted_X_leq(traj, N, D, nu, T),
        weighted_S(traj, N, alpha, np.inf, sigma, T),
        weighted_S_leq(traj, N, D, np.inf, sigma, T),
    ]


def y_norm(traj, N: int, nu: float, sigma: float, alpha: float, D: float, T: float | None = None) -> float:
    """||<D>^nu w||_{X_{N,alpha}} + ||<D>^nu w||_{X_{<=N,D}}
    + ||<D>^sigma w||_{S_{N,alpha}} + ||<D>^sigma w||_{S_{<=N,D}}."""
    return float(sum(r.value for r in y_norm_terms(traj, N, nu, sigma, alpha, D, T)))


class RunningBandNorm:
    """Per-band time norms over [-t_n, t_n], grown one step at a time.

    Values at +t_n and -t_n are pushed together, so every partial norm only
    uses already-computed samples.  ``p = inf`` keeps running maxima;
    finite ``p`` keeps trapezoid partial sums of ``|a|^p``.
    """

    def __init__(self, nbands: int, nsteps: int, dt: float, p: float):
        self.p = p
        self.dt = dt
        self.plus = np.zeros((nsteps + 1, nbands))
        self.minus = np.zeros((nsteps + 1, nbands))
        self.acc = np.zeros((nsteps + 1, nbands))
        self.n = -1

    def push(self, n: int, a_plus: np.ndarray, a_minus: np.ndarray) -> None:
        if n != self.n + 1:
            raise ValueError("samples must be pushed in order")
        self.plus[n], self.minus[n] = a_plus, a_minus
        if np.isinf(self.p):
            cur = np.maximum(a_plus, a_minus)
            self.acc[n] = cur if n == 0 else np.maximum(self.acc[n - 1], cur)
        elif n == 0:
            self.acc[0] = 0.0
        else:
            p = self.p
            inc = 0.5 * self.dt * (self.plus[n - 1] ** p + a_plus**p + self.minus[n - 1] ** p + a_minus**p)
            self.acc[n] = self.acc[n - 1] + inc
        self.n = n

    def value(self, n: int) -> np.ndarray:
        if n > self.n:
            raise ValueError("requested a running norm beyond the computed steps")
        if np.isinf(self.p):
            return self.acc[n]
        return self.acc[n] ** (1.0 / self.p)

    def series(self, weights: np.ndarray) -> np.ndarray:
        """Weighted band sums for every step computed so far."""
        vals = self.acc[: self.n + 1]
        if not np.isinf(self.p):
            vals = vals ** (1.0 / self.p)
        return vals @ weights
