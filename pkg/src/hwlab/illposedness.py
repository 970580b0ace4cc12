"""Ill-posedness experiments.

Two families live here.

The Hardy profile K_rho(y) = 1/(y + i rho) has only positive y-frequencies, so
e^{-it|D_y|} translates it rigidly.  Tensored with a Gaussian in x it keeps
its L^4 norm for all time while its fractional Sobolev norm grows more slowly
as rho -> 0, and the ratio of the two measures how badly an L^4 Strichartz
bound with s/2 derivatives fails.  On the periodic box of length L we use the
periodization (pi/L) cot(pi (y + i rho)/L), whose Fourier series is exactly
one-sided.

The inflation profiles are concentrated bumps lambda_n phi(n x, n^2 y),
smoothed by an anisotropic mollifier and evolved by the pointwise ODE
i v' = mu |v|^2 v, whose solution is a pure phase rotation.  The phase
gradient pumps energy to high frequencies and inflates the H^s-type norms
below the scaling threshold.  The full PDE is run next to the ODE profile for
comparison.

Tensor products are handled through their one-dimensional factors: every norm
used here factorizes exactly over x and y for a product f(x) g(y), and so does
the linear flow.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, special

from .evolve import Flow, cis, solve_nls
from .grid import FOURIER, PHYSICAL, Field, Grid, fft2, lp_norm, make_grid
from .norms import sobolev_aniso, sobolev_components

# -- Hardy profile ---------------------------------------------------------


def gaussian_x(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.asarray(x) ** 2)


def k_rho(y: np.ndarray, rho: float, period: float | None = None) -> np.ndarray:
    """1/(y + i rho), or its periodization with the given period."""
    z = np.asarray(y, dtype=float) + 1j * rho
    if period is None:
        return 1.0 / z
    return (np.pi / period) / np.tan(np.pi * z / period)


def _check_rho(grid: Grid, rho: float) -> None:
    if rho <= 0:
        raise ValueError("rho must be positive")
    if rho < 8 * grid.dy:
        raise ValueError(f"rho={rho} is under-resolved: need rho >= 8 dy = {8 * grid.dy:.3g}")


def y_line(ly: float = 256.0, ny: int = 65536) -> Grid:
    """One-dimensional grid in y (a single x cell of unit length)."""
    return make_grid(1, ny, 1.0, ly, unit_resolution=False)


def x_line(lx: float = 40.0, nx: int = 512) -> Grid:
    return make_grid(nx, 1, lx, 1.0, unit_resolution=False)


def k_rho_line(rho: float, ly: float = 256.0, ny: int = 65536) -> Field:
    g = y_line(ly, ny)
    _check_rho(g, rho)
    return Field(g, k_rho(g.y, rho, g.ly)[None, :], PHYSICAL)


def k_rho_field(grid: Grid, rho: float) -> Field:
    """G(x) K_rho(y) sampled on ``grid`` (periodized in y)."""
    _check_rho(grid, rho)
    if gaussian_x(grid.lx / 2) > 1e-8:
        raise ValueError(f"lx={grid.lx} truncates the Gaussian above 1e-8")
    u = gaussian_x(grid.x)[:, None] * k_rho(grid.y, rho, grid.ly)[None, :]
    return Field(grid, u, PHYSICAL)


def negative_frequency_fraction(f: Field) -> float:
    p = np.abs(f.fourier()) ** 2
    return float(p[:, f.grid.eta < 0].sum() / p.sum())


def k_rho_lebesgue(rho: float, ly: float = 256.0, ny: int = 65536) -> tuple[float, float]:
    """(||K_rho||_{L^2}^2, ||K_rho||_{L^4}^4) on the periodic line."""
    f = k_rho_line(rho, ly, ny)
    return lp_norm(f, 2) ** 2, lp_norm(f, 4) ** 4


def hardy_translation_defect(rho: float, times, ly: float = 256.0, ny: int = 65536) -> float:
    """max_t | ||e^{it|D_y|} K_rho||_{L^4} / ||K_rho||_{L^4} - 1 |."""
    f = k_rho_line(rho, ly, ny)
    ref = lp_norm(f, 4)
    flow = Flow(f.grid)
    c = f.fourier()
    worst = 0.0
    for t in np.atleast_1d(times):
        # e^{it|D_y|} is the y factor of the flow at -t
        _, py = flow.factors(-float(t))
        moved = Field(f.grid, c * py[None, :], FOURIER)
        worst = max(worst, abs(lp_norm(moved, 4) / ref - 1.0))
    return worst


def fractional_constant(s: float) -> float:
    """int |e^{iu} - 1|^2 |u|^{-1-s} du = 2 pi / (Gamma(1+s) sin(pi s / 2))."""
    return 2.0 * np.pi / (special.gamma(1.0 + s) * np.sin(np.pi * s / 2.0))


def _difference_quotient_integral(rho: float, s: float) -> float:
    # int int |h|^{1-s} / (((y+h)^2 + rho^2)(y^2 + rho^2)) dy dh.  Substituting
    # y = rho tan(a), y + h = rho tan(b) absorbs both Lorentzian factors into
    # the Jacobian and leaves |h|^{1-s} / rho^2 on the square (-pi/2, pi/2)^2,
    # with integrable singularities on the boundary and a kink at a = b.
    half = np.pi / 2

    def inner(a: float) -> float:
        ya = rho * np.tan(a)
        fn = lambda b: abs(rho * np.tan(b) - ya) ** (1.0 - s)
        return integrate.quad(fn, -half, half, points=[a], limit=200, epsabs=0, epsrel=1e-7)[0]

    return integrate.quad(inner, -half, half, limit=200, epsabs=0, epsrel=1e-6)[0] / rho**2


def k_rho_sobolev(rho: float, s: float, route: str = "spectral", ly: float = 256.0, ny: int = 65536) -> float:
    """||K_rho||_{H-dot^{s/2}_y}.

    ``route='spectral'`` weights the periodic spectrum by |eta|^s;
    ``route='integral'`` evaluates the difference-quotient double integral on
    the line by adaptive quadrature and divides by the constant that links the
    two definitions.
    """
    if not 0 < s < 1:
        raise ValueError("need 0 < s < 1")
    if route == "spectral":
        return sobolev_components(k_rho_line(rho, ly, ny), s / 2, homogeneous=True)[0]
    if route == "integral":
        return float(np.sqrt(_difference_quotient_integral(rho, s) / fractional_constant(s)))
    raise ValueError(f"unknown route {route!r}")


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class StrichartzRow:
    rho: float
    L2: float
    L4: float
    Hs_half: float
    ratio: float
    slope: float = float("nan")

    def csv_row(self) -> list:
        return [repr(float(v)) for v in (self.rho, self.L2, self.L4, self.Hs_half, self.ratio, self.slope)]


STRICHARTZ_COLUMNS = ["rho", "L2", "L4", "Hs_half", "ratio", "slope"]


@dataclass
class StrichartzReport:
    s: float
    rows: list[StrichartzRow]
    slope: float
    predicted: float

    def csv(self) -> str:
        return _csv(STRICHARTZ_COLUMNS, [r.csv_row() for r in self.rows])


def _space_time_l4_4(line: Field, flow: Flow, times: np.ndarray, axis: int) -> np.ndarray:
    c = line.fourier()
    out = np.empty(len(times))
    for j, t in enumerate(times):
        px, py = flow.factors(float(t))
        ph = px[:, None] if axis == 0 else py[None, :]
        out[j] = lp_norm(Field(line.grid, c * ph, FOURIER), 4) ** 4
    return out


def strichartz_failure(rhos, s: float, *, nt: int = 64, combine: str = "max", lx: float = 40.0, nx: int = 512,
                       ly: float = 256.0, ny: int = 65536) -> StrichartzReport:
    """R(rho) = ||e^{itA}(G K_rho)||_{L^4([0,1] x R^2)} / ||G K_rho||_{H-dot^{s/2}}.

    The slope of log R against log(1/rho) is 1/4 - s/2 asymptotically.  Both
    sides are evaluated through the x and y factors of the product.
    """
    if nt < 64:
        raise ValueError("need at least 64 time steps on [0, 1]")
    times = np.linspace(0.0, 1.0, nt + 1)
    gx = x_line(lx, nx)
    G = Field(gx, gaussian_x(gx.x)[:, None], PHYSICAL)
    gx_l4 = _space_time_l4_4(G, Flow(gx), times, axis=0)
    G_l2 = lp_norm(G, 2)
    G_hs = sobolev_components(G, s / 2, homogeneous=True)[1]

    rows = []
    for rho in rhos:
        K = k_rho_line(rho, ly, ny)
        ky_l4 = _space_time_l4_4(K, Flow(K.grid), times, axis=1)
        num = integrate.trapezoid(gx_l4 * ky_l4, times) ** 0.25
        K_l2 = lp_norm(K, 2)
        K_hs = sobolev_components(K, s / 2, homogeneous=True)[0]
        y_part, x_part = G_l2 * K_hs, G_hs * K_l2
        den = max(y_part, x_part) if combine == "max" else y_part + x_part
        rows.append(StrichartzRow(float(rho), K_l2**2, lp_norm(K, 4) ** 4, K_hs, num / den))
    slope = loglog_slope([1 / r.rho for r in rows], [r.ratio for r in rows])
    for r in rows:
        r.slope = slope
    return StrichartzReport(s, rows, slope, 0.25 - s / 2)


# -- inflation profiles ----------------------------------------------------


@dataclass(frozen=True)
class InflationSchedule:
    """kappa_n = log(n)^-gamma, lambda_n = kappa_n n^{3/2-2s},
    t_n = log(n)^{2 beta} n^{2(2s-3/2)}, eps_n = 1/(100 n)."""

    ns: tuple = (4.0, 8.0, 16.0)
    gamma: float = 0.1
    beta: float = 0.9
    s: float = 0.15

    def __post_init__(self):
        if not 0 < self.gamma < self.beta < 1:
            raise ValueError("need 0 < gamma < beta < 1")
        if any(n <= 1 for n in self.ns):
            raise ValueError("every n must exceed 1")
        for n in self.ns:
            d = self.t(n) * self.lam(n) ** 2
            if not math.isclose(d, math.log(n) ** (2 * (self.beta - self.gamma)), rel_tol=1e-12):
                raise ValueError(f"inconsistent driver at n={n}")

    def kappa(self, n: float) -> float:
        return math.log(n) ** (-self.gamma)

    def lam(self, n: float) -> float:
        return self.kappa(n) * n ** (1.5 - 2 * self.s)

    def t(self, n: float) -> float:
        return math.log(n) ** (2 * self.beta) * n ** (2 * (2 * self.s - 1.5))

    def eps(self, n: float) -> float:
        return 1.0 / (100.0 * n)

    def driver(self, n: float) -> float:
        """t_n lambda_n^2, the size of the phase rotation at the bump center."""
        return self.t(n) * self.lam(n) ** 2


def bump(r: np.ndarray) -> np.ndarray:
    """Radial C^infty bump: exp(1 - 1/(1 - r^2)) on r < 1, so phi(0) = 1."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    inside = r < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)
_GL_T = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class Mollifier:
    """rho_mol(x, y) = bump(r / radius) / Z with unit integral.

    Z comes from a one-dimensional radial quadrature.  A kernel of radius
    1/100 with unit mass cannot also be bounded by 1, so only nonnegativity
    is kept.
    """

    radius: float = 1e-2

    @cached_property
    def Z(self) -> float:
        return 2 * np.pi * self.radius**2 * integrate.quad(lambda t: bump(t) * t, 0.0, 1.0, epsabs=0, epsrel=1e-13)[0]

    def __call__(self, x, y) -> np.ndarray:
        return bump(np.hypot(x, y) / self.radius) / self.Z

    def hat(self, k: np.ndarray) -> np.ndarray:
        """Fourier transform int rho e^{-i k.z} dz as a function of |k| (Hankel transform)."""
        k = np.asarray(k, dtype=float)
        vals = bump(_GL_T) * _GL_T * _GL_W
        J = special.j0(np.multiply.outer(k * self.radius, _GL_T))
        return 2 * np.pi * self.radius**2 * (J @ vals) / self.Z

    def scaled_hat(self, grid: Grid, eps: float) -> np.ndarray:
        """Symbol of convolution with rho_eps(x, y) = eps^-3 rho(x/eps, y/eps^2)."""
        k = np.hypot(eps * grid.xi[:, None], eps**2 * grid.eta[None, :])
        return self.hat(k)

    def scaled_mass(self, eps: float, points: int = 257) -> float:
        """int rho_eps by the trapezoid rule on a grid fitted to its support."""
        hx, hy = self.radius * eps, self.radius * eps**2
        x = np.linspace(-hx, hx, points)
        y = np.linspace(-hy, hy, points)
        vals = eps**-3 * self(x[:, None] / eps, y[None, :] / eps**2)
        return float(integrate.trapezoid(integrate.trapezoid(vals, y, axis=1), x))


@dataclass(frozen=True)
class ProfileBuilder:
    mollifier: Mollifier = field(default_factory=Mollifier)

    def profile(self, grid: Grid, n: float, amplitude: float, center=(0.0, 0.0)) -> Field:
        """amplitude * bump(|(n (x - x_c), n^2 (y - y_c))|)."""
        X, Y = grid.mesh()
        r = np.hypot(n * (X - center[0]), n**2 * (Y - center[1]))
        return Field(grid, (amplitude * bump(r)).astype(complex), PHYSICAL)

    def mollify(self, f: Field, eps: float) -> Field:
        return Field(f.grid, f.fourier() * self.mollifier.scaled_hat(f.grid, eps), FOURIER)


def ode_profile(v0: Field, t: float, mu: float = -1.0) -> Field:
    """Exact solution of i v' = mu |v|^2 v: v0 exp(-i mu t |v0|^2)."""
    u = v0.physical()
    return Field(v0.grid, u * cis(-mu * t * np.abs(u) ** 2), PHYSICAL)


def ode_residual(times) -> float:
    """max |i V' + |V|^2 V| for V(t) = e^{it}, with V' = i e^{it}."""
    t = np.asarray(times, dtype=float)
    V = cis(t)
    dV = 1j * V
    return float(np.abs(1j * dV + np.abs(V) ** 2 * V).max())


def inflation_grid(n: float, t_n: float, nx: int = 256, ny: int = 256) -> Grid:
    """Box fitted to the bump: 8/n wide in x, 8/n^2 + 4 t_n tall in y."""
    return make_grid(nx, ny, 8.0 / n, 8.0 / n**2 + 4.0 * t_n, unit_resolution=False)


def spectral_tail(f: Field) -> float:
    """Fraction of L^2 mass in the outer half of either frequency range."""
    g = f.grid
    p = np.abs(f.fourier()) ** 2
    outer = (np.abs(g.xi)[:, None] > g.xi_max / 2) | (np.abs(g.eta)[None, :] > g.eta_max / 2)
    return float(p[outer].sum() / p.sum())


@dataclass
class InflationRow:
    n: float
    kappa: float
    lam: float
    t_n: float
    eps: float
    norm0: float
    norm_tn: float
    y_norm_tn: float
    lower_ratio: float
    mass0: float
    mass_tn: float
    tail: float
    pde_norm_tn: float = float("nan")
    ode_pde_gap: float = float("nan")
    pde_mass_drift: float = float("nan")

    @property
    def growth(self) -> float:
        return self.norm_tn / self.norm0

    def csv_row(self) -> list:
        return [repr(float(v)) for v in (self.n, self.kappa, self.lam, self.t_n, self.norm0, self.norm_tn,
                                        self.ode_pde_gap)]


INFLATION_COLUMNS = ["n", "kappa", "lambda", "t_n", "norm0", "norm_tn", "ode_pde_gap"]


def inflation_csv(rows) -> str:
    return _csv(INFLATION_COLUMNS, [r.csv_row() for r in rows])


def inflation_run(schedule: InflationSchedule, *, mu: float = -1.0, nx: int = 256, ny: int = 256,
                  pde: bool = True, phase_step: float = 0.02, builder: ProfileBuilder | None = None,
                  tail_tol: float = 1e-4) -> list[InflationRow]:
    """ODE-profile norms at 0 and t_n for each n, plus the full PDE next to it.

    ``phase_step`` bounds the nonlinear phase rotation per PDE step.
    """
    builder = builder or ProfileBuilder()
    s = schedule.s
    rows = []
    for n in schedule.ns:
        t_n, lam, kappa, eps = schedule.t(n), schedule.lam(n), schedule.kappa(n), schedule.eps(n)
        g = inflation_grid(n, t_n, nx, ny)
        v0 = builder.mollify(builder.profile(g, n, lam), eps)
        vt = ode_profile(v0, t_n, mu)
        tail = spectral_tail(vt)
        if tail > tail_tol:
            raise ValueError(f"n={n}: grid {nx}x{ny} under-resolves the profile at t_n (tail {tail:.2e})")
        y_tn = sobolev_components(vt, s)[0]
        row = InflationRow(
            n=float(n), kappa=kappa, lam=lam, t_n=t_n, eps=eps,
            norm0=sobolev_aniso(v0, s), norm_tn=sobolev_aniso(vt, s),
            y_norm_tn=y_tn, lower_ratio=y_tn / (kappa * schedule.driver(n) ** s),
            mass0=_mass(v0), mass_tn=_mass(vt), tail=tail,
        )
        if pde:
            vmax2 = float(np.abs(v0.physical()).max() ** 2)
            steps = max(8, math.ceil(t_n * vmax2 / phase_step))
            traj = solve_nls(v0, t_n, t_n / steps, mu, dealias=False, save_every=steps)
            u = traj.snapshot(traj.index(t_n))
            row.pde_norm_tn = sobolev_aniso(u, s)
            row.ode_pde_gap = sobolev_components(u - vt.to_fourier(), s)[0]
            row.pde_mass_drift = abs(_mass(u) / row.mass0 - 1.0)
        rows.append(row)
    return rows


def _mass(f: Field) -> float:
    return float(f.grid.area * np.sum(np.abs(f.fourier()) ** 2))


# -- superposed bubbles ----------------------------------------------------


def geometric_schedule(k1: int, count: int, base: float = 4.0, ratio: float = 2.0) -> list[float]:
    """n_k = base * ratio^(k - 1) for k = k1 .. k1 + count - 1, a tame stand-in for exp(a^k)."""
    return [base * ratio ** (k - 1) for k in range(k1, k1 + count)]


@dataclass
class Bubble:
    k: int
    n: float
    center: tuple[float, float]
    amplitude: float
    radius_x: float
    radius_y: float


@dataclass
class TanghuruData:
    field: Field
    bubbles: list[Bubble]
    separations: np.ndarray
    eps: list[float]

    @property
    def radii(self) -> list[tuple[float, float]]:
        return [(b.radius_x, b.radius_y) for b in self.bubbles]


MAX_BUBBLES = 3


def tanghuru_build(grid: Grid, k1: int, bubble_count: int, centers, ns=None, u0: Field | None = None, *,
                   s: float = 0.15, gamma: float = 0.1, builder: ProfileBuilder | None = None) -> TanghuruData:
    """f = u0 + sum_k lambda_{n_k} phi(n_k (x - x_k), n_k^2 (y - y_k)).

    ``centers`` holds (x_k, y_k) pairs or bare y_k values (then x_k = 0).
    Supports, widened by the reach of the mollifier at eps_{n_k}, must be
    pairwise disjoint; the check uses bounding boxes and is then confirmed on
    the grid.
    """
    if not 1 <= bubble_count <= MAX_BUBBLES:
        raise ValueError(f"bubble_count must be in 1..{MAX_BUBBLES}")
    if k1 < 1:
        raise ValueError("k1 must be at least 1")
    ns = list(ns) if ns is not None else geometric_schedule(k1, bubble_count)
    centers = [(0.0, float(c)) if np.ndim(c) == 0 else (float(c[0]), float(c[1])) for c in centers]
    if len(ns) != bubble_count or len(centers) != bubble_count:
        raise ValueError("need one scale and one center per bubble")
    builder = builder or ProfileBuilder()
    R = builder.mollifier.radius
    bubbles, eps = [], []
    for j, (n, c) in enumerate(zip(ns, centers)):
        e = 1.0 / (100.0 * n)
        amp = math.log(n) ** (-gamma) * n ** (1.5 - 2 * s)
        bubbles.append(Bubble(k1 + j, float(n), c, amp, 1.0 / n + R * e, 1.0 / n**2 + R * e**2))
        eps.append(e)

    m = len(bubbles)
    sep = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            a, b = bubbles[i], bubbles[j]
            gx = abs(a.center[0] - b.center[0]) - a.radius_x - b.radius_x
            gy = abs(a.center[1] - b.center[1]) - a.radius_y - b.radius_y
            sep[i, j] = sep[j, i] = max(gx, gy)
            if sep[i, j] <= 0:
                raise ValueError(f"bubbles {a.k} and {b.k} overlap")

    pieces = [builder.profile(grid, b.n, b.amplitude, b.center).physical() for b in bubbles]
    for i in range(m):
        if not np.any(pieces[i]):
            raise ValueError(f"bubble {bubbles[i].k} is not resolved by the grid")
        for j in range(i + 1, m):
            if np.any(pieces[i] * pieces[j]):
                raise ValueError(f"bubbles {bubbles[i].k} and {bubbles[j].k} share grid points")
    total = np.sum(pieces, axis=0)
    if u0 is not None:
        total = total + u0.physical()
    return TanghuruData(Field(grid, total, PHYSICAL), bubbles, sep, eps)


def tail_norms(data: TanghuruData, k: int, builder: ProfileBuilder | None = None) -> list[float]:
    """||rho_{eps_{n_k}} * v_{0,l}||_{L^2} for the bubbles l >= k."""
    builder = builder or ProfileBuilder()
    g = data.field.grid
    idx = [b.k for b in data.bubbles].index(k)
    e = data.eps[idx]
    out = []
    for b in data.bubbles[idx:]:
        v = builder.mollify(builder.profile(g, b.n, b.amplitude, b.center), e)
        out.append(math.sqrt(_mass(v)))
    return out


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()
