"""The frequency ladder u_N = u_{N/2} + F_N + w_N with truncation cutoffs.

Level N (dyadic, N0 < N <= Nmax) is built from the already computed level
N/2 in two solves on [-T0, T0]:

* F_N, the adapted linear evolution of the new random block P_N f0^w in the
  low-frequency potential theta_{F,w;<=N/2} P_{<=N^gamma} u_{N/2};
* w_N, the remainder driven by the nine-term truncated forcing.

Running norms are accumulated step by step while marching outward from t = 0
and turned into the cutoff series.  The ladder sum that feeds
theta_{F,w;<=N/2} also contains the base level, through the
S_{<=N0,D'} norm of <D_y>^{sigma'} u_{N0}.

F_N is real-linear in its datum (the potential term contains conj(F)), so its
block decomposition uses two unit solves per frequency k: one started from
P_{1,k} f0 and one from i P_{1,k} f0, recombined with Re g_k and Im g_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import norms as nm
from .evolve import (
    CutoffState,
    RemainderContext,
    cutoff_theta,
    duhamel_trajectory,
    solve_adapted_linear,
    solve_nls,
    solve_remainder,
    trilinear,
)
from .evolve import Flow
from .exponents import analytic_optimum
from .grid import Field, fft2, ifft2, ifft_x, l2_norm
from .multipliers import below_symbol, dyadic_range, japanese_symbol, project_fattened
from .random_data import RandomSpec, block_indices, combine_blocks, gaussians
from .trajectory import Trajectory

MARGIN = 1e-6


@dataclass(frozen=True)
class AnsatzParams:
    s: float = 0.48
    sigma: float = 0.0
    sigma_p: float = 0.0
    nu: float = 0.0
    alpha: float = 0.5
    gamma: float = 0.0
    rho_besov: float = 0.0
    D: float = 1.0
    Dp: float = 4.0
    Dpp: float = 5.0
    N0: int = 8
    Nmax: int = 64
    T0: float = 0.1
    dt: float = 1.0 / 800
    mu: float = 1.0
    seed: int = 0
    save_every: int = 8
    dealias: bool = False

    def __post_init__(self):
        opt = analytic_optimum()
        # unset exponents default to the analytic optimum, nudged inside the strict region
        if self.nu == 0.0:
            object.__setattr__(self, "nu", opt.nu - 1e-3)
        if self.sigma == 0.0:
            object.__setattr__(self, "sigma", self.nu - 0.5 - 1e-3)
        if self.sigma_p == 0.0:
            object.__setattr__(self, "sigma_p", opt.sigma_p)
        if self.gamma == 0.0:
            object.__setattr__(self, "gamma", opt.gamma)
        if self.rho_besov == 0.0:
            object.__setattr__(self, "rho_besov", self.sigma / 2)
        self.validate()

    @property
    def delta(self) -> float:
        return self.gamma * (self.sigma - self.rho_besov)

    def validate(self) -> None:
        m = MARGIN
        checks = [
            (m < self.sigma < self.nu - 0.5 - m, "0 < sigma < nu - 1/2"),
            (self.sigma + m < self.sigma_p < self.s - m, "sigma < sigma' < s"),
            (m < self.gamma < 1 - m, "0 < gamma < 1"),
            (max(self.nu - self.sigma_p, self.sigma) + m < self.alpha < self.nu - m,
             "max(nu - sigma', sigma) < alpha < nu"),
            (self.Dp > 2 * self.D + self.s + self.sigma_p + self.nu + m, "D' > 2D + s + sigma' + nu"),
            (self.Dpp > self.Dp, "D'' > D'"),
            (self.delta > m, "delta = gamma (sigma - rho) > 0"),
            (_is_dyadic(self.N0) and _is_dyadic(self.Nmax) and self.Nmax >= self.N0, "dyadic N0 <= Nmax"),
            (self.T0 > 0 and self.dt > 0, "positive T0 and dt"),
        ]
        bad = [msg for ok, msg in checks if not ok]
        if bad:
            raise ValueError("invalid ansatz parameters: " + "; ".join(bad))

    @property
    def nsteps(self) -> int:
        return int(round(self.T0 / self.dt))

    def levels(self) -> list[int]:
        return [N for N in dyadic_range(self.Nmax) if N > self.N0]


def _is_dyadic(n) -> bool:
    n = int(n)
    return n >= 1 and n & (n - 1) == 0


# -- per-step monitors --------------------------------------------------------


class _Monitor:
    """Per-band spatial norms of a solution at every step, with running time norms."""

    def __init__(self, grid, nsteps: int, dt: float, specs: dict[str, tuple[str, float]], importance=None):
        self.bank = nm.BandBank(grid)
        self.M = np.array(self.bank.bands, dtype=float)
        self.specs = specs
        self.importance = importance
        self.weights = {k: japanese_symbol(grid.eta, s) for k, (_, s) in specs.items()}
        nb = len(self.bank)
        self.run = {k: nm.RunningBandNorm(nb, nsteps, dt, np.inf if kind == "X" else 8)
                    for k, (kind, _) in specs.items()}
        self._pending: dict[int, dict] = {}

    def _bands(self, c: np.ndarray) -> dict[str, np.ndarray]:
        out = {}
        cx = None
        for key, (kind, _) in self.specs.items():
            wy = self.weights[key]
            if kind == "X":
                out[key] = self.bank.l2(c, wy)
            else:
                if cx is None:
                    cx = ifft_x(c)
                out[key] = self.bank.mixed(cx, 4, np.inf, wy, self.importance)
        return out

    def __call__(self, n: int, sign: int, c: np.ndarray) -> None:
        vals = self._bands(c)
        if n == 0:
            for key, r in self.run.items():
                r.push(0, vals[key], vals[key])
            return
        self._pending[sign] = vals
        if len(self._pending) == 2:
            for key, r in self.run.items():
                r.push(n, self._pending[1][key], self._pending[-1][key])
            self._pending = {}

    def weighted(self, key: str, weights: np.ndarray) -> np.ndarray:
        return self.run[key].series(weights)

    def last(self, key: str, n: int, weights: np.ndarray) -> float:
        return float(self.run[key].value(n) @ weights)


class _LowFrequencyField:
    """u_{N/2}(t), P_{<=N^gamma} u_{N/2}(t) and the cutoff-scaled potential at step times."""

    def __init__(self, u_half: Trajectory, theta_Fw: np.ndarray, N: int, gamma: float, dt: float):
        self.u = u_half
        self.theta = theta_Fw
        self.Pgam = below_symbol(u_half.grid.eta, float(N) ** gamma)[None, :]
        self.dt = dt
        self._cache: dict[float, tuple] = {}

    def n_of(self, t: float) -> int:
        return int(round(abs(t) / self.dt))

    def at(self, t: float):
        key = round(t / self.dt)
        hit = self._cache.get(key)
        if hit is None:
            c = self.u.coeffs_at(key * self.dt)
            hit = (ifft2(c), ifft2(c * self.Pgam))
            if len(self._cache) > 6:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = hit
        return hit

    def potential(self, t: float) -> np.ndarray:
        return self.theta[self.n_of(t)] * self.at(t)[1]


@dataclass
class Level:
    N: int
    init: Field
    F: Trajectory
    w: Trajectory
    cutoffs: CutoffState
    series: dict
    low: _LowFrequencyField
    ks: np.ndarray

    @property
    def u(self) -> Trajectory:
        return self.low.u + self.F + self.w


@dataclass
class AnsatzState:
    params: AnsatzParams
    f0: Field
    spec: RandomSpec
    base: Trajectory
    base_series: dict
    levels: dict = field(default_factory=dict)
    t_omega: float = 0.0
    t_omega_flag: bool = False
    reports: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.f0.grid

    def u(self, N: int) -> Trajectory:
        if N == self.params.N0:
            return self.base
        return self.levels[N].u

    def u_top(self) -> Trajectory:
        return self.u(max([self.params.N0] + list(self.levels)))

    @property
    def step_times(self) -> np.ndarray:
        return self.params.dt * np.arange(self.params.nsteps + 1)


def _weights(p: AnsatzParams, M: np.ndarray, N: int) -> dict[str, np.ndarray]:
    return {
        "N_Dp": nm.dyadic_weight(N, M, p.Dp),
        "leq_Dp": nm.dyadic_weight_leq(N, M, p.Dp),
        "N_alpha": nm.dyadic_weight(N, M, p.alpha),
        "leq_D": nm.dyadic_weight_leq(N, M, p.D),
    }


def _check_grid(f0: Field, p: AnsatzParams) -> None:
    if f0.grid.eta_max < 4 * p.Nmax:
        raise ValueError(f"eta_max={f0.grid.eta_max:g} is below 4 Nmax={4 * p.Nmax}")


def run_ladder(f0: Field, params: AnsatzParams, *, spec: RandomSpec | None = None,
               gauss_override: dict | None = None) -> AnsatzState:
    """Solve the base level and every ladder level up to params.Nmax.

    ``gauss_override`` maps k to a replacement g_k (seed surgery experiments).
    """
    p = params
    _check_grid(f0, p)
    spec = spec or RandomSpec(p.seed)
    g = f0.grid
    nsteps = p.nsteps
    gauss = _GaussTable(spec.master_seed, gauss_override)

    base_init = combine_blocks(f0, np.arange(-(p.N0 - 1), p.N0), gauss(np.arange(-(p.N0 - 1), p.N0)))
    mon = _Monitor(g, nsteps, p.dt, {"S_sp": ("S", p.sigma_p)})
    wb = _weights(p, mon.M, p.N0)
    mon.importance = wb["leq_Dp"]
    base = solve_nls(base_init, p.T0, p.dt, p.mu, dealias=p.dealias, save_every=p.save_every, on_step=mon)
    if base.flags.get("blowup"):
        raise RuntimeError("base trajectory is incomplete (blow-up ceiling reached)")
    base_series = {"S_leq_Dp": mon.weighted("S_sp", wb["leq_Dp"])}
    state = AnsatzState(p, f0, spec, base, base_series)
    state.reports["gauss"] = gauss
    ladder_sum = base_series["S_leq_Dp"].copy()
    for N in p.levels():
        lvl = _solve_level(state, N, block_indices(N), gauss, ladder_sum)
        state.levels[N] = lvl
        ladder_sum = ladder_sum + lvl.series["ladder_term"]
    detect_existence_time(state)
    return state


class _GaussTable:
    def __init__(self, seed: int, override: dict | None = None):
        self.seed = seed
        self.override = dict(override or {})

    def __call__(self, ks) -> np.ndarray:
        ks = np.atleast_1d(ks)
        out = gaussians(self.seed, ks)
        for i, k in enumerate(ks):
            if int(k) in self.override:
                out[i] = self.override[int(k)]
        return out


def _solve_level(state: AnsatzState, N: int, ks: np.ndarray, gauss, ladder_sum: np.ndarray) -> Level:
    p = state.params
    g = state.grid
    nsteps = p.nsteps
    theta_Fw = cutoff_theta(ladder_sum)
    u_half = state.u(N // 2)
    low = _LowFrequencyField(u_half, theta_Fw, N, p.gamma, p.dt)

    init = combine_blocks(state.f0, ks, gauss(ks))
    monF = _Monitor(g, nsteps, p.dt, {"S_sp": ("S", p.sigma_p)})
    W = _weights(p, monF.M, N)
    monF.importance = np.maximum(W["leq_Dp"], W["N_Dp"])
    F_full = solve_adapted_linear(init, low.potential, p.T0, p.dt, p.mu, save_every=1, on_step=monF)
    F_leq = monF.weighted("S_sp", W["leq_Dp"])
    F_N = monF.weighted("S_sp", W["N_Dp"])
    theta_F = cutoff_theta(F_leq)

    monW = _Monitor(g, nsteps, p.dt, {"X_nu": ("X", p.nu), "S_sig": ("S", p.sigma)})
    monW.importance = np.maximum(W["N_alpha"], W["leq_D"])

    def y_arg(n: int) -> float:
        return (monW.last("X_nu", n, W["N_alpha"]) + monW.last("X_nu", n, W["leq_D"])
                + monW.last("S_sig", n, W["N_alpha"]) + monW.last("S_sig", n, W["leq_D"]))

    def fields(t: float):
        u, Pu = low.at(t)
        i = F_full.i0 + int(round(t / p.dt))
        return F_full.physical(i), u, Pu

    ctx = RemainderContext(fields, theta_F, theta_Fw, lambda n: float(cutoff_theta(y_arg(n))), p.mu)
    w = solve_remainder(ctx, g, p.T0, p.dt, save_every=p.save_every, on_step=monW)

    Y = (monW.weighted("X_nu", W["N_alpha"]) + monW.weighted("X_nu", W["leq_D"])
         + monW.weighted("S_sig", W["N_alpha"]) + monW.weighted("S_sig", W["leq_D"]))
    w_leq = monW.weighted("S_sig", W["leq_D"]) + monW.weighted("X_nu", W["leq_D"])
    theta_w = cutoff_theta(Y)
    times = p.dt * np.arange(nsteps + 1)
    cut = CutoffState(times, theta_F, theta_w, theta_Fw,
                      {"F_S_leq": F_leq, "w_Y": Y, "ladder_sum": ladder_sum})
    series = {"F_S_leq": F_leq, "F_S_N": F_N, "w_Y": Y, "w_leq": w_leq, "ladder_term": F_leq + w_leq}
    F = _subsample(F_full, p.save_every)
    return Level(N, init, F, w, cut, series, low, ks)


def _subsample(tr: Trajectory, stride: int) -> Trajectory:
    keep = np.abs(np.round(tr.times / tr.dt)).astype(int) % stride == 0
    return Trajectory(tr.grid, tr.times[keep], tr.coeffs[keep].copy(), tr.dt, dict(tr.flags))


# -- derived measurements -----------------------------------------------------


def detect_existence_time(state: AnsatzState) -> float:
    """Largest step time tau with sum_M ||<D>^{sigma'} F_M||_{S_{M,D'}} <= 1/2,
    sum_M ||w_M||_{Y_M} <= 1/2 and every cutoff equal to 1 on [-tau, tau]."""
    p = state.params
    times = state.step_times
    sF = np.zeros(len(times))
    sY = np.zeros(len(times))
    ok = np.ones(len(times), dtype=bool)
    for lvl in state.levels.values():
        sF += lvl.series["F_S_N"]
        sY += lvl.series["w_Y"]
        c = lvl.cutoffs
        ok &= (c.theta_F == 1) & (c.theta_w == 1) & (c.theta_Fw == 1)
    ok &= (sF <= 0.5) & (sY <= 0.5)
    if not ok[0]:
        state.t_omega, state.t_omega_flag = 0.0, True
        return 0.0
    last = len(ok) - 1 if ok.all() else int(np.argmin(ok)) - 1
    state.t_omega, state.t_omega_flag = float(times[last]), False
    return state.t_omega


def block_decomposition(state: AnsatzState, N: int, ks=None) -> dict:
    """Unit-block solves F_{N,k} (real and imaginary seeds) and the reassembly residual."""
    p = state.params
    lvl = state.levels[N]
    ks = lvl.ks if ks is None else np.atleast_1d(ks)
    gauss = state.reports["gauss"]
    gs = gauss(ks)
    blocks = {}
    total = np.zeros_like(lvl.F.coeffs)
    for k, gk in zip(ks, gs):
        unit = combine_blocks(state.f0, [k], [1.0])
        Fre = solve_adapted_linear(unit, lvl.low.potential, p.T0, p.dt, p.mu, save_every=p.save_every)
        Fim = solve_adapted_linear(unit * 1j, lvl.low.potential, p.T0, p.dt, p.mu, save_every=p.save_every)
        blocks[int(k)] = (Fre, Fim)
        total += gk.real * Fre.coeffs + gk.imag * Fim.coeffs
    ref = np.sqrt(np.sum(np.abs(lvl.F.coeffs) ** 2))
    resid = np.sqrt(np.sum(np.abs(total - lvl.F.coeffs) ** 2)) / max(ref, 1e-300)
    return {"blocks": blocks, "residual": float(resid), "ks": ks}


def block_besov_ratio(state: AnsatzState, N: int, k: int) -> float:
    """B^{rho,gamma}_{k,D''}(F_{N,k}) / ||P_{1,k} f0||_{L^2} for one unit block."""
    p = state.params
    blk = block_decomposition(state, N, [k])["blocks"][int(k)][0]
    val = nm.besov_recentered(blk, k, p.rho_besov, p.gamma, p.Dpp, N).value
    unit = combine_blocks(state.f0, [k], [1.0])
    return val / l2_norm(unit)


def measure_localization(state: AnsatzState, N: int) -> nm.NormReport:
    p = state.params
    lvl = state.levels[N]
    rep = nm.weighted_X(lvl.F, N, p.Dp, sigma=p.s)
    g = state.grid
    top = min(4 * N + 1, int(np.floor(g.eta_max - 1)))
    ks = np.arange(-top, top + 1)
    datum = combine_blocks(state.f0, ks, state.reports["gauss"](ks))
    ref = nm.sobolev_aniso(project_fattened(datum, N), p.s)
    a = np.abs(g.eta)
    outside = ((a < N / 4) | (a > 4 * N))[None, :]
    frac = 0.0
    for c in lvl.F.coeffs:
        tot = np.sum(np.abs(c) ** 2)
        if tot > 0:
            frac = max(frac, float(np.sum(np.abs(c) ** 2 * outside) / tot))
    rep.extras = {"ratio": rep.value / ref if ref > 0 else 0.0, "reference": ref, "off_band_fraction": frac}
    return rep


def convergence_report(state: AnsatzState, s: float, sigma: float) -> list[dict]:
    """||u_{2N} - u_N||_{X^{s,sigma}} for consecutive ladder levels, with ratios."""
    rows = []
    prev = state.base
    for N in sorted(state.levels):
        cur = state.levels[N].u
        d = nm.xs_sigma_norm(cur - prev, s, sigma)
        ratio = d / rows[-1]["diff"] if rows and rows[-1]["diff"] > 0 else float("nan")
        rows.append({"N": N, "diff": d, "ratio": ratio})
        prev = cur
    return rows


def general_n_step(state: AnsatzState, n: int) -> Trajectory:
    """u_n = u_{N/2} + F_n + w_n for N/2 < n <= N, with F_n(0) = sum_{N/2 <= |k| < n} g_k P_{1,k} f0."""
    p = state.params
    N = 1
    while N < n:
        N *= 2
    if N not in state.levels or not (N // 2 < n <= N):
        raise ValueError(f"n={n} is not inside a solved ladder level")
    pos = np.arange(N // 2, n)
    ks = np.concatenate([-pos[::-1], pos])
    ladder_sum = state.levels[N].cutoffs.arguments["ladder_sum"]
    lvl = _solve_level(state, N, ks, state.reports["gauss"], ladder_sum)
    return lvl.u


def residual(u: Trajectory, mu: float) -> np.ndarray:
    """L^2 norm of (i d_t + A) u - mu |u|^2 u at interior snapshots.

    The time derivative is a central difference in the interaction picture,
    where the free part is removed exactly: (i d_t + A) u = e^{itA} i d_t v.
    """
    flow = Flow(u.grid)
    ts = u.times
    out = []
    for i in range(1, len(ts) - 1):
        vm = flow.apply(u.coeffs[i - 1], -ts[i - 1])
        vp = flow.apply(u.coeffs[i + 1], -ts[i + 1])
        dv = (vp - vm) / (ts[i + 1] - ts[i - 1])
        lhs = 1j * flow.apply(dv, ts[i])
        phys = u.physical(i)
        rhs = mu * fft2(np.abs(phys) ** 2 * phys)
        out.append(np.sqrt(u.grid.area * np.sum(np.abs(lhs - rhs) ** 2)))
    return np.array(out)


def probabilistic_strichartz_stats(f0: Field, params: AnsatzParams, n_seeds: int, levels=None,
                                   seed0: int = 0) -> dict:
    """Monte-Carlo mean of ||<D>^{sigma'} F_N||_{S_{N,D'}} per level and its log2 slope.

    Each seed runs a full ladder.  Alongside the Strichartz norms the runs
    record the block data norms ||F_N(0)||_{L^2} (so the slope can also be
    read relative to the data) and the Cauchy differences of the ladder.
    """
    p = params
    levels = list(levels or p.levels())
    if len(levels) < 3:
        raise ValueError("need at least three dyadic levels")
    vals = np.zeros((n_seeds, len(levels)))
    data = np.zeros((n_seeds, len(levels)))
    cauchy = []
    for i in range(n_seeds):
        st = run_ladder(f0, replace(p, seed=seed0 + i, Nmax=max(levels)))
        for j, N in enumerate(levels):
            vals[i, j] = st.levels[N].series["F_S_N"][-1]
            data[i, j] = l2_norm(st.levels[N].init)
        cauchy.append([r["diff"] for r in convergence_report(st, p.s, p.sigma)])
    x = np.log2(np.array(levels, dtype=float))
    mean = vals.mean(axis=0)
    fit = stats.linregress(x, np.log2(mean))
    rel = stats.linregress(x, np.log2(mean / data.mean(axis=0)))
    # seed-resampled spread of the slope
    slopes = []
    rng = np.random.Generator(np.random.Philox(key=[seed0, 1]))
    for _ in range(200):
        pick = rng.integers(0, n_seeds, n_seeds)
        slopes.append(stats.linregress(x, np.log2(vals[pick].mean(axis=0))).slope)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return {
        "levels": levels,
        "mean": mean.tolist(),
        "samples": vals,
        "data_norms": data,
        "cauchy": np.array(cauchy),
        "slope": float(fit.slope),
        "slope_ci": (float(lo), float(hi)),
        "relative_slope": float(rel.slope),
        "probabilistic_exponent": p.sigma_p + p.gamma / 2 - p.s - p.gamma * p.sigma,
        "deterministic_exponent": p.sigma_p + 0.5 - p.s,
    }


# -- paraproduct splitting ------------------------------------------------------

MODES = ("hi_lo_lo", "lo_hi_lo", "lo_hi_hi", "hi_hi")


def _band_pieces(c: np.ndarray, bank: nm.BandBank) -> list[np.ndarray]:
    return [ifft2(c * s[None, :]) for s in bank.symbols]


def classify(N1: int, N2: int, N3: int) -> str:
    """Disjoint classification of a band triple.

    A band is "large" when 8 N_i > max(N1, N2, N3).  Only slot 1 large:
    hi_lo_lo.  Only slot 2 or only slot 3 large: lo_hi_lo.  Slots 2 and 3
    large, slot 1 not: lo_hi_hi.  Slot 1 large together with another: hi_hi.
    """
    top = max(N1, N2, N3)
    big = [8 * n > top for n in (N1, N2, N3)]
    if big[0]:
        return "hi_hi" if (big[1] or big[2]) else "hi_lo_lo"
    if big[1] and big[2]:
        return "lo_hi_hi"
    return "lo_hi_lo"


def paraproduct(c1: np.ndarray, c2: np.ndarray, c3: np.ndarray, bank: nm.BandBank) -> dict[str, np.ndarray]:
    """Physical-space Pi_mode(phi1, phi2, phi3) for every mode at one time."""
    P = [_band_pieces(c, bank) for c in (c1, c2, c3)]
    M = bank.bands
    nb = len(M)

    def low(i: int, top: int) -> np.ndarray:
        acc = np.zeros(bank.grid.shape, dtype=complex)
        for m in range(nb):
            if 8 * M[m] <= top:
                acc += P[i][m]
        return acc

    out = {mode: np.zeros(bank.grid.shape, dtype=complex) for mode in MODES}
    for m in range(nb):
        out["hi_lo_lo"] += trilinear(P[0][m], low(1, M[m]), low(2, M[m]))
        out["lo_hi_lo"] += trilinear(low(0, M[m]), P[1][m], low(2, M[m]))
        out["lo_hi_lo"] += trilinear(low(0, M[m]), low(1, M[m]), P[2][m])
    for a in range(nb):
        for b in range(nb):
            top = max(M[a], M[b])
            if 8 * M[a] > top and 8 * M[b] > top:
                out["lo_hi_hi"] += trilinear(low(0, top), P[1][a], P[2][b])
    full = trilinear(ifft2(c1), ifft2(c2), ifft2(c3))
    out["hi_hi"] = full - out["hi_lo_lo"] - out["lo_hi_lo"] - out["lo_hi_hi"]
    out["total"] = full
    return out


def interaction_split(phi1: Trajectory, phi2: Trajectory, phi3: Trajectory, mode: str, N: int,
                      nu: float, sigma: float, alpha: float, D: float) -> nm.NormReport:
    """Y^nu_N norm of the Duhamel integral of Pi_mode(phi1, phi2, phi3)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    for other in (phi2, phi3):
        if not np.array_equal(phi1.times, other.times):
            raise ValueError("trajectories are not snapshot-aligned")
    bank = nm.BandBank(phi1.grid)
    forcing = np.empty_like(phi1.coeffs)
    for i in range(len(phi1)):
        forcing[i] = fft2(paraproduct(phi1.coeffs[i], phi2.coeffs[i], phi3.coeffs[i], bank)[mode])
    I = duhamel_trajectory(Trajectory(phi1.grid, phi1.times, forcing, phi1.dt))
    terms = nm.y_norm_terms(I, N, nu, sigma, alpha, D)
    total = float(sum(t.value for t in terms))
    return nm.NormReport(f"Y^{nu}_{N}[I(Pi_{mode})]", total, (-I.T, I.T), [],
                         {"terms": [t.to_dict() for t in terms]})
