"""Time integration on the symmetric interval [-T, T].

All solvers march from t = 0 outward in both directions in lockstep (step n
forward, then step n backward), so any running quantity at step n is a
function of the samples in [-t_n, t_n] only.

Conventions: A = d_xx - |D_y| with symbol -(xi^2 + |eta|), and every equation
is written as (i d_t + A) u = mu * (nonlinear term).  The Duhamel form of
(i d_t + A) w = mu G is w(t) = e^{itA} w(0) - i mu int_0^t e^{i(t-s)A} G(s) ds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .grid import FOURIER, Field, Grid, fft2, ifft2
from .multipliers import smoothstep
from .trajectory import Trajectory


def cutoff_theta(x):
    """Even cutoff: 1 on |x| <= 1, 0 on |x| >= 2, smoothstep(2 - |x|) between."""
    return smoothstep(2.0 - np.abs(np.asarray(x, dtype=float)))


def cis(x: np.ndarray) -> np.ndarray:
    """exp(i x) for real x."""
    out = np.empty(np.shape(x), dtype=complex)
    np.cos(x, out=out.real)
    np.sin(x, out=out.imag)
    return out


def trilinear(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """conj(a) b c + a conj(b) c + a b conj(c)."""
    return np.conj(a) * b * c + a * np.conj(b) * c + a * b * np.conj(c)


class Flow:
    """Cached one-dimensional phase factors of e^{itA} for a grid."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.xi2 = grid.xi**2
        self.aeta = np.abs(grid.eta)

    def factors(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        return np.exp(-1j * t * self.xi2), np.exp(-1j * t * self.aeta)

    def apply(self, c: np.ndarray, t: float) -> np.ndarray:
        px, py = self.factors(t)
        return c * px[:, None] * py[None, :]


def _steps(T: float, dt: float, save_every: int) -> int:
    if dt <= 0 or T < 0:
        raise ValueError("need dt > 0 and T >= 0")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(T, dt):
        raise ValueError(f"T={T} is not a multiple of dt={dt}")
    if n % save_every:
        raise ValueError(f"{n} steps per side is not a multiple of save_every={save_every}")
    return n


class _Recorder:
    """Collects snapshots at multiples of the stride on both sides of 0."""

    def __init__(self, grid: Grid, nsteps: int, save_every: int, c0: np.ndarray):
        self.grid = grid
        self.stride = save_every
        m = nsteps // save_every
        self.m = m
        self.buf = np.empty((2 * m + 1,) + grid.shape, dtype=complex)
        self.buf[m] = c0
        self.last = {1: 0, -1: 0}

    def offer(self, n: int, sign: int, c: np.ndarray) -> None:
        if n % self.stride == 0:
            j = n // self.stride
            self.buf[self.m + sign * j] = c
            self.last[sign] = j

    def trajectory(self, dt: float, flags: dict) -> Trajectory:
        lo, hi = self.m - self.last[-1], self.m + self.last[1]
        times = dt * self.stride * np.arange(-self.last[-1], self.last[1] + 1)
        return Trajectory(self.grid, times, self.buf[lo : hi + 1], dt, flags)


# -- full nonlinear flow ----------------------------------------------------


def _dealias_mask(grid: Grid) -> np.ndarray:
    kx = np.abs(sfft.fftfreq(grid.nx, d=1.0 / grid.nx))
    ky = np.abs(sfft.rfftfreq(grid.ny, d=1.0 / grid.ny))
    return (kx[:, None] < grid.nx / 3) & (ky[None, :] < grid.ny / 3)


def solve_nls(f0: Field, T: float, dt: float, mu: float, *, dealias: bool = True, save_every: int = 1,
              ceiling: float = 1e6, on_step: Callable | None = None) -> Trajectory:
    """Strang splitting for i u_t + A u = mu |u|^2 u.

    The nonlinear substep multiplies by exp(-i mu V h) with V = |u|^2, which
    solves the pointwise ODE exactly because |u| is invariant under it.  With
    ``dealias`` the potential V is passed through the 2/3-rule filter first;
    the substep is still a pure phase, so mass is conserved to roundoff.
    ``on_step(n, sign, coeffs)`` is called at every step time.
    """
    g = f0.grid
    nsteps = _steps(T, dt, save_every)
    flow = Flow(g)
    mask = _dealias_mask(g) if dealias else None
    c0 = f0.fourier().copy() if f0.is_fourier else fft2(f0.values)
    rec = _Recorder(g, nsteps, save_every, c0)
    if on_step is not None:
        on_step(0, 0, c0)

    def phase(u: np.ndarray, h: float) -> np.ndarray:
        V = u.real**2 + u.imag**2
        if mask is not None:
            V = sfft.irfft2(sfft.rfft2(V) * mask, s=V.shape)
        return u * cis(-mu * h * V)

    # between samples that nobody looks at, the trailing half phase of one
    # step and the leading half phase of the next are fused into one
    flags = {"blowup": False}
    state = {1: ifft2(c0), -1: ifft2(c0)}
    fused = {1: False, -1: False}
    alive = {1: True, -1: True}
    for n in range(1, nsteps + 1):
        sync = on_step is not None or n % save_every == 0 or n == nsteps
        for sign in (1, -1):
            if not alive[sign]:
                continue
            h = sign * dt
            u = state[sign] if fused[sign] else phase(state[sign], h / 2)
            c = flow.apply(fft2(u), h)
            u = ifft2(c)
            if sync:
                u = phase(u, h / 2)
                fused[sign] = False
            else:
                u = phase(u, h)
                fused[sign] = True
            state[sign] = u
            if np.abs(u).max() > ceiling or not np.all(np.isfinite(u)):
                flags["blowup"] = True
                flags[f"blowup_t{'+' if sign > 0 else '-'}"] = n * h
                alive[sign] = False
                continue
            if on_step is not None or n % save_every == 0:
                c = fft2(u)
                rec.offer(n, sign, c)
                if on_step is not None:
                    on_step(n, sign, c)
        if not any(alive.values()):
            break
    return rec.trajectory(dt, flags)


# -- adapted linear flow ----------------------------------------------------


def potential_kick(F: np.ndarray, phi: np.ndarray, mu: float, h: float) -> np.ndarray:
    """Exact solution after time h of i F' = mu (conj(F) phi^2 + 2 |phi|^2 F), phi frozen.

    Writing p = 2|phi|^2 and q = phi^2, the pair (F, conj F) evolves by the
    matrix mu [[-ip, -iq], [i conj q, ip]] whose square is -3 mu^2 |phi|^4 I,
    so the exponential is cos(c) I + sin(c)/w K with w = sqrt(3)|phi|^2 and
    c = mu w h.
    """
    a2 = np.abs(phi) ** 2
    w = np.sqrt(3.0) * a2
    c = mu * w * h
    # sin(c)/w = mu h sinc(c/pi) stays finite where phi vanishes
    s = mu * h * np.sinc(c / np.pi)
    return np.cos(c) * F - 1j * s * (2.0 * a2 * F + phi * phi * np.conj(F))


def _potential_source(potential) -> Callable[[float], np.ndarray]:
    if isinstance(potential, Trajectory):
        return lambda t: ifft2(potential.coeffs_at(t))
    if isinstance(potential, Field):
        u = potential.physical()
        return lambda t: u
    return potential


def solve_adapted_linear(init: Field, potential, T: float, dt: float, mu: float = 1.0, *,
                         save_every: int = 1, on_step: Callable | None = None) -> Trajectory:
    """(i d_t + A) F = mu N(F, phi, phi) with N(F, phi, phi) = conj(F) phi^2 + 2|phi|^2 F.

    ``potential`` is a Trajectory, a Field (time independent), or a callable
    t -> physical array.  Each step is the symmetric composition
    K(phi(t+h), h/2) e^{ihA} K(phi(t), h/2), second order and real-linear in
    the initial datum.
    """
    g = init.grid
    nsteps = _steps(T, dt, save_every)
    flow = Flow(g)
    phi_at = _potential_source(potential)
    c0 = init.fourier().copy() if init.is_fourier else fft2(init.values)
    rec = _Recorder(g, nsteps, save_every, c0)
    if on_step is not None:
        on_step(0, 0, c0)
    phi0 = phi_at(0.0)
    state = {1: (ifft2(c0), phi0), -1: (ifft2(c0), phi0)}
    for n in range(1, nsteps + 1):
        for sign in (1, -1):
            h = sign * dt
            F, phi_prev = state[sign]
            F = potential_kick(F, phi_prev, mu, h / 2)
            c = flow.apply(fft2(F), h)
            phi_next = phi_at(n * h)
            F = potential_kick(ifft2(c), phi_next, mu, h / 2)
            state[sign] = (F, phi_next)
            c = fft2(F)
            rec.offer(n, sign, c)
            if on_step is not None:
                on_step(n, sign, c)
    return rec.trajectory(dt, {})


# -- forced remainder -------------------------------------------------------


@dataclass
class RemainderContext:
    """Inputs of the remainder equation at the step times t_n = n dt.

    ``fields(t)`` returns physical arrays (F_N, u_{N/2}, P_{<=N^gamma} u_{N/2}).
    ``theta_F`` and ``theta_Fw`` are indexed by n >= 0 (they depend on |t| only).
    ``theta_w(n)`` is queried at the start of each step, after the monitor has
    seen all samples up to step n.
    """

    fields: Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray]]
    theta_F: np.ndarray
    theta_Fw: np.ndarray
    theta_w: Callable[[int], float] = lambda n: 1.0
    mu: float = 1.0


def remainder_forcing(F, u, Pu, w, tF: float, tw: float, tL: float) -> np.ndarray:
    """The nine-term truncated forcing; with all cutoffs 1 it equals
    |u+F+w|^2 (u+F+w) - |u|^2 u - N(F, Pu, Pu).

    Collected in powers of w it reads S + N(w, a, a) + tw N(a, w, w) + tw^2 |w|^2 w
    with a = tF F + tL u and S the w-independent source.
    """
    a = tF * F + tL * u
    return forcing_source(F, u, Pu, tF, tL) + forcing_response(a, w, tw)


def forcing_source(F, u, Pu, tF: float, tL: float) -> np.ndarray:
    aF = _abs2(F)
    out = (tF * tF) * (aF * F)
    out += (tL * tF) * (2.0 * aF * u + F * F * np.conj(u))
    out += (tL * tL) * (2.0 * (_abs2(u) - _abs2(Pu)) * F + (u * u - Pu * Pu) * np.conj(F))
    return out


def forcing_response(a, w, tw: float) -> np.ndarray:
    aw = _abs2(w)
    out = 2.0 * _abs2(a) * w + a * a * np.conj(w)
    out += tw * (2.0 * aw * a + w * w * np.conj(a))
    out += (tw * tw) * (aw * w)
    return out


def remainder_forcing_reference(F, u, Pu, w, tF: float, tw: float, tL: float) -> np.ndarray:
    """Term-by-term version of :func:`remainder_forcing` written with the trilinear form."""
    out = tF * tF * (np.abs(F) ** 2 * F)
    out += tF * tF * trilinear(F, F, w)
    out += tF * tw * trilinear(F, w, w)
    out += tw * tw * (np.abs(w) ** 2 * w)
    out += tL * tL * trilinear(u, u, w)
    out += tL * tw * trilinear(u, w, w)
    out += 2.0 * tL * tF * trilinear(u, w, F)
    out += tL * tF * trilinear(F, F, u)
    out += tL * tL * (trilinear(F, u, u) - trilinear(F, Pu, Pu))
    return out


def _abs2(a: np.ndarray) -> np.ndarray:
    return a.real**2 + a.imag**2


def solve_remainder(ctx: RemainderContext, grid: Grid, T: float, dt: float, *, save_every: int = 1,
                    on_step: Callable | None = None) -> Trajectory:
    """w(0) = 0, (i d_t + A) w = mu Ntilde(w), by Heun's method in the
    interaction picture v = e^{-itA} w.

    Written back in terms of w, one step from t to t+h reads
        w* = e^{ihA}(w + h G(t, w)),
        w' = e^{ihA}(w + h/2 G(t, w)) + h/2 G(t+h, w*),
    with G = -i mu FFT(Ntilde).  Cutoffs in G(t+h, .) use theta_w from step
    start.
    """
    nsteps = _steps(T, dt, save_every)
    flow = Flow(grid)
    mu = ctx.mu
    c0 = np.zeros(grid.shape, dtype=complex)
    rec = _Recorder(grid, nsteps, save_every, c0)
    if on_step is not None:
        on_step(0, 0, c0)

    # the w-independent part of the forcing is shared by the two stages that
    # meet at each step time
    cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def G(n: int, sign: int, w_phys: np.ndarray, tw: float) -> np.ndarray:
        key = (n, sign)
        if key not in cache:
            F, u, Pu = ctx.fields(sign * n * dt)
            tF, tL = ctx.theta_F[n], ctx.theta_Fw[n]
            cache.pop((n - 2, sign), None)
            cache[key] = (forcing_source(F, u, Pu, tF, tL), tF * F + tL * u)
        src, a = cache[key]
        return -1j * mu * fft2(src + forcing_response(a, w_phys, tw))

    state = {1: c0.copy(), -1: c0.copy()}
    for n in range(1, nsteps + 1):
        tw = float(ctx.theta_w(n - 1))
        for sign in (1, -1):
            h = sign * dt
            c = state[sign]
            g0 = G(n - 1, sign, ifft2(c), tw)
            star = flow.apply(c + h * g0, h)
            g1 = G(n, sign, ifft2(star), tw)
            c = flow.apply(c + 0.5 * h * g0, h) + 0.5 * h * g1
            state[sign] = c
            rec.offer(n, sign, c)
            if on_step is not None:
                on_step(n, sign, c)
    return rec.trajectory(dt, {})


# -- Duhamel quadrature -----------------------------------------------------


def duhamel(forcing: Trajectory, t: float) -> Field:
    """int_0^t e^{i(t-s)A} f(s) ds by the trapezoid rule in the interaction picture.

    Nodes are the snapshot times between 0 and t, plus t itself (interpolated
    if it is not a snapshot time).
    """
    if abs(t) > forcing.T * (1 + 1e-12) + 1e-15:
        raise ValueError(f"|t|={abs(t)} exceeds the forcing interval T={forcing.T}")
    g = forcing.grid
    flow = Flow(g)
    if t == 0:
        return Field(g, np.zeros(g.shape, dtype=complex), FOURIER)
    ts = forcing.times
    inside = (ts * np.sign(t) > 0) & (np.abs(ts) < abs(t) * (1 - 1e-12))
    nodes = np.concatenate([[0.0], ts[inside], [t]])
    nodes = nodes[np.argsort(np.abs(nodes))]
    acc = np.zeros(g.shape, dtype=complex)
    prev = None
    for i, s in enumerate(nodes):
        v = flow.apply(forcing.coeffs_at(float(s)), -s)
        if prev is not None:
            acc += 0.5 * (s - nodes[i - 1]) * (v + prev)
        prev = v
    return Field(g, flow.apply(acc, t), FOURIER)


# -- cutoffs ----------------------------------------------------------------


@dataclass
class CutoffState:
    """Cutoff values at t_n = n dt, n = 0..nsteps (each is even in t)."""

    times: np.ndarray
    theta_F: np.ndarray
    theta_w: np.ndarray
    theta_Fw: np.ndarray
    arguments: dict = field(default_factory=dict)

    @property
    def frozen_after(self) -> float | None:
        below = (self.theta_F < 1) | (self.theta_w < 1) | (self.theta_Fw < 1)
        if not np.any(below):
            return None
        return float(self.times[np.argmax(below)])

    def all_one(self) -> bool:
        return self.frozen_after is None


def running_cutoffs(view, n: int) -> tuple[float, float, float]:
    """(theta_F, theta_w, theta_Fw) at t_n from a view exposing the running
    arguments ``arg_F(n)``, ``arg_w(n)`` and ``arg_Fw(n)``."""
    return (float(cutoff_theta(view.arg_F(n))), float(cutoff_theta(view.arg_w(n))),
            float(cutoff_theta(view.arg_Fw(n))))


def duhamel_trajectory(forcing: Trajectory) -> Trajectory:
    """The Duhamel integral int_0^t e^{i(t-s)A} f(s) ds at every snapshot time."""
    g = forcing.grid
    flow = Flow(g)
    ts = forcing.times
    i0 = forcing.i0
    if ts[i0] != 0.0:
        raise ValueError("forcing trajectory must contain t = 0")
    v = np.array([flow.apply(c, -t) for c, t in zip(forcing.coeffs, ts)])
    acc = np.zeros_like(v)
    for step in (1, -1):
        i = i0 + step
        while 0 <= i < len(ts):
            acc[i] = acc[i - step] + 0.5 * (ts[i] - ts[i - step]) * (v[i] + v[i - step])
            i += step
    out = np.array([flow.apply(a, t) for a, t in zip(acc, ts)])
    return Trajectory(g, ts.copy(), out, forcing.dt, {})
