"""Time-indexed stacks of Fourier coefficients on a symmetric interval."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import FOURIER, Field, Grid, ifft2, read_field, write_field


@dataclass
class Trajectory:
    """Snapshots ``coeffs[i]`` (Fourier coefficients) at ``times[i]``.

    ``dt`` is the integrator step; snapshots may be spaced by a multiple of it.
    Off-grid queries interpolate linearly in the interaction picture
    v = e^{-itA} u, which is exact for free evolution and second order
    otherwise.
    """

    grid: Grid
    times: np.ndarray
    coeffs: np.ndarray
    dt: float
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.coeffs.shape != (len(self.times),) + self.grid.shape:
            raise ValueError("coefficient stack does not match times and grid")
        if len(self.times) and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def T(self) -> float:
        return float(min(-self.times[0], self.times[-1])) if len(self) else 0.0

    @property
    def i0(self) -> int:
        return int(np.argmin(np.abs(self.times)))

    def index(self, t: float, tol: float = 1e-12) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol * max(1.0, abs(t)):
            raise KeyError(f"t={t} is not a snapshot time")
        return i

    def snapshot(self, i: int) -> Field:
        return Field(self.grid, self.coeffs[i], FOURIER)

    def physical(self, i: int) -> np.ndarray:
        return ifft2(self.coeffs[i])

    def coeffs_at(self, t: float) -> np.ndarray:
        ts = self.times
        if t < ts[0] - 1e-12 or t > ts[-1] + 1e-12:
            raise ValueError(f"t={t} outside [{ts[0]}, {ts[-1]}]")
        j = int(np.searchsorted(ts, t))
        if j < len(ts) and abs(ts[j] - t) <= 1e-12 * max(1.0, abs(t)):
            return self.coeffs[j]
        if j > 0 and abs(ts[j - 1] - t) <= 1e-12 * max(1.0, abs(t)):
            return self.coeffs[j - 1]
        a, b = j - 1, j
        lam = (t - ts[a]) / (ts[b] - ts[a])
        return (1 - lam) * self._flowed(a, t - ts[a]) + lam * self._flowed(b, t - ts[b])

    def _flowed(self, i: int, tau: float) -> np.ndarray:
        g = self.grid
        px = np.exp(-1j * tau * g.xi**2)
        py = np.exp(-1j * tau * np.abs(g.eta))
        return self.coeffs[i] * px[:, None] * py[None, :]

    def at(self, t: float) -> Field:
        return Field(self.grid, self.coeffs_at(t), FOURIER)

    def restrict(self, T: float) -> "Trajectory":
        keep = np.abs(self.times) <= T * (1 + 1e-12) + 1e-15
        return Trajectory(self.grid, self.times[keep], self.coeffs[keep], self.dt, dict(self.flags))

    def _combine(self, other: "Trajectory", op) -> "Trajectory":
        if self.grid != other.grid or not np.array_equal(self.times, other.times):
            raise ValueError("trajectories are not snapshot-aligned")
        return Trajectory(self.grid, self.times, op(self.coeffs, other.coeffs), self.dt, {})

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def scaled(self, a: complex) -> "Trajectory":
        return Trajectory(self.grid, self.times, self.coeffs * a, self.dt, dict(self.flags))

    @classmethod
    def zeros_like(cls, other: "Trajectory") -> "Trajectory":
        return cls(other.grid, other.times.copy(), np.zeros_like(other.coeffs), other.dt, {})

    def export(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        names = []
        for i in range(len(self)):
            name = f"snap_{i:05d}.hwf"
            write_field(d / name, self.snapshot(i))
            names.append(name)
        manifest = {
            "dt": self.dt,
            "T": self.T,
            "times": [float(t) for t in self.times],
            "flags": {k: _jsonable(v) for k, v in self.flags.items()},
            "files": names,
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "Trajectory":
        d = Path(directory)
        m = json.loads((d / "manifest.json").read_text())
        fields = [read_field(d / name) for name in m["files"]]
        grid = fields[0].grid
        coeffs = np.stack([f.fourier() for f in fields])
        return cls(grid, np.array(m["times"]), coeffs, m["dt"], m["flags"])


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v
