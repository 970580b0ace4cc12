"""Periodic box discretization and the discrete Fourier contract.

A :class:`Grid` samples the box [-lx/2, lx/2) x [-ly/2, ly/2) with ``nx`` by
``ny`` points.  Arrays are stored row-major with ``y`` contiguous, shape
``(nx, ny)``, so that y-only Fourier multipliers broadcast along the last
axis.

Fourier coefficients use the "forward" normalization: a field ``u`` and its
coefficients ``c`` are related by ``c = fft2(u) / (nx * ny)``, which makes a
unit-amplitude plane wave map to a single coefficient of modulus one.  With
this convention

    ||u||_{L^2}^2 = lx * ly * sum |c|^2.

Frequency lattices are kept in FFT order (``xi[j] = 2 pi j / lx`` with ``j``
wrapped into ``[-nx/2, nx/2)``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.fft as sfft

PHYSICAL = "physical"
FOURIER = "fourier"

_MAGIC = b"HWF1"


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    lx: float
    ly: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def cell(self) -> float:
        return self.dx * self.dy

    @property
    def d_eta(self) -> float:
        return 2 * np.pi / self.ly

    @property
    def eta_max(self) -> float:
        return np.pi * self.ny / self.ly

    @property
    def xi_max(self) -> float:
        return np.pi * self.nx / self.lx

    @cached_property
    def x(self) -> np.ndarray:
        return -self.lx / 2 + self.dx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -self.ly / 2 + self.dy * np.arange(self.ny)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2 * np.pi * sfft.fftfreq(self.nx, d=1.0 / self.nx) / self.lx

    @cached_property
    def eta(self) -> np.ndarray:
        return 2 * np.pi * sfft.fftfreq(self.ny, d=1.0 / self.ny) / self.ly

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def zeros(self, representation: str = PHYSICAL) -> "Field":
        return Field(self, np.zeros(self.shape, dtype=complex), representation)


def make_grid(nx: int, ny: int, lx: float, ly: float, *, unit_resolution: bool = True) -> Grid:
    """Validate and build a grid.

    ``unit_resolution`` enforces ``2 pi / ly <= 1/8`` so that every unit
    frequency interval holds at least eight lattice points.  The randomized
    data needs this; the concentrated profiles of the inflation experiments do
    not, and they switch it off.
    """
    for name, n in (("nx", nx), ("ny", ny)):
        if int(n) != n or not _is_pow2(int(n)):
            raise ValueError(f"{name}={n} is not a power of two")
    if not (lx > 0 and ly > 0):
        raise ValueError("box lengths must be positive")
    if unit_resolution and 2 * np.pi / ly > 0.125:
        raise ValueError(f"d_eta = {2 * np.pi / ly:.4g} exceeds 1/8; enlarge ly")
    return Grid(int(nx), int(ny), float(lx), float(ly))


def fft2(u: np.ndarray) -> np.ndarray:
    return sfft.fft2(u, norm="forward", workers=_workers())


def ifft2(c: np.ndarray) -> np.ndarray:
    return sfft.ifft2(c, norm="forward", workers=_workers())


def ifft_y(c: np.ndarray) -> np.ndarray:
    return sfft.ifft(c, axis=-1, norm="forward", workers=_workers())


def fft_y(u: np.ndarray) -> np.ndarray:
    return sfft.fft(u, axis=-1, norm="forward", workers=_workers())


def fft_x(u: np.ndarray) -> np.ndarray:
    return sfft.fft(u, axis=-2, norm="forward", workers=_workers())


def ifft_x(c: np.ndarray) -> np.ndarray:
    return sfft.ifft(c, axis=-2, norm="forward", workers=_workers())


_WORKERS = 1


def set_workers(n: int) -> None:
    global _WORKERS
    _WORKERS = max(1, int(n))


def _workers() -> int:
    return _WORKERS


@dataclass(frozen=True)
class Field:
    """Immutable complex field on a grid, tagged with its representation."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    representation: str = PHYSICAL

    def __post_init__(self):
        if self.representation not in (PHYSICAL, FOURIER):
            raise ValueError(f"unknown representation {self.representation!r}")
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if v is self.values and v.flags.writeable:
            v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def is_fourier(self) -> bool:
        return self.representation == FOURIER

    def physical(self) -> np.ndarray:
        return self.values if not self.is_fourier else ifft2(self.values)

    def fourier(self) -> np.ndarray:
        return self.values if self.is_fourier else fft2(self.values)

    def to_physical(self) -> "Field":
        return self if not self.is_fourier else transform_inverse(self)

    def to_fourier(self) -> "Field":
        return self if self.is_fourier else transform_forward(self)

    def with_values(self, values: np.ndarray, representation: str | None = None) -> "Field":
        return Field(self.grid, values, representation or self.representation)

    def __add__(self, other: "Field") -> "Field":
        _check_same(self, other)
        return Field(self.grid, self.values + other.values, self.representation)

    def __sub__(self, other: "Field") -> "Field":
        _check_same(self, other)
        return Field(self.grid, self.values - other.values, self.representation)

    def __mul__(self, a: complex) -> "Field":
        return Field(self.grid, self.values * a, self.representation)

    __rmul__ = __mul__


def _check_same(a: Field, b: Field) -> None:
    if a.grid != b.grid or a.representation != b.representation:
        raise ValueError("fields live on different grids or representations")


def transform_forward(f: Field) -> Field:
    if f.is_fourier:
        raise ValueError("field is already in Fourier representation")
    return Field(f.grid, fft2(f.values), FOURIER)


def transform_inverse(f: Field) -> Field:
    if not f.is_fourier:
        raise ValueError("field is already in physical representation")
    return Field(f.grid, ifft2(f.values), PHYSICAL)


def from_function(grid: Grid, fn) -> Field:
    X, Y = grid.mesh()
    return Field(grid, np.asarray(fn(X, Y), dtype=complex) * np.ones(grid.shape), PHYSICAL)


def l2_norm(f: Field) -> float:
    """L^2 norm, evaluated in whichever representation the field is held."""
    g = f.grid
    if f.is_fourier:
        return float(np.sqrt(g.area * np.sum(np.abs(f.values) ** 2)))
    return float(np.sqrt(g.cell * np.sum(np.abs(f.values) ** 2)))


def lp_norm(f: Field, p: float) -> float:
    u = np.abs(f.physical())
    if np.isinf(p):
        return float(u.max(initial=0.0))
    return float((f.grid.cell * np.sum(u**p)) ** (1.0 / p))


def mixed_xy_norm(f: Field, q: float, r: float) -> float:
    """L^q_x L^r_y norm: the inner L^r norm is taken along y for each x."""
    return _mixed(np.abs(f.physical()), f.grid, q, r)


def _mixed(a: np.ndarray, g: Grid, q: float, r: float) -> float:
    # a has trailing axes (x, y); leading axes are summed over independently
    if np.isinf(r):
        inner = a.max(axis=-1)
    else:
        inner = (g.dy * np.sum(a**r, axis=-1)) ** (1.0 / r)
    if np.isinf(q):
        return inner.max(axis=-1)
    return (g.dx * np.sum(inner**q, axis=-1)) ** (1.0 / q)


def write_field(path: str | Path, f: Field) -> None:
    """Binary dump: magic, u32 nx, u32 ny, f64 lx, f64 ly, then interleaved
    little-endian (re, im) doubles in physical representation, row-major."""
    g = f.grid
    u = np.ascontiguousarray(f.physical(), dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIdd", g.nx, g.ny, g.lx, g.ly))
        fh.write(u.tobytes())


def read_field(path: str | Path) -> Field:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    nx, ny, lx, ly = struct.unpack("<IIdd", data[4:28])
    u = np.frombuffer(data[28:], dtype="<c16")
    if u.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} samples, found {u.size}")
    grid = Grid(nx, ny, lx, ly)
    return Field(grid, u.reshape(nx, ny).astype(complex), PHYSICAL)
