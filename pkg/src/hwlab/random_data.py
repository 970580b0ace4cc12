"""Unit-scale Wiener randomization in the y-frequency.

The Gaussian attached to frequency block k is drawn from a Philox stream keyed
by ``(master_seed, k)``; its real and imaginary parts are the first two draws
of that stream.  Nothing else enters the key, so g_k never depends on which
other blocks are requested or in what order.

Block conventions (half-open, so that dyadic blocks tile the integers):

* ``random_block(N)`` for N >= 2 sums N/2 <= |k| < N; ``random_block(1)`` is
  the k = 0 block.
* ``truncate_leq(n)`` sums |k| < n, so ``truncate_leq(N)`` equals the sum of
  ``random_block(M)`` over dyadic M <= N.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .grid import FOURIER, Field
from .multipliers import unit_symbol


@dataclass(frozen=True)
class RandomSpec:
    master_seed: int
    k_min: int = -64
    k_max: int = 64

    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)


def _zigzag(k: int) -> int:
    return 2 * k if k >= 0 else -2 * k - 1


def gaussian(seed: int, k: int) -> complex:
    """Normalized complex Gaussian g_k (E|g_k|^2 = 1) for the given seed."""
    gen = np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, _zigzag(int(k))]))
    re, im = gen.standard_normal(2)
    return complex(re, im) / np.sqrt(2.0)


def gaussians(seed: int, ks) -> np.ndarray:
    return np.array([gaussian(seed, k) for k in np.atleast_1d(ks)], dtype=complex)


def block_indices(N: int) -> np.ndarray:
    """Frequencies k carried by the dyadic block N (N=1 is the zero block)."""
    if N == 1:
        return np.array([0])
    pos = np.arange(N // 2, N)
    return np.concatenate([-pos[::-1], pos])


def leq_indices(n: int) -> np.ndarray:
    return np.arange(-(n - 1), n)


def _check_range(f0: Field, ks) -> None:
    ks = np.atleast_1d(ks)
    if ks.size and np.abs(ks).max() + 1 > f0.grid.eta_max:
        raise ValueError(f"randomized mode |k|={np.abs(ks).max()} exceeds the grid band")


def random_symbol(eta: np.ndarray, ks, gs) -> np.ndarray:
    """sum_k g_k phi_unit(eta - k), restricted to the lattice points near each k."""
    out = np.zeros(eta.shape, dtype=complex)
    for k, g in zip(np.atleast_1d(ks), np.atleast_1d(gs)):
        near = np.abs(eta - k) < 0.75
        out[near] += g * unit_symbol(eta[near], k)
    return out


def combine_blocks(f0: Field, ks, gs) -> Field:
    _check_range(f0, ks)
    sym = random_symbol(f0.grid.eta, ks, gs)
    return Field(f0.grid, f0.fourier() * sym[None, :], FOURIER)


def randomize(f0: Field, spec: RandomSpec) -> Field:
    ks = spec.ks()
    return combine_blocks(f0, ks, gaussians(spec.master_seed, ks))


def random_block(f0: Field, spec: RandomSpec, N: int) -> Field:
    ks = block_indices(N)
    return combine_blocks(f0, ks, gaussians(spec.master_seed, ks))


def truncate_leq(f0: Field, spec: RandomSpec, n: int) -> Field:
    ks = leq_indices(n)
    return combine_blocks(f0, ks, gaussians(spec.master_seed, ks))


def unit_gram(f0: Field, ks) -> np.ndarray:
    """Gram matrix <P_{1,k} f0, P_{1,k'} f0>_{L^2} for the listed k."""
    g = f0.grid
    c = f0.fourier()
    rows = [c * unit_symbol(g.eta, k)[None, :] for k in ks]
    G = np.empty((len(ks), len(ks)), dtype=complex)
    for i, a in enumerate(rows):
        for j in range(i, len(ks)):
            G[i, j] = g.area * np.vdot(a, rows[j])
            G[j, i] = np.conj(G[i, j])
    return G


def quadratic_norms(gram: np.ndarray, gs: np.ndarray) -> np.ndarray:
    """||sum_k g_k a_k||_{L^2} for each row of gs, given the Gram matrix of a_k."""
    q = np.einsum("si,ij,sj->s", gs.conj(), gram, gs).real
    return np.sqrt(np.maximum(q, 0.0))


def seed_gaussians(seeds, ks) -> np.ndarray:
    return np.array([gaussians(s, ks) for s in seeds])


@dataclass(frozen=True)
class KhintchineResult:
    p: int
    samples: int
    ratio: float
    stderr: float
    seed: int
    degenerate: bool = False

    def csv_row(self) -> list:
        return [self.p, self.samples, repr(self.ratio), repr(self.stderr), self.seed]


KHINTCHINE_COLUMNS = ["p", "samples", "ratio", "stderr", "seed"]


def khintchine_stats(a, p: int, samples: int, seed: int, chunk: int = 20000) -> KhintchineResult:
    """Monte-Carlo (E|sum g_k a_k|^p)^{1/p} / ||a||_2 for complex Gaussians g_k."""
    a = np.asarray(a, dtype=float)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return KhintchineResult(p, samples, 0.0, 0.0, seed, degenerate=True)
    gen = np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, 0]))
    total = total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        z = gen.standard_normal((m, a.size, 2)) / np.sqrt(2.0)
        s = (z[..., 0] + 1j * z[..., 1]) @ a
        v = np.abs(s) ** p
        total += v.sum()
        total_sq += (v**2).sum()
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0)
    se_mean = np.sqrt(var / samples)
    ratio = mean ** (1.0 / p) / norm
    stderr = mean ** (1.0 / p - 1.0) * se_mean / (p * norm)
    return KhintchineResult(p, samples, float(ratio), float(stderr), seed)


def khintchine_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(KHINTCHINE_COLUMNS)
    for r in results:
        w.writerow(r.csv_row())
    return buf.getvalue()


def decaying_datum(grid, s: float, excess: float = 0.4, amplitude: float = 0.1, k_cut: float | None = None,
                   width: float = 1.0) -> Field:
    """Deterministic f0 = G(x) H(y) with |H^(eta)| ~ <eta>^{-(s + 1/2 + excess)}.

    G is a Gaussian of the given width; H is real-valued, its spectrum is cut
    off smoothly at ``k_cut`` (default: the largest randomized frequency that
    fits on the grid), and f0 is scaled to the given L^2 norm.  Such a datum
    lies in H^{s'}_y for every s' < s + excess, so its randomization sits just
    below H^{s + excess} in y and nowhere better.
    """
    from .multipliers import japanese_symbol, smoothstep

    if k_cut is None:
        k_cut = float(np.floor(grid.eta_max - 1.0))
    eta = grid.eta
    taper = smoothstep(np.clip(2.0 * (k_cut - np.abs(eta)), 0.0, 1.0))
    # the sign (-1)^k moves the peak of H from y = -ly/2 to y = 0
    k = np.rint(eta * grid.ly / (2 * np.pi)).astype(int)
    Hhat = japanese_symbol(eta, -(s + 0.5 + excess)) * taper * np.where(k % 2, -1.0, 1.0)
    G = np.exp(-0.5 * (grid.x / width) ** 2)
    c = np.fft.fft(G, norm="forward")[:, None] * Hhat[None, :]
    norm = np.sqrt(grid.area * np.sum(np.abs(c) ** 2))
    return Field(grid, c * (amplitude / norm), FOURIER)


def block_norm_samples(f0: Field, blocks, seeds) -> np.ndarray:
    """||random_block(N)||_{L^2} for each seed (rows) and dyadic block N (columns)."""
    out = np.empty((len(seeds), len(blocks)))
    for j, N in enumerate(blocks):
        ks = block_indices(N)
        _check_range(f0, ks)
        out[:, j] = quadratic_norms(unit_gram(f0, ks), seed_gaussians(seeds, ks))
    return out


def block_correlations(samples: np.ndarray) -> np.ndarray:
    """Empirical correlation matrix of the block-norm columns."""
    return np.corrcoef(samples, rowvar=False)
