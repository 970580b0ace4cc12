"""Regularity exponents: feasibility and minimization of s.

Unknowns x = (s, sigma', sigma, nu) for a fixed gamma in (0, 1), subject to

    1.  sigma' - s - gamma sigma + gamma/2 <= 0
    2.  nu - gamma sigma' - s             <= 0
    3.  nu - sigma' - gamma nu            <= 0
    4.  sigma - nu                        <= -1/2
    5.  sigma - sigma'                    <= 0

and x >= 0.  The LP is solved by enumerating every vertex (4 of the 9
constraints active), vectorized over the gamma grid.  Only vertices with s > 0
and nu > 0 can be feasible, which cuts the enumeration to 35 subsets.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np

N_CONSTRAINTS = 5


@dataclass(frozen=True)
class ExponentTuple:
    s: float
    sigma_p: float
    sigma: float
    nu: float
    gamma: float
    active: tuple = ()

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.sigma_p, self.sigma, self.nu])


def constraint_matrix(gamma):
    """A (.., 9, 4) and b (.., 9) with A x <= b; rows 0-4 are the five
    constraints, rows 5-8 the sign conditions."""
    g = np.asarray(gamma, dtype=float)[..., None]
    one, zero = np.ones_like(g), np.zeros_like(g)
    rows = [
        np.concatenate([-one, one, -g, zero], -1),
        np.concatenate([-one, -g, zero, one], -1),
        np.concatenate([zero, -one, zero, 1 - g], -1),
        np.concatenate([zero, zero, one, -one], -1),
        np.concatenate([zero, -one, one, zero], -1),
    ]
    A = np.stack(rows + [np.broadcast_to(-np.eye(4)[i], g.shape[:-1] + (4,)) for i in range(4)], -2)
    b = np.concatenate([-g / 2, zero, zero, -0.5 * one, zero, zero, zero, zero, zero], -1)
    return A, b


def slacks(t: ExponentTuple) -> np.ndarray:
    """Values of the five constraint left-hand sides minus right-hand sides."""
    A, b = constraint_matrix(t.gamma)
    return (A @ t.as_array() - b)[:N_CONSTRAINTS]


def feasible(t: ExponentTuple, margin: float = 0.0) -> tuple[bool, np.ndarray]:
    sl = slacks(t)
    return bool(np.all(sl <= -margin)), sl


# Every feasible point has nu >= 1/2 (constraint 4 with sigma >= 0) and s > 0
# (s = 0 in constraint 1 would force sigma' (1 - gamma) <= -gamma/2 via
# constraint 5), so vertices where s >= 0 or nu >= 0 is active are never
# feasible and their rows (5 and 8) are left out of the enumeration.
_CANDIDATE_ROWS = (0, 1, 2, 3, 4, 6, 7)
_SUBSETS = np.array(list(itertools.combinations(_CANDIDATE_ROWS, 4)))


def _solve_batch(gammas: np.ndarray, tol: float = 1e-9):
    A, b = constraint_matrix(gammas)  # (G, 9, 4), (G, 9)
    As = A[:, _SUBSETS]  # (G, S, 4, 4)
    bs = b[:, _SUBSETS]  # (G, S, 4)
    det = np.linalg.det(As)
    ok = np.abs(det) > 1e-12
    As = np.where(ok[..., None, None], As, np.eye(4))
    x = np.linalg.solve(As, bs[..., None])[..., 0]  # (G, S, 4)
    viol = np.einsum("gcj,gsj->gsc", A, x) - b[:, None, :]
    ok &= np.all(viol <= tol, axis=-1)
    s = np.where(ok, x[..., 0], np.inf)
    best = np.argmin(s, axis=1)
    idx = np.arange(len(gammas))
    xb = x[idx, best]
    vb = viol[idx, best]
    return s[idx, best], xb, vb


def _tuple(x: np.ndarray, gamma: float, viol: np.ndarray, tol: float = 1e-9) -> ExponentTuple:
    active = tuple(int(i) + 1 for i in range(N_CONSTRAINTS) if abs(viol[i]) <= tol)
    return ExponentTuple(float(x[0]), float(x[1]), float(x[2]), float(x[3]), float(gamma), active)


def minimize_s(gamma: float) -> ExponentTuple:
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    s, x, v = _solve_batch(np.array([gamma]))
    if not np.isfinite(s[0]):
        raise ValueError(f"constraint system infeasible at gamma={gamma}")
    return _tuple(x[0], gamma, v[0])


def gamma_grid(step: float) -> np.ndarray:
    n = int(round(1.0 / step))
    return np.arange(1, n) * (1.0 / n)


def scan(step: float, chunk: int = 2000) -> list[ExponentTuple]:
    gs = gamma_grid(step)
    out = []
    for i in range(0, len(gs), chunk):
        part = gs[i : i + chunk]
        s, x, v = _solve_batch(part)
        out.extend(_tuple(x[j], part[j], v[j]) for j in range(len(part)))
    return out


def optimize_over_gamma(grid_step: float = 1e-4) -> ExponentTuple:
    rows = scan(grid_step)
    return min(rows, key=lambda t: t.s)


def closed_form(gamma: float) -> ExponentTuple:
    """Vertex with constraints 1-4 active."""
    nu = 1.0 / (1.0 + gamma)
    return ExponentTuple((1 - gamma + gamma**2) / (1 + gamma), nu * (1 - gamma), nu - 0.5, nu, gamma, (1, 2, 3, 4))


def analytic_optimum() -> ExponentTuple:
    """Minimizer of (1 - g + g^2)/(1 + g): g^2 + 2g - 2 = 0."""
    r3 = np.sqrt(3.0)
    return ExponentTuple(2 * r3 - 3, 2 / r3 - 1, 1 / r3 - 0.5, 1 / r3, r3 - 1, (1, 2, 3, 4))


COLUMNS = ["gamma", "s", "sigma_p", "sigma", "nu", "active_set"]


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for t in rows:
        w.writerow([repr(t.gamma), repr(t.s), repr(t.sigma_p), repr(t.sigma), repr(t.nu),
                    "".join(str(a) for a in t.active)])
    return buf.getvalue()
