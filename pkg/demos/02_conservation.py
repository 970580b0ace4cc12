"""Strang splitting for i u_t + (d_xx - |D_y|) u = |u|^2 u.

The nonlinear half step is a pure phase, so mass is conserved to roundoff
no matter how large the step.  Energy is only conserved up to the splitting
error, which is second order: halving dt divides the drift by four.
"""

import numpy as np

from hwlab.evolve import solve_nls
from hwlab.grid import from_function, make_grid
from hwlab.norms import energy, mass

g = make_grid(64, 512, 20.0, 64.0)
f0 = from_function(g, lambda X, Y: 1.5 * np.exp(-0.5 * X**2 - Y**2 / 8) * np.exp(0.5j * X))

prev = None
for dt in (0.02, 0.01, 0.005):
    tr = solve_nls(f0, 1.0, dt, 1.0, save_every=round(0.1 / dt), dealias=False)
    m = np.array([mass(tr.snapshot(i)) for i in range(len(tr))])
    e = np.array([energy(tr.snapshot(i), 1.0) for i in range(len(tr))])
    de = np.abs(e - e[tr.i0]).max()
    note = f"  ratio {prev / de:.3f}" if prev else ""
    print(f"dt={dt:<6} mass drift {np.abs(m / m[tr.i0] - 1).max():.1e}  energy drift {de:.3e}{note}")
    prev = de
