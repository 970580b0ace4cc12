"""Numerical laboratory for the cubic Schrodinger half-wave equation

    i u_t + (d_xx - |D_y|) u = mu |u|^2 u

with Wiener-randomized data on a periodic box."""

__version__ = "0.1.0"
