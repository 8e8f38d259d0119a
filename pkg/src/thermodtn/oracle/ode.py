"""Normal-direction ODE form of the thermoelastic system for a flat metric.

For a field ``exp(i xi . x') U(x_n)`` with coefficients depending on ``x_n``
only, the operator reduces to ``P2 U'' + P1 U' + P0 U``.  The boundary
traction at ``x_n = 0`` (outward normal ``-e_n``) is ``-Bn U' - Bt U``.
"""

from __future__ import annotations

import numpy as np


def ode_matrices(xi, lam, mu, alpha, beta, dlam=0.0, dmu=0.0, rho=1.0, omega=0.0, theta0=1.0, c_heat=1.0):
    """Return ``(P2, P1, P0)`` at one point; coefficient arguments are scalars."""
    xi = np.asarray(xi, dtype=float)
    t = len(xi)
    size = t + 2
    N, T = t, t + 1
    s2 = float(xi @ xi)
    P2 = np.zeros((size, size), dtype=complex)
    P1 = np.zeros_like(P2)
    P0 = np.zeros_like(P2)
    for a in range(t):
        P2[a, a] = mu
        P1[a, a] = dmu
        P1[a, N] = 1j * (lam + mu) * xi[a]
        for b in range(t):
            P0[a, b] = -(lam + mu) * xi[a] * xi[b]
        P0[a, a] += -mu * s2 + rho * omega**2
        P0[a, N] = 1j * dmu * xi[a]
        P0[a, T] = -1j * beta * xi[a]
        P1[N, a] = 1j * (lam + mu) * xi[a]
        P0[N, a] = 1j * dlam * xi[a]
        P0[T, a] = -omega * theta0 * beta * xi[a]
    P2[N, N] = lam + 2 * mu
    P1[N, N] = dlam + 2 * dmu
    P1[N, T] = -beta
    P0[N, N] = -mu * s2 + rho * omega**2
    P2[T, T] = alpha
    P1[T, N] = 1j * omega * theta0 * beta
    P0[T, T] = -alpha * s2 + 1j * omega * c_heat
    return P2, P1, P0


def traction_matrices(xi, lam, mu, alpha, beta):
    """``(Bn, Bt)`` with Neumann data ``-(Bn U' + Bt U)`` at ``x_n = 0``."""
    xi = np.asarray(xi, dtype=float)
    t = len(xi)
    size = t + 2
    N, T = t, t + 1
    Bn = np.diag([mu] * t + [lam + 2 * mu, alpha]).astype(complex)
    Bt = np.zeros((size, size), dtype=complex)
    for a in range(t):
        Bt[a, N] = 1j * mu * xi[a]
        Bt[N, a] = 1j * lam * xi[a]
    Bt[N, T] = -beta
    return Bn, Bt
