"""Exact DtN multiplier of the constant-coefficient half-space ``x_n > 0``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ..errors import InadmissibleMaterial, ModeDeficiency, NearDefectiveModes
from .ode import ode_matrices, traction_matrices

COND_LIMIT = 1e10


@dataclass
class DtnSample:
    """Oracle DtN matrix at one tangential covector."""

    xi: np.ndarray
    Lam: np.ndarray
    meta: dict = field(default_factory=dict)


def halfspace_multiplier(
    xi, lam, mu, alpha, beta, rho=1.0, omega=0.0, theta0=1.0, c_heat=1.0, delta=1e-9
) -> DtnSample:
    """DtN matrix for constant coefficients and a flat metric.

    The second-order system ``P2 U'' + P1 U' + P0 U = 0`` is linearised to
    ``W' = K W`` with ``W = (U, U')``.  An ordered real-part Schur form puts
    the decaying invariant subspace first; its orthonormal basis ``[Zt; Zb]``
    gives ``U'(0) = Zb Zt^{-1} U(0)`` without computing eigenvectors, which
    stays well conditioned at the double root of the static case.

    Raises
    ------
    InadmissibleMaterial
        When ``mu > 0``, ``lam + mu >= 0`` or ``alpha > 0`` fails.
    ModeDeficiency
        When the number of decaying modes is not ``n + 1`` or a mode sits
        within ``delta |xi'|`` of the imaginary axis.
    NearDefectiveModes
        When the Dirichlet trace block has condition number above ``1e10``.
    """
    if not (mu > 0 and lam + mu >= 0 and alpha > 0):
        raise InadmissibleMaterial("half-space oracle needs mu > 0, lam + mu >= 0, alpha > 0")
    xi = np.asarray(xi, dtype=float)
    size = len(xi) + 2
    P2, P1, P0 = ode_matrices(xi, lam, mu, alpha, beta, 0.0, 0.0, rho, omega, theta0, c_heat)
    inv2 = np.linalg.inv(P2)
    K = np.block([[np.zeros((size, size)), np.eye(size)], [-inv2 @ P0, -inv2 @ P1]])
    guard = delta * float(np.linalg.norm(xi))
    ev = np.linalg.eigvals(K)
    n_decay = int(np.sum(ev.real < -guard))
    if n_decay != size or np.any(np.abs(ev.real) <= guard):
        raise ModeDeficiency(f"{n_decay} decaying modes, need {size}")
    _, Z, sdim = sla.schur(K, output="complex", sort=lambda z: z.real < -guard)
    Zt, Zb = Z[:size, :size], Z[size:, :size]
    cond = np.linalg.cond(Zt)
    if cond > COND_LIMIT:
        raise NearDefectiveModes(f"trace matrix condition {cond:.2e}")
    dU = Zb @ np.linalg.inv(Zt)
    Bn, Bt = traction_matrices(xi, lam, mu, alpha, beta)
    Lam = -(Bn @ dU + Bt)
    return DtnSample(xi, Lam, {"oracle": "halfspace", "trace_cond": float(cond), "sdim": int(sdim)})
