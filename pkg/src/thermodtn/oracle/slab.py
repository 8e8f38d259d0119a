"""Finite-difference DtN oracle on a slab ``0 < x_n < X`` with ``x_n``-dependent coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

from ..errors import InadmissibleMaterial, NotConverged, SolverSingular
from .halfspace import DtnSample
from .ode import ode_matrices, traction_matrices

DEFAULT_DECAY = 28.0
RATIO_RANGE = (3.0, 5.0)


@dataclass
class SlabMaterial:
    """Coefficients as polynomials in ``x_n`` plus scalar constants."""

    lam: Polynomial
    mu: Polynomial
    alpha: Polynomial
    beta: Polynomial
    rho: float = 1.0
    omega: float = 0.0
    theta0: float = 1.0
    c_heat: float = 1.0

    @classmethod
    def from_coefficients(cls, lam, mu, alpha, beta, **consts) -> "SlabMaterial":
        """Each coefficient is a scalar or a power-series list in ``x_n``."""
        wrap = lambda c: Polynomial(np.atleast_1d(np.asarray(c, dtype=float)))  # noqa: E731
        return cls(wrap(lam), wrap(mu), wrap(alpha), wrap(beta), **consts)

    @classmethod
    def from_material(cls, m) -> "SlabMaterial":
        """Taylor polynomials of the ``x_n``-only jets of a :class:`MaterialJet`."""
        n = m.space.dim
        polys = []
        for jet in (m.lam, m.mu, m.alpha, m.beta):
            if any(jet.depends_on(k) for k in range(n - 1)):
                raise ValueError("slab oracle needs coefficients depending on x_n only")
            coeffs = []
            for k in range(jet.space.xorder + 1):
                J = (0,) * (n - 1) + (k,)
                v = complex(jet.to_float().derivative(J))
                coeffs.append(v.real / float(np.prod(range(1, k + 1))))
            polys.append(Polynomial(coeffs))
        return cls(*polys, rho=float(m.rho), omega=float(m.omega), theta0=float(m.theta0),
                   c_heat=float(m.c_heat))

    def at(self, x):
        return {
            "lam": self.lam(x), "mu": self.mu(x), "alpha": self.alpha(x), "beta": self.beta(x),
            "dlam": self.lam.deriv()(x), "dmu": self.mu.deriv()(x),
        }


def _solve_grid(mat: SlabMaterial, xi, X: float, N: int) -> np.ndarray:
    size = len(xi) + 2
    h = X / N
    x = h * np.arange(1, N)
    c = mat.at(x)
    if np.any(c["mu"] <= 0) or np.any(c["alpha"] <= 0) or np.any(c["lam"] + c["mu"] < 0):
        raise InadmissibleMaterial("coefficients leave the admissible set inside the slab")
    nint = N - 1
    P2 = np.empty((nint, size, size), dtype=complex)
    P1 = np.empty_like(P2)
    P0 = np.empty_like(P2)
    for i in range(nint):
        P2[i], P1[i], P0[i] = ode_matrices(
            xi, c["lam"][i], c["mu"][i], c["alpha"][i], c["beta"][i], c["dlam"][i], c["dmu"][i],
            mat.rho, mat.omega, mat.theta0, mat.c_heat,
        )
    lower = P2 / h**2 - P1 / (2 * h)   # couples to U_{i-1}
    diag = -2 * P2 / h**2 + P0
    upper = P2 / h**2 + P1 / (2 * h)   # couples to U_{i+1}
    dim = nint * size
    Mat = sp.block_diag(list(diag), format="csr")
    if nint > 1:
        Mat = Mat + sp.bmat(
            [[None, sp.block_diag(list(upper[:-1]))], [sp.csr_matrix((size, size)), None]]
        )
        Mat = Mat + sp.bmat(
            [[None, sp.csr_matrix((size, size))], [sp.block_diag(list(lower[1:])), None]]
        )
    Mat = sp.csc_matrix(Mat)
    # Dirichlet data U_0 = e_k enters the first interior equation
    rhs = np.zeros((dim, size), dtype=complex)
    rhs[:size, :] = -lower[0]
    try:
        lu = spla.splu(Mat)
    except RuntimeError as err:
        raise SolverSingular(str(err)) from None
    U = lu.solve(rhs)
    if not np.all(np.isfinite(U)):
        raise SolverSingular("non-finite slab solution")
    U1, U2 = U[:size], U[size:2 * size]
    U0 = np.eye(size)
    dU = (-3 * U0 + 4 * U1 - U2) / (2 * h)
    c0 = mat.at(0.0)
    Bn, Bt = traction_matrices(xi, c0["lam"], c0["mu"], c0["alpha"], c0["beta"])
    return -(Bn @ dU + Bt)


def slab_dtn(mat: SlabMaterial, xi, X: float | None = None, N: int | None = None,
             check_ratio: bool = True) -> DtnSample:
    """DtN matrix of the slab with zero Dirichlet data at ``x_n = X``.

    The system is solved on grids ``N, 2N, 4N``.  The raw second-order values
    give the refinement ratio ``(L_N - L_2N) / (L_2N - L_4N)``, which must lie
    in ``[3, 5]``; two Richardson steps remove the ``h^2`` and ``h^3`` error
    terms of the one-sided boundary derivative.

    Raises
    ------
    NotConverged
        Ratio outside ``[3, 5]`` when ``check_ratio`` is set.
    SolverSingular
        Sparse factorisation failed.
    """
    xi = np.asarray(xi, dtype=float)
    k = float(np.linalg.norm(xi))
    X = DEFAULT_DECAY / k if X is None else X
    N = int(np.ceil(X * k / 0.01)) if N is None else N
    L1, L2, L4 = (_solve_grid(mat, xi, X, N * r) for r in (1, 2, 4))
    d12, d24 = L1 - L2, L2 - L4
    denom = np.linalg.norm(d24)
    ratio = float(np.linalg.norm(d12) / denom) if denom > 0 else float("inf")
    if check_ratio and not RATIO_RANGE[0] <= ratio <= RATIO_RANGE[1]:
        raise NotConverged(f"grid refinement ratio {ratio:.3f} outside {RATIO_RANGE}")
    R1, R2 = (4 * L2 - L1) / 3, (4 * L4 - L2) / 3
    Lam = (8 * R2 - R1) / 7
    meta = {"oracle": "slab", "X": X, "N": N, "ratio": ratio, "decay": float(np.exp(-k * X))}
    return DtnSample(xi, Lam, meta)


def thermal_scalar_dtn(alpha, k: float, omega: float = 0.0, c_heat: float = 1.0,
                       X: float | None = None, rtol: float = 1e-12) -> complex:
    """Thermal DtN entry for the decoupled equation ``alpha (th'' - k^2 th) + i omega c th = 0``.

    Solved through the Riccati variable ``r = th'/th`` integrated from ``X``
    toward the boundary, starting on the decaying branch; returns
    ``-alpha(0) r(0)``.
    """
    alpha = alpha if callable(alpha) else Polynomial(np.atleast_1d(alpha))
    X = DEFAULT_DECAY / k if X is None else X

    def kk(x):
        return np.sqrt(k**2 - 1j * omega * c_heat / alpha(x))

    def rhs(x, r):
        return kk(x) ** 2 - r**2

    sol = solve_ivp(rhs, (X, 0.0), [-kk(X)], method="DOP853", rtol=rtol, atol=1e-14)
    if not sol.success:
        raise NotConverged(sol.message)
    return complex(-alpha(0.0) * sol.y[0, -1])
