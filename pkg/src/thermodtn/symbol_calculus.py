"""Composition of matrix symbols, structure matrices and the closed-form Sylvester solve."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, prod

import numpy as np

from .algebra.jets import Jet, monomials
from .errors import InsufficientJetOrder, ResidualTooLarge
from .geometry import Covector, MetricJet
from .material import MaterialJet
from .operator_symbols import symbol_b

SYLVESTER_RTOL = 1e-10


def compose_terms(a: Jet, b: Jet, order: int) -> Jet:
    """Sum of ``(-i)^|J| / J! d_xi^J a . d_x'^J b`` over ``|J| = order``.

    ``order`` is ``deg(a) + deg(b) - target_degree``.  Symbols independent of
    ``x'`` (no active tangential coordinate) give zero for ``order >= 1``.
    """
    s = a.space
    n = s.dim
    if order < 0:
        raise ValueError("composition order must be non-negative")
    if order == 0:
        return a @ b
    if a.space.xiorder < order or b.space.xorder < order:
        raise InsufficientJetOrder(
            f"composition of order {order} needs xi-order >= {order} (have {a.space.xiorder}) "
            f"and x-order >= {order} (have {b.space.xorder})"
        )
    tangential = [k for k in s.coords if k < n - 1]
    if not tangential:
        out_space = s.with_orders(
            min(a.space.xorder, b.space.xorder - order), min(a.space.xiorder - order, b.space.xiorder)
        )
        tail = np.broadcast_shapes(a.tail[:-2], b.tail[:-2]) + (a.tail[-2], b.tail[-1])
        return Jet.zeros(out_space, tail)
    total = None
    for J in monomials(n - 1, order)[-_count(n - 1, order):]:
        J = tuple(int(v) for v in J)
        if any(J[k] for k in range(n - 1) if k not in s.coords):
            continue
        coef = (-1j) ** order / prod(factorial(k) for k in J)
        term = (a.dxi_multi(J) @ b.dx_multi(J + (0,))) * coef
        total = term if total is None else total + term
    return total


def _count(nvars: int, degree: int) -> int:
    return comb(nvars + degree - 1, degree)


def kappa(m_lam: Jet, m_mu: Jet) -> Jet:
    """``(lam + mu) / (lam + 3 mu)``."""
    return (m_lam + m_mu) / (m_lam + 3 * m_mu)


@dataclass
class Structure:
    """Principal-level data shared by every Sylvester solve at one base point."""

    s: Jet
    kappa: Jet
    F1: Jet
    F2: Jet
    q1: Jet
    b1: Jet

    @property
    def left(self) -> Jet:
        return self.q1 - self.b1


def structure_matrices(g: MetricJet, m: MaterialJet, xi: Covector) -> tuple[Jet, Jet]:
    """Nilpotent structure matrices ``(F1, F2)``."""
    L = xi.norm.space.xiorder
    n = g.dim
    lam, mu = m.lam.lift(L), m.mu.lift(L)
    s = xi.norm
    lo, up = xi.lower, xi.upper
    N = n - 1
    size = n + 1
    r1 = [[0] * size for _ in range(size)]
    r2 = [[0] * size for _ in range(size)]
    l2m = lam + 2 * mu
    for a in range(n - 1):
        for b in range(n - 1):
            v = up[..., a] * lo[..., b] / s
            r1[a][b] = v
            r2[a][b] = v
        r1[a][N] = 1j * up[..., a]
        r1[N][a] = 1j * lo[..., a]
        r2[a][N] = -1j * l2m / mu * up[..., a]
        r2[N][a] = -1j * mu / l2m * lo[..., a]
    r1[N][N] = -s
    r2[N][N] = -s
    return Jet.block(r1, like=s), Jet.block(r2, like=s)


def build_structure(g: MetricJet, m: MaterialJet, xi: Covector) -> Structure:
    F1, F2 = structure_matrices(g, m, xi)
    L = xi.norm.space.xiorder
    k = kappa(m.lam.lift(L), m.mu.lift(L))
    s = xi.norm
    n = g.dim
    eye = np.eye(n + 1)
    q1 = s.expand(2) * Jet.constant(s.space, eye) + k.expand(2) * F1
    b1, _ = symbol_b(g, m, xi)
    return Structure(s=s, kappa=k, F1=F1, F2=F2, q1=q1, b1=b1)


def sylvester_residual(E: Jet, X: Jet, st: Structure) -> float:
    """``||(q1 - b1) X + X q1 - E|| / ||E||`` on jet coefficients."""
    r = st.left @ X + X @ st.q1 - E
    ne = E.truncate(r.space.xorder, r.space.xiorder).coeff_norm()
    nr = r.coeff_norm()
    if ne == 0:
        return nr
    return nr / ne


def sylvester_solve(E: Jet, st: Structure, sign: int = 1, check: bool = True) -> Jet:
    """Closed-form solution of ``(q1 - b1) X + X q1 = E``.

    ``X = E/(2s) - k/(4s^2) (F2 E + E F1) + sign * k^2/(4s^3) F2 E F1`` with
    ``s = |xi'|`` and ``k = (lam + mu)/(lam + 3 mu)``.  ``sign = +1`` is the
    solution; ``sign = -1`` is kept for comparison only.

    Raises
    ------
    ResidualTooLarge
        If ``check`` and the relative residual exceeds ``1e-10`` (nonzero in
        exact mode).
    """
    s = st.s.expand(2)
    k = st.kappa.expand(2)
    inv_s = 1 / s
    F2E = st.F2 @ E
    X = E * inv_s * 0.5
    X = X - k * (inv_s * inv_s) * (F2E + E @ st.F1) * 0.25
    X = X + k * k * (inv_s * inv_s * inv_s) * (F2E @ st.F1) * (0.25 * sign)
    if check:
        res = sylvester_residual(E, X, st)
        limit = 0.0 if E.space.exact else SYLVESTER_RTOL
        if res > limit:
            raise ResidualTooLarge(f"Sylvester residual {res:.3e} exceeds {limit:g}")
    return X


def sylvester_bruteforce(E: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Solve ``left X + X right = E`` for plain matrices by vectorisation."""
    n = E.shape[-1]
    eye = np.eye(n)
    M = np.kron(left, eye) + np.kron(eye, right.T)
    return np.linalg.solve(M, E.reshape(-1)).reshape(n, n)
