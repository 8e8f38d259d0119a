"""Direct evaluation of the thermoelastic operator on field jets.

The operator is assembled from covariant divergence, gradient and
Laplace-Beltrami formulas, independently of the factorised symbol matrices.
An optional tangential frequency ``eta`` evaluates the operator on
``exp(i eta . x') U``: field derivatives become ``d_k + i eta_k`` while
coefficient derivatives stay plain.
"""

from __future__ import annotations

from math import factorial, prod

import numpy as np

from ..algebra.jets import Jet, monomials
from ..errors import InsufficientJetOrder
from ..geometry import MetricJet
from ..material import MaterialJet


def apply_Tg(g: MetricJet, m: MaterialJet, u: Jet, theta: Jet, eta=None) -> tuple[Jet, Jet]:
    """Apply the thermoelastic operator to ``(u, theta)``.

    Parameters
    ----------
    g, m
        Metric and material jets.
    u : Jet
        Contravariant displacement components, tail ``(n,)``.
    theta : Jet
        Temperature jet (scalar tail).
    eta : array_like, optional
        Tangential frequency of a plane-wave factor ``exp(i eta . x')``.

    Returns
    -------
    (row, heat) : tuple of Jet
        Mechanical rows (tail ``(n,)``) and the thermal row, truncated to the
        orders where every input is valid.
    """
    n = g.dim
    if min(u.space.xorder, theta.space.xorder) < 2:
        raise InsufficientJetOrder("field jets need order >= 2")
    eta = np.zeros(n) if eta is None else np.r_[np.asarray(eta, dtype=float), 0.0]
    full = range(n)

    def D(f: Jet, k: int) -> Jet:
        out = f.dx(k)
        return out + 1j * eta[k] * f if eta[k] != 0 else out

    gi = g.full_inverse
    gl = g.full
    gam = g.christoffel
    lam, mu, alpha, beta = m.lam, m.mu, m.alpha, m.beta
    zero = Jet.zeros(u.space)

    def S(items):
        return sum(items, zero)

    us = [u[j] for j in full]
    du = [[D(us[j], k) for k in full] for j in full]  # du[j][k] = D_k u^j

    div = S(du[j][j] for j in full) + S(gam[j, j, k] * us[k] for j in full for k in full)

    def lap(f: Jet) -> Jet:
        return S(
            gi[j, k] * (D(D(f, j), k) - S(gam[l, j, k] * D(f, l) for l in full))
            for j in full
            for k in full
        )

    def grad_up(f: Jet, j: int, deriv=D) -> Jet:
        return S(gi[j, k] * deriv(f, k) for k in full)

    def cdx(f: Jet, k: int) -> Jet:
        return f.dx(k)

    # covariant derivatives of u
    cov_up = [[du[j][k] + S(gam[j, k, l] * us[l] for l in full) for k in full] for j in full]
    u_low = [S(gl[k, l] * us[l] for l in full) for k in full]
    cov_low = [
        [D(u_low[k], mm) - S(gam[p, mm, k] * u_low[p] for p in full) for k in full]
        for mm in full
    ]  # cov_low[m][k] = nabla_m u_k

    div_grad = [grad_up(div, j) for j in full]
    grad_mu = [grad_up(mu, k, cdx) for k in full]
    rows = []
    for j in full:
        v = mu * lap(us[j]) + (lam + mu) * div_grad[j] + grad_up(lam, j, cdx) * div
        v = v + S(
            grad_mu[k] * (cov_up[j][k] + S(gi[j, mm] * cov_low[mm][k] for mm in full))
            for k in full
        )
        v = v + mu * S(
            gi[k, l] * (2 * S(gam[j, k, mm] * du[mm][l] for mm in full)
                        + S(gam[j, k, l].dx(mm) * us[mm] for mm in full))
            for k in full
            for l in full
        )
        v = v + m.rho * m.omega**2 * us[j] - beta * grad_up(theta, j)
        rows.append(v)
    heat = 1j * m.omega * m.theta0 * beta * div + alpha * lap(theta)
    heat = heat + 1j * m.omega * m.c_heat * theta
    return Jet.stack(rows, axis=-1), heat


def apply_symbol_operator(g, m, sym_b, sym_c, u: Jet, theta: Jet, eta) -> Jet:
    """``A (d_n^2 + Op(b) d_n + Op(c))`` applied to ``exp(i eta . x') (u, theta)``.

    ``sym_b`` and ``sym_c`` are bi-jets expanded around ``xi' = eta`` with
    xi-order at least 2, so the polynomial symbols are represented exactly.
    Returns the stacked ``(n+1)``-vector jet (phase factor removed).
    """
    from ..operator_symbols import matrix_A

    n = g.dim
    U = Jet.stack([u[j] for j in range(n)] + [theta], axis=-1)
    L = sym_b.space.xiorder

    def op(sym: Jet, f: Jet) -> Jet:
        total = None
        for K in monomials(n - 1, min(L, 2)):
            K = tuple(int(k) for k in K)
            coef = sym.xi_slice(K)
            # D^K f with D = -i d_x'
            df = f
            for a, k in enumerate(K):
                for _ in range(k):
                    df = -1j * df.dx(a)
            fact = prod(factorial(k) for k in K)
            term = (coef @ df.expand(1)).reshape(*df.tail) * (1.0 / fact)
            total = term if total is None else total + term
        return total

    dn = U.dx(n - 1)
    inner = dn.dx(n - 1) + op(sym_b, dn) + op(sym_c, U)
    A = matrix_A(m)
    return (A @ inner.expand(1)).reshape(*inner.tail)
