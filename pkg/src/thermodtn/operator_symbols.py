"""Symbols of the matrices and operators in the factorised thermoelastic system.

All matrices are ``(n+1) x (n+1)`` with blocks ordered (tangential
displacement, normal displacement, temperature).  With 0-based indices the
tangential rows are ``0 .. n-2``, the normal row is ``N = n-1`` and the
thermal row is ``T = n``.  Derivatives are symbolised as ``d/dx_a -> i xi_a``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra.jets import Jet
from .geometry import Covector, MetricJet
from .material import MaterialJet


@dataclass
class SymbolContext:
    """Geometry, material and covector data lifted to a common bi-jet space."""

    n: int
    lam: Jet
    mu: Jet
    alpha: Jet
    beta: Jet
    ginv: Jet
    ginv_full: Jet
    gam: Jet
    xi: Jet
    xiu: Jet
    s: Jet
    rho: object
    omega: object
    theta0: object
    c_heat: object

    @classmethod
    def build(cls, g: MetricJet, m: MaterialJet, xi: Covector) -> "SymbolContext":
        L = xi.norm.space.xiorder
        return cls(
            n=g.dim,
            lam=m.lam.lift(L),
            mu=m.mu.lift(L),
            alpha=m.alpha.lift(L),
            beta=m.beta.lift(L),
            ginv=g.inverse.lift(L),
            ginv_full=g.full_inverse.lift(L),
            gam=g.christoffel.lift(L),
            xi=xi.lower,
            xiu=xi.upper,
            s=xi.norm,
            rho=m.rho,
            omega=m.omega,
            theta0=m.theta0,
            c_heat=m.c_heat,
        )

    def G(self, m, j, k) -> Jet:
        return self.gam[m, j, k]

    def tr(self, k) -> Jet:
        """``Gamma^a_{a k}`` summed over tangential ``a``."""
        return sum((self.gam[a, a, k] for a in range(self.n - 1)), Jet.zeros(self.gam.space))

    def grad_up(self, f: Jet, a: int) -> Jet:
        """Tangential component ``nabla^a f = g^{ab} d_b f``."""
        return sum(
            (self.ginv[a, b] * f.dx(b) for b in range(self.n - 1)), Jet.zeros(f.space)
        )

    def matrix(self, entries: dict) -> Jet:
        size = self.n + 1
        rows = [[0] * size for _ in range(size)]
        for (i, j), v in entries.items():
            rows[i][j] = v
        return Jet.block(rows, like=self.s)


def _add(entries: dict, key, value):
    entries[key] = entries[key] + value if key in entries else value


def _ctx(g, m, xi) -> SymbolContext:
    return SymbolContext.build(g, m, xi)


def matrix_A(m: MaterialJet) -> Jet:
    """``diag(mu I_{n-1}, lam + 2 mu, alpha)`` as a matrix x-jet."""
    n = m.space.dim
    diag = [m.mu] * (n - 1) + [m.lam + 2 * m.mu, m.alpha]
    return Jet.block([[diag[i] if i == j else 0 for j in range(n + 1)] for i in range(n + 1)])


def matrix_D(g: MetricJet, m: MaterialJet, xi: Covector) -> tuple[Jet, Jet]:
    """Symbol split ``(d1, d0)`` of the tangential boundary operator ``D``."""
    c = _ctx(g, m, xi)
    n, N, T = c.n, c.n - 1, c.n
    d1, d0 = {}, {}
    for a in range(n - 1):
        d1[a, N] = 1j * c.mu * c.xiu[..., a]
        d1[N, a] = 1j * c.lam * c.xi[..., a]
        d0[N, a] = c.lam * c.tr(a)
    d0[N, N] = c.lam * c.tr(N)
    d0[N, T] = -c.beta
    return c.matrix(d1), c.matrix(d0)


def symbol_b(g: MetricJet, m: MaterialJet, xi: Covector) -> tuple[Jet, Jet]:
    """Symbols ``(b1, b0)`` of the first-order normal coefficient ``B``."""
    c = _ctx(g, m, xi)
    n, N, T = c.n, c.n - 1, c.n
    lam, mu, alpha, beta = c.lam, c.mu, c.alpha, c.beta
    l2m = lam + 2 * mu
    b1, b0 = {}, {}
    for a in range(n - 1):
        b1[a, N] = 1j * (lam + mu) / mu * c.xiu[..., a]
        b1[N, a] = 1j * (lam + mu) / l2m * c.xi[..., a]
    trN = c.tr(N)
    for a in range(n - 1):
        for b in range(n - 1):
            _add(b0, (a, b), 2 * c.G(a, N, b))
        _add(b0, (a, a), trN + mu.dx(N) / mu)
        _add(b0, (a, N), c.grad_up(lam, a) / mu)
        _add(b0, (N, a), (lam + mu) / l2m * c.tr(a) + mu.dx(a) / l2m)
    b0[N, N] = trN + l2m.dx(N) / l2m
    b0[N, T] = -beta / l2m
    b0[T, N] = 1j * c.omega * c.theta0 * beta / alpha
    b0[T, T] = trN
    return c.matrix(b1), c.matrix(b0)


def symbol_c(g: MetricJet, m: MaterialJet, xi: Covector) -> tuple[Jet, Jet, Jet]:
    """Symbols ``(c2, c1, c0)`` of the tangential operator ``C``."""
    c = _ctx(g, m, xi)
    n, N, T = c.n, c.n - 1, c.n
    tan = range(n - 1)
    lam, mu, alpha, beta = c.lam, c.mu, c.alpha, c.beta
    l2m = lam + 2 * mu
    s2 = c.s * c.s
    xi, xiu = c.xi, c.xiu

    c2 = {}
    for a in tan:
        for b in tan:
            _add(c2, (a, b), -(lam + mu) / mu * xiu[..., a] * xi[..., b])
        _add(c2, (a, a), -s2)
    c2[N, N] = -mu / l2m * s2
    c2[T, T] = -s2

    # h = xi^a Gamma^b_{ab} + d_a xi^a
    h = sum((xiu[..., a] * c.tr(a) + xiu[..., a].dx(a) for a in tan), Jet.zeros(c.s.space))
    xi_grad_mu = sum((xi[..., a] * c.grad_up(mu, a) for a in tan), Jet.zeros(c.s.space))
    wbt = c.omega * c.theta0 * beta / alpha
    c1 = {}
    for a in tan:
        _add(c1, (a, a), 1j * h + 1j * xi_grad_mu / mu)
        for b in tan:
            v = 1j * (lam + mu) / mu * xiu[..., a] * c.tr(b)
            v = v + 2j * sum((xiu[..., r] * c.G(a, r, b) for r in tan), Jet.zeros(c.s.space))
            v = v + 1j * (xi[..., b] * c.grad_up(lam, a) + xiu[..., a] * mu.dx(b)) / mu
            _add(c1, (a, b), v)
        v = 1j * (lam + mu) / mu * c.tr(N) * xiu[..., a]
        v = v + 2j * sum((xiu[..., r] * c.G(a, r, N) for r in tan), Jet.zeros(c.s.space))
        v = v + 1j * mu.dx(N) / mu * xiu[..., a]
        _add(c1, (a, N), v)
        _add(c1, (a, T), -1j * beta / mu * xiu[..., a])
        v = 2j * mu / l2m * sum((xiu[..., r] * c.G(N, r, a) for r in tan), Jet.zeros(c.s.space))
        v = v + 1j * lam.dx(N) / l2m * xi[..., a]
        _add(c1, (N, a), v)
        _add(c1, (T, a), -wbt * xi[..., a])
    _add(c1, (N, N), 1j * mu / l2m * h + 1j * xi_grad_mu / l2m)
    _add(c1, (T, T), 1j * h)

    ginv = c.ginv_full
    full = range(n)

    def lap_gamma(top, d):
        # g^{ml} d_d Gamma^top_{ml}
        return sum(
            (ginv[p, q] * c.G(top, p, q).dx(d) for p in full for q in full),
            Jet.zeros(c.gam.space),
        )

    c0 = {}
    cols = list(tan) + [N]
    for a in tan:
        for b in cols:
            v = (lam + mu) / mu * sum(
                (c.ginv[a, r] * c.tr(b).dx(r) for r in tan), Jet.zeros(c.gam.space)
            )
            v = v + lap_gamma(a, b)
            dg = sum((mu.dx(r) * c.ginv[a, r].dx(b) for r in tan), Jet.zeros(c.gam.space))
            v = v + (c.grad_up(lam, a) * c.tr(b) - dg) / mu
            _add(c0, (a, b), v)
        _add(c0, (a, a), c.rho * c.omega**2 / mu)
    for b in cols:
        v = (lam + mu) / l2m * c.tr(b).dx(N) + mu / l2m * lap_gamma(N, b)
        v = v + lam.dx(N) / l2m * c.tr(b)
        _add(c0, (N, b), v)
        _add(c0, (T, b), 1j * c.omega * c.theta0 * beta / alpha * c.tr(b))
    _add(c0, (N, N), c.rho * c.omega**2 / l2m)
    c0[T, T] = 1j * c.omega * c.c_heat / alpha
    return c.matrix(c2), c.matrix(c1), c.matrix(c0)
