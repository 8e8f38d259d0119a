"""Shared builders for randomized admissible cases."""

from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from thermodtn.algebra import Jet, JetSpace, monomials
from thermodtn.geometry import MetricJet
from thermodtn.material import MaterialJet, polynomial_jet
from thermodtn.oracle import SlabMaterial, slab_dtn

ROOT = Path(__file__).resolve().parents[1]
MANIFESTS = ROOT / "manifests"


def random_jet(rng, space: JetSpace, c0: float, scale: float = 0.3) -> Jet:
    """Jet with value ``c0`` and normally distributed higher derivatives."""
    derivs = {}
    for mono in monomials(space.nx, space.xorder):
        sub = tuple(int(v) for v in mono)
        J = [0] * space.dim
        for c, k in zip(space.coords, sub):
            J[c] = k
        derivs[tuple(J)] = c0 if sum(sub) == 0 else scale * rng.standard_normal()
    return Jet.from_derivatives(space, derivs)


def random_covectors(rng, n: int, count: int) -> np.ndarray:
    """Covectors of moderate size in general position."""
    if n == 2:
        r = rng.uniform(0.6, 1.6, count)
        return (r * np.where(np.arange(count) % 2, 1.0, -1.0))[:, None]
    v = rng.standard_normal((count, n - 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True) * rng.uniform(0.7, 1.4, (count, 1))


def random_material(rng, space: JetSpace, omega: float = 0.0, scale: float = 0.3) -> MaterialJet:
    """Random admissible material jets with values well inside the admissible set."""
    mu = rng.uniform(0.8, 2.0)
    lam = rng.uniform(-0.5, 1.5) * mu
    return MaterialJet(
        random_jet(rng, space, lam, scale),
        random_jet(rng, space, mu, scale),
        random_jet(rng, space, rng.uniform(0.7, 1.5), scale),
        random_jet(rng, space, rng.uniform(0.3, 1.5), scale),
        rho=rng.uniform(0.8, 1.2), omega=omega, theta0=rng.uniform(0.8, 1.2),
        c_heat=rng.uniform(0.8, 1.2),
    )


def random_metric(rng, space: JetSpace, warped: bool) -> MetricJet:
    """Euclidean or warped ``w(x_n)^2 delta`` with a random ``w``."""
    if not warped:
        return MetricJet.euclidean(space)
    w = [rng.uniform(0.8, 1.3)] + list(0.3 * rng.standard_normal(space.xorder))
    return MetricJet.warped(polynomial_jet(space, w))


def random_case(rng, n: int, warped: bool, omega: float, depth: int, scale: float = 0.3):
    """Metric, material and covectors for a table of the given depth (``x_n`` dependence only)."""
    sp = JetSpace(n, (n - 1,), depth + 2)
    g = random_metric(rng, sp, warped)
    m = random_material(rng, sp.with_orders(xorder=depth + 1), omega, scale)
    return g, m


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_configure(config):
    sys.path.insert(0, str(Path(__file__).parent))


def p1_closed_form(lam, mu, alpha, xi, g0=None):
    """Principal DtN symbol written out entrywise at one covector."""
    xi = np.asarray(xi, dtype=float)
    n1 = len(xi)
    g0 = np.eye(n1) if g0 is None else np.asarray(g0, dtype=float)
    up = np.linalg.solve(g0, xi)
    s = np.sqrt(xi @ up)
    r = lam + 3 * mu
    p = np.zeros((n1 + 2, n1 + 2), complex)
    p[:n1, :n1] = mu * s * np.eye(n1) + mu * (lam + mu) / (r * s) * np.outer(up, xi)
    p[:n1, n1] = -2j * mu**2 / r * up
    p[n1, :n1] = 2j * mu**2 / r * xi
    p[n1, n1] = 2 * mu * (lam + 2 * mu) / r * s
    p[n1 + 1, n1 + 1] = alpha * s
    return p


def d0_closed_form(lam, beta, gamma):
    """Zeroth-order boundary matrix from the trace of the Christoffel symbols ``gamma[m, j, k]``."""
    n = gamma.shape[0]
    d = np.zeros((n + 1, n + 1), complex)
    for b in range(n):
        d[n - 1, b] = lam * sum(gamma[a, a, b] for a in range(n - 1))
    d[n - 1, n] = -beta
    return d


# x_n-varying thermal conductivity used by the slab fitting tests
SLAB_COEFFS = {"lam": 1.0, "mu": 1.0, "alpha": [1.0, 1.0], "beta": 1.0}
LADDER = tuple(8.0 * 2.0 ** (k / 4) for k in range(17))


@lru_cache(maxsize=None)
def slab_ladder(omega: float) -> tuple:
    """Slab oracle samples along ``xi' = t`` for ``t`` in 8..128 (cached per session)."""
    mat = SlabMaterial.from_coefficients(**SLAB_COEFFS, omega=omega)
    return tuple(slab_dtn(mat, [t]) for t in LADDER)


ACCEPTANCE_LINES = []


def record(criterion: int, ok: bool, detail: str) -> bool:
    """Log one acceptance line; printed live and repeated in the terminal summary."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
