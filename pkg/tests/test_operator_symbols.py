import numpy as np
import pytest

from conftest import random_jet
from thermodtn.algebra import Jet, JetSpace
from thermodtn.geometry import MetricJet, covector_package
from thermodtn.material import MaterialJet, polynomial_jet
from thermodtn.operator_symbols import matrix_A, matrix_D, symbol_b, symbol_c
from thermodtn.oracle import apply_symbol_operator, apply_Tg


def flat_case(n=2, lam=0.0, mu=1.0, alpha=1.0, beta=0.0, xi=None, L=1, K=2, **consts):
    sp = JetSpace(n, (n - 1,), K)
    g = MetricJet.euclidean(sp)
    m = MaterialJet.constant(sp.with_orders(xorder=K - 1), lam, mu, alpha, beta, **consts)
    xi = covector_package(g, np.ones(n - 1) if xi is None else xi, L)
    return g, m, xi


def val(j):
    return np.asarray(j.to_float().value)


def test_matrix_A():
    sp = JetSpace(3, (2,), 1)
    A = matrix_A(MaterialJet.constant(sp, 1.0, 2.0, 3.0, 0.0))
    assert np.allclose(val(A), np.diag([2, 2, 5, 3]))
    A = matrix_A(MaterialJet.constant(sp, -1.0, 1.0, 2.0, 0.0))
    assert np.allclose(val(A), np.diag([1, 1, 1, 2]))


def test_matrix_D_flat():
    g, m, xi = flat_case(beta=0.7)
    d1, d0 = matrix_D(g, m, xi)
    assert np.allclose(val(d1), [[0, 1j, 0], [0, 0, 0], [0, 0, 0]])
    assert np.allclose(val(d0), [[0, 0, 0], [0, 0, -0.7], [0, 0, 0]])
    _, d0 = matrix_D(*flat_case(beta=0.0)[:3])
    assert np.allclose(val(d0), 0)


def test_matrix_D_warped():
    # w = 1 + x_n gives Gamma^1_{1n} = 1 at the boundary
    sp = JetSpace(2, (1,), 2)
    g = MetricJet.warped(polynomial_jet(sp, [1, 1]))
    m = MaterialJet.constant(sp.with_orders(xorder=1), 1.0, 1.0, 1.0, 0.0)
    _, d0 = matrix_D(g, m, covector_package(g, [1.0], 1))
    assert val(d0)[1, 1] == pytest.approx(1)


def test_symbol_b_examples():
    g, m, xi = flat_case(beta=0.8)
    b1, b0 = symbol_b(g, m, xi)
    assert np.allclose(val(b1), [[0, 1j, 0], [0.5j, 0, 0], [0, 0, 0]])
    assert np.allclose(val(b0), [[0, 0, 0], [0, 0, -0.4], [0, 0, 0]])
    b1, _ = symbol_b(*flat_case(lam=-1.0)[:3])
    assert np.allclose(val(b1), 0)


def test_symbol_c_examples():
    c2, c1, c0 = symbol_c(*flat_case()[:3])
    assert np.allclose(val(c2), -np.diag([2, 0.5, 1]))
    assert np.allclose(val(c1), 0)
    assert np.allclose(val(c0), 0)
    _, c1, _ = symbol_c(*flat_case(beta=0.6)[:3])
    expect = np.zeros((3, 3), complex)
    expect[0, 2] = -0.6j
    assert np.allclose(val(c1), expect)
    _, _, c0 = symbol_c(*flat_case(alpha=2.0, omega=0.5, c_heat=1.5)[:3])
    assert val(c0)[2, 2] == pytest.approx(1j * 0.5 * 1.5 / 2.0)


def test_homogeneity():
    for t in (2.0, 0.5):
        g, m, xi = flat_case(n=3, lam=0.4, mu=1.3, beta=0.5, xi=[0.6, -0.8], omega=0.3)
        _, _, xit = flat_case(n=3, lam=0.4, mu=1.3, beta=0.5, xi=[0.6 * t, -0.8 * t], omega=0.3)
        b = symbol_b(g, m, xi)
        bt = symbol_b(g, m, xit)
        c = symbol_c(g, m, xi)
        ct = symbol_c(g, m, xit)
        assert np.allclose(val(bt[0]), t * val(b[0]))
        assert np.allclose(val(bt[1]), val(b[1]))
        assert np.allclose(val(ct[0]), t**2 * val(c[0]))
        assert np.allclose(val(ct[1]), t * val(c[1]))
        assert np.allclose(val(ct[2]), val(c[2]))


def test_apply_Tg_examples():
    sp = JetSpace.full(2, 3)
    g = MetricJet.euclidean(sp)
    m = MaterialJet.constant(sp, 0.0, 1.0, 1.0, 0.0)
    u = Jet.stack([Jet.constant(sp, 1.0), Jet.constant(sp, 2.0)], axis=-1)
    row, heat = apply_Tg(g, m, u, Jet.constant(sp, 3.0))
    assert row.is_zero() and heat.is_zero()
    x1 = Jet.x_variable(sp, 0)
    u = Jet.stack([x1 * x1, Jet.zeros(sp)], axis=-1)
    row, _ = apply_Tg(g, m, u, Jet.zeros(sp))
    # mu Lap u + (lam + mu) grad div u = (2, 0) + (2, 0)
    assert np.allclose(np.asarray(row.value), [4, 0])
    m = MaterialJet.constant(sp, -1.0, 1.0, 1.0, 0.0)
    row, _ = apply_Tg(g, m, u, Jet.zeros(sp))
    assert np.allclose(np.asarray(row.value), [2, 0])


@pytest.mark.parametrize("n", [2, 3])
def test_oracle_consistency(rng, n):
    # the factorised symbols reproduce the directly assembled operator
    K = 5
    S = JetSpace.full(n, K)
    comps = {(a, b): random_jet(rng, S, 1.0 if a == b else 0.1, 0.2)
             for a in range(n - 1) for b in range(a, n - 1)}
    g = MetricJet.from_components(S, comps)
    m = MaterialJet(random_jet(rng, S, 0.5), random_jet(rng, S, 1.2), random_jet(rng, S, 0.9),
                    random_jet(rng, S, 0.7), rho=1.3, omega=0.4, theta0=0.8, c_heat=1.1)
    eta = rng.standard_normal(n - 1)
    u = Jet.stack([random_jet(rng, S, rng.standard_normal(), 1.0) for _ in range(n)], axis=-1)
    th = random_jet(rng, S, 0.3, 1.0)
    row, heat = apply_Tg(g, m, u, th, eta)
    lhs = Jet.stack([row[j] for j in range(n)] + [heat], axis=-1)
    cv = covector_package(g, eta, 2)
    b1, b0 = symbol_b(g, m, cv)
    c2, c1, c0 = symbol_c(g, m, cv)
    rhs = apply_symbol_operator(g, m, b1 + b0, c2 + c1 + c0, u, th, eta)
    k = min(lhs.space.xorder, rhs.space.xorder)
    diff = lhs.truncate(k) - rhs.truncate(k)
    assert np.max(np.abs(diff.c)) <= 1e-10 * max(1.0, np.max(np.abs(lhs.truncate(k).c)))
