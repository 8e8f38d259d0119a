from fractions import Fraction

import numpy as np
import pytest

from conftest import d0_closed_form, p1_closed_form, random_case, random_covectors
from thermodtn.algebra import JetSpace
from thermodtn.dtn_assembly import (
    Symbols,
    build_table,
    q1_symbol,
    required_orders,
    rhs_E1,
    table_residuals,
)
from thermodtn.errors import InsufficientJetOrder
from thermodtn.geometry import MetricJet, covector_package
from thermodtn.material import MaterialJet


def flat_constant(n=2, lam=0.0, mu=1.0, alpha=1.0, beta=0.0, depth=2, exact=False, **consts):
    mo, go = required_orders(depth)
    sp = JetSpace(n, (n - 1,), go, 0, exact)
    m = MaterialJet.constant(sp.with_orders(xorder=mo), lam, mu, alpha, beta, **consts)
    return MetricJet.euclidean(sp), m


def test_q1_examples():
    g, m = flat_constant()
    q1 = q1_symbol(g, m, covector_package(g, [1.0], 1))
    assert np.allclose(q1.value, [[4 / 3, 1j / 3, 0], [1j / 3, 2 / 3, 0], [0, 0, 1]])
    g, m = flat_constant(lam=-1.0)
    q1 = q1_symbol(g, m, covector_package(g, [2.0], 1))
    assert np.allclose(q1.value, 2 * np.eye(3))


def test_rhs_E1_example():
    beta = 0.8
    g, m = flat_constant(beta=beta, depth=1)
    xi = covector_package(g, [1.0], 2)
    sym = Symbols.build(g, m, xi)
    E1 = rhs_E1(q1_symbol(g, m, xi), sym)
    expect = np.zeros((3, 3), complex)
    expect[0, 2], expect[1, 2] = 1j * beta, -beta / 2
    assert np.allclose(np.asarray(E1.value), expect)


def test_decoupled_static_levels_vanish():
    g, m = flat_constant(lam=0.3, mu=1.2, alpha=0.7, beta=0.0)
    T = build_table(g, m, [1.0], 2)
    for j in (0, -1):
        assert np.allclose(T.values()[j], 0, atol=1e-14)


def test_p1_p0_example():
    beta = 1.7
    g, m = flat_constant(beta=beta)
    T = build_table(g, m, [1.0], 2)
    assert np.allclose(T.values()[1], [[4 / 3, -2j / 3, 0], [2j / 3, 4 / 3, 0], [0, 0, 1]], atol=1e-14)
    assert T.values()[0][1, 2] == pytest.approx(beta / 3)


def test_exact_mode_is_exact():
    g, m = flat_constant(lam=Fraction(0), mu=Fraction(1), alpha=Fraction(1), beta=Fraction(2),
                         exact=True, omega=Fraction(1, 5), rho=Fraction(1), theta0=Fraction(1),
                         c_heat=Fraction(1))
    xi = np.array([Fraction(3, 5)], dtype=object)
    T = build_table(g, m, xi, 2)
    res = table_residuals(g, m, xi, T)
    assert all(v == 0 for v in res.values())
    assert T.p[0].value[1, 2].re == Fraction(2, 3)


def test_pythagorean_exact_n3():
    g, m = flat_constant(n=3, lam=Fraction(1), mu=Fraction(2), alpha=Fraction(3), beta=Fraction(1),
                         depth=1, exact=True)
    xi = np.array([Fraction(3), Fraction(4)], dtype=object)
    T = build_table(g, m, xi, 1)
    assert all(v == 0 for v in table_residuals(g, m, xi, T).values())
    assert T.p[1].value[3, 3].re == 15


@pytest.mark.parametrize("n,warped,omega", [(2, False, 0.0), (2, True, 0.3), (3, True, 0.3), (3, False, 0.0)])
def test_random_tables(rng, n, warped, omega):
    g, m = random_case(rng, n, warped, omega, 3)
    xi = random_covectors(rng, n, 1)[0]
    T = build_table(g, m, xi, 3)
    res = table_residuals(g, m, xi, T)
    assert max(res.values()) < 1e-9
    val = {k: complex(v.to_float().value) for k, v in m.coefficients.items()}
    lam, mu, alpha, beta = (val[k].real for k in ("lam", "mu", "alpha", "beta"))
    g0 = np.asarray(g.g.to_float().value).real
    assert np.allclose(T.values()[1], p1_closed_form(lam, mu, alpha, xi, g0), atol=1e-12)
    A = np.diag([mu] * (n - 1) + [lam + 2 * mu, alpha])
    gam = np.asarray(g.christoffel.to_float().value).real
    assert np.allclose(T.values()[0], A @ T.values("q")[0] - d0_closed_form(lam, beta, gam), atol=1e-12)
    assert T.values()[0][n - 1, n] == pytest.approx(beta * mu / (lam + 3 * mu), abs=1e-12)


def test_homogeneity(rng):
    g, m = random_case(rng, 3, True, 0.3, 2)
    xi = random_covectors(rng, 3, 1)[0]
    T1 = build_table(g, m, xi, 2).values()
    T2 = build_table(g, m, 2.5 * xi, 2).values()
    for j, v in T1.items():
        assert np.allclose(T2[j], 2.5**j * v, atol=1e-12)


def test_principal_symbol_hermitian_positive(rng):
    for _ in range(5):
        g, m = random_case(rng, 3, False, 0.0, 0)
        p1 = build_table(g, m, random_covectors(rng, 3, 1)[0], 0).values()[1]
        assert np.allclose(p1, p1.conj().T, atol=1e-13)
        assert np.min(np.linalg.eigvalsh(p1)) > 0


def test_batched_covectors_match_single(rng):
    g, m = random_case(rng, 2, True, 0.3, 2)
    xis = random_covectors(rng, 2, 3)
    Tb = build_table(g, m, xis, 2).values()
    for i, xi in enumerate(xis):
        Ts = build_table(g, m, xi, 2).values()
        for j in Ts:
            assert np.allclose(Tb[j][i], Ts[j], atol=1e-13)


def test_insufficient_order():
    g, m = flat_constant(depth=1)
    with pytest.raises(InsufficientJetOrder):
        build_table(g, m, [1.0], 3)
