import numpy as np
import pytest

from conftest import random_jet
from thermodtn.algebra import Jet, JetSpace
from thermodtn.errors import InadmissibleMaterial, SingularMetric, ZeroCovector
from thermodtn.geometry import MetricJet, covector_package
from thermodtn.material import MaterialJet, polynomial_jet, validate


def test_inverse_of_diagonal_metric():
    sp = JetSpace(3, (2,), 1)
    g = MetricJet(Jet.constant(sp, np.diag([4.0, 9.0])))
    assert np.allclose(g.inverse.value, np.diag([0.25, 1 / 9]))


def test_inverse_of_warped_metric():
    sp = JetSpace(2, (1,), 3)
    g = MetricJet.warped(polynomial_jet(sp, [1, 1]))
    ginv = g.inverse[0, 0]
    assert ginv.derivative((0, 0)) == pytest.approx(1)
    assert ginv.derivative((0, 1)) == pytest.approx(-2)
    assert ginv.derivative((0, 2)) == pytest.approx(6)


def test_flat_christoffel_vanish():
    g = MetricJet.euclidean(JetSpace(3, (2,), 2))
    assert g.christoffel.is_zero()


def test_christoffel_under_tangential_scaling(rng):
    # g_ab -> c g_ab keeps Gamma^a_jk and multiplies Gamma^n_jk by c (g_nn stays 1)
    sp = JetSpace.full(3, 3)
    comps = {(a, b): random_jet(rng, sp, 1.0 if a == b else 0.1, 0.2) for a in range(2) for b in range(a, 2)}
    g = MetricJet.from_components(sp, comps)
    g3 = MetricJet.from_components(sp, {k: v * 3.0 for k, v in comps.items()})
    assert np.allclose(g.christoffel.c[..., :2, :, :], g3.christoffel.c[..., :2, :, :], atol=1e-12)
    assert np.allclose(3 * g.christoffel.c[..., 2, :, :], g3.christoffel.c[..., 2, :, :], atol=1e-12)


def test_christoffel_trace_identity(rng):
    # Gamma^a_{a n} = 1/2 d_n log det g_ab
    sp = JetSpace.full(3, 3)
    comps = {(a, b): random_jet(rng, sp, 1.0 if a == b else 0.1, 0.2) for a in range(2) for b in range(a, 2)}
    g = MetricJet.from_components(sp, comps)
    gam = g.christoffel
    tr = gam[0, 0, 2] + gam[1, 1, 2]
    G = g.g
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    rhs = det.dx(2) / det.truncate(2) * 0.5
    assert np.allclose(tr.c, rhs.c, atol=1e-12)


def test_metric_compatibility(rng):
    # d_k g_ij = Gamma_{ikj} + Gamma_{jki} with lowered first index
    sp = JetSpace.full(3, 3)
    comps = {(a, b): random_jet(rng, sp, 1.0 if a == b else 0.1, 0.2) for a in range(2) for b in range(a, 2)}
    g = MetricJet.from_components(sp, comps)
    gf = g.full.truncate(2)
    gam = g.christoffel
    n = 3
    for k in range(n):
        for i in range(n):
            for j in range(n):
                low_i = sum((gf[i, m] * gam[m, k, j] for m in range(n)), Jet.zeros(gam.space))
                low_j = sum((gf[j, m] * gam[m, k, i] for m in range(n)), Jet.zeros(gam.space))
                d = g.full[i, j].dx(k)
                assert np.allclose(d.c, (low_i + low_j).c, atol=1e-12)


def test_singular_metric_rejected():
    with pytest.raises(SingularMetric):
        MetricJet(Jet.constant(JetSpace(3, (2,), 1), np.diag([1.0, -1.0])))


def test_covector_examples():
    sp = JetSpace(3, (2,), 1)
    xi = covector_package(MetricJet.euclidean(sp), [3.0, 4.0], 1)
    assert xi.norm.value == pytest.approx(5)
    sp2 = JetSpace(2, (1,), 1)
    g = MetricJet(Jet.constant(sp2, np.array([[4.0]])))
    xi = covector_package(g, [2.0], 1)
    assert xi.norm.value == pytest.approx(1)
    assert xi.upper.value[0] == pytest.approx(0.5)


def test_covector_warped_normal_derivative():
    sp = JetSpace(2, (1,), 2)
    g = MetricJet.warped(polynomial_jet(sp, [1, 1]))
    xi = covector_package(g, [1.0], 1)
    assert xi.norm.derivative((0, 1), (0,)) == pytest.approx(-1)


def test_zero_covector():
    with pytest.raises(ZeroCovector):
        covector_package(MetricJet.euclidean(JetSpace(2, (1,), 1)), [0.0], 1)


def test_material_validation():
    sp = JetSpace(2, (1,), 1)
    validate(MaterialJet.constant(sp, 0.0, 1.0, 1.0, 3.0))
    validate(MaterialJet.constant(sp, -1.0, 1.0, 1.0, 0.0))
    with pytest.raises(InadmissibleMaterial, match="μ > 0"):
        validate(MaterialJet.constant(sp, 0.0, 0.0, 1.0, 1.0))
    with pytest.raises(InadmissibleMaterial, match="λ"):
        validate(MaterialJet.constant(sp, -1.5, 1.0, 1.0, 1.0))
    with pytest.raises(InadmissibleMaterial, match="α"):
        validate(MaterialJet.constant(sp, 0.0, 1.0, -1.0, 1.0))


def test_polynomial_material():
    sp = JetSpace(2, (1,), 3)
    m = MaterialJet.polynomial_xn(sp, [1, 1], [2, -1, 1], [1], [3])
    assert m.mu.derivative((0, 2)) == pytest.approx(2)
    assert m.lam.derivative((0, 1)) == pytest.approx(1)
