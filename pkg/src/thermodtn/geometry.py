"""Metrics in boundary normal coordinates and derived geometric jets.

Only metrics of the form ``g_ab dx_a dx_b + dx_n^2`` are representable: the
tangential block is the sole stored field.  Index conventions are 0-based;
coordinate ``n - 1`` is the normal one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra.jets import Jet, JetSpace
from .algebra.linalg import matrix_inverse
from .errors import InsufficientJetOrder, SingularMetric, ZeroCovector


class MetricJet:
    """Tangential metric block ``g_ab`` as a matrix jet of tail ``(n-1, n-1)``.

    Parameters
    ----------
    tangential : Jet
        Matrix jet (xi-order 0) holding ``g_ab``; it is symmetrised on entry.
    """

    def __init__(self, tangential: Jet):
        n = tangential.space.dim
        if tangential.tail != (n - 1, n - 1):
            raise ValueError(f"tangential metric must have tail {(n - 1, n - 1)}")
        if tangential.space.xiorder != 0:
            raise ValueError("metric jets carry no xi dependence")
        self.g = (tangential + tangential.T) * 0.5
        g0 = np.array(self.g.to_float().value)
        if not np.allclose(g0.imag, 0.0):
            raise SingularMetric("metric must be real")
        try:
            np.linalg.cholesky(g0.real)
        except np.linalg.LinAlgError:
            raise SingularMetric("tangential metric is not positive definite at the base point") from None

    @property
    def space(self) -> JetSpace:
        return self.g.space

    @property
    def dim(self) -> int:
        return self.space.dim

    @classmethod
    def euclidean(cls, space: JetSpace) -> "MetricJet":
        return cls(Jet.constant(space, np.eye(space.dim - 1)))

    @classmethod
    def warped(cls, w: Jet) -> "MetricJet":
        """``g_ab = w^2 delta_ab`` for a scalar jet ``w``."""
        n = w.space.dim
        eye = Jet.constant(w.space, np.eye(n - 1))
        return cls((w * w).expand(2) * eye)

    @classmethod
    def from_components(cls, space: JetSpace, comps: dict) -> "MetricJet":
        """Build from ``{(a, b): Jet}`` with ``a <= b`` (upper triangle)."""
        n = space.dim
        rows = [[0] * (n - 1) for _ in range(n - 1)]
        for (a, b), jet in comps.items():
            if a > b:
                a, b = b, a
            rows[a][b] = jet
            rows[b][a] = jet
        return cls(Jet.block(rows, like=Jet.zeros(space)))

    def with_order(self, xorder: int) -> "MetricJet":
        return MetricJet(self.g.truncate(xorder))

    @cached_property
    def inverse(self) -> Jet:
        return inverse_metric(self)

    @cached_property
    def full(self) -> Jet:
        """Full ``n x n`` metric with the normal-form zeros and ``g_nn = 1``."""
        return _embed(self.g, 1)

    @cached_property
    def full_inverse(self) -> Jet:
        return _embed(self.inverse, 1)

    @cached_property
    def christoffel(self) -> Jet:
        return christoffel(self)


def _embed(block: Jet, corner) -> Jet:
    n = block.space.dim
    out = Jet.zeros(block.space, (n, n))
    out.c[..., : n - 1, : n - 1] = block.c
    out.c[0, 0, n - 1, n - 1] = block.space.coerce(corner)
    return out


def inverse_metric(g: MetricJet) -> Jet:
    """Inverse tangential metric ``g^ab`` through the jet order of ``g``.

    Raises
    ------
    SingularMetric
        If the constant term is singular.
    """
    try:
        return matrix_inverse(g.g)
    except np.linalg.LinAlgError:
        raise SingularMetric("tangential metric is singular at the base point") from None


def christoffel(g: MetricJet) -> Jet:
    """Christoffel symbols ``Gamma[m, j, k]`` of the full metric, x-order ``K - 1``."""
    space = g.space
    if space.xorder < 1:
        raise InsufficientJetOrder("Christoffel symbols need metric jet order >= 1")
    n = space.dim
    gf = g.full
    dg = Jet.stack([gf.dx(k) for k in range(n)], axis=0)  # dg[k, a, b] = d_k g_ab
    # t[l, j, k] = d_k g_jl + d_j g_kl - d_l g_jk
    t = dg.transpose(2, 1, 0) + dg.transpose(2, 0, 1) - dg
    ginv = g.full_inverse.truncate(space.xorder - 1)
    gam = (ginv @ t.reshape(n, n * n)).reshape(n, n, n)
    return gam * 0.5


@dataclass
class Covector:
    """Tangential covector lifted to the bi-jet algebra.

    Attributes
    ----------
    lower : Jet
        ``xi_a`` with tail ``(*batch, n-1)``.
    upper : Jet
        ``xi^a = g^ab xi_b``, same tail.
    norm : Jet
        ``|xi'|`` with tail ``batch``.
    """

    lower: Jet
    upper: Jet
    norm: Jet
    base: np.ndarray

    @property
    def batch(self) -> tuple:
        return self.norm.tail


def covector_package(g: MetricJet, xi, xiorder: int) -> Covector:
    """Expand ``xi'``-dependent quantities around the base covector ``xi``.

    ``xi`` may carry leading batch axes; its last axis has length ``n - 1``.
    """
    n = g.dim
    xi = np.asarray(xi, dtype=object if g.space.exact else float)
    if xi.shape[-1:] != (n - 1,):
        raise ValueError(f"covector must have {n - 1} components")
    if np.any(np.all(xi == 0, axis=-1)):
        raise ZeroCovector("covector vanishes")
    space = g.space.with_orders(xiorder=xiorder)
    comps = [Jet.xi_variable(space, a, xi[..., a]) for a in range(n - 1)]
    lower = Jet.stack(comps, axis=-1)
    ginv = g.inverse.lift(xiorder)
    upper = (ginv @ lower.expand(1)).reshape(*lower.tail)
    sq = (lower * upper).sum(axis=-1)
    return Covector(lower, upper, sq.sqrt(), xi)
