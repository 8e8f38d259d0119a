"""Material coefficient jets and physical constants."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .algebra.jets import Jet, JetSpace
from .errors import InadmissibleMaterial


@dataclass(frozen=True)
class MaterialJet:
    """Jets of ``lam, mu, alpha, beta`` plus scalar constants.

    The four coefficient jets share one :class:`JetSpace` (xi-order 0) and may
    carry a common batch tail, which lets several material variants be
    evaluated in one pass.  ``c_heat`` is the specific heat per unit volume.
    """

    lam: Jet
    mu: Jet
    alpha: Jet
    beta: Jet
    rho: float = 1.0
    omega: float = 0.0
    theta0: float = 1.0
    c_heat: float = 1.0

    @property
    def space(self) -> JetSpace:
        return self.lam.space

    @property
    def coefficients(self) -> dict:
        return {"lam": self.lam, "mu": self.mu, "alpha": self.alpha, "beta": self.beta}

    @property
    def batch(self) -> tuple:
        return np.broadcast_shapes(*(j.tail for j in self.coefficients.values()))

    def with_order(self, xorder: int) -> "MaterialJet":
        return replace(self, **{k: v.truncate(xorder) for k, v in self.coefficients.items()})

    def replace(self, **kw) -> "MaterialJet":
        return replace(self, **kw)

    @classmethod
    def constant(cls, space: JetSpace, lam, mu, alpha, beta, **consts) -> "MaterialJet":
        return cls(
            *(Jet.constant(space, v) for v in (lam, mu, alpha, beta)), **consts
        )

    @classmethod
    def polynomial_xn(cls, space: JetSpace, lam, mu, alpha, beta, **consts) -> "MaterialJet":
        """Coefficients given as power-series lists ``[a0, a1, ...]`` in ``x_n``."""
        return cls(*(polynomial_jet(space, p) for p in (lam, mu, alpha, beta)), **consts)


def polynomial_jet(space: JetSpace, coeffs, coord: int | None = None) -> Jet:
    """Jet of ``sum_k coeffs[k] * x_coord**k`` (default coordinate: the normal one)."""
    coord = space.dim - 1 if coord is None else coord
    coeffs = [coeffs] if np.ndim(coeffs) == 0 else list(coeffs)
    x = Jet.x_variable(space, coord)
    out = Jet.constant(space, coeffs[-1])
    for a in reversed(coeffs[:-1]):
        out = out * x + a
    return out


def validate(m: MaterialJet) -> MaterialJet:
    """Check ``mu > 0``, ``lam + mu >= 0`` and ``alpha > 0`` at the base point.

    Raises
    ------
    InadmissibleMaterial
        Naming the violated inequality.
    """
    vals = {k: np.asarray(v.to_float().value) for k, v in m.coefficients.items()}
    for k, v in vals.items():
        if np.any(np.abs(v.imag) > 0):
            raise InadmissibleMaterial(f"{k} must be real")
    lam, mu, alpha = vals["lam"].real, vals["mu"].real, vals["alpha"].real
    if np.any(mu <= 0):
        raise InadmissibleMaterial("μ > 0 violated")
    if np.any(lam + mu < 0):
        raise InadmissibleMaterial("λ + μ ≥ 0 violated")
    if np.any(alpha <= 0):
        raise InadmissibleMaterial("α > 0 violated")
    for name in ("rho", "omega", "theta0", "c_heat"):
        v = getattr(m, name)
        if not np.isfinite(float(v)):
            raise InadmissibleMaterial(f"{name} must be finite")
    return m
