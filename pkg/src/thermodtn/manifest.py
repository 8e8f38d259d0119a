"""Manifest parsing: dimension, orders, metric, material, covectors, depth, mode, tolerances.

Jet literals map multi-index strings ``"k1,...,kn"`` to ``[re, im]`` pairs
holding derivatives at the base point.  Presets:

* metric ``{"preset": "euclidean"}`` or ``{"preset": "warped-product", "w": W}``
  with ``g = w(x_n)^2 delta`` and ``W`` a jet literal or a power-series list;
  explicit ``{"components": {"a,b": literal}}`` otherwise;
* material coefficients ``{"preset": "constant", "value": v}``,
  ``{"preset": "linear-in-xn", "value": a, "slope": [s1, s2, ...]}`` meaning
  ``a + s1 x_n + s2 x_n^2 + ...``, or a jet literal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra.jets import Jet, JetSpace
from .dtn_assembly import required_orders
from .errors import ManifestError
from .geometry import MetricJet
from .material import MaterialJet, polynomial_jet, validate
from .serialize import parse_scalar, read_json

DEFAULT_TOLERANCES = {
    "residual": 1e-9,
    "sylvester": 1e-12,
    "sylvester_minus_min": 0.1,
    "round_trip": 1e-6,
    "slope": 0.3,
    "order0": 1e-8,
    "layer": 1e-6,
}
COEFF_KEYS = ("lam", "mu", "alpha", "beta")
CONST_KEYS = ("rho", "omega", "theta0", "c_heat")


@dataclass
class Manifest:
    dim: int
    depth: int
    mode: str
    metric_block: dict
    material_block: dict
    covectors: np.ndarray
    orders: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    raw: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.mode == "rational"

    def jet_orders(self, depth: int | None = None) -> tuple[int, int]:
        d = self.depth if depth is None else depth
        need_m, need_g = required_orders(d)
        return (max(int(self.orders.get("material", need_m)), need_m),
                max(int(self.orders.get("metric", need_g)), need_g))

    def space(self, xorder: int) -> JetSpace:
        coords = tuple(range(self.dim)) if self._tangential() else (self.dim - 1,)
        return JetSpace(self.dim, coords, xorder, 0, self.exact)

    def _tangential(self) -> bool:
        def lit_tangential(lit):
            if isinstance(lit, dict) and "preset" not in lit:
                return any(any(int(k) for k in key.split(",")[:-1]) for key in lit)
            return False

        blocks = [self.material_block.get(k) for k in COEFF_KEYS]
        comps = self.metric_block.get("components", {})
        blocks += list(comps.values())
        if isinstance(self.metric_block.get("w"), dict):
            blocks.append(self.metric_block["w"])
        return any(lit_tangential(b) for b in blocks)

    def metric(self, depth: int | None = None) -> MetricJet:
        _, go = self.jet_orders(depth)
        return parse_metric(self.metric_block, self.space(go))

    def material(self, depth: int | None = None) -> MaterialJet:
        mo, _ = self.jet_orders(depth)
        return parse_material(self.material_block, self.space(mo))

    def covector_array(self):
        if self.exact:
            return np.array([[Fraction(str(x)) for x in row] for row in self.covectors], dtype=object)
        return np.asarray(self.covectors, dtype=float)


def jet_from_literal(space: JetSpace, lit) -> Jet:
    """Jet from ``{"k1,...,kn": [re, im]}`` (derivatives), a number, or a power-series list in ``x_n``."""
    if isinstance(lit, (int, float, str)):
        return Jet.constant(space, parse_scalar(lit, space.exact))
    if isinstance(lit, list):
        coeffs = [parse_scalar(c, space.exact) for c in lit]
        return polynomial_jet(space, coeffs)
    if not isinstance(lit, dict):
        raise ManifestError(f"unrecognised jet literal {lit!r}")
    derivs = {}
    for key, val in lit.items():
        try:
            J = tuple(int(k) for k in key.split(","))
        except ValueError:
            raise ManifestError(f"bad multi-index {key!r}") from None
        if len(J) != space.dim:
            raise ManifestError(f"multi-index {key!r} needs {space.dim} entries")
        derivs[J] = parse_scalar(val, space.exact)
    return Jet.from_derivatives(space, derivs)


def _coefficient(space: JetSpace, block, name: str) -> Jet:
    if block is None:
        raise ManifestError(f"material.{name} missing")
    if isinstance(block, dict) and "preset" in block:
        preset = block["preset"]
        if "value" not in block:
            raise ManifestError(f"material.{name}.value missing")
        if preset == "constant":
            return Jet.constant(space, parse_scalar(block["value"], space.exact))
        if preset == "linear-in-xn":
            slope = block.get("slope", [])
            slope = [slope] if not isinstance(slope, list) else slope
            coeffs = [parse_scalar(c, space.exact) for c in [block["value"], *slope]]
            return polynomial_jet(space, coeffs)
        raise ManifestError(f"material.{name}: unknown preset {preset!r}")
    return jet_from_literal(space, block)


def parse_material(block: dict, space: JetSpace) -> MaterialJet:
    if not isinstance(block, dict):
        raise ManifestError("material block must be an object")
    jets = [_coefficient(space, block.get(k), k) for k in COEFF_KEYS]
    consts = {}
    for k in CONST_KEYS:
        if k in block:
            v = block[k]
            consts[k] = Fraction(str(v)) if space.exact else float(v)
    return validate(MaterialJet(*jets, **consts))


def parse_metric(block: dict, space: JetSpace) -> MetricJet:
    if not isinstance(block, dict):
        raise ManifestError("metric block must be an object")
    preset = block.get("preset")
    if preset == "euclidean" or (preset is None and not block):
        return MetricJet.euclidean(space)
    if preset == "warped-product":
        if "w" not in block:
            raise ManifestError("metric.w missing for warped-product")
        return MetricJet.warped(jet_from_literal(space, block["w"]))
    if preset is not None:
        raise ManifestError(f"metric: unknown preset {preset!r}")
    comps = block.get("components")
    if not isinstance(comps, dict):
        raise ManifestError("metric needs a preset or components")
    out = {}
    for key, lit in comps.items():
        a, b = (int(k) for k in key.split(","))
        out[(a, b)] = jet_from_literal(space, lit)
    return MetricJet.from_components(space, out)


def _covectors(block, dim: int) -> np.ndarray:
    if block is None:
        return np.ones((1, dim - 1))
    if isinstance(block, dict):
        if "direction" not in block or "magnitudes" not in block:
            raise ManifestError("covectors needs direction and magnitudes")
        d = np.asarray(block["direction"], dtype=float)
        d = d / np.linalg.norm(d)
        return np.array([t * d for t in block["magnitudes"]])
    rows = [[r] if np.ndim(r) == 0 else list(r) for r in block]
    if any(len(r) != dim - 1 for r in rows):
        raise ManifestError(f"covectors must have {dim - 1} components")
    return np.array(rows, dtype=object)


def manifest_from_dict(raw: dict) -> Manifest:
    if not isinstance(raw, dict):
        raise ManifestError("manifest must be a JSON object")
    if "dimension" not in raw:
        raise ManifestError("dimension missing")
    dim = int(raw["dimension"])
    if dim < 2:
        raise ManifestError("dimension must be at least 2")
    mode = raw.get("mode", "float")
    if mode not in ("float", "rational"):
        raise ManifestError(f"mode must be float or rational, got {mode!r}")
    if "material" not in raw:
        raise ManifestError("material missing")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update({k: float(v) for k, v in raw.get("tolerances", {}).items()})
    cov = _covectors(raw.get("covectors"), dim)
    return Manifest(
        dim=dim,
        depth=int(raw.get("depth", 2)),
        mode=mode,
        metric_block=raw.get("metric", {"preset": "euclidean"}),
        material_block=raw["material"],
        covectors=cov,
        orders=dict(raw.get("orders", {})),
        tolerances=tol,
        raw=raw,
    )


def load_manifest(path) -> Manifest:
    return manifest_from_dict(read_json(path))
