"""Independent reference solvers for the DtN map."""

from .halfspace import DtnSample, halfspace_multiplier
from .operator import apply_symbol_operator, apply_Tg
from .slab import SlabMaterial, slab_dtn, thermal_scalar_dtn

__all__ = [
    "DtnSample",
    "SlabMaterial",
    "apply_Tg",
    "apply_symbol_operator",
    "halfspace_multiplier",
    "slab_dtn",
    "thermal_scalar_dtn",
]
