"""Scalar algebra: truncated bi-jets and exact complex rationals."""

from .jets import Jet, JetSpace, jet_arith, jet_extract, monomials, n_monomials, sum_jets
from .rational import GaussianRational

__all__ = [
    "GaussianRational",
    "Jet",
    "JetSpace",
    "jet_arith",
    "jet_extract",
    "monomials",
    "n_monomials",
    "sum_jets",
]
