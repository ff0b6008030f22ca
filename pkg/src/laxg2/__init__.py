"""Exact verification kernel for Lax operator algebras of type G2 on the sphere."""
from .exact import Q, Rational
from .g2 import G2Element, bracket, embed, project, trace_form
from .jets import MatrixJet, jet_commutator, jet_product
from .tyurin import TyurinDatum, is_admissible, effective_relation_count, admissible_jet_basis
from .sphere import SurfaceSpec, GradingSpec, homogeneous_basis, canonical
from .cocycle import build_omega, cocycle_value, locality_window

__version__ = "0.1.0"

__all__ = ["Q", "Rational", "G2Element", "bracket", "embed", "project", "trace_form", "MatrixJet",
           "jet_commutator", "jet_product", "TyurinDatum", "is_admissible", "effective_relation_count",
           "admissible_jet_basis", "SurfaceSpec", "GradingSpec", "homogeneous_basis", "canonical",
           "build_omega", "cocycle_value", "locality_window"]
