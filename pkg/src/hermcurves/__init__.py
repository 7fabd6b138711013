"""Quotients of the Hermitian curve over finite fields: genera, orbits and point counts."""

from .gf import Element, FieldCtx, FieldError, field_of_order, make_field
from .hermitian import PlaneModel, ProjPoint, model
from .autos import ProjMap, Subgroup, closure, find_tame_sl2_subgroup, generator_T, singer_generators
from .quotient import GenusReport, genus_formula, rh_genus, verify_case
from .semigroup import NumSemigroup, filter_divide, from_generators, semigroup_S

__version__ = "0.1.0"

__all__ = [
    "Element",
    "FieldCtx",
    "FieldError",
    "GenusReport",
    "NumSemigroup",
    "PlaneModel",
    "ProjMap",
    "ProjPoint",
    "Subgroup",
    "closure",
    "field_of_order",
    "filter_divide",
    "find_tame_sl2_subgroup",
    "from_generators",
    "generator_T",
    "genus_formula",
    "make_field",
    "model",
    "rh_genus",
    "semigroup_S",
    "singer_generators",
    "verify_case",
]
