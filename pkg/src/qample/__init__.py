"""Exact toric line-bundle cohomology, Koszul certificates and q-ampleness."""

from __future__ import annotations

from .cohomology import CohomologyCache, CohomologyTable, asymptotic_h, regularity
from .divisors import NumericalClass, ToricDivisor, class_of, is_ample, is_big, is_nef, is_pseudoeffective
from .geometry import GEOMETRY_NAMES, Flag3Geometry, ToricGeometry, make_geometry, threefold_bundle
from .lattice import Fan, build_fan, orbit_closure, product_fan, projectivized_split_bundle_fan
from .positivity import (
    AmplenessReport,
    additivity_check,
    cone_scan_rank2,
    n_minus_1_ample,
    naive_probe,
    q_nef,
    qtample_certificate,
    uniform_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AmplenessReport", "CohomologyCache", "CohomologyTable", "Fan", "Flag3Geometry", "GEOMETRY_NAMES",
    "NumericalClass", "ToricDivisor", "ToricGeometry", "additivity_check", "asymptotic_h", "build_fan",
    "class_of", "cone_scan_rank2", "is_ample", "is_big", "is_nef", "is_pseudoeffective",
    "make_geometry", "n_minus_1_ample", "naive_probe", "orbit_closure", "product_fan",
    "projectivized_split_bundle_fan", "q_nef", "qtample_certificate", "regularity", "threefold_bundle",
    "uniform_probe",
]
