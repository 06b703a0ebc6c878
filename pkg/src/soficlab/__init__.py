"""Finite, checkable computations around sofic entropy and independence."""

from __future__ import annotations

__version__ = "0.1.0"

from .actions import (Algebraic, Cylinder, FullShift, MetricBall, PointPattern, ProductAction, SetTuple, SFT,
                      algebraic_action, golden_mean, identity_cylinders, parse_sft, product_action)
from .entropy import EntropySchedule, FamilyPolicy, estimate
from .groups import GroupElement, GroupSpec, format_element, parse_element, parse_group
from .independence import (algebraic_independence_set, independence_density, is_independence_set,
                           km_extract, product_density_check)
from .microstates import Microstate, is_microstate, separated_count
from .quasitiling import commuting_bijection, matched_tiles, quasitile, rf_mixing_check
from .ring import GroupRingElement, RingMatrix, l1_inverse, parse_matrix, parse_ring
from .sofic import SoficMap, load_sofic, quotient_sofic
from .spectral import deninger_check, det_vs_entropy, fk_det_estimate, quotient_matrix

__all__ = [
    "Algebraic", "Cylinder", "FullShift", "MetricBall", "PointPattern", "ProductAction", "SetTuple", "SFT",
    "algebraic_action", "golden_mean", "identity_cylinders", "parse_sft", "product_action",
    "EntropySchedule", "FamilyPolicy", "estimate",
    "GroupElement", "GroupSpec", "format_element", "parse_element", "parse_group",
    "algebraic_independence_set", "independence_density", "is_independence_set", "km_extract",
    "product_density_check",
    "Microstate", "is_microstate", "separated_count",
    "commuting_bijection", "matched_tiles", "quasitile", "rf_mixing_check",
    "GroupRingElement", "RingMatrix", "l1_inverse", "parse_matrix", "parse_ring",
    "SoficMap", "load_sofic", "quotient_sofic",
    "deninger_check", "det_vs_entropy", "fk_det_estimate", "quotient_matrix",
]
