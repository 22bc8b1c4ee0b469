"""Exact component-length laws of multicurves on hyperbolic surfaces.

The package computes Weil-Petersson volume polynomials, graph polynomials of
stable graphs, exact simplex integrals, and the limiting distribution of
normalized component lengths of a random multicurve.
"""

__version__ = "0.1.0"

from .exactpoly import ExactScalar, Interval, PiPolynomial, format_decimal
from .lengthstats import (
    GraphPolynomial,
    box_probability,
    counting_coefficient,
    density_at,
    graph_polynomial,
    graph_polynomial_top,
    leading_coefficient,
    marginal,
    moments,
    total_mass,
)
from .sampling import SampleBatch, StatsReport, empirical_compare, sample
from .simplexint import BoxCone, MassPolynomial, SimplexDomain, box_simplex_integral, cone_integral
from .stablegraph import StableGraph, canonical_form, enumerate_stable_graphs, parse_multicurve
from .wpvolume import VolumeTable, cache_load, cache_save, volume_polynomial

__all__ = [
    "BoxCone",
    "ExactScalar",
    "GraphPolynomial",
    "Interval",
    "MassPolynomial",
    "PiPolynomial",
    "SampleBatch",
    "SimplexDomain",
    "StableGraph",
    "StatsReport",
    "VolumeTable",
    "box_probability",
    "box_simplex_integral",
    "cache_load",
    "cache_save",
    "canonical_form",
    "cone_integral",
    "counting_coefficient",
    "density_at",
    "empirical_compare",
    "enumerate_stable_graphs",
    "format_decimal",
    "graph_polynomial",
    "graph_polynomial_top",
    "leading_coefficient",
    "marginal",
    "moments",
    "parse_multicurve",
    "sample",
    "total_mass",
    "volume_polynomial",
]
