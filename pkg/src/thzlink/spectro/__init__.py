"""Spectroscopy: line-list ingestion, molecular absorption, absorption noise."""

from .absorption import (
    absorption_coefficient_exact,
    bundled_linelist,
    line_parameters,
    molecular_noise_temperature,
    total_noise_power,
)
from .approx import absorption_coefficient_approx
from .linelist import (
    AbsorptionLine,
    LineDatabase,
    Medium,
    load_linelist,
    parse_linelist,
    serialize_linelist,
)

__all__ = [
    "AbsorptionLine",
    "LineDatabase",
    "Medium",
    "absorption_coefficient_approx",
    "absorption_coefficient_exact",
    "bundled_linelist",
    "line_parameters",
    "load_linelist",
    "molecular_noise_temperature",
    "parse_linelist",
    "serialize_linelist",
    "total_noise_power",
]
