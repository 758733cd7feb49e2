"""Workbench for OS safety monitoring guidelines in event-driven trials."""

from .stats import (
    HazardRatio,
    InformationLevel,
    Probability,
    fisher_information,
    required_deaths,
    std_normal_cdf,
    std_normal_quantile,
)

__version__ = "0.1.0"

__all__ = [
    "HazardRatio",
    "InformationLevel",
    "Probability",
    "fisher_information",
    "required_deaths",
    "std_normal_cdf",
    "std_normal_quantile",
    "__version__",
]
