"""Widom factors, equilibrium measures and Chebyshev polynomials on finite gap sets."""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .chebyshev import ChebyshevResult, chebyshev_poly, m_factor
from .measures import AtomList, DensitySpec, MeasureSpec, integrate, normalize, szego_integral
from .orthopoly import OrthoResult, minimality_check, recurrence, widom_factors
from .potential import (EquilibriumData, band_measures, capacity, critical_points, equilibrium_measure,
                        green, log_capacity, pw_sum, rational_dependence)
from .sets import CompactSetSpec, Interval, cantor_approximant, make_interval_union, unit_circle
from .szego import (circle_szego_limit, cantor_study, verify_lower_bound, widom_condition_report,
                    widom_interval_limit)

__all__ = [
    "AtomList", "ChebyshevResult", "CompactSetSpec", "DensitySpec", "EquilibriumData", "Interval",
    "MeasureSpec", "OrthoResult", "band_measures", "cantor_approximant", "cantor_study", "capacity",
    "chebyshev_poly", "circle_szego_limit", "critical_points", "equilibrium_measure", "green",
    "integrate", "log_capacity", "m_factor", "make_interval_union", "minimality_check", "normalize",
    "pw_sum", "rational_dependence", "recurrence", "szego_integral", "unit_circle",
    "verify_lower_bound", "widom_condition_report", "widom_factors", "widom_interval_limit",
]
