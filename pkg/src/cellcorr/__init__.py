"""Interference correlation and joint coverage for a mobile user in a
Poisson cellular network.

The package splits into an analytic side (geometry of the serving disks,
adaptive quadrature, moment and coverage formulas) and a Monte Carlo engine
that re-derives the same quantities by simulation; the two never share
numerical machinery, so each validates the other.
"""

from .analytic_correlation import (CorrelationResult, MomentSet,
                                   adhoc_corr_coefficient, cellular_moments,
                                   corr_coefficient, temporal_corr_coefficient,
                                   total_field_moments)
from .analytic_coverage import (CoverageComponents, CoverageQuery,
                                CoverageResult, Strategy, b1_arc_integral,
                                interference_penalty, jcp_handoff,
                                jcp_mobile_limit, jcp_no_handoff, jcp_skip,
                                jcp_static, jcp_total)
from .core_model import FadingModel, NetworkParams, SirThreshold, path_loss
from .geometry import (DisplacementGeometry, OverlapCase, classify_overlap,
                       crescent_area, crescent_area_from_bearing,
                       handoff_probability, handoff_probability_marginal,
                       handoff_region_area, lens_area, r2_conditional_cdf,
                       r2_conditional_pdf, r2_sample_given_handoff)
from .mc_engine import (EstimateWithCI, SimWindow, TrialArrays,
                        TrialRecord, estimate_corr, estimate_jcp,
                        estimate_jcp_pair, run_trial, sample_ppp,
                        trial_statistics)
from .quadrature import IntegralResult, QuadratureSpec

__all__ = [
    "FadingModel",
    "NetworkParams",
    "SirThreshold",
    "path_loss",
    "QuadratureSpec",
    "IntegralResult",
    "DisplacementGeometry",
    "OverlapCase",
    "classify_overlap",
    "lens_area",
    "crescent_area",
    "crescent_area_from_bearing",
    "handoff_region_area",
    "handoff_probability",
    "handoff_probability_marginal",
    "r2_conditional_cdf",
    "r2_conditional_pdf",
    "r2_sample_given_handoff",
    "MomentSet",
    "CorrelationResult",
    "total_field_moments",
    "cellular_moments",
    "corr_coefficient",
    "temporal_corr_coefficient",
    "adhoc_corr_coefficient",
    "Strategy",
    "CoverageQuery",
    "CoverageResult",
    "CoverageComponents",
    "jcp_skip",
    "jcp_no_handoff",
    "jcp_handoff",
    "jcp_total",
    "jcp_static",
    "jcp_mobile_limit",
    "interference_penalty",
    "b1_arc_integral",
    "SimWindow",
    "TrialRecord",
    "TrialArrays",
    "EstimateWithCI",
    "sample_ppp",
    "run_trial",
    "trial_statistics",
    "estimate_jcp",
    "estimate_jcp_pair",
    "estimate_corr",
]

__version__ = "0.1.0"
