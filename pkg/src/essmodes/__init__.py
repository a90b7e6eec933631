"""Localized singular modes of the frequency-domain Maxwell operator,
spectral-residual verification, and detection-event sampling for a
two-slit field."""

__version__ = "0.1.0"

from .collapse import (BornDensity, ChiSquareReport, ConservationReport,
                       DetectionEvent, born_density, conservation_check,
                       pattern_report, sample_events)
from .diffraction import NormalStateField, SlitGeometry, SourceSpectrum, synthesize_field, total_action
from .medium import MediumModel, ResonancePoint, eval_eps_hat, eval_mu_hat, find_essential_resonance
from .modes import (EssentialModeParams, SpatialModeParams, TemporalModeParams,
                    eval_phi, eval_phi_hat, eval_psi)
from .numerics import Grid1D, QuadratureError, QuadratureSpec, integrate_1d
from .weyl import ConvergenceRecord, ResidualQuery, convergence_sweep, residual_sq

__all__ = [
    "BornDensity",
    "ChiSquareReport",
    "ConservationReport",
    "ConvergenceRecord",
    "DetectionEvent",
    "EssentialModeParams",
    "Grid1D",
    "MediumModel",
    "NormalStateField",
    "QuadratureError",
    "QuadratureSpec",
    "ResidualQuery",
    "ResonancePoint",
    "SlitGeometry",
    "SourceSpectrum",
    "SpatialModeParams",
    "TemporalModeParams",
    "born_density",
    "conservation_check",
    "convergence_sweep",
    "eval_eps_hat",
    "eval_mu_hat",
    "eval_phi",
    "eval_phi_hat",
    "eval_psi",
    "find_essential_resonance",
    "integrate_1d",
    "pattern_report",
    "residual_sq",
    "sample_events",
    "synthesize_field",
    "total_action",
]
