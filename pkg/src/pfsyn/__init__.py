"""Linear-programming analysis and state-feedback synthesis for positive
discrete-time Takagi-Sugeno fuzzy systems."""

from .analysis import (
    IntervalVerdict,
    StabilityCertificate,
    Variant,
    certify_matrices,
    certify_stability,
    interval_check,
    schur_certificate,
)
from .model import FuzzyModel, IntervalMatrix, Rule, evaluate_memberships, load_model, save_model
from .sim import Trajectory, export_csv, simulate
from .synthesis import SynthesisMode, SynthesisResult, reconstruct_gains, synthesize, verify_closed_loop

__all__ = [
    "FuzzyModel",
    "IntervalMatrix",
    "IntervalVerdict",
    "Rule",
    "StabilityCertificate",
    "SynthesisMode",
    "SynthesisResult",
    "Trajectory",
    "Variant",
    "certify_matrices",
    "certify_stability",
    "evaluate_memberships",
    "export_csv",
    "interval_check",
    "load_model",
    "reconstruct_gains",
    "save_model",
    "schur_certificate",
    "simulate",
    "synthesize",
    "verify_closed_loop",
]

__version__ = "0.1.0"
