"""
Models paketi
"""

from app.models.contraction import ContractionConstants, SphereState
from app.models.disorder import DisorderMode, DisorderSpec, LawKind, LawSpec
from app.models.formatters import (
    ValueFormatter,
    RealFormatter,
    ComplexFormatter,
    IntervalFormatter,
    BooleanFormatter,
    UnknownFormatter,
    FormatterFactory,
)
from app.models.green import GreenVector, PMatrix, SpectralBands
from app.models.manifest import RunManifest
from app.models.substitution import CherrySphere, LabeledTree, SubstitutionModel, ValidationReport
from app.models.trial import Boundary, SimulationResult, TrialConfig
from app.models.verification import SuiteResult, VerificationReport

__all__ = [
    "ContractionConstants",
    "SphereState",
    "DisorderMode",
    "DisorderSpec",
    "LawKind",
    "LawSpec",
    "ValueFormatter",
    "RealFormatter",
    "ComplexFormatter",
    "IntervalFormatter",
    "BooleanFormatter",
    "UnknownFormatter",
    "FormatterFactory",
    "GreenVector",
    "PMatrix",
    "SpectralBands",
    "RunManifest",
    "CherrySphere",
    "LabeledTree",
    "SubstitutionModel",
    "ValidationReport",
    "Boundary",
    "SimulationResult",
    "TrialConfig",
    "SuiteResult",
    "VerificationReport",
]
