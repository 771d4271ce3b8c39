"""
Services paketi
"""

from app.services.file_handler import (
    FileIOStrategy,
    CSVHandler,
    JSONHandler,
    ParquetHandler,
    FileIORegistry,
)
from app.services.greens import BandDetector, GreenSolver, TransitionBuilder
from app.services.manifest import ManifestBuilder
from app.services.model_persistence import ModelPersistence
from app.services.montecarlo import MonteCarloEngine
from app.services.substitution import PermutationEnumerator, SubstitutionAnalyzer, TreeBuilder
from app.services.verification import SuiteRegistry, Verifier

__all__ = [
    "FileIOStrategy",
    "CSVHandler",
    "JSONHandler",
    "ParquetHandler",
    "FileIORegistry",
    "BandDetector",
    "GreenSolver",
    "TransitionBuilder",
    "ManifestBuilder",
    "ModelPersistence",
    "MonteCarloEngine",
    "PermutationEnumerator",
    "SubstitutionAnalyzer",
    "TreeBuilder",
    "SuiteRegistry",
    "Verifier",
]
