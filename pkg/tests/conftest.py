"""
Ortak test fikstürleri - Standart modeller ve servisler
"""

from pathlib import Path

import pytest

from app.models.substitution import SubstitutionModel
from app.services.greens import GreenSolver
from app.services.substitution import SubstitutionAnalyzer

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "models"


@pytest.fixture
def binary_model() -> SubstitutionModel:
    return SubstitutionModel.from_matrix([[2]])


@pytest.fixture
def ternary_model() -> SubstitutionModel:
    return SubstitutionModel.from_matrix([[3]])


@pytest.fixture
def two_label_model() -> SubstitutionModel:
    return SubstitutionModel.from_matrix([[1, 1], [1, 1]], alphabet=["a", "b"])


@pytest.fixture
def shifted_model() -> SubstitutionModel:
    return SubstitutionModel.from_matrix([[2]], v_per=[5.0])


@pytest.fixture
def solver() -> GreenSolver:
    return GreenSolver()


@pytest.fixture
def analyzer() -> SubstitutionAnalyzer:
    return SubstitutionAnalyzer()


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
