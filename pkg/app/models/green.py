"""
Green fonksiyonu modelleri - Etiket indeksli Γ vektörü, spektral bantlar ve P matrisi
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


def complex_to_pair(value: complex) -> List[float]:
    """Karmaşık sayıyı JSON için [re, im] listesine çevirir"""
    return [float(np.real(value)), float(np.imag(value))]


@dataclass(frozen=True, eq=False)
class GreenVector:
    """
    Bir z noktasında kesik Green fonksiyonları Γ_k(z), k ∈ A.
    residual, (♣) sisteminin çözümdeki en büyük artığıdır.
    """

    z: complex
    values: np.ndarray
    residual: float = 0.0

    def __getitem__(self, label: int) -> complex:
        return complex(self.values[label])

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    @property
    def eta(self) -> float:
        return float(np.imag(self.z))

    def to_dict(self) -> dict:
        """JSON uyumlu sözlük"""
        return {
            "z": complex_to_pair(self.z),
            "values": [complex_to_pair(v) for v in self.values],
            "residual": self.residual,
        }


@dataclass(frozen=True)
class SpectralBands:
    """Im Γ'nın pozitif kaldığı kapalı gerçek aralıklar (sıralı, ayrık)"""

    intervals: Tuple[Tuple[float, float], ...]
    eta_floor: float
    im_threshold: float
    grid_step: float

    def contains(self, energy: float, margin: float = 0.0) -> bool:
        """E, bir bandın içinde (kenarlardan en az margin uzakta) mı?"""
        return any(a + margin <= energy <= b - margin for a, b in self.intervals)

    def contains_interval(self, start: float, end: float, margin: float = 0.0) -> bool:
        """[start, end] tek bir bandın içinde (payla) mı?"""
        return any(a + margin <= start and end <= b - margin for a, b in self.intervals)

    def to_dict(self) -> dict:
        return {
            "intervals": [[a, b] for a, b in self.intervals],
            "eta_floor": self.eta_floor,
            "im_threshold": self.im_threshold,
            "grid_step": self.grid_step,
        }


@dataclass(frozen=True, eq=False)
class PMatrix:
    """
    Stokastik etiket geçiş matrisi ve Perron-Frobenius sol özvektörü.
    Pᵀu = u ve Σ u = 1.
    """

    entries: np.ndarray
    left_eigenvector: np.ndarray
    z: complex = 0j

    @property
    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def to_dict(self) -> dict:
        return {
            "entries": self.entries.tolist(),
            "left_eigenvector": self.left_eigenvector.tolist(),
        }
