"""
Monte Carlo modelleri - Deneme ayarları ve moment tahminleri
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from app.models.disorder import DisorderSpec
from app.models.green import complex_to_pair
from app.models.substitution import SubstitutionModel


class Boundary(Enum):
    """Kesik özyinelemede yaprakların tohumlanması"""

    FREE = "free"  # pertürbe edilmemiş Γ
    DIRICHLET = "dirichlet"  # çocuksuz köşe


@dataclass(frozen=True)
class TrialConfig:
    """
    Bir Monte Carlo çalıştırmasının tüm girdileri.
    depth None ise derinlik pilot çalıştırma ile seçilir.
    """

    model: SubstitutionModel
    disorder: DisorderSpec
    energy: float
    eta: float
    lam: float
    p_exp: float
    n_trials: int
    seed: int
    depth: Optional[int] = None
    boundary: Boundary = Boundary.FREE

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"λ [0, 1) içinde olmalı: {self.lam}")
        if self.eta <= 0:
            raise ValueError(f"η pozitif olmalı: {self.eta}")
        if self.p_exp <= 1:
            raise ValueError(f"p > 1 olmalı: {self.p_exp}")
        if self.n_trials < 1:
            raise ValueError(f"Deneme sayısı pozitif olmalı: {self.n_trials}")
        if self.depth is not None and self.depth < 2:
            raise ValueError(f"Derinlik ≥ 2 olmalı: {self.depth}")

    @property
    def z(self) -> complex:
        return complex(self.energy, self.eta)

    def with_point(self, lam: float, eta: float) -> "TrialConfig":
        """Aynı ayarlar, farklı (λ, η)"""
        return replace(self, lam=lam, eta=eta)

    def with_depth(self, depth: int) -> "TrialConfig":
        return replace(self, depth=depth)

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.model.alphabet),
            "matrix": [list(row) for row in self.model.matrix],
            "v_per": list(self.model.v_per),
            "root_label": self.model.root_label,
            "disorder": self.disorder.to_dict(),
            "energy": self.energy,
            "eta": self.eta,
            "lambda": self.lam,
            "p": self.p_exp,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "depth": self.depth,
            "boundary": self.boundary.value,
        }


@dataclass(frozen=True)
class DepthReport:
    """Derinlik pilotu: |Γ^D − Γ^{D+2}| dizisi ve seçilen derinlik"""

    depth: int
    differences: Tuple[float, ...]
    tolerance: float
    converged: bool

    @property
    def ratio(self) -> float:
        """Ardışık farkların geometrik ortalama oranı (tek fark varsa NaN)"""
        diffs = np.asarray(self.differences)
        if diffs.size < 2 or np.any(diffs[:-1] == 0):
            return float("nan")
        ratios = diffs[1:] / diffs[:-1]
        return float(np.exp(np.mean(np.log(np.maximum(ratios, 1e-300)))))

    def to_dict(self) -> dict:
        ratio = self.ratio
        return {
            "depth": self.depth,
            "differences": list(self.differences),
            "tolerance": self.tolerance,
            "converged": self.converged,
            "ratio": None if np.isnan(ratio) else ratio,
        }


@dataclass(frozen=True, eq=False)
class TrialSamples:
    """Tek kök etiketi için deneme başına örnekler"""

    label: int
    gamma_p: np.ndarray  # γ(Γ_kök, Γ_j)^p
    distance_p: np.ndarray  # |Γ_kök − Γ_j|^p
    imag_product_p: np.ndarray  # (Im Γ_kök · Im Γ_j)^p


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Eγ: her kök etiketi için E γ(Γ_{o(j)}(z,H^λ), Γ_{o(j)}(z,Δ))^p"""

    means: np.ndarray
    stderr: np.ndarray
    n_trials: int
    z: complex
    p_exp: float
    depth: int

    def __getitem__(self, label: int) -> float:
        return float(self.means[label])

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stderr": self.stderr.tolist(),
            "n_trials": self.n_trials,
            "z": complex_to_pair(self.z),
            "p": self.p_exp,
            "depth": self.depth,
        }


@dataclass(frozen=True, eq=False)
class VectorInequalityReport:
    """Eγ ≤ (1−δ)PEγ + C(λ) için ölçülen nicelikler"""

    e_gamma: np.ndarray
    p_e_gamma: np.ndarray
    slack: np.ndarray
    u: np.ndarray
    u_bound: float

    def to_dict(self) -> dict:
        return {
            "E_gamma": self.e_gamma.tolist(),
            "P_E_gamma": self.p_e_gamma.tolist(),
            "slack": self.slack.tolist(),
            "u": self.u.tolist(),
            "u_bound": self.u_bound,
        }


@dataclass(frozen=True)
class EuclideanMoment:
    """
    E|Γ_kök(z,H^λ) − Γ_kök(z,Δ)|^p ve Cauchy–Schwarz üst sınırı
    √(E γ^p · E (Im g Im h)^p).
    """

    mean: float
    stderr: float
    bound: float
    imag_moment: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "cauchy_schwarz_bound": self.bound,
            "imag_moment": self.imag_moment,
        }


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Tek (λ, η) noktasındaki tüm Monte Carlo çıktıları"""

    config: TrialConfig
    moments: MomentVector
    inequality: VectorInequalityReport
    euclidean: EuclideanMoment
    depth_report: Optional[DepthReport] = field(default=None)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "moment_vector": self.moments.means.tolist(),
            "stderr": self.moments.stderr.tolist(),
            "depth": self.moments.depth,
            "vector_inequality": self.inequality.to_dict(),
            "euclidean_moment": self.euclidean.to_dict(),
            "depth_pilot": self.depth_report.to_dict() if self.depth_report else None,
        }
