"""
Düzensizlik modelleri - Rastgele potansiyel ve atlama terimlerinin tanımı

DisorderSpec model dosyasında "disorder" anahtarı altında saklanır:
{"mode": ..., "per_label": [{"law": ..., "params": {...}}, ...]}
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from app.models.substitution import LabeledTree


class DisorderMode(Enum):
    """(v, θ) çiftinin nasıl üretileceği"""

    IID_POTENTIAL = "iid_potential"
    IID_HOPPING = "iid_hopping"
    IID_BOTH = "iid_both"
    CORRELATED_DECAY = "correlated_decay"
    EDGE_WEIGHT_LAPLACIAN = "edge_weight_laplacian"

    @property
    def uses_potential_law(self) -> bool:
        """v doğrudan etiket yasasından mı çekiliyor?"""
        return self in (DisorderMode.IID_POTENTIAL, DisorderMode.IID_BOTH, DisorderMode.CORRELATED_DECAY)

    @property
    def uses_hopping_law(self) -> bool:
        """θ etiket yasasından mı çekiliyor?"""
        return self in (DisorderMode.IID_HOPPING, DisorderMode.IID_BOTH, DisorderMode.EDGE_WEIGHT_LAPLACIAN)


class LawKind(Enum):
    """(−1, 1) üzerinde desteklenen sınırlı dağılımlar"""

    UNIFORM = "uniform"
    TWO_POINT = "two_point"
    TRUNCATED_NORMAL = "truncated_normal"


@dataclass(frozen=True)
class LawSpec:
    """Bir etiketin dağılımı: tür ve parametreler (width ya da sigma)"""

    kind: LawKind
    params: Tuple[Tuple[str, float], ...] = ()

    @classmethod
    def create(cls, kind: LawKind, **params: float) -> "LawSpec":
        return cls(kind=kind, params=tuple(sorted((k, float(v)) for k, v in params.items())))

    def param(self, name: str, default: Optional[float] = None) -> float:
        value = dict(self.params).get(name, default)
        if value is None:
            raise ValueError(f"{self.kind.value} yasası için '{name}' parametresi eksik")
        return value

    def to_dict(self) -> dict:
        return {"law": self.kind.value, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "LawSpec":
        return cls.create(LawKind(data["law"]), **data.get("params", {}))


@dataclass(frozen=True)
class DisorderSpec:
    """
    Düzensizlik tanımı.

    per_label her etiket için (v ve θ'da ortak) yasa listesidir.
    vertex_overrides belirli köşeler için yasayı değiştirir; bu durumda
    (P2) koşulu bilerek bozulur ve yalnızca negatif kontrol içindir.
    laplacian_root_override kenar ağırlıklı Laplace örneğinde köke ayrı
    etiket verilmesini (ebeveyn kenarı yok) uygular.
    """

    mode: DisorderMode
    per_label: Tuple[LawSpec, ...]
    vertex_overrides: Dict[int, LawSpec] = field(default_factory=dict)
    laplacian_root_override: bool = True

    def law_for(self, label: int) -> LawSpec:
        return self.per_label[label]

    def to_dict(self) -> dict:
        data = {
            "mode": self.mode.value,
            "per_label": [law.to_dict() for law in self.per_label],
        }
        if self.vertex_overrides:
            data["vertex_overrides"] = {
                str(vertex): law.to_dict() for vertex, law in sorted(self.vertex_overrides.items())
            }
        if not self.laplacian_root_override:
            data["laplacian_root_override"] = False
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "DisorderSpec":
        return cls(
            mode=DisorderMode(data["mode"]),
            per_label=tuple(LawSpec.from_dict(item) for item in data["per_label"]),
            vertex_overrides={
                int(vertex): LawSpec.from_dict(item)
                for vertex, item in data.get("vertex_overrides", {}).items()
            },
            laplacian_root_override=bool(data.get("laplacian_root_override", True)),
        )

    @classmethod
    def uniform(cls, mode: DisorderMode, width: float, alphabet_size: int) -> "DisorderSpec":
        """Tüm etiketlerde uniform(−width, width)"""
        law = LawSpec.create(LawKind.UNIFORM, width=width)
        return cls(mode=mode, per_label=(law,) * alphabet_size)


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """
    Bir ağaç üzerinde tek bir (v, θ) gerçekleşmesi.
    θ_x, x ile ebeveyni arasındaki kenarın değeridir; kökte kullanılmaz.
    """

    tree: LabeledTree
    v: np.ndarray
    theta: np.ndarray
    root_vper_shift: float = 0.0


@dataclass(frozen=True)
class StatReport:
    """(P1)/(P2) için ampirik test sonucu"""

    n_trials: int
    pair: Tuple[int, int]
    ks_statistic_v: float
    ks_pvalue_v: float
    ks_statistic_theta: float
    ks_pvalue_theta: float
    correlation_v: float
    correlation_theta: float
    correlation_threshold: float
    ancestor_pair: Tuple[int, int]
    ancestor_correlation: float
    significance: float = 0.01

    @property
    def p2_passed(self) -> bool:
        return min(self.ks_pvalue_v, self.ks_pvalue_theta) > self.significance

    @property
    def p1_passed(self) -> bool:
        return max(abs(self.correlation_v), abs(self.correlation_theta)) < self.correlation_threshold

    @property
    def passed(self) -> bool:
        return self.p1_passed and self.p2_passed

    @property
    def ancestor_correlated(self) -> bool:
        """Ata/torun çiftinde pozitif korelasyon saptandı mı?"""
        return self.ancestor_correlation > self.correlation_threshold

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "pair": list(self.pair),
            "ks_statistic_v": self.ks_statistic_v,
            "ks_pvalue_v": self.ks_pvalue_v,
            "ks_statistic_theta": self.ks_statistic_theta,
            "ks_pvalue_theta": self.ks_pvalue_theta,
            "correlation_v": self.correlation_v,
            "correlation_theta": self.correlation_theta,
            "correlation_threshold": self.correlation_threshold,
            "ancestor_pair": list(self.ancestor_pair),
            "ancestor_correlation": self.ancestor_correlation,
            "p1_passed": self.p1_passed,
            "p2_passed": self.p2_passed,
        }
