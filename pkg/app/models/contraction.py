"""
Büzülme modelleri - Kiraz küresi durumu ve büzülme raporları
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from app.models.green import GreenVector
from app.models.substitution import CherrySphere

# Dış yarıda o′'nun toplanmış değerini temsil eden yuva kimliği
O_PRIME = -1

ArrayLike = Union[float, np.ndarray]


def _json_float(value: float) -> Optional[float]:
    """NaN JSON'da null olarak yazılır"""
    value = float(value)
    return None if np.isnan(value) else value


@dataclass(frozen=True, eq=False)
class SphereState:
    """
    Kiraz küresi yuvalarındaki Green değerleri ve pertürbasyonlar.

    g son ekseni yuvalar olan bir dizidir; önceki eksenler bir örnek
    yığınını (batch) temsil edebilir. w, w_prime ve vartheta ya skalerdir ya da
    yığın biçimindedir.
    """

    sphere: CherrySphere
    reference: GreenVector
    g: np.ndarray
    z: complex
    w: ArrayLike = 0.0
    w_prime: ArrayLike = 0.0
    vartheta: ArrayLike = 0.0

    def __post_init__(self) -> None:
        if self.g.shape[-1] != self.sphere.size:
            raise ValueError(f"g son ekseni {self.sphere.size} olmalı: {self.g.shape}")
        if np.any(self.g.imag <= 0):
            raise ValueError("Tüm yuvalarda Im g > 0 olmalı")

    @property
    def batch_shape(self) -> Tuple[int, ...]:
        return self.g.shape[:-1]

    @property
    def slot_reference(self) -> np.ndarray:
        """Her yuvanın pertürbe edilmemiş Γ_x değeri"""
        return self.reference.values[self.sphere.labels]

    def at(self, index: int) -> "SphereState":
        """Yığından tek bir durum"""

        def pick(value):
            return value[index] if np.ndim(value) else value

        return SphereState(
            sphere=self.sphere,
            reference=self.reference,
            g=self.g[index],
            z=self.z,
            w=pick(self.w),
            w_prime=pick(self.w_prime),
            vartheta=pick(self.vartheta),
        )

    def with_g(self, g: np.ndarray) -> "SphereState":
        """Aynı pertürbasyonlarla yeni yuva değerleri"""
        return SphereState(self.sphere, self.reference, g, self.z, self.w, self.w_prime, self.vartheta)

    def to_dict(self) -> dict:
        """Tek bir durumun JSON gösterimi"""
        return {
            "g": [[float(v.real), float(v.imag)] for v in np.ravel(self.g)],
            "z": [float(np.real(self.z)), float(np.imag(self.z))],
            "w": float(self.w),
            "w_prime": float(self.w_prime),
            "vartheta": float(self.vartheta),
        }


@dataclass(frozen=True, eq=False)
class ContractionReport:
    """Tek bir durum için tüm büzülme nicelikleri"""

    q_outer: np.ndarray
    q_inner: np.ndarray
    Q_outer: np.ndarray
    Q_inner: np.ndarray
    cos_alpha_outer: np.ndarray
    cos_alpha_inner: np.ndarray
    c: np.ndarray
    p: np.ndarray
    gamma_per_slot: np.ndarray
    kappa: float
    kappa_c_weighted: float

    def to_dict(self) -> dict:
        return {
            "q_outer": self.q_outer.tolist(),
            "q_inner": self.q_inner.tolist(),
            "Q_outer": self.Q_outer.tolist(),
            "Q_inner": self.Q_inner.tolist(),
            "cos_alpha_outer": self.cos_alpha_outer.tolist(),
            "cos_alpha_inner": self.cos_alpha_inner.tolist(),
            "c": self.c.tolist(),
            "p": self.p.tolist(),
            "gamma_per_slot": self.gamma_per_slot.tolist(),
            "kappa": _json_float(self.kappa),
            "kappa_c_weighted": _json_float(self.kappa_c_weighted),
        }


@dataclass(frozen=True, eq=False)
class KappaResult:
    """κ^(p): c içermeyen payda ile ve c ağırlıklı payda ile"""

    kappa: np.ndarray
    kappa_c_weighted: np.ndarray


@dataclass(frozen=True, eq=False)
class TwoStepResult:
    """İki adım genişleme eşitsizliğinin iki tarafı"""

    lhs: np.ndarray
    rhs: np.ndarray
    holds: np.ndarray
    o_prime_factor: np.ndarray
    # c_{o'} ≥ 0 ya da (λ = 0 ve gerçek z) olan durumlar
    guaranteed: np.ndarray


@dataclass(frozen=True)
class VisibilitySets:
    """Görünür yuva kümeleri; dış Im kümesi o′ için O_PRIME içerebilir"""

    vis_gamma: Tuple[int, ...]
    vis_im_inner: Tuple[int, ...]
    vis_im_outer: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "vis_gamma": list(self.vis_gamma),
            "vis_im_inner": list(self.vis_im_inner),
            "vis_im_outer": list(self.vis_im_outer),
        }


@dataclass(frozen=True)
class ContractionConstants:
    """Bir enerji aralığı üzerinde ızgara ile hesaplanan sabitler"""

    eps0: float
    eps1: float
    delta0: float
    c1: float
    c2: float
    p_exp: float
    interval: Tuple[float, float] = field(default=(0.0, 0.0))

    @property
    def lambda0(self) -> float:
        """λ₀ = ε₁δ₀/(1+δ₀)"""
        return self.eps1 * self.delta0 / (1.0 + self.delta0)

    def invisible_gamma_bound(self, eps: float) -> float:
        """Görünmez yuva varken κ için üst sınır: 1 − c₂(1 − ε/c₁)²"""
        return 1.0 - self.c2 * (1.0 - eps / self.c1) ** 2

    def to_dict(self) -> dict:
        return {
            "eps0": self.eps0,
            "eps1": self.eps1,
            "delta0": self.delta0,
            "c1": self.c1,
            "c2": self.c2,
            "lambda0": self.lambda0,
            "p_exp": self.p_exp,
            "interval": list(self.interval),
        }
