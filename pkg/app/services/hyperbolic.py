"""
Hiperbolik yarı metrik ve skaler eşitsizlik sabitleri

Tüm fonksiyonlar numpy dizileriyle vektörel çalışır; skaler girdiler için
skaler döner.
"""

import numpy as np

from app.errors import DegenerateError, OutOfRangeError
from app.models.green import GreenVector


def gamma(g, h):
    """γ(g,h) = |g−h|² / (Im g · Im h)"""
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    return np.abs(g - h) ** 2 / (g.imag * h.imag)


def hyperbolic_distance(g, h):
    """d_ℍ(g,h) = arccosh(γ(g,h)/2 + 1)"""
    return np.arccosh(0.5 * gamma(g, h) + 1.0)


def c0_bound(lam, a, b, h):
    """
    Doğrusal pertürbasyon sabiti:
    c₀ = −1 + (1+λ|a|)(1 + 2λ(2|a||h| + |b|)/Im h)²

    Her g ∈ ℍ için γ((1+λa)g + λb, h) ≤ (1+c₀)γ(g,h) + c₀ sağlanır.
    """
    h = np.asarray(h, dtype=complex)
    abs_a = np.abs(a)
    return -1.0 + (1.0 + lam * abs_a) * (
        1.0 + 2.0 * lam * (2.0 * abs_a * np.abs(h) + np.abs(b)) / h.imag
    ) ** 2


def jensen_delta(p, lam, ratio):
    """
    İyileştirilmiş Jensen sabiti δ_p(λ, s/r):
    (1 − s/r)² · {p(p−1)λ(1−λ)/2, p ∈ [1,2);  λ(1−λ^{p−1}), p ≥ 2}
    """
    p = np.asarray(p, dtype=float)
    lam = np.asarray(lam, dtype=float)
    small = p * (p - 1.0) * lam * (1.0 - lam) / 2.0
    large = lam * (1.0 - lam ** (p - 1.0))
    return (1.0 - np.asarray(ratio, dtype=float)) ** 2 * np.where(p < 2.0, small, large)


def split_power_bound(r, s, p):
    """
    (r+s)^p ≤ (1+s)^{p−1} r^p + (1+s)^p s, r, s ≥ 0, p ≥ 1.

    Returns:
        (sol taraf, sağ taraf)
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    lhs = (r + s) ** p
    rhs = (1.0 + s) ** (p - 1.0) * r**p + (1.0 + s) ** p * s
    return lhs, rhs


def euclidean_from_gamma(xi, zeta):
    """|ξ| için üst sınır: 4γ(ξ,ζ)·Im ζ + 2|ζ|"""
    zeta = np.asarray(zeta, dtype=complex)
    return 4.0 * gamma(xi, zeta) * zeta.imag + 2.0 * np.abs(zeta)


def eps1(samples) -> float:
    """
    Örneklenmiş Γ değerlerinin en küçük sanal kısmı.

    Args:
        samples: GreenVector dizisi ya da karmaşık sayı dizisi

    Raises:
        DegenerateError: Boşsa ya da bir örneğin Im ≤ 0 ise
    """
    values = [s.values if isinstance(s, GreenVector) else s for s in samples]
    if not values:
        raise DegenerateError("ε₁ için örnek yok")
    imag = np.concatenate([np.atleast_1d(np.asarray(v, dtype=complex)).imag for v in values])
    if np.any(imag <= 0):
        raise DegenerateError("Im Γ ≤ 0 olan örnek var")
    return float(imag.min())


def eta1_inverse(s: float, eps1_value: float) -> float:
    """
    η₁⁻¹(s) = s² / ((ε₁ − s) ε₁), 0 ≤ s < ε₁.

    Raises:
        OutOfRangeError: s tanım aralığında değilse
    """
    if s < 0 or s >= eps1_value:
        raise OutOfRangeError(f"s={s} [0, ε₁={eps1_value}) aralığında değil")
    return s * s / ((eps1_value - s) * eps1_value)


def invisible_im_bound(eps0: float, eps: float, eps_prime: float) -> float:
    """
    Im-görünmez, γ-görünür bir çift için ortalama oranı sınırı:
    Q ≤ 2√(ε₀εε′) / (ε₀ε + ε′)
    """
    return 2.0 * np.sqrt(eps0 * eps * eps_prime) / (eps0 * eps + eps_prime)


def alq_delta(c: float, eps: float, min_half_size: int) -> float:
    """Q < c olan görünür bir çiftten gelen büzülme payı: (1−c)ε / min|S_i|"""
    return (1.0 - c) * eps / min_half_size


def c_delta(c: float, eps_prime: float, p: float) -> float:
    """|c_x| ≤ c olan yuvadan gelen büzülme payı: ε′(1 − c^p)"""
    return eps_prime * (1.0 - c**p)
