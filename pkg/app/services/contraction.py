"""
Büzülme servisi - Kiraz küresi üzerinde genişleme ve büzülme nicelikleri

Tüm hesaplar (..., yuva) biçimli dizilerde vektörel yapılır; önde gelen
eksenler örnek yığınları ve permütasyonlar için kullanılır.

Dış yarı S_o, o′ dışındaki dış yuvalar ile o′'nun toplanmış değeri
(1+ϑ)g_{o'}'dan oluşur; bu değer yarının son sütunudur ve referansı Γ_{o'}'dur.
İç yarı S_{o'}, iç yuvalardır.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import DegenerateError, DegenerateIntervalError
from app.models.contraction import (
    O_PRIME,
    ContractionConstants,
    ContractionReport,
    KappaResult,
    SphereState,
    TwoStepResult,
    VisibilitySets,
)
from app.models.green import GreenVector, SpectralBands
from app.models.substitution import CherrySphere, LabelPermutation, SlotSide, SubstitutionModel
from app.services.greens import BandDetector, GreenSolver, weights_p
from app.services.hyperbolic import c0_bound, eps1, eta1_inverse, gamma
from app.services.substitution import SubstitutionAnalyzer
from app.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

__all__ = [
    "ContractionAnalyzer",
    "ConstantsCalculator",
    "StateSampler",
    "level_factors",
    "composed_c",
    "lambda0",
    "radius",
    "weights_p",
]

# Yuvarlama payı: iki tarafın büyüklüğüne göre göreli
DEFAULT_REL_TOL = 1e-9


def _expand(value, ndim: int):
    """Skaler ya da (batch,) biçimli değeri ndim eksene genişletir"""
    value = np.asarray(value, dtype=float)
    while value.ndim and value.ndim < ndim:
        value = value[..., None]
    return value


def level_factors(current: np.ndarray, reference: np.ndarray):
    """
    Tek bir seviyenin (yarı küre) büzülme nicelikleri.

    Args:
        current: (..., m) karmaşık, Im > 0
        reference: (m,) ya da (..., m) karmaşık, Im > 0

    Returns:
        (q, Q, cos_alpha, f): q (..., m), Q ve cos_alpha (..., m, m),
        f_x = Σ_y q_y Q_{x,y} cos α_{x,y}
    """
    current = np.asarray(current, dtype=complex)
    reference = np.broadcast_to(np.asarray(reference, dtype=complex), current.shape)

    im_g = current.imag
    q = im_g / im_g.sum(axis=-1, keepdims=True)

    diff = current - reference
    gam = np.abs(diff) ** 2 / (im_g * reference.imag)
    b = reference.imag * gam

    a_x, a_y = im_g[..., :, None], im_g[..., None, :]
    b_x, b_y = b[..., :, None], b[..., None, :]
    numerator = np.sqrt(a_x * a_y * b_x * b_y)
    denominator = 0.5 * (a_x * b_y + a_y * b_x)
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = np.where(denominator > 0, numerator / denominator, 0.0)
    Q = np.clip(Q, 0.0, 1.0)

    product = diff[..., :, None] * np.conj(diff[..., None, :])
    magnitude = np.abs(product)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_alpha = np.where(magnitude > 0, product.real / magnitude, 0.0)
    cos_alpha = np.clip(cos_alpha, -1.0, 1.0)

    f = np.einsum("...y,...xy->...x", q, Q * cos_alpha)
    return q, Q, cos_alpha, f


def composed_c(lam: float, reference: GreenVector, sphere: CherrySphere) -> float:
    """
    İki adım kontrolü için bileşik sabit:
    c(λ) = (1+c_w)(1+c_ϑ)(1+c_{w'}) − 1

    c_{w'} = c₀(λ, 0, 1, i·W′), c_ϑ = c₀(λ, 1, 0, Γ_{o'}), c_w = c₀(λ, 0, 1, i·W);
    W ve W′ dış ve iç yarıların Im Γ toplamlarıdır.
    """
    imag = reference.imag[sphere.labels]
    o_prime = reference[sphere.o_prime_label]
    outer_total = imag[sphere.outer_indices].sum() + o_prime.imag
    inner_total = imag[sphere.inner_indices].sum()

    c_inner = c0_bound(lam, 0.0, 1.0, 1j * inner_total)
    c_theta = c0_bound(lam, 1.0, 0.0, o_prime)
    c_outer = c0_bound(lam, 0.0, 1.0, 1j * outer_total)
    return float((1.0 + c_outer) * (1.0 + c_theta) * (1.0 + c_inner) - 1.0)


def lambda0(constants: ContractionConstants) -> float:
    """λ₀ = ε₁δ₀/(1+δ₀)"""
    return constants.lambda0


def radius(lam: float, constants: ContractionConstants) -> float:
    """R(λ) = η₁⁻¹((1+δ₀)λ/δ₀)"""
    return eta1_inverse((1.0 + constants.delta0) * lam / constants.delta0, constants.eps1)


class ContractionAnalyzer:
    """
    Kiraz küresi durumlarının genişleme ve büzülme hesapları.
    Tüm yöntemler tek durumda ve yığınlarda aynı şekilde çalışır.
    """

    def __init__(self, rel_tol: float = DEFAULT_REL_TOL):
        """
        Args:
            rel_tol: Eşitsizlik kontrollerinde yuvarlama payı
        """
        self._rel_tol = rel_tol

    # ============ Özyineleme ============

    def propagate(self, state: SphereState) -> Tuple[np.ndarray, np.ndarray]:
        """
        g_{o'} = −1/(z − v^per(o′) − w′ + Σ_iç g_x)
        g_o = −1/(z − v^per(o) − w + (1+ϑ)g_{o'} + Σ_dış g_x)
        """
        sphere = state.sphere
        ndim = state.g.ndim - 1
        v_o, v_o_prime = self._potentials(state)
        w = _expand(state.w, ndim)
        w_prime = _expand(state.w_prime, ndim)
        vartheta = _expand(state.vartheta, ndim)

        inner_sum = state.g[..., sphere.inner_indices].sum(axis=-1)
        outer_sum = state.g[..., sphere.outer_indices].sum(axis=-1)
        g_o_prime = -1.0 / (state.z - v_o_prime - w_prime + inner_sum)
        g_o = -1.0 / (state.z - v_o - w + (1.0 + vartheta) * g_o_prime + outer_sum)
        return g_o_prime, g_o

    # ============ Ağırlıklar ve oranlar ============

    def half_members(self, sphere: CherrySphere, half: SlotSide) -> List[int]:
        """Yarıdaki yuva kimlikleri; dış yarının sonunda O_PRIME bulunur"""
        if half is SlotSide.OUTER:
            return [int(x) for x in sphere.outer_indices] + [O_PRIME]
        return [int(x) for x in sphere.inner_indices]

    def half_arrays(self, state: SphereState, half: SlotSide) -> Tuple[np.ndarray, np.ndarray]:
        """Bir yarının (güncel değerler, referans değerler) çifti"""
        sphere = state.sphere
        reference = state.slot_reference
        if half is SlotSide.INNER:
            return state.g[..., sphere.inner_indices], reference[sphere.inner_indices]

        g_o_prime, _ = self.propagate(state)
        aggregate = (1.0 + _expand(state.vartheta, state.g.ndim - 1)) * g_o_prime
        current = np.concatenate(
            [state.g[..., sphere.outer_indices], aggregate[..., None]], axis=-1
        )
        ref = np.append(reference[sphere.outer_indices], state.reference[sphere.o_prime_label])
        return current, ref

    def weights_q(self, state: SphereState, half: SlotSide) -> np.ndarray:
        """q_y = Im g_y / Σ_{u∈S_i} Im g_u, half_members sırasında"""
        current, _ = self.half_arrays(state, half)
        return current.imag / current.imag.sum(axis=-1, keepdims=True)

    def pair_matrices(self, state: SphereState, half: SlotSide) -> Tuple[np.ndarray, np.ndarray]:
        """(Q, cos α) matrisleri, half_members sırasında"""
        current, ref = self.half_arrays(state, half)
        _, Q, cos_alpha, _ = level_factors(current, ref)
        return Q, cos_alpha

    def ratio_Q(self, state: SphereState, x: int, y: int):
        """Aynı yarıdaki x, y yuvaları için Q_{x,y}"""
        half, i, j = self._locate_pair(state.sphere, x, y)
        Q, _ = self.pair_matrices(state, half)
        return Q[..., i, j]

    def cos_alpha(self, state: SphereState, x: int, y: int):
        """Aynı yarıdaki x, y yuvaları için cos α_{x,y}"""
        half, i, j = self._locate_pair(state.sphere, x, y)
        _, cos_alpha = self.pair_matrices(state, half)
        return cos_alpha[..., i, j]

    def ratio_Q_from_rho(self, state: SphereState, x: int, y: int):
        """
        Q = 2√ρ/(1+ρ), ρ_{x,y} = (Im g_x Im Γ_y γ_y)/(Im g_y Im Γ_x γ_x).
        γ_x ya da γ_y sıfırsa 0.
        """
        half, i, j = self._locate_pair(state.sphere, x, y)
        current, ref = self.half_arrays(state, half)
        ref = np.broadcast_to(ref, current.shape)
        gam = gamma(current, ref)
        b = ref.imag * gam
        degenerate = (b[..., i] == 0) | (b[..., j] == 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = (current.imag[..., i] * b[..., j]) / (current.imag[..., j] * b[..., i])
            value = 2.0 * np.sqrt(rho) / (1.0 + rho)
        return np.where(degenerate, 0.0, value)

    # ============ Büzülme nicelikleri ============

    def gamma_per_slot(self, state: SphereState) -> np.ndarray:
        """γ_x(g) = γ(g_x, Γ_x)"""
        return gamma(state.g, state.slot_reference)

    def contraction_c(self, state: SphereState) -> np.ndarray:
        """
        Dış yuvalar: c_x = Σ_{y∈S_o} q_y Q_{x,y} cos α_{x,y}.
        İç yuvalar: c_x = c_{o'}·Σ_{y∈S_{o'}} q_y Q_{x,y} cos α_{x,y};
        c_{o'} dış yarıda toplanmış o′ değerinin çarpanıdır.
        """
        sphere = state.sphere
        outer_factor = self._outer_factors(state)
        inner_current, inner_ref = self.half_arrays(state, SlotSide.INNER)
        inner_factor = level_factors(inner_current, inner_ref)[3]

        c = np.empty(state.g.shape, dtype=float)
        c[..., sphere.outer_indices] = outer_factor[..., :-1]
        c[..., sphere.inner_indices] = outer_factor[..., -1:] * inner_factor
        return c

    def weights_p(self, reference: GreenVector, sphere: CherrySphere) -> np.ndarray:
        """Yuva ağırlıkları p_x (bkz. greens.weights_p)"""
        return weights_p(reference, sphere)

    def kappa(
        self,
        state: SphereState,
        p_exp: float,
        permutations: Union[Sequence[LabelPermutation], np.ndarray],
    ) -> KappaResult:
        """
        Permütasyon ortalamalı büzülme katsayısı.

        κ = Σ_π max(T_π, 0)^p / Σ_π Σ_x p_x (γ_x^π)^p, T_π = Σ_x p_x c_x^π γ_x^π.
        Payda sıfırsa (g = Γ) κ = 0. c ağırlıklı payda Σ_π Σ_x p_x c_x^π (γ_x^π)^p
        ile hesaplanan değer de döner; bu payda sıfırsa NaN.
        """
        if p_exp <= 1:
            raise ValueError(f"p > 1 olmalı: {p_exp}")

        index = self._permutation_array(permutations)
        p = weights_p(state.reference, state.sphere)
        permuted = self._permuted(state, index)

        c = self.contraction_c(permuted)
        gam = gamma(permuted.g, state.slot_reference)
        terms = (p * c * gam).sum(axis=-1)
        numerator = (np.maximum(terms, 0.0) ** p_exp).sum(axis=-1)
        powered = p * gam**p_exp
        denominator = powered.sum(axis=(-2, -1))
        c_denominator = (powered * c).sum(axis=(-2, -1))

        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(denominator > 0, numerator / denominator, 0.0)
            c_value = np.where(c_denominator != 0, numerator / c_denominator, np.nan)
        return KappaResult(kappa=value, kappa_c_weighted=c_value)

    # ============ Eşitsizlikler ============

    def one_step_check(self, state: SphereState) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Tek adım genişleme iç yarıda, w′ = 0 ile:
        γ(−1/(z − v + Σg), Γ_{o'}) ≤ Σ_x (Im Γ_x/Σ Im Γ) c_x γ_x.

        Returns:
            (sol taraf, sağ taraf, sağlanıyor mu)
        """
        sphere = state.sphere
        _, v_o_prime = self._potentials(state)
        current, ref = self.half_arrays(state, SlotSide.INNER)
        inner_sum = current.sum(axis=-1)
        g_o_prime = -1.0 / (state.z - v_o_prime + inner_sum)
        lhs = gamma(g_o_prime, state.reference[sphere.o_prime_label])

        weights = ref.imag / ref.imag.sum()
        factor = level_factors(current, ref)[3]
        terms = weights * factor * gamma(current, ref)
        rhs = terms.sum(axis=-1)
        tolerance = self._rel_tol * (1.0 + lhs + np.abs(terms).sum(axis=-1))
        return lhs, rhs, lhs <= rhs + tolerance

    def two_step_check(self, state: SphereState, lam: float, c_of_lambda: float) -> TwoStepResult:
        """
        γ(g_o, Γ_o) ≤ (1+c(λ)) Σ_x p_x c_x γ_x + c(λ).

        holds her durum için değerlendirilir. guaranteed yalnızca tanı amaçlıdır:
        c_{o'} ≥ 0 ya da λ = 0 ve gerçek z.
        """
        _, g_o = self.propagate(state)
        lhs = gamma(g_o, state.reference[state.sphere.o_label])

        p = weights_p(state.reference, state.sphere)
        outer_factor = self._outer_factors(state)
        c = self.contraction_c(state)
        terms = p * c * self.gamma_per_slot(state)
        total = terms.sum(axis=-1)
        rhs = (1.0 + c_of_lambda) * total + c_of_lambda
        tolerance = self._rel_tol * (1.0 + lhs + (1.0 + c_of_lambda) * np.abs(terms).sum(axis=-1))

        o_prime_factor = outer_factor[..., -1]
        exact = lam == 0 and np.imag(state.z) == 0
        guaranteed = (o_prime_factor >= 0) | exact
        return TwoStepResult(
            lhs=lhs,
            rhs=rhs,
            holds=lhs <= rhs + tolerance,
            o_prime_factor=o_prime_factor,
            guaranteed=np.broadcast_to(guaranteed, np.shape(lhs)),
        )

    # ============ Görünürlük ============

    def visible_mask(self, state: SphereState, eps: float) -> np.ndarray:
        """x ∈ Vis_γ(g, ε) ⇔ γ_x > ε·max_y γ_y (tümü sıfırsa boş)"""
        gam = self.gamma_per_slot(state)
        top = gam.max(axis=-1, keepdims=True)
        return (gam > eps * top) & (top > 0)

    def visibility(self, state: SphereState, eps: float) -> VisibilitySets:
        """Tek bir durum için görünür yuva kümeleri"""
        if state.g.ndim != 1:
            raise ValueError("visibility tek bir durum bekler")
        if eps <= 0:
            raise ValueError(f"ε pozitif olmalı: {eps}")

        vis_gamma = tuple(int(x) for x in np.flatnonzero(self.visible_mask(state, eps)))
        halves = []
        for half in (SlotSide.INNER, SlotSide.OUTER):
            current, _ = self.half_arrays(state, half)
            imag = current.imag
            members = self.half_members(state.sphere, half)
            halves.append(tuple(m for m, value in zip(members, imag) if value > eps * imag.max()))
        return VisibilitySets(vis_gamma=vis_gamma, vis_im_inner=halves[0], vis_im_outer=halves[1])

    # ============ Rapor ============

    def report(
        self,
        state: SphereState,
        p_exp: float,
        permutations: Union[Sequence[LabelPermutation], np.ndarray],
    ) -> ContractionReport:
        """Tek bir durum için tüm nicelikler"""
        outer_current, outer_ref = self.half_arrays(state, SlotSide.OUTER)
        inner_current, inner_ref = self.half_arrays(state, SlotSide.INNER)
        q_o, Q_o, cos_o, _ = level_factors(outer_current, outer_ref)
        q_i, Q_i, cos_i, _ = level_factors(inner_current, inner_ref)
        result = self.kappa(state, p_exp, permutations)
        return ContractionReport(
            q_outer=q_o,
            q_inner=q_i,
            Q_outer=Q_o,
            Q_inner=Q_i,
            cos_alpha_outer=cos_o,
            cos_alpha_inner=cos_i,
            c=self.contraction_c(state),
            p=weights_p(state.reference, state.sphere),
            gamma_per_slot=self.gamma_per_slot(state),
            kappa=float(result.kappa),
            kappa_c_weighted=float(result.kappa_c_weighted),
        )

    # ============ İç yöntemler ============

    def _outer_factors(self, state: SphereState) -> np.ndarray:
        current, ref = self.half_arrays(state, SlotSide.OUTER)
        return level_factors(current, ref)[3]

    def _potentials(self, state: SphereState) -> Tuple[float, float]:
        """Referans vektörünün kendi z noktasındaki (♣) denkleminden v^per(o) ve v^per(o′)"""
        # Γ_k = −1/(z − v_k + Σ M Γ) ⇒ v_k = z + Σ M Γ + 1/Γ_k
        reference = state.reference
        sphere = state.sphere
        slot_ref = state.slot_reference
        inner_total = slot_ref[sphere.inner_indices].sum()
        g_o_prime = reference[sphere.o_prime_label]
        v_o_prime = reference.z + inner_total + 1.0 / g_o_prime
        outer_total = slot_ref[sphere.outer_indices].sum() + g_o_prime
        v_o = reference.z + outer_total + 1.0 / reference[sphere.o_label]
        return float(np.real(v_o)), float(np.real(v_o_prime))

    def _locate_pair(self, sphere: CherrySphere, x: int, y: int):
        for half in (SlotSide.OUTER, SlotSide.INNER):
            members = self.half_members(sphere, half)
            if x in members and y in members:
                return half, members.index(x), members.index(y)
        raise ValueError(f"{x} ve {y} aynı yarıda değil")

    def _permutation_array(self, permutations) -> np.ndarray:
        if isinstance(permutations, np.ndarray):
            return permutations
        return np.array([perm.mapping for perm in permutations], dtype=np.int64)

    def _permuted(self, state: SphereState, index: np.ndarray) -> SphereState:
        """g∘π tüm π için; permütasyon ekseni yuva ekseninin hemen önündedir"""
        ndim = state.g.ndim
        return SphereState(
            sphere=state.sphere,
            reference=state.reference,
            g=state.g[..., index],
            z=state.z,
            w=_expand(state.w, ndim),
            w_prime=_expand(state.w_prime, ndim),
            vartheta=_expand(state.vartheta, ndim),
        )


class StateSampler:
    """
    Özellik testleri için rastgele kiraz küresi durumları.

    g_x = Γ_x + r·e^{iφ}, r log-düzgün [1e-3, 1e3], φ düzgün. Im ≤ 0 çıkan
    örneklerin sanal kısmı Im Γ_x² / (Im Γ_x − r sin φ) ile değiştirilir.
    w, w′, ϑ düzgün (−λ, λ).
    """

    def __init__(self, log_radius_range: Tuple[float, float] = (-3.0, 3.0)):
        self._log_radius_range = log_radius_range

    def sample(
        self,
        sphere: CherrySphere,
        reference: GreenVector,
        n: int,
        seed: int,
        lam: float = 0.0,
        z: Optional[complex] = None,
    ) -> SphereState:
        """n durumluk bir yığın"""
        rng = np.random.default_rng(seed)
        return self._draw(rng, sphere, reference, n, lam, reference.z if z is None else z)

    def sample_outside_ball(
        self,
        sphere: CherrySphere,
        reference: GreenVector,
        n: int,
        seed: int,
        radius_value: float,
        lam: float = 0.0,
        max_rounds: int = 100,
    ) -> SphereState:
        """
        Tüm yuvalarda γ_x ≥ R olan n durum (reddetme örneklemesi).

        Raises:
            DegenerateError: max_rounds turda yeterli örnek bulunamazsa
        """
        rng = np.random.default_rng(seed)
        slot_ref = reference.values[sphere.labels]
        kept: List[SphereState] = []
        count = 0
        for _ in range(max_rounds):
            batch = self._draw(rng, sphere, reference, n, lam, reference.z)
            mask = np.all(gamma(batch.g, slot_ref) >= radius_value, axis=-1)
            if mask.any():
                kept.append(
                    SphereState(
                        sphere, reference, batch.g[mask], reference.z,
                        batch.w[mask], batch.w_prime[mask], batch.vartheta[mask],
                    )
                )
                count += int(mask.sum())
            if count >= n:
                break
        else:
            raise DegenerateError(f"R={radius_value} dışında yeterli örnek yok ({count}/{n})")

        return SphereState(
            sphere,
            reference,
            np.concatenate([s.g for s in kept])[:n],
            reference.z,
            np.concatenate([s.w for s in kept])[:n],
            np.concatenate([s.w_prime for s in kept])[:n],
            np.concatenate([s.vartheta for s in kept])[:n],
        )

    def _draw(self, rng, sphere, reference, n, lam, z) -> SphereState:
        slot_ref = reference.values[sphere.labels]
        low, high = self._log_radius_range
        r = 10.0 ** rng.uniform(low, high, size=(n, sphere.size))
        phi = rng.uniform(0.0, 2.0 * np.pi, size=(n, sphere.size))

        real = slot_ref.real + r * np.cos(phi)
        shift = r * np.sin(phi)
        imag = slot_ref.imag + shift
        reflected = slot_ref.imag**2 / (slot_ref.imag - shift)
        imag = np.where(imag > 0, imag, reflected)

        w, w_prime, vartheta = (rng.uniform(-lam, lam, size=n) if lam > 0 else np.zeros(n) for _ in range(3))
        return SphereState(sphere, reference, real + 1j * imag, z, w, w_prime, vartheta)


class ConstantsCalculator:
    """
    ε₀, ε₁, δ₀, c₁, c₂ sabitlerini I + i[0,1] ızgarası üzerinde hesaplar.
    Izgara: energy_points enerji × η ∈ {1, 1/2, …, 2^-eta_halvings}, tüm kök etiketleri.
    """

    def __init__(
        self,
        solver: Optional[GreenSolver] = None,
        band_detector: Optional[BandDetector] = None,
        analyzer: Optional[SubstitutionAnalyzer] = None,
        energy_points: int = DEFAULT_SETTINGS.constants_energy_points,
        eta_halvings: int = DEFAULT_SETTINGS.constants_eta_halvings,
        grid_step: float = DEFAULT_SETTINGS.grid_step,
        threads: int = DEFAULT_SETTINGS.threads,
    ):
        self._solver = solver or GreenSolver()
        self._band_detector = band_detector or BandDetector(self._solver, threads)
        self._analyzer = analyzer or SubstitutionAnalyzer()
        self._energy_points = energy_points
        self._eta_halvings = eta_halvings
        self._grid_step = grid_step
        self._threads = threads

    def check_interval(self, bands: SpectralBands, interval: Tuple[float, float]) -> None:
        """
        Raises:
            DegenerateIntervalError: I bantların içinde 2·grid_step payla değilse
        """
        start, end = interval
        margin = 2.0 * self._grid_step
        if start > end or not bands.contains_interval(start, end, margin):
            raise DegenerateIntervalError(
                f"I=[{start}, {end}] bant kenarına {margin} paydan yakın ya da bant dışında"
            )

    def energy_grid(self, interval: Tuple[float, float]) -> np.ndarray:
        start, end = interval
        if start == end:
            return np.array([float(start)])
        return np.linspace(start, end, self._energy_points)

    def grid_vectors(self, model: SubstitutionModel, interval: Tuple[float, float]) -> List[GreenVector]:
        """Izgaradaki tüm Γ vektörleri (sürekleme ile)"""
        eta_floor = 2.0 ** (-self._eta_halvings)
        energies = self.energy_grid(interval)

        def path(energy: float) -> List[GreenVector]:
            return self._solver.continuation_path(model, float(energy), eta_floor)

        if self._threads > 1:
            with ThreadPoolExecutor(max_workers=self._threads) as executor:
                paths = list(executor.map(path, energies))
        else:
            paths = [path(energy) for energy in energies]
        return [vector for p in paths for vector in p]

    def compute(
        self,
        model: SubstitutionModel,
        interval: Tuple[float, float],
        p_exp: float,
        bands: Optional[SpectralBands] = None,
    ) -> ContractionConstants:
        """
        Args:
            model: Yerine koyma modeli
            interval: I = [a, b]
            p_exp: Moment üssü (> 1)
            bands: Önceden bulunmuş bantlar (yoksa tespit edilir)

        Raises:
            DegenerateIntervalError: I bant kenarına çok yakınsa
        """
        if p_exp <= 1:
            raise ValueError(f"p > 1 olmalı: {p_exp}")
        if bands is None:
            bands = self._band_detector.detect_bands(model, grid_step=self._grid_step)
        self.check_interval(bands, interval)

        vectors = self.grid_vectors(model, interval)
        spheres = [self._analyzer.cherry_sphere(model, k) for k in range(model.alphabet_size)]

        eps1_value = eps1(v.values[s.labels] for v in vectors for s in spheres)
        eps0_value = np.inf
        delta_value = np.inf
        c1_ratio = 0.0
        c2_value = np.inf
        for vector in vectors:
            for sphere in spheres:
                imag = vector.imag[sphere.labels]
                eps0_value = min(eps0_value, float(imag.min() / imag.max()))

                args = np.angle(vector.values[sphere.labels])
                delta_value = min(delta_value, float(np.minimum(args, np.pi - args).min()))

                p = weights_p(vector, sphere)
                c1_ratio = max(c1_ratio, float((1.0 - p.min()) / p.min()))
                jensen = np.minimum(p_exp * (p_exp - 1.0) * p / 2.0, 1.0 - (1.0 - p) ** (p_exp - 1.0))
                c2_value = min(c2_value, float(((1.0 - p) * jensen).min()))

        constants = ContractionConstants(
            eps0=eps0_value,
            eps1=eps1_value,
            delta0=0.25 * delta_value,
            c1=1.0 / c1_ratio,
            c2=c2_value,
            p_exp=p_exp,
            interval=(float(interval[0]), float(interval[1])),
        )
        logger.info("Sabitler: %s", constants.to_dict())
        return constants
