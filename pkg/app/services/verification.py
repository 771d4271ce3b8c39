"""
Doğrulama servisi - Eşitsizlik paketleri (Strategy Pattern) ve çalıştırıcı

Her paket tohumlu rastgele örnekler üzerinde bir eşitsizliği sınar ve
karşı örnek sayısını, en kötü payı ve en fazla 10 karşı örneği raporlar.
Kiraz küresi paketleri modelin her etiketi için ayrı ayrı çalışır.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.models.contraction import ContractionConstants, SphereState
from app.models.green import GreenVector
from app.models.substitution import CherrySphere, SlotSide, SubstitutionModel
from app.models.verification import MAX_REPORTED_STATES, SuiteResult, VerificationReport
from app.services.contraction import (
    DEFAULT_REL_TOL,
    ConstantsCalculator,
    ContractionAnalyzer,
    StateSampler,
    composed_c,
    radius,
    weights_p,
)
from app.services.greens import GreenSolver
from app.services.hyperbolic import (
    c0_bound,
    euclidean_from_gamma,
    gamma,
    jensen_delta,
    split_power_bound,
)
from app.services.substitution import PermutationEnumerator, SubstitutionAnalyzer

logger = logging.getLogger(__name__)

# Bellek için yığın başına en fazla durum
CHUNK_SIZE = 10_000
# κ ≤ 1 kontrolündeki mutlak pay
KAPPA_TOL = 1e-12
# Q için iki formülün karşılaştırma toleransı
Q_IDENTITY_TOL = 1e-10
# Z zinciri paketinde kullanılan üsler
Z_CHAIN_EXPONENTS = (1.1, 1.5, 2.0, 3.0)


def _complex_pair(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


def _random_upper(rng: np.random.Generator, n: int) -> np.ndarray:
    """Üst yarı düzlemde log-düzgün ölçekli noktalar"""
    real = rng.choice([-1.0, 1.0], size=n) * 10.0 ** rng.uniform(-3, 3, size=n)
    imag = 10.0 ** rng.uniform(-3, 3, size=n)
    return real + 1j * imag


class _Tally:
    """Yığınlar boyunca karşı örnek sayacı"""

    def __init__(self, name: str):
        self.name = name
        self.samples = 0
        self.count = 0
        self.worst = np.inf
        self.states: List[dict] = []

    def add(
        self,
        slack: np.ndarray,
        bad: np.ndarray,
        describe: Optional[Callable[[int], dict]] = None,
        mask: Optional[np.ndarray] = None,
    ) -> None:
        slack = np.ravel(slack)
        bad = np.ravel(bad)
        if mask is not None:
            mask = np.ravel(mask)
            bad = bad & mask
            slack = slack[mask]
        self.samples += slack.size
        self.count += int(bad.sum())
        if slack.size:
            self.worst = min(self.worst, float(slack.min()))
        if describe is not None:
            for index in np.flatnonzero(bad)[: MAX_REPORTED_STATES - len(self.states)]:
                self.states.append(describe(int(index)))

    def result(self, **details) -> SuiteResult:
        if self.count:
            logger.warning("%s: %d karşı örnek", self.name, self.count)
        return SuiteResult(
            name=self.name,
            samples=self.samples,
            counterexamples=self.count,
            worst_slack=float(self.worst) if np.isfinite(self.worst) else 0.0,
            states=tuple(self.states),
            details=details,
        )


def _relative_tol(*sides) -> np.ndarray:
    return DEFAULT_REL_TOL * (1.0 + sum(np.abs(side) for side in sides))


@dataclass
class VerificationContext:
    """Paketlerin paylaştığı girdiler"""

    model: SubstitutionModel
    reference: GreenVector
    spheres: Tuple[CherrySphere, ...]
    permutations: Dict[int, np.ndarray]
    analyzer: ContractionAnalyzer
    sampler: StateSampler
    lam: float
    p_exp: float
    samples: int
    seed: int
    constants: Optional[ContractionConstants] = None
    ball_samples: int = 10_000
    suite_index: int = 0
    summary: Dict[str, object] = field(default_factory=dict)

    def rng(self, stream: int = 0) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.suite_index, stream))
        return np.random.default_rng(sequence)

    def seed_for(self, stream: int) -> int:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.suite_index, stream))
        return int(sequence.generate_state(1)[0])

    def states(self, sphere: CherrySphere, lam: float = 0.0, stream: int = 0) -> Iterator[SphereState]:
        """samples durumu CHUNK_SIZE'lık yığınlar halinde üretir"""
        remaining = self.samples
        chunk = 0
        while remaining > 0:
            size = min(CHUNK_SIZE, remaining)
            seed = self.seed_for(1000 * stream + 100 * sphere.o_label + chunk)
            yield self.sampler.sample(sphere, self.reference, size, seed, lam=lam)
            remaining -= size
            chunk += 1


def _describe_state(state: SphereState, label: int) -> Callable[[int], dict]:
    def describe(index: int) -> dict:
        data = state.at(index).to_dict()
        data["label"] = label
        return data

    return describe


# ============ Paketler ============


class InequalitySuite(ABC):
    """Tek bir eşitsizlik paketi"""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def run(self, ctx: VerificationContext) -> SuiteResult:
        pass


class C0Suite(InequalitySuite):
    """γ((1+λa)g + λb, h) ≤ (1+c₀)γ(g,h) + c₀, λ|a| ≤ 1/2"""

    name = "c0"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        rng = ctx.rng()
        n = ctx.samples
        lam = rng.uniform(0.0, 0.5, size=n)
        a = rng.uniform(-1.0, 1.0, size=n)
        b = rng.uniform(-1.0, 1.0, size=n)
        g, h = _random_upper(rng, n), _random_upper(rng, n)

        c0 = c0_bound(lam, a, b, h)
        lhs = gamma((1.0 + lam * a) * g + lam * b, h)
        rhs = (1.0 + c0) * gamma(g, h) + c0

        tally = _Tally(self.name)
        tally.add(
            rhs - lhs,
            lhs > rhs + _relative_tol(lhs, rhs),
            lambda i: {"lambda": lam[i], "a": a[i], "b": b[i], "g": _complex_pair(g[i]), "h": _complex_pair(h[i])},
        )
        return tally.result()


class JensenSuite(InequalitySuite):
    """(λr + (1−λ)s)^p ≤ (1−δ_p)(λr^p + (1−λ)s^p), r > s ≥ 0"""

    name = "jensen"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        rng = ctx.rng()
        n = ctx.samples
        p = rng.uniform(1.0, 4.0, size=n)
        lam = rng.uniform(0.0, 1.0, size=n)
        r = 10.0 ** rng.uniform(-3, 3, size=n)
        s = r * rng.uniform(0.0, 1.0, size=n)

        delta = jensen_delta(p, lam, s / r)
        lhs = (lam * r + (1.0 - lam) * s) ** p
        rhs = (1.0 - delta) * (lam * r**p + (1.0 - lam) * s**p)

        tally = _Tally(self.name)
        tally.add(
            rhs - lhs,
            lhs > rhs + _relative_tol(lhs, rhs),
            lambda i: {"p": p[i], "lambda": lam[i], "r": r[i], "s": s[i]},
        )
        return tally.result()


class SplitPowerSuite(InequalitySuite):
    """(r+s)^p ≤ (1+s)^{p−1} r^p + (1+s)^p s"""

    name = "split_power"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        rng = ctx.rng()
        n = ctx.samples
        p = rng.uniform(1.0, 4.0, size=n)
        r = 10.0 ** rng.uniform(-3, 2, size=n)
        s = 10.0 ** rng.uniform(-3, 2, size=n)
        lhs, rhs = split_power_bound(r, s, p)

        tally = _Tally(self.name)
        tally.add(
            rhs - lhs,
            lhs > rhs + _relative_tol(lhs, rhs),
            lambda i: {"p": p[i], "r": r[i], "s": s[i]},
        )
        return tally.result()


class MoebiusSuite(InequalitySuite):
    """γ(−1/(z+ξ), −1/(z+ζ)) ≤ γ(ξ, ζ), Im z ≥ 0"""

    name = "moebius"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        rng = ctx.rng()
        n = ctx.samples
        xi, zeta = _random_upper(rng, n), _random_upper(rng, n)
        z = rng.uniform(-5.0, 5.0, size=n) + 1j * rng.uniform(0.0, 1.0, size=n)

        lhs = gamma(-1.0 / (z + xi), -1.0 / (z + zeta))
        rhs = gamma(xi, zeta)

        tally = _Tally(self.name)
        tally.add(
            rhs - lhs,
            lhs > rhs + _relative_tol(lhs, rhs),
            lambda i: {"xi": _complex_pair(xi[i]), "zeta": _complex_pair(zeta[i]), "z": _complex_pair(z[i])},
        )
        return tally.result()


class EuclidBoundSuite(InequalitySuite):
    """|ξ| ≤ 4γ(ξ,ζ)·Im ζ + 2|ζ|"""

    name = "euclid_bound"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        rng = ctx.rng()
        n = ctx.samples
        xi, zeta = _random_upper(rng, n), _random_upper(rng, n)
        lhs = np.abs(xi)
        rhs = euclidean_from_gamma(xi, zeta)

        tally = _Tally(self.name)
        tally.add(
            rhs - lhs,
            lhs > rhs + _relative_tol(lhs, rhs),
            lambda i: {"xi": _complex_pair(xi[i]), "zeta": _complex_pair(zeta[i])},
        )
        return tally.result()


class ZChainSuite(InequalitySuite):
    """max(Σ p c γ, 0)^p ≤ Σ p γ^p ≤ max γ^p"""

    name = "z_chain"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        for sphere in ctx.spheres:
            p = weights_p(ctx.reference, sphere)
            for states in ctx.states(sphere):
                c = ctx.analyzer.contraction_c(states)
                gam = ctx.analyzer.gamma_per_slot(states)
                describe = _describe_state(states, sphere.o_label)
                for exponent in Z_CHAIN_EXPONENTS:
                    first = np.maximum((p * c * gam).sum(axis=-1), 0.0) ** exponent
                    middle = (p * gam**exponent).sum(axis=-1)
                    last = (gam**exponent).max(axis=-1)
                    tally.add(middle - first, first > middle + _relative_tol(first, middle), describe)
                    tally.add(last - middle, middle > last + _relative_tol(middle, last), describe)
        return tally.result(exponents=list(Z_CHAIN_EXPONENTS))


class OneStepSuite(InequalitySuite):
    """İç yarıda tek adım genişleme, w′ = 0"""

    name = "one_step"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        for sphere in ctx.spheres:
            for states in ctx.states(sphere):
                lhs, rhs, holds = ctx.analyzer.one_step_check(states)
                tally.add(rhs - lhs, ~holds, _describe_state(states, sphere.o_label))
        return tally.result()


class TwoStepSuite(InequalitySuite):
    """
    γ(g_o, Γ_o) ≤ (1+c(λ)) Σ p_x c_x γ_x + c(λ), λ ∈ {0, λ}.
    Her durum karşı örnek adayıdır; c_{o'} < 0 olanlar ayrıca tanı olarak raporlanır.
    """

    name = "two_step"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        lambdas = sorted({0.0, float(ctx.lam)})
        outside = 0
        outside_violations = 0
        composed = {}
        for stream, lam in enumerate(lambdas):
            for sphere in ctx.spheres:
                c_value = composed_c(lam, ctx.reference, sphere) if lam > 0 else 0.0
                composed[f"{lam}:{sphere.o_label}"] = c_value
                for states in ctx.states(sphere, lam=lam, stream=stream):
                    result = ctx.analyzer.two_step_check(states, lam, c_value)
                    guaranteed = result.guaranteed
                    outside += int((~guaranteed).sum())
                    outside_violations += int((~guaranteed & ~result.holds).sum())
                    tally.add(result.rhs - result.lhs, ~result.holds, _describe_state(states, sphere.o_label))
        return tally.result(
            lambdas=lambdas,
            composed_c=composed,
            unguaranteed_states=outside,
            unguaranteed_violations=outside_violations,
        )


class KappaSuite(InequalitySuite):
    """κ ≤ 1 (Jensen ve |c| ≤ 1)"""

    name = "kappa_le_one"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        kappa_min, kappa_max = np.inf, -np.inf
        weighted_max = -np.inf
        for sphere in ctx.spheres:
            for states in ctx.states(sphere):
                result = ctx.analyzer.kappa(states, ctx.p_exp, ctx.permutations[sphere.o_label])
                kappa = result.kappa
                tally.add(1.0 - kappa, kappa > 1.0 + KAPPA_TOL, _describe_state(states, sphere.o_label))
                kappa_min = min(kappa_min, float(kappa.min()))
                kappa_max = max(kappa_max, float(kappa.max()))
                weighted = result.kappa_c_weighted[np.isfinite(result.kappa_c_weighted)]
                if weighted.size:
                    weighted_max = max(weighted_max, float(weighted.max()))

        ctx.summary.update(
            {
                "min": kappa_min,
                "max": kappa_max,
                "c_weighted_max": weighted_max if np.isfinite(weighted_max) else None,
            }
        )
        return tally.result(min=kappa_min, max=kappa_max)


class KappaOutsideBallSuite(InequalitySuite):
    """B_R(λ) dışındaki durumlarda κ < 1, λ = λ₀/2"""

    name = "kappa_outside_ball"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        if ctx.constants is None:
            return tally.result(skipped="sabitler yok")

        lam = 0.5 * ctx.constants.lambda0
        radius_value = radius(lam, ctx.constants)
        n = min(ctx.samples, ctx.ball_samples)
        kappa_max = -np.inf
        for sphere in ctx.spheres:
            states = ctx.sampler.sample_outside_ball(
                sphere, ctx.reference, n, ctx.seed_for(sphere.o_label), radius_value, lam=lam
            )
            kappa = ctx.analyzer.kappa(states, ctx.p_exp, ctx.permutations[sphere.o_label]).kappa
            tally.add(1.0 - kappa, kappa >= 1.0, _describe_state(states, sphere.o_label))
            kappa_max = max(kappa_max, float(kappa.max()))

        ctx.summary.update({"outside_ball_max": kappa_max, "outside_ball_margin": 1.0 - kappa_max})
        return tally.result(lam=lam, radius=radius_value, max=kappa_max, margin=1.0 - kappa_max)


class InvisibleGammaSuite(InequalitySuite):
    """Vis_γ(g,ε) ≠ S iken κ ≤ 1 − c₂(1 − ε/c₁)², ε = c₁/2"""

    name = "invisible_gamma"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        c1, c2 = self._constants(ctx)
        eps = 0.5 * c1
        bound = 1.0 - c2 * (1.0 - eps / c1) ** 2
        for sphere in ctx.spheres:
            for states in ctx.states(sphere):
                invisible = ~ctx.analyzer.visible_mask(states, eps).all(axis=-1)
                kappa = ctx.analyzer.kappa(states, ctx.p_exp, ctx.permutations[sphere.o_label]).kappa
                tally.add(
                    bound - kappa,
                    kappa > bound + KAPPA_TOL,
                    _describe_state(states, sphere.o_label),
                    mask=invisible,
                )
        return tally.result(eps=eps, c1=c1, c2=c2, bound=bound)

    def _constants(self, ctx: VerificationContext) -> Tuple[float, float]:
        """Izgara sabitleri ile referans noktasındaki değerlerin küçüğü"""
        c1_ratio = 0.0
        c2 = np.inf
        p_exp = ctx.p_exp
        for sphere in ctx.spheres:
            p = weights_p(ctx.reference, sphere)
            c1_ratio = max(c1_ratio, float((1.0 - p.min()) / p.min()))
            jensen = np.minimum(p_exp * (p_exp - 1.0) * p / 2.0, 1.0 - (1.0 - p) ** (p_exp - 1.0))
            c2 = min(c2, float(((1.0 - p) * jensen).min()))
        c1 = 1.0 / c1_ratio
        if ctx.constants is not None:
            c1 = min(c1, ctx.constants.c1)
            c2 = min(c2, ctx.constants.c2)
        return c1, c2


class QIdentitySuite(InequalitySuite):
    """Q_{x,y} = 2√ρ/(1+ρ)"""

    name = "q_identity"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        for sphere in ctx.spheres:
            for states in ctx.states(sphere):
                describe = _describe_state(states, sphere.o_label)
                for half in (SlotSide.OUTER, SlotSide.INNER):
                    members = ctx.analyzer.half_members(sphere, half)
                    Q, _ = ctx.analyzer.pair_matrices(states, half)
                    for i, x in enumerate(members):
                        for j, y in enumerate(members):
                            from_rho = ctx.analyzer.ratio_Q_from_rho(states, x, y)
                            error = np.abs(Q[..., i, j] - from_rho)
                            tally.add(Q_IDENTITY_TOL - error, error > Q_IDENTITY_TOL, describe)
        return tally.result()


class VisibilitySuite(InequalitySuite):
    """ε ≥ 1 ⇒ tüm kümeler boş; ε < 1 ⇒ en büyük γ'lı yuva görünür"""

    name = "visibility"

    def run(self, ctx: VerificationContext) -> SuiteResult:
        tally = _Tally(self.name)
        for sphere in ctx.spheres:
            for states in ctx.states(sphere):
                describe = _describe_state(states, sphere.o_label)
                none_visible = ~ctx.analyzer.visible_mask(states, 1.0).any(axis=-1)
                tally.add(np.zeros(none_visible.shape), ~none_visible, describe)

                half_mask = ctx.analyzer.visible_mask(states, 0.5)
                top = ctx.analyzer.gamma_per_slot(states).argmax(axis=-1)
                top_visible = np.take_along_axis(half_mask, top[:, None], axis=-1)[:, 0]
                tally.add(np.zeros(top_visible.shape), ~top_visible, describe)

                for index in range(min(len(top), MAX_REPORTED_STATES)):
                    sets = ctx.analyzer.visibility(states.at(index), 1.0)
                    empty = not (sets.vis_gamma or sets.vis_im_inner or sets.vis_im_outer)
                    tally.add(np.zeros(1), np.array([not empty]), describe)
        return tally.result()


class SuiteRegistry:
    """
    Registry Pattern - Tüm paketleri yönetir.
    Yeni paketler register ile eklenebilir (Open/Closed).
    """

    _suites: List[InequalitySuite] = []

    @classmethod
    def register(cls, suite: InequalitySuite) -> None:
        cls._suites.append(suite)

    @classmethod
    def get_suites(cls, names: Optional[Sequence[str]] = None) -> List[InequalitySuite]:
        """İsimlere göre paketler (None ise tümü, kayıt sırasında)"""
        if names is None:
            return cls._suites.copy()
        known = {suite.name: suite for suite in cls._suites}
        unknown = [name for name in names if name not in known]
        if unknown:
            raise ValueError(f"Bilinmeyen paket: {', '.join(unknown)}")
        return [known[name] for name in names]

    @classmethod
    def names(cls) -> List[str]:
        return [suite.name for suite in cls._suites]


for _suite in (
    C0Suite(),
    JensenSuite(),
    SplitPowerSuite(),
    ZChainSuite(),
    MoebiusSuite(),
    EuclidBoundSuite(),
    OneStepSuite(),
    TwoStepSuite(),
    KappaSuite(),
    KappaOutsideBallSuite(),
    InvisibleGammaSuite(),
    QIdentitySuite(),
    VisibilitySuite(),
):
    SuiteRegistry.register(_suite)


class Verifier:
    """Sabitleri hesaplar ve seçilen paketleri çalıştırır"""

    def __init__(
        self,
        solver: Optional[GreenSolver] = None,
        constants_calculator: Optional[ConstantsCalculator] = None,
        analyzer: Optional[ContractionAnalyzer] = None,
        sampler: Optional[StateSampler] = None,
        substitution: Optional[SubstitutionAnalyzer] = None,
        enumerator: Optional[PermutationEnumerator] = None,
    ):
        self._solver = solver or GreenSolver()
        self._constants = constants_calculator or ConstantsCalculator(solver=self._solver)
        self._analyzer = analyzer or ContractionAnalyzer()
        self._sampler = sampler or StateSampler()
        self._substitution = substitution or SubstitutionAnalyzer()
        self._enumerator = enumerator or PermutationEnumerator()

    def run(
        self,
        model: SubstitutionModel,
        interval: Tuple[float, float],
        p_exp: float,
        lam: float,
        samples: int,
        seed: int,
        suites: Optional[Sequence[str]] = None,
        constants: Optional[ContractionConstants] = None,
    ) -> VerificationReport:
        """
        Args:
            model: Yerine koyma modeli
            interval: I = [a, b]; referans Γ aralığın ortasında gerçek eksende çözülür
            p_exp: Moment üssü (> 1)
            lam: İki adım paketindeki pertürbasyon büyüklüğü
            samples: Paket ve etiket başına örnek sayısı
            seed: Tohum
            suites: Çalıştırılacak paket adları (None ise tümü)
            constants: Önceden hesaplanmış sabitler (yoksa hesaplanır)

        Raises:
            DegenerateIntervalError: I bant kenarına çok yakınsa
        """
        if samples < 1:
            raise ValueError(f"Örnek sayısı pozitif olmalı: {samples}")
        if lam < 0:
            raise ValueError(f"λ negatif olamaz: {lam}")

        if constants is None:
            constants = self._constants.compute(model, interval, p_exp)
        energy = 0.5 * (interval[0] + interval[1])
        reference = self._solver.solve_gamma_real(model, energy)

        spheres = tuple(self._substitution.cherry_sphere(model, k) for k in range(model.alphabet_size))
        permutations = {
            sphere.o_label: self._enumerator.as_index_array(self._enumerator.enumerate_permutations(sphere))
            for sphere in spheres
        }
        ctx = VerificationContext(
            model=model,
            reference=reference,
            spheres=spheres,
            permutations=permutations,
            analyzer=self._analyzer,
            sampler=self._sampler,
            lam=lam,
            p_exp=p_exp,
            samples=samples,
            seed=seed,
            constants=constants,
        )

        results = []
        for suite in SuiteRegistry.get_suites(suites):
            ctx.suite_index = SuiteRegistry.names().index(suite.name)
            result = suite.run(ctx)
            logger.info(
                "%s: %d/%d karşı örnek, en kötü pay %.3e",
                result.name, result.counterexamples, result.samples, result.worst_slack,
            )
            results.append(result)

        ctx.summary.setdefault("margin", None)
        if "max" in ctx.summary:
            ctx.summary["margin"] = 1.0 - ctx.summary["max"]
        return VerificationReport(
            interval=(float(interval[0]), float(interval[1])),
            lam=lam,
            p_exp=p_exp,
            samples=samples,
            seed=seed,
            suites=tuple(results),
            constants=constants,
            kappa_summary=ctx.summary,
        )
