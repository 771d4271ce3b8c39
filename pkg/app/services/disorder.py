"""
Düzensizlik servisi - Dağılım stratejileri, örnekleyici ve (P1)/(P2) denetimi

Her yasa düzgün [0,1) değerlerini ters dağılım fonksiyonu ile (−1,1)'e
taşır. Düzgün değerler (seed, akış) anahtarlı Philox üretecinden köşe
kimliği sırasıyla çekilir; bu yüzden bir köşenin değeri yalnızca
(seed, akış, köşe kimliği) ile belirlenir ve derin ağaçlar sığ ağaçların
önekini paylaşır.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional, Sequence, Tuple, Type

import numpy as np
from scipy import stats

from app.errors import SpecModelMismatchError, SupportViolationError
from app.models.disorder import (
    DisorderMode,
    DisorderRealization,
    DisorderSpec,
    LawKind,
    LawSpec,
    StatReport,
)
from app.models.substitution import LabeledTree, SubstitutionModel
from app.services.substitution import TreeBuilder

logger = logging.getLogger(__name__)

# Akış kimlikleri: v, θ
POTENTIAL_STREAM = 0
HOPPING_STREAM = 1

# Kesik normal yasasının destek sınırı
_NORMAL_BOUND = 1.0 - 1e-9


def stream_generator(seed: int, key: Sequence[int], stream: int) -> np.random.Generator:
    """(seed, key, akış) için bağımsız Philox üreteci"""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key) + (stream,))
    return np.random.Generator(np.random.Philox(sequence))


# ============ Dağılım stratejileri ============


class DisorderLaw(ABC):
    """(−1, 1) üzerinde sınırlı bir dağılım"""

    @property
    @abstractmethod
    def kind(self) -> LawKind:
        pass

    @abstractmethod
    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Ters dağılım fonksiyonu, u ∈ [0, 1)"""
        pass

    @property
    @abstractmethod
    def bound(self) -> float:
        """sup |değer|"""
        pass


class UniformLaw(DisorderLaw):
    """uniform(−width, width), 0 ≤ width < 1"""

    def __init__(self, width: float):
        if not 0.0 <= width < 1.0:
            raise SupportViolationError(f"uniform genişliği [0, 1) içinde olmalı: {width}")
        self._width = width

    @property
    def kind(self) -> LawKind:
        return LawKind.UNIFORM

    @property
    def bound(self) -> float:
        return self._width

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self._width * (2.0 * np.asarray(u) - 1.0)


class TwoPointLaw(DisorderLaw):
    """±width eşit olasılıkla"""

    def __init__(self, width: float):
        if not 0.0 <= width < 1.0:
            raise SupportViolationError(f"iki nokta genişliği [0, 1) içinde olmalı: {width}")
        self._width = width

    @property
    def kind(self) -> LawKind:
        return LawKind.TWO_POINT

    @property
    def bound(self) -> float:
        return self._width

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(u) < 0.5, -self._width, self._width)


class TruncatedNormalLaw(DisorderLaw):
    """N(0, sigma²), (−1, 1) içine kesilmiş"""

    def __init__(self, sigma: float):
        if sigma <= 0:
            raise SupportViolationError(f"sigma pozitif olmalı: {sigma}")
        self._sigma = sigma
        limit = _NORMAL_BOUND / sigma
        self._dist = stats.truncnorm(-limit, limit, loc=0.0, scale=sigma)

    @property
    def kind(self) -> LawKind:
        return LawKind.TRUNCATED_NORMAL

    @property
    def bound(self) -> float:
        return _NORMAL_BOUND

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self._dist.ppf(np.asarray(u))


class LawFactory:
    """
    Factory Pattern - LawSpec'ten DisorderLaw üretir.
    Yeni yasa türleri register ile eklenebilir (Open/Closed).
    """

    _builders: Dict[LawKind, Callable[[LawSpec], DisorderLaw]] = {
        LawKind.UNIFORM: lambda spec: UniformLaw(spec.param("width")),
        LawKind.TWO_POINT: lambda spec: TwoPointLaw(spec.param("width")),
        LawKind.TRUNCATED_NORMAL: lambda spec: TruncatedNormalLaw(spec.param("sigma")),
    }

    @classmethod
    def create(cls, spec: LawSpec) -> DisorderLaw:
        builder = cls._builders.get(spec.kind)
        if builder is None:
            raise ValueError(f"Bilinmeyen yasa: {spec.kind}")
        return builder(spec)

    @classmethod
    def register(cls, kind: LawKind, builder: Callable[[LawSpec], DisorderLaw]) -> None:
        cls._builders[kind] = builder


# ============ Örnekleyici ============


class DisorderSampler:
    """
    DisorderSpec'i bir ağaca uygular.
    Mod başına bir üretim yöntemi sözlükten seçilir.
    """

    def __init__(self) -> None:
        self._modes: Dict[DisorderMode, Callable] = {
            DisorderMode.IID_POTENTIAL: self._iid,
            DisorderMode.IID_HOPPING: self._iid,
            DisorderMode.IID_BOTH: self._iid,
            DisorderMode.CORRELATED_DECAY: self._correlated_decay,
            DisorderMode.EDGE_WEIGHT_LAPLACIAN: self._edge_weight_laplacian,
        }

    def validate(self, spec: DisorderSpec, model: SubstitutionModel) -> None:
        """
        Raises:
            SpecModelMismatchError: Yasa sayısı ya da v^per modelle uyumsuzsa
            SupportViolationError: Yasa parametreleri geçersizse
        """
        if len(spec.per_label) != model.alphabet_size:
            raise SpecModelMismatchError(
                f"{model.alphabet_size} etiket için {len(spec.per_label)} yasa verildi"
            )
        for law in list(spec.per_label) + list(spec.vertex_overrides.values()):
            LawFactory.create(law)

        if spec.mode is DisorderMode.EDGE_WEIGHT_LAPLACIAN:
            expected = -(model.row_sums + 1).astype(float)
            if not np.allclose(model.v_per_array, expected, rtol=0.0, atol=1e-12):
                raise SpecModelMismatchError(
                    f"edge_weight_laplacian v^per = −(satır toplamı+1) ister: "
                    f"{model.v_per} ≠ {tuple(expected)}"
                )

    def sample(
        self,
        spec: DisorderSpec,
        model: SubstitutionModel,
        tree: LabeledTree,
        seed: int,
        key: Sequence[int] = (),
    ) -> DisorderRealization:
        """
        Args:
            spec: Düzensizlik tanımı
            model: Ağacı üreten model
            tree: Boş olmayan ağaç
            seed: 64 bit tohum
            key: Deneme anahtarı (örn. (etiket, deneme)); farklı anahtarlar bağımsızdır

        Returns:
            (spec, seed, key, tree)'nin saf fonksiyonu olan gerçekleşme
        """
        if tree.size == 0:
            raise ValueError("Ağaç boş")
        self.validate(spec, model)
        return self._modes[spec.mode](spec, model, tree, seed, key)

    def draw(
        self,
        spec: DisorderSpec,
        tree: LabeledTree,
        seed: int,
        key: Sequence[int],
        stream: int,
    ) -> np.ndarray:
        """Etiket (ya da köşe) yasasından köşe başına bağımsız değerler"""
        uniforms = stream_generator(seed, key, stream).random(tree.size)
        values = np.empty(tree.size)
        for label, law_spec in enumerate(spec.per_label):
            mask = tree.labels == label
            if mask.any():
                values[mask] = LawFactory.create(law_spec).ppf(uniforms[mask])
        for vertex, law_spec in spec.vertex_overrides.items():
            if 0 <= vertex < tree.size:
                values[vertex] = LawFactory.create(law_spec).ppf(uniforms[vertex])
        return values

    # ============ Modlar ============

    def _iid(self, spec, model, tree, seed, key) -> DisorderRealization:
        zeros = np.zeros(tree.size)
        v = self.draw(spec, tree, seed, key, POTENTIAL_STREAM) if spec.mode.uses_potential_law else zeros
        theta = self.draw(spec, tree, seed, key, HOPPING_STREAM) if spec.mode.uses_hopping_law else zeros
        return DisorderRealization(tree=tree, v=v, theta=theta)

    def _correlated_decay(self, spec, model, tree, seed, key) -> DisorderRealization:
        """v_x = (w_x + Σ_{c∈S_x} v_c)/k, k = en büyük satır toplamı"""
        k = float(model.row_sums.max())
        w = self.draw(spec, tree, seed, key, POTENTIAL_STREAM)
        v = w / k
        for d in range(tree.depth - 1, -1, -1):
            start, stop = tree.level_starts[d], tree.level_starts[d + 1]
            child_stop = tree.level_starts[d + 2]
            sums = np.bincount(
                tree.parents[stop:child_stop] - start, weights=v[stop:child_stop], minlength=stop - start
            )
            v[start:stop] = (w[start:stop] + sums) / k

        worst = float(np.max(np.abs(v)))
        if worst >= 1.0:
            raise SupportViolationError(f"correlated_decay |v| = {worst} ≥ 1")
        return DisorderRealization(tree=tree, v=v, theta=np.zeros(tree.size))

    def _edge_weight_laplacian(self, spec, model, tree, seed, key) -> DisorderRealization:
        """v_x = θ_x + Σ_{y∈S_x} θ_y; kökte ebeveyn kenarı yoksa θ_kök katılmaz"""
        theta = self.draw(spec, tree, seed, key, HOPPING_STREAM)
        child_sums = np.bincount(tree.parents[1:], weights=theta[1:], minlength=tree.size)
        v = theta + child_sums
        shift = 0.0
        if spec.laplacian_root_override:
            v[tree.root_id] -= theta[tree.root_id]
            theta = theta.copy()
            theta[tree.root_id] = 0.0
            shift = 1.0
        return DisorderRealization(tree=tree, v=v, theta=theta, root_vper_shift=shift)


# ============ (P1)/(P2) denetimi ============


def pick_disjoint_pair(
    tree: LabeledTree, model: Optional[SubstitutionModel] = None
) -> Optional[Tuple[int, int]]:
    """
    Aynı derinlikte, aynı etiketli ve ileri ağaçları ayrık ilk köşe çifti.
    Aynı derinlikteki farklı köşelerin ileri ağaçları her zaman ayrıktır.
    """
    for d in range(1, tree.depth + 1):
        seen: Dict[int, int] = {}
        for x in tree.level(d):
            label = int(tree.labels[x])
            if label in seen and tree.disjoint_forward_trees(seen[label], x):
                return seen[label], x
            seen.setdefault(label, x)
    return None


def ancestor_pair(tree: LabeledTree) -> Tuple[int, int]:
    """(kök, ilk çocuk)"""
    if tree.depth < 1:
        raise ValueError("Ata çifti için derinlik ≥ 1 olmalı")
    return tree.root_id, int(tree.child_start[tree.root_id])


def _correlation(a: np.ndarray, b: np.ndarray) -> float:
    if np.std(a) == 0 or np.std(b) == 0:
        return 0.0
    return float(stats.pearsonr(a, b)[0])


def _ks(a: np.ndarray, b: np.ndarray) -> Tuple[float, float]:
    result = stats.ks_2samp(a, b)
    return float(result.statistic), float(result.pvalue)


class DisorderAuditor:
    """Bir DisorderSpec'in (P1) ve (P2) koşullarını ampirik olarak sınar"""

    def __init__(
        self,
        sampler: Optional[DisorderSampler] = None,
        tree_builder: Optional[TreeBuilder] = None,
        significance: float = 0.01,
    ):
        self._sampler = sampler or DisorderSampler()
        self._tree_builder = tree_builder or TreeBuilder()
        self._significance = significance

    def check_p1_p2(
        self, spec: DisorderSpec, model: SubstitutionModel, n_trials: int, seed: int
    ) -> StatReport:
        """
        Ayrık ileri ağaçlı, aynı etiketli bir çiftte KS testi ve korelasyon;
        (kök, ilk çocuk) çiftinde korelasyon.

        Args:
            spec: Düzensizlik tanımı
            model: Yerine koyma modeli
            n_trials: Deneme sayısı (≥ 1000)
            seed: Tohum
        """
        if n_trials < 1000:
            raise ValueError(f"n_trials ≥ 1000 olmalı: {n_trials}")

        tree, pair = self._tree_with_pair(model)
        x, y = pair
        root, child = ancestor_pair(tree)

        v_pair = np.empty((n_trials, 2))
        theta_pair = np.empty((n_trials, 2))
        v_line = np.empty((n_trials, 2))
        for trial in range(n_trials):
            realization = self._sampler.sample(spec, model, tree, seed, key=(trial,))
            v_pair[trial] = realization.v[[x, y]]
            theta_pair[trial] = realization.theta[[x, y]]
            v_line[trial] = realization.v[[root, child]]

        ks_v = _ks(v_pair[:, 0], v_pair[:, 1])
        ks_theta = _ks(theta_pair[:, 0], theta_pair[:, 1])
        report = StatReport(
            n_trials=n_trials,
            pair=(x, y),
            ks_statistic_v=ks_v[0],
            ks_pvalue_v=ks_v[1],
            ks_statistic_theta=ks_theta[0],
            ks_pvalue_theta=ks_theta[1],
            correlation_v=_correlation(v_pair[:, 0], v_pair[:, 1]),
            correlation_theta=_correlation(theta_pair[:, 0], theta_pair[:, 1]),
            correlation_threshold=3.0 / np.sqrt(n_trials),
            ancestor_pair=(root, child),
            ancestor_correlation=_correlation(v_line[:, 0], v_line[:, 1]),
            significance=self._significance,
        )
        logger.info("(P1)/(P2) raporu: %s", report.to_dict())
        return report

    def _tree_with_pair(self, model: SubstitutionModel) -> Tuple[LabeledTree, Tuple[int, int]]:
        """Çift bulunan en sığ derinlikten bir seviye daha derin ağaç"""
        for depth in range(1, model.alphabet_size + 2):
            tree = self._tree_builder.grow_tree(model, model.root_label, depth)
            pair = pick_disjoint_pair(tree, model)
            if pair is not None:
                deeper = self._tree_builder.grow_tree(model, model.root_label, depth + 1)
                return deeper, pair
        raise SpecModelMismatchError("Aynı etiketli ayrık köşe çifti bulunamadı")
