"""
Yerine koyma servisi - Model doğrulama, ağaç büyütme, kiraz küresi ve permütasyonlar
"""

import itertools
import logging
from math import factorial, prod
from typing import List, Optional

import numpy as np

from app.errors import NoM1StarWitnessError, PermutationLimitError, SizeLimitError
from app.models.substitution import (
    CherrySlot,
    CherrySphere,
    LabeledTree,
    LabelPermutation,
    SlotSide,
    SubstitutionModel,
    ValidationReport,
)
from app.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)


class SubstitutionAnalyzer:
    """
    Yerine koyma matrisinin koşullarını denetler ve kiraz küresini kurar.
    Single Responsibility: Sadece matris yapısı ile ilgilenir.
    """

    def validate(self, model: SubstitutionModel) -> ValidationReport:
        """
        (M0), (M1), (M1*) ve (M2) koşullarını hesaplar.

        Args:
            model: Denetlenecek model

        Returns:
            Koşulların raporu (istisna fırlatmaz)
        """
        matrix = model.matrix_array
        size = model.alphabet_size

        m0 = size > 1 or matrix[0, 0] >= 2
        m1 = bool(np.all(np.diag(matrix) >= 1))
        m1star = all(self._witness(model, k) is not None for k in range(size))
        m2 = self._is_irreducible(matrix)

        return ValidationReport(m0=bool(m0), m1=m1, m1star=m1star, m2=m2)

    def choose_o_prime(self, model: SubstitutionModel, k: int) -> int:
        """
        (M1*) tanığını seçer: M[k][k′] ≥ 1 ve supp(k) ⊆ supp(k′).
        Birden çok tanık varsa en küçük indeks döner.

        Raises:
            NoM1StarWitnessError: k için tanık yoksa
        """
        witness = self._witness(model, k)
        if witness is None:
            raise NoM1StarWitnessError(k)
        return witness

    def cherry_sphere(self, model: SubstitutionModel, k: int) -> CherrySphere:
        """
        k etiketli o için S_{o,o'} kümesini kurar.
        Önce dış yuvalar (o′ hariç o'nun çocukları), sonra iç yuvalar (o′'nun
        çocukları); her grup kanonik çocuk sırasındadır.
        """
        k_prime = self.choose_o_prime(model, k)

        outer_labels = self._child_labels(model, k)
        # o′, kanonik sırada k′ etiketli ilk çocuktur
        outer_labels.remove(k_prime)
        inner_labels = self._child_labels(model, k_prime)

        slots = []
        for label in outer_labels:
            slots.append(CherrySlot(len(slots), label, SlotSide.OUTER))
        for label in inner_labels:
            slots.append(CherrySlot(len(slots), label, SlotSide.INNER))

        return CherrySphere(o_label=k, o_prime_label=k_prime, slots=tuple(slots))

    def _witness(self, model: SubstitutionModel, k: int) -> Optional[int]:
        support_k = model.support(k)
        for candidate in sorted(support_k):
            if support_k <= model.support(candidate):
                return candidate
        return None

    def _child_labels(self, model: SubstitutionModel, k: int) -> List[int]:
        labels: List[int] = []
        for label, count in enumerate(model.matrix[k]):
            labels.extend([label] * count)
        return labels

    def _is_irreducible(self, matrix: np.ndarray) -> bool:
        """n ≤ |A| uzunluklu yollarla boolean erişilebilirlik"""
        adjacency = matrix > 0
        reach = adjacency.copy()
        power = adjacency.copy()
        for _ in range(1, matrix.shape[0]):
            power = (power.astype(np.int64) @ adjacency.astype(np.int64)) > 0
            reach |= power
        return bool(reach.all())


class TreeBuilder:
    """Modelden sonlu derinlikli etiketli ağaç üretir"""

    def __init__(self, max_vertices: int = DEFAULT_SETTINGS.max_vertices):
        """
        Args:
            max_vertices: İzin verilen en büyük köşe sayısı
        """
        self._max_vertices = max_vertices

    @property
    def max_vertices(self) -> int:
        return self._max_vertices

    def count_vertices(self, model: SubstitutionModel, root_label: int, depth: int) -> int:
        """Kök etiketinin göstergesine M'yi tekrar tekrar uygulayarak köşe sayısı"""
        counts = [0] * model.alphabet_size
        counts[root_label] = 1
        total = 1
        for _ in range(depth):
            counts = [
                sum(counts[k] * model.matrix[k][l] for k in range(model.alphabet_size))
                for l in range(model.alphabet_size)
            ]
            total += sum(counts)
        return total

    def grow_tree(self, model: SubstitutionModel, root_label: int, depth: int) -> LabeledTree:
        """
        Genişlik öncelikli ağaç büyütür.

        Args:
            model: Yerine koyma modeli
            root_label: Kök etiketi
            depth: Ağaç derinliği (≥ 0)

        Returns:
            Kanonik çocuk sıralı ağaç

        Raises:
            SizeLimitError: Köşe sayısı üst sınırı aşarsa
        """
        if depth < 0:
            raise ValueError(f"Derinlik negatif olamaz: {depth}")

        expected = self.count_vertices(model, root_label, depth)
        if expected > self._max_vertices:
            raise SizeLimitError(expected, self._max_vertices)

        row_sums = model.row_sums
        width = int(row_sums.max()) if row_sums.size else 0
        template = np.zeros((model.alphabet_size, max(width, 1)), dtype=np.int64)
        for k in range(model.alphabet_size):
            child_labels = np.repeat(np.arange(model.alphabet_size), model.matrix_array[k])
            template[k, : child_labels.size] = child_labels

        level_labels = [np.array([root_label], dtype=np.int64)]
        level_parents = [np.array([-1], dtype=np.int64)]
        level_starts = [0, 1]

        for _ in range(depth):
            labels = level_labels[-1]
            counts = row_sums[labels]
            mask = np.arange(template.shape[1])[None, :] < counts[:, None]
            next_labels = template[labels][mask]
            parent_ids = np.repeat(np.arange(level_starts[-2], level_starts[-1]), counts)
            level_labels.append(next_labels)
            level_parents.append(parent_ids)
            level_starts.append(level_starts[-1] + next_labels.size)

        labels = np.concatenate(level_labels)
        parents = np.concatenate(level_parents)
        size = labels.size

        child_count = np.zeros(size, dtype=np.int64)
        interior = level_starts[-2]
        child_count[:interior] = row_sums[labels[:interior]]
        child_start = np.full(size, size, dtype=np.int64)
        if interior:
            child_start[:interior] = 1 + np.concatenate(([0], np.cumsum(child_count[:interior])[:-1]))

        logger.debug("Ağaç büyütüldü: kök=%d derinlik=%d köşe=%d", root_label, depth, size)
        return LabeledTree(
            depth=depth,
            labels=labels,
            parents=parents,
            child_start=child_start,
            child_count=child_count,
            level_starts=tuple(level_starts),
        )


class PermutationEnumerator:
    """Kiraz küresinin etiket koruyan permütasyonlarını listeler"""

    def __init__(self, max_count: int = DEFAULT_SETTINGS.max_permutations):
        self._max_count = max_count

    def count(self, sphere: CherrySphere) -> int:
        """Π_k m_k!"""
        return prod(factorial(m) for m in sphere.label_multiplicities().values())

    def enumerate_permutations(self, sphere: CherrySphere) -> List[LabelPermutation]:
        """
        Tüm etiket koruyan bijeksiyonlar, deterministik sırada.

        Raises:
            PermutationLimitError: Sayı üst sınırı aşarsa
        """
        total = self.count(sphere)
        if total > self._max_count:
            raise PermutationLimitError(total, self._max_count)

        groups = [
            [slot.index for slot in sphere.slots if slot.label == label]
            for label in sorted(sphere.label_multiplicities())
        ]
        result = []
        for images in itertools.product(*(itertools.permutations(g) for g in groups)):
            mapping = [0] * sphere.size
            for group, image in zip(groups, images):
                for x, y in zip(group, image):
                    mapping[x] = y
            result.append(LabelPermutation(tuple(mapping)))
        return result

    def as_index_array(self, permutations: List[LabelPermutation]) -> np.ndarray:
        """(|Π|, yuva) biçiminde indeks dizisi"""
        return np.array([perm.mapping for perm in permutations], dtype=np.int64)
