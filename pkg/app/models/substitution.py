"""
Yerine koyma modeli - Sonlu koni tipli ağaçları üreten matris ve türetilmiş yapılar

SubstitutionModel etiket alfabesini, M matrisini ve etikete bağlı
potansiyeli tutar. LabeledTree, CherrySphere ve LabelPermutation bu modelden
türetilen değişmez kayıtlardır.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class SubstitutionModel:
    """
    Etiket alfabesi, yerine koyma matrisi M, periyodik potansiyel v^per ve kök etiketi.
    M[k][l], k etiketli bir köşenin l etiketli ileri komşu sayısıdır.
    """

    alphabet: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    v_per: Tuple[float, ...]
    root_label: int = 0

    def __post_init__(self) -> None:
        n = len(self.alphabet)
        if n == 0:
            raise ValueError("Alfabe boş olamaz")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ValueError(f"Matris {n}x{n} olmalı")
        if any(int(entry) != entry or entry < 0 for row in self.matrix for entry in row):
            raise ValueError("Matris girdileri negatif olmayan tam sayılar olmalı")
        if len(self.v_per) != n:
            raise ValueError(f"v_per uzunluğu {n} olmalı")
        if not 0 <= self.root_label < n:
            raise ValueError(f"Geçersiz kök etiketi: {self.root_label}")

    @classmethod
    def from_matrix(
        cls,
        matrix: Sequence[Sequence[int]],
        v_per: Optional[Sequence[float]] = None,
        root_label: int = 0,
        alphabet: Optional[Sequence[str]] = None,
    ) -> "SubstitutionModel":
        """Listelerden model oluşturur; alfabe verilmezse '0', '1', ... kullanılır"""
        size = len(matrix)
        names = tuple(alphabet) if alphabet is not None else tuple(str(k) for k in range(size))
        potential = tuple(float(v) for v in v_per) if v_per is not None else (0.0,) * size
        return cls(
            alphabet=names,
            matrix=tuple(tuple(int(entry) for entry in row) for row in matrix),
            v_per=potential,
            root_label=root_label,
        )

    @property
    def alphabet_size(self) -> int:
        """|A|"""
        return len(self.alphabet)

    @cached_property
    def matrix_array(self) -> np.ndarray:
        """M, numpy tam sayı dizisi olarak"""
        return np.array(self.matrix, dtype=np.int64)

    @cached_property
    def v_per_array(self) -> np.ndarray:
        """v^per, numpy dizisi olarak"""
        return np.array(self.v_per, dtype=float)

    @cached_property
    def row_sums(self) -> np.ndarray:
        """Her etiketin ileri komşu sayısı"""
        return self.matrix_array.sum(axis=1)

    @property
    def norm_bound(self) -> float:
        """Kaba norm sınırı: max satır toplamı + 1 + max |v^per|"""
        return float(self.row_sums.max() + 1 + np.abs(self.v_per_array).max())

    def support(self, label: int) -> frozenset:
        """k satırının desteği: M[k][l] ≥ 1 olan l etiketleri"""
        return frozenset(l for l, entry in enumerate(self.matrix[label]) if entry >= 1)

    def label_index(self, name: str) -> int:
        """Etiket adından indeks"""
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise ValueError(f"Bilinmeyen etiket: {name}") from None

    def with_root(self, root_label: int) -> "SubstitutionModel":
        """Aynı model, farklı kök etiketiyle"""
        return SubstitutionModel(self.alphabet, self.matrix, self.v_per, root_label)


def laplacian_model(
    matrix: Sequence[Sequence[int]],
    alphabet: Optional[Sequence[str]] = None,
    root_label: int = 0,
) -> SubstitutionModel:
    """
    Kenar ağırlıklı Laplace örneği için model: v^per(k) = −(satır toplamı + 1).
    Kök dışındaki her köşenin derecesi ileri komşu sayısı artı ebeveyndir.
    """
    row_sums = [sum(int(entry) for entry in row) for row in matrix]
    return SubstitutionModel.from_matrix(
        matrix,
        v_per=[-(s + 1.0) for s in row_sums],
        root_label=root_label,
        alphabet=alphabet,
    )


@dataclass(frozen=True)
class ValidationReport:
    """(M0), (M1), (M1*), (M2) koşullarının sonucu"""

    m0: bool
    m1: bool
    m1star: bool
    m2: bool

    @property
    def is_valid(self) -> bool:
        """(M0), (M1*) ve (M2) birlikte sağlanıyor mu?"""
        return self.m0 and self.m1star and self.m2

    def violations(self) -> List[str]:
        """İhlal edilen zorunlu koşulların okunabilir listesi"""
        labels = [("(M0)", self.m0), ("(M1*)", self.m1star), ("(M2)", self.m2)]
        return [f"{name} violated" for name, ok in labels if not ok]

    def to_dict(self) -> dict:
        """JSON uyumlu sözlük"""
        return {"m0": self.m0, "m1": self.m1, "m1star": self.m1star, "m2": self.m2}


@dataclass(frozen=True)
class Vertex:
    """Ağaçtaki tek bir köşe kaydı"""

    id: int
    label: int
    parent: Optional[int]
    children: Tuple[int, ...]
    depth: int


@dataclass(frozen=True, eq=False)
class LabeledTree:
    """
    Genişlik öncelikli numaralandırılmış sonlu derinlikli etiketli ağaç.

    Bir seviyedeki köşelerin çocukları bir sonraki seviyede bitişik ve
    ebeveyn sırasıyla yer alır; bu düzen vektörel özyinelemeyi mümkün kılar.
    """

    depth: int
    labels: np.ndarray
    parents: np.ndarray
    child_start: np.ndarray
    child_count: np.ndarray
    level_starts: Tuple[int, ...]
    root_id: int = 0

    @property
    def size(self) -> int:
        """Köşe sayısı"""
        return int(self.labels.shape[0])

    def level(self, d: int) -> range:
        """d derinliğindeki köşe kimlikleri"""
        return range(self.level_starts[d], self.level_starts[d + 1])

    def depth_of(self, x: int) -> int:
        """Köşenin kökten uzaklığı"""
        return int(np.searchsorted(self.level_starts, x, side="right") - 1)

    def children(self, x: int) -> range:
        """Kanonik sıradaki çocuklar"""
        start = int(self.child_start[x])
        return range(start, start + int(self.child_count[x]))

    def is_leaf(self, x: int) -> bool:
        """Son seviyedeki köşeler yapraktır"""
        return self.depth_of(x) == self.depth

    def path_to_root(self, x: int) -> List[int]:
        """x'ten köke giden yol (x dahil, kök dahil)"""
        path = [x]
        while self.parents[path[-1]] >= 0:
            path.append(int(self.parents[path[-1]]))
        return path

    def forward_tree(self, x: int) -> List[int]:
        """x'in ileri ağacındaki (x dahil) köşeler"""
        result = [x]
        frontier = [x]
        while frontier:
            next_frontier = []
            for y in frontier:
                next_frontier.extend(self.children(y))
            result.extend(next_frontier)
            frontier = next_frontier
        return result

    def disjoint_forward_trees(self, x: int, y: int) -> bool:
        """İleri ağaçlar kesişmiyorsa (biri diğerinin atası değilse) True"""
        return x not in self.path_to_root(y) and y not in self.path_to_root(x)

    @cached_property
    def vertices(self) -> Tuple[Vertex, ...]:
        """Köşe kayıtları (id, etiket, ebeveyn, çocuklar, derinlik)"""
        records = []
        for d in range(self.depth + 1):
            for x in self.level(d):
                parent = int(self.parents[x])
                records.append(
                    Vertex(
                        id=x,
                        label=int(self.labels[x]),
                        parent=parent if parent >= 0 else None,
                        children=tuple(self.children(x)),
                        depth=d,
                    )
                )
        return tuple(records)


class SlotSide(Enum):
    """Kiraz küresi yuvasının hangi yarıya ait olduğu"""

    OUTER = "outer"
    INNER = "inner"


@dataclass(frozen=True)
class CherrySlot:
    """Kiraz küresindeki bir yuva"""

    index: int
    label: int
    side: SlotSide


@dataclass(frozen=True)
class CherrySphere:
    """
    S_{o,o'} = S_{o'} ∪ S_o∖{o'} köşe kümesi.
    Önce dış yuvalar (S_o∖{o'}), sonra iç yuvalar (S_{o'}) gelir.
    """

    o_label: int
    o_prime_label: int
    slots: Tuple[CherrySlot, ...]

    @property
    def size(self) -> int:
        return len(self.slots)

    @cached_property
    def labels(self) -> np.ndarray:
        return np.array([slot.label for slot in self.slots], dtype=np.int64)

    @cached_property
    def outer_indices(self) -> np.ndarray:
        return np.array(
            [slot.index for slot in self.slots if slot.side is SlotSide.OUTER],
            dtype=np.int64,
        )

    @cached_property
    def inner_indices(self) -> np.ndarray:
        return np.array(
            [slot.index for slot in self.slots if slot.side is SlotSide.INNER],
            dtype=np.int64,
        )

    @property
    def outer_labels(self) -> List[int]:
        return [int(label) for label in self.labels[self.outer_indices]]

    @property
    def inner_labels(self) -> List[int]:
        return [int(label) for label in self.labels[self.inner_indices]]

    def label_multiplicities(self) -> dict:
        """Etiket -> yuva sayısı"""
        counts: dict = {}
        for slot in self.slots:
            counts[slot.label] = counts.get(slot.label, 0) + 1
        return counts


@dataclass(frozen=True)
class LabelPermutation:
    """Kiraz küresi yuvaları üzerinde etiket koruyan bir eşleme: mapping[x] = π(x)"""

    mapping: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def compose(self, other: "LabelPermutation") -> "LabelPermutation":
        """(self ∘ other)(x) = self(other(x))"""
        return LabelPermutation(tuple(self.mapping[other.mapping[x]] for x in range(len(self.mapping))))

    def inverse(self) -> "LabelPermutation":
        result = [0] * len(self.mapping)
        for x, image in enumerate(self.mapping):
            result[image] = x
        return LabelPermutation(tuple(result))

    def as_array(self) -> np.ndarray:
        return np.array(self.mapping, dtype=np.int64)

