"""
Green fonksiyonu servisi - (♣) sabit nokta sistemi, sürekleme, bant tespiti,
P matrisi ve yeniden köklendirme

Etiket değişmezliği sayesinde (♣) özyinelemesi |A| bilinmeyenli bir
sisteme indirgenir:

    Γ_k = −1 / (z − v^per_k + Σ_l M_{k,l} Γ_l)
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from app.errors import (
    DegenerateError,
    InsufficientDepthError,
    InvalidZError,
    NoConvergenceError,
)
from app.models.green import GreenVector, PMatrix, SpectralBands
from app.models.substitution import CherrySphere, LabeledTree, SubstitutionModel
from app.services.substitution import SubstitutionAnalyzer
from app.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

# Newton adımında geri izleme için en fazla yarılama sayısı
_MAX_BACKTRACK = 40
# Sabit nokta iterasyonunun durduğuna karar vermek için pencere
_STALL_WINDOW = 10


def weights_p(reference: GreenVector, sphere: CherrySphere) -> np.ndarray:
    """
    Yuva ağırlıkları p_x.

    Dış yuvalar: Im Γ_x / W, W = Σ_{S_o} Im Γ (o′ dahil).
    İç yuvalar: (Im Γ_{o'} / W)·(Im Γ_x / W′), W′ = Σ_{S_{o'}} Im Γ.
    Toplam tam olarak 1'dir.

    Raises:
        DegenerateError: Pozitif olmayan Im Γ varsa
    """
    imag = reference.imag[sphere.labels]
    o_prime_imag = reference.imag[sphere.o_prime_label]
    if np.any(imag <= 0) or o_prime_imag <= 0:
        raise DegenerateError(f"Im Γ pozitif değil: {reference.values}")

    outer, inner = sphere.outer_indices, sphere.inner_indices
    outer_total = imag[outer].sum() + o_prime_imag
    inner_total = imag[inner].sum()

    p = np.empty(sphere.size)
    p[outer] = imag[outer] / outer_total
    p[inner] = (o_prime_imag / outer_total) * imag[inner] / inner_total
    return p


def regular_tree_gamma(k: int, z: complex) -> complex:
    """
    M=[[k]] için kapalı form: kΓ² + zΓ + 1 = 0 kökü.
    Im z > 0 ise üst yarı düzlemdeki kök; gerçek z'de sanal kısmı büyük olan,
    ikisi de gerçekse modülü küçük olan seçilir.
    """
    root = np.sqrt(complex(z) ** 2 - 4 * k)
    candidates = [(-z + root) / (2 * k), (-z - root) / (2 * k)]
    best = max(candidates, key=lambda g: (round(np.imag(g), 15), -abs(g)))
    return complex(best)


class GreenSolver:
    """
    Pertürbe edilmemiş operatör için Γ(z) çözücüsü.

    Önce sönümlü sabit nokta iterasyonu denenir (artık büyürse adım
    yarılanır); iterasyon durursa |A| boyutlu karmaşık sistemde Newton
    yöntemine geçilir.
    """

    def __init__(
        self,
        tol: float = DEFAULT_SETTINGS.solver_tol,
        max_iter: int = DEFAULT_SETTINGS.max_iter,
        newton_max_iter: int = DEFAULT_SETTINGS.newton_max_iter,
    ):
        """
        Args:
            tol: (♣) artığı için tolerans
            max_iter: Sabit nokta iterasyonu için üst sınır
            newton_max_iter: Newton iterasyonu için üst sınır
        """
        self._tol = tol
        self._max_iter = max_iter
        self._newton_max_iter = newton_max_iter

    @property
    def tol(self) -> float:
        return self._tol

    # ============ Sistem ============

    def phi(self, model: SubstitutionModel, z: complex, gamma: np.ndarray) -> np.ndarray:
        """Φ(Γ)_k = −1/(z − v^per_k + Σ_l M_{k,l} Γ_l)"""
        return -1.0 / (z - model.v_per_array + model.matrix_array @ gamma)

    def residual(self, model: SubstitutionModel, z: complex, gamma: np.ndarray) -> float:
        """max_k |Γ_k + 1/(z − v^per_k + Σ_l M_{k,l} Γ_l)|"""
        return float(np.max(np.abs(gamma - self.phi(model, z, gamma))))

    # ============ Çözüm ============

    def solve_gamma(
        self,
        model: SubstitutionModel,
        z: complex,
        initial: Optional[np.ndarray] = None,
    ) -> GreenVector:
        """
        Im z > 0 için (♣) sisteminin üst yarı düzlemdeki sabit noktası.

        Args:
            model: Yerine koyma modeli
            z: Enerji (Im z > 0)
            initial: Başlangıç tahmini (varsayılan Γ_k = i)

        Returns:
            Artığı tol altında olan GreenVector

        Raises:
            InvalidZError: Im z ≤ 0 ise
            NoConvergenceError: Sabit nokta ve Newton başarısızsa
        """
        z = complex(z)
        if z.imag <= 0:
            raise InvalidZError(f"Im z pozitif olmalı: {z}")

        if initial is None:
            gamma = np.full(model.alphabet_size, 1j, dtype=complex)
        else:
            gamma = np.array(initial, dtype=complex)

        gamma, converged = self._fixed_point(model, z, gamma)
        if not converged:
            logger.debug("Sabit nokta durdu, Newton'a geçiliyor (z=%s)", z)
            gamma = self._newton(model, z, gamma, upper=True)

        return GreenVector(z=z, values=gamma, residual=self.residual(model, z, gamma))

    def continuation_path(
        self, model: SubstitutionModel, energy: float, eta_floor: float
    ) -> List[GreenVector]:
        """η = 1, 1/2, 1/4, ..., eta_floor boyunca her çözümü bir öncekiyle tohumlar"""
        if eta_floor <= 0:
            raise ValueError(f"eta_floor pozitif olmalı: {eta_floor}")

        etas = []
        eta = 1.0
        while eta > eta_floor:
            etas.append(eta)
            eta /= 2.0
        etas.append(eta_floor)

        path: List[GreenVector] = []
        seed = None
        for eta in etas:
            try:
                vector = self.solve_gamma(model, complex(energy, eta), initial=seed)
            except NoConvergenceError:
                logger.warning("Sürekleme başarısız: E=%s η=%s", energy, eta)
                raise
            path.append(vector)
            seed = vector.values
        return path

    def solve_gamma_boundary(
        self, model: SubstitutionModel, energy: float, eta_floor: float
    ) -> GreenVector:
        """Gerçek eksene sürekleme; η = eta_floor'daki değeri döndürür"""
        return self.continuation_path(model, energy, eta_floor)[-1]

    def solve_gamma_real(
        self,
        model: SubstitutionModel,
        energy: float,
        eta_floor: float = DEFAULT_SETTINGS.eta_floor,
    ) -> GreenVector:
        """
        Gerçek eksendeki sınır değeri: eta_floor'a sürekleme ve ardından
        η = 0'da Newton ile cilalama.

        Raises:
            NoConvergenceError: Cilalanan kök kapalı üst yarı düzlemi terk ederse
        """
        seed = self.solve_gamma_boundary(model, energy, eta_floor).values
        z = complex(energy, 0.0)
        gamma = self._newton(model, z, seed, upper=False)
        if np.any(gamma.imag < -self._tol):
            raise NoConvergenceError(
                self._newton_max_iter, z, "kök üst yarı düzlemin dışında"
            )
        gamma = gamma.real + 1j * np.maximum(gamma.imag, 0.0)
        return GreenVector(z=z, values=gamma, residual=self.residual(model, z, gamma))

    def full_green_at_root(self, model: SubstitutionModel, gamma: GreenVector) -> complex:
        """Kökte kesik ağaç bütün ağaçtır: G_o = Γ_{kök etiketi}"""
        return gamma[model.root_label]

    def reroot_green(
        self,
        model: SubstitutionModel,
        tree: LabeledTree,
        x0: int,
        gamma: GreenVector,
        forward_values: Optional[np.ndarray] = None,
        potential_shift: Optional[np.ndarray] = None,
        edge_weights: Optional[np.ndarray] = None,
    ) -> complex:
        """
        x0'a göre yeniden köklendirilmiş ağacın x0'daki kesik Green fonksiyonu.

        Kökten x0'a giden yol dışındaki köşelerin x0'a göre ileri ağaçları
        özgün ileri ağaçlarıdır; bu köşeler forward_values (varsayılan
        pertürbe edilmemiş Γ) ile tohumlanır ve (♣) yol boyunca içeri doğru
        uygulanır.

        Args:
            model: Yerine koyma modeli
            tree: Sonlu ağaç
            x0: Yeni kök
            gamma: Pertürbe edilmemiş Γ(z)
            forward_values: Köşe başına özgün köklemeye göre kesik Green değerleri
            potential_shift: Köşe başına ek potansiyel (λ v_x)
            edge_weights: Köşe başına ebeveyn kenarının ağırlığı (1+λθ_x)²

        Raises:
            InsufficientDepthError: x0 ağaçta değilse ya da son seviyedeyse
        """
        if not 0 <= x0 < tree.size or (tree.depth > 0 and tree.is_leaf(x0)):
            raise InsufficientDepthError(
                f"x0={x0} için ağaç derinliği ({tree.depth}) yetersiz"
            )

        z = gamma.z
        values = gamma.values[tree.labels] if forward_values is None else forward_values
        shift = np.zeros(tree.size) if potential_shift is None else potential_shift
        weights = np.ones(tree.size) if edge_weights is None else edge_weights

        path = tree.path_to_root(x0)[::-1]
        carry: Optional[complex] = None
        for position, y in enumerate(path):
            successor = path[position + 1] if position + 1 < len(path) else None
            total = 0j
            if tree.child_count[y] == 0:
                # x0 derinlik 0 ağacın kökü: çocuklar M'den pertürbe edilmemiş
                label = int(tree.labels[y])
                total += complex(model.matrix_array[label] @ gamma.values)
            for c in tree.children(y):
                if c != successor:
                    total += weights[c] * values[c]
            if carry is not None:
                total += weights[y] * carry
            label = int(tree.labels[y])
            carry = -1.0 / (z - model.v_per[label] - shift[y] + total)
        return complex(carry)

    def green_table(
        self, model: SubstitutionModel, energies: Sequence[float], eta: float
    ) -> pd.DataFrame:
        """E ızgarası üzerinde Γ_k(E + iη) tablosu"""
        rows = []
        for energy in energies:
            if eta >= 1.0:
                vector = self.solve_gamma(model, complex(energy, eta))
            else:
                vector = self.solve_gamma_boundary(model, energy, eta)
            row = {"E": float(energy), "eta": float(eta)}
            for k, name in enumerate(model.alphabet):
                row[f"re_gamma_{name}"] = float(vector.values[k].real)
                row[f"im_gamma_{name}"] = float(vector.values[k].imag)
            rows.append(row)
        return pd.DataFrame(rows)

    # ============ İç yöntemler ============

    def _fixed_point(self, model: SubstitutionModel, z: complex, gamma: np.ndarray):
        step = 1.0
        res = self.residual(model, z, gamma)
        window_start = res
        for iteration in range(1, self._max_iter + 1):
            if res <= self._tol:
                return gamma, True
            candidate = (1.0 - step) * gamma + step * self.phi(model, z, gamma)
            candidate_res = self.residual(model, z, candidate)
            if candidate_res > res:
                step /= 2.0
                if step < 1e-6:
                    break
                continue
            gamma, res = candidate, candidate_res
            if iteration % _STALL_WINDOW == 0:
                if res > 0.5 * window_start:
                    break
                window_start = res
        return gamma, res <= self._tol

    def _newton(
        self, model: SubstitutionModel, z: complex, gamma: np.ndarray, upper: bool
    ) -> np.ndarray:
        """F(Γ) = Γ − Φ(Γ), J = I − diag(1/D²) M; geri izlemeli Newton"""
        matrix = model.matrix_array.astype(complex)
        identity = np.eye(model.alphabet_size, dtype=complex)
        res = self.residual(model, z, gamma)

        for _ in range(self._newton_max_iter):
            if res <= self._tol:
                break
            denominator = z - model.v_per_array + matrix @ gamma
            value = gamma + 1.0 / denominator
            jacobian = identity - (1.0 / denominator**2)[:, None] * matrix
            try:
                direction = np.linalg.solve(jacobian, value)
            except np.linalg.LinAlgError as exc:
                raise NoConvergenceError(self._newton_max_iter, z, "tekil Jacobian") from exc

            step = 1.0
            for _ in range(_MAX_BACKTRACK):
                candidate = gamma - step * direction
                if not upper or np.all(candidate.imag > 0):
                    candidate_res = self.residual(model, z, candidate)
                    if candidate_res < res:
                        gamma, res = candidate, candidate_res
                        break
                step /= 2.0
            else:
                break

        if res > self._tol or not np.all(np.isfinite(gamma)):
            raise NoConvergenceError(self._newton_max_iter, z, f"artık {res:.3e}")
        if upper and np.any(gamma.imag <= 0):
            raise NoConvergenceError(self._newton_max_iter, z, "Im Γ ≤ 0")
        return gamma


class BandDetector:
    """
    Im Γ'nın pozitif kaldığı enerji bantlarını bulur.
    Izgara taraması + bitişik noktaların birleştirilmesi + uçlarda ikiye bölme.
    """

    def __init__(
        self,
        solver: Optional[GreenSolver] = None,
        threads: int = DEFAULT_SETTINGS.threads,
    ):
        self._solver = solver or GreenSolver()
        self._threads = threads

    def is_in_band(
        self, model: SubstitutionModel, energy: float, eta_floor: float, im_threshold: float
    ) -> bool:
        """min_k Im Γ_k(E + i·eta_floor) > im_threshold"""
        vector = self._solver.solve_gamma_boundary(model, energy, eta_floor)
        return bool(np.min(vector.imag) > im_threshold)

    def detect_bands(
        self,
        model: SubstitutionModel,
        grid_step: float = DEFAULT_SETTINGS.grid_step,
        eta_floor: float = DEFAULT_SETTINGS.eta_floor,
        im_threshold: float = DEFAULT_SETTINGS.im_threshold,
    ) -> SpectralBands:
        """
        Norm sınırı aralığında bantları tespit eder.

        Args:
            model: Yerine koyma modeli
            grid_step: Tarama adımı (> 0)
            eta_floor: Kullanılan en küçük η
            im_threshold: Pozitiflik eşiği

        Returns:
            Sıralı, ayrık bant aralıkları
        """
        if grid_step <= 0:
            raise ValueError(f"grid_step pozitif olmalı: {grid_step}")

        energies = self.scan_grid(model, grid_step)
        flags = self._scan(model, energies, eta_floor, im_threshold)

        intervals = []
        index = 0
        while index < len(energies):
            if not flags[index]:
                index += 1
                continue
            start = index
            while index + 1 < len(energies) and flags[index + 1]:
                index += 1
            end = index
            left = energies[start]
            if start > 0:
                left = self._refine(
                    model, energies[start - 1], energies[start], grid_step, eta_floor, im_threshold
                )
            right = energies[end]
            if end + 1 < len(energies):
                right = self._refine(
                    model, energies[end + 1], energies[end], grid_step, eta_floor, im_threshold
                )
            intervals.append((float(left), float(right)))
            index += 1

        logger.info("Bantlar: %s", intervals)
        return SpectralBands(
            intervals=tuple(intervals),
            eta_floor=eta_floor,
            im_threshold=im_threshold,
            grid_step=grid_step,
        )

    def scan_grid(self, model: SubstitutionModel, grid_step: float) -> np.ndarray:
        """[−‖Δ‖, ‖Δ‖] üzerinde eşit aralıklı enerji ızgarası"""
        bound = model.norm_bound
        points = int(np.floor(2 * bound / grid_step + 1e-9)) + 1
        return -bound + grid_step * np.arange(points)

    def scan_table(
        self,
        model: SubstitutionModel,
        grid_step: float = DEFAULT_SETTINGS.grid_step,
        eta_floor: float = DEFAULT_SETTINGS.eta_floor,
    ) -> pd.DataFrame:
        """Tarama tablosu: E ve her etiket için Im Γ_k"""
        energies = self.scan_grid(model, grid_step)
        rows = []
        for energy in energies:
            vector = self._solver.solve_gamma_boundary(model, float(energy), eta_floor)
            row = {"E": float(energy)}
            for k, name in enumerate(model.alphabet):
                row[f"im_gamma_{name}"] = float(vector.imag[k])
            rows.append(row)
        return pd.DataFrame(rows)

    def _scan(self, model, energies, eta_floor, im_threshold) -> List[bool]:
        def probe(energy: float) -> bool:
            return self.is_in_band(model, float(energy), eta_floor, im_threshold)

        if self._threads > 1:
            with ThreadPoolExecutor(max_workers=self._threads) as executor:
                return list(executor.map(probe, energies))
        return [probe(energy) for energy in energies]

    def _refine(self, model, outside, inside, grid_step, eta_floor, im_threshold) -> float:
        """Bant kenarını grid_step/100 çözünürlüğe kadar ikiye bölme ile daraltır"""
        while abs(inside - outside) > grid_step / 100:
            middle = 0.5 * (inside + outside)
            if self.is_in_band(model, middle, eta_floor, im_threshold):
                inside = middle
            else:
                outside = middle
        return inside


class TransitionBuilder:
    """Stokastik P matrisini ve Perron-Frobenius sol özvektörünü kurar"""

    def __init__(
        self,
        analyzer: Optional[SubstitutionAnalyzer] = None,
        tol: float = DEFAULT_SETTINGS.power_tol,
        max_iter: int = DEFAULT_SETTINGS.power_max_iter,
    ):
        self._analyzer = analyzer or SubstitutionAnalyzer()
        self._tol = tol
        self._max_iter = max_iter

    def build_p_matrix(self, model: SubstitutionModel, gamma: GreenVector) -> PMatrix:
        """
        P_{j,k} = Σ_{x ∈ S_{o(j),o(j)'}, etiket k} p_x

        Raises:
            DegenerateError: Bir Im Γ_k ≤ 0 ise
        """
        if np.any(gamma.imag <= 0):
            raise DegenerateError(f"Im Γ pozitif değil: {gamma.values}")

        size = model.alphabet_size
        entries = np.zeros((size, size))
        for j in range(size):
            sphere = self._analyzer.cherry_sphere(model, j)
            p = weights_p(gamma, sphere)
            np.add.at(entries[j], sphere.labels, p)

        return PMatrix(entries=entries, left_eigenvector=self.left_eigenvector(entries), z=gamma.z)

    def left_eigenvector(self, entries: np.ndarray) -> np.ndarray:
        """
        Pᵀ üzerinde kuvvet iterasyonu. Periyodik zincirlerde yakınsama için
        aynı durağan vektöre sahip tembel matris (I+P)/2 kullanılır.
        """
        size = entries.shape[0]
        lazy = 0.5 * (np.eye(size) + entries)
        u = np.full(size, 1.0 / size)
        for _ in range(self._max_iter):
            if np.max(np.abs(entries.T @ u - u)) <= self._tol:
                return u
            u = lazy.T @ u
            u /= u.sum()
        raise NoConvergenceError(self._max_iter, 0j, "kuvvet iterasyonu")
