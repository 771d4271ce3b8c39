"""
Monte Carlo servisi - Kesik Green fonksiyonları ve moment tahminleri

Her kök etiketi j için j köklü bir ağaç büyütülür, her denemede
düzensizlik (seed, (j, deneme)) anahtarıyla örneklenir ve özyineleme
yapraklardan köke seviye seviye vektörel olarak çözülür:

    Γ_x = −1 / (z − v^per(x) − λv_x + Σ_{c∈S_x} (1+λθ_c)² Γ_c)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.errors import DepthInsufficientError
from app.models.disorder import DisorderRealization
from app.models.green import GreenVector, PMatrix
from app.models.substitution import LabeledTree
from app.models.trial import (
    Boundary,
    DepthReport,
    EuclideanMoment,
    MomentVector,
    SimulationResult,
    TrialConfig,
    TrialSamples,
    VectorInequalityReport,
)
from app.services.disorder import DisorderSampler
from app.services.greens import GreenSolver, TransitionBuilder
from app.services.hyperbolic import gamma
from app.services.substitution import TreeBuilder
from app.settings import DEFAULT_SETTINGS

logger = logging.getLogger(__name__)

# Derinlik pilotunun başladığı derinlik
_PILOT_START = 2


def _mean_and_stderr(values: np.ndarray):
    """Kompanze toplamla ortalama ve standart hata"""
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(variance / n)


def _child_sums(tree: LabeledTree, values: np.ndarray, depth: int) -> np.ndarray:
    """d seviyesindeki her köşe için çocuk değerlerinin toplamı"""
    start, stop = tree.level_starts[depth], tree.level_starts[depth + 1]
    child_stop = tree.level_starts[depth + 2]
    index = tree.parents[stop:child_stop] - start
    children = values[stop:child_stop]
    real = np.bincount(index, weights=children.real, minlength=stop - start)
    imag = np.bincount(index, weights=children.imag, minlength=stop - start)
    return real + 1j * imag


class MonteCarloEngine:
    """
    Rastgele operatör için kesik Green fonksiyonları ve Eγ tahmincisi.
    Denemeler birbirinden bağımsızdır; threads > 1 ise iş parçacıklarına dağıtılır.
    """

    def __init__(
        self,
        solver: Optional[GreenSolver] = None,
        sampler: Optional[DisorderSampler] = None,
        tree_builder: Optional[TreeBuilder] = None,
        transition_builder: Optional[TransitionBuilder] = None,
        depth_cap: int = DEFAULT_SETTINGS.depth_cap,
        depth_tol: float = DEFAULT_SETTINGS.depth_tol,
        threads: int = DEFAULT_SETTINGS.threads,
    ):
        """
        Args:
            solver: Pertürbe edilmemiş Γ çözücüsü
            sampler: Düzensizlik örnekleyicisi
            tree_builder: Ağaç üretici (köşe sınırını taşır)
            transition_builder: P matrisi üretici
            depth_cap: Pilotun deneyeceği en büyük derinlik
            depth_tol: Pilot toleransı, (1+|Γ|) ile ölçeklenir
            threads: Paralel deneme sayısı
        """
        self._solver = solver or GreenSolver()
        self._sampler = sampler or DisorderSampler()
        self._tree_builder = tree_builder or TreeBuilder()
        self._transition_builder = transition_builder or TransitionBuilder()
        self._depth_cap = depth_cap
        self._depth_tol = depth_tol
        self._threads = threads

    # ============ Referans ============

    def reference(self, cfg: TrialConfig) -> GreenVector:
        """Pertürbe edilmemiş Γ(E + iη); küçük η'ya sürekleme ile ulaşılır"""
        if cfg.eta >= 1.0:
            return self._solver.solve_gamma(cfg.model, cfg.z)
        return self._solver.solve_gamma_boundary(cfg.model, cfg.energy, cfg.eta)

    def reference_root(
        self, cfg: TrialConfig, reference: GreenVector, label: int, root_shift: float = 0.0
    ) -> complex:
        """
        j köklü pertürbe edilmemiş ağacın kök değeri. Kök potansiyeli
        kaydırılmışsa (Laplace örneği) kökte (♣) bir kez yeniden uygulanır.
        """
        if root_shift == 0.0:
            return reference[label]
        total = complex(cfg.model.matrix_array[label] @ reference.values)
        return complex(-1.0 / (cfg.z - cfg.model.v_per[label] - root_shift + total))

    # ============ Özyineleme ============

    def truncated_green(
        self,
        cfg: TrialConfig,
        realization: DisorderRealization,
        reference: Optional[GreenVector] = None,
    ) -> complex:
        """
        Gerçekleşme ağacının kökündeki kesik Green fonksiyonu.

        Serbest sınırda yapraklar pertürbe edilmemiş Γ ile, Dirichlet sınırında
        −1/(z − v^per − λv) ile tohumlanır.
        """
        tree = realization.tree
        if reference is None and cfg.boundary is Boundary.FREE:
            reference = self.reference(cfg)

        z = cfg.z
        lam = cfg.lam
        potential = cfg.model.v_per_array[tree.labels] + lam * realization.v
        potential[tree.root_id] += realization.root_vper_shift
        weights = (1.0 + lam * realization.theta) ** 2

        values = np.empty(tree.size, dtype=complex)
        leaves = slice(tree.level_starts[tree.depth], tree.level_starts[tree.depth + 1])
        if cfg.boundary is Boundary.FREE:
            values[leaves] = reference.values[tree.labels[leaves]]
        else:
            values[leaves] = -1.0 / (z - potential[leaves])

        weighted = weights * values
        for d in range(tree.depth - 1, -1, -1):
            start, stop = tree.level_starts[d], tree.level_starts[d + 1]
            level = -1.0 / (z - potential[start:stop] + _child_sums(tree, weighted, d))
            values[start:stop] = level
            weighted[start:stop] = weights[start:stop] * level

        if logger.isEnabledFor(logging.DEBUG) and z.imag > 0 and np.any(values.imag <= 0):
            logger.debug("Herglotz ihlali: min Im Γ = %s", values.imag.min())
        return complex(values[tree.root_id])

    # ============ Derinlik ============

    def choose_depth(self, cfg: TrialConfig, strict: bool = False) -> DepthReport:
        """
        |Γ^D − Γ^{D+2}| < tol·(1+|Γ|) olan en küçük D (2'den başlayarak).
        Kök etiketinin ağacında ilk denemenin anahtarıyla tek bir pilot
        gerçekleşme kullanılır.

        Raises:
            DepthInsufficientError: strict ise ve sınırlara kadar yakınsama yoksa
        """
        model = cfg.model
        label = model.root_label
        reference = self.reference(cfg)
        tolerance = self._depth_tol * (1.0 + abs(reference[label]))

        differences: List[float] = []
        depth = _PILOT_START
        while depth <= self._depth_cap:
            if not self._fits(cfg, depth + 2):
                logger.warning("Derinlik pilotu köşe sınırında durdu: D=%d", depth)
                break
            shallow = self._root_value(cfg, reference, label, depth, trial=0)
            deep = self._root_value(cfg, reference, label, depth + 2, trial=0)
            differences.append(abs(deep - shallow))
            if differences[-1] < tolerance:
                report = DepthReport(depth, tuple(differences), tolerance, True)
                logger.info("Derinlik pilotu: %s", report.to_dict())
                return report
            depth += 1

        chosen = max(_PILOT_START, depth - 1) if differences else _PILOT_START
        report = DepthReport(chosen, tuple(differences), tolerance, False)
        logger.warning("Derinlik pilotu yakınsamadı: %s", report.to_dict())
        if strict:
            raise DepthInsufficientError(
                f"|Γ^D − Γ^(D+2)| toleransın ({tolerance:.3e}) üstünde, D ≤ {chosen}"
            )
        return report

    # ============ Tahminler ============

    def run_trials(
        self,
        cfg: TrialConfig,
        label: int,
        depth: int,
        reference: Optional[GreenVector] = None,
    ) -> TrialSamples:
        """j köklü ağaçta n_trials bağımsız deneme"""
        if reference is None:
            reference = self.reference(cfg)
        model = cfg.model.with_root(label)
        tree = self._tree_builder.grow_tree(model, label, depth)

        def trial(index: int):
            realization = self._sampler.sample(
                cfg.disorder, model, tree, cfg.seed, key=(label, index)
            )
            target = self.reference_root(cfg, reference, label, realization.root_vper_shift)
            value = self.truncated_green(cfg, realization, reference)
            return value, target

        results = self._map(trial, range(cfg.n_trials))
        values = np.array([value for value, _ in results])
        targets = np.array([target for _, target in results])
        return TrialSamples(
            label=label,
            gamma_p=gamma(values, targets) ** cfg.p_exp,
            distance_p=np.abs(values - targets) ** cfg.p_exp,
            imag_product_p=(values.imag * targets.imag) ** cfg.p_exp,
        )

    def estimate_moment_vector(
        self, cfg: TrialConfig, samples: Optional[Sequence[TrialSamples]] = None
    ) -> MomentVector:
        """Her kök etiketi için γ(Γ_kök, Γ_j)^p'nin ortalaması ve standart hatası"""
        if samples is None:
            samples = self.sample_all(cfg)
        depth = self._depth(cfg)
        stats = [_mean_and_stderr(s.gamma_p) for s in samples]
        return MomentVector(
            means=np.array([mean for mean, _ in stats]),
            stderr=np.array([err for _, err in stats]),
            n_trials=cfg.n_trials,
            z=cfg.z,
            p_exp=cfg.p_exp,
            depth=depth,
        )

    def verify_vector_inequality(
        self,
        cfg: TrialConfig,
        pmatrix: Optional[PMatrix] = None,
        moments: Optional[MomentVector] = None,
    ) -> VectorInequalityReport:
        """
        Eγ, P·Eγ, bileşen bazında fark P·Eγ − Eγ ve ⟨u, Eγ⟩.
        C(λ) ve δ bilinmediğinden hüküm verilmez; sınırlılık η ızgarasında izlenir.
        """
        if pmatrix is None:
            pmatrix = self._transition_builder.build_p_matrix(cfg.model, self.reference(cfg))
        if moments is None:
            moments = self.estimate_moment_vector(cfg)

        e_gamma = moments.means
        p_e_gamma = pmatrix.entries @ e_gamma
        u = pmatrix.left_eigenvector
        return VectorInequalityReport(
            e_gamma=e_gamma,
            p_e_gamma=p_e_gamma,
            slack=p_e_gamma - e_gamma,
            u=u,
            u_bound=float(u @ e_gamma),
        )

    def euclidean_moment(
        self, cfg: TrialConfig, samples: Optional[TrialSamples] = None
    ) -> EuclideanMoment:
        """
        E|Γ_kök(z,H^λ) − Γ_kök(z,Δ)|^p, model kök etiketinde.
        |g−h|^{2p} = γ^p (Im g Im h)^p olduğundan örnek ortalamaları da
        Cauchy–Schwarz sınırını sağlar.
        """
        if samples is None:
            samples = self.run_trials(cfg, cfg.model.root_label, self._depth(cfg))
        mean, err = _mean_and_stderr(samples.distance_p)
        gamma_mean = math.fsum(samples.gamma_p) / samples.gamma_p.size
        imag_mean = math.fsum(samples.imag_product_p) / samples.imag_product_p.size
        return EuclideanMoment(
            mean=mean,
            stderr=err,
            bound=math.sqrt(gamma_mean * imag_mean),
            imag_moment=imag_mean,
        )

    def sample_all(self, cfg: TrialConfig) -> List[TrialSamples]:
        depth = self._depth(cfg)
        reference = self.reference(cfg)
        return [
            self.run_trials(cfg, label, depth, reference)
            for label in range(cfg.model.alphabet_size)
        ]

    def simulate(self, cfg: TrialConfig) -> SimulationResult:
        """Tek (λ, η) noktası için Eγ, vektör eşitsizliği ve Öklid momenti"""
        depth_report = None
        if cfg.depth is None:
            depth_report = self.choose_depth(cfg)
            cfg = cfg.with_depth(depth_report.depth)

        samples = self.sample_all(cfg)
        moments = self.estimate_moment_vector(cfg, samples)
        result = SimulationResult(
            config=cfg,
            moments=moments,
            inequality=self.verify_vector_inequality(cfg, moments=moments),
            euclidean=self.euclidean_moment(cfg, samples[cfg.model.root_label]),
            depth_report=depth_report,
        )
        logger.info(
            "λ=%s η=%s Eγ=%s ⟨u,Eγ⟩=%s", cfg.lam, cfg.eta, moments.means, result.inequality.u_bound
        )
        return result

    def sweep(
        self, cfg: TrialConfig, lambdas: Iterable[float], etas: Iterable[float]
    ) -> pd.DataFrame:
        """(λ, η) ızgarasında her nokta için bir satır"""
        etas = list(etas)
        rows = []
        for lam in lambdas:
            for eta in etas:
                result = self.simulate(cfg.with_point(lam, eta))
                row = {
                    "lambda": float(lam),
                    "eta": float(eta),
                    "E": cfg.energy,
                    "p": cfg.p_exp,
                    "depth": result.moments.depth,
                    "n_trials": cfg.n_trials,
                }
                for k, name in enumerate(cfg.model.alphabet):
                    row[f"E_gamma_{name}"] = float(result.moments.means[k])
                    row[f"stderr_{name}"] = float(result.moments.stderr[k])
                row["u_bound"] = result.inequality.u_bound
                row["euclidean_moment"] = result.euclidean.mean
                row["euclidean_stderr"] = result.euclidean.stderr
                rows.append(row)
        return pd.DataFrame(rows)

    # ============ İç yöntemler ============

    def _depth(self, cfg: TrialConfig) -> int:
        if cfg.depth is not None:
            return cfg.depth
        return self.choose_depth(cfg).depth

    def _fits(self, cfg: TrialConfig, depth: int) -> bool:
        return all(
            self._tree_builder.count_vertices(cfg.model, label, depth)
            <= self._tree_builder.max_vertices
            for label in range(cfg.model.alphabet_size)
        )

    def _root_value(self, cfg, reference, label, depth, trial) -> complex:
        model = cfg.model.with_root(label)
        tree = self._tree_builder.grow_tree(model, label, depth)
        realization = self._sampler.sample(cfg.disorder, model, tree, cfg.seed, key=(label, trial))
        return self.truncated_green(cfg, realization, reference)

    def _map(self, func: Callable, items: Iterable) -> list:
        if self._threads > 1:
            with ThreadPoolExecutor(max_workers=self._threads) as executor:
                return list(executor.map(func, items))
        return [func(item) for item in items]

