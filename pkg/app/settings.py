"""
Çalışma zamanı ayarları - Sayısal varsayılanlar ve ortam değişkenleri
"""

import logging
import os
from dataclasses import dataclass, replace
from math import factorial
from typing import Mapping, Optional

logger = logging.getLogger(__name__)

THREADS_ENV = "CONESPECTRA_THREADS"
LOG_LEVEL_ENV = "CONESPECTRA_LOG_LEVEL"


@dataclass(frozen=True)
class Settings:
    """
    Tüm servislerin varsayılan ayarları.
    Servisler bu değerleri constructor parametresi olarak alır.
    """

    # Green çözücüsü
    solver_tol: float = 1e-12
    max_iter: int = 500
    newton_max_iter: int = 100

    # Bant tespiti
    grid_step: float = 1e-2
    eta_floor: float = 1e-6
    im_threshold: float = 1e-3

    # Ağaç ve permütasyon sınırları
    max_vertices: int = 2_000_000
    max_permutations: int = factorial(10)

    # Perron-Frobenius
    power_tol: float = 1e-12
    power_max_iter: int = 100_000

    # Sabitlerin ızgarası: 200 E noktası x η ∈ {1, 1/2, ..., 2^-20}
    constants_energy_points: int = 200
    constants_eta_halvings: int = 20

    # Monte Carlo
    depth_cap: int = 24
    depth_tol: float = 1e-3
    threads: int = 1

    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        Ortam değişkenlerinden ayarları oluşturur.

        Args:
            environ: Okunacak ortam (varsayılan os.environ)

        Returns:
            Ayarlar
        """
        env = os.environ if environ is None else environ
        settings = cls()

        raw_threads = env.get(THREADS_ENV)
        if raw_threads:
            try:
                threads = int(raw_threads)
                if threads < 1:
                    raise ValueError(threads)
                settings = replace(settings, threads=threads)
            except ValueError:
                logger.warning("%s geçersiz, yok sayıldı: %r", THREADS_ENV, raw_threads)

        raw_level = env.get(LOG_LEVEL_ENV)
        if raw_level:
            settings = replace(settings, log_level=raw_level.upper())

        return settings

    def with_overrides(self, **kwargs) -> "Settings":
        """None olmayan değerlerle yeni bir Settings döndürür"""
        changes = {key: value for key, value in kwargs.items() if value is not None}
        return replace(self, **changes)


DEFAULT_SETTINGS = Settings()
