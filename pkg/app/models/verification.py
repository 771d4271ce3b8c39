"""
Doğrulama modelleri - Eşitsizlik paketlerinin sonuçları
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from app.models.contraction import ContractionConstants

# Rapora gömülen en fazla karşı örnek sayısı
MAX_REPORTED_STATES = 10


@dataclass(frozen=True)
class SuiteResult:
    """
    Tek bir eşitsizlik paketinin sonucu.
    worst_slack = min(sağ taraf − sol taraf); negatifse ihlal vardır.
    """

    name: str
    samples: int
    counterexamples: int
    worst_slack: float
    states: Tuple[dict, ...] = ()
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.counterexamples == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "counterexamples": self.counterexamples,
            "worst_slack": self.worst_slack,
            "passed": self.passed,
            "states": list(self.states[:MAX_REPORTED_STATES]),
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class VerificationReport:
    """Tüm paketler, sabitler ve κ özetleri"""

    interval: Tuple[float, float]
    lam: float
    p_exp: float
    samples: int
    seed: int
    suites: Tuple[SuiteResult, ...]
    constants: Optional[ContractionConstants] = None
    kappa_summary: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    @property
    def counterexamples(self) -> int:
        return sum(suite.counterexamples for suite in self.suites)

    def suite(self, name: str) -> SuiteResult:
        for suite in self.suites:
            if suite.name == name:
                return suite
        raise KeyError(name)

    def failed_suites(self) -> List[str]:
        return [suite.name for suite in self.suites if not suite.passed]

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "lambda": self.lam,
            "p": self.p_exp,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "counterexamples": self.counterexamples,
            "constants": self.constants.to_dict() if self.constants else None,
            "kappa": dict(self.kappa_summary),
            "suites": [suite.to_dict() for suite in self.suites],
        }
