"""
Çalıştırma manifestosu - Her çıktıya gömülen yeniden üretilebilirlik kaydı
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict


def canonical_json(data: Any) -> str:
    """Sıralı anahtarlı, boşluksuz JSON"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """
    Komut, çözümlenmiş ayarlar, tohum ve sürüm.
    Duvar saati bilgisi özete katılmaz; aynı özet aynı çıktı demektir.
    """

    command: str
    config: Dict[str, Any]
    seed: int
    version: str
    wall_clock: Dict[str, Any] = field(default_factory=dict)
    output_digests: Dict[str, str] = field(default_factory=dict)

    @property
    def digest(self) -> str:
        """(command, config, seed, version) üzerinde SHA-256"""
        return sha256_text(
            canonical_json(
                {
                    "command": self.command,
                    "config": self.config,
                    "seed": self.seed,
                    "version": self.version,
                }
            )
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "digest": self.digest,
            "wall_clock": dict(self.wall_clock),
            "output_digests": dict(self.output_digests),
        }
