"""
Manifest servisi - Çıktılara RunManifest gömer, CSV tablolarına özet sütunu ekler.

JSON raporları manifestoyu "manifest" anahtarı altında taşır. Duvar saati
bilgisi yalnızca manifest.wall_clock ve runtime altında bulunur; geri kalan
her bayt aynı tohum ve ayarlarla aynıdır.
"""

import hashlib
import json
import logging
import math
import time
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np
import pandas as pd

from app.models.manifest import RunManifest
from app.version import VERSION

logger = logging.getLogger(__name__)

DIGEST_COLUMN = "manifest_digest"


def to_jsonable(value: Any) -> Any:
    """
    numpy skalerleri, Enum'lar ve Path'ler dahil her değeri JSON'a uygun hale getirir.
    Sonlu olmayan reel sayılar null olur.
    """
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    return value


def file_digest(path: Path) -> str:
    """Dosya içeriğinin SHA-256 özeti"""
    sha = hashlib.sha256()
    with Path(path).open("rb") as fp:
        for block in iter(lambda: fp.read(1 << 16), b""):
            sha.update(block)
    return sha.hexdigest()


class ManifestBuilder:
    """
    Bir komut çalıştırmasının manifestosunu kurar.

    Kullanım:
        builder = ManifestBuilder("simulate", config, seed)
        ... hesap ...
        builder.write_json(report.to_dict(), out_path)
    """

    def __init__(self, command: str, config: Mapping[str, Any], seed: int, version: str = VERSION):
        self.command = command
        self.config = to_jsonable(dict(config))
        self.seed = int(seed)
        self.version = version
        self._started_wall = datetime.now(timezone.utc)
        self._started = time.perf_counter()

    def manifest(self, output_digests: Optional[Dict[str, str]] = None) -> RunManifest:
        """Duvar saati bilgisiyle birlikte o anki manifesto"""
        return RunManifest(
            command=self.command,
            config=self.config,
            seed=self.seed,
            version=self.version,
            wall_clock={
                "started_at": self._started_wall.isoformat(),
                "elapsed_seconds": self.elapsed,
            },
            output_digests=dict(output_digests or {}),
        )

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    @property
    def digest(self) -> str:
        return self.manifest().digest

    def embed(
        self, payload: Mapping[str, Any], output_digests: Optional[Dict[str, str]] = None
    ) -> Dict[str, Any]:
        """Rapora manifest ve runtime ekler"""
        document = to_jsonable(dict(payload))
        document["manifest"] = self.manifest(output_digests).to_dict()
        document["runtime"] = {"seconds": self.elapsed}
        return document

    def stamp_table(self, df: pd.DataFrame) -> pd.DataFrame:
        """manifest_digest sütununu ekler"""
        stamped = df.copy()
        stamped[DIGEST_COLUMN] = self.digest
        return stamped

    def dumps(self, payload: Mapping[str, Any], output_digests: Optional[Dict[str, str]] = None) -> str:
        """Sıralı anahtarlı, girintili JSON metni"""
        document = self.embed(payload, output_digests)
        return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def write_json(
        self, payload: Mapping[str, Any], path: Path, output_digests: Optional[Dict[str, str]] = None
    ) -> str:
        """JSON raporu yazar ve dosya özetini döndürür"""
        path = Path(path)
        try:
            path.write_text(self.dumps(payload, output_digests), encoding="utf-8")
        except OSError:
            logger.exception("Rapor yazılamadı: %s", path)
            raise
        digest = file_digest(path)
        logger.info("Rapor yazıldı: %s (sha256=%s)", path, digest[:12])
        return digest
