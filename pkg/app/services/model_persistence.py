"""
Model kalıcılığı - SubstitutionModel ve DisorderSpec'i JSON olarak kaydeder ve yükler.

Biçim:
    {"version": 1, "format": "cone-model", "alphabet": [...], "matrix": [[...]],
     "v_per": [...], "root_label": 0, "disorder": {...}}
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from app.errors import ModelFormatError
from app.models.disorder import DisorderSpec
from app.models.substitution import SubstitutionModel

logger = logging.getLogger(__name__)

FORMAT_NAME = "cone-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelDocument:
    """Model dosyasının içeriği"""

    model: SubstitutionModel
    disorder: Optional[DisorderSpec] = None


class ModelPersistence:
    """
    JSON tabanlı model depolama sınıfı.
    Reel sayılar repr ile yazıldığından yükleme bit düzeyinde aynı değeri verir.
    """

    def to_payload(self, model: SubstitutionModel, disorder: Optional[DisorderSpec] = None) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "version": FORMAT_VERSION,
            "format": FORMAT_NAME,
            "alphabet": list(model.alphabet),
            "matrix": [list(row) for row in model.matrix],
            "v_per": [float(v) for v in model.v_per],
            "root_label": model.root_label,
        }
        if disorder is not None:
            payload["disorder"] = disorder.to_dict()
        return payload

    def save(
        self, path: Path, model: SubstitutionModel, disorder: Optional[DisorderSpec] = None
    ) -> None:
        """Modeli JSON dosyasına kaydet"""
        path = Path(path)
        with path.open("w", encoding="utf-8") as fp:
            json.dump(self.to_payload(model, disorder), fp, ensure_ascii=False, indent=2)
            fp.write("\n")
        logger.info("Model kaydedildi: %s", path)

    def loads(self, text: str) -> ModelDocument:
        """
        JSON metninden model.

        Raises:
            ModelFormatError: Sözdizimi hatası (satır/sütun ile) ya da şema hatası
        """
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"Geçersiz JSON: {exc.msg}", exc.lineno, exc.colno) from exc
        return self.from_payload(payload)

    def load(self, path: Path) -> ModelDocument:
        """
        Raises:
            ModelFormatError: Dosya okunamazsa ya da şemaya uymazsa
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ModelFormatError(f"Model dosyası okunamadı: {path} ({exc.strerror})") from exc
        document = self.loads(text)
        logger.debug("Model yüklendi: %s", path)
        return document

    def from_payload(self, payload: Any) -> ModelDocument:
        if not isinstance(payload, dict):
            raise ModelFormatError("Kök öğe bir JSON nesnesi olmalı")
        if payload.get("format") != FORMAT_NAME:
            raise ModelFormatError(f"'format' anahtarı '{FORMAT_NAME}' olmalı")
        if payload.get("version") != FORMAT_VERSION:
            raise ModelFormatError(f"Desteklenmeyen 'version': {payload.get('version')!r}")

        if "matrix" not in payload:
            raise ModelFormatError("'matrix' anahtarı eksik")

        matrix = payload["matrix"]
        if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix):
            raise ModelFormatError("'matrix' bir liste listesi olmalı")

        try:
            model = SubstitutionModel.from_matrix(
                matrix,
                v_per=payload.get("v_per"),
                root_label=int(payload.get("root_label", 0)),
                alphabet=payload.get("alphabet"),
            )
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"Geçersiz model: {exc}") from exc

        disorder = None
        if payload.get("disorder") is not None:
            try:
                disorder = DisorderSpec.from_dict(payload["disorder"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ModelFormatError(f"Geçersiz 'disorder': {exc}") from exc

        return ModelDocument(model=model, disorder=disorder)
