"""
Tablo yazma/okuma servisi - Strategy Pattern ile CSV, JSON ve Parquet

Bant taramaları, Green tabloları ve λ/η taramaları DataFrame olarak
üretilir; dosya biçimi uzantıdan seçilir.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional

import pandas as pd

logger = logging.getLogger(__name__)


class FileIOStrategy(ABC):
    """
    Tablo okuma/yazma stratejisi için soyut sınıf.
    Tüm handler'lar bu sınıftan türer.
    """

    @property
    @abstractmethod
    def supported_extensions(self) -> List[str]:
        """Desteklenen dosya uzantıları"""
        pass

    @property
    @abstractmethod
    def format_name(self) -> str:
        pass

    def can_handle(self, file_path: Path) -> bool:
        return file_path.suffix.lower() in self.supported_extensions

    @abstractmethod
    def read(self, file_path: Path, **kwargs) -> pd.DataFrame:
        pass

    @abstractmethod
    def write(self, df: pd.DataFrame, file_path: Path, **kwargs) -> None:
        pass


class CSVHandler(FileIOStrategy):
    """CSV/TSV; reel sayılar tam hassasiyetle (repr) yazılır"""

    @property
    def supported_extensions(self) -> List[str]:
        return [".csv", ".tsv"]

    @property
    def format_name(self) -> str:
        return "csv"

    def read(self, file_path: Path, **kwargs) -> pd.DataFrame:
        return pd.read_csv(file_path, sep=self._delimiter(file_path, kwargs), encoding="utf-8")

    def write(self, df: pd.DataFrame, file_path: Path, **kwargs) -> None:
        try:
            df.to_csv(
                file_path,
                index=False,
                encoding="utf-8",
                sep=self._delimiter(file_path, kwargs),
                lineterminator="\n",
            )
        except OSError:
            logger.exception("CSV yazma hatası: %s", file_path)
            raise

    def _delimiter(self, file_path: Path, kwargs: dict) -> str:
        delimiter = kwargs.get("delimiter")
        if delimiter is None:
            delimiter = "\t" if file_path.suffix.lower() == ".tsv" else ","
        return delimiter


class JSONHandler(FileIOStrategy):
    """JSON; varsayılan olarak 'records' biçiminde"""

    @property
    def supported_extensions(self) -> List[str]:
        return [".json"]

    @property
    def format_name(self) -> str:
        return "json"

    def read(self, file_path: Path, **kwargs) -> pd.DataFrame:
        orient = kwargs.get("orient", "records")
        return pd.read_json(file_path, orient=orient, encoding="utf-8")

    def write(self, df: pd.DataFrame, file_path: Path, **kwargs) -> None:
        try:
            df.to_json(
                file_path,
                orient=kwargs.get("orient", "records"),
                indent=kwargs.get("indent", 2),
                force_ascii=False,
                double_precision=15,
            )
        except OSError:
            logger.exception("JSON yazma hatası: %s", file_path)
            raise


class ParquetHandler(FileIOStrategy):
    """Apache Parquet (pyarrow motoru)"""

    @property
    def supported_extensions(self) -> List[str]:
        return [".parquet", ".pq"]

    @property
    def format_name(self) -> str:
        return "parquet"

    def read(self, file_path: Path, **kwargs) -> pd.DataFrame:
        return pd.read_parquet(file_path, engine="pyarrow", columns=kwargs.get("columns"))

    def write(self, df: pd.DataFrame, file_path: Path, **kwargs) -> None:
        try:
            # Parquet karışık tip sütun isimlerini desteklemez, string'e çevir
            df_copy = df.copy()
            df_copy.columns = df_copy.columns.astype(str)
            df_copy.to_parquet(
                file_path,
                engine="pyarrow",
                compression=kwargs.get("compression", "snappy"),
                index=False,
            )
        except OSError:
            logger.exception("Parquet yazma hatası: %s", file_path)
            raise


class FileIORegistry:
    """
    Merkezi tablo I/O kayıt sistemi.
    Yeni biçimler register ile eklenebilir (Open/Closed).
    """

    _handlers: List[FileIOStrategy] = []

    @classmethod
    def register(cls, handler: FileIOStrategy) -> None:
        cls._handlers.append(handler)

    @classmethod
    def get_handlers(cls) -> List[FileIOStrategy]:
        return cls._handlers.copy()

    @classmethod
    def get_handler(cls, file_path: Path) -> Optional[FileIOStrategy]:
        """Uzantıya uygun handler (yoksa None)"""
        for handler in cls._handlers:
            if handler.can_handle(file_path):
                return handler
        return None

    @classmethod
    def read_file(cls, file_path: Path, **kwargs) -> pd.DataFrame:
        handler = cls.get_handler(Path(file_path))
        if handler is None:
            raise ValueError(f"Desteklenmeyen dosya formatı: {Path(file_path).suffix}")
        return handler.read(Path(file_path), **kwargs)

    @classmethod
    def write_file(cls, df: pd.DataFrame, file_path: Path, **kwargs) -> None:
        handler = cls.get_handler(Path(file_path))
        if handler is None:
            raise ValueError(f"Desteklenmeyen dosya formatı: {Path(file_path).suffix}")
        handler.write(df, Path(file_path), **kwargs)
        logger.info("%s tablosu yazıldı: %s (%d satır)", handler.format_name, file_path, len(df))

    @classmethod
    def get_extensions(cls) -> List[str]:
        extensions: List[str] = []
        for handler in cls._handlers:
            extensions.extend(handler.supported_extensions)
        return extensions

    @classmethod
    def is_extension_supported(cls, extension: str) -> bool:
        ext = "." + extension.lower().lstrip(".")
        return ext in cls.get_extensions()


# ============ Handler Registrations (Open/Closed Principle) ============
FileIORegistry.register(CSVHandler())
FileIORegistry.register(JSONHandler())
FileIORegistry.register(ParquetHandler())
