"""Versiyon bilgisi modülü"""

from pathlib import Path

# Varsayılan versiyon (geliştirme sırasında)
DEFAULT_VERSION = "dev"

_VERSION_FILE = Path(__file__).parent.parent / "version.txt"


def get_version() -> str:
    """
    Araç versiyonunu döndürür.

    Depo kökündeki version.txt dosyasından okur; dosya yoksa ya da
    okunamazsa varsayılan versiyonu döndürür. RunManifest bu değeri taşır.
    """
    try:
        text = _VERSION_FILE.read_text(encoding="utf-8").strip()
    except OSError:
        return DEFAULT_VERSION
    return text or DEFAULT_VERSION


VERSION = get_version()
