"""
Hata hiyerarşisi - Tüm alan hataları ConeSpectraError'dan türer.

CLI, ModelFormatError için çıkış kodu 2, diğer tüm ConeSpectraError
türleri için çıkış kodu 1 döndürür.
"""

from typing import Optional


class ConeSpectraError(Exception):
    """Kütüphanenin tüm alan hataları için temel sınıf"""


class NoM1StarWitnessError(ConeSpectraError):
    """Bir etiket için (M1*) koşulunu sağlayan k′ bulunamadı"""

    def __init__(self, label: int):
        super().__init__(f"(M1*) tanığı bulunamadı: etiket {label}")
        self.label = label


class SizeLimitError(ConeSpectraError):
    """Ağaç köşe sayısı yapılandırılmış üst sınırı aşıyor"""

    def __init__(self, count: int, cap: int):
        super().__init__(f"Köşe sayısı {count} üst sınırı ({cap}) aşıyor")
        self.count = count
        self.cap = cap


class PermutationLimitError(ConeSpectraError):
    """Etiket koruyan permütasyon sayısı üst sınırı aşıyor"""

    def __init__(self, count: int, cap: int):
        super().__init__(f"Permütasyon sayısı {count} üst sınırı ({cap}) aşıyor")
        self.count = count
        self.cap = cap


class NoConvergenceError(ConeSpectraError):
    """Sabit nokta / Newton çözücüsü yakınsamadı"""

    def __init__(self, max_iter: int, z: complex, detail: str = ""):
        message = f"{max_iter} iterasyonda yakınsama yok (z={z})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.max_iter = max_iter
        self.z = z


class InvalidZError(ConeSpectraError):
    """Enerji parametresi üst yarı düzlemde değil"""


class DegenerateError(ConeSpectraError):
    """Sanal kısmı pozitif olmayan bir Green değeri ile karşılaşıldı"""


class DegenerateIntervalError(ConeSpectraError):
    """Enerji aralığı bant kenarına izin verilen paydan daha yakın"""


class InsufficientDepthError(ConeSpectraError):
    """Yeniden köklendirme için ağaç yeterince derin değil"""


class OutOfRangeError(ConeSpectraError):
    """Argüman tanım kümesinin dışında"""


class SpecModelMismatchError(ConeSpectraError):
    """Düzensizlik tanımı ile model birbiriyle uyumsuz"""


class SupportViolationError(ConeSpectraError):
    """Üretilen bir değer (−1, 1) aralığının dışına çıktı"""


class DepthInsufficientError(ConeSpectraError):
    """Kesik özyineleme derinlik pilotunda yakınsamadı"""


class ModelFormatError(ConeSpectraError):
    """Model dosyası okunamadı ya da şemaya uymuyor"""

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        location = ""
        if line is not None:
            location = f" (satır {line}, sütun {column})"
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column
