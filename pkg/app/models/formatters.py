"""
Değer formatlayıcıları - Strategy Pattern implementasyonu
CLI'nin insan okunur özetleri için her değer türüne ayrı strateji sağlar.
Makine çıktısı (JSON/CSV) bu sınıfları kullanmaz; orada repr hassasiyeti korunur.
"""

import math
from abc import ABC, abstractmethod
from typing import Any, Optional


class ValueFormatter(ABC):
    """
    Değer formatlama için Strategy interface.
    Open/Closed Principle: Yeni tipler eklemek için yeni sınıf türetilir.
    """

    @abstractmethod
    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        """Aralık bilgisini görüntüleme formatında döndürür"""
        pass

    @abstractmethod
    def format_value(self, value: Any) -> str:
        """Tek bir değeri görüntüleme formatında döndürür"""
        pass


class RealFormatter(ValueFormatter):
    """Reel sayılar; NaN ve sonsuz değerler 'N/A' olur"""

    def __init__(self, digits: int = 6):
        self._digits = digits

    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        if min_value is None or max_value is None:
            return "N/A"
        return f"[{self.format_value(min_value)}, {self.format_value(max_value)}]"

    def format_value(self, value: Any) -> str:
        if value is None:
            return "N/A"
        value = float(value)
        if not math.isfinite(value):
            return "N/A"
        return f"{value:.{self._digits}g}"


class ComplexFormatter(ValueFormatter):
    """Karmaşık sayılar 'a ± bi' biçiminde"""

    def __init__(self, digits: int = 6):
        self._real = RealFormatter(digits)

    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        """Karmaşık sayılar için aralık desteklenmez"""
        return "N/A"

    def format_value(self, value: Any) -> str:
        if value is None:
            return "N/A"
        value = complex(value)
        sign = "-" if value.imag < 0 else "+"
        return f"{self._real.format_value(value.real)} {sign} {self._real.format_value(abs(value.imag))}i"


class IntervalFormatter(ValueFormatter):
    """Enerji aralıkları; tek değer verilirse (a, b) çifti beklenir"""

    def __init__(self, digits: int = 6):
        self._real = RealFormatter(digits)

    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        return self._real.format_range(min_value, max_value)

    def format_value(self, value: Any) -> str:
        if value is None:
            return "N/A"
        low, high = value
        return self.format_range(low, high)


class BooleanFormatter(ValueFormatter):
    """Koşul sonuçları için formatlayıcı"""

    def __init__(self, true_label: str = "sağlanıyor", false_label: str = "ihlal"):
        self._true_label = true_label
        self._false_label = false_label

    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        """Boolean için aralık desteklenmez"""
        return "N/A"

    def format_value(self, value: Any) -> str:
        if value is None:
            return "N/A"
        return self._true_label if value else self._false_label


class UnknownFormatter(ValueFormatter):
    """Bilinmeyen tip değerler için varsayılan formatlayıcı"""

    def format_range(self, min_value: Optional[Any], max_value: Optional[Any]) -> str:
        return "N/A"

    def format_value(self, value: Any) -> str:
        if value is None:
            return "N/A"
        return str(value)


class FormatterFactory:
    """
    Değer türüne göre uygun formatter döndüren Factory.
    """

    _formatters = {
        "REAL": RealFormatter,
        "COMPLEX": ComplexFormatter,
        "INTERVAL": IntervalFormatter,
        "BOOLEAN": BooleanFormatter,
        "UNKNOWN": UnknownFormatter,
    }

    @classmethod
    def get_formatter(cls, type_name: str, **kwargs) -> ValueFormatter:
        """
        Tür adına göre formatter instance'ı döndürür.

        Args:
            type_name: "REAL", "COMPLEX", "INTERVAL", "BOOLEAN"
            **kwargs: Formatter'a özel parametreler

        Returns:
            İlgili ValueFormatter instance'ı (bilinmeyen adlar için UnknownFormatter)
        """
        formatter_class = cls._formatters.get(type_name, UnknownFormatter)
        return formatter_class(**kwargs) if kwargs else formatter_class()

    @classmethod
    def register_formatter(cls, type_name: str, formatter_class: type) -> None:
        """
        Yeni bir formatter tipi kaydet.

        Args:
            type_name: Tip adı
            formatter_class: ValueFormatter'dan türetilmiş sınıf
        """
        if not issubclass(formatter_class, ValueFormatter):
            raise TypeError("formatter_class must be a subclass of ValueFormatter")
        cls._formatters[type_name] = formatter_class
