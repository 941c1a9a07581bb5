from abc import ABC, abstractmethod
from typing import Any, Dict, List, TextIO

from .models import SpectrumRow


class TransmissionMethod(ABC):
    """Interface for the methods that compute a transmission spectrum"""

    name: str = ""

    @abstractmethod
    def transmission(self, k: float) -> SpectrumRow:
        """Compute total, elastic and per-sideband transmission at one momentum"""
        pass


class ResultWriter(ABC):
    """Interface for result table serializers"""

    @abstractmethod
    def write_spectrum(
        self, rows: List[SpectrumRow], config: Dict[str, Any], stream: TextIO
    ) -> None:
        """Serialize a transmission table together with the resolved config"""
        pass

    @abstractmethod
    def write_records(
        self,
        records: List[Dict[str, Any]],
        config: Dict[str, Any],
        stream: TextIO,
        note: str = "",
    ) -> None:
        """Serialize a list of flat records (resonances, deviation reports)"""
        pass
