import csv
import json
from typing import Any, Dict, List, Optional, TextIO

from tdot.domain.interfaces import ResultWriter
from tdot.domain.models import SpectrumRow

SIGNIFICANT = 12


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.{SIGNIFICANT}g}"


def rounded(value: Any) -> Any:
    """Recursively round floats to the fixed number of significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {str(k): rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [rounded(v) for v in value]
    return value


def sideband_column(n: int) -> str:
    return f"T_inel_n{n:+d}"


class CsvWriter(ResultWriter):
    """Flat tables; the resolved config is embedded as a leading comment line."""

    def _header(self, config: Dict[str, Any], stream: TextIO, note: str = "") -> None:
        stream.write(f"# config: {json.dumps(rounded(config), sort_keys=True)}\n")
        if note:
            stream.write(f"# note: {note}\n")

    def write_spectrum(
        self, rows: List[SpectrumRow], config: Dict[str, Any], stream: TextIO
    ) -> None:
        self._header(config, stream)
        sidebands = sorted({n for row in rows for n in row.T_inelastic})
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(
            ["k", "T_total", "T_elastic"]
            + [sideband_column(n) for n in sidebands]
            + ["T_static"]
        )
        for row in rows:
            writer.writerow(
                [fmt(row.k), fmt(row.T_total), fmt(row.T_elastic)]
                + [fmt(row.T_inelastic.get(n, 0.0)) for n in sidebands]
                + [fmt(row.T_static)]
            )

    def write_records(
        self,
        records: List[Dict[str, Any]],
        config: Dict[str, Any],
        stream: TextIO,
        note: str = "",
    ) -> None:
        self._header(config, stream, note)
        if not records:
            return
        columns = list(records[0].keys())
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for record in records:
            writer.writerow(
                [
                    fmt(value) if isinstance(value, float) else value
                    for value in (record.get(c) for c in columns)
                ]
            )


class JsonWriter(ResultWriter):
    def write_spectrum(
        self, rows: List[SpectrumRow], config: Dict[str, Any], stream: TextIO
    ) -> None:
        payload = {
            "config": config,
            "rows": [
                {
                    "k": row.k,
                    "method": row.method,
                    "T_total": row.T_total,
                    "T_elastic": row.T_elastic,
                    "T_static": row.T_static,
                    "sidebands": [
                        {"n": n, "T_inelastic": row.T_inelastic[n]}
                        for n in sorted(row.T_inelastic)
                    ],
                    "metadata": row.metadata,
                }
                for row in rows
            ],
        }
        self._dump(payload, stream)

    def write_records(
        self,
        records: List[Dict[str, Any]],
        config: Dict[str, Any],
        stream: TextIO,
        note: str = "",
    ) -> None:
        self._dump({"config": config, "note": note, "records": records}, stream)

    @staticmethod
    def _dump(payload: Dict[str, Any], stream: TextIO) -> None:
        json.dump(rounded(payload), stream, indent=2, sort_keys=True, default=str)
        stream.write("\n")


def create_writer(output_format: str) -> ResultWriter:
    if output_format == "json":
        return JsonWriter()
    if output_format == "csv":
        return CsvWriter()
    raise ValueError(f"Unsupported output format: {output_format}")
