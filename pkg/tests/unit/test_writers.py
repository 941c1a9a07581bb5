import csv
import io
import json

import pytest

from tdot.domain.models import SpectrumRow
from tdot.infrastructure.output.writers import (
    CsvWriter,
    JsonWriter,
    create_writer,
    fmt,
    sideband_column,
)

CONFIG = {"model": {"g1": 0.25}, "threads": 1}


@pytest.fixture
def rows():
    return [
        SpectrumRow(k=0.5, T_total=0.9, T_elastic=0.85, T_inelastic={1: 0.05}, T_static=0.8),
        SpectrumRow(
            k=1.0,
            T_total=1 / 3,
            T_elastic=0.3,
            T_inelastic={-1: 0.01, 1: 0.0233333333333},
            T_static=0.7,
        ),
        SpectrumRow(k=1.5, T_total=0.5, T_elastic=None, method="oracle"),
    ]


def test_formatting():
    assert fmt(None) == ""
    assert fmt(1 / 3) == "0.333333333333"
    assert sideband_column(1) == "T_inel_n+1"
    assert sideband_column(-2) == "T_inel_n-2"


def test_csv_spectrum(rows):
    stream = io.StringIO()
    CsvWriter().write_spectrum(rows, CONFIG, stream)
    lines = stream.getvalue().splitlines()

    assert lines[0].startswith("# config: ")
    assert json.loads(lines[0][len("# config: ") :]) == CONFIG
    table = list(csv.DictReader(lines[1:]))
    assert list(table[0]) == [
        "k",
        "T_total",
        "T_elastic",
        "T_inel_n-1",
        "T_inel_n+1",
        "T_static",
    ]
    assert table[0]["T_inel_n-1"] == "0"
    assert table[1]["T_total"] == "0.333333333333"
    assert table[2]["T_elastic"] == ""
    assert table[2]["T_static"] == ""


def test_csv_records_with_note():
    stream = io.StringIO()
    CsvWriter().write_records([], CONFIG, stream, note="nothing found")
    assert stream.getvalue().splitlines()[1] == "# note: nothing found"

    stream = io.StringIO()
    CsvWriter().write_records([{"pair": "floquet-static", "max_abs": 0.125}], CONFIG, stream)
    assert stream.getvalue().splitlines()[1:] == ["pair,max_abs", "floquet-static,0.125"]


def test_json_spectrum(rows):
    stream = io.StringIO()
    JsonWriter().write_spectrum(rows, CONFIG, stream)
    payload = json.loads(stream.getvalue())
    assert payload["config"] == CONFIG
    second = payload["rows"][1]
    assert second["sidebands"] == [
        {"n": -1, "T_inelastic": 0.01},
        {"n": 1, "T_inelastic": 0.0233333333333},
    ]
    assert payload["rows"][2]["T_elastic"] is None


def test_writer_factory():
    assert isinstance(create_writer("csv"), CsvWriter)
    assert isinstance(create_writer("json"), JsonWriter)
    with pytest.raises(ValueError):
        create_writer("xml")
