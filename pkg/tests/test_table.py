"""Test cases for the table module."""
import csv
import io

import numpy as np
import pytest
import simplejson

from nuspectra import Source, SpectrumRow, SpectrumTable
from nuspectra.table import format_cell, SPECTRUM_HEADER, write_records


def sample_table() -> SpectrumTable:
    """A table with awkward floats and one skipped row."""
    rng = np.random.default_rng(3)
    rows = [
        SpectrumRow(n=n, l=l, flux=0.3, energy=float(rng.normal()) / 3.0)
        for l in range(2)  # noqa: E741
        for n in range(3)
    ]
    rows.append(SpectrumRow(n=0, l=0, flux=0.6, energy=None, status="skipped:J0<=0"))
    return SpectrumTable(rows=rows)


def test_format_cell() -> None:
    """It renders floats with 17 significant digits and plain text otherwise."""
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(-0.5) == "-0.5"
    assert format_cell(0.0) == "0"
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(Source.NU_ROOT) == "nu_root"
    assert format_cell(3) == "3"


def test_csv_layout() -> None:
    """It writes the fixed header with LF line endings."""
    stream = io.StringIO()
    table = SpectrumTable(rows=[SpectrumRow(n=0, l=0, flux=0.0, energy=-0.5)])
    write_records(table.to_records(), SPECTRUM_HEADER, "csv", stream)
    assert stream.getvalue() == (
        "n,l,flux,energy,source,status\n0,0,0,-0.5,closed_form,\n"
    )


def test_csv_round_trip_is_exact() -> None:
    """It restores bit-identical energies from CSV."""
    table = sample_table()
    stream = io.StringIO()
    write_records(table.to_records(), SPECTRUM_HEADER, "csv", stream)
    parsed = list(csv.DictReader(io.StringIO(stream.getvalue())))
    assert len(parsed) == len(table)
    for row, record in zip(table.rows, parsed):
        if row.energy is None:
            assert record["energy"] == ""
            assert record["status"] == "skipped:J0<=0"
        else:
            assert float(record["energy"]) == row.energy


def test_json_and_csv_agree() -> None:
    """It emits the same rows in JSON and CSV."""
    table = sample_table()
    csv_stream, json_stream = io.StringIO(), io.StringIO()
    write_records(table.to_records(), SPECTRUM_HEADER, "csv", csv_stream)
    write_records(table.to_records(), SPECTRUM_HEADER, "json", json_stream)

    from_csv = sorted(
        (int(r["n"]), int(r["l"]), float(r["flux"]), r["energy"], r["source"])
        for r in csv.DictReader(io.StringIO(csv_stream.getvalue()))
    )
    from_json = sorted(
        (
            r["n"],
            r["l"],
            r["flux"],
            "" if r["energy"] is None else format_cell(r["energy"]),
            r["source"],
        )
        for r in simplejson.loads(json_stream.getvalue())
    )
    assert from_csv == from_json


def test_unknown_format() -> None:
    """Should raise value error for an unknown format."""
    with pytest.raises(ValueError):
        write_records([], SPECTRUM_HEADER, "xml", io.StringIO())


def test_table_helpers() -> None:
    """It slices, filters and flags skipped rows."""
    table = sample_table()
    assert len(table.bound_rows()) == 6
    assert not table.all_skipped
    assert [row.n for row in table.slice(1, 0.3).rows] == [0, 1, 2]
    assert table.slice(0, 0.6).rows[0].skipped
    assert not SpectrumTable().all_skipped
