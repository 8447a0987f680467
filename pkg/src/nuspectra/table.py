"""Table module for spectrum rows and their CSV and JSON renderings.

Floats are written with 17 significant digits in CSV and with the shortest
round-trip representation in JSON, so both formats restore identical values.
"""
import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, IO, List, Optional, Sequence

import simplejson as json

from .source import Source

SPECTRUM_HEADER = ("n", "l", "flux", "energy", "source", "status")

Record = Dict[str, Any]


@dataclass(frozen=True)
class SpectrumRow:
    """One tabulated energy, or a skipped state with its reason."""

    n: int
    l: int  # noqa: E741
    flux: float
    energy: Optional[float]
    source: Source = Source.CLOSED_FORM
    status: str = ""

    @property
    def skipped(self) -> bool:
        """bool, true when no energy was computed."""
        return bool(self.status)

    def to_record(self) -> Record:
        """Return the row as a mapping keyed by the spectrum header.

        Returns:
            The record
        """
        return {
            "n": self.n,
            "l": self.l,
            "flux": self.flux,
            "energy": self.energy,
            "source": self.source,
            "status": self.status,
        }


@dataclass
class SpectrumTable:
    """Ordered collection of spectrum rows."""

    rows: List[SpectrumRow] = field(default_factory=list)

    def __len__(self) -> int:
        """Number of rows."""
        return len(self.rows)

    @property
    def all_skipped(self) -> bool:
        """bool, true when the table is non-empty and every row is skipped."""
        return bool(self.rows) and all(row.skipped for row in self.rows)

    def bound_rows(self) -> List[SpectrumRow]:
        """Rows that carry an energy.

        Returns:
            The rows that were not skipped
        """
        return [row for row in self.rows if not row.skipped]

    def slice(self, l: int, flux: float) -> "SpectrumTable":  # noqa: E741
        """Rows of one orbital number and flux, sorted by n.

        Args:
            l: Orbital quantum number
            flux: Dimensionless flux

        Returns:
            A new table
        """
        rows = [row for row in self.rows if row.l == l and row.flux == flux]
        return SpectrumTable(rows=sorted(rows, key=lambda row: row.n))

    def to_records(self) -> List[Record]:
        """Rows as records.

        Returns:
            One record per row
        """
        return [row.to_record() for row in self.rows]


def format_cell(value: Any) -> str:
    """Render one value for CSV output.

    Args:
        value: Cell value

    Returns:
        The cell text
    """
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    return value


def write_csv(
    records: Sequence[Record], header: Sequence[str], stream: IO[str]
) -> None:
    """Write records as CSV with LF line endings.

    Args:
        records: Rows keyed by header name
        header: Column order
        stream: Text stream
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for record in records:
        writer.writerow([format_cell(record.get(name)) for name in header])


def write_json(
    records: Sequence[Record], header: Sequence[str], stream: IO[str]
) -> None:
    """Write records as a JSON array of objects.

    Args:
        records: Rows keyed by header name
        header: Key order
        stream: Text stream
    """
    payload = [
        {name: _json_value(record.get(name)) for name in header} for record in records
    ]
    json.dump(payload, stream, indent=2)
    stream.write("\n")


WRITERS = {"csv": write_csv, "json": write_json}


def write_records(
    records: Sequence[Record],
    header: Sequence[str],
    output_format: str,
    stream: IO[str],
) -> None:
    """Write records in the named format.

    Args:
        records: Rows keyed by header name
        header: Column order
        output_format: csv or json
        stream: Text stream

    Raises:
        ValueError: Unknown output format
    """
    try:
        writer = WRITERS[output_format]
    except KeyError:
        raise ValueError(f"Unknown output format {output_format!r}.") from None
    writer(records, header, stream)
