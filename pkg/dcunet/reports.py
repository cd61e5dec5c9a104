"""reports.py

Writers for delimiter-separated reports and aligned text tables.
"""

from typing import Any, Iterable, Sequence, TextIO

import csv

import numpy as np

FLOAT_FORMAT = "{:.8f}"
DELIMITER = ","

Row = Sequence[Any]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    if isinstance(value, np.floating):
        return FLOAT_FORMAT.format(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_table(
    stream: TextIO,
    header: Row,
    rows: Iterable[Row],
    footer: Iterable[Row] = (),
    delimiter: str = DELIMITER,
) -> None:
    """Write a header, body rows and footer rows with fixed float formatting"""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    for row in footer:
        writer.writerow([format_value(v) for v in row])


def read_table(stream: TextIO, delimiter: str = DELIMITER) -> list:
    """Parse a table written by :func:`write_table` into a list of dicts"""
    return list(csv.DictReader(stream, delimiter=delimiter))


def format_text_table(header: Row, rows: Iterable[Row]) -> str:
    """Left-aligned columns for terminal output"""
    cells = [[str(h) for h in header]] + [[format_text(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in cells
    ]
    return "\n".join(lines)


def format_text(value: Any) -> str:
    if isinstance(value, tuple):
        return "x".join(str(v) for v in value)
    if value is None:
        return "-"
    return format_value(value)
