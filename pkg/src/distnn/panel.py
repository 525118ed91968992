"""Panel file formats: long-format CSV and a JSON matrix representation.

The CSV format is UTF-8 with header ``row,col,value`` and ``.`` as the
decimal separator; the sample array of a matrix entry is the group of values
sharing a (row, col) key pair. Axes are ordered by first appearance of each
key, so re-reading a written file reproduces the same matrix.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

from .errors import PanelParseError
from .matrix import DistributionalMatrix

__all__ = ["Panel", "read_panel_csv", "write_panel_csv", "read_matrix_json", "write_matrix_json"]

CSV_HEADER = ["row", "col", "value"]


@dataclass(frozen=True)
class Panel:
    """A distributional matrix together with its string axis keys."""

    matrix: DistributionalMatrix
    row_keys: tuple
    col_keys: tuple

    def cell_index(self, row_key: str, col_key: str):
        try:
            return self.row_keys.index(row_key), self.col_keys.index(col_key)
        except ValueError:
            return None


def _matrix_from_groups(groups, row_keys, col_keys) -> Panel:
    entries = [
        [groups.get((r, c)) for c in col_keys]
        for r in row_keys
    ]
    return Panel(
        matrix=DistributionalMatrix(entries),
        row_keys=tuple(row_keys),
        col_keys=tuple(col_keys),
    )


def read_panel_csv(path) -> Panel:
    """Parse a long-format CSV panel; raises PanelParseError with the
    offending line number on malformed input."""
    groups: dict = {}
    row_keys: list = []
    col_keys: list = []
    seen_rows: set = set()
    seen_cols: set = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelParseError("file is empty") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise PanelParseError(
                f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}", line=1
            )
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != 3:
                raise PanelParseError(
                    f"expected 3 fields, got {len(record)}", line=line_no
                )
            row_key, col_key, raw_value = record
            try:
                value = float(raw_value)
            except ValueError:
                raise PanelParseError(
                    f"value {raw_value!r} is not a number", line=line_no
                ) from None
            if not math.isfinite(value):
                raise PanelParseError(f"value {raw_value!r} is not finite", line=line_no)
            if row_key not in seen_rows:
                seen_rows.add(row_key)
                row_keys.append(row_key)
            if col_key not in seen_cols:
                seen_cols.add(col_key)
                col_keys.append(col_key)
            groups.setdefault((row_key, col_key), []).append(value)
    if not groups:
        raise PanelParseError("no records found")
    return _matrix_from_groups(groups, row_keys, col_keys)


def write_panel_csv(panel: Panel, path) -> None:
    """Write observed entries in axis order; samples are written sorted."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        m = panel.matrix
        for i, row_key in enumerate(panel.row_keys):
            for j, col_key in enumerate(panel.col_keys):
                entry = m.entry(i, j)
                if entry is None:
                    continue
                for value in entry.samples:
                    writer.writerow([row_key, col_key, repr(float(value))])


def write_matrix_json(panel: Panel, path) -> None:
    payload = {
        "rows": list(panel.row_keys),
        "cols": list(panel.col_keys),
        "entries": [
            {
                "row": panel.row_keys[i],
                "col": panel.col_keys[j],
                "samples": [float(v) for v in panel.matrix.entry(i, j).samples],
            }
            for i, j in panel.matrix.observed_cells()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_matrix_json(path) -> Panel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PanelParseError(f"invalid JSON: {exc}") from None
    try:
        row_keys = list(payload["rows"])
        col_keys = list(payload["cols"])
        groups = {
            (rec["row"], rec["col"]): [float(v) for v in rec["samples"]]
            for rec in payload["entries"]
        }
    except (KeyError, TypeError) as exc:
        raise PanelParseError(f"malformed matrix JSON: {exc}") from None
    return _matrix_from_groups(groups, row_keys, col_keys)


def load_panel(path) -> Panel:
    """Dispatch on extension: .json for the matrix format, CSV otherwise."""
    if str(path).endswith(".json"):
        return read_matrix_json(path)
    return read_panel_csv(path)
