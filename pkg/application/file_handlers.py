"""File handling module for writing result tables and reports"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from openpyxl import Workbook

Table = Tuple[Sequence[str], List[Sequence[Any]]]


def format_number(value: Any) -> str:
    """17 significant digits for floats, '.' decimal whatever the locale"""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{float(value):.17g}"
    return str(value)


def json_ready(value: Any) -> Any:
    """Replace numpy scalars/arrays and non-finite floats by JSON-encodable values"""
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


class OutputFileWriter:
    """Handles writing output files"""

    @staticmethod
    def write_csv(output_file: Path, header: Sequence[str], rows: List[Sequence[Any]]) -> Optional[str]:
        """
        Write a CSV table with a header row

        Args:
            output_file: Path of the CSV file
            header: column names
            rows: data rows

        Returns:
            Error message if any, None otherwise
        """
        try:
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with open(output_file, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_number(v) for v in row])
        except OSError as exc:
            return str(exc)
        return None

    @staticmethod
    def write_json(output_file: Path, data: Any) -> Optional[str]:
        """
        Write structured text (JSON, indent 2, keys in insertion order)

        Floats use the shortest representation that reads back to the same double.

        Returns:
            Error message if any, None otherwise
        """
        try:
            output_file.parent.mkdir(parents=True, exist_ok=True)
            text = json.dumps(json_ready(data), ensure_ascii=False, indent=2)
            output_file.write_text(text + "\n", encoding="utf-8")
        except (OSError, TypeError, ValueError) as exc:
            return str(exc)
        return None

    @staticmethod
    def write_workbook(output_file: Path, tables: Dict[str, Table]) -> Optional[str]:
        """
        Write every table to its own sheet of an .xlsx workbook

        Args:
            output_file: Path of the workbook
            tables: sheet name -> (header, rows)

        Returns:
            Error message if any, None otherwise
        """
        try:
            output_file.parent.mkdir(parents=True, exist_ok=True)
            workbook = Workbook()
            workbook.remove(workbook.active)
            for name, (header, rows) in tables.items():
                sheet = workbook.create_sheet(title=name[:31])
                sheet.append(list(header))
                for row in rows:
                    sheet.append([_cell(v) for v in row])
            workbook.save(output_file)
        except (OSError, ValueError) as exc:
            return str(exc)
        return None


def _cell(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else format_number(value)
    return value
