import json
import math

import numpy as np
from openpyxl import load_workbook

from application.file_handlers import OutputFileWriter, format_number, json_ready


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(np.float64(2.0)) == "2"
    assert format_number(np.int64(3)) == "3"
    assert format_number(True) == "1"
    assert format_number(math.inf) == "inf"
    assert format_number("total") == "total"


def test_json_ready_converts_numpy_and_non_finite():
    data = {"a": np.array([1.0, np.inf]), "b": np.bool_(True), 3: (np.int32(2),)}
    assert json_ready(data) == {"a": [1.0, None], "b": True, "3": [2]}


def test_write_csv(tmp_path):
    path = tmp_path / "nested" / "table.csv"
    assert OutputFileWriter.write_csv(path, ["tick", "value"], [[0, 0.5], [1, 1 / 3]]) is None
    assert path.read_text(encoding="utf-8") == "tick,value\n0,0.5\n1,0.33333333333333331\n"


def test_write_csv_reports_errors(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    assert OutputFileWriter.write_csv(blocker / "table.csv", ["a"], []) is not None


def test_write_json_shortest_floats(tmp_path):
    path = tmp_path / "report.json"
    assert OutputFileWriter.write_json(path, {"x": 0.1, "v": np.array([1.5])}) is None
    text = path.read_text(encoding="utf-8")
    assert '"x": 0.1' in text
    assert json.loads(text) == {"x": 0.1, "v": [1.5]}


def test_write_workbook(tmp_path):
    path = tmp_path / "results.xlsx"
    tables = {"psd": (["bin", "power"], [[0, 0.25], [1, math.inf]])}
    assert OutputFileWriter.write_workbook(path, tables) is None
    sheet = load_workbook(path)["psd"]
    assert [c.value for c in sheet[2]] == [0, 0.25]
    assert sheet.cell(row=3, column=2).value == "inf"
