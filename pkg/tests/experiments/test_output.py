import json
import logging
import math
import numpy as np
import pytest
from experiments.output import *


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(1) / 3) == repr(1 / 3)
    assert format_cell(math.nan) == "nan"
    assert format_cell(math.inf) == "inf"
    assert format_cell(np.int64(7)) == "7"
    assert format_cell("delta") == "delta"


def test_plain():
    value = plain({"a": (np.float64(0.5), np.int32(2)), 3: np.array([1.0, math.inf])})
    assert value == {"a": [0.5, 2], "3": [1.0, "inf"]}
    assert plain(np.bool_(True)) is True


def test_csv_table(tmp_path):
    out = OutputDirectory(str(tmp_path / "run"), "scan")
    with out.table(["t", "nbar", "note"]) as table:
        table.write({"t": 0.0, "nbar": 0.25, "ignored": 1})
        table.write({"t": 1.5, "nbar": math.nan, "note": "failed"})

    assert table.rows == 2
    assert out.files == [str(tmp_path / "run" / "scan.csv")]
    with open(out.files[0], encoding="utf-8") as file:
        assert file.read() == "t,nbar,note\n0.0,0.25,\n1.5,nan,failed\n"


def test_csv_table_must_be_open(tmp_path):
    table = CsvTable(str(tmp_path / "x.csv"), ["a"])
    with pytest.raises(RuntimeError, match=r"is not open for writing"):
        table.write({"a": 1})


def test_output_names(tmp_path):
    out = OutputDirectory(str(tmp_path), "rwsc_detuning_scan")

    assert out.path() == str(tmp_path / "rwsc_detuning_scan.csv")
    assert out.path("history") == str(tmp_path / "rwsc_detuning_scan_history.csv")
    assert out.manifest_path() == str(tmp_path / "rwsc_detuning_scan_manifest.json")


def test_manifest(tmp_path):
    path = str(tmp_path / "m.json")
    write_manifest(path, {"value": np.float64(math.nan), "env": environment()})

    with open(path, encoding="utf-8") as file:
        manifest = json.load(file)
    assert manifest["value"] == "nan"
    assert set(manifest["env"]) == {"coolopt", "python", "numpy", "scipy", "platform"}


def test_configure_logging(tmp_path, restore_logging):
    configure_logging("DEBUG", str(tmp_path))
    logging.getLogger("coolopt.test").info("hello")
    for handler in logging.getLogger().handlers:
        handler.flush()

    with open(tmp_path / LOG_FILE, encoding="utf-8") as file:
        assert "coolopt.test: hello" in file.read()
