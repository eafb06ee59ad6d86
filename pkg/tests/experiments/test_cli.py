import glob
import json
import os
import pytest
from dataclasses import replace
from config.loader import load_config
from main import build_parser, main
from lib.version import VERSION

pytestmark = pytest.mark.usefixtures("restore_logging")

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "configs")

SMALL = """
[experiment]
scheme = rwsc
mode = evolve

[space]
fock_dim = 3

[evolve]
t_final = 10
samples = 11
fit = false
"""


def write(tmp_path, text, name="small.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CONFIG_DIR, "*.cfg"))))
def test_shipped_configs_validate(path):
    assert main(["validate", path]) == 0


def test_validate_reports_config_errors(tmp_path, capsys):
    path = write(tmp_path, SMALL.replace("scheme = rwsc", "scheme = doppler"))

    assert main(["validate", path]) == 1
    assert "doppler" in capsys.readouterr().err


def test_validate_missing_file(tmp_path):
    assert main(["validate", str(tmp_path / "absent.cfg")]) == 1


def test_run(tmp_path):
    path = write(tmp_path, SMALL)
    out = tmp_path / "out"

    assert main(["run", path, "--out", str(out), "--log-level", "WARNING"]) == 0
    with open(out / "small_manifest.json", encoding="utf-8") as file:
        manifest = json.load(file)
    assert manifest["status"] == "ok"
    assert manifest["config_path"] == path
    assert os.path.exists(out / "small.csv")
    assert os.path.exists(out / "run.log")


def test_run_rejects_zero_threads(tmp_path):
    path = write(tmp_path, SMALL)

    assert main(["run", path, "--out", str(tmp_path), "--threads", "0"]) == 1


def test_run_failure_exit_code(tmp_path):
    text = SMALL.replace("mode = evolve", "mode = steady") + "\n[params]\nomega = 0\n"
    path = write(tmp_path, text)

    assert main(["run", path, "--out", str(tmp_path)]) == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--version"])

    assert VERSION in capsys.readouterr().out


@pytest.mark.parametrize(
    "stem, twin",
    [("fig1a", "rwsc_detuning_scan"), ("table1", "eit_compare")],
)
def test_named_configs_match_their_twins(stem, twin):
    config = load_config(os.path.join(CONFIG_DIR, f"{stem}.cfg"))
    other = load_config(os.path.join(CONFIG_DIR, f"{twin}.cfg"))

    assert config.name == stem
    assert replace(config, name=twin, resolved=other.resolved) == other
