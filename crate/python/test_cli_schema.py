"""Validates `dcbpv --json` output against crates/cli/schema/output.schema.json.

Set DCBPV_BIN to the binary, or build it with `cargo build -p dcbpv-cli`.
"""

import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "crates" / "core" / "corpus"
SCHEMA = json.loads((ROOT / "crates" / "cli" / "schema" / "output.schema.json").read_text())
BIN = Path(os.environ.get("DCBPV_BIN", ROOT / "target" / "debug" / "dcbpv"))

pytestmark = pytest.mark.skipif(not BIN.exists(), reason=f"{BIN} not built")


def dcbpv(*args):
    out = subprocess.run(
        [str(BIN), *map(str, args), "--json"],
        capture_output=True,
        text=True,
        env={**os.environ, "DCBPV_COLOR": "0"},
    )
    doc = json.loads(out.stdout)
    jsonschema.validate(doc, SCHEMA)
    return out.returncode, doc


@pytest.mark.parametrize("path", sorted((CORPUS / "programs").glob("*.dcbpv")), ids=lambda p: p.stem)
def test_run_and_check(path):
    dcbpv("check", path)
    dcbpv("check", path, "--explain")
    dcbpv("run", path, "--fuel", "300")
    dcbpv("trace", path, "--fuel", "50")


def test_run_all_schedulers():
    code, doc = dcbpv("run", CORPUS / "programs" / "choose_two.dcbpv", "--scheduler", "all")
    assert code == 0
    assert len(doc["outcomes"]) == 2


@pytest.mark.parametrize("path", sorted((CORPUS / "source").glob("*.dtt")), ids=lambda p: p.stem)
@pytest.mark.parametrize("strategy", ["cbv", "cbn"])
@pytest.mark.parametrize("variant", ["minus", "plus"])
def test_translate(path, strategy, variant):
    dcbpv("translate", path, "--strategy", strategy, "--variant", variant)


def test_model_check():
    code, doc = dcbpv("model-check", CORPUS / "laws" / "errors.dcbpv")
    assert code == 0
    code, doc = dcbpv("model-check", "--theory", "--max-base", "2", "--max-errors", "1")
    assert code == 0
    assert len(doc["rows"]) == 80


def test_errors_validate():
    code, doc = dcbpv("check", "/nonexistent.dcbpv")
    assert code == 1
    assert doc["error"]["kind"] == "Io"
