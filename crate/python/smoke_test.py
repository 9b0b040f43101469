"""Smoke test for the `dcbpv_py` extension.

Build and install it first:

    maturin build -m crates/python/Cargo.toml -o dist && pip install dist/dcbpv-*.whl
"""

from pathlib import Path

import pytest

import dcbpv_py

CORPUS = Path(__file__).resolve().parent.parent / "crates" / "core" / "corpus"


def program(name):
    return (CORPUS / "programs" / f"{name}.dcbpv").read_text()


def source(name):
    return (CORPUS / "source" / f"{name}.dtt").read_text()


def test_check_returns_the_type():
    assert dcbpv_py.check(program("id")) == "F Unit"


def test_check_rejects_ill_typed_programs():
    with pytest.raises(dcbpv_py.CheckError):
        dcbpv_py.check("main : F Unit = return (1, ());")
    with pytest.raises(dcbpv_py.ParseError):
        dcbpv_py.check("main : F Unit = ")


def test_shrink_flag():
    dcbpv_py.check(program("shrink_print"))
    with pytest.raises(dcbpv_py.CheckError):
        dcbpv_py.check(program("shrink_print"), shrink=False)


def test_run_state_program():
    [out] = dcbpv_py.run(program("state"))
    assert out["kind"] == "Returned"
    assert out["state"] == "s1"
    assert out["steps"] == 4
    assert out["line"] == "Returned (2,()) | printed ε | state s1 | 4 steps"


def test_schedulers():
    p = program("choose_two")
    assert dcbpv_py.run(p)[0]["value"] == "(1,())"
    assert dcbpv_py.run(p, scheduler="fixed:2")[0]["value"] == "(2,())"
    assert {o["value"] for o in dcbpv_py.run(p, scheduler="all")} == {"(1,())", "(2,())"}
    with pytest.raises(ValueError):
        dcbpv_py.run(p, scheduler="interactive")


def test_fuel():
    [out] = dcbpv_py.run(program("diverge"), fuel=100)
    assert out["kind"] == "FuelExhausted"
    assert out["steps"] == 100


def test_translation_round_trip():
    cbv = dcbpv_py.translate(source("src_print_twice"), "cbv", "plus")
    cbn = dcbpv_py.translate(source("src_print_twice"), "cbn", "minus")
    assert dcbpv_py.run(cbv)[0]["printed"] == "a"
    assert dcbpv_py.run(cbn)[0]["printed"] == "aa"
    with pytest.raises(dcbpv_py.TranslateError):
        dcbpv_py.translate(source("src_pair"), "cbv", "minus")


def test_model_check():
    rows = dcbpv_py.model_check((CORPUS / "laws" / "errors.dcbpv").read_text())
    assert len(rows) == 6
    assert all(equal for _, _, equal in rows)
    theory = dcbpv_py.theory(max_base=2, max_errors=1)
    assert len(theory) == 80
    assert all(row[3] for row in theory)
