import json

import pytest

from vacalc.errors import InvariantViolation, SchemaError
from vacalc.tables import dumps, export, ingest_table, kind_of, load

from conftest import FIXTURES

LOADABLE = sorted(p.name for p in FIXTURES.glob("*.json") if p.name != "bad_vacuum.json")


@pytest.mark.parametrize("name", LOADABLE)
def test_fixture_export_is_stable(name):
    obj = ingest_table(FIXTURES / name)
    text = dumps(obj)
    again = dumps(load(json.loads(text), FIXTURES))
    assert again == text


def test_bad_vacuum_rejected():
    with pytest.raises(InvariantViolation) as info:
        ingest_table(FIXTURES / "bad_vacuum.json")
    assert info.value.invariant == "vacuum_placement"


def test_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "algebra", "space": {"cells": "nope"}}')
    with pytest.raises(SchemaError):
        ingest_table(bad)
    bad.write_text("{ not json")
    with pytest.raises(SchemaError):
        ingest_table(bad)
    with pytest.raises(SchemaError):
        load({"type": "mystery"})


def test_duplicate_entry_rejected():
    data = json.loads((FIXTURES / "trivial.json").read_text())
    data["y_table"].append(list(data["y_table"][0]))
    with pytest.raises(InvariantViolation) as info:
        load(data, FIXTURES)
    assert info.value.invariant == "duplicate_entry"


def test_kind_detection():
    assert kind_of({"bracket_constants": []}) == "lie"
    assert kind_of({"g": {}}) == "ratfn"
    assert kind_of({"over": "x"}) == "module"
    assert kind_of({}) == "algebra"


def test_export_rejects_unknown():
    with pytest.raises(TypeError):
        export(object())
