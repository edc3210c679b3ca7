from __future__ import annotations

import json

from qample.suite import CLAIMS, reproduce_paper


def test_every_criterion_has_a_claim():
    assert sorted(CLAIMS) == list(range(1, 14))


def test_suite_json_is_deterministic_modulo_timestamp():
    a = reproduce_paper(only=[3, 4, 11, 13])
    b = reproduce_paper(only=[3, 4, 11, 13])
    assert a.dumps(with_timestamp=False) == b.dumps(with_timestamp=False)
    doc = json.loads(a.dumps())
    assert doc["passed"] and "generated_at" in doc
    assert {c["provenance"] for c in doc["claims"]} <= {"PUBLISHED", "DERIVED", "PUBLISHED/DERIVED"}


def test_cache_file_reused(tmp_path):
    path = tmp_path / "cache.jsonl"
    first = reproduce_paper(only=[13], cache_path=str(path))
    lines = path.read_text().splitlines()
    assert lines
    second = reproduce_paper(only=[13], cache_path=str(path))
    assert path.read_text().splitlines() == lines
    assert first.dumps(False) == second.dumps(False)
