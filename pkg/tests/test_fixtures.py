from __future__ import annotations

import json

import pytest

from slm.fixtures import (
    CENSUS_BLOCKS,
    CENSUS_SUBSYSTEMS,
    DATA_DIR,
    census_model,
    data_files,
    generate_model,
    violation_corpus,
)
from slm.guidelines import run_guidelines
from slm.parser import load_dictionary, load_model, serialize_model


@pytest.mark.parametrize("rel", sorted(data_files()))
def test_checked_in_data_is_current(rel):
    assert (DATA_DIR / rel).read_text() == data_files()[rel]


def test_manifest_matches_checker():
    manifest = json.loads((DATA_DIR / "violations" / "manifest.json").read_text())
    assert set(manifest) == {c.path for c in violation_corpus()}
    for rel, entry in manifest.items():
        m = load_model(DATA_DIR / "violations" / rel)
        dicts = [load_dictionary(DATA_DIR / "violations" / d) for d in entry["dicts"]]
        got = sorted([d.rule.value, str(d.subject)] for d in run_guidelines(m, dicts))
        assert got == sorted(entry["expected"]), rel


def test_generator_is_deterministic():
    assert serialize_model(generate_model(3, 5, 11)) == serialize_model(generate_model(3, 5, 11))
    assert generate_model(3, 5, 11) != generate_model(3, 5, 12)


def test_depth_zero_is_flat():
    m = generate_model(0, 6, 1)
    assert [p for p, _ in m.iter_systems(include_commented=True)] == [m.root_path]


def test_census_size():
    m = census_model()
    blocks = sum(1 for _ in m.iter_blocks(include_commented=True))
    subsystems = sum(1 for _ in m.iter_systems(include_commented=True)) - 1
    assert abs(blocks - CENSUS_BLOCKS) <= 0.01 * CENSUS_BLOCKS
    assert abs(subsystems - CENSUS_SUBSYSTEMS) <= 0.01 * CENSUS_SUBSYSTEMS
