from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slm.errors import UnresolvedPath
from slm.model import Block, BlockKind, BlockPath, ModelFile, System, all_blocks, at_root, parent_of, unique_name, valid_name

names = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8).filter(valid_name)


def tiny() -> ModelFile:
    inner = System([Block("In1", "Inport"), Block("Hidden", "Gain", commented=True, inner=System([Block("X", "Gain")]))])
    return ModelFile("M", System([Block("Sub", "Subsystem", inner=inner), Block("Out1", "Outport")]))


@given(st.lists(names, min_size=1, max_size=5))
def test_path_text_round_trip(segments):
    p = BlockPath(tuple(segments))
    assert BlockPath.parse(str(p)) == p


@pytest.mark.parametrize("bad", ["/a", "a/", "/", ""])
def test_edge_slashes_are_rejected(bad):
    with pytest.raises(ValueError):
        BlockPath.of("M", bad)


def test_slash_in_name_is_escaped():
    p = BlockPath.of("M", "a/b", "c")
    assert str(p) == "M/a//b/c"
    assert BlockPath.parse("M/a//b/c").segments == ("M", "a/b", "c")


def test_contains_and_ancestors():
    p = BlockPath.of("M", "A", "B")
    assert BlockPath.of("M", "A").contains(p) and p.contains(p)
    assert not p.contains(BlockPath.of("M", "A"))
    assert list(p.ancestors()) == [BlockPath.of("M", "A"), BlockPath.of("M")]


def test_find_and_parent():
    m = tiny()
    assert m.find("M/Sub/In1").block_type == "Inport"
    assert parent_of("M/Sub/In1", m) is m.find("M/Sub").inner
    assert parent_of("M", m) is None
    with pytest.raises(UnresolvedPath):
        m.find("M/Nope")


def test_at_root():
    m = tiny()
    assert at_root("M/Out1", m) and not at_root("M/Sub/In1", m)


def test_all_blocks_skips_commented_contents():
    m = tiny()
    assert [str(p) for p in all_blocks(m)] == ["M/Sub", "M/Sub/In1", "M/Out1"]
    assert "M/Sub/Hidden/X" in [str(p) for p in all_blocks(m, include_commented=True)]


def test_unique_name():
    s = System([Block("Call_f", "FunctionCaller"), Block("Call_f_2", "FunctionCaller")])
    assert unique_name(s, "Call_f") == "Call_f_3"
    assert unique_name(s, "g") == "g"


def test_block_kind_of():
    assert BlockKind.of("Switch") is BlockKind.SWITCH
    assert BlockKind.of("Gain") is BlockKind.OTHER
