from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperego.simplices import (
    DatasetParseError,
    DatasetStructureError,
    EmptyDatasetError,
    Simplex,
    assign_ordinal_times,
    filter_trivial,
    from_records,
    load_dataset,
    load_prefix,
    write_dataset,
)
from hyperego.synthetic import random_dataset

from .conftest import TOY_SETS, TOY_TIMES, as_sets


def _write(tmp_path, nverts, simplices, times, name="d"):
    paths = [tmp_path / f"{name}-{k}.txt" for k in ("nverts", "simplices", "times")]
    for p, vals in zip(paths, (nverts, simplices, times)):
        p.write_text("".join(f"{v}\n" for v in vals))
    return paths


def test_minimal_load(tmp_path):
    ds = load_dataset(*_write(tmp_path, [3, 2], [1, 2, 3, 1, 2], [1995, 1996]))
    assert as_sets(ds.simplices) == [{1, 2, 3}, {1, 2}]
    assert [s.real_time for s in ds.simplices] == [1995, 1996]
    assert ds.name == "d"
    assert ds.degree_index == {1: 2, 2: 2, 3: 1}


def test_duplicate_nodes_collapse_to_trivial(tmp_path):
    ds = load_dataset(*_write(tmp_path, [2], [7, 7], [5]))
    assert as_sets(ds.simplices) == [{7}]
    assert ds.duplicate_nodes_dropped == 1
    assert len(filter_trivial(ds)) == 0


def test_toy_file_round_trip(toy_prefix):
    ds = load_prefix(toy_prefix)
    assert as_sets(ds.simplices) == TOY_SETS
    assert [s.real_time for s in ds.simplices] == TOY_TIMES
    assert ds.node_count == 8


def test_load_sorts_by_time_then_file_order(tmp_path):
    ds = load_dataset(*_write(tmp_path, [2, 2, 2], [1, 2, 3, 4, 5, 6], [9, 3, 3]))
    assert as_sets(ds.simplices) == [{3, 4}, {5, 6}, {1, 2}]
    assert [s.source_index for s in ds.simplices] == [1, 2, 0]


def test_parse_error_names_line(tmp_path):
    paths = _write(tmp_path, [2, 2], [1, 2, 3, 4], [1, 2])
    paths[1].write_text("1\n2\nx3\n4\n")
    with pytest.raises(DatasetParseError) as err:
        load_dataset(*paths)
    assert err.value.line == 3


def test_length_mismatch(tmp_path):
    with pytest.raises(DatasetStructureError) as err:
        load_dataset(*_write(tmp_path, [2, 2], [1, 2, 3, 4], [1]))
    assert (err.value.left, err.value.right) == (2, 1)
    with pytest.raises(DatasetStructureError) as err:
        load_dataset(*_write(tmp_path, [2, 2], [1, 2, 3], [1, 2]))
    assert (err.value.left, err.value.right) == (4, 3)


def test_empty_dataset(tmp_path):
    with pytest.raises(EmptyDatasetError):
        load_dataset(*_write(tmp_path, [], [], []))


@pytest.mark.parametrize(
    "sets, kept",
    [([{1}, {1, 2}], [{1, 2}]), (TOY_SETS, TOY_SETS), ([{3}, {4}], [])],
)
def test_filter_trivial(sets, kept):
    ds = filter_trivial(from_records(((s, t) for t, s in enumerate(sets)), "x"))
    assert as_sets(ds.simplices) == kept
    assert ds.degree_index == from_records(((s, 0) for s in kept), "y").degree_index


def test_ordinals_break_ties_by_file_order():
    ss = [Simplex((1, 2), 1995, 0), Simplex((2, 3), 1996, 1), Simplex((3, 4), 1996, 2)]
    assert [s.ordinal_time for s in assign_ordinal_times(ss)] == [1, 2, 3]
    assert [s.ordinal_time for s in assign_ordinal_times(ss[:1])] == [1]


def test_ordinals_reject_unsorted():
    with pytest.raises(ValueError):
        assign_ordinal_times([Simplex((1, 2), 5, 0), Simplex((1, 3), 4, 1)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_and_degree_recount(tmp_path_factory, seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, n_nodes=20, n_simplices=int(rng.integers(1, 60)), n_times=10)
    prefix = tmp_path_factory.mktemp("rt") / "r"
    write_dataset(ds, prefix)
    back = load_prefix(prefix)
    assert [(s.nodes, s.real_time) for s in back] == [(s.nodes, s.real_time) for s in ds]
    for v, deg in ds.degree_index.items():
        assert deg == sum(v in s.nodes for s in ds)
    ords = [s.ordinal_time for s in assign_ordinal_times(ds.simplices)]
    assert ords == list(range(1, len(ds) + 1))
