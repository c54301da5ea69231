from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperego.egonet import (
    EgoKind,
    EligibilityConfig,
    UnknownEgoError,
    alter_network,
    alter_networks,
    alters,
    ego_from_sets,
    eligible_egos,
    extract_ego,
    is_eligible,
    read_egos,
    write_egos,
)
from hyperego.simplices import from_records
from hyperego.synthetic import random_dataset

from .conftest import TOY_CONTRACTED, TOY_RADIAL, TOY_STAR, as_sets


@pytest.mark.parametrize(
    "kind, expected",
    [("star", TOY_STAR), ("radial", TOY_RADIAL), ("contracted", TOY_CONTRACTED)],
)
def test_toy_ego_networks(toy, kind, expected):
    ego = extract_ego(toy, 1, kind)
    assert as_sets(ego.simplices) == expected
    assert [s.ordinal_time for s in ego.simplices] == list(range(1, len(expected) + 1))
    assert ego.alters == {2, 3, 4, 5, 7, 8}


def test_alters(toy):
    assert alters(toy, 1) == {2, 3, 4, 5, 7, 8}
    assert alters(toy, 6) == {2, 3, 5}
    assert alters(from_records([((1, 2), 0)]), 1) == {2}
    with pytest.raises(UnknownEgoError):
        alters(toy, 99)
    with pytest.raises(UnknownEgoError):
        extract_ego(toy, 99, "star")


def test_alter_network(toy):
    star = extract_ego(toy, 1, "star")
    assert alter_network(star, 2).ordinals == (1, 2, 3)
    assert alter_network(star, 5).ordinals == (5,)
    with pytest.raises(KeyError):
        alter_network(star, 6)


def test_contracted_keeps_original_times(toy):
    ego = extract_ego(toy, 1, "contracted")
    shrunk = ego.simplices[6]
    assert shrunk.nodes == (2, 3, 5) and shrunk.real_time == 2000


def test_eligibility_gates(toy):
    star = extract_ego(toy, 1, "star")
    assert is_eligible(star, EligibilityConfig(min_length=20, min_alters=10)) == (False, "length")
    assert is_eligible(star, EligibilityConfig(min_length=1, min_alters=0)).ok
    assert is_eligible(star, EligibilityConfig(min_length=1, min_alters=7)) == (False, "alters")

    sets = [{1, 2}] * 12 + [{1, 10 + 2 * k, 11 + 2 * k} for k in range(8)]
    ego = ego_from_sets(sets, 1)
    assert len(ego) == 20 and len(ego.alters) == 17
    cfg = EligibilityConfig(min_length=20, min_alters=10, majority_identical_filter=True)
    assert is_eligible(ego, cfg) == (False, "majority-identical")
    assert is_eligible(ego, EligibilityConfig(min_length=20, min_alters=10)).ok


def test_eligibility_config_validation():
    with pytest.raises(ValueError):
        EligibilityConfig(min_length=0)


def test_eligible_egos_iterates_in_node_order(toy):
    found = list(eligible_egos(toy, "star", EligibilityConfig(min_length=3)))
    assert [e.ego for e in found] == [1, 2, 3]


def test_ego_text_round_trip(tmp_path, toy):
    egos = [extract_ego(toy, 1, k) for k in EgoKind]
    path = tmp_path / "egos.txt"
    write_egos(egos, path)
    first = path.read_text().splitlines()[0]
    assert first == "1 star 5"
    back = read_egos(path)
    for a, b in zip(egos, back):
        assert (a.ego, a.kind, a.alters) == (b.ego, b.kind, b.alters)
        assert [(s.nodes, s.real_time, s.ordinal_time) for s in a.simplices] == [
            (s.nodes, s.real_time, s.ordinal_time) for s in b.simplices
        ]


def _multiset(ego):
    return Counter((s.source_index, s.nodes) for s in ego.simplices)


def _contains(big: Counter, small: Counter) -> bool:
    return all(big[k] >= n for k, n in small.items())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_chain_inclusion_and_union(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, n_nodes=int(rng.integers(3, 51)), n_simplices=int(rng.integers(1, 201)))
    for u in sorted(ds.incidence):
        try:
            star = extract_ego(ds, u, "star")
        except UnknownEgoError:
            continue
        radial = extract_ego(ds, u, "radial")
        contracted = extract_ego(ds, u, "contracted")
        # radial simplices map to themselves under the contraction
        radial_ids = {s.source_index for s in radial.simplices}
        contracted_by_id = {s.source_index: s.nodes for s in contracted.simplices}
        assert all(contracted_by_id[s.source_index] == s.nodes for s in radial.simplices)
        assert _contains(_multiset(radial), _multiset(star))
        assert radial_ids <= set(contracted_by_id)
        assert all(u in s.nodes for s in star.simplices)
        assert user_first(star, u) == 1
        for ego in (star, radial, contracted):
            nets = alter_networks(ego)
            covered = Counter(t for an in nets.values() for t in set(an.ordinals))
            assert set(covered) == set(range(1, len(ego) + 1))
            assert u not in ego.alters


def user_first(ego, u):
    return next(t for t, s in enumerate(ego.simplices, 1) if u in s.nodes)
