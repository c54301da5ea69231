"""Synthetic simplex datasets for tests and demos.

The locality generator mimics what real ego-networks show: each alter is
active for a geometric-length run of consecutive simplices, and novel alters
enter at a constant rate.
"""
from __future__ import annotations

import numpy as np

from .egonet import EgoKind, EgoNetwork, ego_from_sets
from .simplices import SimplexDataset, from_records

__all__ = [
    "locality_ego_sets",
    "locality_dataset",
    "random_dataset",
    "run_concatenation_ego",
]


def locality_ego_sets(
    m: int,
    rng: np.random.Generator,
    ego: int = 0,
    first_alter: int = 1,
    novelty_rate: float = 0.5,
    mean_run: float = 4.0,
    include_prob: float = 0.7,
    max_size: int = 6,
    alter_simplex_rate: float = 0.0,
    outsider_rate: float = 0.0,
    first_outsider: int | None = None,
    core_prob: float = 0.9,
    core_decay: bool = True,
) -> list[set[int]]:
    """Node sets of one ego-network in true arrival order.

    With ``alter_simplex_rate`` > 0 some simplices leave the ego out (radial
    material); each of those may also pull in a node from outside the
    ego-network with probability ``outsider_rate`` (contracted material).
    Alter simplices only ever involve alters already seen with the ego.

    The first alter is a core collaborator: it opens the ego-network and then
    stays active throughout, joining the simplex at step t with probability
    ``core_prob`` (times ``1 - t/m`` when ``core_decay`` is set, so the tie
    fades).  High-degree alters therefore arrive early, and the ordering has
    a direction that reversal-invariant measures alone cannot see.
    """
    active: dict[int, int] = {}
    known: list[int] = []
    next_alter = first_alter
    next_outsider = first_outsider if first_outsider is not None else first_alter + 10 * m
    out: list[set[int]] = []
    with_ego = 0
    for t in range(m):
        alter_simplex = len(known) >= 2 and with_ego >= 1 and rng.random() < alter_simplex_rate
        members: set[int] = set()
        core = first_alter
        if t == 0:
            members.add(core)
            known.append(core)
            next_alter += 1
        elif not alter_simplex and (len(active) == 0 or rng.random() < novelty_rate):
            a = next_alter
            next_alter += 1
            active[a] = int(rng.geometric(1.0 / mean_run))
            known.append(a)
            members.add(a)
        pool = [a for a in active if a not in members]
        if t > 0:
            for a in pool:
                if rng.random() < include_prob:
                    members.add(a)
            p_core = core_prob * (1 - t / m) if core_decay else core_prob
            if core not in members and rng.random() < p_core:
                members.add(core)
        if alter_simplex:
            cands = [a for a in known if a not in members]
            while len(members) < 2 and cands:
                members.add(cands.pop(int(rng.integers(len(cands)))))
            if rng.random() < outsider_rate:
                members.add(next_outsider)
                next_outsider += 1
        elif not members:
            members.add(pool[int(rng.integers(len(pool)))] if pool else core)
        if len(members) > max_size - (0 if alter_simplex else 1):
            keep = sorted(members)[: max_size - (0 if alter_simplex else 1)]
            members = set(keep)
        if not alter_simplex:
            members.add(ego)
            with_ego += 1
        for a in list(active):
            if a in members:
                active[a] -= 1
                if active[a] <= 0:
                    del active[a]
        out.append(members)
    return out


def locality_dataset(
    n_egos: int,
    length_range: tuple[int, int] = (10, 20),
    seed: int = 0,
    name: str = "synthetic",
    **kwargs,
) -> tuple[SimplexDataset, list[int]]:
    """Disjoint locality ego blocks packed into one tie-free dataset.

    Returns the dataset and the ego node ids in generation order.
    """
    rng = np.random.default_rng(seed)
    records = []
    egos = []
    node = 0
    clock = 0
    lo, hi = length_range
    for _ in range(n_egos):
        m = int(rng.integers(lo, hi + 1))
        ego = node
        sets = locality_ego_sets(m, rng, ego=ego, first_alter=ego + 1, first_outsider=ego + 1 + 10 * m, **kwargs)
        for s in sets:
            records.append((sorted(s), clock))
            clock += 1
        node = max(max(s) for s in sets) + 1
        egos.append(ego)
    return from_records(records, name), egos


def random_dataset(rng: np.random.Generator, n_nodes: int = 50, n_simplices: int = 200,
                   max_size: int = 5, n_times: int | None = None) -> SimplexDataset:
    """Unstructured dataset with uniform random simplices (sizes 1..max_size).

    ``n_times`` < ``n_simplices`` forces timestamp ties.
    """
    n_times = n_times or n_simplices
    records = []
    for _ in range(n_simplices):
        k = int(rng.integers(1, max_size + 1))
        nodes = rng.choice(n_nodes, size=min(k, n_nodes), replace=False)
        records.append((nodes.tolist(), int(rng.integers(n_times))))
    return from_records(records, "random")


def run_concatenation_ego(n_alters: int, run_length: int, ego: int = 0) -> EgoNetwork:
    """Star ego-network where alter k appears in ``run_length`` consecutive simplices."""
    sets = [{ego, k} for k in range(1, n_alters + 1) for _ in range(run_length)]
    return ego_from_sets(sets, ego, EgoKind.STAR)
