"""Star, radial and contracted ego-networks around a user node."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .simplices import Simplex, SimplexDataset

__all__ = [
    "EgoKind",
    "EgoNetwork",
    "AlterNetwork",
    "EligibilityConfig",
    "Eligibility",
    "UnknownEgoError",
    "ELIGIBILITY_PRESETS",
    "alters",
    "extract_ego",
    "alter_network",
    "alter_networks",
    "is_eligible",
    "eligible_egos",
    "write_egos",
    "read_egos",
    "ego_from_sets",
]


class EgoKind(str, Enum):
    STAR = "star"
    RADIAL = "radial"
    CONTRACTED = "contracted"

    def __str__(self):
        return self.value


class UnknownEgoError(KeyError):
    pass


@dataclass(frozen=True)
class EgoNetwork:
    ego: int
    kind: EgoKind
    simplices: tuple[Simplex, ...]
    alters: frozenset[int]

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def length(self) -> int:
        return len(self.simplices)

    def node_sets(self) -> list[frozenset[int]]:
        return [s.node_set for s in self.simplices]


@dataclass(frozen=True)
class AlterNetwork:
    alter: int
    ordinals: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ordinals)


@dataclass(frozen=True)
class EligibilityConfig:
    min_length: int = 1
    min_alters: int = 0
    majority_identical_filter: bool = False
    max_length: int | None = None

    def __post_init__(self):
        if self.min_length < 1:
            raise ValueError("min_length must be >= 1")
        if self.min_alters < 0:
            raise ValueError("min_alters must be >= 0")


# email-style datasets are exempt from the alter-count gate
ELIGIBILITY_PRESETS = {
    "coauth": EligibilityConfig(min_length=20, min_alters=10, majority_identical_filter=True),
    "email": EligibilityConfig(min_length=10, min_alters=0, majority_identical_filter=True),
    "threads": EligibilityConfig(min_length=10, min_alters=10, majority_identical_filter=True),
}


class Eligibility(NamedTuple):
    ok: bool
    reason: str

    def __bool__(self):
        return self.ok


def _star_positions(dataset: SimplexDataset, u: int) -> list[int]:
    pos = [i for i in dataset.incidence.get(u, ()) if not dataset.simplices[i].is_trivial()]
    if not pos:
        raise UnknownEgoError(u)
    return pos


def alters(dataset: SimplexDataset, u: int) -> set[int]:
    """Nodes other than ``u`` that share a non-trivial simplex with it."""
    out: set[int] = set()
    for i in _star_positions(dataset, u):
        out.update(dataset.simplices[i].nodes)
    out.discard(u)
    return out


def extract_ego(dataset: SimplexDataset, u: int, kind: EgoKind | str) -> EgoNetwork:
    kind = EgoKind(kind)
    star = _star_positions(dataset, u)
    alter_set = set()
    for i in star:
        alter_set.update(dataset.simplices[i].nodes)
    alter_set.discard(u)
    members = alter_set | {u}

    if kind is EgoKind.STAR:
        chosen = [dataset.simplices[i] for i in star]
    else:
        candidates = sorted({i for v in members for i in dataset.incidence[v]})
        chosen = []
        for i in candidates:
            s = dataset.simplices[i]
            if kind is EgoKind.RADIAL:
                if len(s) >= 2 and members.issuperset(s.nodes):
                    chosen.append(s)
            else:
                kept = tuple(v for v in s.nodes if v in members)
                if len(kept) >= 2:
                    chosen.append(s if len(kept) == len(s) else Simplex(kept, s.real_time, s.source_index))

    simplices = tuple(s.at_ordinal(t) for t, s in enumerate(chosen, 1))
    return EgoNetwork(u, kind, simplices, frozenset(alter_set))


def alter_network(ego: EgoNetwork, a: int) -> AlterNetwork:
    if a not in ego.alters:
        raise KeyError(f"{a} is not an alter of {ego.ego}")
    ordinals = tuple(t for t, s in enumerate(ego.simplices, 1) if a in s.nodes)
    if not ordinals:
        raise KeyError(f"alter {a} does not occur in this {ego.kind} ego-network")
    return AlterNetwork(a, ordinals)


def alter_networks(ego: EgoNetwork) -> dict[int, AlterNetwork]:
    """All alter-networks of ``ego`` keyed by alter, in one pass."""
    acc: dict[int, list[int]] = {}
    for t, s in enumerate(ego.simplices, 1):
        for v in s.nodes:
            if v != ego.ego:
                acc.setdefault(v, []).append(t)
    return {a: AlterNetwork(a, tuple(ts)) for a, ts in sorted(acc.items())}


def is_eligible(ego: EgoNetwork, cfg: EligibilityConfig) -> Eligibility:
    m = len(ego)
    if m < cfg.min_length:
        return Eligibility(False, "length")
    if cfg.max_length is not None and m > cfg.max_length:
        return Eligibility(False, "length")
    if len(ego.alters) < cfg.min_alters:
        return Eligibility(False, "alters")
    if cfg.majority_identical_filter and m:
        modal = Counter(s.nodes for s in ego.simplices).most_common(1)[0][1]
        if modal > m / 2:
            return Eligibility(False, "majority-identical")
    return Eligibility(True, "ok")


def eligible_egos(
    dataset: SimplexDataset,
    kind: EgoKind | str,
    cfg: EligibilityConfig,
    candidates: Iterable[int] | None = None,
) -> Iterator[EgoNetwork]:
    """Yield eligible ego-networks in ascending ego order (or candidate order).

    Star length equals the non-trivial degree, so candidates whose degree is
    below ``min_length`` are skipped cheaply for star egos.
    """
    kind = EgoKind(kind)
    if candidates is None:
        candidates = sorted(dataset.incidence)
    for u in candidates:
        if kind is EgoKind.STAR and dataset.degree_index.get(u, 0) < cfg.min_length:
            continue
        try:
            ego = extract_ego(dataset, u, kind)
        except UnknownEgoError:
            continue
        if is_eligible(ego, cfg):
            yield ego


def write_egos(egos: Iterable[EgoNetwork], path) -> None:
    """Line format: ``ego kind m`` header, then ``ordinal real_time nodes...``."""
    with open(path, "w") as fh:
        for ego in egos:
            fh.write(f"{ego.ego} {ego.kind} {len(ego)}\n")
            for t, s in enumerate(ego.simplices, 1):
                fh.write(f"{t} {s.real_time} {' '.join(map(str, s.nodes))}\n")


def read_egos(path) -> list[EgoNetwork]:
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    egos = []
    i = 0
    while i < len(lines):
        head = lines[i]
        if len(head) != 3:
            raise ValueError(f"{path}:{i + 1}: expected 'ego kind m' header")
        u, kind, m = int(head[0]), EgoKind(head[1]), int(head[2])
        simplices = []
        for j in range(m):
            row = lines[i + 1 + j]
            t, rt, nodes = int(row[0]), int(row[1]), tuple(map(int, row[2:]))
            simplices.append(Simplex(nodes, rt, j, t))
        alter_set = {v for s in simplices if u in s.nodes for v in s.nodes} - {u}
        egos.append(EgoNetwork(u, kind, tuple(simplices), frozenset(alter_set)))
        i += 1 + m
    return egos


def ego_from_sets(sets: Sequence[Iterable[int]], ego: int, kind: EgoKind | str = EgoKind.STAR) -> EgoNetwork:
    """Wrap an explicit ordering of node sets as an ego-network (times 1..m)."""
    simplices = tuple(Simplex(tuple(s), t, t - 1, t) for t, s in enumerate(sets, 1))
    alter_set = {v for s in simplices if ego in s.nodes for v in s.nodes} - {ego}
    return EgoNetwork(ego, EgoKind(kind), simplices, frozenset(alter_set))
