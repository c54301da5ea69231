"""Timestamped simplex datasets and the three-file text format.

A dataset named ``coauth`` lives on disk as three newline-delimited integer
files: ``coauth-nverts.txt`` (simplex sizes), ``coauth-simplices.txt`` (node
ids, concatenated in simplex order) and ``coauth-times.txt`` (timestamps).
"""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "Simplex",
    "SimplexDataset",
    "DatasetError",
    "DatasetParseError",
    "DatasetStructureError",
    "EmptyDatasetError",
    "from_records",
    "load_dataset",
    "load_prefix",
    "write_dataset",
    "filter_trivial",
    "assign_ordinal_times",
]


class DatasetError(ValueError):
    """Base class for ingestion failures."""


class DatasetParseError(DatasetError):
    def __init__(self, path, line: int, text: str):
        self.path, self.line, self.text = str(path), line, text
        super().__init__(f"{path}:{line}: not an integer: {text!r}")


class DatasetStructureError(DatasetError):
    def __init__(self, message: str, left: int, right: int):
        self.left, self.right = left, right
        super().__init__(f"{message} ({left} != {right})")


class EmptyDatasetError(DatasetError):
    pass


@dataclass(frozen=True)
class Simplex:
    """A set of nodes that interacted at one moment.

    ``nodes`` is stored as a sorted tuple so that simplices hash and compare by
    content; identical node sets at different times remain distinct events
    because ``real_time``/``source_index`` differ.
    """

    nodes: tuple[int, ...]
    real_time: int = 0
    source_index: int = 0
    ordinal_time: int | None = None

    def __post_init__(self):
        canon = tuple(sorted(set(self.nodes)))
        if canon != self.nodes:
            object.__setattr__(self, "nodes", canon)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.nodes)

    def is_trivial(self) -> bool:
        return len(self.nodes) < 2

    def __contains__(self, node: int) -> bool:
        return node in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def at_ordinal(self, t: int) -> "Simplex":
        """Copy carrying ordinal time ``t``; skips re-validating the node tuple."""
        out = object.__new__(Simplex)
        out.__dict__.update(nodes=self.nodes, real_time=self.real_time,
                            source_index=self.source_index, ordinal_time=t)
        return out


@dataclass(frozen=True)
class SimplexDataset:
    name: str
    simplices: tuple[Simplex, ...]
    degree_index: dict[int, int] = field(default_factory=dict, compare=False)
    duplicate_nodes_dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.degree_index and self.simplices:
            object.__setattr__(self, "degree_index", _degrees(self.simplices))

    @property
    def node_count(self) -> int:
        return len(self.degree_index)

    @property
    def nodes(self) -> set[int]:
        return set(self.degree_index)

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    @cached_property
    def incidence(self) -> dict[int, list[int]]:
        """node -> positions of the simplices containing it."""
        inc: dict[int, list[int]] = defaultdict(list)
        for i, s in enumerate(self.simplices):
            for v in s.nodes:
                inc[v].append(i)
        return dict(inc)

    def trivial_count(self) -> int:
        return sum(s.is_trivial() for s in self.simplices)

    def time_range(self) -> tuple[int, int] | None:
        if not self.simplices:
            return None
        return self.simplices[0].real_time, self.simplices[-1].real_time


def _degrees(simplices: Iterable[Simplex]) -> dict[int, int]:
    deg: Counter[int] = Counter()
    for s in simplices:
        deg.update(s.nodes)
    return dict(deg)


def _read_ints(path: Path) -> list[int]:
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.strip()
            if not text:
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise DatasetParseError(path, lineno, text) from None
    return values


def from_records(
    records: Iterable[tuple[Iterable[int], int]], name: str = "dataset"
) -> SimplexDataset:
    """Build a dataset from ``(nodes, time)`` pairs given in file order."""
    simplices = []
    dropped = 0
    for idx, (nodes, t) in enumerate(records):
        nodes = list(nodes)
        if not nodes:
            raise DatasetError(f"simplex {idx} is empty")
        if any(v < 0 for v in nodes):
            raise DatasetError(f"simplex {idx} has a negative node id")
        dropped += len(nodes) - len(set(nodes))
        simplices.append(Simplex(tuple(nodes), int(t), idx))
    if dropped:
        logger.warning("%s: collapsed %d duplicate node ids", name, dropped)
    simplices.sort(key=lambda s: (s.real_time, s.source_index))
    return SimplexDataset(name, tuple(simplices), duplicate_nodes_dropped=dropped)


def load_dataset(nverts_path, simplices_path, times_path, name: str | None = None) -> SimplexDataset:
    nverts_path, simplices_path, times_path = map(Path, (nverts_path, simplices_path, times_path))
    nverts = _read_ints(nverts_path)
    nodes = _read_ints(simplices_path)
    times = _read_ints(times_path)
    if not nverts and not nodes and not times:
        raise EmptyDatasetError(f"dataset {name or nverts_path.stem} is empty")
    if len(nverts) != len(times):
        raise DatasetStructureError("nverts and times line counts differ", len(nverts), len(times))
    if sum(nverts) != len(nodes):
        raise DatasetStructureError("sum of nverts differs from simplices line count", sum(nverts), len(nodes))
    if any(k < 1 for k in nverts):
        raise DatasetError(f"{nverts_path}: simplex sizes must be positive")

    records = []
    pos = 0
    for k, t in zip(nverts, times):
        records.append((nodes[pos : pos + k], t))
        pos += k
    if name is None:
        name = nverts_path.name.removesuffix("-nverts.txt")
    return from_records(records, name)


def _prefix_paths(prefix) -> tuple[Path, Path, Path]:
    prefix = str(prefix)
    return (Path(prefix + "-nverts.txt"), Path(prefix + "-simplices.txt"), Path(prefix + "-times.txt"))


def load_prefix(prefix) -> SimplexDataset:
    """Load ``<prefix>-nverts.txt`` and its two siblings."""
    return load_dataset(*_prefix_paths(prefix), name=Path(str(prefix)).name)


def write_dataset(dataset: SimplexDataset, prefix) -> tuple[Path, Path, Path]:
    paths = _prefix_paths(prefix)
    paths[0].parent.mkdir(parents=True, exist_ok=True)
    with open(paths[0], "w") as fn, open(paths[1], "w") as fs, open(paths[2], "w") as ft:
        for s in dataset.simplices:
            fn.write(f"{s.size}\n")
            fs.writelines(f"{v}\n" for v in s.nodes)
            ft.write(f"{s.real_time}\n")
    return paths


def filter_trivial(dataset: SimplexDataset) -> SimplexDataset:
    kept = tuple(s for s in dataset.simplices if not s.is_trivial())
    return SimplexDataset(dataset.name, kept, duplicate_nodes_dropped=dataset.duplicate_nodes_dropped)


def assign_ordinal_times(simplices: Sequence[Simplex]) -> list[Simplex]:
    """Number simplices 1..m in arrival order; equal timestamps keep file order."""
    keys = [(s.real_time, s.source_index) for s in simplices]
    if any(a > b for a, b in zip(keys, keys[1:])):
        raise ValueError("simplices must be sorted by (real_time, source_index)")
    return [replace(s, ordinal_time=i) for i, s in enumerate(simplices, 1)]
