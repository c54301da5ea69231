"""Structural measures of an ordered ego-network and the classifier features.

Every measure takes an *ordering*: an :class:`~hyperego.egonet.EgoNetwork`, a
sequence of :class:`~hyperego.simplices.Simplex`, or any sequence of node
collections.  Position ``k`` in the ordering (1-based) is its ordinal time.
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .egonet import AlterNetwork, EgoKind, EgoNetwork
from .simplices import Simplex

__all__ = [
    "UndefinedMeasureError",
    "FeatureVector",
    "FEATURE_NAMES",
    "feature_names",
    "avg_intersection_size",
    "intersection_density",
    "alter_spread",
    "avg_alter_spread",
    "thirds_spread",
    "novelty_profile",
    "first_subset_count",
    "last_superset_count",
    "user_arrival_time",
    "featurize",
    "PermutationFeaturizer",
    "random_permutation",
    "StatCurve",
    "aggregate_curves",
    "write_curves",
    "degree_arrival_table",
]


class UndefinedMeasureError(ValueError):
    pass


def _sets(ordering) -> list[frozenset[int]]:
    if isinstance(ordering, EgoNetwork):
        ordering = ordering.simplices
    out = []
    for s in ordering:
        out.append(s.node_set if isinstance(s, Simplex) else frozenset(s))
    return out


def _need_pairs(sets: Sequence) -> None:
    if len(sets) < 2:
        raise UndefinedMeasureError(f"measure needs at least 2 simplices, got {len(sets)}")


def avg_intersection_size(ordering) -> float:
    sets = _sets(ordering)
    _need_pairs(sets)
    return sum(len(a & b) for a, b in zip(sets, sets[1:])) / (len(sets) - 1)


def intersection_density(ordering) -> float:
    sets = _sets(ordering)
    _need_pairs(sets)
    mean_size = sum(map(len, sets)) / len(sets)
    return avg_intersection_size(sets) / mean_size


def alter_spread(an: AlterNetwork | Sequence[int]) -> float | None:
    """Mean gap between consecutive occurrences; None for a single occurrence."""
    ordinals = an.ordinals if isinstance(an, AlterNetwork) else tuple(an)
    if len(ordinals) < 2:
        return None
    return (ordinals[-1] - ordinals[0]) / (len(ordinals) - 1)


def _occurrences(sets: Sequence[frozenset[int]], ego: int | None) -> dict[int, list[int]]:
    occ: dict[int, list[int]] = defaultdict(list)
    for t, s in enumerate(sets, 1):
        for v in s:
            if v != ego:
                occ[v].append(t)
    return occ


def avg_alter_spread(ordering, ego: int | None = None) -> float:
    """Average spread over alters seen at least twice; ``m`` if there are none."""
    if isinstance(ordering, EgoNetwork) and ego is None:
        ego = ordering.ego
    sets = _sets(ordering)
    _need_pairs(sets)
    spreads = [alter_spread(ts) for ts in _occurrences(sets, ego).values() if len(ts) >= 2]
    if not spreads:
        return float(len(sets))
    return sum(spreads) / len(spreads)


def thirds_spread(an: AlterNetwork | Sequence[int]) -> tuple[float, float, float] | None:
    """Spread of each contiguous third of a large (size >= 10) alter-network.

    The first two thirds get ``size // 3`` occurrences, the last one the rest.
    Returns None for alter-networks that are too small.
    """
    ordinals = an.ordinals if isinstance(an, AlterNetwork) else tuple(an)
    n = len(ordinals)
    if n < 10:
        return None
    k = n // 3
    parts = (ordinals[:k], ordinals[k : 2 * k], ordinals[2 * k :])
    return tuple(alter_spread(p) for p in parts)


def novelty_profile(ordering) -> list[int]:
    seen: set[int] = set()
    out = []
    for s in _sets(ordering):
        out.append(len(s - seen))
        seen |= s
    return out


def first_subset_count(ordering) -> int:
    sets = _sets(ordering)
    _need_pairs(sets)
    return sum(sets[0] <= s for s in sets[1:])


def last_superset_count(ordering) -> int:
    sets = _sets(ordering)
    _need_pairs(sets)
    return sum(sets[-1] >= s for s in sets[:-1])


def user_arrival_time(ordering, u: int | None = None) -> int:
    if isinstance(ordering, EgoNetwork) and u is None:
        u = ordering.ego
    for t, s in enumerate(_sets(ordering), 1):
        if u in s:
            return t
    raise KeyError(f"node {u} does not occur in the ordering")


FEATURE_NAMES = (
    "length",
    "intersection_density",
    "avg_alter_spread",
    "first_subset_count",
    "last_superset_count",
    "user_arrival",
)


def feature_names(kind: EgoKind | str) -> tuple[str, ...]:
    return FEATURE_NAMES if EgoKind(kind) is not EgoKind.STAR else FEATURE_NAMES[:-1]


@dataclass(frozen=True)
class FeatureVector:
    length: int
    intersection_density: float
    avg_alter_spread: float
    first_subset_count: int
    last_superset_count: int
    user_arrival: int | None = None

    def to_array(self) -> np.ndarray:
        vals = [self.length, self.intersection_density, self.avg_alter_spread,
                self.first_subset_count, self.last_superset_count]
        if self.user_arrival is not None:
            vals.append(self.user_arrival)
        return np.asarray(vals, dtype=float)

    @property
    def names(self) -> tuple[str, ...]:
        return FEATURE_NAMES if self.user_arrival is not None else FEATURE_NAMES[:-1]


def featurize(ordering, kind: EgoKind | str | None = None, ego: int | None = None) -> FeatureVector:
    """Feature vector of ``ordering`` as presented (positions are ordinals)."""
    if isinstance(ordering, EgoNetwork):
        kind = ordering.kind if kind is None else kind
        ego = ordering.ego if ego is None else ego
    kind = EgoKind(kind)
    sets = _sets(ordering)
    _need_pairs(sets)
    arrival = None
    if kind is not EgoKind.STAR:
        arrival = user_arrival_time(sets, ego)
    return FeatureVector(
        length=len(sets),
        intersection_density=intersection_density(sets),
        avg_alter_spread=avg_alter_spread(sets, ego),
        first_subset_count=first_subset_count(sets),
        last_superset_count=last_superset_count(sets),
        user_arrival=arrival,
    )


class PermutationFeaturizer:
    """Vectorised :func:`featurize` for many reorderings of one simplex set.

    ``perms`` rows list base-simplex indices in presented order.  Results match
    :func:`featurize` on the reordered sets up to float round-off.
    """

    def __init__(self, ordering, kind: EgoKind | str | None = None, ego: int | None = None):
        if isinstance(ordering, EgoNetwork):
            kind = ordering.kind if kind is None else kind
            ego = ordering.ego if ego is None else ego
        self.kind = EgoKind(kind)
        self.ego = ego
        sets = _sets(ordering)
        _need_pairs(sets)
        self.sets = sets
        m = self.m = len(sets)

        self.isect = np.array([[len(a & b) for b in sets] for a in sets], dtype=np.int64)
        self.total_size = sum(map(len, sets))
        sub = np.array([[a <= b for b in sets] for a in sets], dtype=bool)
        np.fill_diagonal(sub, False)
        self.first_subsets = sub.sum(axis=1)
        self.last_supersets = sub.sum(axis=0)

        occ = _occurrences(sets, ego)
        repeated = sorted(v for v, ts in occ.items() if len(ts) >= 2)
        self.incidence = np.array([[v in s for v in repeated] for s in sets], dtype=bool).reshape(m, len(repeated))
        self.alter_counts = self.incidence.sum(axis=0)
        if self.kind is not EgoKind.STAR:
            has_ego = np.array([ego in s for s in sets])
            if not has_ego.any():
                raise KeyError(f"node {ego} does not occur in the ordering")
            self.has_ego = has_ego

    @property
    def dim(self) -> int:
        return 5 if self.kind is EgoKind.STAR else 6

    def __call__(self, perms) -> np.ndarray:
        perms = np.atleast_2d(np.asarray(perms, dtype=np.int64))
        b, m = perms.shape
        if m != self.m:
            raise ValueError(f"permutations have length {m}, expected {self.m}")
        out = np.empty((b, self.dim))
        out[:, 0] = m
        isum = self.isect[perms[:, :-1], perms[:, 1:]].sum(axis=1)
        out[:, 1] = (isum / (m - 1)) / (self.total_size / m)

        pos = np.empty_like(perms)
        rows = np.arange(b)[:, None]
        pos[rows, perms] = np.arange(1, m + 1)
        if self.incidence.shape[1]:
            big = m + 1
            masked = np.where(self.incidence[None, :, :], pos[:, :, None], big)
            first = masked.min(axis=1)
            masked = np.where(self.incidence[None, :, :], pos[:, :, None], 0)
            last = masked.max(axis=1)
            out[:, 2] = ((last - first) / (self.alter_counts - 1)).mean(axis=1)
        else:
            out[:, 2] = m
        out[:, 3] = self.first_subsets[perms[:, 0]]
        out[:, 4] = self.last_supersets[perms[:, -1]]
        if self.kind is not EgoKind.STAR:
            out[:, 5] = np.where(self.has_ego[None, :], pos, m + 1).min(axis=1)
        return out


def random_permutation(m: int, rng: np.random.Generator, exclude_identity: bool = True) -> np.ndarray:
    """Uniform permutation of ``range(m)``, redrawn while it is the identity."""
    if exclude_identity and m < 2:
        raise ValueError("a non-identity permutation needs m >= 2")
    ident = np.arange(m)
    while True:
        p = rng.permutation(m)
        if not exclude_identity or not np.array_equal(p, ident):
            return p


# ----------------------------------------------------------------------
# aggregation across egos
# ----------------------------------------------------------------------

_BY_ORDINAL = {"novelty", "size"}
MEASURES = ("intersection", "density", "spread", "arrival", "novelty", "size")
VARIANTS = ("ordered", "shuffled", "first20")


@dataclass
class StatCurve:
    measure: str
    variant: str
    x: list[int] = field(default_factory=list)
    y_mean: list[float] = field(default_factory=list)
    y_count: list[int] = field(default_factory=list)

    @property
    def x_label(self) -> str:
        return "ordinal" if self.measure in _BY_ORDINAL else "length"

    def rows(self):
        for x, y, n in zip(self.x, self.y_mean, self.y_count):
            yield {self.x_label: x, "variant": self.variant, "mean": y, "count": n}


def _first20(sets):
    return sets[: max(2, math.ceil(0.2 * len(sets)))]


def _ego_values(measure: str, sets, ego: int) -> list[tuple[int, float]]:
    m = len(sets)
    if measure == "intersection":
        return [(m, avg_intersection_size(sets))]
    if measure == "density":
        return [(m, intersection_density(sets))]
    if measure == "spread":
        return [(m, avg_alter_spread(sets, ego))]
    if measure == "arrival":
        return [(m, float(user_arrival_time(sets, ego)))]
    if measure == "novelty":
        # the first simplex is all-novel by definition and is left out
        return [(t, float(n)) for t, n in enumerate(novelty_profile(sets), 1) if t > 1]
    if measure == "size":
        return [(t, float(len(s))) for t, s in enumerate(sets, 1)]
    raise ValueError(f"unknown measure {measure!r}")


def aggregate_curves(
    egos: Iterable[EgoNetwork],
    measure: str,
    variants: Iterable[str] = ("ordered", "shuffled"),
    seed: int = 0,
) -> dict[str, StatCurve]:
    """Mean of ``measure`` per ego length (or per ordinal) for each variant.

    ``shuffled`` draws one seeded permutation per ego; ``first20`` evaluates the
    leading ceil(0.2 m) simplices (at least 2) of each ego.
    """
    egos = list(egos)
    if not egos:
        raise ValueError("no ego-networks to aggregate")
    variants = list(variants)
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    if "first20" in variants and measure not in ("intersection", "density", "spread"):
        raise ValueError(f"first20 variant is not defined for {measure!r}")

    rng = np.random.default_rng(seed)
    acc = {v: defaultdict(lambda: [0.0, 0]) for v in variants}
    for ego in egos:
        sets = _sets(ego)
        perm = random_permutation(len(sets), rng) if "shuffled" in variants else None
        for v in variants:
            if v == "ordered":
                view, key_len = sets, None
            elif v == "shuffled":
                view, key_len = [sets[i] for i in perm], None
            else:
                view, key_len = _first20(sets), len(sets)
            for x, y in _ego_values(measure, view, ego.ego):
                cell = acc[v][key_len if key_len is not None else x]
                cell[0] += y
                cell[1] += 1

    curves = {}
    for v in variants:
        c = StatCurve(measure, v)
        for x in sorted(acc[v]):
            total, n = acc[v][x]
            c.x.append(x)
            c.y_mean.append(total / n)
            c.y_count.append(n)
        curves[v] = c
    return curves


def write_curves(curves: Iterable[StatCurve], path, fmt: str = "csv") -> None:
    curves = list(curves)
    rows = [r for c in curves for r in c.rows()]
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump([asdict(c) for c in curves], fh, indent=1)
            fh.write("\n")
        return
    x_label = curves[0].x_label if curves else "length"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=[x_label, "variant", "mean", "count"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def degree_arrival_table(egos: Iterable[EgoNetwork], degrees: dict[int, int] | None = None) -> list[dict]:
    """Descriptive only: mean normalized first-arrival ordinal per degree bucket.

    Buckets are powers of two of the alter's degree (dataset degree when
    ``degrees`` is given, else its alter-network size).
    """
    acc: dict[int, list[float]] = defaultdict(lambda: [0.0, 0])
    for ego in egos:
        m = len(ego)
        if m < 2:
            continue
        occ = _occurrences(_sets(ego), ego.ego)
        for a, ts in occ.items():
            deg = degrees.get(a, len(ts)) if degrees else len(ts)
            bucket = 1 << (max(deg, 1).bit_length() - 1)
            cell = acc[bucket]
            cell[0] += (ts[0] - 1) / (m - 1)
            cell[1] += 1
    return [{"degree_bucket": b, "mean_arrival": s / n, "count": n} for b, (s, n) in sorted(acc.items())]
