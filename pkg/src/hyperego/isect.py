"""Local search for average intersection size and its approximation guarantee.

For an ordering of m simplices the objective is the mean of the m-1 adjacent
intersection sizes.  Any swap-local optimum is within a factor ``2 c^2 d`` of
the best ordering, where ``c`` is the largest simplex size and ``d`` the most
simplices any one node belongs to (after :func:`preprocess`).  This module
checks that bound exhaustively on small instances.

All comparisons are exact: objectives are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import csv
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Instance",
    "TooLargeError",
    "preprocess",
    "total_intersection",
    "avg_isect_objective",
    "swap_local_search",
    "brute_force_optimum",
    "local_optima_values",
    "RatioReport",
    "theorem_ratio_check",
    "small_instances",
    "sweep",
    "write_sweep",
]

BRUTE_FORCE_CAP = 8
LOCAL_OPTIMA_CAP = 6


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    simplices: tuple[frozenset[int], ...]

    @property
    def m(self) -> int:
        return len(self.simplices)

    @property
    def c(self) -> int:
        return max(map(len, self.simplices), default=0)

    @property
    def d(self) -> int:
        counts = Counter(v for s in self.simplices for v in s)
        return max(counts.values(), default=0)

    @property
    def bound(self) -> Fraction | None:
        if not self.simplices:
            return None
        return Fraction(1, 2 * self.c**2 * self.d)


def preprocess(raw: Iterable[Iterable[int]]) -> Instance:
    """Drop nodes seen in at most one simplex, then empty simplices, to a fixed point."""
    sets = [frozenset(s) for s in raw]
    while True:
        counts = Counter(v for s in sets for v in s)
        nxt = [s2 for s in sets if (s2 := frozenset(v for v in s if counts[v] >= 2))]
        if nxt == sets:
            return Instance(tuple(sets))
        sets = nxt


def _sets(ordering) -> list[frozenset[int]]:
    if isinstance(ordering, Instance):
        return list(ordering.simplices)
    return [frozenset(s) for s in ordering]


def total_intersection(ordering) -> int:
    sets = _sets(ordering)
    return sum(len(a & b) for a, b in zip(sets, sets[1:]))


def avg_isect_objective(ordering) -> Fraction:
    sets = _sets(ordering)
    if len(sets) < 2:
        raise ValueError("objective needs at least 2 simplices")
    return Fraction(total_intersection(sets), len(sets) - 1)


def _isect_matrix(sets: Sequence[frozenset[int]]) -> np.ndarray:
    return np.array([[len(a & b) for b in sets] for a in sets], dtype=np.int64)


def swap_local_search(instance, start: Sequence[int] | None = None, seed=None) -> list[int]:
    """Apply random strictly-improving swaps until none is left.

    ``start`` is a permutation of simplex indices (identity if omitted); the
    returned list is a locally optimal permutation of those indices.
    """
    sets = _sets(instance)
    m = len(sets)
    if m < 2:
        raise ValueError("local search needs at least 2 simplices")
    K = _isect_matrix(sets)
    rng = np.random.default_rng(seed)
    pi = np.array(range(m) if start is None else start)
    ii, jj = np.triu_indices(m, 1)
    rows = np.arange(len(ii))
    cur = int(K[pi[:-1], pi[1:]].sum())
    while True:
        nbrs = np.repeat(pi[None, :], len(ii), axis=0)
        nbrs[rows, ii] = pi[jj]
        nbrs[rows, jj] = pi[ii]
        vals = K[nbrs[:, :-1], nbrs[:, 1:]].sum(axis=1)
        up = np.flatnonzero(vals > cur)
        if not len(up):
            return [int(v) for v in pi]
        k = up[rng.integers(len(up))]
        pi, cur = nbrs[k], int(vals[k])


def _all_perms(m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m))), dtype=np.int64).reshape(-1, m)


def brute_force_optimum(instance, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Exact maximum of the objective over all orderings.

    An ordering and its reverse score the same, so only permutations whose
    first index is below the last are scored.
    """
    sets = _sets(instance)
    m = len(sets)
    if m < 2:
        raise ValueError("objective needs at least 2 simplices")
    if m > cap:
        raise TooLargeError(f"{m} simplices exceeds the brute-force cap of {cap}")
    K = _isect_matrix(sets)
    best = 0
    for p in itertools.permutations(range(m)):
        if p[0] > p[-1]:
            continue
        best = max(best, sum(K[a, b] for a, b in zip(p, p[1:])))
    return Fraction(int(best), m - 1)


def local_optima_values(instance, cap: int = LOCAL_OPTIMA_CAP) -> list[Fraction]:
    """Objective of every swap-local optimum.

    Every ordering is the start of some descent, and a local optimum is exactly
    an ordering with no strictly improving swap, so scanning all m! orderings
    finds the full set that any improving path can end in.
    """
    sets = _sets(instance)
    m = len(sets)
    if m < 2:
        raise ValueError("objective needs at least 2 simplices")
    if m > cap:
        raise TooLargeError(f"{m} simplices exceeds the enumeration cap of {cap}")
    K = _isect_matrix(sets)
    P = _all_perms(m)
    vals = K[P[:, :-1], P[:, 1:]].sum(axis=1)
    ii, jj = np.triu_indices(m, 1)
    N = np.repeat(P[:, None, :], len(ii), axis=1)
    r = np.arange(len(ii))
    N[:, r, ii] = P[:, jj]
    N[:, r, jj] = P[:, ii]
    nvals = K[N[..., :-1], N[..., 1:]].sum(axis=2)
    local = ~(nvals > vals[:, None]).any(axis=1)
    return [Fraction(int(v), m - 1) for v in vals[local]]


@dataclass(frozen=True)
class RatioReport:
    m: int
    c: int
    d: int
    bound: Fraction | None
    worst_local: Fraction | None
    optimum: Fraction | None
    n_local_optima: int
    holds: bool
    intermediate_holds: bool

    @property
    def ratio(self) -> Fraction | None:
        if self.optimum is None or self.optimum == 0:
            return None
        return self.worst_local / self.optimum


def theorem_ratio_check(instance, cap: int = LOCAL_OPTIMA_CAP) -> RatioReport:
    """Check worst local optimum >= optimum / (2 c^2 d) on ``instance``.

    ``instance`` is preprocessed first if it is not already an
    :class:`Instance`.  Instances with fewer than two simplices hold vacuously.
    The proof's intermediate bound (worst local optimum >= 1/(2 c d) when the
    optimum is positive) is reported alongside.
    """
    inst = instance if isinstance(instance, Instance) else preprocess(instance)
    if inst.m < 2:
        return RatioReport(inst.m, inst.c, inst.d, inst.bound, None, None, 0, True, True)
    values = local_optima_values(inst, cap)
    worst = min(values)
    optimum = brute_force_optimum(inst)
    bound = inst.bound
    holds = worst >= optimum * bound
    inter = optimum == 0 or worst >= Fraction(1, 2 * inst.c * inst.d)
    return RatioReport(inst.m, inst.c, inst.d, bound, worst, optimum, len(values), holds, inter)


def _canonical(sets: Sequence[frozenset[int]], universe: int) -> tuple[tuple[int, ...], ...]:
    best = None
    for relabel in itertools.permutations(range(universe)):
        key = tuple(sorted(tuple(sorted(relabel[v] for v in s)) for s in sets))
        if best is None or key < best:
            best = key
    return best


def small_instances(max_m: int = 5, universe: int = 4) -> Iterator[Instance]:
    """Every preprocessed instance with at most ``max_m`` simplices over
    ``universe`` nodes, once per relabeling class and with at least 2 simplices.
    """
    subsets = [frozenset(c) for k in range(1, universe + 1) for c in itertools.combinations(range(universe), k)]
    seen = set()
    for m in range(1, max_m + 1):
        for combo in itertools.combinations_with_replacement(subsets, m):
            inst = preprocess(combo)
            if inst.m < 2:
                continue
            key = _canonical(inst.simplices, universe)
            if key in seen:
                continue
            seen.add(key)
            yield Instance(tuple(frozenset(s) for s in key))


def sweep(instances: Iterable[Instance]) -> list[tuple[int, RatioReport]]:
    return [(i, theorem_ratio_check(inst)) for i, inst in enumerate(instances)]


def _fmt(x) -> str:
    return "" if x is None else str(x)


def write_sweep(results: Iterable[tuple[int, RatioReport]], path) -> None:
    cols = ["instance_id", "m", "c", "d", "bound", "worst_local", "optimum", "holds"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for i, r in results:
            w.writerow([i, r.m, r.c, r.d, _fmt(r.bound), _fmt(r.worst_local), _fmt(r.optimum), int(r.holds)])
