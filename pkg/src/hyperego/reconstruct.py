"""Temporal reconstruction of shuffled ego-networks by swap hill climbing.

Orderings are index permutations into an ego-network's simplices, which are
stored in true arrival order; the search itself only ever sees model scores.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import binomtest

from .classifier import OrderingModel
from .egonet import EgoNetwork
from .features import PermutationFeaturizer, feature_names
from .simplices import Simplex

logger = logging.getLogger(__name__)

__all__ = [
    "Ordering",
    "SearchConfig",
    "SearchTrace",
    "TIE_POLICIES",
    "pairwise_order_accuracy",
    "order_accuracy",
    "hill_climb",
    "baseline_random",
    "baseline_size_sort",
    "ReconstructionReport",
    "evaluate_reconstruction",
]

TIE_POLICIES = ("exclude", "ordinal")


@dataclass(frozen=True)
class Ordering:
    """``permutation[k]`` is the true-order index of the simplex shown at position k."""

    ego: EgoNetwork
    permutation: tuple[int, ...]
    score: float | None = None

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.ego))):
            raise ValueError("permutation is not a bijection onto the ego-network's simplices")

    @classmethod
    def identity(cls, ego: EgoNetwork) -> "Ordering":
        return cls(ego, tuple(range(len(ego))))

    @property
    def simplices(self) -> list[Simplex]:
        return [self.ego.simplices[i] for i in self.permutation]

    def __len__(self):
        return len(self.permutation)

    def reversed(self) -> "Ordering":
        return Ordering(self.ego, self.permutation[::-1])


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 10
    seed: int = 0
    max_steps_per_restart: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    def step_cap(self, m: int) -> int:
        if self.max_steps_per_restart is not None:
            return self.max_steps_per_restart
        return 10 * math.comb(m, 2)


@dataclass
class SearchTrace:
    steps: list[int] = field(default_factory=list)
    scores: list[list[float]] = field(default_factory=list)
    finals: list[tuple[int, ...]] = field(default_factory=list)
    truncated: list[bool] = field(default_factory=list)
    best_restart: int = 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["finals"] = [list(map(int, f)) for f in self.finals]
        return d


# ----------------------------------------------------------------------
# metric
# ----------------------------------------------------------------------

def order_accuracy(perm: Sequence[int], times: Sequence[int] | None = None, tie_policy: str = "exclude") -> float:
    """Fraction of position pairs whose true-order indices are increasing.

    ``times`` are the real timestamps in true order; with ``tie_policy`` set to
    ``"exclude"`` pairs with equal timestamps are left out entirely, with
    ``"ordinal"`` they are judged by ordinal (file) order.  NaN if no pair counts.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
    p = np.asarray(perm)
    m = len(p)
    if m < 2:
        raise ValueError("accuracy needs at least 2 simplices")
    iu, ju = np.triu_indices(m, 1)
    correct = p[iu] < p[ju]
    if tie_policy == "exclude" and times is not None:
        t = np.asarray(times)
        keep = t[p[iu]] != t[p[ju]]
        total = int(keep.sum())
        return float(correct[keep].sum() / total) if total else float("nan")
    return float(correct.mean())


def _positions(predicted, truth) -> tuple[list[int], list[int]]:
    if isinstance(predicted, Ordering) and isinstance(truth, Ordering) and predicted.ego is truth.ego:
        where = {j: k for k, j in enumerate(truth.permutation)}
        times = [s.real_time for s in truth.simplices]
        return [where[j] for j in predicted.permutation], times
    pred = predicted.simplices if isinstance(predicted, Ordering) else list(predicted)
    true = truth.simplices if isinstance(truth, Ordering) else list(truth)
    if Counter(pred) != Counter(true):
        raise ValueError("predicted and true orderings hold different simplices")
    slots: dict[Simplex, list[int]] = {}
    for k, s in enumerate(true):
        slots.setdefault(s, []).append(k)
    perm = [slots[s].pop(0) for s in pred]
    return perm, [s.real_time for s in true]


def pairwise_order_accuracy(predicted, truth, tie_policy: str = "exclude") -> float:
    perm, times = _positions(predicted, truth)
    return order_accuracy(perm, times, tie_policy)


# ----------------------------------------------------------------------
# search
# ----------------------------------------------------------------------

Scorer = Callable[[np.ndarray], np.ndarray]


def _scorer(ego: EgoNetwork, model) -> Scorer:
    if isinstance(model, OrderingModel):
        featurizer = PermutationFeaturizer(ego)
        have = feature_names(ego.kind)
        missing = [n for n in model.feature_names if n not in have]
        if missing:
            raise ValueError(f"{ego.kind} ego-networks do not provide model inputs {missing}")
        cols = [have.index(n) for n in model.feature_names]
        return lambda perms: model.predict_proba(featurizer(perms)[:, cols])
    return model


def _swap_pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, 1)


def hill_climb(start, model, cfg: SearchConfig = SearchConfig()) -> tuple[Ordering, SearchTrace]:
    """Random-restart hill climbing over single swaps.

    Each restart shuffles ``start`` uniformly, then repeatedly moves to a random
    neighbour (any two positions swapped) whose score is strictly higher, until
    none is.  The best local optimum over all restarts is returned; ties go to
    the earliest restart.

    ``model`` is an :class:`OrderingModel` or any callable mapping an array of
    permutations (rows of true-order indices) to scores.
    """
    if isinstance(start, EgoNetwork):
        start = Ordering.identity(start)
    ego = start.ego
    m = len(ego)
    if m < 2:
        raise ValueError("hill climbing needs at least 2 simplices")
    score = _scorer(ego, model)
    rng = np.random.default_rng(cfg.seed)
    base = np.asarray(start.permutation)
    ii, jj = _swap_pairs(m)
    rows = np.arange(len(ii))
    cap = cfg.step_cap(m)

    trace = SearchTrace()
    best_perm, best_score = None, -np.inf
    for r in range(cfg.restarts):
        pi = base[rng.permutation(m)]
        cur = float(score(pi[None, :])[0])
        traj = [cur]
        truncated = False
        while True:
            nbrs = np.repeat(pi[None, :], len(ii), axis=0)
            nbrs[rows, ii] = pi[jj]
            nbrs[rows, jj] = pi[ii]
            s = np.asarray(score(nbrs), dtype=float)
            up = np.flatnonzero(s > cur)
            if not len(up):
                break
            if len(traj) - 1 >= cap:
                truncated = True
                logger.warning("restart %d hit the %d-step cap", r, cap)
                break
            k = up[rng.integers(len(up))]
            pi, cur = nbrs[k], float(s[k])
            traj.append(cur)
        trace.steps.append(len(traj) - 1)
        trace.scores.append(traj)
        trace.finals.append(tuple(int(v) for v in pi))
        trace.truncated.append(truncated)
        if cur > best_score:
            best_perm, best_score = pi, cur
            trace.best_restart = r
    return Ordering(ego, tuple(int(v) for v in best_perm), best_score), trace


def baseline_random(ego: EgoNetwork, seed=None) -> Ordering:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Ordering(ego, tuple(int(v) for v in rng.permutation(len(ego))))


def baseline_size_sort(ordering) -> Ordering:
    """Stable ascending sort by simplex size of the presented ordering."""
    if isinstance(ordering, EgoNetwork):
        ordering = Ordering.identity(ordering)
    sizes = [len(ordering.ego.simplices[i]) for i in ordering.permutation]
    order = sorted(range(len(sizes)), key=sizes.__getitem__)
    return Ordering(ordering.ego, tuple(ordering.permutation[k] for k in order))


# ----------------------------------------------------------------------
# evaluation protocol
# ----------------------------------------------------------------------

METHODS = ("hill_climb", "random", "size_sort")


@dataclass
class ReconstructionReport:
    rows: list[dict]
    traces: dict[int, dict] = field(default_factory=dict, repr=False)

    def accuracies(self, method: str) -> np.ndarray:
        return np.array([r["accuracy"] for r in self.rows if r["method"] == method])

    def summary(self) -> dict[str, tuple[float, float]]:
        return {m: (float(np.nanmean(a)), float(np.nanstd(a))) for m in METHODS if len(a := self.accuracies(m))}

    def sign_test(self, method: str = "hill_climb", baseline: str = "random") -> tuple[int, int, float]:
        """Wins, losses and one-sided sign-test p-value of ``method`` over ``baseline``."""
        diff = self.accuracies(method) - self.accuracies(baseline)
        diff = diff[~np.isnan(diff)]
        wins, losses = int((diff > 0).sum()), int((diff < 0).sum())
        if wins + losses == 0:
            return 0, 0, 1.0
        return wins, losses, float(binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue)

    def write_csv(self, path, timing: bool = True) -> None:
        cols = ["ego", "kind", "method", "accuracy", "steps", "seconds"]
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in self.rows:
                r = dict(r)
                r["accuracy"] = repr(r["accuracy"])
                r["seconds"] = f"{r['seconds']:.4f}" if timing else ""
                w.writerow(r)

    def write_traces(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for ego, tr in self.traces.items():
            (directory / f"trace-{ego}.json").write_text(json.dumps(tr) + "\n")


def _evaluate_one(args):
    ego, model, cfg, tie_policy, seed = args
    present_rng, search_seed, random_rng = (np.random.default_rng(s) for s in seed.spawn(3))
    times = [s.real_time for s in ego.simplices]
    presented = Ordering(ego, tuple(int(v) for v in present_rng.permutation(len(ego))))

    t0 = time.perf_counter()
    search_cfg = SearchConfig(cfg.restarts, int(search_seed.integers(2**63)), cfg.max_steps_per_restart)
    found, trace = hill_climb(presented, model, search_cfg)
    hc_secs = time.perf_counter() - t0

    rows = []
    base = {"ego": ego.ego, "kind": str(ego.kind)}
    rows.append({**base, "method": "hill_climb", "accuracy": order_accuracy(found.permutation, times, tie_policy),
                 "steps": sum(trace.steps), "seconds": hc_secs})
    for method, fn in (("random", lambda: baseline_random(ego, random_rng)),
                       ("size_sort", lambda: baseline_size_sort(presented))):
        t0 = time.perf_counter()
        o = fn()
        rows.append({**base, "method": method, "accuracy": order_accuracy(o.permutation, times, tie_policy),
                     "steps": 0, "seconds": time.perf_counter() - t0})
    return rows, trace.to_json()


def evaluate_reconstruction(
    egos: Iterable[EgoNetwork],
    model,
    cfg: SearchConfig = SearchConfig(),
    tie_policy: str = "exclude",
    jobs: int = 1,
) -> ReconstructionReport:
    """Hill climbing and both baselines on each ego, from a seeded shuffle.

    Per-ego randomness is spawned from ``cfg.seed`` so results do not depend on
    ``jobs``.
    """
    egos = list(egos)
    if not egos:
        raise ValueError("no ego-networks to reconstruct")
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(egos))
    tasks = [(ego, model, cfg, tie_policy, s) for ego, s in zip(egos, seeds)]
    if jobs == 1:
        results = list(map(_evaluate_one, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, tasks, chunksize=4))
    report = ReconstructionReport([])
    for ego, (rows, trace) in zip(egos, results):
        report.rows.extend(rows)
        report.traces[ego.ego] = trace
    return report
