"""Correctly-ordered vs shuffled classifier for ego-networks.

A small fully connected network (ReLU hidden layers, sigmoid output, binary
cross-entropy) trained with minibatch Adam.  ``hidden_sizes=()`` gives plain
logistic regression, used as a sanity baseline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .egonet import EgoKind, EgoNetwork
from .features import FeatureVector, featurize, random_permutation

__all__ = [
    "LabeledExample",
    "TrainConfig",
    "OrderingModel",
    "TrainingError",
    "CVResult",
    "shuffle_ego",
    "make_training_set",
    "examples_to_arrays",
    "init_params",
    "loss_and_grad",
    "train",
    "predict_proba",
    "accuracy",
    "cross_validate",
    "transfer_evaluate",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "hyperego-ordering-model"
MODEL_VERSION = 1


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    label: int
    ego_id: int
    kind: EgoKind


@dataclass(frozen=True)
class TrainConfig:
    hidden_sizes: tuple[int, ...] = (100, 24)
    learning_rate: float = 1e-3
    minibatch: int = 200
    max_epochs: int = 200
    tolerance: float = 1e-4
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.minibatch < 1 or self.max_epochs < 1:
            raise ValueError("learning_rate, minibatch and max_epochs must be positive")
        if any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden layer sizes must be positive")


# smaller network for the email preset; (100, 24) is the default elsewhere
EMAIL_CONFIG = TrainConfig(hidden_sizes=(12, 6))


@dataclass
class OrderingModel:
    feature_names: tuple[str, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    mean: np.ndarray
    scale: np.ndarray
    seed: int = 0
    epochs_run: int = 0
    loss_curve: list[float] = field(default_factory=list, repr=False)

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def normalize(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale

    def logits(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.input_dim:
            raise ValueError(f"model expects {self.input_dim} features, got {X.shape[1]}")
        return _forward(self.weights, self.biases, self.normalize(X))[-1][:, 0]

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.logits(X))

    def __call__(self, X) -> np.ndarray:
        return self.predict_proba(X)


# ----------------------------------------------------------------------
# examples
# ----------------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def shuffle_ego(ego: EgoNetwork, seed=None) -> EgoNetwork:
    """Uniformly reorder ``ego`` (never the identity); ordinals become 1..m."""
    m = len(ego)
    if m < 2:
        raise ValueError("cannot shuffle an ego-network with fewer than 2 simplices")
    perm = random_permutation(m, _rng(seed))
    simplices = tuple(replace(ego.simplices[i], ordinal_time=t) for t, i in enumerate(perm, 1))
    return replace(ego, simplices=simplices)


def make_training_set(egos: Iterable[EgoNetwork], kind: EgoKind | str | None = None, seed=0) -> list[LabeledExample]:
    """One true-order positive and one shuffled negative per ego."""
    rng = _rng(seed)
    out = []
    for ego in egos:
        k = EgoKind(kind) if kind is not None else ego.kind
        out.append(LabeledExample(featurize(ego, k), 1, ego.ego, k))
        out.append(LabeledExample(featurize(shuffle_ego(ego, rng), k), 0, ego.ego, k))
    if not out:
        raise ValueError("no ego-networks given")
    return out


def examples_to_arrays(examples: Sequence[LabeledExample], columns: Sequence[str] | None = None):
    """Feature matrix, labels and the column names used."""
    if not examples:
        raise ValueError("no examples")
    names = tuple(columns) if columns else examples[0].features.names
    unknown = [n for n in names if n not in examples[0].features.names]
    if unknown:
        raise ValueError(f"unknown or unavailable feature columns {unknown}")
    X = np.array([[getattr(e.features, n) for n in names] for e in examples], dtype=float)
    y = np.array([e.label for e in examples], dtype=float)
    return X, y, names


# ----------------------------------------------------------------------
# network
# ----------------------------------------------------------------------

def init_params(sizes: Sequence[int], rng: np.random.Generator):
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return weights, biases


def _forward(weights, biases, X) -> list[np.ndarray]:
    acts = [X]
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = acts[-1] @ W + b
        acts.append(z if i == len(weights) - 1 else np.maximum(z, 0.0))
    return acts


def _bce_with_logits(z, y) -> float:
    return float(np.mean(np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))))


def loss_and_grad(weights, biases, X, y):
    """Mean binary cross-entropy and its gradients w.r.t. weights and biases."""
    acts = _forward(weights, biases, X)
    z = acts[-1][:, 0]
    loss = _bce_with_logits(z, y)
    delta = ((expit(z) - y) / len(y))[:, None]
    gw, gb = [None] * len(weights), [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ weights[i].T) * (acts[i] > 0)
    return loss, gw, gb


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        lr = self.lr * math.sqrt(1 - self.beta2**self.t) / (1 - self.beta1**self.t)
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= lr * m / (np.sqrt(v) + self.eps)


def train(examples, cfg: TrainConfig = TrainConfig(), columns: Sequence[str] | None = None) -> OrderingModel:
    """Fit an :class:`OrderingModel` on labeled examples.

    ``examples`` is a list of :class:`LabeledExample` or an ``(X, y)`` pair.
    Normalization statistics come from the training examples only.  Training
    stops after ``max_epochs`` or once the epoch loss has failed to improve by
    ``tolerance`` for ``patience`` consecutive epochs.
    """
    if isinstance(examples, tuple):
        X, y = (np.asarray(a, dtype=float) for a in examples)
        names = tuple(columns) if columns else tuple(f"x{i}" for i in range(X.shape[1]))
    else:
        X, y, names = examples_to_arrays(examples, columns)
    if len(y) < 2 or len(np.unique(y)) < 2:
        raise TrainingError("training needs at least two examples covering both labels")

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Xn = (X - mean) / scale

    rng = np.random.default_rng(cfg.seed)
    sizes = (X.shape[1],) + tuple(cfg.hidden_sizes) + (1,)
    weights, biases = init_params(sizes, rng)
    params = weights + biases
    opt = _Adam(params, cfg.learning_rate)

    n = len(y)
    batch = min(cfg.minibatch, n)
    best, stale, curve = np.inf, 0, []
    for epoch in range(cfg.max_epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            loss, gw, gb = loss_and_grad(weights, biases, Xn[idx], y[idx])
            opt.step(params, gw + gb)
            total += loss * len(idx)
        curve.append(total / n)
        if curve[-1] > best - cfg.tolerance:
            stale += 1
        else:
            stale = 0
        best = min(best, curve[-1])
        if stale > cfg.patience:
            break
    return OrderingModel(names, weights, biases, mean, scale, cfg.seed, len(curve), curve)


def _as_matrix(model: OrderingModel, features) -> np.ndarray:
    if isinstance(features, FeatureVector):
        features = [features]
    if isinstance(features, (list, tuple)) and features and isinstance(features[0], FeatureVector):
        rows = [[getattr(f, n, None) for n in model.feature_names] for f in features]
        if any(v is None for row in rows for v in row):
            raise ValueError(f"feature vectors do not provide all of {model.feature_names}")
        return np.array(rows, dtype=float)
    return np.atleast_2d(np.asarray(features, dtype=float))


def predict_proba(model: OrderingModel, features):
    """Probability that the ordering(s) behind ``features`` are correctly sorted.

    A single :class:`FeatureVector` gives a float, anything else an array.
    """
    X = _as_matrix(model, features)
    p = model.predict_proba(X)
    return float(p[0]) if isinstance(features, FeatureVector) else p


def accuracy(model: OrderingModel, examples: Sequence[LabeledExample], threshold: float = 0.5) -> float:
    X, y, _ = examples_to_arrays(examples, model.feature_names)
    return float(np.mean((model.predict_proba(X) >= threshold) == (y == 1)))


@dataclass
class CVResult:
    mean: float
    std: float
    fold_accuracies: list[float]

    def __str__(self):
        return f"{self.mean:.3f} ± {self.std:.3f}"


def cross_validate(
    examples: Sequence[LabeledExample],
    k: int = 10,
    cfg: TrainConfig = TrainConfig(),
    columns: Sequence[str] | None = None,
) -> CVResult:
    """k-fold accuracy with folds grouped by ego so a pair never straddles folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    groups = sorted({e.ego_id for e in examples})
    if len(groups) < k:
        raise ValueError(f"{len(groups)} egos cannot fill {k} folds")
    rng = np.random.default_rng(cfg.seed)
    shuffled = [groups[i] for i in rng.permutation(len(groups))]
    fold_of = {g: f for f, chunk in enumerate(np.array_split(np.arange(len(groups)), k)) for g in (shuffled[i] for i in chunk)}

    accs = []
    for f in range(k):
        tr = [e for e in examples if fold_of[e.ego_id] != f]
        te = [e for e in examples if fold_of[e.ego_id] == f]
        model = train(tr, cfg, columns)
        accs.append(accuracy(model, te))
    return CVResult(float(np.mean(accs)), float(np.std(accs)), accs)


def transfer_evaluate(model: OrderingModel, egos: Iterable[EgoNetwork], seed=0) -> float:
    """Accuracy of an already-trained model on another dataset's balanced set."""
    examples = make_training_set(egos, seed=seed)
    have = examples[0].features.names
    missing = [n for n in model.feature_names if n not in have]
    if missing:
        raise ValueError(f"feature schema mismatch: target examples lack {missing}")
    return accuracy(model, examples)


# ----------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------

def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def save_model(model: OrderingModel, path) -> None:
    lines = [
        f"{MODEL_FORMAT} {MODEL_VERSION}",
        f"seed {model.seed}",
        "layers " + " ".join(map(str, model.layer_sizes)),
        "features " + " ".join(model.feature_names),
        "mean " + _fmt(model.mean),
        "scale " + _fmt(model.scale),
    ]
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"weight {i} {W.shape[0]} {W.shape[1]}")
        lines.extend(_fmt(row) for row in W)
        lines.append(f"bias {i} {b.shape[0]}")
        lines.append(_fmt(b))
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> OrderingModel:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split()
    if head[0] != MODEL_FORMAT or int(head[1]) != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model format {lines[0]!r}")
    kv = {}
    for ln in lines[1:6]:
        key, _, rest = ln.partition(" ")
        kv[key] = rest
    sizes = [int(v) for v in kv["layers"].split()]
    names = tuple(kv["features"].split())
    mean = np.array(kv["mean"].split(), dtype=float)
    scale = np.array(kv["scale"].split(), dtype=float)
    weights, biases = [], []
    i = 6
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        _, _, r, c = lines[i].split()
        if (int(r), int(c)) != (fan_in, fan_out):
            raise ValueError(f"{path}:{i + 1}: layer shape disagrees with header")
        weights.append(np.array([ln.split() for ln in lines[i + 1 : i + 1 + fan_in]], dtype=float).reshape(fan_in, fan_out))
        i += 1 + fan_in
        biases.append(np.array(lines[i + 1].split(), dtype=float))
        i += 2
    return OrderingModel(names, weights, biases, mean, scale, int(kv["seed"]))
