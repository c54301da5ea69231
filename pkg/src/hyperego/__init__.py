"""Temporal structure of hypergraph ego-networks.

Load timestamped simplices, extract star/radial/contracted ego-networks,
measure how they evolve, learn to tell real orderings from shuffled ones and
reconstruct shuffled ego-networks by hill climbing.
"""
from .simplices import Simplex, SimplexDataset, from_records, load_dataset, load_prefix, write_dataset
from .egonet import EgoKind, EgoNetwork, EligibilityConfig, alter_networks, eligible_egos, extract_ego
from .features import FeatureVector, featurize
from .classifier import OrderingModel, TrainConfig, cross_validate, make_training_set, train
from .reconstruct import Ordering, SearchConfig, evaluate_reconstruction, hill_climb, pairwise_order_accuracy
from .isect import theorem_ratio_check

__version__ = "0.1.0"

__all__ = [
    "Simplex", "SimplexDataset", "from_records", "load_dataset", "load_prefix", "write_dataset",
    "EgoKind", "EgoNetwork", "EligibilityConfig", "alter_networks", "eligible_egos", "extract_ego",
    "FeatureVector", "featurize",
    "OrderingModel", "TrainConfig", "cross_validate", "make_training_set", "train",
    "Ordering", "SearchConfig", "evaluate_reconstruction", "hill_climb", "pairwise_order_accuracy",
    "theorem_ratio_check",
]
