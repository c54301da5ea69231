"""Putting a shuffled ego-network back in order.

A trained classifier scores orderings; hill climbing over pairwise swaps
with ten random restarts searches for the ordering it likes best. Accuracy
is the fraction of simplex pairs placed in the right temporal order, so a
random guess scores about one half.
Run: python demos/04_reconstruction.py
"""
from hyperego import SearchConfig, TrainConfig, evaluate_reconstruction, extract_ego, make_training_set, train
from hyperego.reconstruct import hill_climb, pairwise_order_accuracy, Ordering
from hyperego.synthetic import locality_dataset

ds, ego_ids = locality_dataset(300, seed=3)
egos = [extract_ego(ds, u, "star") for u in ego_ids]
model = train(make_training_set(egos[:200], seed=0), TrainConfig(seed=0))

# %% A single search, step by step
ego = egos[250]
found, trace = hill_climb(ego, model, SearchConfig(restarts=10, seed=0))
print("steps per restart:", trace.steps, "best restart:", trace.best_restart)
print("recovered accuracy:", round(pairwise_order_accuracy(found, Ordering.identity(ego)), 3))

# %% Held-out egos against the baselines
report = evaluate_reconstruction(egos[200:], model, SearchConfig(10, seed=0))
for method, (mean, std) in report.summary().items():
    print(f"{method:>10}: {mean:.3f} ± {std:.3f}")
wins, losses, p = report.sign_test()
print(f"hill climbing beats random on {wins} egos, loses on {losses} (one-sided sign test p={p:.2g})")
