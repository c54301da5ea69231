"""How ego-networks change over time, compared with shuffled copies.

A synthetic dataset stands in for real data: every alter is active for a
short run of consecutive simplices. Repeated alters sit close together in
real orderings, which shows up as larger adjacent intersections and smaller
alter-network spread than in a random reordering.
Run: python demos/02_temporal_measures.py
"""
from hyperego import extract_ego
from hyperego.features import aggregate_curves, featurize
from hyperego.synthetic import locality_dataset

ds, ego_ids = locality_dataset(300, seed=1)
egos = [extract_ego(ds, u, "star") for u in ego_ids]
print(f"{len(egos)} star ego-networks of length {min(map(len, egos))}..{max(map(len, egos))}\n")

# %% One ego-network in detail
print("features of the first ego:", featurize(egos[0]))

# %% Curves by ego-network length
for measure in ("intersection", "spread"):
    curves = aggregate_curves(egos, measure, ["ordered", "shuffled", "first20"], seed=0)
    print(f"\n{measure}: length  ordered  shuffled  first20%")
    o, s, f = curves["ordered"], curves["shuffled"], curves["first20"]
    for x, a, b, c in zip(o.x, o.y_mean, s.y_mean, f.y_mean):
        print(f"{x:>20}  {a:7.3f}  {b:8.3f}  {c:8.3f}")

# %% Novelty by position
nov = aggregate_curves(egos, "novelty", ["ordered", "shuffled"])
print("\nnew nodes per incoming simplex (ordinal 2..8):")
print("  ordered ", [round(v, 2) for v in nov["ordered"].y_mean[:7]])
print("  shuffled", [round(v, 2) for v in nov["shuffled"].y_mean[:7]])
