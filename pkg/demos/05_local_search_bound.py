"""How bad can a swap-local optimum be for average intersection size?

For every small instance we enumerate all orderings, find the worst one
that no single swap improves, and compare it with the best ordering. The
worst case is guaranteed to stay above optimum / (2 c^2 d).
Run: python demos/05_local_search_bound.py
"""
from hyperego.isect import avg_isect_objective, preprocess, small_instances, swap_local_search, sweep, theorem_ratio_check

# %% One instance by hand
sets = [{1, 2}, {3, 4}, {1, 2}, {3, 4}]
print("interleaved order scores", avg_isect_objective(sets))
pi = swap_local_search(sets, seed=0)
print("after local search:", [sets[i] for i in pi], "scores", avg_isect_objective([sets[i] for i in pi]))
print(theorem_ratio_check(preprocess(sets)))

# %% Exhaustive sweep
results = sweep(small_instances(max_m=5, universe=4))
tight = min((r for _, r in results if r.ratio is not None), key=lambda r: r.ratio)
print(f"\n{len(results)} instances, {sum(not r.holds for _, r in results)} violations")
print(f"smallest worst/optimum ratio {tight.ratio} (bound there: {tight.bound})")
