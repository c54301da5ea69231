"""Ego-networks of a tiny co-authorship record.

Eight papers written by eight people between 1995 and 2001. We look at the
collaborations of person 1 from three angles and list who they worked with.
Run: python demos/01_ego_networks.py
"""
from hyperego import alter_networks, extract_ego, from_records

papers = [{2, 3}, {1, 2, 3}, {1, 2}, {2, 8, 4}, {1, 2, 3}, {4, 1, 8}, {2, 3, 5, 6}, {1, 5, 7}]
years = [1995, 1996, 1997, 1998, 1998, 1999, 2000, 2001]
ds = from_records(zip(papers, years), "toy")
print(f"{len(ds)} simplices on {ds.node_count} nodes\n")

# %% Three views of person 1
# star: papers person 1 wrote; radial: any paper written only by person 1 and
# their co-authors; contracted: every paper cut down to those people.
for kind in ("star", "radial", "contracted"):
    ego = extract_ego(ds, 1, kind)
    print(f"{kind:>10} ({len(ego)}):", [set(s.nodes) for s in ego.simplices])

# %% Alter-networks
# Each co-author's slice of the star ego-network, as ordinal times.
star = extract_ego(ds, 1, "star")
print("\nco-authors of 1:", sorted(star.alters))
for a, net in alter_networks(star).items():
    print(f"  alter {a}: appears at {net.ordinals}")
