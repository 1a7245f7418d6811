"""Tour of the six network shapes and their routing behavior.

Builds each topology for the same 40 km Alice-Bob separation, prints its
node/link census, the shortest route and the internally-disjoint routes the
sweep engine would use.
"""

from qkdsim import build_topology, disjoint_paths, format_topology, shortest_path

SHAPES = [
    ("direct", {}),
    ("line", {"n_trusted": 2}),
    ("star", {"n_leaves": 4}),
    ("ring", {"m": 6}),
    ("grid", {"g": 3}),
    ("torus", {"k": 3}),
]

L = 40.0

for kind, params in SHAPES:
    topo = build_topology(kind, L, **params)
    route = shortest_path(topo, topo.alice, topo.bob)
    routes = disjoint_paths(topo, topo.alice, topo.bob, max_paths=4)
    print(f"== {kind} {params or ''}")
    print(f"   nodes={len(topo.nodes)} links={len(topo.links)}")
    print(f"   shortest path {route.nodes}, {route.hops} hops, "
          f"{route.total_length_km:g} km")
    print(f"   disjoint routes: {[r.nodes for r in routes]}")

# The adjacency export is what `qkdsim topo` writes to disk:
print()
print(format_topology(build_topology("torus", 30.0, k=3)))
