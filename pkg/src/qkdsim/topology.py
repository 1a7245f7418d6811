"""Network shapes, node placement and routing.

Six topology kinds are supported: direct, line, star, ring, grid and torus.
Each builder places Alice and Bob so that the shortest path between them has
exactly the configured end-to-end length, and routing is deterministic (ties
broken by lexicographically smallest node-id sequence).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

ALICE = "endpoint-alice"
BOB = "endpoint-bob"
TRUSTED = "trusted"
REPEATER = "repeater"
SWITCH = "switch"

NODE_KINDS = frozenset({ALICE, BOB, TRUSTED, REPEATER, SWITCH})
TOPOLOGY_KINDS = ("direct", "line", "star", "ring", "grid", "torus")

_FIBER = 0.15
_SWITCH_ALPHA = 0.4


@dataclass(frozen=True)
class Link:
    """Undirected fiber link; parallel links between a pair are permitted."""

    a: int
    b: int
    length_km: float
    alpha: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("self-loop link")
        if self.length_km <= 0:
            raise ValueError("link length must be positive")
        if self.alpha <= 0:
            raise ValueError("link alpha must be positive")


@dataclass(frozen=True)
class RoutePath:
    """Node sequence from Alice's side to Bob's with per-hop geometry."""

    nodes: tuple[int, ...]
    hop_lengths: tuple[float, ...]
    hop_alphas: tuple[float, ...]

    @property
    def total_length_km(self) -> float:
        return sum(self.hop_lengths)

    @property
    def hops(self) -> int:
        return len(self.hop_lengths)


@dataclass(frozen=True)
class Topology:
    """Immutable weighted graph of typed nodes plus the configured A-B length."""

    kind: str
    ab_distance_km: float
    nodes: tuple[tuple[int, str], ...]
    links: tuple[Link, ...]

    def node_kind(self, node_id: int) -> str:
        for nid, kind in self.nodes:
            if nid == node_id:
                return kind
        raise KeyError(f"unknown node {node_id}")

    @property
    def alice(self) -> int:
        return next(nid for nid, kind in self.nodes if kind == ALICE)

    @property
    def bob(self) -> int:
        return next(nid for nid, kind in self.nodes if kind == BOB)

    def adjacency(self) -> dict[int, list[tuple[int, float, float]]]:
        """node -> sorted (neighbor, length, alpha) triples; duplicates collapse
        to the shortest parallel link."""
        adj: dict[int, dict[int, tuple[float, float]]] = {nid: {} for nid, _ in self.nodes}
        for lk in self.links:
            for u, v in ((lk.a, lk.b), (lk.b, lk.a)):
                cur = adj[u].get(v)
                if cur is None or lk.length_km < cur[0]:
                    adj[u][v] = (lk.length_km, lk.alpha)
        return {u: sorted((v, l, a) for v, (l, a) in nbrs.items())
                for u, nbrs in adj.items()}


def _segment_nodes(n_interior: int) -> list[tuple[int, str]]:
    nodes = [(0, ALICE)]
    nodes += [(i + 1, TRUSTED) for i in range(n_interior)]
    nodes.append((n_interior + 1, BOB))
    return nodes


def build_topology(kind: str, length_km: float, **params) -> Topology:
    """Construct one of the six network shapes for a target Alice-Bob length.

    Shape parameters: line takes n_trusted >= 0, star takes n_leaves >= 2,
    ring takes m >= 3, grid takes g >= 2 and torus takes k >= 2.  Unknown
    parameters are rejected.
    """
    if length_km <= 0:
        raise ValueError("length_km must be positive")
    builders = {
        "direct": _build_direct,
        "line": _build_line,
        "star": _build_star,
        "ring": _build_ring,
        "grid": _build_grid,
        "torus": _build_torus,
    }
    if kind not in builders:
        raise ValueError(f"unknown topology kind {kind!r}")
    topo = builders[kind](length_km, **params)
    # Placement guarantee: the routed A-B distance equals the configured one.
    sp = shortest_path(topo, topo.alice, topo.bob)
    if abs(sp.total_length_km - length_km) > 1e-9:
        raise AssertionError("placement failed to realize the configured length")
    return topo


def _build_direct(L: float) -> Topology:
    nodes = ((0, ALICE), (1, BOB))
    links = (Link(0, 1, L, _FIBER),)
    return Topology("direct", L, nodes, links)


def _build_line(L: float, n_trusted: int = 1) -> Topology:
    if n_trusted < 0:
        raise ValueError("n_trusted must be >= 0")
    seg = L / (n_trusted + 1)
    nodes = _segment_nodes(n_trusted)
    links = tuple(Link(i, i + 1, seg, _FIBER) for i in range(n_trusted + 1))
    return Topology("line", L, tuple(nodes), links)


def _build_star(L: float, n_leaves: int = 2) -> Topology:
    if n_leaves < 2:
        raise ValueError("n_leaves must be >= 2")
    hub = n_leaves
    nodes = [(0, ALICE), (1, BOB)]
    nodes += [(i, TRUSTED) for i in range(2, n_leaves)]
    nodes.append((hub, SWITCH))
    # Every leaf sits L/2 from the hub so any leaf pair is L apart; hub links
    # carry the optical-switch attenuation.
    links = tuple(Link(i, hub, L / 2.0, _SWITCH_ALPHA) for i in range(n_leaves))
    return Topology("star", L, tuple(nodes), links)


def _build_ring(L: float, m: int = 4) -> Topology:
    if m < 3:
        raise ValueError("ring needs m >= 3 nodes")
    half = m // 2
    seg = L / half  # Alice and Bob sit maximally apart: short arc totals L.
    nodes = [(0, ALICE)] + [(i, TRUSTED) for i in range(1, m)]
    nodes[half] = (half, BOB)
    links = tuple(Link(i, (i + 1) % m, seg, _FIBER) for i in range(m))
    return Topology("ring", L, tuple(nodes), links)


def _build_grid(L: float, g: int = 3) -> Topology:
    if g < 2:
        raise ValueError("grid needs g >= 2")
    seg = L / (2 * (g - 1))  # Manhattan corner-to-corner path totals L.
    def nid(r, c):
        return r * g + c
    nodes = []
    for r in range(g):
        for c in range(g):
            kind = TRUSTED
            if (r, c) == (0, 0):
                kind = ALICE
            elif (r, c) == (g - 1, g - 1):
                kind = BOB
            nodes.append((nid(r, c), kind))
    links = []
    for r in range(g):
        for c in range(g):
            if c + 1 < g:
                links.append(Link(nid(r, c), nid(r, c + 1), seg, _FIBER))
            if r + 1 < g:
                links.append(Link(nid(r, c), nid(r + 1, c), seg, _FIBER))
    return Topology("grid", L, tuple(nodes), tuple(links))


def _build_torus(L: float, k: int = 3) -> Topology:
    if k < 2:
        raise ValueError("torus needs k >= 2")
    br, bc = k // 2, k // 2
    hop_dist = min(br, k - br) + min(bc, k - bc)
    seg = L / hop_dist  # wrap-around keeps the A-B shortest path at L itself
    def nid(r, c):
        return r * k + c
    nodes = []
    for r in range(k):
        for c in range(k):
            kind = TRUSTED
            if (r, c) == (0, 0):
                kind = ALICE
            elif (r, c) == (br, bc):
                kind = BOB
            nodes.append((nid(r, c), kind))
    links = []
    for r in range(k):
        for c in range(k):
            links.append(Link(nid(r, c), nid(r, (c + 1) % k), seg, _FIBER))
            links.append(Link(nid(r, c), nid((r + 1) % k, c), seg, _FIBER))
    return Topology("torus", L, tuple(nodes), tuple(links))


def shortest_path(topo: Topology, a: int, b: int) -> RoutePath:
    """Minimum-length path from a to b; ties break to the lexicographically
    smallest node-id sequence, so routing is seed-independent."""
    adj = topo.adjacency()
    if a not in adj or b not in adj:
        raise KeyError("endpoint not in topology")
    best: dict[int, tuple[float, tuple[int, ...]]] = {}
    heap = [(0.0, (a,))]
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in best and best[node] <= (dist, path):
            continue
        best[node] = (dist, path)
        if node == b:
            continue
        for nbr, length, _alpha in adj[node]:
            if nbr in path:
                continue
            cand = (dist + length, path + (nbr,))
            if nbr not in best or cand < best[nbr]:
                heapq.heappush(heap, cand)
    if b not in best:
        raise ValueError(f"nodes {a} and {b} are disconnected")
    return _route_from_nodes(topo, best[b][1])


def _route_from_nodes(topo: Topology, nodes: tuple[int, ...]) -> RoutePath:
    adj = topo.adjacency()
    lengths, alphas = [], []
    for u, v in zip(nodes, nodes[1:]):
        entry = next(((l, al) for n, l, al in adj[u] if n == v), None)
        if entry is None:
            raise ValueError(f"nodes {u} and {v} share no link")
        lengths.append(entry[0])
        alphas.append(entry[1])
    return RoutePath(tuple(nodes), tuple(lengths), tuple(alphas))


def disjoint_paths(topo: Topology, a: int, b: int, max_paths: int) -> list[RoutePath]:
    """Internally-node-disjoint paths, extracted greedily shortest-first.

    Returns at most max_paths paths; a path with no interior nodes (the direct
    link) can contribute only once.
    """
    if max_paths < 1:
        raise ValueError("max_paths must be >= 1")
    removed: set[int] = set()
    paths: list[RoutePath] = []
    while len(paths) < max_paths:
        sub = _without_nodes(topo, removed)
        try:
            path = shortest_path(sub, a, b)
        except ValueError:
            break
        paths.append(path)
        interior = set(path.nodes[1:-1])
        if not interior:
            break
        removed |= interior
    if not paths:
        raise ValueError(f"nodes {a} and {b} are disconnected")
    return paths


def _without_nodes(topo: Topology, removed: set[int]) -> Topology:
    if not removed:
        return topo
    nodes = tuple(n for n in topo.nodes if n[0] not in removed)
    links = tuple(l for l in topo.links if l.a not in removed and l.b not in removed)
    return Topology(topo.kind, topo.ab_distance_km, nodes, links)


def format_topology(topo: Topology) -> str:
    """Plain-text adjacency export: header, node lines, link lines."""
    out = [f"{topo.kind} {topo.ab_distance_km:g}"]
    for nid, kind in topo.nodes:
        out.append(f"node {nid} {kind}")
    for lk in topo.links:
        out.append(f"link {lk.a} {lk.b} {lk.length_km:g} {lk.alpha:g}")
    return "\n".join(out) + "\n"
