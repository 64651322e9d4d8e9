"""Polygonal partitions of a truncated plane, their neighbour graphs,
exact chromatic colourings, and the phase/strength data used by the
operator-ordering machinery.

A partition lives in the box [-R, R]^2. Subdomains are unions of simple
polygon cells sharing one integer id (several cells are only needed for
annulus-like subdomains, which are split by seams; seams between cells of
the same id are not interfaces). Interfaces are the shared polylines
between cells of different ids.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np

__all__ = [
    "Partition",
    "Subdomain",
    "Interface",
    "InteractionData",
    "Graph",
    "Colouring",
    "PhaseAssignment",
    "build_canonical_partition",
    "adjacency_graph",
    "chromatic_colouring",
    "phase_assignment",
    "edge_constant",
]

CANONICAL_NAMES = ("half_plane", "wedge", "star3", "line_with_bump", "grid", "island")


@dataclass(frozen=True)
class Subdomain:
    id: int
    loops: Tuple[Tuple[int, ...], ...]  # CCW vertex-index loops, one per cell


@dataclass(frozen=True)
class Interface:
    id: int
    k: int
    l: int
    polyline: Tuple[int, ...]  # consecutive vertex indices; closed iff first == last
    length: float

    @property
    def segments(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((self.polyline[i], self.polyline[i + 1])
                     for i in range(len(self.polyline) - 1))


@dataclass(frozen=True)
class Partition:
    box_radius: float
    vertices: np.ndarray                  # (nv, 2) float
    subdomains: Tuple[Subdomain, ...]
    interfaces: Tuple[Interface, ...]
    symmetry_axis: float | None = None    # vertical line x = value, if guaranteed

    @property
    def n_subdomains(self) -> int:
        return len(self.subdomains)

    def subdomain_ids(self) -> Tuple[int, ...]:
        return tuple(s.id for s in self.subdomains)

    def interface_by_id(self, iid: int) -> Interface:
        for itf in self.interfaces:
            if itf.id == iid:
                return itf
        raise KeyError(f"no interface with id {iid}")


@dataclass(frozen=True)
class InteractionData:
    alpha: Dict[int, float]   # interface id -> delta strength (1/length)
    beta: Dict[int, float]    # interface id -> delta' strength (length), > 0

    def __post_init__(self):
        for iid, b in self.beta.items():
            if not b > 0:
                raise ValueError(f"beta must be strictly positive (interface {iid}: {b})")
        if set(self.alpha) != set(self.beta):
            raise ValueError("alpha and beta must cover the same interface ids")

    @classmethod
    def uniform(cls, p: Partition, alpha: float, beta: float) -> "InteractionData":
        ids = [itf.id for itf in p.interfaces]
        return cls({i: float(alpha) for i in ids}, {i: float(beta) for i in ids})


@dataclass(frozen=True)
class Graph:
    nodes: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]   # sorted pairs, each (u, v) with u < v

    def neighbours(self, u: int) -> Tuple[int, ...]:
        out = [b if a == u else a for (a, b) in self.edges if u in (a, b)]
        return tuple(sorted(out))


@dataclass(frozen=True)
class Colouring:
    chi: int
    phi: Dict[int, int]       # subdomain id -> colour in {0..chi-1}


@dataclass(frozen=True)
class PhaseAssignment:
    z: Dict[int, complex]       # subdomain id -> unit phase
    alpha_z: Dict[int, float]   # interface id -> induced delta strength


# ---------------------------------------------------------------------------
# basic polygon helpers
# ---------------------------------------------------------------------------

def _loop_area(vertices: np.ndarray, loop: Sequence[int]) -> float:
    pts = vertices[list(loop)]
    x = pts[:, 0]
    y = pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _segments_cross(p1, p2, q1, q2, tol) -> bool:
    """True if the open interiors of the two segments properly intersect."""
    d1 = _cross2(p2 - p1, q1 - p1)
    d2 = _cross2(p2 - p1, q2 - p1)
    d3 = _cross2(q2 - q1, p1 - q1)
    d4 = _cross2(q2 - q1, p2 - q1)
    return (d1 * d2 < -tol) and (d3 * d4 < -tol)


def _snap(v: float, radius: float) -> float:
    for target in (0.0, radius, -radius):
        if abs(v - target) < 1e-9 * max(radius, 1.0):
            return target
    return v


class _VertexPool:
    """Deduplicating vertex registry keyed by snapped coordinates."""

    def __init__(self, radius: float):
        self.radius = radius
        self.coords: List[Tuple[float, float]] = []
        self._index: Dict[Tuple[float, float], int] = {}

    def add(self, x: float, y: float) -> int:
        x = _snap(float(x), self.radius)
        y = _snap(float(y), self.radius)
        key = (round(x, 12), round(y, 12))
        if key in self._index:
            return self._index[key]
        idx = len(self.coords)
        self.coords.append((x, y))
        self._index[key] = idx
        return idx

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float).reshape(-1, 2)


def _derive_interfaces(vertices: np.ndarray,
                       subdomains: Sequence[Subdomain]) -> Tuple[Interface, ...]:
    """Interfaces = edges shared by cells of two different subdomain ids,
    chained into polylines per unordered id pair."""
    owners: Dict[Tuple[int, int], List[int]] = {}
    for sub in subdomains:
        for loop in sub.loops:
            n = len(loop)
            for i in range(n):
                a, b = loop[i], loop[(i + 1) % n]
                key = (min(a, b), max(a, b))
                owners.setdefault(key, []).append(sub.id)
    pair_edges: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for edge, ids in owners.items():
        if len(ids) == 2 and ids[0] != ids[1]:
            k, l = sorted(ids)
            pair_edges.setdefault((k, l), []).append(edge)
    interfaces: List[Interface] = []
    next_id = 1
    for (k, l) in sorted(pair_edges):
        for chain in _chain_edges(pair_edges[(k, l)]):
            pts = vertices[list(chain)]
            length = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
            interfaces.append(Interface(next_id, k, l, tuple(chain), length))
            next_id += 1
    return tuple(interfaces)


def _chain_edges(edges: List[Tuple[int, int]]) -> List[List[int]]:
    """Group undirected edges into maximal open chains or closed loops."""
    adj: Dict[int, List[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    unused = {tuple(sorted(e)) for e in edges}
    chains: List[List[int]] = []
    ends = sorted(v for v, nb in adj.items() if len(nb) == 1)
    starts = ends + sorted(adj)
    for start in starts:
        while True:
            first = None
            for nb in sorted(adj[start]):
                if (min(start, nb), max(start, nb)) in unused:
                    first = nb
                    break
            if first is None:
                break
            chain = [start, first]
            unused.discard((min(start, first), max(start, first)))
            cur, prev = first, start
            while True:
                nxt = None
                for nb in sorted(adj[cur]):
                    if (min(cur, nb), max(cur, nb)) in unused:
                        nxt = nb
                        break
                if nxt is None:
                    break
                chain.append(nxt)
                unused.discard((min(cur, nxt), max(cur, nxt)))
                prev, cur = cur, nxt
            chains.append(chain)
        if not unused:
            break
    return chains


def validate_partition(p: Partition) -> None:
    R = p.box_radius
    tol = 1e-9 * max(R, 1.0)
    total = 0.0
    all_edges: List[Tuple[int, int]] = []
    for sub in p.subdomains:
        for loop in sub.loops:
            area = _loop_area(p.vertices, loop)
            if area <= tol * tol:
                raise ValueError(f"cell of subdomain {sub.id} is degenerate or clockwise")
            total += area
            n = len(loop)
            all_edges.extend((loop[i], loop[(i + 1) % n]) for i in range(n))
    if abs(total - 4.0 * R * R) > 1e-9 * 4.0 * R * R:
        raise ValueError(f"subdomain areas sum to {total}, expected {4 * R * R}")
    # edge sharing: each edge belongs to one cell (then it must lie on the box)
    # or exactly two cells
    count: Dict[Tuple[int, int], int] = {}
    for a, b in all_edges:
        key = (min(a, b), max(a, b))
        count[key] = count.get(key, 0) + 1
    for (a, b), c in count.items():
        if c > 2:
            raise ValueError(f"edge {(a, b)} shared by {c} cells")
        if c == 1:
            pa, pb = p.vertices[a], p.vertices[b]
            on_box = any(
                abs(pa[d] - s * R) < tol and abs(pb[d] - s * R) < tol
                for d in (0, 1) for s in (-1.0, 1.0)
            )
            if not on_box:
                raise ValueError(f"unmatched interior edge {(a, b)}")
    # no proper crossings between any two boundary edges
    segs = [(p.vertices[a], p.vertices[b]) for a, b in count]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if _segments_cross(segs[i][0], segs[i][1], segs[j][0], segs[j][1], tol * tol):
                raise ValueError("cell boundary edges cross")
    for itf in p.interfaces:
        if not itf.length > 0:
            raise ValueError(f"interface {itf.id} has non-positive length")


# ---------------------------------------------------------------------------
# canonical builders
# ---------------------------------------------------------------------------

def _box_coordinate(pt: Tuple[float, float], R: float) -> float:
    """Perimeter coordinate in [0, 8R), counter-clockwise, 0 at (R, -R)."""
    x, y = pt
    tol = 1e-9 * R
    if abs(x - R) < tol:
        return y + R
    if abs(y - R) < tol:
        return 2 * R + (R - x)
    if abs(x + R) < tol:
        return 4 * R + (R - y)
    if abs(y + R) < tol:
        return 6 * R + (x + R)
    raise ValueError(f"point {pt} not on box boundary")


def _box_walk(a, b, R) -> List[Tuple[float, float]]:
    """Box corners strictly between perimeter positions of a and b, CCW."""
    sa = _box_coordinate(a, R)
    sb = _box_coordinate(b, R)
    corners = [(2 * R, (R, R)), (4 * R, (-R, R)), (6 * R, (-R, -R)), (8 * R, (R, -R))]
    out = []
    span = (sb - sa) % (8 * R)
    for s, pt in corners:
        rel = (s - sa) % (8 * R)
        if 1e-9 * R < rel < span - 1e-9 * R:
            out.append((rel, pt))
    out.sort()
    return [pt for _, pt in out]


def _ray_box_exit(theta: float, R: float) -> Tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    tx = R / abs(c) if abs(c) > 1e-15 else math.inf
    ty = R / abs(s) if abs(s) > 1e-15 else math.inf
    t = min(tx, ty)
    return (_snap(t * c, R), _snap(t * s, R))


def _half_plane(R: float) -> Partition:
    pool = _VertexPool(R)
    bl = pool.add(-R, -R)
    br = pool.add(R, -R)
    r0 = pool.add(R, 0)
    tr = pool.add(R, R)
    tl = pool.add(-R, R)
    l0 = pool.add(-R, 0)
    subs = (
        Subdomain(1, ((l0, r0, tr, tl),)),
        Subdomain(2, ((bl, br, r0, l0),)),
    )
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs), symmetry_axis=None)


def _wedge(R: float, phi: float) -> Partition:
    if not (0 < phi <= math.pi):
        raise ValueError(f"wedge angle must lie in (0, pi], got {phi}")
    pool = _VertexPool(R)
    o = pool.add(0.0, 0.0)
    e1 = _ray_box_exit(math.pi / 2 - phi / 2, R)
    e2 = _ray_box_exit(math.pi / 2 + phi / 2, R)
    i1 = pool.add(*e1)
    i2 = pool.add(*e2)
    wedge_loop = [o, i1] + [pool.add(*pt) for pt in _box_walk(e1, e2, R)] + [i2]
    comp_loop = [o, i2] + [pool.add(*pt) for pt in _box_walk(e2, e1, R)] + [i1]
    subs = (Subdomain(1, (tuple(wedge_loop),)), Subdomain(2, (tuple(comp_loop),)))
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs), symmetry_axis=0.0)


def _star3(R: float) -> Partition:
    pool = _VertexPool(R)
    o = pool.add(0.0, 0.0)
    up = pool.add(0.0, R)
    c = R / math.sqrt(3.0)
    sw = pool.add(-R, -c)
    se = pool.add(R, -c)
    tl = pool.add(-R, R)
    tr = pool.add(R, R)
    bl = pool.add(-R, -R)
    br = pool.add(R, -R)
    subs = (
        Subdomain(1, ((o, up, tl, sw),)),        # top-left sector
        Subdomain(2, ((o, sw, bl, br, se),)),    # bottom sector
        Subdomain(3, ((o, se, tr, up),)),        # right sector
    )
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs))


def _island_chains(loop: List[int], vertices: List[Tuple[float, float]]):
    """Topmost/bottommost loop positions (tie-break: smaller x)."""
    def key_top(i):
        x, y = vertices[loop[i]]
        return (-y, x)

    def key_bot(i):
        x, y = vertices[loop[i]]
        return (y, x)

    i_t = min(range(len(loop)), key=key_top)
    i_b = min(range(len(loop)), key=key_bot)
    return i_t, i_b


def _split_annulus(pool: _VertexPool, island: List[int], y_bot: float, y_top: float,
                   R: float) -> Tuple[List[int], List[int], int, int]:
    """Split (rectangle [-R,R]x[y_bot,y_top]) minus island into two simple
    cells via vertical seams from the island's topmost vertex up and
    bottommost vertex down. Returns (left_loop, right_loop, bottom seam foot,
    top seam foot)."""
    coords = pool.coords
    i_t, i_b = _island_chains(island, coords)
    n = len(island)
    T = island[i_t]
    B = island[i_b]
    tx = coords[T][0]
    bx = coords[B][0]
    foot_b = pool.add(bx, y_bot)
    foot_t = pool.add(tx, y_top)
    # CCW walk T -> B follows the island's left side; B -> T its right side
    left_chain = []
    i = i_t
    while True:
        left_chain.append(island[i])
        if island[i] == B:
            break
        i = (i + 1) % n
    right_chain = []
    i = i_b
    while True:
        right_chain.append(island[i])
        if island[i] == T:
            break
        i = (i + 1) % n
    bl = pool.add(-R, y_bot)
    tl = pool.add(-R, y_top)
    br = pool.add(R, y_bot)
    tr = pool.add(R, y_top)
    left_loop = [bl, foot_b] + list(reversed(left_chain)) + [foot_t, tl]
    # reversed(right_chain) runs T -> ... -> B; the loop closes B -> foot_b
    right_loop = [foot_b, br, tr, foot_t] + list(reversed(right_chain))
    return left_loop, right_loop, foot_b, foot_t


def _check_island_polygon(pts: np.ndarray, R: float, upper_half: bool) -> None:
    tol = 1e-9 * max(R, 1.0)
    if len(pts) < 3:
        raise ValueError("island polygon needs at least 3 vertices")
    y_min = 0.0 if upper_half else -R
    if not (np.all(pts[:, 0] > -R + tol) and np.all(pts[:, 0] < R - tol)
            and np.all(pts[:, 1] > y_min + tol) and np.all(pts[:, 1] < R - tol)):
        where = "upper half box" if upper_half else "box"
        raise ValueError(f"island polygon must lie strictly inside the {where}")
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if _segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n],
                               tol * tol):
                raise ValueError("island polygon is not simple")


def _as_ccw(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    if 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)) < 0:
        return pts[::-1]
    return pts


def _line_with_bump(R: float, bump: np.ndarray) -> Partition:
    bump = _as_ccw(np.asarray(bump, dtype=float))
    _check_island_polygon(bump, R, upper_half=True)
    pool = _VertexPool(R)
    island = [pool.add(x, y) for x, y in bump]
    left_loop, right_loop, foot_b, _ = _split_annulus(pool, island, 0.0, R, R)
    bl = pool.add(-R, -R)
    br = pool.add(R, -R)
    r0 = pool.add(R, 0.0)
    l0 = pool.add(-R, 0.0)
    lower = [bl, br, r0, foot_b, l0]
    subs = (
        Subdomain(1, (tuple(island),)),
        Subdomain(2, (tuple(left_loop), tuple(right_loop))),
        Subdomain(3, (tuple(lower),)),
    )
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs))


def _island_partition(R: float, poly: np.ndarray) -> Partition:
    poly = _as_ccw(np.asarray(poly, dtype=float))
    _check_island_polygon(poly, R, upper_half=False)
    pool = _VertexPool(R)
    island = [pool.add(x, y) for x, y in poly]
    left_loop, right_loop, _, _ = _split_annulus(pool, island, -R, R, R)
    subs = (
        Subdomain(1, (tuple(island),)),
        Subdomain(2, (tuple(left_loop), tuple(right_loop))),
    )
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs))


def _grid(R: float, rows: int, cols: int) -> Partition:
    pool = _VertexPool(R)
    xs = [-R + 2 * R * j / cols for j in range(cols + 1)]
    ys = [-R + 2 * R * i / rows for i in range(rows + 1)]
    idx = {(i, j): pool.add(xs[j], ys[i]) for i in range(rows + 1) for j in range(cols + 1)}
    subs = []
    for i in range(rows):
        for j in range(cols):
            loop = (idx[(i, j)], idx[(i, j + 1)], idx[(i + 1, j + 1)], idx[(i + 1, j)])
            subs.append(Subdomain(i * cols + j + 1, (loop,)))
    v = pool.array()
    subs = tuple(subs)
    return Partition(R, v, subs, _derive_interfaces(v, subs))


def _grid_chi4(R: float) -> Partition:
    """Four rectilinear cells tiling the box so every pair shares an edge
    (K4 adjacency, chromatic number 4)."""
    pool = _VertexPool(R)

    def pt(u, w):  # unit layout [0,4]x[0,3] mapped onto the box
        return pool.add(-R + u / 4.0 * 2 * R, -R + w / 3.0 * 2 * R)

    v0 = pt(0, 0)
    v1 = pt(4, 0)
    v2 = pt(4, 1)
    v3 = pt(2.5, 1)
    v4 = pt(1, 1)
    v5 = pt(1, 2)
    v6 = pt(0, 2)
    v7 = pt(2.5, 2)
    v8 = pt(4, 2)
    v9 = pt(4, 3)
    v10 = pt(0, 3)
    subs = (
        Subdomain(1, ((v6, v5, v7, v8, v9, v10),)),       # top strip
        Subdomain(2, ((v4, v3, v7, v5),)),                # middle left cell
        Subdomain(3, ((v3, v2, v8, v7),)),                # middle right cell
        Subdomain(4, ((v0, v1, v2, v3, v4, v5, v6),)),    # bottom strip + left arm
    )
    v = pool.array()
    return Partition(R, v, subs, _derive_interfaces(v, subs))


def build_canonical_partition(name: str, params: dict | None = None) -> Partition:
    params = dict(params or {})
    if name not in CANONICAL_NAMES:
        raise ValueError(f"unknown canonical partition {name!r}; "
                         f"expected one of {CANONICAL_NAMES}")
    R = float(params.pop("box_radius", 8.0))
    if not R > 0:
        raise ValueError("box_radius must be positive")
    if name == "half_plane":
        p = _half_plane(R)
    elif name == "wedge":
        p = _wedge(R, float(params.pop("phi", 2 * math.pi / 3)))
    elif name == "star3":
        p = _star3(R)
    elif name == "line_with_bump":
        default = [(-1.0, 1.0), (1.0, 1.0), (1.0, 3.0), (-1.0, 3.0)]
        p = _line_with_bump(R, np.asarray(params.pop("bump", default)))
    elif name == "island":
        poly = params.pop("polygon", None)
        if poly is None:
            r = float(params.pop("radius", 3.0))
            ngon = int(params.pop("sides", 16))
            ang = 2 * math.pi * np.arange(ngon) / ngon
            poly = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
        p = _island_partition(R, np.asarray(poly))
    else:  # grid
        if params.pop("variant", None) == "chi4":
            p = _grid_chi4(R)
        else:
            p = _grid(R, int(params.pop("rows", 2)), int(params.pop("cols", 2)))
    if params:
        raise ValueError(f"unknown parameters {sorted(params)} for geometry {name!r}")
    validate_partition(p)
    return p


# ---------------------------------------------------------------------------
# neighbour graph and colouring
# ---------------------------------------------------------------------------

def adjacency_graph(p: Partition) -> Graph:
    nodes = tuple(sorted(s.id for s in p.subdomains))
    edges = sorted({(min(i.k, i.l), max(i.k, i.l)) for i in p.interfaces if i.length > 0})
    return Graph(nodes, tuple(edges))


MAX_EXACT_VERTICES = 24


def chromatic_colouring(g: Graph) -> Colouring:
    n = len(g.nodes)
    if n > MAX_EXACT_VERTICES:
        raise ValueError(f"exact colouring limited to {MAX_EXACT_VERTICES} vertices, got {n}")
    if n == 0:
        return Colouring(1, {})
    order = list(g.nodes)
    pos = {v: i for i, v in enumerate(order)}
    adj = [set() for _ in range(n)]
    for a, b in g.edges:
        adj[pos[a]].add(pos[b])
        adj[pos[b]].add(pos[a])
    if not g.edges:
        return Colouring(1, {v: 0 for v in order})
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from((pos[a], pos[b]) for a, b in g.edges)
    lower = max(len(c) for c in nx.find_cliques(G))
    upper = _greedy_bound(n, adj)
    for m in range(lower, upper + 1):
        assign = _try_colour(n, adj, m)
        if assign is not None:
            return Colouring(m, {order[i]: assign[i] for i in range(n)})
    raise AssertionError("greedy bound should always be feasible")


def _greedy_bound(n: int, adj: List[set]) -> int:
    colours = [-1] * n
    for v in sorted(range(n), key=lambda u: -len(adj[u])):
        used = {colours[u] for u in adj[v]}
        c = 0
        while c in used:
            c += 1
        colours[v] = c
    return max(colours) + 1


def _try_colour(n: int, adj: List[set], m: int) -> List[int] | None:
    """First (hence lexicographically smallest) proper m-colouring by DFS in
    vertex order with ascending colours, or None after exhaustive failure."""
    colours = [-1] * n

    def dfs(v: int) -> bool:
        if v == n:
            return True
        used = {colours[u] for u in adj[v] if colours[u] >= 0}
        # symmetry pruning: never introduce colour c before colours < c exist
        cap = min(m, max(colours[:v], default=-1) + 2)
        for c in range(cap):
            if c in used:
                continue
            colours[v] = c
            if dfs(v + 1):
                return True
            colours[v] = -1
        return False

    return colours[:] if dfs(0) else None


def edge_constant(chi: int) -> float:
    """Largest squared gap between adjacent unit phases, 4*sin^2(pi/chi)."""
    if chi < 2:
        raise ValueError(f"edge constant needs chi >= 2, got {chi}")
    s = math.sin(math.pi / chi)
    return 4.0 * s * s


_EXACT_PHASES = {0.0: 1 + 0j, 0.5: 1j, 1.0: -1 + 0j, 1.5: -1j}


def phase_assignment(p: Partition, c: Colouring, d: InteractionData) -> PhaseAssignment:
    g = adjacency_graph(p)
    for a, b in g.edges:
        if c.phi[a] == c.phi[b]:
            raise ValueError(f"colouring not proper on edge {(a, b)}")
    z: Dict[int, complex] = {}
    for sid in p.subdomain_ids():
        frac = 2.0 * c.phi[sid] / c.chi   # phase angle in units of pi
        zk = _EXACT_PHASES.get(frac % 2.0)
        if zk is None:
            zk = cmath.exp(2j * math.pi * c.phi[sid] / c.chi)
        z[sid] = zk
    alpha_z: Dict[int, float] = {}
    floor = edge_constant(c.chi)
    for itf in p.interfaces:
        gap = abs(z[itf.k] - z[itf.l]) ** 2
        alpha_z[itf.id] = gap / d.beta[itf.id]
        if gap < floor - 1e-12:
            raise AssertionError(
                f"phase gap {gap} below edge constant {floor} on interface {itf.id}")
    return PhaseAssignment(z, alpha_z)
