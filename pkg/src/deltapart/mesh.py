"""Conforming triangulations of a Partition: ear-clipped coarse meshes,
uniform 4-way refinement, tagged interface edges, and the even/odd
reflection utilities used on symmetric wedge meshes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Partition, _VertexPool, _cross2, _loop_area

__all__ = ["Mesh", "triangulate", "reflect_split", "export_mesh"]


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray                # (n, 2)
    triangles: np.ndarray            # (m, 3) int64
    tri_subdomain: np.ndarray        # (m,) int64
    iface_edge_nodes: np.ndarray     # (q, 2) int64, node pair per interface edge
    iface_edge_id: np.ndarray        # (q,) interface id
    iface_edge_kl: np.ndarray        # (q, 2) adjacent subdomain ids (k, l)
    iface_edge_normal: np.ndarray    # (q, 2) unit normal oriented from k to l
    iface_edge_length: np.ndarray    # (q,)
    outer_boundary_nodes: np.ndarray  # sorted node indices on the box boundary
    refinement_level: int
    box_radius: float
    symmetry_axis: float | None = None

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def subdomain_ids(self) -> np.ndarray:
        return np.unique(self.tri_subdomain)


# ---------------------------------------------------------------------------
# ear clipping
# ---------------------------------------------------------------------------

def _ear_clip(coords: List[Tuple[float, float]], loop: Sequence[int]) -> List[Tuple[int, int, int]]:
    remain = list(loop)
    if len(remain) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    pts = {i: np.asarray(coords[i]) for i in remain}
    span = max(max(abs(pts[i][0]), abs(pts[i][1])) for i in remain)
    eps = 1e-12 * max(span, 1.0) ** 2
    tris: List[Tuple[int, int, int]] = []
    while len(remain) > 3:
        n = len(remain)
        clipped = False
        for ii in range(n):
            a = remain[ii - 1]
            b = remain[ii]
            c = remain[(ii + 1) % n]
            pa, pb, pc = pts[a], pts[b], pts[c]
            area2 = _cross2(pb - pa, pc - pa)
            if area2 <= eps:
                continue  # reflex or collinear corner
            blocked = False
            for v in remain:
                if v in (a, b, c):
                    continue
                pv = pts[v]
                s1 = _cross2(pb - pa, pv - pa)
                s2 = _cross2(pc - pb, pv - pb)
                s3 = _cross2(pa - pc, pv - pc)
                if s1 >= -eps and s2 >= -eps and s3 >= -eps:
                    blocked = True
                    break
            if blocked:
                continue
            tris.append((a, b, c))
            del remain[ii]
            clipped = True
            break
        if not clipped:
            raise ValueError("ear clipping failed; polygon is likely non-simple")
    a, b, c = remain
    if _cross2(pts[b] - pts[a], pts[c] - pts[a]) <= eps:
        raise ValueError("degenerate final triangle in ear clipping")
    tris.append((a, b, c))
    return tris


def _clip_right_of_axis(coords: List[Tuple[float, float]], tol: float):
    """Sutherland-Hodgman clip of a CCW polygon against x >= 0."""
    out: List[Tuple[float, float]] = []
    n = len(coords)
    for i in range(n):
        cx, cy = coords[i]
        nxx, nxy = coords[(i + 1) % n]
        cin = cx >= -tol
        nin = nxx >= -tol
        if cin:
            out.append((cx, cy))
        if cin != nin:
            t = cx / (cx - nxx)
            out.append((0.0, cy + t * (nxy - cy)))
    cleaned: List[Tuple[float, float]] = []
    for pt in out:
        if cleaned and abs(pt[0] - cleaned[-1][0]) < tol and abs(pt[1] - cleaned[-1][1]) < tol:
            continue
        cleaned.append(pt)
    if len(cleaned) >= 2 and abs(cleaned[0][0] - cleaned[-1][0]) < tol \
            and abs(cleaned[0][1] - cleaned[-1][1]) < tol:
        cleaned.pop()
    return cleaned if len(cleaned) >= 3 else None


# ---------------------------------------------------------------------------
# coarse triangulation
# ---------------------------------------------------------------------------

def _coarse_mesh(p: Partition):
    pool = _VertexPool(p.box_radius)
    for x, y in p.vertices:
        pool.add(x, y)
    tris: List[Tuple[int, int, int]] = []
    tri_sub: List[int] = []
    tol = 1e-12 * max(p.box_radius, 1.0)
    for sub in p.subdomains:
        for loop in sub.loops:
            if p.symmetry_axis is None:
                cell_tris = _ear_clip(pool.coords, loop)
            else:
                if abs(p.symmetry_axis) > tol:
                    raise ValueError("only the axis x = 0 is supported")
                coords = [pool.coords[i] for i in loop]
                right = _clip_right_of_axis(coords, tol)
                if right is None:
                    raise ValueError("symmetric meshing expects every cell to "
                                     "straddle or touch the axis")
                ridx = [pool.add(x, y) for x, y in right]
                half = _ear_clip(pool.coords, ridx)
                cell_tris = list(half)
                for a, b, c in half:
                    ma = pool.add(-pool.coords[a][0], pool.coords[a][1])
                    mb = pool.add(-pool.coords[b][0], pool.coords[b][1])
                    mc = pool.add(-pool.coords[c][0], pool.coords[c][1])
                    if len({ma, mb, mc}) == 3 and (ma, mb, mc) != (a, b, c):
                        cell_tris.append((mc, mb, ma))
            tris.extend(cell_tris)
            tri_sub.extend([sub.id] * len(cell_tris))
    nodes = pool.array()
    triangles = np.asarray(tris, dtype=np.int64)
    tri_subdomain = np.asarray(tri_sub, dtype=np.int64)
    return nodes, triangles, tri_subdomain


def _point_on_segment(pt, a, b, tol) -> bool:
    ab = b - a
    ap = pt - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return False
    t = float(ap @ ab) / L2
    if t < -tol or t > 1 + tol:
        return False
    d = ap - t * ab
    return float(d @ d) <= tol * tol * L2


def _derive_interface_edges(p: Partition, nodes, triangles, tri_subdomain):
    edge_map: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for t in range(triangles.shape[0]):
        a, b, c = triangles[t]
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            key = (min(u, v), max(u, v))
            edge_map.setdefault(key, []).append((t, w))
    seg_cache = [(itf, [(p.vertices[i], p.vertices[j]) for i, j in itf.segments])
                 for itf in p.interfaces]
    tol = 1e-9
    rows = []
    for (u, v), owners in sorted(edge_map.items()):
        if len(owners) != 2:
            continue
        (t1, w1), (t2, w2) = owners
        s1, s2 = tri_subdomain[t1], tri_subdomain[t2]
        if s1 == s2:
            continue
        mid = 0.5 * (nodes[u] + nodes[v])
        parent = None
        for itf, segs in seg_cache:
            if {itf.k, itf.l} != {int(s1), int(s2)}:
                continue
            if any(_point_on_segment(mid, a, b, tol) for a, b in segs):
                parent = itf
                break
        if parent is None:
            raise ValueError(f"triangulation edge {(u, v)} separates subdomains "
                             f"{s1}/{s2} but lies on no interface")
        opp = w1 if tri_subdomain[t1] == parent.k else w2
        e = nodes[v] - nodes[u]
        length = float(np.hypot(e[0], e[1]))
        n0 = np.array([e[1], -e[0]]) / length
        if float(n0 @ (nodes[opp] - mid)) > 0:
            n0 = -n0
        rows.append((u, v, parent.id, parent.k, parent.l, n0[0], n0[1], length))
    if not rows:
        arr = lambda shape: np.zeros(shape, dtype=np.int64)
        return (arr((0, 2)), arr(0), arr((0, 2)), np.zeros((0, 2)), np.zeros(0))
    raw = np.array(rows, dtype=float)
    return (raw[:, 0:2].astype(np.int64), raw[:, 2].astype(np.int64),
            raw[:, 3:5].astype(np.int64), raw[:, 5:7], raw[:, 7])


# ---------------------------------------------------------------------------
# uniform refinement
# ---------------------------------------------------------------------------

def _refine_once(nodes, triangles, tri_subdomain, iface_nodes):
    tri = triangles
    pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=0)
    pairs = np.sort(pairs, axis=1)
    n = nodes.shape[0]
    codes = pairs[:, 0] * n + pairs[:, 1]
    uniq, inv = np.unique(codes, return_inverse=True)
    ua = uniq // n
    ub = uniq % n
    mids = 0.5 * (nodes[ua] + nodes[ub])
    new_nodes = np.vstack([nodes, mids])
    mid_idx = n + np.arange(uniq.shape[0])
    m = tri.shape[0]
    mab = mid_idx[inv[0:m]]
    mbc = mid_idx[inv[m:2 * m]]
    mca = mid_idx[inv[2 * m:3 * m]]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    children = np.concatenate([
        np.stack([a, mab, mca], axis=1),
        np.stack([mab, b, mbc], axis=1),
        np.stack([mca, mbc, c], axis=1),
        np.stack([mab, mbc, mca], axis=1),
    ], axis=0)
    child_sub = np.concatenate([tri_subdomain] * 4)
    # reorder so the 4 children of triangle t are contiguous (determinism)
    order = np.argsort(np.tile(np.arange(m), 4), kind="stable")
    children = children[order]
    child_sub = child_sub[order]
    if iface_nodes.shape[0]:
        ip = np.sort(iface_nodes, axis=1)
        icodes = ip[:, 0] * n + ip[:, 1]
        pos = np.searchsorted(uniq, icodes)
        imid = mid_idx[pos]
        left = np.stack([iface_nodes[:, 0], imid], axis=1)
        right = np.stack([imid, iface_nodes[:, 1]], axis=1)
        new_iface = np.concatenate([left, right], axis=0)
        half_order = np.argsort(np.tile(np.arange(iface_nodes.shape[0]), 2), kind="stable")
        new_iface = new_iface[half_order]
    else:
        new_iface = iface_nodes
    return new_nodes, children, child_sub, new_iface


def triangulate(p: Partition, levels: int) -> Mesh:
    if levels < 0:
        raise ValueError("levels must be >= 0")
    nodes, triangles, tri_subdomain = _coarse_mesh(p)
    (iface_nodes, iface_id, iface_kl, iface_normal,
     iface_len) = _derive_interface_edges(p, nodes, triangles, tri_subdomain)
    for _ in range(levels):
        nodes, triangles, tri_subdomain, iface_nodes = _refine_once(
            nodes, triangles, tri_subdomain, iface_nodes)
        iface_id = np.repeat(iface_id, 2)
        iface_kl = np.repeat(iface_kl, 2, axis=0)
        iface_normal = np.repeat(iface_normal, 2, axis=0)
        iface_len = np.repeat(iface_len, 2) / 2.0
    R = p.box_radius
    tol = 1e-9 * max(R, 1.0)
    on_box = (np.abs(np.abs(nodes[:, 0]) - R) < tol) | (np.abs(np.abs(nodes[:, 1]) - R) < tol)
    outer = np.flatnonzero(on_box).astype(np.int64)
    m = Mesh(nodes, triangles, tri_subdomain, iface_nodes, iface_id, iface_kl,
             iface_normal, iface_len, outer, levels, R, p.symmetry_axis)
    _check_mesh(p, m)
    return m


def _check_mesh(p: Partition, m: Mesh) -> None:
    pa = m.nodes[m.triangles[:, 0]]
    pb = m.nodes[m.triangles[:, 1]]
    pc = m.nodes[m.triangles[:, 2]]
    areas = 0.5 * ((pb[:, 0] - pa[:, 0]) * (pc[:, 1] - pa[:, 1])
                   - (pb[:, 1] - pa[:, 1]) * (pc[:, 0] - pa[:, 0]))
    if not np.all(areas > 0):
        raise AssertionError("mesh contains non-positive triangle areas")
    # triangles tile each subdomain
    for sub in p.subdomains:
        target = sum(_loop_area(p.vertices, loop) for loop in sub.loops)
        got = float(np.sum(areas[m.tri_subdomain == sub.id]))
        if abs(got - target) > 1e-9 * target:
            raise AssertionError(f"subdomain {sub.id} area mismatch: {got} vs {target}")
    # interface edge lengths add up per interface
    for itf in p.interfaces:
        got = float(np.sum(m.iface_edge_length[m.iface_edge_id == itf.id]))
        if abs(got - itf.length) > 1e-12 * max(itf.length, 1.0):
            raise AssertionError(f"interface {itf.id} length mismatch: {got} vs {itf.length}")


# ---------------------------------------------------------------------------
# reflection utilities
# ---------------------------------------------------------------------------

def mirror_permutation(m: Mesh, axis: float) -> np.ndarray:
    mirrored = m.nodes.copy()
    mirrored[:, 0] = 2.0 * axis - mirrored[:, 0]
    tree = cKDTree(m.nodes)
    dist, perm = tree.query(mirrored, k=1)
    scale = max(m.box_radius, 1.0)
    if np.max(dist) > 1e-9 * scale or not np.array_equal(np.sort(perm), np.arange(m.n_nodes)):
        raise ValueError("mesh is not reflection-symmetric about the axis")
    return perm.astype(np.int64)


def reflect_split(m: Mesh, axis: float, f: np.ndarray):
    """Even/odd split of a nodal vector across the vertical line x = axis.

    The parts are the exact symmetric/antisymmetric projections, so the odd
    part vanishes exactly on axis nodes and the two parts are mass- and
    stiffness-orthogonal to rounding.  even + odd recovers f bit-for-bit
    whenever the halved pair sums are representable (one spare mantissa bit
    suffices); for fully dense mantissas it is exact to one ulp, which is
    the best any fixed splitting can do when |f - f_mirror| > 2|f|."""
    perm = mirror_permutation(m, axis)
    f = np.asarray(f, dtype=float)
    even = (f + f[perm]) * 0.5
    odd = (f - f[perm]) * 0.5          # exactly zero on axis fixed points
    return even, odd


def export_mesh(m: Mesh) -> str:
    """Plain-text dump: "v x y", "t i j k domain", "e i j interface k l"
    (1-based node indices)."""
    lines = []
    for x, y in m.nodes:
        lines.append(f"v {float(x)!r} {float(y)!r}")
    for t in range(m.n_triangles):
        a, b, c = m.triangles[t] + 1
        lines.append(f"t {a} {b} {c} {m.tri_subdomain[t]}")
    for q in range(m.iface_edge_nodes.shape[0]):
        i, j = m.iface_edge_nodes[q] + 1
        k, l = m.iface_edge_kl[q]
        lines.append(f"e {i} {j} {m.iface_edge_id[q]} {k} {l}")
    return "\n".join(lines) + "\n"
