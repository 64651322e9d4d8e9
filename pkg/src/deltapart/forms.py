"""Discrete quadratic forms: the continuous-space form with attractive
boundary terms on interfaces, the broken-space form with trace-jump
coupling, the phase unitary, Rayleigh quotients, and the analytic test
function families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .geometry import InteractionData, PhaseAssignment
from .mesh import Mesh

__all__ = [
    "DiscreteForm",
    "assemble_delta",
    "assemble_delta_prime",
    "assemble_subdomain_robin",
    "embed_continuous",
    "apply_unitary",
    "rayleigh",
    "sample_test_function",
    "indicator_vector",
    "indicator_form_value",
    "bump",
    "bump_prime",
    "BUMP_L2SQ",
    "BUMP_GRAD_L2SQ",
]

# cutoff profile: 1 on [0,1], cubic smoothstep down to 0 on [1,2]
BUMP_L2SQ = 96.0 / 35.0       # L2 norm squared of bump over the real line
BUMP_GRAD_L2SQ = 12.0 / 5.0   # same for its derivative


def bump(s):
    s = np.abs(np.asarray(s, dtype=float))
    u = np.clip(s - 1.0, 0.0, 1.0)
    return np.where(s >= 2.0, 0.0, 1.0 - (3.0 * u * u - 2.0 * u ** 3))


def bump_prime(s):
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    u = np.clip(a - 1.0, 0.0, 1.0)
    mag = np.where(a >= 2.0, 0.0, -(6.0 * u - 6.0 * u * u))
    return np.sign(s) * mag


@dataclass(frozen=True)
class DiscreteForm:
    A: sp.csr_matrix
    M: sp.csr_matrix
    space: str                       # "continuous" | "broken"
    bc: str                          # "dirichlet" | "neumann"
    mesh: Mesh
    interaction: InteractionData | None
    dof_node: np.ndarray             # node index per (reduced) dof
    dof_subdomain: np.ndarray        # subdomain id per dof (0 for continuous)
    full_to_red: np.ndarray          # full dof index -> reduced index or -1
    coercivity_bound: float = 0.0    # certified lower bound on lambda_min(A, M)

    @property
    def n_dofs(self) -> int:
        return self.A.shape[0]

    def restrict(self, f_full: np.ndarray) -> np.ndarray:
        """Restrict a full-space vector (one entry per node for continuous,
        per (subdomain, node) for broken) to the kept dofs."""
        keep = np.flatnonzero(self.full_to_red >= 0)
        return np.asarray(f_full)[keep]


def _check_bc(bc: str) -> str:
    if bc not in ("dirichlet", "neumann"):
        raise ValueError(f"boundary policy must be dirichlet or neumann, got {bc!r}")
    return bc


def _element_entries(m: Mesh):
    tris = np.ascontiguousarray(m.triangles)
    stiff, mass, area = _kernels.p1_elements(np.ascontiguousarray(m.nodes), tris)
    rows = np.repeat(tris, 3, axis=1).reshape(-1)        # i index, row-major (i, j)
    cols = np.tile(tris, (1, 3)).reshape(-1)
    return rows, cols, np.asarray(stiff).reshape(-1), np.asarray(mass).reshape(-1), area


def _accumulate_csr(rows, cols, vals, n):
    """COO -> CSR with duplicates summed in emission order (stable lexsort),
    so matching (i, j)/(j, i) entry streams sum to bitwise-equal values."""
    rows = np.concatenate([np.asarray(r, dtype=np.int64).ravel() for r in rows])
    cols = np.concatenate([np.asarray(c, dtype=np.int64).ravel() for c in cols])
    vals = np.concatenate([np.asarray(v, dtype=float).ravel() for v in vals])
    order = np.lexsort((cols, rows))
    r, c, v = rows[order], cols[order], vals[order]
    first = np.flatnonzero(np.concatenate(
        [[True], (r[1:] != r[:-1]) | (c[1:] != c[:-1])]))
    sums = np.add.reduceat(v, first)
    return sp.csr_matrix((sums, (r[first], c[first])), shape=(n, n))


def _coupling_lower_bound(rows, vals, M):
    """Certified lower bound on lambda_min(A, M) when A = (psd stiffness)
    + the given boundary entries: the entries satisfy C <= c * lump(M) by
    Gershgorin row sums, and lump(M) <= 4 M for P1 mass, so A >= -4c M."""
    lump = np.asarray(M.sum(axis=1)).ravel()
    rows = np.asarray(rows, dtype=np.int64).ravel()
    if rows.size == 0:
        return 0.0
    absrow = np.zeros(lump.shape[0])
    np.add.at(absrow, rows, np.abs(np.asarray(vals, dtype=float).ravel()))
    used = absrow > 0.0
    c = float(np.max(absrow[used] / lump[used]))
    return -4.0 * c


def _reduce(A, M, keep_mask):
    keep = np.flatnonzero(keep_mask)
    full_to_red = np.full(keep_mask.shape[0], -1, dtype=np.int64)
    full_to_red[keep] = np.arange(keep.size)
    A = A.tocsr()[keep][:, keep]
    M = M.tocsr()[keep][:, keep]
    return A, M, full_to_red, keep


def _interface_alpha_entries(m: Mesh, strength: Dict[int, float]):
    """COO entries of -sum_I s_I * (edge mass on interface I), continuous dofs."""
    rows, cols, vals = [], [], []
    for q in range(m.iface_edge_nodes.shape[0]):
        iid = int(m.iface_edge_id[q])
        s = strength[iid]
        if s == 0.0:
            continue
        a, b = (int(x) for x in m.iface_edge_nodes[q])
        w = m.iface_edge_length[q] / 6.0
        rows += [a, a, b, b]
        cols += [a, b, a, b]
        vals += [-2.0 * s * w, -s * w, -s * w, -2.0 * s * w]
    return rows, cols, vals


def assemble_delta(m: Mesh, d: InteractionData, bc: str = "dirichlet") -> DiscreteForm:
    """Continuous P1 form: stiffness minus alpha-weighted edge mass on the
    interfaces, with the exact P1 edge and element mass matrices."""
    _check_bc(bc)
    for itf_id in np.unique(m.iface_edge_id):
        if int(itf_id) not in d.alpha:
            raise KeyError(f"interface id {int(itf_id)} missing from InteractionData")
    n = m.n_nodes
    er, ec, es, em, _ = _element_entries(m)
    ir, ic, iv = _interface_alpha_entries(m, d.alpha)
    A = _accumulate_csr([er, ir], [ec, ic], [es, iv], n)
    M = _accumulate_csr([er], [ec], [em], n)
    bound = _coupling_lower_bound(ir, iv, M)
    keep_mask = np.ones(n, dtype=bool)
    if bc == "dirichlet":
        keep_mask[m.outer_boundary_nodes] = False
    A, M, full_to_red, keep = _reduce(A, M, keep_mask)
    return DiscreteForm(A, M, "continuous", bc, m, d,
                        dof_node=keep, dof_subdomain=np.zeros(keep.size, dtype=np.int64),
                        full_to_red=full_to_red, coercivity_bound=bound)


def broken_dof_layout(m: Mesh):
    """Full broken layout: dofs blocked by subdomain id, nodes sorted within.

    Returns (dof_node, dof_subdomain, sub_node_dof) where sub_node_dof maps
    subdomain id -> array of length n_nodes with dof index or -1."""
    dof_node = []
    dof_sub = []
    sub_node_dof: Dict[int, np.ndarray] = {}
    offset = 0
    for sid in (int(s) for s in m.subdomain_ids()):
        nodes = np.unique(m.triangles[m.tri_subdomain == sid])
        lut = np.full(m.n_nodes, -1, dtype=np.int64)
        lut[nodes] = offset + np.arange(nodes.size)
        sub_node_dof[sid] = lut
        dof_node.append(nodes)
        dof_sub.append(np.full(nodes.size, sid, dtype=np.int64))
        offset += nodes.size
    return np.concatenate(dof_node), np.concatenate(dof_sub), sub_node_dof


def assemble_delta_prime(m: Mesh, d: InteractionData, bc: str = "dirichlet") -> DiscreteForm:
    """Broken P1 form: per-subdomain stiffness blocks minus the
    beta-inverse-weighted edge mass of the trace jump across interfaces."""
    _check_bc(bc)
    for itf_id in np.unique(m.iface_edge_id):
        if int(itf_id) not in d.beta:
            raise KeyError(f"interface id {int(itf_id)} missing from InteractionData")
    dof_node, dof_sub, sub_node_dof = broken_dof_layout(m)
    n = dof_node.size
    er, ec, es, em, _ = _element_entries(m)
    # re-index element entries per owning subdomain
    tri_lut = np.empty((m.n_triangles, 3), dtype=np.int64)
    for sid, lut in sub_node_dof.items():
        mask = m.tri_subdomain == sid
        tri_lut[mask] = lut[m.triangles[mask]]
    brows = np.repeat(tri_lut, 3, axis=1).reshape(-1)
    bcols = np.tile(tri_lut, (1, 3)).reshape(-1)
    rows, cols, vals = [brows], [bcols], [es]
    jr, jc, jv = [], [], []
    for q in range(m.iface_edge_nodes.shape[0]):
        iid = int(m.iface_edge_id[q])
        c = 1.0 / d.beta[iid]
        if c == 0.0:
            continue
        a, b = (int(x) for x in m.iface_edge_nodes[q])
        k, l = (int(x) for x in m.iface_edge_kl[q])
        ak, bk = int(sub_node_dof[k][a]), int(sub_node_dof[k][b])
        al, bl = int(sub_node_dof[l][a]), int(sub_node_dof[l][b])
        w = m.iface_edge_length[q] / 6.0
        # -c * [jump]^T E [jump] with E = w*[[2,1],[1,2]]
        loc = [ak, bk, al, bl]
        E = np.array([[2.0, 1.0], [1.0, 2.0]]) * w
        L = -c * np.block([[E, -E], [-E, E]])
        for i in range(4):
            for j in range(4):
                jr.append(loc[i])
                jc.append(loc[j])
                jv.append(L[i, j])
    rows.append(np.asarray(jr, dtype=np.int64))
    cols.append(np.asarray(jc, dtype=np.int64))
    vals.append(np.asarray(jv))
    A = _accumulate_csr(rows, cols, vals, n)
    M = _accumulate_csr([brows], [bcols], [em], n)
    bound = _coupling_lower_bound(jr, jv, M)
    keep_mask = np.ones(n, dtype=bool)
    if bc == "dirichlet":
        outer = np.zeros(m.n_nodes, dtype=bool)
        outer[m.outer_boundary_nodes] = True
        keep_mask = ~outer[dof_node]
    A, M, full_to_red, keep = _reduce(A, M, keep_mask)
    return DiscreteForm(A, M, "broken", bc, m, d,
                        dof_node=dof_node[keep], dof_subdomain=dof_sub[keep],
                        full_to_red=full_to_red, coercivity_bound=bound)


def assemble_subdomain_robin(m: Mesh, k: int, gamma: float,
                             bc: str = "dirichlet") -> DiscreteForm:
    """Single-subdomain form: stiffness on subdomain k minus gamma times the
    edge mass of its interface edges (the attractive boundary term of the
    wedge trace estimates)."""
    _check_bc(bc)
    mask = m.tri_subdomain == k
    if not np.any(mask):
        raise ValueError(f"no triangles in subdomain {k}")
    nodes = np.unique(m.triangles[mask])
    lut = np.full(m.n_nodes, -1, dtype=np.int64)
    lut[nodes] = np.arange(nodes.size)
    er, ec, es, em, _ = _element_entries(m)
    sel = np.repeat(mask, 9)
    rows = [lut[er[sel]]]
    cols = [lut[ec[sel]]]
    avals = [es[sel]]
    jr, jc, jv = [], [], []
    for q in range(m.iface_edge_nodes.shape[0]):
        if k not in (int(m.iface_edge_kl[q, 0]), int(m.iface_edge_kl[q, 1])):
            continue
        a, b = (int(lut[x]) for x in m.iface_edge_nodes[q])
        w = m.iface_edge_length[q] / 6.0
        jr += [a, a, b, b]
        jc += [a, b, a, b]
        jv += [-2.0 * gamma * w, -gamma * w, -gamma * w, -2.0 * gamma * w]
    rows.append(np.asarray(jr, dtype=np.int64))
    cols.append(np.asarray(jc, dtype=np.int64))
    avals.append(np.asarray(jv))
    n = nodes.size
    A = _accumulate_csr(rows, cols, avals, n)
    M = _accumulate_csr([rows[0]], [cols[0]], [em[sel]], n)
    bound = _coupling_lower_bound(jr, jv, M)
    keep_mask = np.ones(n, dtype=bool)
    if bc == "dirichlet":
        outer = np.zeros(m.n_nodes, dtype=bool)
        outer[m.outer_boundary_nodes] = True
        keep_mask = ~outer[nodes]
    A, M, full_to_red, keep = _reduce(A, M, keep_mask)
    return DiscreteForm(A, M, "continuous", bc, m, None,
                        dof_node=nodes[keep],
                        dof_subdomain=np.full(keep.size, k, dtype=np.int64),
                        full_to_red=full_to_red, coercivity_bound=bound)


def embed_continuous(bf: DiscreteForm, f: np.ndarray) -> np.ndarray:
    """Copy a continuous vector (same mesh, same boundary policy) into the
    broken space: every duplicated dof receives the nodal value."""
    if bf.space != "broken":
        raise ValueError("embedding target must be a broken form")
    f = np.asarray(f)
    nodal = np.zeros(bf.mesh.n_nodes, dtype=f.dtype)
    if bf.bc == "dirichlet":
        keep_nodes = np.setdiff1d(np.arange(bf.mesh.n_nodes), bf.mesh.outer_boundary_nodes)
    else:
        keep_nodes = np.arange(bf.mesh.n_nodes)
    if f.shape[0] != keep_nodes.size:
        raise ValueError(f"continuous vector has {f.shape[0]} entries, "
                         f"expected {keep_nodes.size} (mesh mismatch)")
    nodal[keep_nodes] = f
    return nodal[bf.dof_node]


def apply_unitary(ph: PhaseAssignment, bf: DiscreteForm, f: np.ndarray) -> np.ndarray:
    if bf.space != "broken":
        raise ValueError("the phase unitary acts on broken vectors")
    z = np.array([ph.z[int(s)] for s in bf.dof_subdomain])
    return np.asarray(f, dtype=complex) * z


def form_value(df: DiscreteForm, f: np.ndarray) -> float:
    f = np.asarray(f)
    return float(np.real(np.vdot(f, df.A @ f)))


def rayleigh(df: DiscreteForm, f: np.ndarray) -> float:
    f = np.asarray(f)
    denom = float(np.real(np.vdot(f, df.M @ f)))
    if denom <= 0.0:
        raise ValueError("vector vanishes in the mass norm")
    return float(np.real(np.vdot(f, df.A @ f))) / denom


FAMILIES = ("deformation_fn", "wedge_psi_np", "transverse_exp")


def sample_test_function(m: Mesh, family: str, params: dict) -> np.ndarray:
    """Nodal interpolation of an analytic family. Continuous families return
    one value per node; wedge_psi_np returns a full broken complex vector for
    the layout of params["form"]."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    x = m.nodes[:, 0]
    y = m.nodes[:, 1]
    R = m.box_radius
    if family == "transverse_exp":
        alpha = float(params["alpha"])
        return np.exp(-0.5 * alpha * np.abs(y))
    if family == "deformation_fn":
        n = float(params["n"])
        alpha = float(params["alpha"])
        center = float(params.get("center", 0.0))
        if abs(center) + 2.0 * n > R:
            raise ValueError("cutoff support exceeds the box")
        return bump((x - center) / n) * np.exp(-0.5 * alpha * np.abs(y))
    # wedge_psi_np: broken, complex, sign flip across the interface ray
    if "form" in params:
        bf = params["form"]
        if bf.space != "broken":
            raise ValueError("wedge_psi_np needs a broken dof layout")
        dof_node, dof_subdomain = bf.dof_node, bf.dof_subdomain
    elif "layout" in params:
        dof_node, dof_subdomain = params["layout"]
    else:
        raise ValueError("wedge_psi_np needs params['form'] or params['layout']")
    n = float(params["n"])
    p = float(params.get("p", 0.0))
    beta = float(params["beta"])
    center = float(params["center"])
    angle = float(params.get("angle", 0.0))
    upper = int(params.get("upper", 1))
    ray_length = float(params.get("ray_length", R))
    if center - 2.0 * n < 0.0 or center + 2.0 * n > ray_length:
        raise ValueError("cutoff support exceeds the interface ray")
    ct, st = np.cos(angle), np.sin(angle)
    nx = m.nodes[dof_node]
    xr = nx[:, 0] * ct + nx[:, 1] * st
    yr = -nx[:, 0] * st + nx[:, 1] * ct
    tol = 1e-12 * max(R, 1.0)
    sign = np.where(yr > tol, 1.0, np.where(yr < -tol, -1.0,
                    np.where(dof_subdomain == upper, 1.0, -1.0)))
    vals = (1.0 / np.sqrt(n)) * bump(np.abs(xr - center) / n) * bump(np.abs(yr) / n) \
        * sign * np.exp(-2.0 * np.abs(yr) / beta) * np.exp(1j * p * xr)
    return vals


def indicator_vector(bf: DiscreteForm, k: int) -> np.ndarray:
    if bf.bc != "neumann":
        raise ValueError("the subdomain indicator is only admissible with neumann policy")
    return (bf.dof_subdomain == k).astype(float)


def indicator_form_value(bf: DiscreteForm, k: int) -> float:
    """Exact form value of the indicator of subdomain k: minus the
    beta-inverse-weighted total length of its interfaces."""
    if bf.bc != "neumann":
        raise ValueError("the subdomain indicator is only admissible with neumann policy")
    if bf.space != "broken" or bf.interaction is None:
        raise ValueError("indicator values are defined for assembled broken forms")
    m = bf.mesh
    total = 0.0
    for q in range(m.iface_edge_nodes.shape[0]):
        if k in (int(m.iface_edge_kl[q, 0]), int(m.iface_edge_kl[q, 1])):
            total += m.iface_edge_length[q] / bf.interaction.beta[int(m.iface_edge_id[q])]
    return -total


def export_matrix(a: sp.spmatrix) -> str:
    """Coordinate text dump "i j value" (1-based, sorted by row then column)."""
    coo = a.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.row[q] + 1} {coo.col[q] + 1} {float(coo.data[q])!r}"
             for q in order]
    return "\n".join(lines) + "\n"
