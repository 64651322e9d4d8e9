"""Acceptance gate: thirteen pinned criteria, one PASS/FAIL line each.

Each test prints a single summary line (visible with -s or in captured
output) and asserts the criterion with its stated tolerance.  Sizes and
tolerances are pinned here on purpose; do not loosen them to make a red
test green.
"""

import math
import time

import numpy as np
import pytest
import scipy.linalg as sla

from deltapart import (closedform, eigen, experiments, forms, geometry,
                       mesh)


def _line(num, name, ok, detail=""):
    print(f"[acceptance {num:02d}] {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num} ({name}) failed {detail}"


# -- 1: eigenvalue ordering on three geometries -----------------------------

def test_01_ordering():
    t0 = time.perf_counter()
    runs = [
        ("star3", None, 1.0, 3.0, 6.0, 6),
        ("half_plane", None, 1.0, 4.0, 6.0, 6),
        ("grid", {"variant": "chi4"}, 1.0, 2.0, 6.0, 5),
    ]
    ok = True
    dofs = []
    for name, params, alpha, beta, R, levels in runs:
        rep = experiments.run_ordering(
            geometry_name=name, geometry_params=params, alpha=alpha,
            beta=beta, k=10, box_radius=R, levels=levels)
        ok = ok and rep.passed and rep.quantities["hypothesis_ok"]
        dofs.append(rep.quantities["dofs_continuous"])
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0
    _line(1, "ordering lambda_j(delta') <= lambda_j(delta) + 1e-10*scale",
          ok, f"dofs={dofs} time={elapsed:.1f}s")


# -- 2: unitary form identity on every canonical geometry -------------------

def test_02_unitary_identity():
    cases = [("half_plane", None, 3), ("wedge", None, 3), ("star3", None, 3),
             ("line_with_bump", None, 3), ("grid", {"variant": "chi4"}, 3),
             ("island", None, 3)]
    worst = 0.0
    ok = True
    for name, params, levels in cases:
        rep = experiments.run_unitary_identity(
            geometry_name=name, geometry_params=params, trials=100,
            levels=levels)
        ok = ok and rep.passed
        worst = max(worst, max(a.computed for a in rep.assertions))
    _line(2, "unitary identity, 100 random vectors/geometry <= 1e-11*scale",
          ok, f"worst deviation {worst:.2e}")


# -- 3: indicator identity --------------------------------------------------

def test_03_indicator_identity():
    rep = experiments.run_indicator_bound_state()
    _line(3, "indicator form value = -sum beta^-1 |interface| (1e-12 rel), "
             "lambda_1 < 0", rep.passed)


# -- 4: half-plane thresholds ----------------------------------------------

def test_04_halfplane_thresholds():
    t0 = time.perf_counter()
    rd = experiments.run_threshold_convergence(operator="delta", strength=1.0)
    td = time.perf_counter() - t0
    t0 = time.perf_counter()
    rb = experiments.run_threshold_convergence(operator="delta-prime",
                                               strength=2.0)
    tb = time.perf_counter() - t0
    lam_d = rd.quantities["lambda1"][-1]
    lam_b = rb.quantities["lambda1"][-1]
    ok = (rd.passed and rb.passed and abs(lam_d + 0.25) <= 0.02
          and abs(lam_b + 1.0) <= 0.05 and td <= 300.0 and tb <= 300.0)
    # companion check from the module contract: wedge Rayleigh quotients
    rw = experiments.run_threshold_convergence(
        geometry_name="wedge", operator="delta-prime", strength=2.0)
    ok = ok and rw.passed
    _line(4, "half-plane |lam+0.25|<=0.02, |lam+1|<=0.05, monotone in R",
          ok, f"delta {lam_d:.4f} ({td:.0f}s), delta' {lam_b:.4f} ({tb:.0f}s), "
              f"wedge R32 {rw.quantities['rayleigh_quotients'][-1]:.4f}")


# -- 5 & 6: star bounds -----------------------------------------------------

@pytest.fixture(scope="module")
def star_report():
    return experiments.run_star_bounds()


def test_05_star_delta_bottom(star_report):
    rep = star_report
    certified = [a for a in rep.assertions
                 if a.name.startswith("R=") and "alpha^2/3" in a.name]
    gaps = [a for a in rep.assertions if a.name.startswith("gap monotone")
            or a.name.startswith("final gap")]
    ok = (len(certified) == 3 and all(a.passed for a in certified)
          and all(a.passed for a in gaps))
    final = [a for a in rep.assertions if a.name.startswith("final gap")][0]
    ok = ok and final.computed <= 0.06
    _line(5, "star delta: certified lambda_1 >= -1/3 - 1e-9, gap <= 0.06, "
             "monotone", ok, f"final gap {final.computed:.2e}")


def test_06_star_delta_prime_bound(star_report):
    rep = star_report
    certified = [a for a in rep.assertions if "minimax" in a.name]
    ok = len(certified) == 3 and all(a.passed for a in certified)
    # printed-constant comparison is recorded, never asserted
    ok = ok and "printed_bottom_delta_prime" in rep.quantities
    _line(6, "star delta': certified lambda_1 >= -(derived minimax)/beta^2 "
             "- 1e-9; printed constant recorded only", ok,
          f"recorded printed bottom "
          f"{rep.quantities['printed_bottom_delta_prime']:.4f}")


# -- 7: the (omega, t) minimax ---------------------------------------------

def test_07_minimax():
    rep = closedform.minimax_star()
    ok = (abs(rep.value - rep.grid_oracle_value) <= 1e-8
          and abs(rep.m1_at_opt - rep.m2_at_opt) <= 1e-12 * rep.m1_at_opt
          and rep.branch_t_ge_1 == 16.0 / 3.0
          and abs(rep.t_star - 0.5) <= 1e-6)
    _line(7, "minimax: analytic vs 1e6-point oracle 1e-8, M1=M2 1e-12, "
             "t>=1 branch 16/3, t*=1/2 within 1e-6", ok,
          f"value {rep.value:.15f}")


# -- 8: 1D interval jump eigenvalue ----------------------------------------

def test_08_interval():
    pairs = [(0.5, 1.0), (1.0, 3.0), (2.0, 5.0), (2.0, 40.0), (3.0, 2.0),
             (5.0, 8.0)]
    ok = True
    for beta, l in pairs:
        r = closedform.interval_delta_prime(beta, l)
        thr = -4.0 / beta ** 2
        ok = ok and r.epsilon < thr + 8 * np.finfo(float).eps * abs(thr)
        if l <= 10.0:
            # P1 eigenvalue error is k^4 h^2 / 12; at 1e4 elements the
            # oracle resolves 1e-6 only for intervals up to this length
            fem = closedform.interval_fem_oracle(beta, l, n_elems=10000)
            ok = ok and abs(fem - r.epsilon) <= 1e-6 * abs(r.epsilon)
    special = closedform.interval_delta_prime(2.0, 40.0)
    ok = ok and abs(special.epsilon + 1.0) <= 1e-10
    _line(8, "interval: root vs 1e4-element FEM 1e-6 rel, strict threshold, "
             "|eps(2,40)+1| <= 1e-10", ok,
          f"eps(2,40) = {special.epsilon:.12f}")


# -- 9: six-vector sum inequality ------------------------------------------

def test_09_sum_inequality():
    rng = np.random.default_rng(2024)
    violations = 0
    for _ in range(100_000):
        th = rng.standard_normal((3, 3))
        et = rng.standard_normal((3, 3))
        w = rng.uniform(0.0, 1.0)
        t = rng.uniform(0.02, 8.0)
        _, _, holds = closedform.abc_inequality_check(th, et, w, t)
        violations += not holds
    _line(9, "sum inequality: 1e5 random samples, zero violations beyond "
             "1e-12 relative", violations == 0, f"violations={violations}")


# -- 10: wedge trace bounds -------------------------------------------------

def test_10_wedge_trace_bounds():
    gamma = 1.0
    ok = True
    sharp = None
    for phi in (math.pi / 3, 2 * math.pi / 3, math.pi):
        p = geometry.build_canonical_partition(
            "wedge", {"phi": phi, "box_radius": 12.0})
        m = mesh.triangulate(p, 6)
        df = forms.assemble_subdomain_robin(m, 1, gamma, "dirichlet")
        lam = float(eigen.lowest_eigenpairs(
            df.A, df.M, 1, lower_bound=df.coercivity_bound).eigenvalues[0])
        bound = closedform.wedge_trace_bound(gamma, phi)
        ok = ok and lam >= bound - 1e-9
        if abs(phi - 2 * math.pi / 3) < 1e-12:
            sharp = (lam - bound) / abs(bound)
            ok = ok and sharp <= 0.10
    _line(10, "wedge trace: discrete min >= -gamma^2/sin^2(phi/2) - 1e-9; "
              "2pi/3 within 10%", ok, f"2pi/3 relative gap {sharp:.3f}")


# -- 11: deformation bound state -------------------------------------------

def test_11_deformation():
    rep = experiments.run_deformation_bound_state()
    lam = rep.quantities["lambda1_delta"]
    ok = rep.passed and lam < -0.25
    _line(11, "deformation: I_64 < 0, lambda_1 < -alpha^2/4, "
              "delta' companion below", ok, f"lambda_1 = {lam:.6f}")


# -- 12: even/odd decomposition --------------------------------------------

def test_12_even_odd():
    p = geometry.build_canonical_partition("wedge", {"box_radius": 4.0})
    m = mesh.triangulate(p, 4)
    d = geometry.InteractionData.uniform(p, 1.0, 1.0)
    df = forms.assemble_delta(m, d, "neumann")
    rng = np.random.default_rng(12)
    # one spare mantissa bit keeps every halved pair sum representable
    f = rng.standard_normal(m.n_nodes).astype(np.float32).astype(float)
    even, odd = mesh.reflect_split(m, m.symmetry_axis, f)
    exact = np.array_equal(even + odd, f)
    on_axis = np.abs(m.nodes[:, 0] - m.symmetry_axis) <= 1e-12
    axis_zero = bool(np.all(odd[on_axis] == 0.0))
    m_scale = float(f @ (df.M @ f))
    a_scale = abs(float(f @ (df.A @ f))) + m_scale
    ortho = (abs(even @ (df.M @ odd)) <= 1e-10 * m_scale
             and abs(even @ (df.A @ odd)) <= 1e-10 * a_scale)
    ok = exact and axis_zero and ortho
    _line(12, "even/odd: recombination exact, orthogonality <= 1e-10*scale, "
              "odd = 0 on bisector", ok)


# -- 13: solver cross-validation -------------------------------------------

def test_13_solver_cross_validation():
    cases = [
        ("star3", 3, "delta", "dirichlet"),
        ("star3", 3, "delta-prime", "neumann"),
        ("half_plane", 4, "delta", "dirichlet"),
        ("island", 3, "delta-prime", "neumann"),
        ("line_with_bump", 3, "delta", "neumann"),
        ("wedge", 4, "delta-prime", "dirichlet"),
    ]
    worst = 0.0
    sizes = []
    ok = True
    for name, levels, op, bc in cases:
        p = geometry.build_canonical_partition(name, {"box_radius": 4.0})
        m = mesh.triangulate(p, levels)
        d = geometry.InteractionData.uniform(p, 1.0, 2.0)
        maker = (forms.assemble_delta if op == "delta"
                 else forms.assemble_delta_prime)
        df = maker(m, d, bc)
        n = df.A.shape[0]
        assert n <= 2000, (name, n)
        sizes.append(n)
        r = eigen.lowest_eigenpairs(df.A, df.M, 5,
                                    lower_bound=df.coercivity_bound)
        ref = eigen.dense_eigen_oracle(df.A, df.M)[:5]
        rel = float(np.max(np.abs(r.eigenvalues - ref)
                           / np.maximum(1.0, np.abs(ref))))
        worst = max(worst, rel)
        ok = ok and rel <= 1e-8
    _line(13, "solver vs dense oracle <= 1e-8 relative, k=5, <= 2000 dofs",
          ok, f"sizes={sizes} worst={worst:.2e}")
