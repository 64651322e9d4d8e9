import math

import numpy as np
import pytest

from deltapart import closedform


def test_halfplane_bottoms():
    assert closedform.halfplane_bottoms(1.0, 1.0) == (-0.25, -4.0)
    assert closedform.halfplane_bottoms(2.0, 4.0) == (-1.0, -0.25)
    with pytest.raises(ValueError):
        closedform.halfplane_bottoms(0.0, 1.0)


def test_sharpness_boundary_cases():
    # (alpha, beta) = (1, 5): -alpha^2/4 < -4/beta^2, ordering impossible
    da, db = closedform.halfplane_bottoms(1.0, 5.0)
    assert db == pytest.approx(-0.16) and db > da
    # (1, 4): equal thresholds; (1, 3): delta-prime strictly deeper
    da, db = closedform.halfplane_bottoms(1.0, 4.0)
    assert da == db == -0.25
    da, db = closedform.halfplane_bottoms(1.0, 3.0)
    assert db == pytest.approx(-4.0 / 9.0) and db < da


def test_wedge_trace_bound():
    assert closedform.wedge_trace_bound(1.0, math.pi) == pytest.approx(-1.0)
    assert closedform.wedge_trace_bound(2.0, math.pi / 2) == pytest.approx(
        -4.0 / math.sin(math.pi / 4) ** 2)
    assert closedform.wedge_trace_bound(
        3.0, math.pi / 3, vanishing_on_bisector=True) == pytest.approx(-9.0)
    with pytest.raises(ValueError):
        closedform.wedge_trace_bound(1.0, 4.0)


def test_star_delta_bottom():
    assert closedform.star_delta_bottom(1.0) == pytest.approx(-1.0 / 3.0)
    assert closedform.star_delta_bottom(3.0) == pytest.approx(-3.0)


def test_m_functions_and_crossing():
    m1, m2 = closedform.m_functions(0.0, 0.5)
    assert m1 == pytest.approx(16.0 / 3.0)
    assert m2 == pytest.approx(4.0)
    for t in (0.3, 0.5, 0.7):
        w = closedform.omega_star(t)
        assert 0.0 < w < 1.0
        m1, m2 = closedform.m_functions(w, t)
        assert abs(m1 - m2) <= 1e-12 * max(m1, m2)


def test_minimax_report():
    rep = closedform.minimax_star()
    assert abs(rep.t_star - 0.5) <= 1e-6
    assert abs(rep.m1_at_opt - rep.m2_at_opt) <= 1e-12 * rep.m1_at_opt
    assert rep.branch_t_ge_1 == 16.0 / 3.0
    assert abs(rep.value - rep.grid_oracle_value) <= 1e-8
    assert rep.c_star_derived == pytest.approx(math.sqrt(3.0 * rep.value))
    # closed form of the optimum: (26 / (6 sqrt(3) + 1))^2
    assert rep.value == pytest.approx(
        (26.0 / (6.0 * math.sqrt(3.0) + 1.0)) ** 2, rel=1e-12)
    # the printed constant differs; both are carried in the report
    assert rep.discrepancy
    assert rep.paper_printed_value == pytest.approx(
        ((12.0 * math.sqrt(3.0) - 2.0) / 9.0) ** 2)
    assert rep.paper_printed_c_star == pytest.approx(
        4.0 - 2.0 * math.sqrt(3.0) / 9.0)


def test_interval_known_value():
    r = closedform.interval_delta_prime(2.0, 40.0)
    assert abs(r.epsilon + 1.0) <= 1e-10
    assert abs(r.residual) <= 1e-9


@pytest.mark.parametrize("beta,l", [(0.5, 1.0), (1.0, 2.0), (2.0, 5.0),
                                    (3.0, 0.5), (7.0, 10.0)])
def test_interval_strict_threshold_and_oracle(beta, l):
    r = closedform.interval_delta_prime(beta, l)
    thr = -4.0 / beta ** 2
    assert r.epsilon < thr + 8.0 * np.finfo(float).eps * abs(thr)
    fem = closedform.interval_fem_oracle(beta, l)
    assert abs(fem - r.epsilon) <= 1e-6 * abs(r.epsilon)


def test_interval_validation():
    with pytest.raises(ValueError):
        closedform.interval_delta_prime(-1.0, 1.0)
    with pytest.raises(ValueError):
        closedform.interval_fem_oracle(1.0, 1.0, n_elems=2)


def test_abc_inequality_random():
    rng = np.random.default_rng(0)
    for _ in range(500):
        th = rng.standard_normal((3, 4))
        et = rng.standard_normal((3, 4))
        w = rng.uniform(0.0, 1.0)
        t = rng.uniform(0.05, 5.0)
        S, bound, holds = closedform.abc_inequality_check(th, et, w, t)
        assert holds, (S, bound, w, t)


def test_abc_inequality_validation():
    z = [np.zeros(2)] * 3
    with pytest.raises(ValueError):
        closedform.abc_inequality_check(z, z, 1.5, 1.0)
    with pytest.raises(ValueError):
        closedform.abc_inequality_check(z[:2], z, 0.5, 1.0)
