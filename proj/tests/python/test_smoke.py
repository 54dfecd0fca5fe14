import math

import pytest

import aggsched


def test_occupancy_small_cluster():
    c = aggsched.occupancy_pmf(6.0, 4, 2)
    assert len(c) == 3
    assert sum(c) == pytest.approx(1.0, abs=1e-12)
    assert aggsched.conditional_occupancy(26, 10, 4) == [0.0, 0.0, 0.4, 0.6, 0.0]


def test_kmax_and_specfun():
    assert aggsched.kmax_for_tail(30.0, 1e-5) == 56
    assert aggsched.digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-14)
    assert aggsched.regularized_gamma_q(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-13)


def test_laplace_ordering():
    p = aggsched.NetworkParams()
    pairs = [0.0, 0.0, 1.0]
    exact = aggsched.laplace("rrs_exact", p, 0.1, pairs)
    assert aggsched.laplace("rrs_lower", p, 0.1, pairs) <= exact <= aggsched.laplace("rrs_upper", p, 0.1, pairs)


def test_delta_star_in_bracket():
    p = aggsched.NetworkParams()
    delta, residual, degenerate = aggsched.delta_star(p)
    assert not degenerate
    assert 2 ** ((2 - p.alpha) / 2) <= delta <= 1
    assert abs(residual) <= 1e-9


def test_analytic_defaults():
    r = aggsched.analytic_metrics(aggsched.NetworkParams(), "rrs")
    assert r["p11"] == pytest.approx(0.737885, abs=1e-5)
    assert r["p22"] == pytest.approx(0.644987, abs=1e-5)


def test_small_simulation_is_deterministic():
    p = aggsched.NetworkParams()
    p.N = 10
    p.m_bar = 20.0
    a = aggsched.simulate(p, "rrs", runs=200, seed=3)
    b = aggsched.simulate(p, "rrs", runs=200, seed=3, threads=1)
    assert a["p11"]["value"] == b["p11"]["value"]
    assert 0.0 <= a["overall"]["value"] <= 1.0


def test_errors_are_python_exceptions():
    p = aggsched.NetworkParams()
    p.alpha = 1.5
    with pytest.raises(aggsched.DomainError):
        aggsched.analytic_metrics(p)
    with pytest.raises(aggsched.ParseError):
        aggsched.run_table("pmf", "[network]\nbogus = 1\n")


def test_run_table_csv():
    text = aggsched.run_table("pmf", "", ["m_bar=0"])
    assert text.splitlines()[1:] == ["u,c_u", "0,1"]
