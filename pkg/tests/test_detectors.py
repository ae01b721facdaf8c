import itertools
import math
import pickle
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wclique.detectors import (
    DETECTORS,
    BudgetExceeded,
    Decision,
    exact_lrt,
    interval_false_alarm_bound,
    interval_scan_test,
    make_detector,
    min_test,
    scan_test,
    spectral_test_T1,
    spectral_test_T2,
    spectral_threshold,
    support_test,
)
from wclique.distributions import RealSet, make_pair, named_pair, uniform
from wclique.divergences import tv_via_density_set
from wclique.model import WeightedGraph, sample_null, sample_planted

BD = named_pair("bernoulli_dirac")
DU = named_pair("disjoint_uniform")
GS = named_pair("gaussian_shift")


def _brute_log_l(g, pair, k):
    from wclique.distributions import log_ratio

    lr = g.edge_values(lambda w: log_ratio(pair, w))
    terms = []
    for sub in itertools.combinations(range(g.n), k):
        terms.append(math.fsum(lr[a, b] for a, b in itertools.combinations(sub, 2)))
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms)) - math.log(math.comb(g.n, k))


# --- support test -----------------------------------------------------------


def test_support_test_planted_and_null():
    planted = sample_planted(30, 4, DU, 1)
    v = support_test(planted.graph, RealSet.parse("[1,2)"), p=DU.p)
    assert v.rejected and v.statistic == 6
    assert set(v.witness["vertices"]) == set(planted.hidden_set)
    null = sample_null(30, DU.p, 1)
    assert not support_test(null.graph, RealSet.parse("[1,2)")).rejected


def test_support_test_rejects_a_set_p_charges():
    with pytest.raises(ValueError):
        support_test(sample_null(5, DU.p, 0).graph, RealSet.parse("[0.5,2)"), p=DU.p)
    with pytest.raises(ValueError):
        support_test(sample_null(5, DU.p, 0).graph, RealSet())


def test_support_detector_needs_a_null_set():
    with pytest.raises(ValueError):
        make_detector("support", BD)
    det = make_detector("support", named_pair("uniform_shift", [0.5]))
    assert det.set_a.contains(np.array([1.2])).all()


# --- scan and exact LRT -----------------------------------------------------


def test_scan_matches_brute_force(backend):
    g = sample_planted(9, 3, GS, 5).graph
    v = scan_test(g, GS, 3)
    from wclique.distributions import log_ratio

    lr = g.edge_values(lambda w: log_ratio(GS, w))
    best = max(
        math.fsum(lr[a, b] for a, b in itertools.combinations(s, 2)) for s in itertools.combinations(range(9), 3)
    )
    assert v.statistic == pytest.approx(best, rel=1e-12)
    assert v.threshold == pytest.approx(3 * math.log(9))


def test_scan_on_clique_weights():
    # C(k,2) log 2 never beats k log n at n=24 for k <= 10
    inst = sample_planted(24, 6, BD, 2)
    v = scan_test(inst.graph, BD, 6)
    assert v.statistic == pytest.approx(15 * math.log(2))
    assert v.decision is Decision.ACCEPT
    w = v.witness["vertices"]
    assert all(inst.graph.matrix[a, b] == 1.0 for a, b in itertools.combinations(w, 2))


def test_budget():
    g = sample_null(30, BD.p, 0).graph
    with pytest.raises(BudgetExceeded):
        scan_test(g, BD, 10, budget=1000)
    with pytest.raises(BudgetExceeded):
        exact_lrt(g, BD, 10, budget=1000)


def test_exact_lrt_all_ones():
    g = WeightedGraph(6, np.ones(15))
    v = exact_lrt(g, BD, 3)
    assert v.statistic == pytest.approx(math.log(8), abs=1e-14)
    assert v.rejected


def test_exact_lrt_identical_laws_ties_accept():
    pair = named_pair("bernoulli_bernoulli", [0.5, 0.5])
    v = exact_lrt(sample_null(7, pair.p, 0).graph, pair, 3)
    assert v.statistic == 0.0
    assert v.decision is Decision.ACCEPT


def test_exact_lrt_no_clique():
    g = WeightedGraph(5, np.zeros(10))
    v = exact_lrt(g, BD, 2)
    assert v.statistic == -math.inf and not v.rejected


def test_exact_lrt_infinite_ratio_has_witness():
    inst = sample_planted(8, 3, DU, 0)
    v = exact_lrt(inst.graph, DU, 3)
    assert v.statistic == math.inf
    assert tuple(v.witness["vertices"]) == inst.hidden_set


@pytest.mark.parametrize("seed", range(5))
def test_exact_lrt_matches_brute_force(backend, seed):
    g = sample_planted(8, 3, GS, seed).graph
    assert exact_lrt(g, GS, 3).statistic == pytest.approx(_brute_log_l(g, GS, 3), rel=1e-12, abs=1e-12)


# --- spectral tests ---------------------------------------------------------


def test_spectral_threshold_value():
    import mpmath

    mpmath.mp.dps = 30
    oracle = 4 * mpmath.sqrt(mpmath.log(9) * 4096 + mpmath.log(mpmath.mpf(4) / mpmath.mpf("0.1")))
    assert spectral_threshold(4096, 0.1, 1.0) == pytest.approx(float(oracle), rel=1e-14)
    assert spectral_threshold(4096, 0.1, 2.0) == pytest.approx(2 * float(oracle), rel=1e-14)


def test_t2_statistic_is_centered_norm():
    g = sample_planted(40, 10, BD, 3).graph
    v = spectral_test_T2(g, 0.5, (0.0, 1.0), 0.1)
    c = g.matrix - 0.5
    np.fill_diagonal(c, 0.0)
    assert v.statistic == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(c))), rel=1e-12)
    assert v.threshold == spectral_threshold(40, 0.1, 1.0)


def test_t2_input_checks():
    g = sample_null(10, GS.p, 0).graph
    with pytest.raises(ValueError):
        spectral_test_T2(g, 0.0, (-math.inf, math.inf), 0.1)
    with pytest.raises(ValueError):
        spectral_test_T2(g, 0.0, (-1.0, 1.0), 0.1)  # Gaussian draws leave [-1, 1]
    with pytest.raises(ValueError):
        spectral_test_T2(sample_null(10, BD.p, 0).graph, 0.5, (0.0, 1.0), 1.5)
    with pytest.raises(ValueError):
        make_detector("t2", GS)


def test_t2_detects_a_huge_clique():
    # threshold ~119 at n=400; the planted block adds about (k-1)/2 ~ 150
    inst = sample_planted(400, 300, BD, 0)
    assert spectral_test_T2(inst.graph, 0.5, (0.0, 1.0), 0.1).rejected
    assert not spectral_test_T2(sample_null(400, BD.p, 0).graph, 0.5, (0.0, 1.0), 0.1).rejected


@pytest.mark.parametrize("seed", range(5))
def test_t1_equals_t2_on_indicators(seed):
    pair = named_pair("uniform_shift", [0.3])
    _, a = tv_via_density_set(pair)
    g = sample_planted(30, 8, pair, seed).graph
    t1 = spectral_test_T1(g, a, pair.p.prob(a), 0.1, pair.q.prob(a))
    z = WeightedGraph(30, a.contains(g.weights).astype(float))
    t2 = spectral_test_T2(z, pair.p.prob(a), (0.0, 1.0), 0.1)
    assert (t1.statistic, t1.threshold, t1.decision) == (t2.statistic, t2.threshold, t2.decision)
    assert t1.details["separation"] == pytest.approx(pair.p.prob(a) - pair.q.prob(a))


def test_t1_default_set_is_where_p_exceeds_q():
    det = make_detector("t1", GS)
    assert det.p_of_A - det.q_of_A == pytest.approx(tv_via_density_set(GS)[0], abs=1e-12)
    assert det.set_a.contains(np.array([0.0])).all() and not det.set_a.contains(np.array([1.0])).any()


# --- interval scan ----------------------------------------------------------


def test_interval_scan_finds_the_hidden_set(backend):
    inst = sample_planted(100, 10, DU, 7)
    v = interval_scan_test(inst.graph, 10)
    assert v.rejected and tuple(v.witness["vertices"]) == inst.hidden_set
    assert v.statistic == 45
    lo, hi = v.witness["interval"]
    assert 1.0 <= lo <= hi < 2.0


def test_interval_scan_null_accepts(backend):
    v = interval_scan_test(sample_null(100, DU.p, 7).graph, 10)
    assert not v.rejected and v.statistic == 0 and v.witness is None


def test_interval_scan_ties_are_not_split():
    # all weights equal: the only window is the whole edge set
    g = WeightedGraph(8, np.zeros(28))
    assert not interval_scan_test(g, 3).rejected


def test_interval_scan_k_range():
    g = sample_null(10, DU.p, 0).graph
    with pytest.raises(ValueError):
        interval_scan_test(g, 6)
    with pytest.raises(ValueError):
        interval_scan_test(g, 1)


def test_interval_false_alarm_bound_exact():
    n, k = 100, 10
    m = n * (n - 1) // 2
    exact = Fraction(n**4 * math.comb(n, k), math.comb(m, k))
    assert interval_false_alarm_bound(n, k) == pytest.approx(float(exact), rel=1e-10)
    assert interval_false_alarm_bound(n, k) < 1e-9


# --- min test ---------------------------------------------------------------


def test_min_test():
    g = WeightedGraph(5, np.array([0.5, 0.2, 0.9, 0.1, 2.0**-6, 0.3, 0.3, 0.4, 0.7, 0.8]))
    v = min_test(g)
    assert v.threshold == 2.0**-5 and v.direction == "less"
    assert v.rejected and v.statistic == 2.0**-6
    assert not min_test(WeightedGraph(5, np.full(10, 2.0**-5))).rejected
    with pytest.raises(ValueError):
        min_test(WeightedGraph(1023, np.ones(1023 * 1022 // 2)))


# --- registry ---------------------------------------------------------------


@pytest.mark.parametrize("name", DETECTORS)
def test_every_detector_runs(name):
    pair = named_pair("uniform_shift", [0.5]) if name == "support" else BD
    if name == "min":
        pair = named_pair("uniform_vs_prop3", [12, 2.0])
    det = make_detector(name, pair, k=3)
    inst = sample_planted(8, 3, pair, 0)
    v = det(inst.graph)
    assert v.detector == name
    assert v.decision in (Decision.ACCEPT, Decision.REJECT)
    assert pickle.loads(pickle.dumps(det)) == det
    assert set(v.to_dict()) == {"detector", "decision", "statistic", "threshold", "direction", "witness", "details"}


def test_unknown_detector():
    with pytest.raises(ValueError):
        make_detector("magic", BD)


@given(st.integers(0, 2**32), st.integers(4, 9), st.sampled_from(["scan", "lrt", "t2", "interval"]))
def test_decision_is_strict_comparison(seed, n, name):
    pair = named_pair("bernoulli_bernoulli", [0.5, 0.8])
    det = make_detector(name, pair, k=2)
    v = det(sample_planted(n, 2, pair, seed).graph)
    assert v.rejected == (v.statistic > v.threshold)


def test_pair_without_finite_support_mean():
    pair = make_pair(uniform(0.0, 1.0), uniform(0.0, 2.0))
    det = make_detector("t2", pair)
    assert det(sample_null(12, pair.p, 0).graph).threshold == spectral_threshold(12, 0.1, 2.0)
