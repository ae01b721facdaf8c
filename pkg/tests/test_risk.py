import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wclique.detectors import make_detector
from wclique.distributions import bernoulli, discrete, make_pair, named_pair
from wclique.risk import (
    RiskEstimate,
    bc_risk_lower_bound,
    estimate_risk,
    exact_lrt_risk,
    likelihood_moments,
    omega_n,
    second_moment,
    second_moment_risk_lower_bound,
    thresholds,
)

BD = named_pair("bernoulli_dirac")


def always_accept(g):
    return False


def coin_flip(g):
    seed = np.frombuffer(g.weights.tobytes(), dtype=np.uint32)
    return bool(np.random.default_rng(seed).random() < 0.5)


def flaky(g):
    if g.weights[0] == 1.0:
        raise ValueError("refusing this graph")
    return True


# --- Monte Carlo ------------------------------------------------------------


def test_always_accept():
    est = estimate_risk(always_accept, 6, 3, BD, 50, seed=1)
    assert (est.type1, est.type2, est.risk) == (0.0, 1.0, 1.0)
    assert est.trials_per_hypothesis == 50 and est.base_seed == 1


def test_coin_flip_has_risk_one():
    est = estimate_risk(coin_flip, 6, 3, BD, 2000, seed=4)
    assert abs(est.risk - 1.0) <= 3 * est.ci95_halfwidth
    assert est.risk == est.type1 + est.type2


def test_workers_do_not_change_the_result():
    det = make_detector("lrt", BD, k=3)
    a = estimate_risk(det, 7, 3, BD, 120, seed=9, workers=1)
    b = estimate_risk(det, 7, 3, BD, 120, seed=9, workers=3)
    assert a == b


def test_failures_are_counted_and_excluded():
    est = estimate_risk(flaky, 5, 2, BD, 200, seed=0)
    assert est.failures_null > 0 and est.failures_planted > 0
    assert est.type1 == 1.0 and est.type2 == 0.0


def test_null_only():
    est = estimate_risk(always_accept, 5, 2, BD, 10, seed=0, hypotheses=(0,))
    assert est.type1 == 0.0 and math.isnan(est.type2)


def test_min_test_null_rate():
    pair = named_pair("uniform_vs_prop3", [20, 2.0])
    det = make_detector("min", pair)
    est = estimate_risk(det, 20, 2, pair, 20000, seed=5, hypotheses=(0,))
    exact = 1 - (1 - 2.0**-20) ** 190
    se = math.sqrt(exact * (1 - exact) / 20000)
    assert abs(est.type1 - exact) <= 3 * se + 1 / 20000


def test_wilson_interval_at_zero_rate():
    from statsmodels.stats.proportion import proportion_confint

    est = estimate_risk(always_accept, 5, 2, BD, 100, seed=0)
    lo, hi = proportion_confint(0, 100, alpha=0.05, method="wilson")
    assert est.ci95_halfwidth == pytest.approx(math.sqrt(2) * (hi - lo) / 2, rel=1e-6)


def test_bad_trial_count():
    with pytest.raises(ValueError):
        estimate_risk(always_accept, 5, 2, BD, 0, seed=0)


def test_risk_estimate_dict():
    est = estimate_risk(always_accept, 5, 2, BD, 5, seed=0)
    assert RiskEstimate(**est.to_dict()) == est


# --- exact enumeration ------------------------------------------------------


def test_identical_laws_have_chance_risk():
    pair = named_pair("bernoulli_bernoulli", [0.4, 0.4])
    r = exact_lrt_risk(4, 2, pair)
    assert r.risk == pytest.approx(1.0, abs=1e-15)
    assert r.half_l1 == pytest.approx(0.0, abs=1e-15)
    assert r.root_likelihood == pytest.approx(1.0, abs=1e-15)


def test_single_planted_edge_oracle():
    # n=4, k=2: L(x) = (1/6) sum_e 2 * 1{x_e = 1}
    risk = 0.0
    half_l1 = 0.0
    root = 0.0
    for x in itertools.product((0, 1), repeat=6):
        p0 = 2.0**-6
        L = sum(2 * v for v in x) / 6
        p1 = p0 * L
        risk += p0 if L > 1 else p1
        half_l1 += 0.5 * p0 * abs(L - 1)
        root += p0 * math.sqrt(L)
    got = exact_lrt_risk(4, 2, BD)
    assert got.risk == pytest.approx(risk, abs=1e-15)
    assert got.half_l1 == pytest.approx(half_l1, abs=1e-15)
    assert got.root_likelihood == pytest.approx(root, abs=1e-15)


@pytest.mark.parametrize(
    "pair",
    [
        BD,
        named_pair("bernoulli_bernoulli", [0.3, 0.6]),
        make_pair(discrete([0, 1, 2], [0.5, 0.3, 0.2]), discrete([0, 1, 2], [0.1, 0.3, 0.6])),
    ],
)
@pytest.mark.parametrize("n,k", [(4, 2), (4, 3), (5, 2)])
def test_identity_and_sandwich(backend, pair, n, k):
    r = exact_lrt_risk(n, k, pair)
    assert r.risk == pytest.approx(1 - r.half_l1, abs=1e-12)
    assert 1 - math.sqrt(1 - r.root_likelihood**2) <= r.risk + 1e-12
    assert r.risk <= r.root_likelihood + 1e-12


def test_singular_pair_uses_total_variation():
    pair = make_pair(bernoulli(0.5), discrete([1, 2], [0.5, 0.5]))
    mo = likelihood_moments(4, 2, pair)
    r = exact_lrt_risk(4, 2, pair)
    assert r.risk == pytest.approx(1 - mo["tv_p0_p1"], abs=1e-12)
    assert mo["e0_L"] < 1.0  # Q puts mass where P has none


def test_enumeration_guards():
    with pytest.raises(ValueError):
        exact_lrt_risk(8, 2, BD)  # 2^28 outcomes
    with pytest.raises(ValueError):
        exact_lrt_risk(4, 2, named_pair("gaussian_shift"))


# --- second moment ----------------------------------------------------------


def _second_moment_fraction(n, k, rho):
    total = sum(
        Fraction(math.comb(k, i) * math.comb(n - k, k - i), math.comb(n, k)) * Fraction(rho) ** (i * (i - 1) // 2)
        for i in range(k + 1)
    )
    tail = total - Fraction(math.comb(n - k, k), math.comb(n, k))
    return total, tail


def _log_fraction(x):
    if x == 0:
        return -math.inf
    return math.log(x.numerator) - math.log(x.denominator)


@given(st.integers(2, 60), st.data(), st.sampled_from([1, 2, 3, Fraction(3, 2)]))
def test_second_moment_exact_rational(n, data, rho):
    k = data.draw(st.integers(2, n))
    e2, tail = second_moment(n, k, float(rho))
    want_e2, want_tail = _second_moment_fraction(n, k, rho)
    for got, want in ((e2, want_e2), (tail, want_tail)):
        log_want = _log_fraction(want)
        if log_want > 709:
            assert got == math.inf
        elif got > 0:
            assert math.log(got) == pytest.approx(log_want, rel=1e-11, abs=1e-11)
        else:
            assert want == 0 or log_want < -700


def test_second_moment_special_cases():
    e2, tail = second_moment(10, 3, 1.0)
    assert e2 == pytest.approx(1.0, abs=1e-14)
    assert tail == pytest.approx(1 - math.comb(7, 3) / math.comb(10, 3), abs=1e-14)
    e2, _ = second_moment(5, 5, 2.0)
    assert e2 == pytest.approx(2.0**10, rel=1e-13)
    with pytest.raises(ValueError):
        second_moment(5, 2, 0.5)


@pytest.mark.parametrize("n", [5, 6])
@pytest.mark.parametrize("k", [2, 3])
def test_second_moment_matches_enumeration(n, k):
    assert likelihood_moments(n, k, BD)["e0_L2"] == pytest.approx(second_moment(n, k, 2.0)[0], abs=1e-10)


def test_second_moment_risk_bound_is_below_exact_risk():
    for n, k in [(5, 2), (6, 2), (6, 3)]:
        assert second_moment_risk_lower_bound(n, k, 2.0) <= exact_lrt_risk(n, k, BD).risk + 1e-12


def test_second_moment_large_n_no_overflow():
    e2, _ = second_moment(10**6, 40, 2.0)
    assert math.isfinite(e2) and e2 > 1.0


# --- thresholds -------------------------------------------------------------


def test_threshold_examples():
    r = thresholds(1024, BD, 1.0, 0.1)
    assert r.omega_n == pytest.approx(20 - 2 * math.log2(10) - 1 + 2 * math.log2(math.e), abs=1e-12)
    assert r.omega_n == pytest.approx(15.2415, abs=1e-3)
    assert r.kl_threshold_k == pytest.approx(30.0, rel=1e-12)
    assert r.chi2_indist_k == 14
    r = thresholds(4096, BD, 1.0, 0.1)
    assert r.spectral_k_T2 == pytest.approx(759.1, abs=0.05)
    assert r.spectral_k_T1 == pytest.approx(759.1, abs=0.05)  # TV = 0.5 too
    assert r.spectral_constants_asymptotic


def test_threshold_errors_and_fallbacks():
    with pytest.raises(ValueError):
        thresholds(100, named_pair("bernoulli_bernoulli", [0.5, 0.5]), 1.0, 0.1)
    with pytest.raises(ValueError):
        thresholds(2, BD, 1.0, 0.1)
    r = thresholds(1000, named_pair("disjoint_uniform"), 1.0, 0.1, log_constant=2.0)
    assert r.kl_threshold_k == pytest.approx(2 * math.log(1000))
    assert r.omega_n == -1.0


@given(st.integers(3, 10**6), st.floats(1.01, 100))
def test_omega_formula(n, rho):
    lr = math.log(rho)
    want = 2 * math.log(n) / lr - 2 * math.log(math.log(n) / lr) / lr - 1 + 2 / lr
    assert omega_n(n, rho) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_bc_bound_examples():
    assert bc_risk_lower_bound(3, BD) == pytest.approx(1 - math.sqrt(0.875), abs=1e-12)
    assert bc_risk_lower_bound(2, named_pair("bernoulli_bernoulli", [0.3, 0.3])) == pytest.approx(1.0)
    assert bc_risk_lower_bound(2, named_pair("disjoint_uniform")) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        bc_risk_lower_bound(1, BD)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3)])
def test_bc_bound_below_exact_risk(n, k):
    pair = named_pair("bernoulli_bernoulli", [0.3, 0.7])
    assert bc_risk_lower_bound(k, pair) <= exact_lrt_risk(n, k, pair).risk + 1e-12
