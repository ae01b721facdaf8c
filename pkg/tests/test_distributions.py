import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from wclique.distributions import (
    PAIR_NAMES,
    Distribution,
    RealSet,
    bernoulli,
    build_prop3_density,
    dirac,
    discrete,
    kprime_from_k,
    log_ratio,
    make_pair,
    named_pair,
    normal,
    parse_pair_spec,
    sample,
    uniform,
)
from wclique.quadrature import integrate_piecewise
from wclique.rng import generator


def test_bernoulli_masses_and_mean():
    b = bernoulli(0.3)
    assert b.mass_at([0.0, 1.0, 0.5]).tolist() == [0.7, 0.3, 0.0]
    assert b.mean == pytest.approx(0.3)
    assert b.support == (0.0, 1.0)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_bernoulli_rejects_degenerate(p):
    with pytest.raises(ValueError):
        bernoulli(p)


def test_atoms_must_sum_to_one():
    with pytest.raises(ValueError):
        discrete([0, 1], [0.5, 0.4])


def test_density_must_integrate_to_one():
    from wclique.distributions import piecewise

    with pytest.raises(ValueError):
        piecewise([0.0, 1.0], [0.9])


def test_mixed_law_mass_and_density():
    from wclique.distributions import PiecewiseConstant

    d = Distribution(((2.0, 0.25),), PiecewiseConstant((0.0, 1.0), (1.0,)))
    assert d.continuous_weight == pytest.approx(0.75)
    assert d.density(0.5) == pytest.approx(0.75)
    assert d.prob(RealSet.parse("[0,0.5);{2}")) == pytest.approx(0.25 + 0.375)
    assert d.mean == pytest.approx(0.5 + 0.375)


def test_normal_cdf_matches_scipy():
    d = normal(1.0, 2.0)
    xs = np.linspace(-5, 7, 13)
    np.testing.assert_allclose(d.continuous_cdf(xs), stats.norm.cdf(xs, 1.0, 2.0), rtol=1e-14)


def test_from_uniform_is_inverse_cdf():
    d = uniform(2.0, 5.0)
    np.testing.assert_allclose(d.from_uniform(np.array([0.0, 0.5, 0.9])), [2.0, 3.5, 4.7])
    b = bernoulli(0.25)
    assert b.from_uniform(np.array([0.0, 0.74, 0.75, 0.99])).tolist() == [0.0, 0.0, 1.0, 1.0]


def test_sampling_frequencies():
    rng = generator(123)
    draws = sample(discrete([0, 1, 5], [0.2, 0.3, 0.5]), rng, size=200_000)
    freq = [np.mean(draws == v) for v in (0, 1, 5)]
    np.testing.assert_allclose(freq, [0.2, 0.3, 0.5], atol=0.005)


def test_sample_scalar():
    assert isinstance(sample(dirac(3.0), generator(0)), float)


def test_realset_parse_and_contains():
    s = RealSet.parse("[1,2);(3,4];{0,5}")
    xs = np.array([0, 0.5, 1, 1.5, 2, 3, 3.5, 4, 5])
    assert s.contains(xs).tolist() == [True, False, True, True, False, False, True, True, True]
    assert RealSet().is_empty
    with pytest.raises(ValueError):
        RealSet.parse("[2,1)")
    with pytest.raises(ValueError):
        RealSet.parse("oops")


def test_kprime_is_suffix_minimum():
    assert kprime_from_k([5, 3, 4, 2, 6]) == (2, 2, 2, 2, 6)


@pytest.mark.parametrize(
    "kprime",
    [
        [1] * 10,
        [2**m for m in range(30)],
        [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144],
    ],
)
def test_dyadic_density_is_normalized(kprime):
    q = build_prop3_density(kprime, len(kprime))
    mass, _ = integrate_piecewise(q.continuous.pdf, [0.0, 1.0, *q.continuous.breakpoints], rtol=1e-13, atol=1e-16)
    assert mass == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.asarray(q.continuous.values) > 0)


def test_dyadic_piece_values():
    q = build_prop3_density([2, 4, 8], 3)
    # top piece [1/2, 1): 1 - 1/2 + 1/2
    assert q.density(0.75) == pytest.approx(1.0)
    # [1/4, 1/2): 2 (1/2 - 1/4) + 1/2
    assert q.density(0.3) == pytest.approx(1.0)
    # bottom [0, 1/8): 2^2/8 + 1/2
    assert q.density(0.01) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [([2, 1, 3], 3), ([0, 1, 2], 3), ([1], 1), ([1, 2], 3)])
def test_dyadic_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        build_prop3_density(*bad)


@pytest.mark.parametrize("name", PAIR_NAMES)
def test_named_pairs_build(name):
    pair = named_pair(name)
    assert parse_pair_spec(pair.spec()).spec() == pair.spec()


def test_abs_continuity_flags():
    assert named_pair("bernoulli_dirac").abs_continuous
    assert named_pair("gaussian_shift").abs_continuous
    assert not named_pair("disjoint_uniform").abs_continuous
    assert not named_pair("uniform_shift", [0.5]).abs_continuous
    assert not make_pair(dirac(1.0), bernoulli(0.5)).abs_continuous


def test_log_ratio_values():
    pair = named_pair("bernoulli_dirac")
    np.testing.assert_allclose(log_ratio(pair, np.array([1.0, 0.0])), [math.log(2), -math.inf])
    du = named_pair("disjoint_uniform")
    assert log_ratio(du, 1.5) == math.inf
    with pytest.raises(ValueError):
        log_ratio(du, 7.0)


def test_log_ratio_gaussian_closed_form():
    pair = named_pair("gaussian_shift", [1.0, 1.0])
    x = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(log_ratio(pair, x), x - 0.5, atol=1e-12)


def test_unknown_pair():
    with pytest.raises(ValueError):
        parse_pair_spec("nope:1")
    with pytest.raises(ValueError):
        named_pair("bernoulli_dirac", [0.5, 1.0])


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8), st.integers(0, 2**32 - 1))
def test_discrete_from_uniform_hits_atoms(weights, seed):
    w = np.asarray(weights) / np.sum(weights)
    d = discrete(np.arange(len(w), dtype=float), w)
    u = generator(seed).random(64)
    x = d.from_uniform(u)
    assert set(np.unique(x)).issubset(set(range(len(w))))
    cum = np.cumsum(w)
    np.testing.assert_array_equal(x, np.minimum(np.searchsorted(cum, u, side="right"), len(w) - 1))


@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(1e-9, 1 - 1e-9))
def test_normal_ppf_inverts_cdf(mu, sigma, u):
    d = normal(mu, sigma)
    x = d.from_uniform(np.array([u]))
    assert d.continuous_cdf(x)[0] == pytest.approx(u, rel=1e-9, abs=1e-12)
