import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ermlab import models as m
from ermlab.erm import (
    AdversarialXi,
    MinNorm,
    empirical_excess_loss,
    empirical_risk,
    excess_risk_exact,
    solve_erm,
)
from ermlab.errors import InputError, PolicyInapplicableError


def partition_sample(cells, M=3, k=30):
    """Sample from the partition design with prescribed cell labels (0 = X0)."""
    W = np.zeros((len(cells), M))
    for i, c in enumerate(cells):
        if c:
            W[i, c - 1] = 1.0
    y = np.ones(len(cells))
    return m.Sample(W=W, y=y, seed=0, zeta=y - W.sum(axis=1))


def test_empirical_risk_examples(rng):
    assert empirical_risk([[1.0, 0.0]], [3.0], [1.0, 0.0]) == 4.0
    s = m.Scenario(m.GaussianIdentity(3), m.GaussianNoise(0.0), m.InSpan([1.0, 2.0, 3.0]))
    smp = m.sample(s, 20, 0)
    assert empirical_risk(smp.W, smp.y, [1.0, 2.0, 3.0]) == pytest.approx(0.0, abs=1e-28)
    W, y, t = rng.standard_normal((30, 4)), rng.standard_normal(30), rng.standard_normal(4)
    loop = sum((y[i] - sum(W[i, j] * t[j] for j in range(4))) ** 2 for i in range(30)) / 30
    assert empirical_risk(W, y, t) == pytest.approx(loop, rel=1e-12)
    with pytest.raises(InputError):
        empirical_risk(W, y[:-1], t)


def test_partition_min_norm_and_adversarial():
    smp = partition_sample([1, 2, 0, 1, 2, 0, 1])
    t_mn = solve_erm(smp, MinNorm())
    np.testing.assert_allclose(t_mn, [1.0, 1.0, 0.0], atol=1e-14)
    t_ad = solve_erm(smp, AdversarialXi(7.0))
    np.testing.assert_allclose(t_ad, [1.0, 1.0, 7.0], atol=1e-14)
    assert empirical_risk(smp.W, smp.y, t_ad) == pytest.approx(empirical_risk(smp.W, smp.y, t_mn), abs=1e-15)


def test_adversarial_needs_unvisited_cell():
    smp = partition_sample([1, 2, 3, 0])
    with pytest.raises(PolicyInapplicableError):
        solve_erm(smp, AdversarialXi(3.0))


def test_noiseless_interpolation():
    s = m.Scenario(m.GaussianIdentity(2), m.GaussianNoise(0.0), m.InSpan([1.0, -1.0]))
    np.testing.assert_allclose(solve_erm(m.sample(s, 50, 4)), [1.0, -1.0], atol=1e-9)


def test_minimizer_optimality():
    s = m.Scenario(m.GaussianIdentity(4), m.StudentT(3.0), m.InSpan([1.0, 0.0, -1.0, 2.0]))
    smp = m.sample(s, 40, 8)
    t = solve_erm(smp)
    base = empirical_risk(smp.W, smp.y, t)
    rng = np.random.default_rng(0)
    for _ in range(100):
        u = rng.standard_normal(4)
        for eps in (1e-3, -1e-3):
            assert empirical_risk(smp.W, smp.y, t + eps * u) >= base - 1e-9


def test_excess_risk_exact_examples():
    s = m.Scenario(m.GaussianIdentity(3), m.GaussianNoise(1.0), m.InSpan([1.0, 2.0, 3.0]))
    assert excess_risk_exact([1.0, 2.0, 3.0], s) == 0.0
    t = np.array([0.0, 2.5, -1.0])
    assert excess_risk_exact(t, s) == pytest.approx(np.sum((t - [1, 2, 3]) ** 2))
    p = m.Scenario(m.Partition(2, 4), m.GaussianNoise(0.0), m.ConstantOne())
    assert excess_risk_exact([1.0, 5.0], p) == pytest.approx(4.0)


def _mc_risk_gap(s, t, n, seed):
    smp = m.sample(s, n, seed)
    t_star = m.oracle_coeffs(s)
    d = (smp.y - smp.W @ t) ** 2 - (smp.y - smp.W @ t_star) ** 2
    return d.mean(), d.std(ddof=1) / math.sqrt(n)


SCENARIOS = [
    m.Scenario(m.GaussianIdentity(3), m.GaussianNoise(1.0), m.InSpan([1.0, 2.0, 3.0])),
    m.Scenario(m.GaussianIdentity(2), m.StudentT(5.0), m.InSpan([0.0, 1.0])),
    m.Scenario(m.GaussianCov([[2.0, 0.5], [0.5, 1.0]]), m.BoundedUniform(1.0), m.InSpan([1.0, -1.0])),
    m.Scenario(m.Partition(3, 6), m.GaussianNoise(0.5), m.ConstantOne()),
    m.Scenario(m.Partition(2, 10), m.GaussianNoise(0.0), m.ConstantOne()),
    m.Scenario(m.HeavyTailedIID(3, 6.0), m.GaussianNoise(1.0), m.InSpan([1.0, 1.0, 1.0])),
    m.Scenario(m.DiscreteAtoms([[1.0, 0.0], [1.0, 1.0], [0.0, 2.0]], [0.3, 0.3, 0.4]), m.GaussianNoise(1.0),
               m.InSpan([2.0, 1.0])),
    m.Scenario(m.GaussianIdentity(3), m.GaussianNoise(0.5), m.Misspecified([1.0, 0.0, 1.0])),
    m.Scenario(m.DiscreteAtoms([[1.0, 1.0], [1.0, -1.0], [2.0, 3.0]], [0.5, 0.3, 0.2]), m.GaussianNoise(0.2),
               m.Misspecified([0.5, 0.5])),
    m.Scenario(m.GaussianIdentity(5), m.Prop3Noise(2, 1000), m.InSpan(np.zeros(5))),
]


@pytest.mark.parametrize("i", range(len(SCENARIOS)))
def test_excess_risk_matches_monte_carlo(i):
    s = SCENARIOS[i]
    t = m.oracle_coeffs(s) + np.random.default_rng(i).normal(0, 0.5, s.M)
    gap, se = _mc_risk_gap(s, t, 1_000_000, 100 + i)
    assert abs(gap - excess_risk_exact(t, s)) <= 5 * se


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30), M=st.integers(1, 5))
def test_excess_loss_decomposition(seed, n, M):
    rng = np.random.default_rng(seed)
    W, y = rng.standard_normal((n, M)), rng.standard_normal(n)
    t, t_star = rng.standard_normal(M), rng.standard_normal(M)
    smp = m.Sample(W=W, y=y, seed=seed, zeta=y - W @ t_star)
    total, quad, lin = empirical_excess_loss(smp, t, t_star)
    scale = max(1.0, abs(quad), abs(lin))
    assert total == pytest.approx(quad + lin, abs=1e-10 * scale)
    diff = empirical_risk(W, y, t) - empirical_risk(W, y, t_star)
    assert total == pytest.approx(diff, abs=1e-10 * scale)
    assert quad >= 0
    t_hat = solve_erm(smp)
    assert empirical_excess_loss(smp, t_hat, t_star)[0] <= 1e-10 * scale


def test_excess_loss_at_oracle_is_zero():
    s = SCENARIOS[0]
    smp = m.sample(s, 30, 1)
    t = m.oracle_coeffs(s)
    assert empirical_excess_loss(smp, t, t) == (0.0, 0.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), xi=st.floats(-50, 50))
def test_policies_share_empirical_risk(seed, xi):
    s = m.Scenario(m.Partition(6, 40), m.GaussianNoise(0.3), m.ConstantOne())
    smp = m.sample(s, 12, seed)
    t_mn = solve_erm(smp, MinNorm())
    try:
        t_ad = solve_erm(smp, AdversarialXi(xi))
    except PolicyInapplicableError:
        return
    a, b = empirical_risk(smp.W, smp.y, t_mn), empirical_risk(smp.W, smp.y, t_ad)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-14)
