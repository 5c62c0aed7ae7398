import math

import numpy as np
import pytest

from ermlab import bounds, experiments as ex
from ermlab import models as m
from ermlab.erm import AdversarialXi, MinNorm, excess_risk_exact, solve_erm
from ermlab.errors import InputError


def gauss(M, sigma=1.0):
    return m.Scenario(m.GaussianIdentity(M), m.GaussianNoise(sigma), m.InSpan(np.ones(M)))


def test_stream_seed_is_pure_and_separates_streams():
    a = ex.stream_seed(1, 2, 3, tag="x")
    assert a == ex.stream_seed(1, 2, 3, tag="x")
    others = {ex.stream_seed(1, 2, 4, tag="x"), ex.stream_seed(1, 3, 3, tag="x"),
              ex.stream_seed(2, 2, 3, tag="x"), ex.stream_seed(1, 2, 3, tag="y")}
    assert a not in others and len(others) == 4
    assert 0 <= a < 2**64


def test_run_cell_zero_noise_interpolates():
    r = ex.run_cell(gauss(4, 0.0), 10, MinNorm(), trials=20, seed=1)
    assert np.all(r <= 1e-16)


def test_run_cell_ols_risk():
    M, N = 5, 500
    r = ex.run_cell(gauss(M), N, trials=200, seed=2)
    assert 0.5 * M / N <= r.mean() <= 2.0 * M / N
    assert ex.ols_expected_excess(1.0, M, N) == pytest.approx(5 / 494)


def test_run_cell_deterministic_and_order_independent():
    s = gauss(3)
    a = ex.run_cell(s, 40, trials=12, seed=9, cell=3)
    b = ex.run_cell(s, 40, trials=12, seed=9, cell=3)
    assert a.tobytes() == b.tobytes()
    seeds = ex._trial_seeds(9, 3, 12, "erm")
    rev = {i: ex._trial(s, 40, MinNorm(), seeds[i])[0] for i in reversed(range(12))}
    assert np.array([rev[i] for i in range(12)]).tobytes() == a.tobytes()


def test_run_cell_parallel_matches_serial():
    s = gauss(3)
    a = ex.run_cell(s, 40, trials=16, seed=5, workers=1)
    b = ex.run_cell(s, 40, trials=16, seed=5, workers=2)
    assert a.tobytes() == b.tobytes()


def test_pipeline_erm_consistency():
    for s in (gauss(4), m.Scenario(m.Partition(4, 12), m.GaussianNoise(0.2), m.ConstantOne()),
              m.Scenario(m.GaussianIdentity(3), m.StudentT(3.0), m.Misspecified([1.0, 0.0, -1.0]))):
        rec = ex.run_cell_records(s, 30, trials=40, seed=1)
        assert np.all(rec.pn_loss <= 1e-10)


def test_fit_rate_exact_power_laws():
    Ns = [100, 200, 400, 800, 1600]
    samples = [np.full(30, 3.0 / N) for N in Ns]
    fit = ex.fit_rate(Ns, samples)
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)
    Ms = [2, 4, 8, 16]
    assert ex.fit_rate(Ms, [np.full(30, 0.01 * M) for M in Ms]).slope == pytest.approx(1.0, abs=1e-12)


def test_fit_rate_refusals():
    with pytest.raises(InputError):
        ex.fit_rate([1, 2, 3], [np.ones(30)] * 3)
    with pytest.raises(InputError):
        ex.fit_rate([1, 2, 3, 4], [np.ones(29)] * 4)
    with pytest.raises(InputError):
        ex.fit_rate([1, 2, 3, 4], [np.zeros(30)] * 4)


def test_fit_rate_gaussian_campaign_reduced():
    camp = ex.rate_in_N(gauss(5), [100, 200, 400, 800], trials=60, seed=3)
    assert -1.3 <= camp.fit.slope <= -0.7
    assert camp.fit.stderr > 0
    assert all(0 <= r[2] for r in camp.rows() if r[1] == "isomorphy_rate")


def test_medians_stable_when_doubling_trials():
    s = gauss(5)
    small = ex.run_cell(s, 200, trials=100, seed=4)
    big = ex.run_cell(s, 200, trials=200, seed=4)
    rng = np.random.default_rng(0)
    boot = [np.median(rng.choice(small, small.size)) for _ in range(500)]
    assert abs(np.median(big) - np.median(small)) <= 4 * np.std(boot)


def test_theorem_A_coverage_trivial_cases():
    zero = ex.theorem_A_coverage(gauss(3, 0.0), 100, [2.0, 5.0], trials=30, seed=1, beta0=0.6)
    assert zero.coverage == [1.0, 1.0]
    assert not zero.valid  # far below the sample-size threshold
    huge = ex.theorem_A_coverage(gauss(3), 100, [1e6], trials=30, seed=1, beta0=0.6)
    assert huge.coverage == [1.0] and all(huge.passes)


def test_theorem_A_coverage_x2():
    cov = ex.theorem_A_coverage(gauss(3), 200, [2.0], trials=100, seed=2, beta0=0.6)
    p = 1 - math.exp(-0.36 * 200 / 4) - 0.5
    assert cov.theoretical[0] == pytest.approx(p)
    assert cov.coverage[0] >= p - 3 * math.sqrt(p * (1 - p) / 100)


def test_tail_probability_reduced():
    res = ex.tail_probability(100, 5, [2, 8], trials=1500, seed=3)
    assert res.c_fit > 0
    assert all(0 <= f <= 1 for f in res.frequency)
    assert all(abs(z) <= 5 for z in res.firing_z)
    assert res.firing_exact == [bounds.lemma41_tail(2, 100), bounds.lemma41_tail(8, 100)]


def test_tail_probability_guards():
    with pytest.raises(InputError):
        ex.tail_probability(50, 5, [2.0], c_fit=1.0, trials=10, seed=0)
    res = ex.tail_probability(100, 5, [1.0], c_fit=1.0, trials=50, seed=0)
    assert res.frequency[0] <= 1


def test_noise_tail_frequency_matches_exact():
    n = 20_000
    f = ex.noise_tail_frequency(4, 100, n, seed=1)
    p = bounds.lemma41_tail(4, 100)
    assert abs(f - p) <= 5 * math.sqrt(p * (1 - p) / n)


def test_prop4_adversarial_example_exact():
    # one cell unvisited at k = 1e4, xi = 101 -> excess (100)^2 / 1e4 = 1
    s = m.Scenario(m.Partition(3, 1e4), m.GaussianNoise(0.0), m.ConstantOne())
    W = np.array([[1.0, 0, 0], [0, 1.0, 0], [0, 0, 0]])
    smp = m.Sample(W=W, y=np.ones(3), seed=0, zeta=np.array([0.0, 0.0, 1.0]))
    assert excess_risk_exact(solve_erm(smp, AdversarialXi(101.0)), s) == pytest.approx(1.0, rel=1e-12)
    assert excess_risk_exact(solve_erm(smp, AdversarialXi(1.0)), s) == pytest.approx(0.0, abs=1e-20)


def test_prop4_campaign_reduced():
    rep = ex.prop4_campaign(8, 40, 0.8, [1.0, 11.0, 1001.0], trials=300, seed=2)
    assert bounds.coupon_unvisited_prob(8, 40, rep.k) >= 0.8
    assert rep.floor_ok and rep.min_norm_ok and rep.frequency_ok
    assert rep.max_risk_gap <= 1e-12
    mins = rep.min_adversarial_excess()
    assert mins[0] == pytest.approx(0.0, abs=1e-20)
    assert mins[2] >= bounds.bound_prop4_floor(1001.0, rep.k, 1) * (1 - 1e-10)


def test_prop4_eta_close_to_one_inverts_k():
    k = bounds.invert_coupon_k(5, 3, 0.999)
    assert k == 5  # three draws never cover five cells
    k = bounds.invert_coupon_k(5, 50, 0.999)
    assert bounds.coupon_unvisited_prob(5, 50, k) >= 0.999 > bounds.coupon_unvisited_prob(5, 50, k - 1)


def test_small_ball_and_multiplier_campaigns_reduced():
    sb = ex.small_ball_campaign(gauss(5), 400, 0.5, 100, seeds=20, seed=1)
    assert sb.passed
    mc = ex.multiplier_campaign(gauss(10), 400, 10.0, seeds=100, seed=1)
    assert mc.exceed_frequency <= 0.1
    assert mc.threshold == pytest.approx(2 * math.sqrt(10 * 10 / 400))


def test_csv_dialect(tmp_path):
    p = tmp_path / "a.csv"
    ex.write_campaign_csv(p, [("c", "s", 0.1), ("c", "flag", True), ("c", "n", 3)])
    raw = p.read_bytes()
    assert raw == b"cell,statistic,value\nc,s,0.1\nc,flag,1\nc,n,3\n"
    q = tmp_path / "b.csv"
    ex.write_long_csv(q, [(1, 2.5, "series")])
    assert q.read_bytes() == b"x,y,series\n1,2.5,series\n"
