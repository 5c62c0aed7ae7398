"""Exit criteria of the package, each at its stated scale and tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from ermlab import bounds, constants as c, experiments as ex
from ermlab import models as m
from ermlab.cli import main as cli_main

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

GAUSS_TAIL_HALF = 0.6170750774519739  # P(|g| >= 1/2), quadrature of the normal density


def report(n, ok, detail):
    ACCEPTANCE_LINES.append(f"AC {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def gauss(M, sigma=1.0):
    return m.Scenario(m.GaussianIdentity(M), m.GaussianNoise(sigma), m.InSpan(np.ones(M)))


def test_ac01_rate_in_N():
    t0 = time.perf_counter()
    camp = ex.rate_in_N(gauss(10), [250, 500, 1000, 2000, 4000], trials=300, seed=101)
    dt = time.perf_counter() - t0
    ok = -1.15 <= camp.fit.slope <= -0.85 and dt < 300
    report(1, ok, f"slope vs N = {camp.fit.slope:.4f} +/- {camp.fit.stderr:.4f} in [-1.15, -0.85]; {dt:.1f}s")


def test_ac02_rate_in_M():
    camp = ex.rate_in_M(gauss, [5, 10, 20, 40], 4000, trials=300, seed=102)
    ok = 0.85 <= camp.fit.slope <= 1.15
    report(2, ok, f"slope vs M = {camp.fit.slope:.4f} +/- {camp.fit.stderr:.4f} in [0.85, 1.15]")


def test_ac03_ols_oracle():
    r = ex.run_cell(gauss(5), 500, trials=2000, seed=103)
    target = 1.0 * 5 / 500
    rel = abs(r.mean() - target) / target
    exact = ex.ols_expected_excess(1.0, 5, 500)
    report(3, rel <= 0.10,
           f"mean excess {r.mean():.5f} vs sigma^2 M/N = {target:.5f} (rel {rel:.3f} <= 0.10); "
           f"exact OLS mean {exact:.5f}")


def test_ac04_theorem_A_coverage():
    scn = gauss(5)
    sb = c.estimate_small_ball(scn, 0.5, n_directions=200, n_samples=100_000, seed=1040)
    cov = ex.theorem_A_coverage(scn, 1000, [2.0, 5.0, 10.0], trials=500, seed=104, beta0=sb.beta0_hat,
                                kappa0=0.5)
    ok = all(cov.passes)
    cells = ", ".join(f"x={x:g}: {f:.3f} >= {p:.3f}-3se" for x, f, p in zip(cov.x_grid, cov.coverage, cov.theoretical))
    report(4, ok, f"beta0_hat={sb.beta0_hat:.4f}, sample-size condition met={cov.valid}; {cells}")


def test_ac05_lemma_small_ball_fraction():
    camp = ex.small_ball_campaign(gauss(5), 400, 0.5, n_directions=200, seeds=100, seed=105,
                                  beta0=GAUSS_TAIL_HALF)
    hits = int(round(camp.pass_rate * 100))
    report(5, hits >= 95, f"min fraction >= beta0/2 = {GAUSS_TAIL_HALF / 2:.4f} in {hits}/100 seeds (need 95)")


def test_ac06_lemma_multiplier():
    camp = ex.multiplier_campaign(gauss(10), 400, 10.0, seeds=1000, seed=106)
    report(6, camp.exceed_frequency <= 0.1,
           f"P(sup > 2 sigma sqrt(Mx/N) = {camp.threshold:.4f}) = {camp.exceed_frequency:.4f} <= 0.1")


def test_ac07_B_at_least_M():
    rng = np.random.default_rng(107)
    worst = math.inf
    for _ in range(50):
        M = int(rng.integers(2, 11))
        n_atoms = M + int(rng.integers(0, 11))
        d = m.DiscreteAtoms(rng.standard_normal((n_atoms, M)), rng.dirichlet(np.ones(n_atoms)))
        worst = min(worst, c.compute_B_discrete(d) - M)
    attained = max(abs(c.compute_B_discrete(m.DiscreteAtoms(np.eye(M), np.full(M, 1 / M))) - M)
                   for M in range(2, 11))
    ok = worst >= -1e-8 and attained <= 1e-8
    report(7, ok, f"min(B - M) over 50 designs = {worst:.3g} >= -1e-8; uniform indicators |B - M| = {attained:.2g}")


def _pz_scenarios():
    rng = np.random.default_rng(108)
    out = [
        gauss(3),
        m.Scenario(m.GaussianCov([[2.0, 0.6, 0.0], [0.6, 1.0, -0.3], [0.0, -0.3, 0.5]]), m.GaussianNoise(1), m.InSpan(np.zeros(3))),
        m.Scenario(m.HeavyTailedIID(3, 6.0), m.GaussianNoise(1), m.InSpan(np.zeros(3))),
        m.Scenario(m.HeavyTailedIID(4, 10.0), m.GaussianNoise(1), m.InSpan(np.zeros(4))),
        m.Scenario(m.Partition(4, 4), m.GaussianNoise(0), m.ConstantOne()),
        m.Scenario(m.Partition(3, 9), m.GaussianNoise(0), m.ConstantOne()),
    ]
    for M in (2, 3, 4, 5):
        atoms = rng.standard_normal((M + 4, M))
        out.append(m.Scenario(m.DiscreteAtoms(atoms, rng.dirichlet(np.ones(M + 4))), m.GaussianNoise(1),
                              m.InSpan(np.zeros(M))))
    return out


def test_ac08_paley_zygmund_consistency():
    bad = []
    for i, scn in enumerate(_pz_scenarios()):
        theta = c.estimate_theta0(scn, n_directions=100, n_samples=100_000, seed=1080 + i)
        sb = c.estimate_small_ball(scn, 0.5, n_directions=100, n_samples=100_000, seed=1180 + i)
        pz = c.paley_zygmund(theta, 0.5)
        if not pz <= sb.beta0_hat + 3 * sb.stderr:
            bad.append((i, pz, sb.beta0_hat))
    report(8, not bad, f"10 scenarios, violations: {bad or 'none'}")


def test_ac09_lemma41_exact_tail():
    worst_z = 0.0
    floor_ok = True
    n = 100_000
    for k, (x, N) in enumerate((x, N) for x in (2, 4, 8) for N in (100, 1000)):
        p = bounds.lemma41_tail(x, N)
        f = ex.noise_tail_frequency(x, N, n, seed=1090 + k)
        worst_z = max(worst_z, abs(f - p) / math.sqrt(p * (1 - p) / n))
        floor_ok = floor_ok and p >= (1 - math.exp(-1)) / x
    report(9, worst_z <= 5 and floor_ok, f"max |z| = {worst_z:.2f} <= 5; exact tail >= (1-1/e)/x: {floor_ok}")


def test_ac10_polynomial_tail():
    res = ex.tail_probability(200, 5, [2, 4, 8, 16], c_fit=None, trials=5000, seed=110)
    ratios = ", ".join(f"x={x:g}: {r:.3f}" for x, r in zip(res.x_grid, res.ratio))
    report(10, res.passed, f"c_fit={res.c_fit:.4f} (fitted at x=2); frequency*x >= 0.3: {ratios}")


def test_ac11_boundedness_counterexample():
    k = bounds.invert_coupon_k(20, 100, 0.9)
    kappas = (10.0, 1e4)
    xi_grid = [1.0, 11.0, 101.0] + [1.0 + math.sqrt(kp * k) * (1 + 1e-9) for kp in kappas]
    rep = ex.prop4_campaign(20, 100, 0.9, xi_grid, trials=2000, seed=111)
    mins = rep.min_adversarial_excess()
    exceeds = all(v > kp for v, kp in zip(mins[3:], kappas))
    ok = rep.frequency_ok and rep.floor_ok and rep.min_norm_ok and exceeds and rep.k == k
    report(11, ok,
           f"k={rep.k}; unvisited freq {rep.unvisited_frequency:.4f} >= 0.9-3se ({rep.stderr:.4f}); "
           f"max rel err vs floor {rep.max_rel_error:.2g}; min_norm <= M/k: {rep.min_norm_ok}; "
           f"adversarial excess exceeds kappa in {kappas}: {exceeds}")


def test_ac12_isomorphy():
    rates = {M: ex.isomorphy_rate(M, 20 * M, seeds=200, seed=112) for M in (5, 25)}
    ok = all(r >= 0.99 for r in rates.values())
    report(12, ok, "isomorphy pass rate at N=20M: " + ", ".join(f"M={M}: {r:.3f}" for M, r in rates.items())
           + " (need >= 0.99)")


def test_ac13_determinism(tmp_path):
    same = True
    for cmd in ("rate", "constants", "lower-bounds", "small-ball", "multiplier"):
        a, b = tmp_path / f"{cmd}-a", tmp_path / f"{cmd}-b"
        assert cli_main([cmd, "--out", str(a), "--seed", "113"]) in (0, 1)
        assert cli_main([cmd, "--out", str(b), "--seed", "113"]) in (0, 1)
        for f in sorted(a.glob("*.csv")):
            same = same and f.read_bytes() == (b / f.name).read_bytes()
    report(13, same, "CSV outputs of every campaign byte-identical across reruns")
