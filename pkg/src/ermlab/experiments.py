"""Monte Carlo campaigns comparing ERM against the bounds.

Every trial draws its own generator from ``(master_seed, cell, trial, tag)``
so trials can run in any order, or in worker processes, and still land in the
same index-addressed slot. Statistics are always computed from the
index-ordered arrays.
"""

from __future__ import annotations

import csv
import io
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import bounds
from .constants import (
    DEFAULT_KAPPA0,
    deviation_H,
    empirical_fraction_min,
    gaussian_small_ball,
    isomorphy_check,
    multiplier_sup,
)
from .erm import AdversarialXi, MinNorm, empirical_excess_loss, empirical_risk, excess_risk_exact, solve_erm, unvisited_cells
from .errors import InputError, UnsupportedScenarioError
from .models import (
    ConstantOne,
    GaussianIdentity,
    GaussianNoise,
    InSpan,
    Partition,
    Prop3Noise,
    Scenario,
    oracle_coeffs,
    sample,
)

DEFAULT_QUANTILES = (0.5, 0.9, 0.99)


def stream_seed(master_seed: int, *keys: int, tag: str = "") -> int:
    """64-bit seed for one independent stream, a pure function of its inputs."""
    path = [int(k) for k in keys] + [zlib.crc32(tag.encode())]
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=path)
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _resolve_workers(workers: int) -> int:
    if workers == 0:
        return os.cpu_count() or 1
    return max(int(workers), 1)


def _map(func, items, workers=1):
    workers = _resolve_workers(workers)
    items = list(items)
    if workers == 1 or len(items) < 2:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(items) // (4 * workers))
        return list(pool.map(func, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# single cells


def _trial(scenario, N, policy, seed):
    smp = sample(scenario, N, seed)
    t_hat = solve_erm(smp, policy)
    excess = excess_risk_exact(t_hat, scenario)
    total, _, _ = empirical_excess_loss(smp, t_hat, oracle_coeffs(scenario))
    if N >= scenario.M:
        lo, hi, _ = isomorphy_check(smp)
    else:
        lo, hi = math.nan, math.nan
    return excess, total, lo, hi


def _trial_seeds(seed, cell, trials, tag):
    return [stream_seed(seed, cell, i, tag=tag) for i in range(trials)]


@dataclass
class CellRecords:
    excess: np.ndarray
    pn_loss: np.ndarray
    iso_lower: np.ndarray
    iso_upper: np.ndarray

    @property
    def isomorphy_rate(self) -> float:
        ok = (self.iso_lower >= 0.5) & (self.iso_upper <= 1.5)
        return float(ok.mean())


def run_cell_records(scenario, N, policy=MinNorm(), trials=100, seed=0, cell=0, workers=1, tag="erm"):
    if not hasattr(scenario.design, "gram"):
        raise UnsupportedScenarioError("run_cell needs a design with an analytic Gram matrix")
    seeds = _trial_seeds(seed, cell, trials, tag)
    out = _map(partial(_trial, scenario, N, policy), seeds, workers)
    arr = np.array(out, dtype=float).reshape(trials, 4)
    return CellRecords(*(arr[:, j].copy() for j in range(4)))


def run_cell(scenario, N, policy=MinNorm(), trials=100, seed=0, cell=0, workers=1) -> np.ndarray:
    """Exact excess risks of ERM over ``trials`` independent samples, in trial order."""
    return run_cell_records(scenario, N, policy, trials, seed, cell, workers).excess


def ols_expected_excess(sigma, M, N) -> float:
    """Exact mean excess risk of OLS with standard Gaussian design and independent
    noise of variance ``sigma^2``: ``sigma^2 M / (N - M - 1)``."""
    if N <= M + 1:
        return math.inf
    return sigma**2 * M / (N - M - 1)


# ---------------------------------------------------------------------------
# rate fits


@dataclass(frozen=True)
class RateFit:
    slope: float
    stderr: float
    intercept: float


def fit_loglog(xs, ys) -> RateFit:
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = len(x) - 2
    if dof > 0:
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(X.T @ X)
        se = math.sqrt(max(cov[1, 1], 0.0))
    else:
        se = math.nan
    return RateFit(slope=float(coef[1]), stderr=se, intercept=float(coef[0]))


def fit_rate(grid, samples, min_points=4, min_trials=30) -> RateFit:
    """Log-log OLS of the median excess risk against the grid variable (N or M)."""
    grid = list(grid)
    if len(grid) < min_points or len(samples) != len(grid):
        raise InputError(f"rate fit needs >= {min_points} grid points with one sample list each")
    meds = []
    for g, s in zip(grid, samples):
        s = np.asarray(s, dtype=float)
        if s.size < min_trials:
            raise InputError(f"grid point {g} has {s.size} trials, need >= {min_trials}")
        meds.append(float(np.median(s)))
    if min(meds) <= 0:
        raise InputError("a median excess risk is zero; log-log fit refused")
    return fit_loglog(grid, meds)


@dataclass
class RateCampaign:
    variable: str
    grid: list
    fixed: dict
    records: list = field(repr=False)
    fit: RateFit = None
    quantiles: tuple = DEFAULT_QUANTILES
    slope_window: tuple = (-1.15, -0.85)

    @property
    def medians(self):
        return [float(np.median(r.excess)) for r in self.records]

    @property
    def passed(self) -> bool:
        lo, hi = self.slope_window
        return lo <= self.fit.slope <= hi

    def rows(self):
        out = []
        for g, rec in zip(self.grid, self.records):
            cell = f"{self.variable}={g}"
            out.append((cell, "trials", rec.excess.size))
            out.append((cell, "mean", float(rec.excess.mean())))
            for q in self.quantiles:
                out.append((cell, f"q{q:g}", float(np.quantile(rec.excess, q))))
            out.append((cell, "max_pn_loss", float(rec.pn_loss.max())))
            out.append((cell, "isomorphy_rate", rec.isomorphy_rate))
        out.append(("fit", "slope", self.fit.slope))
        out.append(("fit", "slope_stderr", self.fit.stderr))
        out.append(("fit", "intercept", self.fit.intercept))
        out.append(("fit", "pass", int(self.passed)))
        return out

    def long_rows(self):
        return [(g, m, f"median_excess_vs_{self.variable}") for g, m in zip(self.grid, self.medians)]

    def summary(self):
        return {
            "variable": self.variable,
            "grid": list(self.grid),
            "fixed": self.fixed,
            "medians": self.medians,
            "slope": self.fit.slope,
            "slope_stderr": self.fit.stderr,
            "slope_window": list(self.slope_window),
            "pass": self.passed,
        }


def rate_in_N(scenario, N_grid, trials=300, seed=0, policy=MinNorm(), workers=1,
              slope_window=(-1.15, -0.85)) -> RateCampaign:
    records = [run_cell_records(scenario, N, policy, trials, seed, cell=i, workers=workers)
               for i, N in enumerate(N_grid)]
    fit = fit_rate(N_grid, [r.excess for r in records])
    return RateCampaign("N", list(N_grid), {"M": scenario.M}, records, fit, slope_window=slope_window)


def rate_in_M(make_scenario, M_grid, N, trials=300, seed=0, policy=MinNorm(), workers=1,
              slope_window=(0.85, 1.15)) -> RateCampaign:
    """``make_scenario(M)`` builds the scenario for each dimension on the grid."""
    records = [run_cell_records(make_scenario(M), N, policy, trials, seed, cell=1000 + i, workers=workers)
               for i, M in enumerate(M_grid)]
    fit = fit_rate(M_grid, [r.excess for r in records])
    return RateCampaign("M", list(M_grid), {"N": N}, records, fit, slope_window=slope_window)


# ---------------------------------------------------------------------------
# coverage of the small-ball bound


@dataclass
class CoverageResult:
    N: int
    M: int
    beta0: float
    kappa0: float
    sigma: float
    x_grid: list
    bound_values: list
    theoretical: list
    coverage: list
    stderr: list
    valid: bool
    trials: int
    excess: np.ndarray = field(repr=False)

    @property
    def passes(self):
        return [c >= p - 3 * s for c, p, s in zip(self.coverage, self.theoretical, self.stderr)]

    def rows(self):
        out = []
        for x, b, p, c, s, ok in zip(self.x_grid, self.bound_values, self.theoretical,
                                     self.coverage, self.stderr, self.passes):
            cell = f"x={x:g}"
            out += [(cell, "bound", b), (cell, "theoretical_probability", p),
                    (cell, "coverage", c), (cell, "stderr", s), (cell, "pass", int(ok))]
        out.append(("all", "valid", int(self.valid)))
        return out

    def summary(self):
        return {"N": self.N, "M": self.M, "beta0": self.beta0, "kappa0": self.kappa0,
                "valid": self.valid, "x": list(self.x_grid), "coverage": self.coverage,
                "theoretical": self.theoretical, "pass": all(self.passes)}


def theorem_A_coverage(scenario, N, x_grid, trials, seed, beta0, kappa0=DEFAULT_KAPPA0,
                       policy=MinNorm(), workers=1) -> CoverageResult:
    """Frequency with which the ERM excess risk sits under the small-ball bound, per x.

    Runs even below the bound's sample-size threshold; ``valid`` records it.
    """
    excess = run_cell(scenario, N, policy, trials, seed, cell=2000, workers=workers)
    sigma = scenario.sigma_eff
    vals, probs, cov, ses = [], [], [], []
    valid = True
    for x in x_grid:
        b = bounds.bound_theorem_A(beta0, kappa0, sigma, scenario.M, N, x)
        valid = valid and b.valid
        vals.append(b.value)
        probs.append(b.probability)
        # rounding floor: noiseless ERM lands ~1e-30 away from the oracle
        cov.append(float(np.mean(excess <= b.value + 1e-20)))
        ses.append(math.sqrt(b.probability * (1 - b.probability) / trials))
    return CoverageResult(N, scenario.M, beta0, kappa0, sigma, list(x_grid), vals, probs, cov,
                          ses, valid, trials, excess)


# ---------------------------------------------------------------------------
# spike-noise lower bound: polynomial tails


def prop3_scenario(M, N, x, t_star=None) -> Scenario:
    t = np.zeros(M) if t_star is None else np.asarray(t_star, dtype=float)
    return Scenario(GaussianIdentity(M), Prop3Noise(x=x, N=N), InSpan(t))


def _prop3_trial(scenario, N, x, seed):
    smp = sample(scenario, N, seed)
    t_hat = solve_erm(smp)
    excess = excess_risk_exact(t_hat, scenario)
    s2 = float(np.mean(np.asarray(smp.zeta) ** 2))
    fired = s2 >= x * (1 - 1e-12)
    iso = isomorphy_check(smp)[2]
    return excess, float(fired), float(iso)


def _prop3_cell(M, N, x, trials, seed, cell, tag, workers, t_star=None):
    scn = prop3_scenario(M, N, x, t_star)
    seeds = _trial_seeds(seed, cell, trials, tag)
    arr = np.array(_map(partial(_prop3_trial, scn, N, x), seeds, workers), dtype=float)
    return arr[:, 0], arr[:, 1].astype(bool), arr[:, 2].astype(bool)


def calibrate_c_fit(M, N, x, trials, seed, quantile=0.5, workers=1, t_star=None) -> float:
    """Quantile of ``excess * N / (x M)`` over the trials where the spike fired.

    Uses its own seed stream, independent of the evaluation trials.
    """
    excess, fired, _ = _prop3_cell(M, N, x, trials, seed, 3000, "prop3-calibrate", workers, t_star)
    if not fired.any():
        raise InputError("no spike fired during calibration; raise trials")
    return float(np.quantile(excess[fired] * N / (x * M), quantile))


@dataclass
class TailResult:
    N: int
    M: int
    x_grid: list
    c_fit: float
    trials: int
    frequency: list
    firing_frequency: list
    firing_exact: list
    isomorphy_rate: list
    ratio_floor: float = 0.3

    @property
    def ratio(self):
        return [f * x for f, x in zip(self.frequency, self.x_grid)]

    @property
    def firing_z(self):
        z = []
        for f, p in zip(self.firing_frequency, self.firing_exact):
            se = math.sqrt(p * (1 - p) / self.trials)
            z.append((f - p) / se if se > 0 else 0.0)
        return z

    @property
    def passed(self) -> bool:
        return all(r >= self.ratio_floor for r in self.ratio)

    def rows(self):
        out = [("all", "c_fit", self.c_fit), ("all", "N", self.N), ("all", "M", self.M)]
        for i, x in enumerate(self.x_grid):
            cell = f"x={x:g}"
            out += [(cell, "frequency", self.frequency[i]), (cell, "frequency_times_x", self.ratio[i]),
                    (cell, "firing_frequency", self.firing_frequency[i]),
                    (cell, "firing_exact", self.firing_exact[i]),
                    (cell, "firing_z", self.firing_z[i]),
                    (cell, "isomorphy_rate", self.isomorphy_rate[i])]
        out.append(("all", "pass", int(self.passed)))
        return out

    def long_rows(self):
        return [(x, r, "frequency_times_x") for x, r in zip(self.x_grid, self.ratio)] + \
               [(x, f, "firing_frequency") for x, f in zip(self.x_grid, self.firing_frequency)]

    def summary(self):
        return {"N": self.N, "M": self.M, "x": list(self.x_grid), "c_fit": self.c_fit,
                "c_fit_is_fitted": True, "frequency_times_x": self.ratio,
                "ratio_floor": self.ratio_floor, "firing_z": self.firing_z, "pass": self.passed}


def tail_probability(N, M, x_grid, c_fit=None, trials=5000, seed=0, c0=20, workers=1,
                     t_star=None, calibration_quantile=0.5) -> TailResult:
    """Frequency of ``{excess >= c_fit x M / N}`` under spike noise tuned to each x.

    ``c_fit=None`` calibrates the constant at the smallest x of the grid.
    """
    if N < c0 * M:
        raise InputError(f"need N >= {c0} M for the isomorphy event, got N={N}, M={M}")
    x_grid = sorted(float(x) for x in x_grid)
    if c_fit is None:
        c_fit = calibrate_c_fit(M, N, x_grid[0], trials, seed, calibration_quantile, workers, t_star)
    freq, fire, exact, iso = [], [], [], []
    for i, x in enumerate(x_grid):
        excess, fired, iso_ok = _prop3_cell(M, N, x, trials, seed, 4000 + i, "prop3", workers, t_star)
        freq.append(float(np.mean(excess >= bounds.bound_prop3_form(c_fit, x, M, N))))
        fire.append(float(fired.mean()))
        exact.append(bounds.lemma41_tail(x, N))
        iso.append(float(iso_ok.mean()))
    return TailResult(N, M, x_grid, c_fit, trials, freq, fire, exact, iso)


def noise_tail_frequency(x, N, replicates, seed, chunk=2000) -> float:
    """Monte Carlo frequency of ``{mean(zeta_i^2) >= x}`` for spike noise, no ERM involved."""
    noise = Prop3Noise(x=x, N=N)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < replicates:
        n = min(chunk, replicates - done)
        z = noise.draw(rng, n * N).reshape(n, N)
        hits += int(np.count_nonzero((z * z).mean(axis=1) >= x * (1 - 1e-12)))
        done += n
    return hits / replicates


# ---------------------------------------------------------------------------
# boundedness counterexample


def _prop4_trial(scenario, N, k, xi_grid, seed):
    smp = sample(scenario, N, seed)
    free = unvisited_cells(smp.W)
    t_mn = solve_erm(smp, MinNorm())
    mn_excess = excess_risk_exact(t_mn, scenario)
    if free.size == 0:
        return free.size, mn_excess, [math.nan] * len(xi_grid), [0.0] * len(xi_grid), 0.0
    base_risk = empirical_risk(smp.W, smp.y, t_mn)
    adv, err = [], []
    risk_gap = 0.0
    for xi in xi_grid:
        t_ad = solve_erm(smp, AdversarialXi(xi))
        e = excess_risk_exact(t_ad, scenario)
        floor = bounds.bound_prop4_floor(xi, k, free.size)
        adv.append(e)
        err.append(abs(e - floor) / max(1.0, floor))
        risk_gap = max(risk_gap, abs(empirical_risk(smp.W, smp.y, t_ad) - base_risk))
    return free.size, mn_excess, adv, err, risk_gap


@dataclass
class Prop4Report:
    M: int
    N: int
    eta: float
    k: int
    predicted: float
    trials: int
    xi_grid: list
    n_unvisited: np.ndarray = field(repr=False)
    min_norm_excess: np.ndarray = field(repr=False)
    adversarial_excess: np.ndarray = field(repr=False)
    max_rel_error: float = 0.0
    max_risk_gap: float = 0.0

    @property
    def unvisited_frequency(self):
        return float(np.mean(self.n_unvisited > 0))

    @property
    def stderr(self):
        p = self.unvisited_frequency
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def frequency_ok(self):
        return self.unvisited_frequency >= self.eta - 3 * self.stderr

    @property
    def floor_ok(self):
        return self.max_rel_error <= 1e-10

    @property
    def min_norm_ok(self):
        return bool(np.all(self.min_norm_excess <= self.M / self.k * (1 + 1e-12)))

    def min_adversarial_excess(self):
        hit = self.n_unvisited > 0
        if not hit.any():
            return [math.nan] * len(self.xi_grid)
        return [float(v) for v in self.adversarial_excess[hit].min(axis=0)]

    def xi_for_kappa(self, kappa) -> float:
        """Smallest xi >= 1 whose floor for one unvisited cell exceeds ``kappa``."""
        return 1.0 + math.sqrt(kappa * self.k) * (1 + 1e-9)

    @property
    def passed(self):
        return self.frequency_ok and self.floor_ok and self.min_norm_ok

    def rows(self):
        out = [("all", "k", self.k), ("all", "predicted_unvisited", self.predicted),
               ("all", "unvisited_frequency", self.unvisited_frequency), ("all", "stderr", self.stderr),
               ("all", "max_min_norm_excess", float(self.min_norm_excess.max())),
               ("all", "min_norm_cap", self.M / self.k),
               ("all", "max_rel_error_vs_floor", self.max_rel_error),
               ("all", "max_empirical_risk_gap", self.max_risk_gap)]
        for xi, v in zip(self.xi_grid, self.min_adversarial_excess()):
            out.append((f"xi={xi:g}", "min_adversarial_excess", v))
            out.append((f"xi={xi:g}", "floor_one_cell", bounds.bound_prop4_floor(xi, self.k, 1)))
        out.append(("all", "pass", int(self.passed)))
        return out

    def summary(self):
        return {"M": self.M, "N": self.N, "eta": self.eta, "k": self.k, "predicted": self.predicted,
                "unvisited_frequency": self.unvisited_frequency, "stderr": self.stderr,
                "max_rel_error": self.max_rel_error, "min_norm_ok": self.min_norm_ok,
                "pass": self.passed}


def prop4_scenario(M, k) -> Scenario:
    return Scenario(Partition(M, k), GaussianNoise(0.0), ConstantOne())


def prop4_campaign(M, N, eta, xi_grid, trials, seed, workers=1) -> Prop4Report:
    """Partition design with ``k`` chosen so a cell stays empty with probability >= eta,
    then compare the adversarial and minimum-norm empirical minimizers."""
    k = bounds.invert_coupon_k(M, N, eta)
    scn = prop4_scenario(M, k)
    seeds = _trial_seeds(seed, 5000, trials, "prop4")
    res = _map(partial(_prop4_trial, scn, N, k, list(xi_grid)), seeds, workers)
    n_unv = np.array([r[0] for r in res])
    mn = np.array([r[1] for r in res])
    adv = np.array([r[2] for r in res], dtype=float)
    err = max((max(r[3]) for r in res), default=0.0)
    gap = max(r[4] for r in res)
    return Prop4Report(M, N, eta, k, bounds.coupon_unvisited_prob(M, N, k), trials, list(xi_grid),
                       n_unv, mn, adv, float(err), float(gap))


# ---------------------------------------------------------------------------
# lemma-level checks


def _small_ball_trial(scenario, N, kappa0, n_directions, beta0, seed):
    smp = sample(scenario, N, seed)
    sigma = scenario.design.gram()
    frac = empirical_fraction_min(smp, sigma, kappa0, n_directions, seed=seed ^ 0x5A5A)
    H = deviation_H(smp, sigma, kappa0, n_directions, seed=seed ^ 0xA5A5)
    return frac, H


@dataclass
class SmallBallCampaign:
    N: int
    M: int
    kappa0: float
    beta0: float
    fractions: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    required_rate: float = 0.95

    @property
    def pass_rate(self):
        return float(np.mean(self.fractions >= self.beta0 / 2))

    @property
    def passed(self):
        return self.pass_rate >= self.required_rate

    def rows(self):
        return [("all", "beta0", self.beta0), ("all", "half_beta0", self.beta0 / 2),
                ("all", "min_fraction_mean", float(self.fractions.mean())),
                ("all", "min_fraction_min", float(self.fractions.min())),
                ("all", "pass_rate", self.pass_rate),
                ("all", "H_mean", float(self.H.mean())),
                ("all", "H_q95", float(np.quantile(self.H, 0.95))),
                ("all", "sqrt_M_over_N", math.sqrt(self.M / self.N)),
                ("all", "pass", int(self.passed))]

    def summary(self):
        return {"N": self.N, "M": self.M, "kappa0": self.kappa0, "beta0": self.beta0,
                "pass_rate": self.pass_rate, "H_mean": float(self.H.mean()), "pass": self.passed}


def small_ball_campaign(scenario, N, kappa0=DEFAULT_KAPPA0, n_directions=200, seeds=100, seed=0,
                        beta0=None, workers=1) -> SmallBallCampaign:
    """Empirical small-ball fractions (and the deviation H) across independent samples.

    ``beta0`` defaults to the exact Gaussian value, valid for Gaussian designs.
    """
    if beta0 is None:
        beta0 = gaussian_small_ball(kappa0)
    s = _trial_seeds(seed, 6000, seeds, "small-ball")
    res = np.array(_map(partial(_small_ball_trial, scenario, N, kappa0, n_directions, beta0), s, workers))
    return SmallBallCampaign(N, scenario.M, kappa0, beta0, res[:, 0], res[:, 1])


def _multiplier_trial(scenario, N, seed):
    smp = sample(scenario, N, seed)
    return multiplier_sup(smp, scenario.design.gram())


@dataclass
class MultiplierCampaign:
    N: int
    M: int
    sigma: float
    x: float
    sups: np.ndarray = field(repr=False)

    @property
    def threshold(self):
        return 2 * self.sigma * math.sqrt(self.M * self.x / self.N)

    @property
    def exceed_frequency(self):
        return float(np.mean(self.sups > self.threshold))

    @property
    def passed(self):
        return self.exceed_frequency <= 1 / self.x

    def rows(self):
        return [("all", "threshold", self.threshold), ("all", "exceed_frequency", self.exceed_frequency),
                ("all", "one_over_x", 1 / self.x), ("all", "sup_mean", float(self.sups.mean())),
                ("all", "sup_max", float(self.sups.max())), ("all", "pass", int(self.passed))]

    def summary(self):
        return {"N": self.N, "M": self.M, "sigma": self.sigma, "x": self.x, "threshold": self.threshold,
                "exceed_frequency": self.exceed_frequency, "pass": self.passed}


def multiplier_campaign(scenario, N, x, seeds=1000, seed=0, workers=1) -> MultiplierCampaign:
    s = _trial_seeds(seed, 7000, seeds, "multiplier")
    sups = np.array(_map(partial(_multiplier_trial, scenario, N), s, workers))
    return MultiplierCampaign(N, scenario.M, scenario.sigma_eff, x, sups)


def _iso_trial(M, N, seed):
    W = np.random.default_rng(seed).standard_normal((N, M))
    return isomorphy_check(W)[2]


def isomorphy_rate(M, N, seeds=200, seed=0, workers=1) -> float:
    """Fraction of Gaussian designs whose empirical Gram has spectrum in [1/2, 3/2]."""
    s = _trial_seeds(seed, 8000 + M, seeds, "isomorphy")
    return float(np.mean(_map(partial(_iso_trial, M, N), s, workers)))


# ---------------------------------------------------------------------------
# CSV output: comma separated, '.' decimal, LF line endings


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_campaign_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(("cell", "statistic", "value"), rows))


def write_long_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(("x", "y", "series"), rows))
