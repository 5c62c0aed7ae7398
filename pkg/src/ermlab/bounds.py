"""Closed-form excess-risk bounds, their validity conditions and the exact
probabilities behind the two lower-bound constructions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError

IE_MAX_M = 25


@dataclass(frozen=True)
class BoundResult:
    value: float
    probability: float
    valid: bool
    condition_detail: str = ""


def _clamp_probability(raw: float) -> tuple[float, str]:
    if raw <= 0.0:
        return 0.0, f"probability {raw:.6g} is not positive, clamped to 0"
    if raw > 1.0:
        return 1.0, f"probability {raw:.6g} clamped to 1"
    return raw, ""


def _join(*parts):
    return "; ".join(p for p in parts if p)


def bound_theorem_A(beta0, kappa0, sigma, M, N, x) -> BoundResult:
    """Small-ball bound ``(16/(beta0 kappa0^2))^2 sigma^2 M x / N``.

    Holds with probability ``1 - exp(-beta0^2 N/4) - 1/x`` once
    ``N >= 400^2 M / beta0^2``.
    """
    for name, v in (("beta0", beta0), ("kappa0", kappa0), ("M", M), ("N", N), ("x", x)):
        if not v > 0:
            raise InputError(f"{name} must be positive")
    if sigma < 0:
        raise InputError("sigma must be nonnegative")
    value = (16.0 / (beta0 * kappa0**2)) ** 2 * sigma**2 * M * x / N
    prob, note = _clamp_probability(1.0 - math.exp(-(beta0**2) * N / 4.0) - 1.0 / x)
    need = 400.0**2 * M / beta0**2
    valid = N >= need
    detail = _join("" if valid else f"N={N} < 400^2 M/beta0^2={need:.6g}", note)
    return BoundResult(value, prob, valid, detail)


def bound_catoni(B, m4_noise, M, N, x) -> BoundResult:
    """L_inf/L_2 bound ``1920 B sqrt(m4) [(3BM+x)/N + 16 B^2 M^2/N^2]``."""
    if B < 1:
        raise InputError("B must be >= 1")
    if B < M:
        warnings.warn(f"B={B} is below M={M}; the equivalence constant is always >= M",
                      stacklevel=2)
    value = 1920.0 * B * math.sqrt(m4_noise) * ((3 * B * M + x) / N + 16 * B**2 * M**2 / N**2)
    prob, note = _clamp_probability(1.0 - 2.0 * math.exp(-x))
    problems = []
    tail = 2.0 * math.exp(-x)
    if not (2.0 / N <= tail <= 1.0):
        problems.append(f"x={x} outside window 2/N <= 2exp(-x) <= 1")
    need = 1280.0 * B**2 * (3 * B * M + x + 16 * B**2 * M**2 / N)
    if N < need:
        problems.append(f"N={N} < 1280 B^2[3BM + x + 16B^2M^2/N]={need:.6g}")
    return BoundResult(value, prob, not problems, _join(*problems, note))


def bound_theorem_2(theta0, sigma4, M, N, x) -> BoundResult:
    """L4/L2 bound ``256^2 theta0^12 sigma4^2 M x / N`` with ``sigma4 = (E z^4)^(1/4)``."""
    if not theta0 > 0 or not x > 0 or not N > 0 or not M > 0:
        raise InputError("theta0, M, N and x must be positive")
    value = 256.0**2 * theta0**12 * sigma4**2 * M * x / N
    prob, note = _clamp_probability(1.0 - math.exp(-N / (64.0 * theta0**8)) - 1.0 / x)
    need = (1600.0 * theta0**4) ** 2 * M
    valid = N >= need
    detail = _join("" if valid else f"N={N} < (1600 theta0^4)^2 M={need:.6g}", note)
    return BoundResult(value, prob, valid, detail)


def bound_prop3_form(c, x, M, N) -> float:
    """Lower-bound shape ``c x M / N``; ``c`` is a fitted constant, not a known one."""
    return c * x * M / N


def bound_prop4_floor(xi, k, n_unvisited) -> float:
    """Excess risk of the adversarial minimizer: ``n_unvisited (xi-1)^2 / k``."""
    if k < 1:
        raise InputError("k must be >= 1")
    return n_unvisited * (xi - 1.0) ** 2 / k


def lemma41_tail(x, N) -> float:
    """``P(mean of squared spike noise >= x) = 1 - (1 - 1/(xN))^N``."""
    if N < 1:
        raise InputError("N must be >= 1")
    delta = 1.0 / (x * N)
    if not 0 < delta <= 1:
        raise InputError(f"delta = 1/(xN) = {delta} must lie in (0, 1]")
    return -math.expm1(N * math.log1p(-delta)) if delta < 1 else 1.0


def coupon_unvisited_prob(M, N, k, *, mc_trials=200_000, seed=0) -> float:
    """Probability that one of the M cells of mass ``1/k`` gets no point among N.

    Inclusion-exclusion up to ``M = 25``; beyond that the alternating sum
    loses too many digits and a Monte Carlo estimate is returned instead.
    """
    if k < M:
        raise InputError(f"need k >= M, got k={k}, M={M}")
    if N == 0:
        return 1.0
    if M <= IE_MAX_M:
        total = 0.0
        for j in range(1, M + 1):
            total += (-1) ** (j + 1) * math.comb(M, j) * (1.0 - j / k) ** N
        return min(max(total, 0.0), 1.0)
    return coupon_unvisited_mc(M, N, k, mc_trials, seed)[0]


def coupon_unvisited_mc(M, N, k, trials, seed) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the unvisited-cell probability."""
    rng = np.random.default_rng(seed)
    p = np.full(M + 1, 1.0 / k)
    p[0] = 1.0 - M / k
    hits = 0
    done = 0
    chunk = 100_000
    while done < trials:
        n = min(chunk, trials - done)
        counts = rng.multinomial(N, p, size=n)
        hits += int(np.count_nonzero((counts[:, 1:] == 0).any(axis=1)))
        done += n
    est = hits / trials
    return est, math.sqrt(est * (1 - est) / trials)


def invert_coupon_k(M, N, eta, k_max=10**9) -> int:
    """Smallest integer ``k >= M`` whose unvisited-cell probability reaches ``eta``."""
    if not 0 < eta < 1:
        raise InputError("eta must lie in (0, 1)")
    if coupon_unvisited_prob(M, N, M) >= eta:
        return M
    if coupon_unvisited_prob(M, N, k_max) < eta:
        raise InputError(f"no k <= {k_max} reaches eta={eta} for M={M}, N={N}")
    lo, hi = M, k_max  # prob(lo) < eta <= prob(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if coupon_unvisited_prob(M, N, mid) >= eta:
            hi = mid
        else:
            lo = mid
    return hi
