"""Norm-equivalence and small-ball constants of the span, estimated or exact.

Constants that are defined as infima or suprema over the whole span are
approximated by probing random directions, drawn uniformly on the unit sphere
of the L2 geometry (whiten, draw a Euclidean-uniform vector, unwhiten).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from . import linalg
from .errors import InputError, UnsupportedScenarioError
from .models import DiscreteAtoms, HeavyTailedIID, Partition, Sample, Scenario

DEFAULT_KAPPA0 = 0.5
# E H <= c * sqrt(M/N) with c <= 100 (VC bound); recorded, never used as a test threshold
VC_CONSTANT_CRUDE = 100.0


@dataclass(frozen=True)
class SmallBallEstimate:
    kappa0: float
    beta0_hat: float
    n_directions: int
    n_samples: int
    per_direction_min: np.ndarray = field(repr=False)
    stderr: float = 0.0


@dataclass(frozen=True)
class ConstantsReport:
    small_ball: SmallBallEstimate
    theta0_hat: float
    B_exact: float | None
    pz_beta0: float
    seed: int
    n_directions: int
    n_samples: int
    notes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "kappa0": self.small_ball.kappa0,
            "beta0_hat": self.small_ball.beta0_hat,
            "beta0_stderr": self.small_ball.stderr,
            "theta0_hat": self.theta0_hat,
            "pz_beta0": self.pz_beta0,
            "B_exact": self.B_exact,
            "seed": self.seed,
            "n_directions": self.n_directions,
            "n_samples": self.n_samples,
            "notes": list(self.notes),
        }


def gaussian_small_ball(kappa0: float) -> float:
    """``P(|g| >= kappa0)`` for a standard normal ``g``."""
    return float(erfc(kappa0 / math.sqrt(2.0)))


def random_directions(sigma, n_directions, rng) -> np.ndarray:
    """Directions ``t`` (columns) with ``t' Sigma t = 1``, uniform on that ellipsoid.

    Directions whose L2 norm vanishes (Sigma singular there) are dropped with a
    warning.
    """
    sigma = np.asarray(sigma, dtype=float)
    M = sigma.shape[0]
    U = rng.standard_normal((M, n_directions))
    U /= np.linalg.norm(U, axis=0)
    T = linalg.pinv_sqrt_inv(sigma) @ U
    norms = np.sqrt(np.maximum(np.einsum("ij,ik,kj->j", T, sigma, T), 0.0))
    ok = norms > 1e-12
    if not ok.all():
        warnings.warn(f"skipped {int((~ok).sum())} directions with zero L2 norm", stacklevel=2)
    return T[:, ok] / norms[ok]


def _fractions(W, sigma, kappa0, n_directions, rng):
    T = random_directions(sigma, n_directions, rng)
    proj = np.abs(W @ T)  # L2 norm of every column of T is 1
    return (proj >= kappa0).mean(axis=0), T


def estimate_small_ball(
    scenario: Scenario,
    kappa0: float = DEFAULT_KAPPA0,
    n_directions: int = 100,
    n_samples: int = 20_000,
    seed: int = 0,
) -> SmallBallEstimate:
    """Minimum over random directions of the estimated ``P(|<t,W>| >= kappa0 ||t||)``.

    One design sample of size ``n_samples`` is shared by every direction.
    """
    if n_directions < 1 or n_samples < 1:
        raise InputError("n_directions and n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    sigma = scenario.design.gram()
    W = scenario.design.draw(rng, n_samples)
    frac, T = _fractions(W, sigma, kappa0, n_directions, rng)
    j = int(np.argmin(frac))
    b = float(frac[j])
    return SmallBallEstimate(
        kappa0=kappa0,
        beta0_hat=b,
        n_directions=T.shape[1],
        n_samples=n_samples,
        per_direction_min=T[:, j],
        stderr=math.sqrt(b * (1 - b) / n_samples),
    )


def empirical_fraction_min(sample: Sample, sigma, kappa0=DEFAULT_KAPPA0, n_directions=200, seed=0) -> float:
    """``min_t (1/N) #{i : |<t, W_i>| >= kappa0 ||t||_L2}`` over random directions."""
    rng = np.random.default_rng(seed)
    frac, _ = _fractions(np.asarray(sample.W), sigma, kappa0, n_directions, rng)
    return float(frac.min())


def deviation_H(sample: Sample, sigma, kappa0=DEFAULT_KAPPA0, n_directions=200, seed=0, reference=None) -> float:
    """Largest gap between empirical and population small-ball frequencies.

    With ``reference=None`` the design is taken to be Gaussian, so every
    normalized direction has population probability ``P(|g| >= kappa0)``.
    Otherwise ``reference`` is an independent (large) design matrix from the
    same law and its frequencies stand in for the population ones.
    """
    rng = np.random.default_rng(seed)
    T = random_directions(sigma, n_directions, rng)
    emp = (np.abs(np.asarray(sample.W) @ T) >= kappa0).mean(axis=0)
    if reference is None:
        pop = gaussian_small_ball(kappa0)
    else:
        pop = (np.abs(np.asarray(reference) @ T) >= kappa0).mean(axis=0)
    return float(np.max(np.abs(emp - pop)))


def estimate_theta0(scenario: Scenario, n_directions=100, n_samples=100_000, seed=0) -> float:
    """Max over random directions of the empirical ``||<t,W>||_4 / ||<t,W>||_2``.

    Returns ``inf`` (with a warning) when the design has no fourth moment.
    """
    design = scenario.design
    if isinstance(design, HeavyTailedIID) and design.dof <= 4:
        warnings.warn(f"heavy_tailed_iid with dof={design.dof} has no fourth moment; theta0 is infinite",
                      stacklevel=2)
        return math.inf
    rng = np.random.default_rng(seed)
    W = design.draw(rng, n_samples)
    T = random_directions(design.gram(), n_directions, rng)
    P = W @ T
    P2 = P * P
    l2 = np.sqrt(P2.mean(axis=0))
    l4 = (P2 * P2).mean(axis=0) ** 0.25
    ok = l2 > 0
    return float(np.max(l4[ok] / l2[ok]))


def paley_zygmund(theta0: float, kappa0: float = DEFAULT_KAPPA0) -> float:
    """Small-ball level ``(1 - kappa0)^2 / theta0^4`` implied by L4/L2 equivalence."""
    if not 0 < kappa0 < 1:
        raise InputError("kappa0 must lie in (0, 1)")
    if theta0 < 1:
        raise InputError("theta0 is at least 1 by Jensen")
    return (1.0 - kappa0) ** 2 / theta0**4


def compute_B_discrete(design) -> float:
    """Exact ``sup ||f||_inf^2 / ||f||_2^2`` over the span for a finitely supported design.

    With an orthonormal basis ``phi_j`` of the span this is the largest value
    of ``sum_j phi_j(x)^2`` over the atoms, i.e. ``max_k a_k' Sigma^+ a_k``.
    If Sigma is rank deficient the value refers to the effective dimension
    and a warning is emitted.
    """
    if isinstance(design, Partition):
        design = design.as_discrete()
    if not isinstance(design, DiscreteAtoms):
        raise UnsupportedScenarioError("B is only computed for discrete designs")
    A = design.atom_array()[design.prob_array() > 0]
    vals, vecs = linalg.eig_sym(design.gram())
    keep = vals > linalg.RANK_TOL * vals[0]
    if keep.sum() < design.M:
        warnings.warn(f"design Gram has rank {int(keep.sum())} < M={design.M}; "
                      "B is computed on the effective dimension", stacklevel=2)
    phi = (A @ vecs[:, keep]) / np.sqrt(vals[keep])
    return float(np.max((phi * phi).sum(axis=1)))


def effective_dimension(design) -> int:
    vals, _ = linalg.eig_sym(design.gram())
    return int((vals > linalg.RANK_TOL * vals[0]).sum())


def multiplier_sup(sample: Sample, sigma) -> float:
    """``sup_{||t||_L2 = 1} |(1/N) sum_i zeta_i <t, W_i>|`` computed as a whitened norm."""
    sigma = np.asarray(sigma, dtype=float)
    vals, _ = linalg.eig_sym(sigma)
    if vals[-1] <= linalg.RANK_TOL * vals[0]:
        warnings.warn("Sigma is singular; supremum taken over its range", stacklevel=2)
    v = np.asarray(sample.zeta) @ np.asarray(sample.W) / sample.N
    return float(np.linalg.norm(linalg.pinv_sqrt_inv(sigma) @ v))


def isomorphy_check(sample) -> tuple[float, float, bool]:
    """Extreme eigenvalues of the empirical Gram and whether they sit in [1/2, 3/2]."""
    W = np.asarray(sample.W if hasattr(sample, "W") else sample)
    N, M = W.shape
    if N < M:
        raise InputError(f"isomorphy check needs N >= M, got N={N}, M={M}")
    s_min, s_max = linalg.extreme_singular_values(W)
    lower, upper = s_min**2 / N, s_max**2 / N
    return lower, upper, bool(lower >= 0.5 and upper <= 1.5)


def constants_report(
    scenario: Scenario,
    kappa0: float = DEFAULT_KAPPA0,
    n_directions: int = 100,
    n_samples: int = 20_000,
    seed: int = 0,
) -> ConstantsReport:
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sb = estimate_small_ball(scenario, kappa0, n_directions, n_samples, seed)
        theta0 = estimate_theta0(scenario, n_directions, n_samples, seed + 1)
        B = None
        if isinstance(scenario.design, (DiscreteAtoms, Partition)):
            B = compute_B_discrete(scenario.design)
            if B < effective_dimension(scenario.design) - 1e-8:
                notes.append("B below effective dimension")
            else:
                notes.append(f"B >= M holds ({B:.6g} >= {scenario.M})")
    notes.extend(str(w.message) for w in caught)
    pz = paley_zygmund(theta0, kappa0) if math.isfinite(theta0) else 0.0
    return ConstantsReport(sb, theta0, B, pz, seed, n_directions, n_samples, tuple(notes))
