"""Least-squares ERM over the span of the dictionary and the risk functionals
used to judge it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InputError, PolicyInapplicableError
from .models import Sample, Scenario, oracle_coeffs


@dataclass(frozen=True)
class MinNorm:
    kind = "min_norm"


@dataclass(frozen=True)
class AdversarialXi:
    """Pick the empirical minimizer that puts ``xi`` on every cell the sample
    never visited. Only meaningful for partition designs, whose unvisited
    cells show up as exactly-zero columns."""

    xi: float
    kind = "adversarial_xi"


TieBreakPolicy = MinNorm | AdversarialXi


def _check_dims(W, y, t=None):
    W = np.asarray(W, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if W.ndim != 2 or W.shape[0] != y.shape[0]:
        raise InputError(f"design {W.shape} and response {y.shape} do not match")
    if t is not None:
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.shape[0] != W.shape[1]:
            raise InputError(f"coefficients have length {t.shape[0]}, design has M={W.shape[1]}")
    return W, y, t


def empirical_risk(W, y, t) -> float:
    W, y, t = _check_dims(W, y, t)
    r = W @ t - y
    return float(r @ r) / W.shape[0]


def unvisited_cells(W) -> np.ndarray:
    """Indices of columns that are identically zero."""
    return np.flatnonzero(~np.any(np.asarray(W) != 0.0, axis=0))


def solve_erm(sample: Sample, policy: TieBreakPolicy = MinNorm()) -> np.ndarray:
    t_hat = linalg.lstsq_min_norm(sample.W, sample.y)
    if isinstance(policy, MinNorm):
        return t_hat
    if isinstance(policy, AdversarialXi):
        free = unvisited_cells(sample.W)
        if free.size == 0:
            raise PolicyInapplicableError(
                "adversarial_xi needs at least one unvisited cell (zero column)"
            )
        t_hat[free] = policy.xi
        return t_hat
    raise InputError(f"unknown tie-break policy {policy!r}")


def excess_risk_exact(t, scenario: Scenario) -> float:
    """``(t - t*)' Sigma (t - t*)``, the exact excess squared risk."""
    t = np.asarray(t, dtype=float).reshape(-1)
    d = t - oracle_coeffs(scenario)
    val = float(d @ scenario.design.gram() @ d)
    return max(val, 0.0)


def empirical_excess_loss(sample: Sample, t, t_star) -> tuple[float, float, float]:
    """Empirical excess loss split into its quadratic and multiplier parts.

    Returns ``(total, quadratic, linear)`` where
    ``quadratic = mean(<W_i, t* - t>**2)`` and
    ``linear = 2 mean((y_i - <W_i, t*>) <W_i, t* - t>)``.
    """
    W, y, t = _check_dims(sample.W, sample.y, t)
    t_star = np.asarray(t_star, dtype=float).reshape(-1)
    if t_star.shape != t.shape:
        raise InputError("t and t_star differ in length")
    gap = W @ (t_star - t)
    resid = y - W @ t_star
    quadratic = float(gap @ gap) / W.shape[0]
    linear = 2.0 * float(resid @ gap) / W.shape[0]
    return quadratic + linear, quadratic, linear
