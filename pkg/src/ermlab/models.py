"""Scenarios: the joint law of (W, Y) written in coefficient space.

A dictionary ``f_1..f_M`` evaluated at the random point ``X`` gives the design
vector ``W = (f_1(X), ..., f_M(X))``. Every theorem we check only depends on
the law of ``W`` and of the response, so designs are specified directly as
laws on R^M. Each design knows its exact second-moment matrix, which is what
makes exact excess risks available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import linalg
from .errors import InputError, UnsupportedScenarioError

# ---------------------------------------------------------------------------
# designs


@dataclass(frozen=True)
class GaussianIdentity:
    M: int
    kind = "gaussian_identity"
    sign_symmetric = True

    def __post_init__(self):
        if self.M < 1:
            raise InputError("M must be >= 1")

    def draw(self, rng, N):
        return rng.standard_normal((N, self.M))

    def gram(self):
        return np.eye(self.M)

    def mean(self):
        return np.zeros(self.M)


@dataclass(frozen=True)
class GaussianCov:
    cov: tuple  # nested tuples so the dataclass stays hashable and immutable
    kind = "gaussian_cov"
    sign_symmetric = True

    def __post_init__(self):
        S = np.asarray(self.cov, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise InputError("gaussian_cov needs a square covariance")
        vals, _ = linalg.eig_sym(S)
        if vals[-1] < -1e-10 * max(vals[0], 1.0):
            raise InputError("covariance is not positive semidefinite")
        object.__setattr__(self, "cov", tuple(map(tuple, S.tolist())))

    @property
    def M(self):
        return len(self.cov)

    def draw(self, rng, N):
        root = linalg.sqrt_psd(self.gram())
        return rng.standard_normal((N, self.M)) @ root

    def gram(self):
        return np.array(self.cov, dtype=float)

    def mean(self):
        return np.zeros(self.M)


@dataclass(frozen=True)
class Partition:
    """Indicators of M cells of mass 1/k each; the rest of the mass (1 - M/k)
    sits on a cell X0 seen by no dictionary element, i.e. the zero vector."""

    M: int
    k: float
    kind = "partition"
    sign_symmetric = False

    def __post_init__(self):
        if self.M < 1:
            raise InputError("M must be >= 1")
        if self.k < self.M:
            raise InputError(f"partition needs k >= M, got k={self.k}, M={self.M}")

    def cell_probs(self):
        p = np.full(self.M + 1, 1.0 / self.k)
        p[0] = 1.0 - self.M / self.k
        return p

    def draw_cells(self, rng, N):
        """Cell index per row, 0 meaning X0."""
        p = self.cell_probs()
        edges = np.cumsum(p)[:-1]
        return np.searchsorted(edges, rng.random(N), side="right")

    def draw(self, rng, N):
        cells = self.draw_cells(rng, N)
        W = np.zeros((N, self.M))
        hit = cells > 0
        W[np.flatnonzero(hit), cells[hit] - 1] = 1.0
        return W

    def gram(self):
        return np.eye(self.M) / self.k

    def mean(self):
        return np.full(self.M, 1.0 / self.k)

    def as_discrete(self) -> "DiscreteAtoms":
        atoms = np.vstack([np.zeros(self.M), np.eye(self.M)])
        probs = self.cell_probs()
        keep = probs > 0
        return DiscreteAtoms(atoms=atoms[keep], probs=probs[keep])


@dataclass(frozen=True)
class DiscreteAtoms:
    atoms: tuple
    probs: tuple
    kind = "discrete_atoms"
    sign_symmetric = False

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if A.shape[0] != p.shape[0]:
            raise InputError("one probability per atom is required")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise InputError("atom probabilities must lie on the simplex")
        object.__setattr__(self, "atoms", tuple(map(tuple, A.tolist())))
        object.__setattr__(self, "probs", tuple(p.tolist()))

    @property
    def M(self):
        return len(self.atoms[0])

    def atom_array(self):
        return np.array(self.atoms, dtype=float)

    def prob_array(self):
        return np.array(self.probs, dtype=float)

    def draw(self, rng, N):
        p = self.prob_array()
        edges = np.cumsum(p)[:-1]
        idx = np.searchsorted(edges, rng.random(N), side="right")
        return self.atom_array()[idx]

    def gram(self):
        A = self.atom_array()
        return (A.T * self.prob_array()) @ A

    def mean(self):
        return self.prob_array() @ self.atom_array()


@dataclass(frozen=True)
class HeavyTailedIID:
    """Independent Student-t coordinates with ``dof`` degrees of freedom."""

    M: int
    dof: float
    kind = "heavy_tailed_iid"
    sign_symmetric = True

    def __post_init__(self):
        if self.dof <= 2:
            raise InputError("heavy_tailed_iid needs dof > 2 for a finite Gram matrix")

    def draw(self, rng, N):
        return rng.standard_t(self.dof, size=(N, self.M))

    def gram(self):
        return np.eye(self.M) * self.dof / (self.dof - 2.0)

    def mean(self):
        return np.zeros(self.M)


Design = Union[GaussianIdentity, GaussianCov, Partition, DiscreteAtoms, HeavyTailedIID]

# ---------------------------------------------------------------------------
# noise (always drawn independently of the design)


@dataclass(frozen=True)
class GaussianNoise:
    sigma: float
    kind = "gaussian"

    def draw(self, rng, N):
        return self.sigma * rng.standard_normal(N)

    def moments(self):
        s2 = self.sigma**2
        return s2, 3.0 * s2**2


@dataclass(frozen=True)
class BoundedUniform:
    """Uniform on [-sigma, sigma]."""

    sigma: float
    kind = "bounded_uniform"

    def draw(self, rng, N):
        return rng.uniform(-self.sigma, self.sigma, size=N)

    def moments(self):
        return self.sigma**2 / 3.0, self.sigma**4 / 5.0


@dataclass(frozen=True)
class StudentT:
    dof: float
    scale: float = 1.0
    kind = "student_t"

    def draw(self, rng, N):
        return self.scale * rng.standard_t(self.dof, size=N)

    def moments(self):
        nu = self.dof
        m2 = self.scale**2 * nu / (nu - 2.0) if nu > 2 else math.inf
        if nu > 4:
            m4 = self.scale**4 * 3.0 * nu**2 / ((nu - 2.0) * (nu - 4.0))
        else:
            m4 = math.inf
        return m2, m4


@dataclass(frozen=True)
class Prop3Noise:
    """Sparse spike noise ``R * eps * eta``.

    ``eps`` is a random sign and ``eta`` a Bernoulli(delta) switch with
    ``delta = 1/(x N)`` and ``R = delta**-0.5``, so the noise has mean zero,
    variance one and ``P(mean of squares >= x) = 1 - (1 - delta)**N``. The
    law depends on the sample size it is meant for.
    """

    x: float
    N: int
    kind = "prop3"

    def __post_init__(self):
        if self.x < 1:
            raise InputError("prop3 noise needs x >= 1")
        if self.N < 1:
            raise InputError("prop3 noise needs N >= 1")

    @property
    def delta(self):
        return 1.0 / (self.x * self.N)

    @property
    def R(self):
        return math.sqrt(self.x * self.N)

    def draw(self, rng, N):
        eta = rng.random(N) < self.delta
        eps = np.where(rng.random(N) < 0.5, -1.0, 1.0)
        return self.R * eps * eta

    def moments(self):
        return 1.0, self.x * self.N


Noise = Union[GaussianNoise, BoundedUniform, StudentT, Prop3Noise]


def noise_moments(noise) -> tuple[float, float]:
    """Exact ``(E z^2, E z^4)``; the fourth moment may be ``inf``."""
    return noise.moments()


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class InSpan:
    t_star: tuple
    kind = "in_span"

    def __post_init__(self):
        object.__setattr__(self, "t_star", tuple(float(v) for v in np.ravel(self.t_star)))

    def mean_response(self, W):
        return W @ np.array(self.t_star)


@dataclass(frozen=True)
class ConstantOne:
    kind = "constant_one"

    def mean_response(self, W):
        return np.ones(W.shape[0])


@dataclass(frozen=True)
class Misspecified:
    """``Y = <t, W> + g(W) + noise`` with ``g(W) = clip(W_1 W_2, -bound, bound)``.

    The perturbation is even in W, so on sign-symmetric designs it is
    uncorrelated with every coordinate and the best linear fit is ``t``.
    """

    t_star: tuple
    bound: float = 10.0
    kind = "misspecified"

    def __post_init__(self):
        object.__setattr__(self, "t_star", tuple(float(v) for v in np.ravel(self.t_star)))
        if len(self.t_star) < 2:
            raise InputError("misspecified target needs M >= 2")

    def perturbation(self, W):
        return np.clip(W[:, 0] * W[:, 1], -self.bound, self.bound)

    def mean_response(self, W):
        return W @ np.array(self.t_star) + self.perturbation(W)


Target = Union[InSpan, ConstantOne, Misspecified]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    design: Design
    noise: Noise
    target: Target
    sigma_eff: float | None = None

    def __post_init__(self):
        M = self.design.M
        if isinstance(self.target, (InSpan, Misspecified)) and len(self.target.t_star) != M:
            raise InputError(
                f"t_star has {len(self.target.t_star)} entries but the design has M={M}"
            )
        if self.sigma_eff is None:
            object.__setattr__(self, "sigma_eff", math.sqrt(self.noise.moments()[0]))

    @property
    def M(self):
        return self.design.M

    @property
    def sigma4(self):
        """``(E z^4)**0.25`` of the additive noise."""
        return self.noise.moments()[1] ** 0.25


@dataclass(frozen=True, eq=False)
class Sample:
    W: np.ndarray
    y: np.ndarray
    seed: int
    zeta: np.ndarray = field(repr=False)

    @property
    def N(self):
        return self.W.shape[0]

    @property
    def M(self):
        return self.W.shape[1]


def sample(scenario: Scenario, N: int, seed: int) -> Sample:
    """Draw ``N`` i.i.d. rows.

    ``zeta`` holds the residuals ``y - <t*, W>`` against the oracle, which is
    the additive noise for in-span targets.
    """
    if N < 1:
        raise InputError("N must be >= 1")
    rng = np.random.default_rng(seed)
    W = scenario.design.draw(rng, N)
    noise = scenario.noise.draw(rng, N)
    y = scenario.target.mean_response(W) + noise
    if isinstance(scenario.target, InSpan):
        zeta = noise
    else:
        zeta = y - W @ oracle_coeffs(scenario)
    W.setflags(write=False)
    y.setflags(write=False)
    zeta.setflags(write=False)
    return Sample(W=W, y=y, seed=int(seed), zeta=zeta)


def population_gram(scenario: Scenario) -> np.ndarray:
    design = scenario.design
    if not hasattr(design, "gram"):
        raise UnsupportedScenarioError(f"no analytic Gram matrix for {design!r}")
    return design.gram()


def _perturbation_cross_moment(design, target: Misspecified) -> np.ndarray:
    """``E[g(W) W]`` for the clipped-product perturbation."""
    if design.sign_symmetric:
        return np.zeros(design.M)
    if isinstance(design, Partition):
        # indicator rows have at most one nonzero entry, so W_1 W_2 = 0
        return np.zeros(design.M)
    if isinstance(design, DiscreteAtoms):
        A = design.atom_array()
        g = target.perturbation(A)
        return (design.prob_array() * g) @ A
    raise UnsupportedScenarioError(f"no analytic cross moment for {design!r}")


def oracle_coeffs(scenario: Scenario) -> np.ndarray:
    """Population least-squares coefficients ``Sigma^+ E[Y W]``."""
    target = scenario.target
    design = scenario.design
    if isinstance(target, InSpan):
        return np.array(target.t_star)
    pinv = linalg.pinv_psd(design.gram())
    if isinstance(target, ConstantOne):
        return pinv @ design.mean()
    if isinstance(target, Misspecified):
        t = np.array(target.t_star)
        # E[<t,W> W] = Sigma t; pinv(Sigma) Sigma t = t on range(Sigma)
        return pinv @ (design.gram() @ t) + pinv @ _perturbation_cross_moment(design, target)
    raise UnsupportedScenarioError(f"unknown target {target!r}")


# ---------------------------------------------------------------------------
# (de)serialization for config files

_DESIGNS = {
    "gaussian_identity": lambda d: GaussianIdentity(M=int(d["M"])),
    "gaussian_cov": lambda d: GaussianCov(cov=d["cov"]),
    "partition": lambda d: Partition(M=int(d["M"]), k=float(d["k"])),
    "discrete_atoms": lambda d: DiscreteAtoms(atoms=d["atoms"], probs=d["probs"]),
    "heavy_tailed_iid": lambda d: HeavyTailedIID(M=int(d["M"]), dof=float(d["dof"])),
}

_NOISES = {
    "gaussian": lambda d: GaussianNoise(sigma=float(d.get("sigma", 1.0))),
    "bounded_uniform": lambda d: BoundedUniform(sigma=float(d.get("sigma", 1.0))),
    "student_t": lambda d: StudentT(dof=float(d["noise_dof"]), scale=float(d.get("scale", 1.0))),
    "prop3": lambda d: Prop3Noise(x=float(d["x"]), N=int(d["N"])),
}


def scenario_from_dict(d: dict) -> Scenario:
    """Build a scenario from a flat mapping such as a config section.

    Keys: ``design`` (+ ``M``, ``k``, ``cov``, ``atoms``, ``probs``, ``dof``),
    ``noise`` (+ ``sigma``, ``noise_dof``, ``scale``, ``x``, ``N``),
    ``target`` (+ ``t_star``, ``bound``) and optional ``sigma_eff``.
    """
    try:
        design = _DESIGNS[d["design"]](d)
    except KeyError as exc:
        raise InputError(f"scenario: missing or unknown key {exc}") from None
    try:
        noise = _NOISES[d.get("noise", "gaussian")](d)
    except KeyError as exc:
        raise InputError(f"scenario: missing or unknown key {exc}") from None
    kind = d.get("target", "in_span")
    M = design.M
    t_star = d.get("t_star", "ones")
    if isinstance(t_star, str):
        if t_star == "ones":
            t_star = np.ones(M)
        elif t_star == "zeros":
            t_star = np.zeros(M)
        else:
            raise InputError(f"scenario: t_star must be a list, 'ones' or 'zeros', got {t_star!r}")
    if kind == "in_span":
        target = InSpan(t_star=t_star)
    elif kind == "constant_one":
        target = ConstantOne()
    elif kind == "misspecified":
        target = Misspecified(t_star=t_star, bound=float(d.get("bound", 10.0)))
    else:
        raise InputError(f"scenario: unknown target {kind!r}")
    sigma_eff = d.get("sigma_eff")
    return Scenario(design, noise, target, None if sigma_eff is None else float(sigma_eff))


def scenario_to_dict(s: Scenario) -> dict:
    out: dict = {"design": s.design.kind}
    dz = s.design
    if isinstance(dz, (GaussianIdentity, HeavyTailedIID, Partition)):
        out["M"] = dz.M
    if isinstance(dz, Partition):
        out["k"] = dz.k
    if isinstance(dz, HeavyTailedIID):
        out["dof"] = dz.dof
    if isinstance(dz, GaussianCov):
        out["cov"] = [list(r) for r in dz.cov]
    if isinstance(dz, DiscreteAtoms):
        out["atoms"] = [list(r) for r in dz.atoms]
        out["probs"] = list(dz.probs)
    nz = s.noise
    out["noise"] = nz.kind
    if isinstance(nz, (GaussianNoise, BoundedUniform)):
        out["sigma"] = nz.sigma
    elif isinstance(nz, StudentT):
        out["noise_dof"] = nz.dof
        out["scale"] = nz.scale
    elif isinstance(nz, Prop3Noise):
        out["x"] = nz.x
        out["N"] = nz.N
    out["target"] = s.target.kind
    if isinstance(s.target, (InSpan, Misspecified)):
        out["t_star"] = list(s.target.t_star)
    if isinstance(s.target, Misspecified):
        out["bound"] = s.target.bound
    out["sigma_eff"] = s.sigma_eff
    return out
