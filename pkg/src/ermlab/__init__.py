"""Empirical risk minimization over the linear span of a dictionary,
checked numerically against its oracle inequalities and counterexamples."""

__version__ = "0.1.0"

from .errors import ConfigError, InputError, PolicyInapplicableError, UnsupportedScenarioError
from .models import (
    BoundedUniform,
    ConstantOne,
    DiscreteAtoms,
    GaussianCov,
    GaussianIdentity,
    GaussianNoise,
    HeavyTailedIID,
    InSpan,
    Misspecified,
    Partition,
    Prop3Noise,
    Sample,
    Scenario,
    StudentT,
    noise_moments,
    oracle_coeffs,
    population_gram,
    sample,
)
from .erm import AdversarialXi, MinNorm, empirical_excess_loss, empirical_risk, excess_risk_exact, solve_erm
