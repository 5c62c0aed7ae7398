"""The random-matrix ingredients behind the upper bound.

Checks that empirical small-ball fractions stay above beta0/2, that the
noise-design multiplier rarely exceeds its deviation level, and how often the
empirical Gram matrix has its spectrum inside [1/2, 3/2].
"""

import numpy as np

from ermlab import constants as c, experiments as ex, models as m


if __name__ == "__main__":
    scn = m.Scenario(m.GaussianIdentity(5), m.GaussianNoise(1.0), m.InSpan(np.ones(5)))
    beta0 = c.gaussian_small_ball(0.5)
    sb = ex.small_ball_campaign(scn, 400, 0.5, n_directions=100, seeds=30, seed=21, beta0=beta0)
    print(f"small-ball fraction >= beta0/2 in {sb.pass_rate:.0%} of seeds")

    scn10 = m.Scenario(m.GaussianIdentity(10), m.GaussianNoise(1.0), m.InSpan(np.ones(10)))
    mult = ex.multiplier_campaign(scn10, 400, 10.0, seeds=200, seed=22)
    print(f"multiplier exceeds {mult.threshold:.3f} in {mult.exceed_frequency:.1%} of seeds")

    for ratio in (20, 40):
        rates = [ex.isomorphy_rate(M, ratio * M, seeds=100, seed=23) for M in (5, 25)]
        print(f"N={ratio}M: isomorphy rate M=5 {rates[0]:.2f}, M=25 {rates[1]:.2f}")
