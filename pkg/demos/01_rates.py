"""Excess risk of least squares scales like sigma^2 M / N.

Draws Gaussian designs with in-span targets, solves the min-norm ERM in each
trial, and fits log-log slopes of the median excess risk against N and M.
Then compares the observed mean with the exact OLS expectation.
"""

import numpy as np

from ermlab import experiments as ex, models as m


def gauss(M, sigma=1.0):
    return m.Scenario(m.GaussianIdentity(M), m.GaussianNoise(sigma), m.InSpan(np.ones(M)))


if __name__ == "__main__":
    by_N = ex.rate_in_N(gauss(10), [250, 500, 1000, 2000], trials=100, seed=1)
    print(f"slope in N: {by_N.fit.slope:+.3f} (expect -1)")

    by_M = ex.rate_in_M(gauss, [4, 8, 16, 32], 2000, trials=100, seed=2)
    print(f"slope in M: {by_M.fit.slope:+.3f} (expect +1)")

    cell = ex.run_cell(gauss(5), 500, trials=500, seed=3)
    print(f"mean excess at M=5, N=500: {cell.mean():.5f}; "
          f"exact OLS {ex.ols_expected_excess(1.0, 5, 500):.5f}; sigma^2 M/N = {5 / 500:.5f}")
