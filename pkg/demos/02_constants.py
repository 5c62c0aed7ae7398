"""Distribution constants that drive the upper bounds.

Estimates the small-ball pair (kappa0, beta0) and the moment ratio theta0 for
a few designs, checks them against the Paley-Zygmund relation, and computes
the exact B constant of discrete designs.
"""

import numpy as np

from ermlab import constants as c, models as m


if __name__ == "__main__":
    zero = m.InSpan(np.zeros(4))
    designs = {
        "gaussian": m.GaussianIdentity(4),
        "student t, 6 dof": m.HeavyTailedIID(4, 6.0),
        "partition k=4": m.Partition(4, 4),
    }
    for name, d in designs.items():
        scn = m.Scenario(d, m.GaussianNoise(1.0), zero)
        sb = c.estimate_small_ball(scn, 0.5, n_directions=50, n_samples=20_000, seed=7)
        th = c.estimate_theta0(scn, n_directions=50, n_samples=20_000, seed=8)
        print(f"{name:18s} beta0={sb.beta0_hat:.3f}  theta0={th:.3f}  "
              f"PZ lower bound={c.paley_zygmund(th, 0.5):.3f}")
    print(f"gaussian closed form beta0(1/2) = {c.gaussian_small_ball(0.5):.4f}")

    rng = np.random.default_rng(0)
    atoms = rng.standard_normal((8, 4))
    d = m.DiscreteAtoms(atoms, rng.dirichlet(np.ones(8)))
    print(f"B of a random 8-atom design in M=4: {c.compute_B_discrete(d):.3f} (always >= M)")
    print(f"B of uniform indicators in M=4: {c.compute_B_discrete(m.DiscreteAtoms(np.eye(4), np.full(4, 0.25))):.3f}")
