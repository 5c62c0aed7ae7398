"""Two ways the excess risk can be large with nonvanishing probability.

First, heavy single-spike noise makes P(excess > c x M / N) decay only like
1/x. Second, a partition design leaves cells unvisited with probability eta,
and an ERM that puts an arbitrary value on an unvisited cell has unbounded
excess risk while the min-norm solution stays bounded.
"""

from ermlab import bounds, experiments as ex


if __name__ == "__main__":
    tail = ex.tail_probability(200, 5, [2, 4, 8, 16], trials=1000, seed=11)
    for x, f, r in zip(tail.x_grid, tail.frequency, tail.ratio):
        print(f"x={x:4g}  P(excess > c x M/N) = {f:.4f}   x * P = {r:.3f}")
    print(f"exact noise tail at x=4, N=200: {bounds.lemma41_tail(4, 200):.4f}")

    M, N, eta = 10, 50, 0.9
    k = bounds.invert_coupon_k(M, N, eta)
    rep = ex.prop4_campaign(M, N, eta, [1, 11, 101, 1001], trials=300, seed=12)
    print(f"partition M={M}, N={N}: k={k} cells leave one unvisited w.p. >= {eta}; "
          f"observed {rep.unvisited_frequency:.3f}")
    for xi, v in zip(rep.xi_grid, rep.min_adversarial_excess()):
        print(f"  adversarial xi={xi:6g}: smallest excess over trials {v:.3g}")
