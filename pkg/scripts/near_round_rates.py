"""Per-step contraction of the four-parameter iteration near the round
metric, against (2n+1)/(4n+3)."""

import argparse

import numpy as np

from hopfricci.geometry import FourParamMetric
from hopfricci.iteration import asymptotic_rate, iterate_four_param_near_round


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--starts", type=int, default=50)
    ap.add_argument("--radius", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    print("n,predicted,median_rate,max_abs_error")
    for n in range(1, args.max_n + 1):
        rates = []
        for _ in range(args.starts):
            x = 1.0 + rng.uniform(-args.radius, args.radius, 3)
            rates.append(asymptotic_rate(iterate_four_param_near_round(FourParamMetric(n, *x, 1.0))))
        want = (2 * n + 1) / (4 * n + 3)
        print(f"{n},{want:.6f},{np.median(rates):.6f},{np.max(np.abs(np.array(rates) - want)):.2e}")


if __name__ == "__main__":
    main()
