"""Kernel-evaluation cost as a function of the maximum interaction order.

Times the pairwise kernel matrix on the 20-d benchmark space at several
order truncations; the per-pair cost should grow with the order.
"""

import argparse
import time

import numpy as np

from hybridopt import bench, kernel, space


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--benchmark", default="mixint_sphere_20d")
    ap.add_argument("--orders", default="2,5,10,full")
    ap.add_argument("--points", type=int, default=120)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    spec = bench.lookup(args.benchmark).spec
    rng = np.random.default_rng(0)
    pts = [space.sample_uniform(spec, rng) for _ in range(args.points)]
    xd, xc = kernel.encode_points(pts, spec)

    for token in args.orders.split(","):
        order = spec.dim if token == "full" else int(token)
        h = kernel.KernelHypers(beta=(0.5,) * spec.m, sigma=(0.5,) * spec.n,
                                theta=(1.0,) * order, noise_var=0.0)
        kernel.cross_kernel(xd, xc, xd, xc, h, spec)  # warm-up
        best = min(
            (lambda t0: (kernel.cross_kernel(xd, xc, xd, xc, h, spec),
                         time.perf_counter() - t0)[1])(time.perf_counter())
            for _ in range(args.repeats))
        print(f"max_order {token:>4}: {best / args.points ** 2 * 1e9:8.1f} "
              f"ns per pair ({best * 1e3:.2f} ms total)")


if __name__ == "__main__":
    main()
