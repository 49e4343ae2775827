"""Surrogate learning curve: held-out MAE of the MAP-fit surrogate
as a function of training-set size."""

import argparse

from hybridopt import runner


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--benchmark", default="mixint_sphere_10d")
    ap.add_argument("--train-sizes", default="10,25,50,100")
    ap.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    ap.add_argument("--test-size", type=int, default=200)
    ap.add_argument("--output", help="optional CSV path for per-cell rows")
    args = ap.parse_args()

    sizes = [int(s) for s in args.train_sizes.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    rows, aggregates = runner.surrogate_mae_experiment(
        args.benchmark, sizes, seeds, test_size=args.test_size)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write("seed,train_size,mae\n")
            for r in rows:
                fh.write(f"{r['seed']},{r['train_size']},{r['mae']!r}\n")
    for size in sizes:
        mean, two_se = aggregates[size]
        print(f"train size {size:4d}: MAE {mean:.4f} +/- {two_se:.4f} (2 SE)")


if __name__ == "__main__":
    main()
