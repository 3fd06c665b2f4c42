#!/usr/bin/env python3
"""Compare abstract-domain configurations on random relu networks.

For each seeded network the four forward/backward domain combinations are
evaluated on the same region and reported relative to the all-zonotope bound.
Deeper networks show the interval baseline drifting orders of magnitude
looser.

Usage:
    python scripts/domain_ablation.py --instances 30 --depth 4 --radius 0.1
"""

import argparse

import numpy as np

import zonolip as zl

CONFIGS = ("ZZ", "HH", "HZ", "ZH")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=30)
    ap.add_argument("--depth", type=int, default=4, help="number of hidden layers")
    ap.add_argument("--width", type=int, default=20)
    ap.add_argument("--in-dim", type=int, default=6)
    ap.add_argument("--out-dim", type=int, default=4)
    ap.add_argument("--radius", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ratios = {lab: [] for lab in CONFIGS}
    for i in range(args.instances):
        gen = np.random.Generator(np.random.PCG64(args.seed + i))
        widths = [args.in_dim] + [args.width] * args.depth + [args.out_dim]
        net = zl.gen_random_net(widths, "relu", seed=args.seed + 10_000 + i)
        region = zl.Hyperbox(gen.uniform(-0.5, 0.5, args.in_dim),
                             np.full(args.in_dim, args.radius))
        bounds = {lab: zl.zlip(net, region, zl.DomainChoice.from_label(lab)).bound
                  for lab in CONFIGS}
        for lab in CONFIGS:
            ratios[lab].append(bounds[lab] / bounds["ZZ"])

    print(f"{'config':>8} {'geomean ratio':>14} {'median':>10} {'max':>12}")
    for lab in CONFIGS:
        arr = np.array(ratios[lab])
        print(f"{lab:>8} {np.exp(np.log(arr).mean()):14.3f} "
              f"{np.median(arr):10.3f} {arr.max():12.3f}")


if __name__ == "__main__":
    main()
