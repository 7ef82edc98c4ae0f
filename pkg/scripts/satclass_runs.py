"""Build satisfaction classes on random fragments and try to break them.

For each seed: build, verify, flip one class and verify again, then run a
second stage on top of the first and count false verdicts that turned true.
"""

import argparse
import random
import time

from ctminus.generators import extra_comp_over, random_fragment
from ctminus.satclass_builder import (
    build_satisfaction,
    falsity_flips,
    mutation_target,
    next_stage,
    verify_theta_fragment,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    start = time.perf_counter()
    failed = undetected = flips = classes = 0
    for seed in range(args.seed, args.seed + args.runs):
        rng = random.Random(seed)
        gamma = random_fragment(rng, closed_downward=True)
        s = build_satisfaction(gamma)
        classes += len(s)
        failed += not verify_theta_fragment(s, gamma).ok
        undetected += verify_theta_fragment(s.flipped(mutation_target(s, gamma, seed)), gamma).ok
        later = next_stage(gamma, s, extra_comp_over(rng, gamma.comp_instances))
        flips += len(falsity_flips(s, build_satisfaction(later)))
    print(f"runs={args.runs} classes={classes} verify_failures={failed}")
    print(f"undetected_mutations={undetected} falsity_flips={flips}")
    print(f"seconds={time.perf_counter() - start:.1f}")


if __name__ == "__main__":
    main()
