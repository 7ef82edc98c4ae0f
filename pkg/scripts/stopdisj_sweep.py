"""Truth-table sweep of the stopping disjunction and the naive foil.

Prints one row per index bound with the case counts and failures of each
builder, then the first assignment on which the naive foil goes wrong.
"""

import argparse

from ctminus.stopping_disjunction import naive_counterexample, naive_spec_builder, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-c", type=int, default=6)
    args = ap.parse_args()
    print(f"{'c':>3} {'cases':>7} {'selected':>9} {'all_false':>9} {'stop_fail':>9} {'naive_fail':>10}")
    for c in range(args.max_c + 1):
        good, naive = sweep(c), sweep(c, naive_spec_builder)
        print(
            f"{c:>3} {good.assignments:>7} {good.selected:>9} {good.all_false:>9}"
            f" {len(good.failures):>9} {len(naive.failures):>10}"
        )
    c, abits, bbits = naive_counterexample(args.max_c)
    bits = lambda bs: "".join("1" if b else "0" for b in bs)
    print(f"first naive counterexample: c={c} alphas={bits(abits)} betas={bits(bbits)}")


if __name__ == "__main__":
    main()
