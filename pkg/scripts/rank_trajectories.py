"""Rank trajectories of the gamma sequences.

The type rank uses the formulas ``x >= i`` over a finite domain.  The
extension rank uses a table in which ``eta_{a_k}`` holds only at ``b_k``
with ``b`` strictly decreasing.
"""

import argparse

from ctminus.evaluation import DomainOracle
from ctminus.rank_lab import (
    check_rank_trajectory,
    ext_oracle,
    ext_rank,
    gamma_sequence_ext,
    gamma_sequence_p,
    ge_type,
    p_rank,
)


def show(label, ranks):
    print(f"{label:<6} {' '.join(str(r) for r in ranks):<40} {check_rank_trajectory(ranks)}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=8, help="last gamma index")
    ap.add_argument("--domain-bound", type=int, default=256)
    ap.add_argument("--table-size", type=int, default=15, help="entries of the eta table")
    args = ap.parse_args()

    p = ge_type(32)
    o = DomainOracle(args.domain_bound)
    show("p", [p_rank(g, p, o, args.domain_bound) for g in gamma_sequence_p(p, args.d)])

    a = list(range(1, args.table_size + 1))
    top = 2 * args.table_size - 2
    b = [top - k for k in a]
    eo = ext_oracle(a, b, top)
    gammas = gamma_sequence_ext(a, args.table_size - 2, min(args.d, 7))
    show("ext", [ext_rank(g, a, eo, top) for g in gammas])


if __name__ == "__main__":
    main()
