"""Compare the two sufficient conditions for prescribing Ricci curvature on
S^(4n+3) with the outcome of the homotopy solver.

Targets are (T1, T2, T2; 1) on a log grid. Each row records both predicates,
the SU(2) constant c and whether continuation actually found a solution.
Rows where the solver succeeds but the c-condition fails would be evidence
against its necessity.
"""

import argparse

import numpy as np

from hopfricci.errors import HopfRicciError
from hopfricci.geometry import FourParamForm
from hopfricci.prescribed import solvability_predicates, solve_four_param_homotopy
from hopfricci.records import emit_records

FIELDS = ["n", "T1", "T2", "ratio_bound", "c_condition", "c", "solved", "kappa"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--lo", type=float, default=0.005)
    ap.add_argument("--hi", type=float, default=5.0)
    ap.add_argument("--out")
    args = ap.parse_args()

    grid = np.geomspace(args.lo, args.hi, args.count)
    recs = []
    for t1 in grid:
        for t2 in grid:
            T = FourParamForm(args.n, t1, t2, t2, 1.0)
            p = solvability_predicates(T)
            try:
                kappa = solve_four_param_homotopy(T).kappa
            except HopfRicciError:
                kappa = None
            recs.append(dict(n=args.n, T1=t1, T2=t2, ratio_bound=p.ratio_bound, c_condition=p.c_condition,
                             c=p.c_value, solved=kappa is not None, kappa=kappa))
    emit_records(recs, FIELDS, out=args.out)
    extra = sum(r["solved"] and not r["c_condition"] for r in recs)
    print(f"# {sum(r['solved'] for r in recs)}/{len(recs)} solved, {extra} solved outside the c-condition")


if __name__ == "__main__":
    main()
