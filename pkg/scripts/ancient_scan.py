"""Backward Ricci iteration over four-parameter metrics with x2 = x3.

For each (x1, x) with s = 1 the scan records how long positivity survives
and whether x1 <= x <= s holds, to look for survivors outside that region.
"""

import argparse

import numpy as np

from hopfricci.ancient import AncientStatus, ancient_region_scan
from hopfricci.geometry import FourParamMetric
from hopfricci.records import emit_records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--max-steps", type=int, default=100)
    ap.add_argument("--out")
    args = ap.parse_args()

    grid = np.linspace(0.05, 1.5, args.count)
    pts = [FourParamMetric(args.n, a, b, b, 1.0) for a in grid for b in grid]
    rows = ancient_region_scan(pts, args.max_steps)
    recs = [
        dict(x1=r.point.x1, x=r.point.x2, steps_survived=r.steps_survived, status=r.status, hypothesis=r.hypothesis)
        for r in rows
    ]
    emit_records(recs, ["x1", "x", "steps_survived", "status", "hypothesis"], out=args.out)
    alive = [r for r in rows if r.status is not AncientStatus.LOST_POSITIVITY]
    outside = sum(not r.hypothesis for r in alive)
    print(f"# {len(alive)}/{len(rows)} survive {args.max_steps} steps, {outside} of them outside x1 <= x <= s")


if __name__ == "__main__":
    main()
