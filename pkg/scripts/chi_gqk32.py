"""Optional long-running job: exact chi_2 of gqk(3,2).

    python scripts/chi_gqk32.py [--budget 1e9]

The lower bound 4 (normalized linear clique) and upper bound 6 (canonical
coloring) are certified quickly; this job tries to close the gap by
exhaustive search.  It is not part of the test suite.  A budget exhaustion
prints the bounds reached so far and exits with status 3.
"""

import argparse
import sys
import time

from patterncode.coloring import color_exact_k, gqk_bounds
from patterncode.errors import BudgetExceeded
from patterncode.hypergraph import gqk


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=lambda s: int(float(s)), default=10**9)
    args = ap.parse_args()
    print("bounds:", gqk_bounds(3, 2))
    t = time.perf_counter()
    try:
        res = color_exact_k(gqk(3, 2), 2, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"budget exhausted after {exc.nodes} nodes: {exc.info['lower']} <= chi <= {exc.info['upper']}")
        return 3
    print(f"chi_2(gqk(3,2)) = {res.chi} ({res.nodes} nodes, {time.perf_counter() - t:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
