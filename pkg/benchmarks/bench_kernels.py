"""Time the numba and numpy kernel backends on the gqk(3,2) workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

Both backends must return identical results; the script checks that before
printing timings.
"""

import argparse
import time

import numpy as np

from patterncode import _kernels
from patterncode.codes import disagreement_masks
from patterncode.constructions import EvalCode, LiftedCode
from patterncode.hypergraph import gqk, gqk_vertices, lift_era_to_err


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = gqk(3, 2)
    code = EvalCode(3, 2)
    _, _, masks = disagreement_masks(code.table)
    lifted, _ = lift_era_to_err(g, 2)
    verts = gqk_vertices(3, 2)
    indptr, indices = g.csr()
    colors = np.arange(g.n) % 6

    small = lifted.bits[:2000]
    lcode = LiftedCode(code, 2)
    _, _, lmasks = disagreement_masks(lcode.table)

    cases = {
        "first_disjoint (181440 edges x 36 pairs)": ("first_disjoint", (g.bits, masks)),
        "first_cover (lifted, 2000 edges x 36 pairs)": (
            "first_cover",
            (small, lmasks, lifted.degrees, lifted.n),
        ),
        "distinct_counts (181440 edges)": ("distinct_counts", (indptr, indices, colors, 6)),
        "extend_balanced (1680 vectors)": ("extend_balanced", (verts[0], verts, 1, 3, 1)),
        "minimal_rows (2000 rows)": ("minimal_rows", (small,)),
    }
    print(f"{'kernel':48s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, (kname, kargs) in cases.items():
        kargs = tuple(np.asarray(a, dtype=np.int64) if isinstance(a, np.ndarray) and a.dtype.kind == "i" else a for a in kargs)
        fast = _kernels.get_kernel(kname, "numba")
        fast(*kargs)  # compile
        r1, t1 = best_of(lambda: fast(*kargs), args.repeat)
        r2, t2 = best_of(lambda: _kernels.get_kernel(kname, "numpy")(*kargs), args.repeat)
        same = np.array_equal(np.asarray(r1), np.asarray(r2))
        if not same:
            raise SystemExit(f"{name}: backends disagree: {r1} vs {r2}")
        print(f"{name:48s} {t1:10.4f} {t2:10.4f} {t2 / max(t1, 1e-9):8.1f}x")


if __name__ == "__main__":
    main()
