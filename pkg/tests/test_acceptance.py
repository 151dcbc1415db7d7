"""Acceptance criteria, one test each, with their wall-clock limits.

Each test prints a ``PASS``/``FAIL`` line; under pytest the lines are also
collected into a summary section.  Run this file directly to get just the
lines: ``python tests/test_acceptance.py``.
"""

import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from patterncode.codes import (
    TableCode,
    all_messages,
    corrupt,
    detect_good,
    detect_good_direct,
    erasure_good,
    error_good,
    error_good_direct,
    eps_success,
    verify_witness,
)
from patterncode.coloring import (
    clique_normalized_linear,
    color_canonical_gqk,
    color_exact_k,
    color_partition_eps,
    even_partition_fraction,
    pairs_share_edges,
    partition_sizes,
    rainbow_fraction,
    validate,
)
from patterncode.constructions import (
    LiftedCode,
    build_erasure_code,
    build_error_code,
    build_eps_code,
    build_eval_code_gqk,
    lift_code,
    rs_make,
)
from patterncode.gfq import pp_ceil
from patterncode.hypergraph import (
    complete_uniform,
    cycle,
    err_to_era,
    gqk,
    lift_era_to_err,
    lifted_era_sources,
    random_hypergraph,
)
from patterncode.rng import make_rng
from patterncode.search import mols_clique, param_report, search_table_code

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


@contextmanager
def criterion(number, title, limit):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over the {limit:g}s limit)"
        line = f"[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s / {limit:g}s){note}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    assert within, line


def table_code(q, k, fn):
    rows = [fn(*m) for m in product(range(q), repeat=k)]
    return TableCode(len(rows[0]), k, q, rows)


def msgs(q, k):
    return [tuple(int(x) for x in m) for m in all_messages(q, k)]


def test_criterion_01_six_cycle():
    with criterion(1, "repetition code on the 6-cycle, alphabet 2 is optimal", 1):
        rep = table_code(2, 2, lambda x, y: (x, y, x, y, x, y))
        assert error_good(rep, cycle(6)).good
        # a one-symbol alphabet cannot even distinguish two messages
        with pytest.raises(ValueError):
            search_table_code(cycle(6), 2, 1, "error")
        res = search_table_code(cycle(6), 2, 2, "error")
        assert res.status == "witness" and error_good(res.code, cycle(6)).good


def test_criterion_02_error_oracle_equivalence():
    with criterion(2, "error_good (era route) equals the direct oracle", 120):
        rng = make_rng(0, 1002)
        # five seeded error graphs for each length n = 1..4
        graphs = [random_hypergraph(n, int(rng.integers(1, 4)), 1, n, rng) for n in range(1, 5) for _ in range(5)]
        disagree = checked = 0
        for g in graphs:
            n = g.n
            for rows in product(range(1 << n), repeat=2):
                code = TableCode(n, 1, 2, [[r >> i & 1 for i in range(n)] for r in rows])
                a = error_good(code, g, method="era")
                b = error_good_direct(code, g)
                disagree += a.good != b.good
                checked += 1
        for _ in range(500):
            n = int(rng.integers(2, 7))
            code = TableCode(n, 2, 2, rng.integers(0, 2, size=(4, n)))
            g = random_hypergraph(n, int(rng.integers(1, 5)), 1, int(rng.integers(1, n + 1)), rng)
            a = error_good(code, g, method="era")
            b = error_good_direct(code, g)
            disagree += a.good != b.good
            assert verify_witness(code, a) and verify_witness(code, b)
            checked += 1
        assert checked >= 500 and disagree == 0


def test_criterion_03_detect_oracle_equivalence():
    with criterion(3, "reduced detect_good equals the direct oracle", 60):
        rng = make_rng(0, 1003)
        disagree = 0
        for _ in range(500):
            q = int(rng.integers(2, 4))
            k = int(rng.integers(1, 3))
            n = int(rng.integers(2, 6))
            code = TableCode(n, k, q, rng.integers(0, q, size=(q**k, n)))
            g = random_hypergraph(n, int(rng.integers(1, 4)), 1, int(rng.integers(1, n + 1)), rng)
            disagree += detect_good(code, g).good != detect_good_direct(code, g).good
        assert disagree == 0


def test_criterion_04_coloring_erasure_codes():
    with criterion(4, "colored RS erasure codes on 100 random hypergraphs", 120):
        rng = make_rng(0, 1004)
        for i in range(100):
            k = 2 + i % 2
            n = int(rng.integers(k + 1, 11))
            g = random_hypergraph(n, int(rng.integers(1, 25)), k, min(n, k + 1), rng)
            code = build_erasure_code(g, k)
            t = max(code.coloring.num_colors, k)
            assert validate(g, code.coloring, k=k).valid
            assert code.q == pp_ceil(t - 1)
            assert erasure_good(code, g).good


def test_criterion_05_complement_coloring_error_code():
    with criterion(5, "complement-coloring error code on the 6-cycle", 60):
        g = cycle(6)
        code, dec = build_error_code(g, 2)
        assert code.q == 5 and code.base.extended and code.base.n == 6
        assert error_good(code, g).good
        count = 0
        for m in msgs(5, 2):
            w = code.encode(m)
            for e in g.edges:
                for v in product(range(5), repeat=2):
                    assert dec(corrupt(w, e, v)) == m
                    count += 1
        assert count == 25 * 6 * 25
        rep = param_report(g, 2, "error")
        assert rep.upper_by["complement-coloring error code"] == 5
        assert rep.exact == 2


def test_criterion_06_balanced_vector_codes():
    with criterion(6, "evaluation codes are erasure-good on gqk(2,2), gqk(2,3), gqk(3,2)", 300):
        for q, k in [(2, 2), (2, 3), (3, 2)]:
            g = gqk(q, k)
            if (q, k) == (3, 2):
                assert g.n == 1680 and g.num_edges == 181440
            code, _ = build_eval_code_gqk(q, k)
            assert erasure_good(code, g).good


def test_criterion_07_chromatic_bounds():
    with criterion(7, "chi_2(gqk(2,2)) = 3 and 4 <= chi_2(gqk(3,2)) <= 6", 300):
        g22 = gqk(2, 2)
        clique = clique_normalized_linear(2, 2)
        assert len(clique) == (2**2 - 1) // (2 - 1) == 3
        assert pairs_share_edges(g22, clique)[0]
        canon = color_canonical_gqk(2, 2)
        assert canon.num_colors == 3 and validate(g22, canon, kind="k_coloring", k=2).valid
        assert color_exact_k(g22, 2).chi == 3
        g32 = gqk(3, 2)
        canon = color_canonical_gqk(3, 2)
        assert canon.num_colors <= 6 and validate(g32, canon, kind="k_coloring", k=2).valid
        clique = clique_normalized_linear(3, 2)
        assert len(clique) == 4 and pairs_share_edges(g32, clique)[0]


def _lift_trials(count, rng):
    trials = []
    while len(trials) < count:
        q = 2 + len(trials) % 2
        n = int(rng.integers(4, 7))
        g0 = random_hypergraph(n, int(rng.integers(1, 5)), 2, n, rng)
        res = search_table_code(g0, 2, q, "erasure")
        if not res.found:
            continue
        rows = np.array(res.code.table)
        if len(trials) % 4 >= 2:  # mutate: make two messages agree on some edge
            a, b = (int(x) for x in rng.choice(len(rows), size=2, replace=False))
            e = list(g0.edges[int(rng.integers(g0.num_edges))])
            rows[b, e] = rows[a, e]
        trials.append((g0, TableCode(n, 2, q, rows)))
    return trials


def test_criterion_08_lifting_iff():
    with criterion(8, "lifting: base erasure-good iff lifted error-good", 120):
        base, _ = build_eval_code_gqk(2, 2)
        code, g_lift, info, _ = lift_code(base, 2, gqk(2, 2))
        assert code.n == 10 and code.q == 2 and g_lift.n == 10
        assert error_good(code, g_lift).good
        kinds = {True: 0, False: 0}
        for g0, tc in _lift_trials(100, make_rng(0, 1008)):
            want = erasure_good(tc, g0).good
            g, _ = lift_era_to_err(g0, 2)
            assert error_good(LiftedCode(tc, 2), g).good == want
            kinds[want] += 1
        assert kinds[True] >= 25 and kinds[False] >= 25


def test_criterion_09_complete_pairs_need_five():
    with criterion(9, "p_2 of the complete 2-uniform graph on 6 vertices is 5", 600):
        g = complete_uniform(6, 2)
        assert err_to_era(g, prune=True).edges == g.edges
        assert error_good(rs_make(6, 2, 5, extended=True), g).good
        assert not mols_clique(4, 4).exists
        r3 = mols_clique(4, 3)
        assert r3.exists and len(r3.squares) == 3
        assert not mols_clique(3, 4).exists
        assert not mols_clique(2, 4).exists


def test_criterion_10_eps_code():
    with criterion(10, "eps-code on the complete 2-uniform graph on 16 vertices", 60):
        code, dec = build_eps_code(16, 2, Fraction(1, 2))
        assert code.base.n == 8 and code.q == 7 == pp_ceil(8 - 1)
        got = eps_success(code, complete_uniform(16, 2), dec)
        assert got == Fraction(112, 120) and got >= Fraction(1, 2)
        for n, k, eps in [(16, 2, Fraction(1, 2)), (20, 2, Fraction(1, 4)), (27, 3, Fraction(9, 10))]:
            c = color_partition_eps(n, k, eps)
            g = complete_uniform(n, k)
            exact = sum(len({c.assignment[v] for v in e}) == k for e in g.edges)
            formula = rainbow_fraction(partition_sizes(n, c.num_colors), k)
            assert formula == Fraction(exact, g.num_edges)
            if n % c.num_colors == 0:
                assert even_partition_fraction(n, k, c.num_colors) == formula
            assert formula >= 1 - eps


def test_criterion_11_exact_small_values():
    with criterion(11, "q_2 of complete 2-uniform graphs on 3 and 4 vertices", 60):
        r = search_table_code(complete_uniform(3, 2), 2, 2, "erasure")
        assert r.status == "witness"
        assert search_table_code(complete_uniform(4, 2), 2, 2, "erasure").status == "nonexistent"
        r3 = search_table_code(complete_uniform(4, 2), 2, 3, "erasure")
        assert r3.status == "witness" and erasure_good(r3.code, complete_uniform(4, 2)).good


def test_criterion_12_nonlinear_lift():
    with criterion(12, "lifted gqk(3,2) evaluation code is error-good over alphabet 3", 1800):
        g0 = gqk(3, 2)
        base, _ = build_eval_code_gqk(3, 2)
        code = LiftedCode(base, 2)
        g_lift, info = lift_era_to_err(g0, 2)
        assert code.q == 3 and code.n == g_lift.n == 2 * 1680 - 2
        # early-exit pair cover test against the error edges
        assert error_good(code, g_lift, method="cover").good
        # pruned era edges, built structurally from the base graph
        era = lifted_era_sources(g0, 2)
        assert era[0].num_edges == g0.num_edges + 1
        assert error_good(code, g_lift, era=era).good


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
