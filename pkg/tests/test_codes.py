from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_detect_good, naive_erasure_good, naive_error_good
from patterncode.codes import (
    LinearCode,
    TableCode,
    all_messages,
    code_from_json,
    corrupt,
    detect_good,
    detect_good_direct,
    erased_word,
    erasure_good,
    error_good,
    error_good_direct,
    eps_success,
    linear_erasure_good,
    message_index,
    message_tuple,
    verify_witness,
)
from patterncode.constructions import LiftedCode, mds_for, rs_make
from patterncode.errors import BadSymbol, BudgetExceeded
from patterncode.hypergraph import Hypergraph, complete_uniform, cycle, random_hypergraph
from patterncode.rng import make_rng


def table_code(q, k, fn):
    return TableCode(len(fn(*([0] * k))), k, q, [fn(*m) for m in product(range(q), repeat=k)])


REP6 = table_code(2, 2, lambda x, y: (x, y, x, y, x, y))
XY_SUM = table_code(2, 2, lambda x, y: (x, y, x ^ y))


def random_instance(rng, q=2, max_n=6, max_k=2, min_edge=1):
    n = int(rng.integers(2, max_n + 1))
    k = int(rng.integers(1, max_k + 1))
    rows = rng.integers(0, q, size=(q**k, n))
    g = random_hypergraph(n, int(rng.integers(0, 5)), min_edge, int(rng.integers(min_edge, n + 1)), rng)
    return TableCode(n, k, q, rows), g


def as_lists(code, g):
    return code.table.tolist(), [list(e) for e in g.edges]


def test_message_order():
    assert all_messages(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert message_index((1, 0, 2), 3) == 11 and message_tuple(11, 3, 3) == (1, 0, 2)


@given(st.integers(2, 5), st.integers(1, 4), st.data())
def test_message_index_roundtrip(q, k, data):
    m = tuple(data.draw(st.lists(st.integers(0, q - 1), min_size=k, max_size=k)))
    assert message_tuple(message_index(m, q), q, k) == m
    assert tuple(all_messages(q, k)[message_index(m, q)]) == m


def test_encode_examples():
    assert REP6.encode((1, 0)) == (1, 0, 1, 0, 1, 0)
    assert LinearCode([[1, 0, 1], [0, 1, 1]], 2).encode((1, 1)) == (1, 1, 0)
    lifted = LiftedCode(REP6, 2)
    assert lifted.n == 6 + 2 + 2 and lifted.encode((1, 0)) == (1, 0, 1, 0, 1, 0, 1, 0, 0, 0)
    with pytest.raises(BadSymbol):
        REP6.encode((2, 0))
    with pytest.raises(BadSymbol):
        REP6.encode((1,))


def test_code_invariants():
    with pytest.raises(ValueError):
        TableCode(3, 2, 2, [[0, 0, 0]] * 3)
    with pytest.raises(BadSymbol):
        TableCode(1, 1, 2, [[0], [2]])
    with pytest.raises(ValueError):
        LinearCode([[1, 1], [1, 1]], 2)
    with pytest.raises(Exception):
        LinearCode([[1, 0]], 6)


def test_erasure_examples():
    assert erasure_good(REP6, Hypergraph(6, [[2, 5]])).good
    v = erasure_good(REP6, Hypergraph(6, [[0, 2]]))
    assert not v.good
    assert v.witness["m1"] == (0, 0) and v.witness["m2"] == (0, 1) and v.witness["edge"] == (0, 2)
    assert verify_witness(REP6, v)
    for n, k in [(4, 2), (5, 3), (7, 2), (9, 4)]:
        assert erasure_good(mds_for(n, k), complete_uniform(n, k)).good


def test_error_examples():
    for method in ("era", "cover", "auto"):
        assert error_good(REP6, cycle(6), method=method).good
        assert error_good(XY_SUM, Hypergraph(3, [[0]]), method=method).good
        assert error_good(rs_make(6, 2, 5, extended=True), complete_uniform(6, 2), method=method).good
    assert error_good_direct(REP6, cycle(6)).good
    assert error_good_direct(XY_SUM, Hypergraph(3, [[0]])).good


def test_error_direct_witness():
    code = table_code(2, 2, lambda x, y: (x, y, x, y))
    assert error_good_direct(code, Hypergraph(4, [[0, 1]])).good
    v = error_good_direct(code, Hypergraph(4, [[0, 2]]))
    assert not v.good and verify_witness(code, v)
    y = v.witness["y"]
    assert corrupt(code.encode(v.witness["m1"]), v.witness["e1"], [y[i] for i in v.witness["e1"]]) == tuple(y)
    with pytest.raises(BudgetExceeded):
        error_good_direct(REP6, cycle(6), budget=10)


def test_detect_examples():
    assert detect_good(XY_SUM, Hypergraph(3, [[2]])).good
    assert detect_good_direct(XY_SUM, Hypergraph(3, [[2]])).good
    v = detect_good(XY_SUM, Hypergraph(3, [[1, 2]]))
    assert not v.good and v.witness["edge"] == (1, 2) and verify_witness(XY_SUM, v)
    assert not detect_good(XY_SUM, Hypergraph(3, [[1, 2]]), direct=True).good


def test_linear_examples():
    vander = LinearCode([[1, 1, 1], [0, 1, 2]], 3)
    assert linear_erasure_good(vander, complete_uniform(3, 2)).good
    proportional = LinearCode([[1, 2, 0], [0, 0, 1]], 3)
    v = linear_erasure_good(proportional, complete_uniform(3, 2))
    assert not v.good and v.witness["edge"] == (0, 1)


def test_eps_examples():
    code = mds_for(5, 2)
    assert eps_success(code, complete_uniform(5, 2), code.erasure_decode) == 1
    const = TableCode(1, 1, 2, [[0], [1]])
    assert eps_success(const, Hypergraph(1, [[0]]), lambda y: (0,)) == Fraction(1, 2)
    assert erased_word(REP6, (1, 1), [0, 3]) == (1, None, None, 1, None, None)


def test_error_oracle_equivalence():
    # exhaustive k=1, n<=4 over GF(2): every table and every graph on up to three edges
    count = 0
    for n in range(1, 5):
        subsets = [tuple(v for v in range(n) if s >> v & 1) for s in range(1, 1 << n)]
        for rows in product(range(1 << n), repeat=2):
            table = [[r >> i & 1 for i in range(n)] for r in rows]
            code = TableCode(n, 1, 2, table)
            for a in range(len(subsets)):
                for b in range(a, min(len(subsets), a + 3)):
                    g = Hypergraph(n, [subsets[a], subsets[b]])
                    want = naive_error_good(table, g.edges, 2)
                    assert error_good(code, g, method="era").good == want
                    assert error_good(code, g, method="cover").good == want
                    assert error_good_direct(code, g).good == want
                    count += 1
    rng = make_rng(1, 11)
    for _ in range(500):
        code, g = random_instance(rng)
        want = naive_error_good(*as_lists(code, g), 2)
        verdicts = [error_good(code, g, method="era"), error_good(code, g, method="cover"), error_good_direct(code, g)]
        assert [v.good for v in verdicts] == [want] * 3
        for v in verdicts:
            assert verify_witness(code, v)
        count += 1
    assert count >= 500


def test_detect_oracle_equivalence():
    rng = make_rng(2, 11)
    for _ in range(500):
        code, g = random_instance(rng, q=int(rng.integers(2, 4)), max_n=5)
        want = naive_detect_good(*as_lists(code, g), code.q)
        reduced, direct = detect_good(code, g), detect_good_direct(code, g)
        assert reduced.good == direct.good == want
        assert verify_witness(code, reduced) and verify_witness(code, direct)


def test_erasure_oracle_vs_naive():
    rng = make_rng(3, 11)
    for _ in range(500):
        code, g = random_instance(rng, q=int(rng.integers(2, 5)))
        v = erasure_good(code, g)
        assert v.good == naive_erasure_good(*as_lists(code, g))
        assert verify_witness(code, v)


def test_erasure_witness_is_smallest():
    rng = make_rng(4, 11)
    for _ in range(200):
        code, g = random_instance(rng)
        v = erasure_good(code, g)
        if v.good:
            continue
        t = code.table
        first = None
        for ei, e in enumerate(g.edges):
            for a in range(len(t)):
                for b in range(a + 1, len(t)):
                    if (t[a, list(e)] == t[b, list(e)]).all():
                        first = (ei, a, b)
                        break
                if first:
                    break
            if first:
                break
        assert (v.witness["edge_index"], message_index(v.witness["m1"], 2), message_index(v.witness["m2"], 2)) == first


def test_linear_vs_table():
    rng = make_rng(5, 11)
    done = 0
    while done < 200:
        q = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, min(n, 3) + 1))
        gen = rng.integers(0, q, size=(k, n))
        try:
            code = LinearCode(gen, q)
        except ValueError:
            continue
        g = random_hypergraph(n, 4, k, n, rng)
        assert linear_erasure_good(code, g).good == erasure_good(TableCode.from_code(code), g).good
        done += 1


def test_erasure_monotone_under_supersets():
    rng = make_rng(6, 11)
    for _ in range(300):
        code, g = random_instance(rng)
        if not g.num_edges or not erasure_good(code, g).good:
            continue
        e = set(g.edges[int(rng.integers(g.num_edges))])
        e |= {int(v) for v in rng.integers(0, g.n, size=2)}
        assert erasure_good(code, Hypergraph(g.n, list(g.edges) + [sorted(e)])).good


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_error_good_implies_erasure_good_on_era(seed):
    from patterncode.hypergraph import err_to_era

    code, g = random_instance(make_rng(seed, 12))
    v = error_good(code, g)
    assert v.good == erasure_good(code, err_to_era(g, prune=False)).good


def test_json_roundtrip():
    for code in [REP6, LinearCode([[1, 0, 1], [0, 1, 1]], 2), rs_make(6, 2, 5, extended=True), LiftedCode(REP6, 2)]:
        back = code_from_json(code.to_json())
        assert np.array_equal(back.table, code.table)
        assert back.to_json() == code.to_json()
    with pytest.raises(ValueError):
        code_from_json({"n": 3, "k": 1, "q": 2, "body": {"type": "nope"}})
    bad = REP6.to_json()
    bad["n"] = 7
    with pytest.raises(ValueError):
        code_from_json(bad)


def test_mismatched_length():
    with pytest.raises(ValueError):
        erasure_good(REP6, cycle(5))
