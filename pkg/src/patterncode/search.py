"""Exhaustive searches for smallest alphabets on tiny instances.

Table-code search works on the quotient by per-coordinate symbol relabeling
and message relabeling.  Every goodness notion depends only on which
coordinates each pair of codewords disagrees on, so any good table can be
relabeled until its first row is all zeros and its rows increase
lexicographically.  The search enumerates exactly those tables, so a
``nonexistent`` verdict covers the whole space.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .codes import TableCode, Code, detect_good, erasure_good, error_good
from .coloring import color_exact_k, color_exact_strong, color_greedy_k, color_greedy_strong
from .errors import BudgetExceeded, Infeasible, InfiniteChromatic
from .gfq import Alphabet
from .hypergraph import Hypergraph, complement_edges, feasibility

SEARCH_WORD_LIMIT = 1 << 13
DEFAULT_BUDGET = 10**7

ORACLES = {"erasure": erasure_good, "error": error_good, "detect": detect_good}


@dataclass
class SearchResult:
    status: str  # witness | nonexistent | budget_exceeded
    q: int
    k: int
    mode: str
    nodes: int
    code: TableCode | None = None
    info: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "witness"

    def to_json(self) -> dict:
        out = {"status": self.status, "q": self.q, "k": self.k, "mode": self.mode, "nodes": self.nodes}
        if self.code is not None:
            out["code"] = self.code.to_json()
        if self.info:
            out["info"] = self.info
        return out


def _edge_masks(g: Hypergraph) -> list[int]:
    return [sum(1 << v for v in e) for e in g.edges]


def bad_mask_table(g: Hypergraph, mode: str) -> np.ndarray:
    """``bad[D]``: a pair of codewords disagreeing exactly on ``D`` breaks goodness."""
    n = g.n
    d = np.arange(1 << n, dtype=np.int64)
    bad = np.zeros(1 << n, dtype=bool)
    masks = _edge_masks(g)
    if mode == "erasure":
        for em in masks:
            bad |= (d & em) == 0
    elif mode == "detect":
        for em in masks:
            bad |= (d & ~em) == 0
    elif mode == "error":
        for a, b in itertools.combinations_with_replacement(masks, 2):
            bad |= (d & ~(a | b)) == 0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return bad


def _words(q: int, n: int) -> np.ndarray:
    idx = np.arange(q**n)
    return np.stack([(idx // q ** (n - 1 - j)) % q for j in range(n)], axis=1) if n else np.zeros((1, 0), int)


def _compat_rows(g: Hypergraph, q: int, mode: str) -> list[int]:
    """Bitset per word ``w``: the words ``w'`` that may share a table with ``w``."""
    n = g.n
    words = _words(q, n)
    bad = bad_mask_table(g, mode)
    weights = 1 << np.arange(n, dtype=np.int64)
    rows = []
    for w in words:
        dmask = (words != w[None, :]) @ weights
        ok = ~bad[dmask]
        rows.append(int.from_bytes(np.packbits(ok, bitorder="little").tobytes(), "little"))
    return rows


def search_table_code(g: Hypergraph, k: int, q: int, mode: str, budget: int | None = None,
                      raise_on_budget: bool = False) -> SearchResult:
    """Depth-first search for a good table code over alphabet ``q``.

    Rows are chosen in increasing word order with row 0 fixed to the zero
    word, so the first witness found is the lexicographically least
    canonical table.  Each node is one tentative row assignment.
    """
    Alphabet(q)
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    n, m = g.n, q**k
    if q**n > SEARCH_WORD_LIMIT:
        raise BudgetExceeded(f"{q}^{n} words exceed the search limit {SEARCH_WORD_LIMIT}")
    oracle = ORACLES[mode]
    if g.num_edges == 0:
        # nothing to protect against: any table, even a constant one, is good
        code = TableCode(n, k, q, np.zeros((m, n), dtype=np.int64))
        return SearchResult("witness", q, k, mode, 0, code, {"verified": bool(oracle(code, g))})
    compat = _compat_rows(g, q, mode)
    nodes = 0
    chosen = [0]

    def rec(cand: int) -> bool:
        nonlocal nodes
        if len(chosen) == m:
            return True
        need = m - len(chosen)
        while cand and cand.bit_count() >= need:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"table search exceeded {budget} nodes", nodes=nodes)
            chosen.append(v)
            if rec(cand & compat[v]):
                return True
            chosen.pop()
        return False

    try:
        found = rec(compat[0] & ~1)
    except BudgetExceeded as exc:
        if raise_on_budget:
            raise
        return SearchResult("budget_exceeded", q, k, mode, exc.nodes)
    if not found:
        return SearchResult("nonexistent", q, k, mode, nodes)
    words = _words(q, n)
    code = TableCode(n, k, q, words[chosen])
    verdict = oracle(code, g)
    if not verdict.good:  # pragma: no cover - would mean the mask table is wrong
        raise AssertionError(f"search witness failed the {mode} oracle: {verdict.witness}")
    return SearchResult("witness", q, k, mode, nodes, code, {"verified": True})


def brute_force_exists(g: Hypergraph, k: int, q: int, mode: str) -> bool:
    """Try every raw table (no symmetry reduction) with the real oracle."""
    oracle = ORACLES[mode]
    words = _words(q, g.n)
    for rows in itertools.product(range(len(words)), repeat=q**k):
        if oracle(TableCode(g.n, k, q, words[list(rows)]), g).good:
            return True
    return False


# ---------------------------------------------------------------- Latin squares


@dataclass(frozen=True)
class LatinSquare:
    order: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        s = self.order
        full = set(range(s))
        if len(self.rows) != s or any(set(r) != full or len(r) != s for r in self.rows):
            raise ValueError("rows must be permutations of 0..s-1")
        if any({r[c] for r in self.rows} != full for c in range(s)):
            raise ValueError("columns must be permutations of 0..s-1")

    @property
    def reduced(self) -> bool:
        return self.rows[0] == tuple(range(self.order))

    def orthogonal(self, other: LatinSquare) -> bool:
        pairs = {(a, b) for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)}
        return len(pairs) == self.order**2


def latin_squares(s: int, budget: int | None = None) -> list[LatinSquare]:
    """All Latin squares of order ``s`` whose first row is ``0..s-1``."""
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    grid = [[-1] * s for _ in range(s)]
    grid[0] = list(range(s))
    col_used = [{c} for c in range(s)]
    out = []
    nodes = 0

    def rec(r, c, row_used):
        nonlocal nodes
        if r == s:
            out.append(LatinSquare(s, tuple(tuple(row) for row in grid)))
            return
        if c == s:
            rec(r + 1, 0, set())
            return
        for x in range(s):
            if x in row_used or x in col_used[c]:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"Latin square enumeration exceeded {budget} nodes", nodes=nodes)
            grid[r][c] = x
            row_used.add(x)
            col_used[c].add(x)
            rec(r, c + 1, row_used)
            row_used.discard(x)
            col_used[c].discard(x)
        grid[r][c] = -1

    if s >= 1:
        rec(1, 0, set())
    return out


@dataclass
class MolsResult:
    exists: bool
    order: int
    count: int
    squares: list[LatinSquare]
    nodes: int

    def to_json(self) -> dict:
        return {
            "exists": self.exists,
            "order": self.order,
            "count": self.count,
            "nodes": self.nodes,
            "squares": [[list(r) for r in sq.rows] for sq in self.squares],
        }


def mols_clique(s: int, r: int, budget: int | None = None) -> MolsResult:
    """Search for ``r`` mutually orthogonal Latin squares of order ``s``.

    Independently permuting the symbols of each square keeps orthogonality,
    so every family can be normalized to first row ``0..s-1``; the search
    looks for an ``r``-clique in the orthogonality graph of those squares.
    """
    if s > 5:
        raise ValueError("mols_clique supports orders up to 5")
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    squares = latin_squares(s, budget)
    if r <= 0:
        return MolsResult(True, s, r, [], 0)
    adj = [0] * len(squares)
    for i, j in itertools.combinations(range(len(squares)), 2):
        if squares[i].orthogonal(squares[j]):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    nodes = 0
    chosen: list[int] = []

    def rec(cand: int) -> bool:
        nonlocal nodes
        if len(chosen) == r:
            return True
        while cand and cand.bit_count() >= r - len(chosen):
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"MOLS clique search exceeded {budget} nodes", nodes=nodes)
            chosen.append(v)
            if rec(cand & adj[v]):
                return True
            chosen.pop()
        return False

    ok = rec((1 << len(squares)) - 1)
    return MolsResult(ok, s, r, [squares[i] for i in chosen] if ok else [], nodes)


def mols_to_code(squares: list[LatinSquare]) -> TableCode:
    """``(x, y) -> (x, y, L_1[x][y], ..., L_r[x][y])``: decodable from any two coordinates."""
    s = squares[0].order if squares else 2
    rows = [[x, y] + [sq.rows[x][y] for sq in squares] for x in range(s) for y in range(s)]
    return TableCode(2 + len(squares), 2, s, rows)


# ---------------------------------------------------------------- reports


@dataclass
class ReportRow:
    quantity: str
    value: object
    source: str
    note: str = ""


@dataclass
class ParamReport:
    graph: str
    n: int
    k: int
    mode: str
    rows: list[ReportRow]
    upper: int | None
    lower: int | None
    exact: int | None
    upper_by: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "upper": self.upper,
            "lower": self.lower,
            "exact": self.exact,
            "upper_by": self.upper_by,
            "rows": [{"quantity": r.quantity, "value": r.value, "source": r.source, "note": r.note} for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "source", "note"])
        for r in self.rows:
            w.writerow([r.quantity, json.dumps(r.value) if isinstance(r.value, (list, dict)) else r.value, r.source, r.note])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [
            f"## {self.mode} alphabet bounds for {self.graph} (n={self.n}, k={self.k})",
            "",
            "| quantity | value | source | note |",
            "|---|---|---|---|",
        ]
        for r in self.rows:
            lines.append(f"| {r.quantity} | {r.value} | {r.source} | {r.note} |")
        lines.append("")
        lines.append(f"upper = {self.upper}, lower = {self.lower}, exact = {self.exact}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        if fmt == "csv":
            return self.to_csv()
        if fmt == "markdown":
            return self.to_markdown()
        raise ValueError(f"unknown report format {fmt!r}")


def _coloring_stat(rows, g: Hypergraph, k: int | None, what: str, budget: int):
    try:
        res = color_exact_k(g, k, budget=budget) if k is not None else color_exact_strong(g, budget=budget)
        rows.append(ReportRow(what, res.chi, "exact branch and bound", f"clique lower bound {res.lower_bound}"))
        return res.chi
    except InfiniteChromatic as exc:
        rows.append(ReportRow(what, "inf", "edge smaller than k", str(list(exc.witness))))
    except BudgetExceeded as exc:
        up = (color_greedy_k(g, k) if k is not None else color_greedy_strong(g)).num_colors
        rows.append(ReportRow(what, f"<= {up}", "greedy coloring", f">= {exc.info.get('lower')} (budget hit)"))
    return None


def _construction_bounds(g: Hypergraph, k: int, mode: str, budget: int, extra: list[tuple[str, Code]]):
    from . import constructions as cons

    found: list[tuple[str, Code]] = []
    if mode == "erasure":
        tries = [("coloring erasure code", lambda: cons.build_erasure_code(g, k, budget=budget))]
    elif mode == "error":
        tries = [
            ("complement-coloring error code", lambda: cons.build_error_code(g, k, budget=budget)[0]),
            ("erasure code on the error-to-erasure graph", lambda: cons.build_error_code_via_era(g, k, budget=budget)[0]),
        ]
    else:
        tries = [("erasure code on the complement graph", lambda: cons.build_detection_code(g, k, budget=budget)[0])]
    for name, make in tries:
        try:
            found.append((name, make()))
        except (Infeasible, ValueError) as exc:
            found.append((name, exc))
    found.extend(extra)
    return found


def param_report(g: Hypergraph, k: int, mode: str, budget: int | None = None, q_max: int = 4,
                 extra_codes: list[tuple[str, Code]] | None = None) -> ParamReport:
    """Bounds on the smallest alphabet for ``mode`` codes on ``g``.

    Upper bounds come from constructions (each re-checked by the oracle);
    search over ``q = 2..min(upper, q_max)`` supplies lower bounds and,
    when it reaches a witness or closes the gap, the exact value.
    """
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    rows: list[ReportRow] = []
    label = g.label or f"graph(n={g.n}, |E|={g.num_edges})"
    feas = feasibility(g, k, mode)
    rows.append(ReportRow("feasible", feas.feasible, "edge-size / pair-union condition", feas.note or ""))
    if mode == "error" and not feas.size_cutoff_ok:
        rows.append(ReportRow("edge-size cutoff", False, "every edge <= floor((n-k)/2)", ""))
    if not feas.feasible:
        return ParamReport(label, g.n, k, mode, rows, None, None, None)

    if mode == "erasure":
        _coloring_stat(rows, g, k, "chi_k(G)", budget)
    elif mode == "error":
        _coloring_stat(rows, complement_edges(g), None, "chi(complement)", budget)
    else:
        _coloring_stat(rows, complement_edges(g), k, "chi_k(complement)", budget)

    extra = list(extra_codes or [])
    gq = re.fullmatch(r"gqk\((\d+),(\d+)\)", g.label or "")
    if mode == "erasure" and gq and int(gq.group(2)) == k:
        from .constructions import EvalCode

        extra.append(("balanced-vector evaluation code", EvalCode(int(gq.group(1)), k)))
    oracle = ORACLES[mode]
    upper = None
    upper_by: dict = {}
    for name, code in _construction_bounds(g, k, mode, budget, extra):
        if isinstance(code, Exception):
            rows.append(ReportRow("upper bound", "n/a", name, str(code)))
            continue
        ok = oracle(code, g).good
        rows.append(ReportRow("upper bound", code.q, name, "oracle verified" if ok else "ORACLE REJECTED"))
        if ok:
            upper_by[name] = code.q
            if upper is None or code.q < upper:
                upper = code.q

    lower, exact = 2, None
    top = min(q_max, upper if upper is not None else q_max)
    for q in range(2, top + 1):
        if q**g.n > SEARCH_WORD_LIMIT:
            rows.append(ReportRow(f"search q={q}", "skipped", "table search", f"{q}^{g.n} words"))
            break
        res = search_table_code(g, k, q, mode, budget=budget)
        rows.append(ReportRow(f"search q={q}", res.status, "table search", f"{res.nodes} nodes"))
        if res.status == "witness":
            exact = q
            break
        if res.status == "nonexistent":
            lower = q + 1
        else:
            break
    if exact is None and upper is not None and lower >= upper:
        exact = upper
    if exact is not None:
        lower = exact
    rows.append(ReportRow("lower bound", lower, "table search", ""))
    rows.append(ReportRow("exact", exact if exact is not None else "unknown", "search and constructions", ""))
    return ParamReport(label, g.n, k, mode, rows, upper, lower, exact, upper_by)
