"""Hypergraph colorings: strong, k-, and (1 - eps)-k-colorings.

The exact engine is a branch and bound over color counts.  Each edge ``e``
carries a requirement ``r_e`` (``|e|`` for strong colorings, ``k`` for
k-colorings); a partial assignment is pruned as soon as some edge can no
longer reach ``r_e`` distinct colors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _kernels
from .codes import all_messages
from .errors import BudgetExceeded, InfiniteChromatic, TooFewVertices
from .gfq import field_new
from .hypergraph import Hypergraph, gqk, gqk_vertices

DEFAULT_NODE_BUDGET = 10**7


def as_fraction(x) -> Fraction:
    """Exact value of ``x``; floats go through their shortest repr (0.4 -> 2/5)."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class Coloring:
    """Color ids ``0..num_colors-1``, each used at least once.

    ``kind`` is ``"strong"``, ``"k_coloring"`` or ``"eps_k"``; validity is
    never assumed, see :func:`validate`.
    """

    assignment: tuple[int, ...]
    num_colors: int
    kind: str = "k_coloring"
    k: int | None = None
    eps: Fraction | None = None
    satisfied_fraction: Fraction | None = None
    flags: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_assignment(cls, assignment, kind="k_coloring", k=None, eps=None, **extra) -> Coloring:
        """Relabel colors by order of first appearance."""
        ids: dict = {}
        out = tuple(ids.setdefault(c, len(ids)) for c in assignment)
        return cls(out, len(ids), kind, k, eps, **extra)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_colors)]
        for v, c in enumerate(self.assignment):
            out[c].append(v)
        return out

    def to_json(self) -> dict:
        kind: dict = {"type": self.kind}
        if self.k is not None:
            kind["k"] = self.k
        if self.eps is not None:
            kind["eps"] = str(self.eps)
        out = {"num_colors": self.num_colors, "assignment": list(self.assignment), "kind": kind}
        if self.satisfied_fraction is not None:
            out["satisfied_fraction"] = str(self.satisfied_fraction)
        if self.flags:
            out["flags"] = dict(self.flags)
        return out

    @classmethod
    def from_json(cls, data: dict) -> Coloring:
        kind = data.get("kind", {"type": "k_coloring"})
        assignment = tuple(int(c) for c in data["assignment"])
        num = int(data.get("num_colors", len(set(assignment))))
        if sorted(set(assignment)) != list(range(num)):
            raise ValueError("coloring ids must be exactly 0..num_colors-1")
        eps = Fraction(kind["eps"]) if "eps" in kind else None
        sat = Fraction(data["satisfied_fraction"]) if "satisfied_fraction" in data else None
        return cls(assignment, num, kind["type"], kind.get("k"), eps, sat, dict(data.get("flags", {})))


@dataclass(frozen=True)
class ColoringCheck:
    valid: bool
    witness: tuple[int, ...] | None
    satisfied: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.satisfied, self.total) if self.total else Fraction(1)

    def to_json(self) -> dict:
        out = {"valid": self.valid, "satisfied": self.satisfied, "total": self.total, "fraction": str(self.fraction)}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


def distinct_colors_per_edge(g: Hypergraph, assignment) -> np.ndarray:
    colors = np.asarray(assignment, dtype=np.int64)
    indptr, indices = g.csr()
    return _kernels.distinct_counts(indptr, indices, colors, int(colors.max()) + 1 if colors.size else 1)


def validate(g: Hypergraph, c: Coloring, kind: str | None = None, k: int | None = None, eps=None) -> ColoringCheck:
    """Check ``c`` against ``g`` under its own kind (or an override)."""
    if len(c.assignment) != g.n:
        raise ValueError(f"coloring covers {len(c.assignment)} vertices, graph has {g.n}")
    kind = kind or c.kind
    k = k if k is not None else c.k
    counts = distinct_colors_per_edge(g, c.assignment)
    if kind == "strong":
        ok = counts == g.edge_sizes
    elif kind in ("k_coloring", "eps_k"):
        if k is None:
            raise ValueError(f"{kind} validation needs k")
        ok = counts >= k
    else:
        raise ValueError(f"unknown coloring kind {kind!r}")
    satisfied, total = int(ok.sum()), g.num_edges
    if kind == "eps_k":
        eps = as_fraction(eps if eps is not None else c.eps)
        valid = Fraction(satisfied) >= (1 - eps) * total
    else:
        valid = satisfied == total
    witness = None
    if satisfied < total:
        witness = g.edge(int(np.argmin(ok)))
    return ColoringCheck(bool(valid), witness, satisfied, total)


# ---------------------------------------------------------------- exact engine


@dataclass(frozen=True)
class ExactColoring:
    chi: int
    coloring: Coloring
    nodes: int
    lower_bound: int


class _Engine:
    def __init__(self, g: Hypergraph, req: list[int], order=None):
        self.n = g.n
        self.edges = [list(e) for e in g.edges]
        self.req = req
        self.inc: list[list[int]] = [[] for _ in range(g.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                self.inc[v].append(i)
        self.deg = [len(x) for x in self.inc]

    def lower_bound(self) -> int:
        if self.n == 0:
            return 0
        lb = max([1] + self.req)
        adj = [set() for _ in range(self.n)]
        for e, r in zip(self.edges, self.req):
            if r == len(e):
                for u, v in combinations(e, 2):
                    adj[u].add(v)
                    adj[v].add(u)
        clique: list[int] = []
        for v in sorted(range(self.n), key=lambda v: (-len(adj[v]), v)):
            if all(v in adj[u] for u in clique):
                clique.append(v)
        return max(lb, len(clique))

    def greedy(self, order=None) -> list[int]:
        order = list(range(self.n)) if order is None else list(order)
        color = [-1] * self.n
        counts = [dict() for _ in self.edges]
        unc = [len(e) for e in self.edges]
        for v in order:
            c = 0
            while True:
                ok = True
                for e in self.inc[v]:
                    distinct = len(counts[e]) + (0 if c in counts[e] else 1)
                    if distinct + unc[e] - 1 < self.req[e]:
                        ok = False
                        break
                if ok:
                    break
                c += 1
            color[v] = c
            for e in self.inc[v]:
                counts[e][c] = counts[e].get(c, 0) + 1
                unc[e] -= 1
        return color

    def search(self, t: int, budget: int, nodes: int) -> tuple[list[int] | None, int]:
        """Is there a coloring with at most ``t`` colors?  DSATUR-style DFS.

        An edge is tight when every uncolored vertex in it must take a new
        color; ``forb[v]`` counts, per color, the tight edges at ``v`` that
        already use it, so forbidden sets are kept up to date incrementally.
        The search runs on an explicit stack (graphs exceed the recursion limit).
        """
        n = self.n
        color = [-1] * n
        counts: list[dict] = [dict() for _ in self.edges]
        unc = [len(e) for e in self.edges]
        forb: list[dict] = [dict() for _ in range(n)]
        req, inc, deg, edges = self.req, self.inc, self.deg, self.edges

        def bump(e, cols, d):
            for u in edges[e]:
                f = forb[u]
                for c in cols:
                    x = f.get(c, 0) + d
                    if x:
                        f[c] = x
                    else:
                        del f[c]

        def assign(v, c) -> bool:
            color[v] = c
            ok = True
            for e in inc[v]:
                cnt = counts[e]
                new = c not in cnt
                before = len(cnt) + unc[e]
                cnt[c] = cnt.get(c, 0) + 1
                unc[e] -= 1
                after = len(cnt) + unc[e]
                if after < req[e]:
                    ok = False
                elif before == req[e] and new:
                    bump(e, (c,), 1)
                elif after == req[e] and before == req[e] + 1:
                    bump(e, list(cnt), 1)
            return ok

        def unassign(v, c):
            color[v] = -1
            for e in inc[v]:
                cnt = counts[e]
                after = len(cnt) + unc[e]
                new = cnt[c] == 1
                if new:
                    del cnt[c]
                else:
                    cnt[c] -= 1
                unc[e] += 1
                before = len(cnt) + unc[e]
                if after < req[e]:
                    continue
                if before == req[e] and new:
                    bump(e, (c,), -1)
                elif after == req[e] and before == req[e] + 1:
                    bump(e, list(cnt), -1)

        def frame(used):
            best, best_key = -1, None
            for v in range(n):
                if color[v] < 0:
                    key = (len(forb[v]), deg[v])
                    if best_key is None or key > best_key:
                        best, best_key = v, key
            f = forb[best]
            return [best, [c for c in range(min(used + 1, t)) if c not in f], 0, used, -1]

        nodes += 1
        if n == 0:
            return [], nodes
        stack = [frame(0)]
        while stack:
            top = stack[-1]
            v, cands, i, used, cur = top
            if cur >= 0:
                unassign(v, cur)
                top[4] = -1
            if i == len(cands):
                stack.pop()
                continue
            c = cands[i]
            top[2] = i + 1
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("coloring node budget exhausted", nodes=nodes)
            top[4] = c
            if not assign(v, c):
                continue
            if len(stack) == n:
                return list(color), nodes
            stack.append(frame(max(used, c + 1)))
        return None, nodes


def _requirements(g: Hypergraph, k: int | None) -> list[int]:
    sizes = [int(s) for s in g.edge_sizes]
    if k is None:
        return sizes
    small = [i for i, s in enumerate(sizes) if s < k]
    if small:
        raise InfiniteChromatic(f"edge {g.edge(small[0])} has fewer than k={k} vertices", witness=g.edge(small[0]))
    return [k] * len(sizes)


def _exact(g: Hypergraph, k: int | None, budget: int | None) -> ExactColoring:
    budget = DEFAULT_NODE_BUDGET if budget is None else int(budget)
    kind = "strong" if k is None else "k_coloring"
    eng = _Engine(g, _requirements(g, k))
    upper = eng.greedy()
    ub = max(upper) + 1 if upper else 0
    lb = eng.lower_bound()
    nodes = 0
    best = upper
    for t in range(lb, ub):
        try:
            found, nodes = eng.search(t, budget, nodes)
        except BudgetExceeded as exc:
            fallback = Coloring.from_assignment(upper, kind, k, flags={"greedy_fallback": True})
            raise BudgetExceeded(
                f"exact coloring exceeded {budget} nodes", nodes=exc.nodes, upper=ub, lower=t, coloring=fallback
            ) from None
        if found is not None:
            best = found
            break
    col = Coloring.from_assignment(best, kind, k)
    return ExactColoring(col.num_colors, col, nodes, lb)


def color_exact_k(g: Hypergraph, k: int, budget: int | None = None) -> ExactColoring:
    """Minimum-color valid k-coloring (``chi_k``).

    Raises :class:`InfiniteChromatic` if an edge has fewer than ``k`` vertices
    and :class:`BudgetExceeded` (with ``upper``/``lower``/``coloring`` in
    ``info``) when the node budget runs out.
    """
    return _exact(g, k, budget)


def color_exact_strong(g: Hypergraph, budget: int | None = None) -> ExactColoring:
    """Minimum-color strong coloring (chromatic number)."""
    return _exact(g, None, budget)


def color_greedy_k(g: Hypergraph, k: int, order=None) -> Coloring:
    eng = _Engine(g, _requirements(g, k))
    return Coloring.from_assignment(eng.greedy(order), "k_coloring", k)


def color_greedy_strong(g: Hypergraph, order=None) -> Coloring:
    eng = _Engine(g, _requirements(g, None))
    return Coloring.from_assignment(eng.greedy(order), "strong")


# ---------------------------------------------------------------- eps colorings


def partition_sizes(n: int, t: int) -> list[int]:
    base, rem = divmod(n, t)
    return [base + (1 if c < rem else 0) for c in range(t)]


def rainbow_fraction(sizes, k: int) -> Fraction:
    """Fraction of k-subsets of ``sum(sizes)`` points meeting k distinct classes."""
    n = sum(sizes)
    e = [1] + [0] * k  # elementary symmetric polynomials of the sizes
    for s in sizes:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * s
    return Fraction(e[k], math.comb(n, k))


def even_partition_fraction(n: int, k: int, t: int) -> Fraction:
    """``C(t, k) * (n/t)**k / C(n, k)``, valid when ``t`` divides ``n``."""
    return Fraction(math.comb(t, k)) * Fraction(n, t) ** k / math.comb(n, k)


def partition_classes(k: int, eps) -> int:
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return math.ceil(Fraction(k * k) / eps)


def color_partition_eps(n: int, k: int, eps) -> Coloring:
    """Split ``0..n-1`` into ``ceil(k^2/eps)`` near-equal contiguous classes."""
    eps = as_fraction(eps)
    t = partition_classes(k, eps)
    if t > n:
        raise TooFewVertices(f"{t} classes need at least {t} vertices, got n={n}")
    sizes = partition_sizes(n, t)
    assignment = [c for c, s in enumerate(sizes) for _ in range(s)]
    return Coloring.from_assignment(
        assignment, "eps_k", k, eps, satisfied_fraction=rainbow_fraction(sizes, k)
    )


# ---------------------------------------------------------------- gqk certificates


def canonical_gqk_tuples(q: int, k: int) -> list[tuple[int, ...]]:
    """Per vertex, the lexicographically first index set of size q^(k-2)+1 inside
    the first q^(k-1)+1 positions on which the vector is constant."""
    verts = gqk_vertices(q, k)
    window, need = q ** (k - 1) + 1, q ** (k - 2) + 1
    out = []
    for u in verts:
        best = None
        for s in range(q):
            pos = np.flatnonzero(u[:window] == s)
            if len(pos) >= need:
                cand = tuple(int(i) for i in pos[:need])
                if best is None or cand < best:
                    best = cand
        out.append(best)
    return out


def color_canonical_gqk(q: int, k: int) -> Coloring:
    tuples = canonical_gqk_tuples(q, k)
    col = Coloring.from_assignment(tuples, "strong")
    return col


def canonical_color_bound(q: int, k: int) -> int:
    return math.comb(q ** (k - 1) + 1, q ** (k - 2) + 1)


def normalized_linear_vectors(q: int, k: int) -> list[np.ndarray]:
    """Evaluation vectors of linear maps F^k -> F whose first nonzero coefficient is 1."""
    f = field_new(q)
    msgs = all_messages(q, k)
    out = []
    for coef in all_messages(q, k):
        nz = np.flatnonzero(coef)
        if nz.size == 0 or coef[nz[0]] != 1:
            continue
        vec = np.zeros(len(msgs), dtype=np.int64)
        for j, a in enumerate(coef):
            if a:
                vec = f.add_table[vec, f.mul_table[a, msgs[:, j]]]
        out.append(vec)
    return out


def clique_normalized_linear(q: int, k: int) -> list[int]:
    """Vertex ids of gqk(q, k) that are normalized linear evaluation vectors."""
    vecs = normalized_linear_vectors(q, k)
    index = {tuple(int(x) for x in u): i for i, u in enumerate(gqk_vertices(q, k))}
    return sorted(index[tuple(int(x) for x in v)] for v in vecs)


def pairs_share_edges(g: Hypergraph, vertices) -> tuple[bool, tuple[int, int] | None]:
    """Whether every pair of ``vertices`` lies together in some edge of ``g``."""
    bits = g.bits
    for u, v in combinations(vertices, 2):
        mu = (bits[:, u >> 6] >> np.uint64(u & 63)) & np.uint64(1)
        mv = (bits[:, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)
        if not (mu & mv).any():
            return False, (u, v)
    return True, None


def gqk_bounds(q: int, k: int) -> dict:
    """Certified bounds on chi_k(gqk(q, k)) from the clique and the canonical coloring."""
    g = gqk(q, k)
    clique = clique_normalized_linear(q, k)
    share, bad_pair = pairs_share_edges(g, clique)
    canon = color_canonical_gqk(q, k)
    check = validate(g, canon, kind="strong")
    return {
        "q": q,
        "k": k,
        "lower": len(clique) if share else None,
        "upper": canon.num_colors if check.valid else None,
        "clique": clique,
        "clique_pairs_share_edges": share,
        "clique_bad_pair": bad_pair,
        "canonical_colors": canon.num_colors,
        "canonical_bound": canonical_color_bound(q, k),
        "canonical_valid": check.valid,
    }
