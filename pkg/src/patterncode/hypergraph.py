"""Hypergraphs of corruption patterns, their generators and transforms.

Edges are kept as rows of a packed ``uint64`` bitset matrix (see
:mod:`patterncode._kernels`), deduplicated and sorted in lexicographic order
of their sorted vertex tuples.  Python tuples are materialized lazily, so
graphs with very large edges (e.g. lifted error graphs) stay compact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, InfeasibleK

GQK_VERTEX_BUDGET = 10**5
PAIR_BUDGET = 5 * 10**6


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def full_mask(n: int) -> np.ndarray:
    row = np.zeros(n_words(n), dtype=np.uint64)
    full, rem = divmod(n, 64)
    row[:full] = np.uint64(0xFFFFFFFFFFFFFFFF)
    if rem:
        row[full] = np.uint64((1 << rem) - 1)
    return row


def pack_rows(n: int, rows: Iterable[Iterable[int]]) -> np.ndarray:
    """Pack vertex collections into a bitset matrix, validating vertex ranges."""
    rows = [list(r) for r in rows]
    bits = np.zeros((len(rows), n_words(n)), dtype=np.uint64)
    for i, r in enumerate(rows):
        for v in r:
            v = int(v)
            if not 0 <= v < n:
                raise ValueError(f"edge {sorted(r)} has vertex {v} outside 0..{n - 1}")
            bits[i, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    return bits


def unpack_rows(bits: np.ndarray, n: int) -> np.ndarray:
    """Boolean incidence matrix (rows x n) of a bitset matrix."""
    b = np.ascontiguousarray(bits)
    return np.unpackbits(b.view(np.uint8), axis=1, bitorder="little")[:, :n].astype(bool)


def popcount(bits: np.ndarray) -> np.ndarray:
    return np.bitwise_count(bits).sum(axis=-1).astype(np.int64)


def _order_keys(bits: np.ndarray, n: int, chunk: int = 8192) -> np.ndarray:
    # Per vertex a 2-bit code: 01 = member, 10 = non-member below the row's
    # largest member, 00 = beyond it.  Big-endian packing makes memcmp order
    # equal to lexicographic order of the sorted tuples (prefixes first).
    width = (n + 3) // 4
    keys = np.zeros((bits.shape[0], max(width, 1)), dtype=np.uint8)
    if n == 0:
        return keys
    idx = np.arange(n)
    for s in range(0, bits.shape[0], chunk):
        inc = unpack_rows(bits[s : s + chunk], n)
        last = np.where(inc.any(axis=1), n - 1 - np.argmax(inc[:, ::-1], axis=1), -1)
        code = np.where(inc, 1, np.where(idx[None, :] < last[:, None], 2, 0)).astype(np.uint8)
        pad = (-n) % 4
        if pad:
            code = np.concatenate([code, np.zeros((code.shape[0], pad), dtype=np.uint8)], axis=1)
        code = code.reshape(code.shape[0], -1, 4)
        keys[s : s + chunk, : code.shape[1]] = (code[:, :, 0] << 6) | (code[:, :, 1] << 4) | (code[:, :, 2] << 2) | code[:, :, 3]
    return keys


def canonical_order(bits: np.ndarray, n: int) -> np.ndarray:
    """Indices selecting the first occurrence of each distinct row, in canonical order."""
    if bits.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    keys = np.ascontiguousarray(_order_keys(bits, n))
    void = keys.view(np.dtype((np.void, keys.shape[1]))).ravel()
    order = np.argsort(void, kind="stable")
    sk = keys[order]
    fresh = np.ones(len(order), dtype=bool)
    fresh[1:] = (sk[1:] != sk[:-1]).any(axis=1)
    return order[fresh]


@dataclass(frozen=True)
class LiftedGraphInfo:
    """Layout of an error graph built from an erasure graph on ``base_n`` vertices."""

    base_n: int
    k: int
    special_edge: tuple[int, ...]
    N: int

    def to_json(self) -> dict:
        return {"base_n": self.base_n, "k": self.k, "N": self.N}


class Hypergraph:
    """Immutable hypergraph on vertices ``0..n-1``.

    >>> Hypergraph(3, [[1, 0], [2], [0, 1]]).edges
    ((0, 1), (2,))
    """

    def __init__(self, n: int, edges: Iterable[Iterable[int]] = (), label: str | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self._init(int(n), pack_rows(int(n), edges), label, canonical=False)

    def _init(self, n, bits, label, canonical):
        bits = np.ascontiguousarray(bits, dtype=np.uint64).reshape(-1, n_words(n))
        if not canonical:
            bits = bits[canonical_order(bits, n)]
            bits = np.ascontiguousarray(bits)
        bits.setflags(write=False)
        self._n = n
        self._bits = bits
        self.label = label

    @classmethod
    def from_bits(cls, n: int, bits: np.ndarray, label: str | None = None, canonical: bool = False) -> Hypergraph:
        """Wrap a bitset matrix.  Pass ``canonical=True`` only for rows already sorted and unique."""
        g = cls.__new__(cls)
        bits = np.asarray(bits, dtype=np.uint64)
        if bits.size and (bits & ~full_mask(n)).any():
            raise ValueError("bitset rows have bits beyond vertex n-1")
        g._init(int(n), bits, label, canonical)
        return g

    @property
    def n(self) -> int:
        return self._n

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def num_edges(self) -> int:
        return self._bits.shape[0]

    def __len__(self) -> int:
        return self.num_edges

    @cached_property
    def edge_sizes(self) -> np.ndarray:
        return popcount(self._bits)

    @cached_property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for s in range(0, self.num_edges, 8192):
            inc = unpack_rows(self._bits[s : s + 8192], self._n)
            out.extend(tuple(int(v) for v in np.flatnonzero(r)) for r in inc)
        return tuple(out)

    def edge(self, i: int) -> tuple[int, ...]:
        if "edges" in self.__dict__:
            return self.edges[i]
        return tuple(int(v) for v in np.flatnonzero(unpack_rows(self._bits[i : i + 1], self._n)[0]))

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self._n, dtype=np.int64)
        for s in range(0, self.num_edges, 8192):
            deg += unpack_rows(self._bits[s : s + 8192], self._n).sum(axis=0)
        return deg

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` listing each edge's vertices."""
        sizes = self.edge_sizes
        indptr = np.zeros(self.num_edges + 1, dtype=np.int64)
        np.cumsum(sizes, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        for s in range(0, self.num_edges, 8192):
            inc = unpack_rows(self._bits[s : s + 8192], self._n)
            _, cols = np.nonzero(inc)
            indices[indptr[s] : indptr[min(s + 8192, self.num_edges)]] = cols
        return indptr, indices

    def uniform_size(self) -> int | None:
        sizes = self.edge_sizes
        if sizes.size and (sizes == sizes[0]).all():
            return int(sizes[0])
        return None

    def edge_array(self) -> np.ndarray:
        """Edges of a uniform graph as an ``(E, s)`` integer array."""
        s = self.uniform_size()
        if s is None:
            raise ValueError("graph is not uniform")
        return self.csr()[1].reshape(self.num_edges, s)

    def with_label(self, label: str | None) -> Hypergraph:
        return Hypergraph.from_bits(self._n, self._bits, label, canonical=True)

    def __eq__(self, other):
        return isinstance(other, Hypergraph) and other._n == self._n and np.array_equal(other._bits, self._bits)

    def __hash__(self):
        return hash((self._n, self._bits.tobytes()))

    def __repr__(self):
        tag = f", label={self.label!r}" if self.label else ""
        return f"Hypergraph(n={self._n}, edges={self.num_edges}{tag})"

    def to_json(self) -> dict:
        out = {"n": self._n, "edges": [list(e) for e in self.edges]}
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: dict) -> Hypergraph:
        if "n" not in data or "edges" not in data:
            raise ValueError("hypergraph JSON needs 'n' and 'edges'")
        return cls(int(data["n"]), data["edges"], data.get("label"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def load_graph(path) -> Hypergraph:
    with open(path) as fh:
        return Hypergraph.from_json(json.load(fh))


def save_graph(g: Hypergraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(g.dumps())
        fh.write("\n")


# ---------------------------------------------------------------- generators


def complete_uniform(n: int, k: int) -> Hypergraph:
    if not 1 <= k <= n:
        raise ValueError(f"complete_uniform needs 1 <= k <= n, got n={n}, k={k}")
    return Hypergraph(n, combinations(range(n), k), label=f"complete_uniform({n},{k})")


def cycle(n: int) -> Hypergraph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Hypergraph(n, [(i, (i + 1) % n) for i in range(n)], label=f"cycle({n})")


def gqk_vertex_count(q: int, k: int) -> int:
    length, per = q**k, q ** (k - 1)
    return math.factorial(length) // math.factorial(per) ** q


@lru_cache(maxsize=8)
def gqk_vertices(q: int, k: int) -> np.ndarray:
    """All balanced vectors of length ``q**k`` over ``0..q-1`` in lexicographic order."""
    if q < 2 or k < 2:
        raise ValueError("gqk needs q >= 2 and k >= 2")
    count = gqk_vertex_count(q, k)
    if count > GQK_VERTEX_BUDGET:
        raise BudgetExceeded(f"gqk({q},{k}) has {count} vertices (budget {GQK_VERTEX_BUDGET})", vertices=count)
    length = q**k
    out = np.zeros((count, length), dtype=np.int64)
    left = [q ** (k - 1)] * q
    cur = [0] * length
    row = 0

    def rec(pos):
        nonlocal row
        if pos == length:
            out[row] = cur
            row += 1
            return
        for s in range(q):
            if left[s]:
                left[s] -= 1
                cur[pos] = s
                rec(pos + 1)
                left[s] += 1

    rec(0)
    out.setflags(write=False)
    return out


def gqk(q: int, k: int) -> Hypergraph:
    """The k-uniform graph on balanced vectors whose edges jointly realize every k-tuple."""
    verts = gqk_vertices(q, k)
    nv = verts.shape[0]
    edges: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def rec(codes, level, last):
        # ``level`` vertices chosen; each level-tuple appears q**(k-level) times
        target = q ** (k - level - 1)
        ok = _kernels.extend_balanced(codes, verts, last + 1, q, target)
        for v in np.flatnonzero(ok):
            v = int(v)
            chosen.append(v)
            if level + 1 == k:
                edges.append(tuple(chosen))
            else:
                rec(codes * q + verts[v], level + 1, v)
            chosen.pop()

    for v0 in range(nv):
        chosen.append(v0)
        rec(verts[v0].copy(), 1, v0)
        chosen.pop()
    return Hypergraph(nv, edges, label=f"gqk({q},{k})")


def random_hypergraph(n: int, m: int, min_size: int, max_size: int, rng) -> Hypergraph:
    """``m`` edges (before dedup) with sizes uniform in ``[min_size, max_size]``."""
    if not 0 <= min_size <= max_size <= n:
        raise ValueError(f"need 0 <= min_size <= max_size <= n, got {min_size}, {max_size}, {n}")
    edges = []
    for _ in range(m):
        size = int(rng.integers(min_size, max_size + 1))
        edges.append(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
    return Hypergraph(n, edges)


def generate(family: str, **params) -> Hypergraph:
    """Build a named family: ``complete_uniform(n, k)``, ``cycle(n)``, ``gqk(q, k)``
    or ``random(n, m, min_size, max_size, rng)``."""
    if family == "complete_uniform":
        return complete_uniform(params["n"], params["k"])
    if family == "cycle":
        return cycle(params["n"])
    if family == "gqk":
        return gqk(params["q"], params["k"])
    if family == "random":
        return random_hypergraph(params["n"], params["m"], params["min_size"], params["max_size"], params["rng"])
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------- transforms


def complement_edges(g: Hypergraph) -> Hypergraph:
    """Replace every edge ``e`` by ``[n] \\ e``."""
    bits = g.bits ^ full_mask(g.n)[None, :]
    return Hypergraph.from_bits(g.n, bits, label=f"complement({g.label})" if g.label else None)


def _pair_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(m)
    return i.astype(np.int64), j.astype(np.int64)


def err_to_era_sources(g_err: Hypergraph, prune: bool = False, budget: int = PAIR_BUDGET):
    """Erasure graph of an error graph plus, per era edge, the err edge pair producing it first.

    Era edges are ``[n] \\ (e1 | e2)`` over unordered pairs ``e1 <= e2``
    (``e1 == e2`` included).  With ``prune`` only inclusion-minimal era edges
    are kept: injectivity on a set implies injectivity on its supersets.
    """
    m = g_err.num_edges
    pairs = m * (m + 1) // 2
    if pairs > budget:
        raise BudgetExceeded(f"{pairs} edge pairs exceed budget {budget}", nodes=pairs)
    ii, jj = _pair_indices(m)
    union = g_err.bits[ii] | g_err.bits[jj]
    era = union ^ full_mask(g_err.n)[None, :]
    keep = canonical_order(era, g_err.n)
    era = era[keep]
    src = np.stack([ii[keep], jj[keep]], axis=1)
    if prune and len(era):
        minimal = _kernels.minimal_rows(np.ascontiguousarray(era))
        era, src = era[minimal], src[minimal]
    label = f"era({g_err.label})" if g_err.label else None
    return Hypergraph.from_bits(g_err.n, era, label=label, canonical=True), [tuple(map(int, s)) for s in src]


def err_to_era(g_err: Hypergraph, prune: bool = False, budget: int = PAIR_BUDGET) -> Hypergraph:
    return err_to_era_sources(g_err, prune=prune, budget=budget)[0]


def _lift_bits(g0: Hypergraph, k: int):
    n = g0.n
    if n - k < k:
        raise InfeasibleK(f"lifting needs n - k >= k (n={n}, k={k})")
    small = np.flatnonzero(g0.edge_sizes < k)
    if small.size:
        raise InfeasibleK(f"erasure edge smaller than k={k}", witness=g0.edge(int(small[0])))
    N = 2 * n - k
    w = n_words(N)
    bits = np.zeros((g0.num_edges + 1, w), dtype=np.uint64)
    base_w = n_words(n)
    bits[:-1, :base_w] = g0.bits ^ full_mask(n)[None, :]
    U = tuple(range(n, N))
    bits[-1] = pack_rows(N, [U])[0]
    return bits, LiftedGraphInfo(base_n=n, k=k, special_edge=U, N=N)


def lift_era_to_err(g0: Hypergraph, k: int) -> tuple[Hypergraph, LiftedGraphInfo]:
    """Error graph on ``N = 2n - k`` vertices: ordinary edges ``[n] \\ e`` plus the special edge ``U``."""
    bits, info = _lift_bits(g0, k)
    label = f"lift({g0.label},{k})" if g0.label else None
    return Hypergraph.from_bits(info.N, bits, label=label), info


def lifted_era_sources(g0: Hypergraph, k: int):
    """Pruned erasure graph of ``lift_era_to_err(g0, k)`` without the pairwise scan.

    With ordinary edges ``o_e = [n] \\ e`` the era edges are
    ``[N] - (o_e | U) = e``, ``[N] - (o_a | o_b) = (a & b) | U`` and
    ``[N] - U = [n]``.  When two base edges are disjoint, ``U`` itself occurs
    and every other set of the second kind contains it, so the minimal era
    edges are the minimal base edges plus ``U``.  Other graphs go through
    :func:`err_to_era_sources`.  Sources index edges of the lifted graph.
    """
    bits, info = _lift_bits(g0, k)
    m = g0.num_edges
    a, b = _kernels.first_disjoint(g0.bits, g0.bits) if m else (-1, -1)
    if a < 0:
        g_lift = Hypergraph.from_bits(info.N, bits)
        return err_to_era_sources(g_lift, prune=True)
    order = canonical_order(bits, info.N)
    pos = np.empty(len(bits), dtype=np.int64)
    pos[order] = np.arange(len(order))
    u_idx = int(pos[m])
    base_rows = np.arange(m)
    if g0.uniform_size() is None:
        base_rows = base_rows[_kernels.minimal_rows(g0.bits)]
    era = np.zeros((len(base_rows) + 1, n_words(info.N)), dtype=np.uint64)
    era[:-1, : g0.bits.shape[1]] = g0.bits[base_rows]
    era[-1] = bits[m]
    src = [tuple(sorted((int(pos[r]), u_idx))) for r in base_rows]
    src.append(tuple(sorted((int(pos[a]), int(pos[b])))))
    keep = canonical_order(era, info.N)
    label = f"era(lift({g0.label},{k}))" if g0.label else None
    return Hypergraph.from_bits(info.N, era[keep], label=label, canonical=True), [src[i] for i in keep]


# ---------------------------------------------------------------- feasibility


@dataclass(frozen=True)
class Feasibility:
    """Whether a code of length ``n`` and dimension ``k`` can exist for ``mode``.

    ``size_cutoff_ok`` (error mode only) records whether every edge has at
    most ``(n - k) // 2`` vertices; the pairwise condition used for
    ``feasible`` is weaker, and ``note`` flags graphs where the two differ.
    """

    feasible: bool
    mode: str
    witness: tuple | None = None
    size_cutoff_ok: bool | None = None
    note: str | None = None

    def __bool__(self):
        return self.feasible

    def to_json(self) -> dict:
        out = {"feasible": self.feasible, "mode": self.mode}
        if self.witness is not None:
            out["witness"] = [list(w) if isinstance(w, tuple) else w for w in self.witness]
        if self.size_cutoff_ok is not None:
            out["size_cutoff_ok"] = self.size_cutoff_ok
        if self.note:
            out["note"] = self.note
        return out


def _max_pair_union(g: Hypergraph, budget: int) -> tuple[int, tuple[int, int] | None]:
    sizes = g.edge_sizes
    m = g.num_edges
    if m == 0:
        return 0, None
    top = np.sort(sizes)[::-1]
    bound = int(top[0] + (top[1] if m > 1 else 0))
    if m * (m + 1) // 2 > budget:
        raise BudgetExceeded(f"{m} edges: pairwise union scan exceeds budget", nodes=m * (m + 1) // 2, bound=bound)
    best, arg = -1, None
    for i in range(m):
        u = popcount(g.bits[i][None, :] | g.bits[i:])
        j = int(np.argmax(u))
        if u[j] > best:
            best, arg = int(u[j]), (i, i + j)
    return best, arg


def feasibility(g: Hypergraph, k: int, mode: str, budget: int = PAIR_BUDGET) -> Feasibility:
    n = g.n
    sizes = g.edge_sizes
    if mode == "erasure":
        bad = np.flatnonzero(sizes < k)
        if bad.size:
            return Feasibility(False, mode, witness=(g.edge(int(bad[0])),))
        return Feasibility(True, mode)
    if mode == "detect":
        bad = np.flatnonzero(sizes > n - k)
        if bad.size:
            return Feasibility(False, mode, witness=(g.edge(int(bad[0])),))
        return Feasibility(True, mode)
    if mode != "error":
        raise ValueError(f"unknown mode {mode!r}")
    cutoff_ok = bool((sizes <= (n - k) // 2).all())
    m = g.num_edges
    top = np.sort(sizes)[::-1]
    quick = int(top[0] + (top[1] if m > 1 else 0)) if m else 0
    if m == 0 or quick <= n - k:
        ok, witness = True, None
    else:
        worst, arg = _max_pair_union(g, budget)
        ok = worst <= n - k
        witness = None if ok else (g.edge(arg[0]), g.edge(arg[1]))
    note = None
    if ok != cutoff_ok:
        note = (
            f"pairwise condition says {'feasible' if ok else 'infeasible'} but the "
            f"edge-size cutoff {(n - k) // 2} says {'feasible' if cutoff_ok else 'infeasible'}"
        )
    return Feasibility(ok, mode, witness=witness, size_cutoff_ok=cutoff_ok, note=note)

