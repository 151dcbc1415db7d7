"""Codes and their goodness oracles.

A code maps messages in ``F^k`` to words in ``F^n``.  Messages are indexed
in base-q row-major order (``m[0]`` most significant).  All three zero-error
notions reduce to conditions on the disagreement set
``D(m1, m2) = {i : C_i(m1) != C_i(m2)}`` of every message pair:

* erasures, edge ``e``:   bad iff ``D`` misses ``e``
* errors, edges ``e1, e2``: bad iff ``D`` lies inside ``e1 | e2``
* detection, edge ``e``:  bad iff ``D`` lies inside ``e``

The ``*_direct`` oracles instead enumerate corrupted words literally and are
kept independent of the mask machinery so the two can cross-check.
"""

from __future__ import annotations

import importlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import BadSymbol, BudgetExceeded
from .gfq import Alphabet, Field, field_new, is_prime_power, rank
from .hypergraph import Hypergraph, complement_edges, err_to_era_sources, n_words

ERASED = None
DIRECT_BUDGET = 10**7
ERA_PAIR_LIMIT = 20_000


def all_messages(q: int, k: int) -> np.ndarray:
    idx = np.arange(q**k)
    return np.stack([(idx // q ** (k - 1 - j)) % q for j in range(k)], axis=1).astype(np.int64)


def message_index(m: Sequence[int], q: int) -> int:
    idx = 0
    for s in m:
        idx = idx * q + int(s)
    return idx


def message_tuple(idx: int, q: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        idx, r = divmod(idx, q)
        out.append(r)
    return tuple(reversed(out))


class Code:
    """Encoder ``F^k -> F^n``.  Subclasses implement :meth:`encode_many`."""

    kind = "abstract"

    def __init__(self, n: int, k: int, q: int):
        if q < 2:
            raise ValueError("alphabet size must be >= 2")
        self.n, self.k, self.q = int(n), int(k), int(q)

    @property
    def alphabet(self) -> Alphabet | Field:
        return field_new(self.q) if is_prime_power(self.q) and self.q <= 64 else Alphabet(self.q)

    @property
    def num_messages(self) -> int:
        return self.q**self.k

    def encode_many(self, msgs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @cached_property
    def table(self) -> np.ndarray:
        t = np.ascontiguousarray(self.encode_many(all_messages(self.q, self.k)), dtype=np.int64)
        t.setflags(write=False)
        return t

    def _check_message(self, m) -> tuple[int, ...]:
        m = tuple(int(s) for s in m)
        if len(m) != self.k:
            raise BadSymbol(f"message must have {self.k} symbols, got {len(m)}")
        for s in m:
            if not 0 <= s < self.q:
                raise BadSymbol(f"symbol {s} outside alphabet 0..{self.q - 1}")
        return m

    def encode(self, m: Sequence[int]) -> tuple[int, ...]:
        m = self._check_message(m)
        return tuple(int(x) for x in self.table[message_index(m, self.q)])

    def body_json(self) -> dict:
        return {"type": "table", "rows": self.table.tolist()}

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "q": self.q, "body": self.body_json()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, k={self.k}, q={self.q})"


class TableCode(Code):
    """Explicit codebook with one row per message index."""

    kind = "table"

    def __init__(self, n: int, k: int, q: int, rows):
        super().__init__(n, k, q)
        rows = np.asarray(rows, dtype=np.int64)
        if rows.shape != (q**k, n):
            raise ValueError(f"table needs shape {(q**k, n)}, got {rows.shape}")
        if rows.size and (rows.min() < 0 or rows.max() >= q):
            raise BadSymbol("table entries must lie in 0..q-1")
        rows = rows.copy()
        rows.setflags(write=False)
        self.__dict__["table"] = rows

    def encode_many(self, msgs):
        return self.table[[message_index(m, self.q) for m in msgs]]

    @classmethod
    def from_code(cls, code: Code) -> TableCode:
        return cls(code.n, code.k, code.q, code.table)


class LinearCode(Code):
    """``m -> m @ gen`` over GF(q); ``gen`` must have full row rank."""

    kind = "linear"

    def __init__(self, gen, q: int):
        f = field_new(q)
        gen = np.asarray(gen, dtype=np.int64)
        if gen.ndim != 2:
            raise ValueError("generator must be a k x n matrix")
        if gen.size and (gen.min() < 0 or gen.max() >= q):
            raise BadSymbol("generator entries must lie in 0..q-1")
        super().__init__(gen.shape[1], gen.shape[0], q)
        if rank(f, gen) != self.k:
            raise ValueError("generator matrix does not have full row rank")
        self.field = f
        self.gen = gen
        self.gen.setflags(write=False)

    def encode_many(self, msgs):
        f = self.field
        out = np.zeros((len(msgs), self.n), dtype=np.int64)
        for j in range(self.k):
            out = f.add_table[out, f.mul_table[np.asarray(msgs)[:, j : j + 1], self.gen[j][None, :]]]
        return out

    def body_json(self):
        return {"type": "linear", "gen": self.gen.tolist()}


_STRUCTURED_LOADERS: dict[str, Callable[[dict], Code]] = {}


def register_structured(name: str):
    def deco(fn):
        _STRUCTURED_LOADERS[name] = fn
        return fn

    return deco


def code_from_json(data: dict) -> Code:
    n, k, q = int(data["n"]), int(data["k"]), int(data["q"])
    body = data["body"]
    kind = body["type"]
    if kind == "table":
        code: Code = TableCode(n, k, q, body["rows"])
    elif kind == "linear":
        code = LinearCode(body["gen"], q)
    elif kind == "structured":
        importlib.import_module(".constructions", __package__)  # populates the registry

        loader = _STRUCTURED_LOADERS.get(body.get("construction"))
        if loader is None:
            raise ValueError(f"unknown structured construction {body.get('construction')!r}")
        code = loader(body)
    else:
        raise ValueError(f"unknown code body type {kind!r}")
    if (code.n, code.k, code.q) != (n, k, q):
        raise ValueError("header n/k/q disagree with the code body")
    return code


def load_code(path) -> Code:
    with open(path) as fh:
        return code_from_json(json.load(fh))


def save_code(code: Code, path) -> None:
    with open(path, "w") as fh:
        fh.write(code.dumps())
        fh.write("\n")


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    good: bool
    mode: str
    witness: dict | None = None

    def __bool__(self):
        return self.good

    def to_json(self) -> dict:
        out: dict = {"good": self.good, "mode": self.mode}
        if self.witness is not None:
            out["witness"] = {k: list(v) if isinstance(v, tuple) else v for k, v in self.witness.items()}
        return out


def pack_bool(mat: np.ndarray, n: int) -> np.ndarray:
    mat = np.asarray(mat, dtype=bool).reshape(-1, n)
    w = n_words(n)
    padded = np.zeros((mat.shape[0], w * 64), dtype=bool)
    padded[:, :n] = mat
    return np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little")).view(np.uint64)


def disagreement_masks(table: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Message pairs ``i < j`` in lexicographic order and their disagreement bitsets."""
    m, n = table.shape
    ii, jj = np.triu_indices(m, k=1)
    diff = table[ii] != table[jj]
    return ii, jj, pack_bool(diff, n)


def _edge_check(code: Code, g: Hypergraph):
    if g.n != code.n:
        raise ValueError(f"graph has {g.n} vertices but the code has length {code.n}")


def _pair_witness(code, ii, jj, p):
    m1, m2 = int(ii[p]), int(jj[p])
    return {"m1": message_tuple(m1, code.q, code.k), "m2": message_tuple(m2, code.q, code.k)}


def erasure_good(code: Code, g: Hypergraph) -> Verdict:
    """Every edge's restriction ``m -> C_e(m)`` is injective.

    The witness is the lexicographically smallest ``(edge, m1, m2)`` with
    ``C_e(m1) == C_e(m2)``.
    """
    _edge_check(code, g)
    ii, jj, masks = disagreement_masks(code.table)
    i, p = _kernels.first_disjoint(g.bits, masks)
    if i < 0:
        return Verdict(True, "erasure")
    w = {"edge": g.edge(i), "edge_index": i, **_pair_witness(code, ii, jj, p)}
    return Verdict(False, "erasure", w)


def error_good(code: Code, g_err: Hypergraph, method: str = "auto", era=None) -> Verdict:
    """Goodness against arbitrary overwrites of any single edge.

    ``method="era"`` builds the pruned erasure graph ``{[n] - (e1 | e2)}``
    and runs :func:`erasure_good` on it.  ``method="cover"`` asks, pair by
    pair, whether two edges cover the disagreement set, which is the same
    condition without materializing ``|E|^2`` era edges.  ``auto`` picks
    ``era`` for small edge counts.  A precomputed ``(era_graph, sources)``
    pair (see :func:`hypergraph.lifted_era_sources`) may be passed as ``era``.
    """
    _edge_check(code, g_err)
    m = g_err.num_edges
    if era is not None:
        method = "era"
    if method == "auto":
        method = "era" if m * (m + 1) // 2 <= ERA_PAIR_LIMIT else "cover"
    ii, jj, masks = disagreement_masks(code.table)
    if method == "era":
        era, sources = era if era is not None else err_to_era_sources(g_err, prune=True)
        i, p = _kernels.first_disjoint(era.bits, masks)
        if i < 0:
            return Verdict(True, "error")
        a, b = sources[i]
        era_edge = era.edge(i)
    elif method == "cover":
        p, a, b = _kernels.first_cover(g_err.bits, masks, g_err.degrees, g_err.n)
        if p < 0:
            return Verdict(True, "error")
        union = set(g_err.edge(a)) | set(g_err.edge(b))
        era_edge = tuple(v for v in range(g_err.n) if v not in union)
    else:
        raise ValueError(f"unknown method {method!r}")
    w = {"e1": g_err.edge(a), "e2": g_err.edge(b), "era_edge": era_edge, **_pair_witness(code, ii, jj, p)}
    return Verdict(False, "error", w)


def _ball_words(code: Code, g: Hypergraph, budget: int):
    """Every word ``C(m) <>_e v``: arrays of (word id, message, edge, ...)."""
    q, n = code.q, code.n
    if q**n >= 2**62:
        raise BudgetExceeded(f"words over q={q}, n={n} do not fit the integer encoding")
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    table = code.table
    base = table @ weights
    total = code.num_messages * int(sum(q ** int(s) for s in g.edge_sizes))
    if total > budget:
        raise BudgetExceeded(f"{total} corrupted words exceed budget {budget}", nodes=total)
    words, msgs, edges = [], [], []
    for ei, e in enumerate(g.edges):
        e = list(e)
        pats = all_messages(q, len(e)) if e else np.zeros((1, 0), dtype=np.int64)
        offs = pats @ weights[e] if e else np.zeros(1, dtype=np.int64)
        cleared = base - (table[:, e] @ weights[e] if e else 0)
        blk = cleared[:, None] + offs[None, :]
        words.append(blk.ravel())
        msgs.append(np.repeat(np.arange(code.num_messages), len(offs)))
        edges.append(np.full(blk.size, ei))
    if not words:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z, weights
    return np.concatenate(words), np.concatenate(msgs), np.concatenate(edges), weights


def _word_tuple(word: int, q: int, n: int) -> tuple[int, ...]:
    return message_tuple(int(word), q, n)


def error_good_direct(code: Code, g_err: Hypergraph, budget: int = DIRECT_BUDGET) -> Verdict:
    """Literal check: corruption balls ``{C(m) <>_e v}`` of distinct messages never meet."""
    _edge_check(code, g_err)
    words, msgs, edges, _ = _ball_words(code, g_err, budget)
    if words.size == 0:
        return Verdict(True, "error")
    order = np.lexsort((edges, msgs, words))
    w, m, e = words[order], msgs[order], edges[order]
    start = np.ones(len(w), dtype=bool)
    start[1:] = w[1:] != w[:-1]
    group = np.cumsum(start) - 1
    first_msg = m[start][group]
    clash = np.flatnonzero(m != first_msg)
    if clash.size == 0:
        return Verdict(True, "error")
    t = clash[0]
    s = np.flatnonzero(start)[group[t]]
    y = _word_tuple(w[t], code.q, code.n)
    return Verdict(
        False,
        "error",
        {
            "y": y,
            "m1": message_tuple(int(m[s]), code.q, code.k),
            "m2": message_tuple(int(m[t]), code.q, code.k),
            "e1": g_err.edge(int(e[s])),
            "e2": g_err.edge(int(e[t])),
        },
    )


def detect_good(code: Code, g: Hypergraph, direct: bool = False, budget: int = DIRECT_BUDGET) -> Verdict:
    """Detection of any overwrite confined to an edge.

    Reduced form: erasure goodness on the complement graph.  ``direct=True``
    runs the literal oracle instead.
    """
    if direct:
        return detect_good_direct(code, g, budget)
    _edge_check(code, g)
    gbar = complement_edges(g)
    v = erasure_good(code, gbar)
    if v.good:
        return Verdict(True, "detect")
    kept = v.witness["edge"]
    e = tuple(x for x in range(g.n) if x not in set(kept))
    return Verdict(False, "detect", {"edge": e, "m1": v.witness["m1"], "m2": v.witness["m2"]})


def detect_good_direct(code: Code, g: Hypergraph, budget: int = DIRECT_BUDGET) -> Verdict:
    """Literal check: no codeword of another message lies in ``{C(m) <>_e v}``.

    Distinct messages sharing a codeword count as a failure whenever ``E`` is
    nonempty, since the receiver could not attribute even an intact word.
    """
    _edge_check(code, g)
    words, msgs, edges, weights = _ball_words(code, g, budget)
    if words.size == 0:
        return Verdict(True, "detect")
    cw = code.table @ weights
    order = np.argsort(cw, kind="stable")
    sorted_cw = cw[order]
    lo = np.searchsorted(sorted_cw, words, side="left")
    hi = np.searchsorted(sorted_cw, words, side="right")
    hits = np.flatnonzero(hi > lo)
    best = None
    for t in hits:
        for owner in order[lo[t] : hi[t]]:
            if owner != msgs[t]:
                key = (int(edges[t]), int(msgs[t]), int(owner))
                if best is None or key < best[0]:
                    best = (key, int(words[t]))
    if best is None:
        return Verdict(True, "detect")
    (ei, m1, m2), y = best
    return Verdict(
        False,
        "detect",
        {
            "edge": g.edge(ei),
            "m1": message_tuple(m1, code.q, code.k),
            "m2": message_tuple(m2, code.q, code.k),
            "y": _word_tuple(y, code.q, code.n),
        },
    )


def linear_erasure_good(code: LinearCode, g: Hypergraph) -> Verdict:
    """Every edge's generator columns have rank ``k``."""
    _edge_check(code, g)
    for i, e in enumerate(g.edges):
        if rank(code.field, code.gen[:, list(e)]) < code.k:
            return Verdict(False, "erasure", {"edge": e, "edge_index": i})
    return Verdict(True, "erasure")


def erased_word(code: Code, m, keep) -> tuple:
    """``C_e(m)``: the codeword with every coordinate outside ``keep`` erased."""
    word = code.encode(m)
    keep = set(keep)
    return tuple(s if i in keep else ERASED for i, s in enumerate(word))


def corrupt(word, edge, values) -> tuple[int, ...]:
    """``word <>_e v``: overwrite the coordinates in ``edge`` with ``values``."""
    out = list(word)
    for i, v in zip(edge, values):
        out[i] = int(v)
    return tuple(out)


def eps_success_count(code: Code, g: Hypergraph, decoder, budget: int = DIRECT_BUDGET) -> tuple[int, int]:
    """``(successes, |E| * q^k)`` for :func:`eps_success`."""
    _edge_check(code, g)
    total = g.num_edges * code.num_messages
    if total > budget:
        raise BudgetExceeded(f"{total} decodings exceed budget {budget}", nodes=total)
    msgs = [tuple(int(x) for x in m) for m in all_messages(code.q, code.k)]
    ok = 0
    for e in g.edges:
        keep = set(e)
        for idx, m in enumerate(msgs):
            row = code.table[idx]
            y = tuple(int(s) if i in keep else ERASED for i, s in enumerate(row))
            out = decoder(y)
            if out is not None and tuple(out) == m:
                ok += 1
    return ok, total


def eps_success(code: Code, g: Hypergraph, decoder, budget: int = DIRECT_BUDGET) -> Fraction:
    """Exact ``Pr[decoder(C_e(m)) == m]`` over uniform edges and messages.

    ``decoder`` receives a tuple with ``None`` at erased positions and returns
    a message tuple (or ``None`` to signal failure).
    """
    ok, total = eps_success_count(code, g, decoder, budget)
    return Fraction(ok, total) if total else Fraction(1)


def verify_witness(code: Code, verdict: Verdict) -> bool:
    """Re-evaluate the failing condition a bad verdict names."""
    if verdict.good:
        return True
    w = verdict.witness
    c1 = np.asarray(code.encode(w["m1"]))
    c2 = np.asarray(code.encode(w["m2"]))
    if tuple(w["m1"]) == tuple(w["m2"]):
        return False
    if verdict.mode == "erasure" and "edge" in w:
        e = list(w["edge"])
        return bool((c1[e] == c2[e]).all())
    if verdict.mode == "detect":
        outside = [i for i in range(code.n) if i not in set(w["edge"])]
        return bool((c1[outside] == c2[outside]).all())
    if verdict.mode == "error":
        union = set(w["e1"]) | set(w["e2"])
        if "y" in w:
            y = np.asarray(w["y"])
            off1 = {i for i in range(code.n) if y[i] != c1[i]}
            off2 = {i for i in range(code.n) if y[i] != c2[i]}
            return off1 <= set(w["e1"]) and off2 <= set(w["e2"])
        outside = [i for i in range(code.n) if i not in union]
        return bool((c1[outside] == c2[outside]).all())
    raise ValueError(f"cannot re-check verdict mode {verdict.mode!r}")
