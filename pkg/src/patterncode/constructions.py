"""Code constructions for pattern graphs, with their decoders.

Building blocks are Reed-Solomon codes evaluated at the field elements
``0, 1, ..., n-1``; the extended variant appends a coordinate that emits the
leading message coefficient, reaching length ``q + 1``.  A colored code
spreads an RS codeword over the graph: coordinate ``i`` repeats base
coordinate ``color(i)``.
"""

from __future__ import annotations

import numpy as np

from .codes import (
    Code,
    ERASED,
    LinearCode,
    code_from_json,
    message_index,
    message_tuple,
    pack_bool,
    register_structured,
)
from .coloring import (
    Coloring,
    color_exact_k,
    color_exact_strong,
    color_partition_eps,
)
from .errors import (
    BudgetExceeded,
    Infeasible,
    InfeasibleK,
    LengthExceedsField,
    TooFewSymbols,
)
from .gfq import field_new, pp_ceil, solve
from .hypergraph import (
    Hypergraph,
    complement_edges,
    err_to_era,
    feasibility,
    gqk_vertices,
    lift_era_to_err,
)

# ---------------------------------------------------------------- Reed-Solomon


def _rs_generator(n: int, k: int, q: int, extended: bool) -> np.ndarray:
    f = field_new(q)
    pts = n - 1 if extended else n
    gen = np.zeros((k, n), dtype=np.int64)
    for j in range(k):
        for i in range(pts):
            gen[j, i] = f.pow(i, j) if (i or j) else 1
    if extended:
        gen[k - 1, n - 1] = 1
    return gen


class RSCode(LinearCode):
    """Message ``(m_0..m_{k-1})`` = coefficients of ``p(x) = sum m_j x^j``."""

    kind = "rs"

    def __init__(self, n: int, k: int, q: int, extended: bool | None = None):
        if extended is None:
            extended = n == q + 1
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        if extended and n != q + 1:
            raise LengthExceedsField(f"extended RS has length q+1={q + 1}, not {n}")
        if not extended and n > q:
            raise LengthExceedsField(f"plain RS length {n} exceeds field size {q}")
        self.extended = bool(extended)
        super().__init__(_rs_generator(n, k, q, self.extended), q)

    def decode_from(self, coords, values) -> tuple[int, ...]:
        """Message from the first ``k`` of the given (distinct) coordinates."""
        coords = list(coords)[: self.k]
        if len(coords) < self.k:
            raise TooFewSymbols(f"need {self.k} symbols, got {len(coords)}")
        vals = [int(v) for v in list(values)[: self.k]]
        m = solve(self.field, self.gen[:, coords].T, vals)
        return tuple(int(x) for x in m)

    def consistent(self, coords, values) -> bool:
        """Do these coordinate values come from a single codeword?"""
        coords, values = list(coords), [int(v) for v in values]
        if len(coords) <= self.k:
            return True
        c = self.encode_many(np.asarray([self.decode_from(coords, values)]))[0]
        return all(int(c[i]) == v for i, v in zip(coords, values))

    def erasure_decode(self, received) -> tuple[int, ...]:
        coords = [i for i, s in enumerate(received) if s is not ERASED]
        if len(coords) < self.k:
            raise TooFewSymbols(f"{len(coords)} unerased symbols, need {self.k}")
        return self.decode_from(coords, [received[i] for i in coords])

    def is_codeword(self, word) -> bool:
        if len(word) != self.n or any(s is ERASED for s in word):
            raise ValueError("is_codeword needs a full-length word without erasures")
        return self.consistent(range(self.n), word)

    def body_json(self):
        return self.params_json()

    def params_json(self) -> dict:
        return {"type": "structured", "construction": "rs", "n": self.n, "k": self.k, "q": self.q, "extended": self.extended}


@register_structured("rs")
def _load_rs(body):
    return RSCode(int(body["n"]), int(body["k"]), int(body["q"]), bool(body["extended"]))


def rs_make(n: int, k: int, q: int, extended: bool | None = None) -> RSCode:
    return RSCode(n, k, q, extended)


def mds_for(t: int, k: int) -> RSCode:
    """Smallest-field RS code of length ``t``: alphabet ``pp_ceil(t - 1)``."""
    q = pp_ceil(t - 1)
    return RSCode(t, k, q, extended=t == q + 1)


# ---------------------------------------------------------------- colored codes


class ColoredCode(Code):
    """Coordinate ``i`` carries base coordinate ``coloring[i]``."""

    kind = "colored"

    def __init__(self, base: RSCode, coloring: Coloring, role: str = "erasure"):
        if coloring.num_colors > base.n:
            raise ValueError(f"{coloring.num_colors} colors exceed base length {base.n}")
        super().__init__(len(coloring.assignment), base.k, base.q)
        self.base = base
        self.coloring = coloring
        self.role = role
        self.colors = np.asarray(coloring.assignment, dtype=np.int64)

    @property
    def field(self):
        return self.base.field

    def encode_many(self, msgs):
        return self.base.encode_many(msgs)[:, self.colors]

    def base_view(self, positions, word):
        """First occurrence of each color among ``positions``: (base coords, values)."""
        seen, coords, vals = set(), [], []
        for i in positions:
            c = int(self.colors[i])
            if c not in seen:
                seen.add(c)
                coords.append(c)
                vals.append(int(word[i]))
        return coords, vals

    def erasure_decode(self, received) -> tuple[int, ...]:
        keep = [i for i, s in enumerate(received) if s is not ERASED]
        coords, vals = self.base_view(keep, received)
        if len(coords) < self.k:
            raise TooFewSymbols(f"{len(coords)} distinct colors unerased, need {self.k}")
        return self.base.decode_from(coords, vals)

    def body_json(self):
        return {
            "type": "structured",
            "construction": "colored",
            "role": self.role,
            "base": self.base.params_json(),
            "coloring": self.coloring.to_json(),
        }


@register_structured("colored")
def _load_colored(body):
    return ColoredCode(_load_rs(body["base"]), Coloring.from_json(body["coloring"]), body.get("role", "erasure"))


def _coloring_with_fallback(fn, *args, budget=None) -> Coloring:
    try:
        return fn(*args, budget=budget).coloring
    except BudgetExceeded as exc:
        return exc.info["coloring"]


def code_from_coloring(coloring: Coloring, k: int, role: str) -> ColoredCode:
    t = max(coloring.num_colors, k)
    return ColoredCode(mds_for(t, k), coloring, role)


def build_erasure_code(g: Hypergraph, k: int, budget: int | None = None) -> ColoredCode:
    """Colored RS code decodable from every edge of ``g``.

    Uses an exact k-coloring when the budget allows and a greedy one
    otherwise (``coloring.flags['greedy_fallback']``).
    """
    feas = feasibility(g, k, "erasure")
    if not feas:
        raise Infeasible(f"edge {feas.witness} has fewer than k={k} vertices", witness=feas.witness)
    if g.num_edges == 0:
        coloring = Coloring.from_assignment([0] * g.n, "k_coloring", k)
    else:
        coloring = _coloring_with_fallback(color_exact_k, g, k, budget=budget)
    return code_from_coloring(coloring, k, "erasure")


class CleanSetDecoder:
    """Error decoder for :func:`build_error_code`.

    Scans complement edges in canonical order and decodes from the first one
    whose symbols form a codeword of the punctured base code.
    """

    def __init__(self, code: ColoredCode, g_err: Hypergraph):
        self.code = code
        self.gbar = complement_edges(g_err)

    def __call__(self, y) -> tuple[int, ...] | None:
        for ebar in self.gbar.edges:
            coords, vals = self.code.base_view(ebar, y)
            if len(coords) >= self.code.k and self.code.base.consistent(coords, vals):
                return self.code.base.decode_from(coords, vals)
        return None


def build_error_code(g_err: Hypergraph, k: int, budget: int | None = None):
    """Colored RS code over a strong coloring of the complement graph.

    Needs every edge to have at most ``floor((n - k) / 2)`` vertices.
    Returns ``(code, decoder)``.
    """
    cap = (g_err.n - k) // 2
    big = [e for e in g_err.edges if len(e) > cap]
    if big:
        raise Infeasible(f"edge {big[0]} exceeds floor((n-k)/2) = {cap}", witness=big[0])
    gbar = complement_edges(g_err)
    if gbar.num_edges == 0:
        coloring = Coloring.from_assignment(list(range(g_err.n)), "strong")
    else:
        coloring = _coloring_with_fallback(color_exact_strong, gbar, budget=budget)
    code = code_from_coloring(coloring, k, "error")
    return code, CleanSetDecoder(code, g_err)


class EnumerationDecoder:
    """Return the message whose codeword differs from ``y`` inside one edge.

    Works for any code that is error-good for the graph: at most one message
    can qualify.  Cost is ``q^k * |E|`` word comparisons.
    """

    def __init__(self, code: Code, g_err: Hypergraph):
        self.code = code
        self.g = g_err
        self._notedge = ~g_err.bits

    def __call__(self, y) -> tuple[int, ...] | None:
        diff = pack_bool(self.code.table != np.asarray(y, dtype=np.int64)[None, :], self.code.n)
        exact = np.flatnonzero(~diff.any(axis=1))
        if exact.size:
            return message_tuple(int(exact[0]), self.code.q, self.code.k)
        for idx in range(diff.shape[0]):
            if (~(diff[idx][None, :] & self._notedge).any(axis=1)).any():
                return message_tuple(idx, self.code.q, self.code.k)
        return None


def build_error_code_via_era(g_err: Hypergraph, k: int, budget: int | None = None):
    """Erasure code for the (pruned) error-to-erasure graph, with an enumeration decoder."""
    feas = feasibility(g_err, k, "error")
    if not feas:
        raise Infeasible(f"error graph infeasible for k={k}: {feas.witness}", witness=feas.witness)
    code = build_erasure_code(err_to_era(g_err, prune=True), k, budget=budget)
    code.role = "error-via-era"
    return code, EnumerationDecoder(code, g_err)


# ---------------------------------------------------------------- lifting


class LiftedCode(Code):
    """``C(m) = base(m) || m || a^(n-2k)`` with pad ``a = 0``."""

    kind = "lifted"

    def __init__(self, base: Code, k: int, pad: int = 0):
        if k != base.k:
            raise ValueError(f"lifted message length {k} differs from base k={base.k}")
        if base.n - k < k:
            raise InfeasibleK(f"lifting needs n - k >= k, got n={base.n}, k={k}")
        super().__init__(2 * base.n - k, k, base.q)
        self.base = base
        self.pad = int(pad)

    def encode_many(self, msgs):
        msgs = np.asarray(msgs, dtype=np.int64)
        tail = np.full((len(msgs), self.base.n - 2 * self.k), self.pad, dtype=np.int64)
        return np.concatenate([self.base.encode_many(msgs), msgs, tail], axis=1)

    def body_json(self):
        return {"type": "structured", "construction": "lifted", "k": self.k, "pad": self.pad, "base": self.base.to_json()}


@register_structured("lifted")
def _load_lifted(body):
    return LiftedCode(code_from_json(body["base"]), int(body["k"]), int(body.get("pad", 0)))


def lift_code(base: Code, k: int, g0: Hypergraph | None = None):
    """Lift ``base``; with ``g0`` also return the lifted graph and a decoder for it."""
    code = LiftedCode(base, k)
    if g0 is None:
        return code
    g_lift, info = lift_era_to_err(g0, k)
    return code, g_lift, info, EnumerationDecoder(code, g_lift)


# ---------------------------------------------------------------- G_{q,k} evaluation code


class EvalCode(Code):
    """One coordinate per balanced vector ``u``: ``C_u(m) = u[index(m)]``."""

    kind = "gqk-eval"

    def __init__(self, q: int, k: int):
        self.vertices = gqk_vertices(q, k)
        super().__init__(len(self.vertices), k, q)

    def encode_many(self, msgs):
        idx = [message_index(m, self.q) for m in msgs]
        return self.vertices[:, idx].T

    def edge_decode(self, edge, symbols) -> tuple[int, ...]:
        """Unique message index whose column of the edge's vectors equals ``symbols``."""
        rows = self.vertices[list(edge)]
        hit = np.flatnonzero((rows == np.asarray(symbols)[:, None]).all(axis=0))
        if hit.size != 1:
            raise ValueError(f"symbols {tuple(symbols)} match {hit.size} messages on edge {tuple(edge)}")
        return message_tuple(int(hit[0]), self.q, self.k)

    def erasure_decode(self, received) -> tuple[int, ...]:
        keep = [i for i, s in enumerate(received) if s is not ERASED]
        return self.edge_decode(keep, [received[i] for i in keep])

    def body_json(self):
        return {"type": "structured", "construction": "gqk-eval", "q": self.q, "k": self.k}


@register_structured("gqk-eval")
def _load_eval(body):
    return EvalCode(int(body["q"]), int(body["k"]))


def build_eval_code_gqk(q: int, k: int):
    """Return ``(code, edge_decoder)`` for gqk(q, k)."""
    code = EvalCode(q, k)
    return code, code.edge_decode


# ---------------------------------------------------------------- detection


class ReencodeDetector:
    """``'no-error'`` iff erasure-decoding from some ``[n] - e`` re-encodes to ``y``."""

    def __init__(self, code: Code, g: Hypergraph, decode=None):
        self.code = code
        self.g = g
        self.decode = decode or code.erasure_decode
        self._codebook = {tuple(int(x) for x in row) for row in code.table}

    def __call__(self, y) -> str:
        y = tuple(int(s) for s in y)
        if self.g.num_edges == 0:
            return "no-error" if y in self._codebook else "error"
        for e in self.g.edges:
            gone = set(e)
            received = tuple(ERASED if i in gone else s for i, s in enumerate(y))
            try:
                m = self.decode(received)
            except ValueError:  # too few symbols or no unique candidate
                continue
            if m is not None and self.code.encode(m) == y:
                return "no-error"
        return "error"


def build_detection_code(g: Hypergraph, k: int, budget: int | None = None):
    feas = feasibility(g, k, "detect")
    if not feas:
        raise Infeasible(f"edge {feas.witness} has more than n-k vertices", witness=feas.witness)
    code = build_erasure_code(complement_edges(g), k, budget=budget)
    code.role = "detect"
    return code, ReencodeDetector(code, g)


# ---------------------------------------------------------------- eps codes


class PartitionDecoder:
    """Interpolate from distinct-class coordinates; ``None`` below ``k`` classes."""

    def __init__(self, code: ColoredCode):
        self.code = code

    def __call__(self, received):
        try:
            return self.code.erasure_decode(received)
        except TooFewSymbols:
            return None


def build_eps_code(n: int, k: int, eps, budget: int | None = None):
    coloring = color_partition_eps(n, k, eps)
    code = code_from_coloring(coloring, k, "eps")
    return code, PartitionDecoder(code)


# ---------------------------------------------------------------- decoders by mode


class TableErasureDecoder:
    """Unique message consistent with the unerased symbols, else ``None``."""

    def __init__(self, code: Code):
        self.code = code

    def __call__(self, received):
        keep = [i for i, s in enumerate(received) if s is not ERASED]
        vals = np.asarray([received[i] for i in keep], dtype=np.int64)
        hit = np.flatnonzero((self.code.table[:, keep] == vals[None, :]).all(axis=1))
        return message_tuple(int(hit[0]), self.code.q, self.code.k) if hit.size == 1 else None


def decoder_for(code: Code, g: Hypergraph, mode: str):
    """A decoder (or detector) for ``code`` under ``mode`` patterns from ``g``."""
    erase = getattr(code, "erasure_decode", None) or TableErasureDecoder(code)
    if mode == "erasure":
        return PartitionDecoder(code) if isinstance(code, ColoredCode) else erase
    if mode == "error":
        if isinstance(code, ColoredCode) and code.role == "error":
            return CleanSetDecoder(code, g)
        return EnumerationDecoder(code, g)
    if mode == "detect":
        return ReencodeDetector(code, g, erase)
    raise ValueError(f"unknown mode {mode!r}")
