"""Hot loops over packed vertex bitsets.

Every kernel exists twice: a plain-loop body compiled with ``numba.njit`` and
a vectorized numpy version.  Both return identical results (same witness
order), so the backend only changes speed.  Set ``PATTERNCODE_NUMBA=0`` to
force the numpy path; it is also used when numba is not importable.

Bitset layout: vertex ``v`` lives in word ``v >> 6`` at bit ``v & 63`` of a
``uint64`` row.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _numba_requested() -> bool:
    return os.environ.get("PATTERNCODE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = numba is not None and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"

_CHUNK_WORDS = 1 << 22


# ---------------------------------------------------------------- loop bodies
# Written in the numba-compatible subset; compiled lazily by _jit().


def _first_disjoint_loop(edge_bits, pair_bits):
    n_e, w = edge_bits.shape
    n_p = pair_bits.shape[0]
    for i in range(n_e):
        for p in range(n_p):
            hit = False
            for t in range(w):
                if edge_bits[i, t] & pair_bits[p, t]:
                    hit = True
                    break
            if not hit:
                return i, p
    return -1, -1


def _first_subset_loop(edge_bits, pair_bits):
    n_e, w = edge_bits.shape
    n_p = pair_bits.shape[0]
    for i in range(n_e):
        for p in range(n_p):
            inside = True
            for t in range(w):
                if pair_bits[p, t] & ~edge_bits[i, t]:
                    inside = False
                    break
            if inside:
                return i, p
    return -1, -1


def _min_degree_vertex(row, degrees, n):
    best = -1
    best_deg = 0
    for v in range(n):
        if (row[v >> 6] >> np.uint64(v & 63)) & np.uint64(1):
            if best < 0 or degrees[v] < best_deg:
                best = v
                best_deg = degrees[v]
    return best


if numba is not None:
    # called from the jitted cover loop, so it must be compiled too
    _min_degree_vertex = numba.njit(cache=True)(_min_degree_vertex)


def _first_cover_loop(edge_bits, pair_bits, degrees, n):
    n_e, w = edge_bits.shape
    n_p = pair_bits.shape[0]
    rest = np.empty(w, dtype=np.uint64)
    one = np.uint64(1)
    for p in range(n_p):
        d = _min_degree_vertex(pair_bits[p], degrees, n)
        if d < 0:
            if n_e > 0:
                return p, 0, 0
            continue
        dw = d >> 6
        db = np.uint64(d & 63)
        for i in range(n_e):
            if not ((edge_bits[i, dw] >> db) & one):
                continue
            empty = True
            for t in range(w):
                rest[t] = pair_bits[p, t] & ~edge_bits[i, t]
                if rest[t]:
                    empty = False
            if empty:
                return p, i, i
            r = _min_degree_vertex(rest, degrees, n)
            rw = r >> 6
            rb = np.uint64(r & 63)
            for j in range(n_e):
                if not ((edge_bits[j, rw] >> rb) & one):
                    continue
                inside = True
                for t in range(w):
                    if rest[t] & ~edge_bits[j, t]:
                        inside = False
                        break
                if inside:
                    if j < i:
                        return p, j, i
                    return p, i, j
    return -1, -1, -1


def _distinct_counts_loop(indptr, indices, colors, n_colors):
    n_e = indptr.shape[0] - 1
    out = np.zeros(n_e, dtype=np.int64)
    stamp = np.full(max(n_colors, 1), -1, dtype=np.int64)
    for i in range(n_e):
        c = 0
        for t in range(indptr[i], indptr[i + 1]):
            col = colors[indices[t]]
            if stamp[col] != i:
                stamp[col] = i
                c += 1
        out[i] = c
    return out


def _minimal_rows_loop(bits):
    n_r, w = bits.shape
    keep = np.ones(n_r, dtype=np.bool_)
    for i in range(n_r):
        for j in range(n_r):
            if i == j:
                continue
            sub = True
            equal = True
            for t in range(w):
                if bits[j, t] & ~bits[i, t]:
                    sub = False
                    break
                if bits[j, t] != bits[i, t]:
                    equal = False
            if sub and not equal:
                keep[i] = False
                break
    return keep


def _extend_balanced_loop(codes, vectors, start, q, target):
    n_v, length = vectors.shape
    width = codes.max() + 1 if codes.shape[0] else 1
    out = np.zeros(n_v, dtype=np.bool_)
    counts = np.zeros(width * q, dtype=np.int64)
    for v in range(start, n_v):
        counts[:] = 0
        ok = True
        for i in range(length):
            c = codes[i] * q + vectors[v, i]
            counts[c] += 1
            if counts[c] > target:
                ok = False
                break
        out[v] = ok
    return out


# ---------------------------------------------------------------- numpy forms


def _chunk_rows(n_rows: int, per_row: int) -> int:
    return max(1, _CHUNK_WORDS // max(per_row, 1))


def _first_disjoint_np(edge_bits, pair_bits):
    n_e, w = edge_bits.shape
    n_p = pair_bits.shape[0]
    if n_e == 0 or n_p == 0:
        return -1, -1
    step = _chunk_rows(n_e, n_p * w)
    for s in range(0, n_e, step):
        blk = edge_bits[s : s + step]
        hit = (blk[:, None, :] & pair_bits[None, :, :]).any(axis=2)
        miss = ~hit
        if miss.any():
            flat = int(np.argmax(miss.ravel()))
            return s + flat // n_p, flat % n_p
    return -1, -1


def _first_subset_np(edge_bits, pair_bits):
    n_e, w = edge_bits.shape
    n_p = pair_bits.shape[0]
    if n_e == 0 or n_p == 0:
        return -1, -1
    step = _chunk_rows(n_e, n_p * w)
    for s in range(0, n_e, step):
        blk = edge_bits[s : s + step]
        outside = (pair_bits[None, :, :] & ~blk[:, None, :]).any(axis=2)
        inside = ~outside
        if inside.any():
            flat = int(np.argmax(inside.ravel()))
            return s + flat // n_p, flat % n_p
    return -1, -1


def _row_vertices(row, n):
    return np.flatnonzero(np.unpackbits(row.view(np.uint8), bitorder="little")[:n])


def _min_degree_vertex_np(row, degrees, n):
    verts = _row_vertices(row, n)
    if verts.size == 0:
        return -1
    return int(verts[np.argmin(degrees[verts])])


def _has_bit(edge_bits, v):
    return ((edge_bits[:, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)).astype(bool)


def _first_cover_np(edge_bits, pair_bits, degrees, n):
    n_e = edge_bits.shape[0]
    for p in range(pair_bits.shape[0]):
        dvec = pair_bits[p]
        d = _min_degree_vertex_np(dvec, degrees, n)
        if d < 0:
            if n_e > 0:
                return p, 0, 0
            continue
        for i in np.flatnonzero(_has_bit(edge_bits, d)):
            rest = dvec & ~edge_bits[i]
            if not rest.any():
                return p, int(i), int(i)
            r = _min_degree_vertex_np(rest, degrees, n)
            cand = np.flatnonzero(_has_bit(edge_bits, r))
            ok = ~(rest[None, :] & ~edge_bits[cand]).any(axis=1)
            if ok.any():
                j = int(cand[np.argmax(ok)])
                i = int(i)
                return (p, j, i) if j < i else (p, i, j)
    return -1, -1, -1


def _distinct_counts_np(indptr, indices, colors, n_colors):
    n_e = indptr.shape[0] - 1
    if indices.size == 0:
        return np.zeros(n_e, dtype=np.int64)
    edge_id = np.repeat(np.arange(n_e, dtype=np.int64), np.diff(indptr))
    key = np.unique(edge_id * max(n_colors, 1) + colors[indices])
    return np.bincount(key // max(n_colors, 1), minlength=n_e).astype(np.int64)


def _minimal_rows_np(bits):
    n_r = bits.shape[0]
    keep = np.ones(n_r, dtype=bool)
    step = _chunk_rows(n_r, n_r * bits.shape[1])
    for s in range(0, n_r, step):
        blk = bits[s : s + step]
        # sub[a, j]: row j is a subset of row s+a
        sub = ~(bits[None, :, :] & ~blk[:, None, :]).any(axis=2)
        eq = (bits[None, :, :] == blk[:, None, :]).all(axis=2)
        keep[s : s + step] = ~(sub & ~eq).any(axis=1)
    return keep


def _extend_balanced_np(codes, vectors, start, q, target):
    n_v = vectors.shape[0]
    out = np.zeros(n_v, dtype=bool)
    if start >= n_v:
        return out
    width = (int(codes.max()) + 1 if codes.size else 1) * q
    ext = codes[None, :] * q + vectors[start:]
    rows = np.arange(ext.shape[0])[:, None]
    counts = np.zeros((ext.shape[0], width), dtype=np.int64)
    np.add.at(counts, (np.broadcast_to(rows, ext.shape), ext), 1)
    out[start:] = (counts <= target).all(axis=1)
    return out


# ---------------------------------------------------------------- dispatch

_LOOPS = {
    "first_disjoint": _first_disjoint_loop,
    "first_subset": _first_subset_loop,
    "first_cover": _first_cover_loop,
    "distinct_counts": _distinct_counts_loop,
    "minimal_rows": _minimal_rows_loop,
    "extend_balanced": _extend_balanced_loop,
}
NUMPY_KERNELS = {
    "first_disjoint": _first_disjoint_np,
    "first_subset": _first_subset_np,
    "first_cover": _first_cover_np,
    "distinct_counts": _distinct_counts_np,
    "minimal_rows": _minimal_rows_np,
    "extend_balanced": _extend_balanced_np,
}
_JITTED: dict = {}


def _jit(name: str):
    if name not in _JITTED:
        if numba is None:
            raise RuntimeError("numba is not available")
        _JITTED[name] = numba.njit(cache=True)(_LOOPS[name])
    return _JITTED[name]


def get_kernel(name: str, backend: str | None = None):
    """Return kernel ``name`` for ``backend`` ('numba' or 'numpy'; default: active)."""
    backend = backend or BACKEND
    if backend == "numba":
        return _jit(name)
    if backend == "numpy":
        return NUMPY_KERNELS[name]
    raise ValueError(f"unknown backend {backend!r}")


def first_disjoint(edge_bits, pair_bits) -> tuple[int, int]:
    """First ``(edge, pair)`` with an empty intersection, else ``(-1, -1)``."""
    i, p = get_kernel("first_disjoint")(edge_bits, pair_bits)
    return int(i), int(p)


def first_subset(edge_bits, pair_bits) -> tuple[int, int]:
    """First ``(edge, pair)`` whose pair mask lies inside the edge."""
    i, p = get_kernel("first_subset")(edge_bits, pair_bits)
    return int(i), int(p)


def first_cover(edge_bits, pair_bits, degrees, n) -> tuple[int, int, int]:
    """First pair mask covered by the union of two edges: ``(pair, i, j)`` with ``i <= j``.

    For each pair (in order) the search pivots on the lowest-degree vertex of
    the mask; one of the two edges must contain it.
    """
    p, i, j = get_kernel("first_cover")(edge_bits, pair_bits, np.asarray(degrees, dtype=np.int64), int(n))
    return int(p), int(i), int(j)


def distinct_counts(indptr, indices, colors, n_colors) -> np.ndarray:
    return get_kernel("distinct_counts")(
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(colors, dtype=np.int64),
        int(n_colors),
    )


def minimal_rows(bits) -> np.ndarray:
    """Mask of rows that are not proper supersets of another row."""
    return get_kernel("minimal_rows")(bits)


def extend_balanced(codes, vectors, start, q, target) -> np.ndarray:
    return get_kernel("extend_balanced")(
        np.asarray(codes, dtype=np.int64), np.asarray(vectors, dtype=np.int64), int(start), int(q), int(target)
    )
