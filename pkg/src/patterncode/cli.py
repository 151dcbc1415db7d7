"""``patterncode`` command line.

Exit codes: 0 success / good, 1 bad verdict (or nonexistent / decode
failure), 2 invalid input, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import codes, coloring, constructions, hypergraph, search
from .errors import BudgetExceeded, PatternCodeError
from .rng import make_rng

EXIT_OK, EXIT_BAD, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID, witness=None):
        super().__init__(message)
        self.code = code
        self.witness = witness


def _budget(text) -> int:
    return int(float(text))


def default_budget() -> int | None:
    env = os.environ.get("PATTERNCODE_BUDGET")
    return _budget(env) if env else None


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graph(path) -> hypergraph.Hypergraph:
    try:
        return hypergraph.load_graph(path)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read graph {path}: {exc}") from None


def _code(path) -> codes.Code:
    try:
        return codes.load_code(path)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read code {path}: {exc}") from None


# ---------------------------------------------------------------- graph


def cmd_graph_gen(args):
    fam = args.family
    if fam == "complete_uniform":
        g = hypergraph.complete_uniform(args.n, args.k)
    elif fam == "cycle":
        g = hypergraph.cycle(args.n)
    elif fam == "gqk":
        g = hypergraph.gqk(args.q, args.k)
    else:
        hi = args.max_size if args.max_size is not None else args.n
        g = hypergraph.random_hypergraph(args.n, args.m, args.min_size, hi, make_rng(args.seed))
    _emit(args, g.to_json())
    return EXIT_OK


def cmd_graph_complement(args):
    _emit(args, hypergraph.complement_edges(_graph(args.input)).to_json())
    return EXIT_OK


def cmd_graph_err_to_era(args):
    g = _graph(args.input)
    _emit(args, hypergraph.err_to_era(g, prune=args.prune).to_json())
    return EXIT_OK


def cmd_graph_lift(args):
    g0 = _graph(args.input)
    g, info = hypergraph.lift_era_to_err(g0, args.k)
    out = g.to_json()
    out["lift"] = info.to_json()
    _emit(args, out)
    return EXIT_OK


def cmd_graph_info(args):
    g = _graph(args.input)
    sizes = [int(s) for s in g.edge_sizes]
    out = {
        "n": g.n,
        "num_edges": g.num_edges,
        "edge_size_min": min(sizes) if sizes else None,
        "edge_size_max": max(sizes) if sizes else None,
        "uniform": g.uniform_size(),
        "label": g.label,
    }
    if args.k is not None:
        out["feasibility"] = {m: hypergraph.feasibility(g, args.k, m).to_json() for m in ("erasure", "error", "detect")}
    _emit(args, out)
    return EXIT_OK


# ---------------------------------------------------------------- color


def _exact_coloring(args, fn, *fargs):
    try:
        res = fn(*fargs, budget=args.budget)
    except BudgetExceeded as exc:
        fallback = exc.info["coloring"]
        _emit(args, fallback.to_json())
        print(f"budget exhausted: upper {exc.info.get('upper')}, lower {exc.info.get('lower')}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(args, res.coloring.to_json())
    return EXIT_OK


def cmd_color_exact(args):
    g = _graph(args.input)
    if args.strong:
        return _exact_coloring(args, coloring.color_exact_strong, g)
    return _exact_coloring(args, coloring.color_exact_k, g, args.k)


def cmd_color_greedy(args):
    g = _graph(args.input)
    c = coloring.color_greedy_strong(g) if args.strong else coloring.color_greedy_k(g, args.k)
    _emit(args, c.to_json())
    return EXIT_OK


def cmd_color_partition_eps(args):
    c = coloring.color_partition_eps(args.n, args.k, coloring.as_fraction(args.eps))
    _emit(args, c.to_json())
    return EXIT_OK


def cmd_color_canonical_gqk(args):
    _emit(args, coloring.color_canonical_gqk(args.q, args.k).to_json())
    return EXIT_OK


def cmd_color_validate(args):
    g = _graph(args.input)
    try:
        with open(args.coloring) as fh:
            c = coloring.Coloring.from_json(json.load(fh))
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read coloring {args.coloring}: {exc}") from None
    eps = coloring.as_fraction(args.eps) if args.eps is not None else None
    check = coloring.validate(g, c, kind=args.kind, k=args.k, eps=eps)
    _emit(args, check.to_json())
    if not check.valid:
        raise CliError("coloring is invalid", EXIT_INVALID, witness=check.witness)
    return EXIT_OK


# ---------------------------------------------------------------- code


def cmd_code_build(args):
    con = args.construction
    g = _graph(args.graph) if args.graph else None

    def need_graph():
        if g is None:
            raise CliError(f"--graph is required for construction {con}")
        return g

    if con == "erasure":
        code = constructions.build_erasure_code(need_graph(), args.k, budget=args.budget)
    elif con == "error":
        code, _ = constructions.build_error_code(need_graph(), args.k, budget=args.budget)
    elif con == "error-via-era":
        code, _ = constructions.build_error_code_via_era(need_graph(), args.k, budget=args.budget)
    elif con == "detect":
        code, _ = constructions.build_detection_code(need_graph(), args.k, budget=args.budget)
    elif con == "eps":
        if args.n is None or args.eps is None:
            raise CliError("eps construction needs --n and --eps")
        code, _ = constructions.build_eps_code(args.n, args.k, coloring.as_fraction(args.eps))
    elif con == "gqk-eval":
        code, _ = constructions.build_eval_code_gqk(args.q, args.k)
    elif con == "lift":
        if not args.base:
            raise CliError("lift construction needs --base CODE.json")
        code = constructions.lift_code(_code(args.base), args.k)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown construction {con}")
    _emit(args, code.to_json())
    return EXIT_OK


def _verdict(args, code, g):
    if args.mode == "erasure":
        return codes.erasure_good(code, g)
    if args.mode == "error":
        if args.direct:
            return codes.error_good_direct(code, g, budget=args.budget or codes.DIRECT_BUDGET)
        return codes.error_good(code, g, method=args.method)
    return codes.detect_good(code, g, direct=args.direct, budget=args.budget or codes.DIRECT_BUDGET)


def cmd_code_verify(args):
    g, code = _graph(args.graph), _code(args.code)
    try:
        v = _verdict(args, code, g)
    except BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    _emit(args, v.to_json())
    return EXIT_OK if v.good else EXIT_BAD


def _parse_word(text: str):
    out = []
    for tok in text.replace(" ", "").split(","):
        out.append(None if tok in ("_", "*", "?", "") else int(tok))
    return tuple(out)


def cmd_code_decode(args):
    g, code = _graph(args.graph), _code(args.code)
    word = _parse_word(args.word)
    if len(word) != code.n:
        raise CliError(f"word has {len(word)} symbols, code length is {code.n}")
    dec = constructions.decoder_for(code, g, args.mode)
    try:
        out = dec(word)
    except ValueError as exc:
        out = None
        print(str(exc), file=sys.stderr)
    if args.mode == "detect":
        _emit(args, {"result": out})
        return EXIT_OK
    _emit(args, {"message": list(out) if out is not None else None})
    return EXIT_OK if out is not None else EXIT_BAD


def cmd_code_search(args):
    g = _graph(args.graph)
    res = search.search_table_code(g, args.k, args.q, args.mode, budget=args.budget)
    _emit(args, res.to_json())
    return {"witness": EXIT_OK, "nonexistent": EXIT_BAD}.get(res.status, EXIT_BUDGET)


def cmd_code_report(args):
    g = _graph(args.graph)
    rep = search.param_report(g, args.k, args.mode, budget=args.budget, q_max=args.q_max)
    _emit(args, rep.render(args.format or "markdown"))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for randomized generators")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker count (output does not depend on it)")
    common.add_argument("--budget", type=_budget, default=default_budget(), help="node/work budget (env PATTERNCODE_BUDGET)")
    common.add_argument("--format", choices=["json", "csv", "markdown"], default=None, help="report format (default markdown)")
    common.add_argument("--out", help="write primary output here instead of stdout")
    common.add_argument("--timing", help="write wall-clock timing JSON to this sidecar file")

    p = argparse.ArgumentParser(prog="patterncode", description="Codes for hypergraph-shaped erasure, error and detection patterns.")
    groups = p.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=fn)
        return sp

    g = groups.add_parser("graph", help="generate and transform pattern graphs").add_subparsers(dest="cmd", required=True)
    sp = leaf(g, "gen", cmd_graph_gen)
    sp.add_argument("--family", required=True, choices=["complete_uniform", "cycle", "gqk", "random"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--m", type=int, default=5, help="random: number of edges drawn")
    sp.add_argument("--min-size", type=int, default=1)
    sp.add_argument("--max-size", type=int)
    for name, fn in [("complement", cmd_graph_complement), ("err-to-era", cmd_graph_err_to_era)]:
        sp = leaf(g, name, fn)
        sp.add_argument("--in", dest="input", required=True)
        if name == "err-to-era":
            sp.add_argument("--prune", action="store_true", help="drop supersets of other era edges")
    sp = leaf(g, "lift", cmd_graph_lift)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp = leaf(g, "info", cmd_graph_info)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--k", type=int)

    c = groups.add_parser("color", help="hypergraph colorings").add_subparsers(dest="cmd", required=True)
    for name, fn in [("exact", cmd_color_exact), ("greedy", cmd_color_greedy)]:
        sp = leaf(c, name, fn)
        sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--k", type=int)
        sp.add_argument("--strong", action="store_true")
    sp = leaf(c, "partition-eps", cmd_color_partition_eps)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eps", required=True)
    sp = leaf(c, "canonical-gqk", cmd_color_canonical_gqk)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp = leaf(c, "validate", cmd_color_validate)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--kind", choices=["strong", "k_coloring", "eps_k"])
    sp.add_argument("--eps")

    d = groups.add_parser("code", help="build, verify, decode and search codes").add_subparsers(dest="cmd", required=True)
    sp = leaf(d, "build", cmd_code_build)
    sp.add_argument("--construction", required=True,
                    choices=["erasure", "error", "error-via-era", "detect", "eps", "gqk-eval", "lift"])
    sp.add_argument("--graph")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--eps")
    sp.add_argument("--base")
    for name, fn in [("verify", cmd_code_verify), ("decode", cmd_code_decode)]:
        sp = leaf(d, name, fn)
        sp.add_argument("--mode", required=True, choices=["erasure", "error", "detect"])
        sp.add_argument("--graph", required=True)
        sp.add_argument("--code", required=True)
        if name == "verify":
            sp.add_argument("--direct", action="store_true", help="use the brute-force oracle")
            sp.add_argument("--method", choices=["auto", "era", "cover"], default="auto")
        else:
            sp.add_argument("--word", required=True, help="comma-separated symbols, '_' marks an erasure")
    sp = leaf(d, "search", cmd_code_search)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--mode", required=True, choices=["erasure", "error", "detect"])
    sp = leaf(d, "report", cmd_code_report)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mode", required=True, choices=["erasure", "error", "detect"])
    sp.add_argument("--q-max", type=int, default=4)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rc = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.witness is not None:
            print(json.dumps({"witness": list(exc.witness)}), file=sys.stderr)
        rc = exc.code
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        rc = EXIT_BUDGET
    except (PatternCodeError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        witness = getattr(exc, "witness", None)
        if witness is not None:
            print(json.dumps({"witness": [list(w) if isinstance(w, tuple) else w for w in witness]}), file=sys.stderr)
        rc = EXIT_INVALID
    if getattr(args, "timing", None):
        with open(args.timing, "w") as fh:
            json.dump({"command": [args.group, args.cmd], "seconds": time.perf_counter() - start, "exit": rc}, fh)
            fh.write("\n")
    return rc


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
