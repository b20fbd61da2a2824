"""Command-line driver.

Commands parse a document, run checks, and emit human-readable or JSON
reports (one record per check, bounds always echoed).  Exit codes: 0 when
everything holds or is not applicable, 1 on any failure, 2 on any unknown,
3 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from . import corpus, dsl, sampling
from .codes import (
    MapError,
    PartitionError,
    check_commuting,
    check_csc_item_i,
    check_csc_item_ii,
    check_csc_item_iii,
    check_genchl_iia,
    check_genchl_iib,
    check_length_preserving,
    eval_map,
    validate_partition,
)
from .definable import SetOracle, refute_finitely_defined, audit_refutation
from .graphs import MinimalEmitter, validate_ultragraph
from .intsets import SymbolicSet
from .paths import enumerate_blocks
from .points import (
    ConvergenceBounds,
    FinitePoint,
    RepeatFamily,
    check_convergence,
    length,
    shift,
)
from .verdicts import FAILS, HOLDS, NOT_APPLICABLE, UNKNOWN, Verdict

EXIT_OK, EXIT_FAILS, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
SCHEMA_VERSION = 1


def _env_bounds() -> dict:
    raw = os.environ.get("ULTRASHIFT_DEFAULT_BOUNDS", "")
    out = {}
    for bit in raw.split(","):
        if "=" in bit:
            k, v = bit.split("=", 1)
            try:
                out[k.strip()] = int(v)
            except ValueError:
                pass
    return out


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    return dsl.parse(_read(path), corpus.registry())


class Report:
    def __init__(self, command: str):
        self.command = command
        self.records: list[dict] = []

    def add(self, verdict) -> None:
        if isinstance(verdict, Verdict):
            self.records.append(verdict.to_record())
        else:
            self.records.append(verdict)

    def exit_code(self) -> int:
        statuses = {r["status"] for r in self.records}
        if statuses & {FAILS, "error"}:
            return EXIT_FAILS
        if UNKNOWN in statuses or "inconclusive" in statuses:
            return EXIT_UNKNOWN
        return EXIT_OK

    def emit(self, fmt: str) -> None:
        if fmt == "json":
            print(json.dumps({"schema": SCHEMA_VERSION,
                              "command": self.command,
                              "records": self.records}, indent=2))
            return
        for r in self.records:
            line = f"[{r['status']:>14}] {r['check']}"
            if r.get("detail"):
                line += f" | {r['detail']}"
            if r.get("witness"):
                line += f" | witness: {r['witness']}"
            if r.get("bounds"):
                bounds = ", ".join(f"{k}={v}" for k, v in r["bounds"].items())
                line += f" | bounds: {bounds}"
            print(line)


def _graph_from(doc, name: str | None, what: str = "graph"):
    if name is None:
        if len(doc.graphs) == 1:
            return next(iter(doc.graphs.values()))
        raise SystemExit(f"error: several graphs defined; use --{what}")
    if name not in doc.graphs:
        raise SystemExit(f"error: no ultragraph named {name!r}")
    return doc.graphs[name]


def _map_from(doc, name: str):
    if name not in doc.maps:
        raise SystemExit(f"error: no map named {name!r}")
    return doc.maps[name]


def _point_from(doc, g, text: str):
    if text in doc.points:
        return doc.points[text][1]
    return dsl.parse_point_literal(g, text, corpus.registry())


def _sample_pool(g, size: int):
    return sampling.point_pool(g, random.Random(0), size)


def cmd_validate(args) -> Report:
    doc = _load(args.file)
    report = Report("validate")
    for name, g in doc.graphs.items():
        res = validate_ultragraph(g)
        detail = []
        if not res.sinks.is_empty():
            detail.append(f"sinks: {res.sinks}")
        if not res.empty_range_edges.is_empty():
            detail.append(f"empty ranges: {res.empty_range_edges}")
        detail.extend(res.warnings)
        report.add(Verdict(f"validate({name})",
                           HOLDS if res.valid else FAILS,
                           "; ".join(detail) or "no sinks, no empty ranges"))
    if not doc.graphs:
        report.add(Verdict("validate", NOT_APPLICABLE, "no graphs defined"))
    return report


def cmd_emitters(args) -> Report:
    doc = _load(args.file)
    g = _graph_from(doc, args.graph)
    report = Report("emitters")
    verts = g.infinite_emitter_vertices()
    report.add(Verdict(f"infinite-emitter-vertices({g.name})", HOLDS,
                       str(verts) if not verts.is_empty() else "none"))
    if args.minimal:
        emitters, complete = g.minimal_infinite_emitters()
        for m in emitters:
            report.add(Verdict(f"minimal-emitter({g.name})", HOLDS,
                               f"{m.vertices} [{m.certificate}]"))
        if not emitters:
            report.add(Verdict(f"minimal-emitter({g.name})", NOT_APPLICABLE,
                               "none"))
        if not complete:
            report.add(Verdict(f"minimal-emitter({g.name})", UNKNOWN,
                               "closure did not saturate; list may be "
                               "incomplete"))
    return report


def cmd_blocks(args) -> Report:
    doc = _load(args.file)
    g = _graph_from(doc, args.graph)
    report = Report("blocks")
    blocks = enumerate_blocks(g, args.length, args.index_bound)
    for b in blocks:
        report.add(Verdict(f"block({g.name})", HOLDS, str(b),
                           bounds={"n": args.length,
                                   "index_bound": args.index_bound}))
    report.add(Verdict("blocks-total", HOLDS, f"{len(blocks)} blocks",
                       bounds={"n": args.length,
                               "index_bound": args.index_bound}))
    return report


def cmd_eval(args) -> Report:
    doc = _load(args.file)
    phi = _map_from(doc, args.map)
    x = _point_from(doc, phi.source, args.point)
    report = Report("eval")
    try:
        res = eval_map(phi, x, args.depth)
        prefix = " ".join(str(s) for s in res.prefix[:args.depth])
        detail = f"prefix: {prefix}"
        if res.resolved is not None:
            detail += f" | resolved: {res.resolved}"
        report.add(Verdict("eval", HOLDS, detail,
                           bounds={"depth": args.depth}))
    except (MapError, PartitionError) as err:
        report.add(Verdict("eval", FAILS, str(err), x))
    return report


def _zero_points(g):
    emitters, _ = g.minimal_infinite_emitters()
    return [FinitePoint((), m) for m in emitters]


def _check_thunks(kind: str, phi, samples, env) -> list:
    """Independent checks as thunks, so they can run concurrently."""
    tries = env.get("tries", 24)
    depth = env.get("depth", 16)
    M = env.get("m_max", 4)
    if kind == "commute":
        return [lambda: validate_partition(phi, samples),
                lambda: check_commuting(phi, samples, depth)]
    if kind in ("csc", "genchl"):
        thunks = [lambda: check_csc_item_i(phi)]
        for x0 in _zero_points(phi.source):
            img = eval_map(phi, x0, 8).prefix[0]
            if isinstance(img, MinimalEmitter):
                if kind == "csc":
                    thunks.append(lambda x0=x0: check_csc_item_ii(
                        phi, x0, SymbolicSet.empty(), tries))
                else:
                    thunks.append(lambda x0=x0: check_genchl_iia(
                        phi, x0, tries))
                    thunks.append(lambda x0=x0: check_genchl_iib(
                        phi, x0, tries=tries))
            thunks.append(lambda x0=x0: check_csc_item_iii(phi, x0.tail, M=M))
        return thunks
    if kind == "length-preserving":
        return [lambda: check_length_preserving(phi, samples, tries)]
    raise SystemExit(f"error: unknown check kind {kind!r}")


def cmd_check(args) -> Report:
    doc = _load(args.file)
    phi = _map_from(doc, args.map)
    env = _env_bounds()
    samples = _sample_pool(phi.source, env.get("samples", 40))
    report = Report(f"check {args.kind}")
    thunks = _check_thunks(args.kind, phi, samples, env)
    if args.parallel and len(thunks) > 1:
        with ThreadPoolExecutor(max_workers=min(4, len(thunks))) as pool:
            verdicts = list(pool.map(lambda t: t(), thunks))
    else:
        verdicts = [t() for t in thunks]
    for v in verdicts:
        report.add(v)
    if args.audit:
        for v in verdicts:
            report.add(_audit(phi, v))
    return report


def _audit(phi, v: Verdict) -> Verdict:
    """Re-check a fails witness through the relevant operation."""
    name = f"audit({v.check})"
    if v.status != FAILS:
        return Verdict(name, NOT_APPLICABLE, "only failures carry witnesses")
    try:
        if v.check == "partition":
            try:
                phi.symbol_at(v.witness)
                return Verdict(name, FAILS, "witness no longer violates")
            except PartitionError:
                return Verdict(name, HOLDS, "partition violation reproduced")
        if v.check == "length-preserving":
            sym = phi.symbol_at(v.witness)
            ok = isinstance(sym, MinimalEmitter) and length(v.witness) != 0
            return Verdict(name, HOLDS if ok else FAILS,
                           "witness re-checked" if ok else "mismatch")
        if v.check in ("commuting", "left-shift-identity"):
            x, i = v.witness
            lhs = eval_map(phi, shift(x))
            rhs = eval_map(phi, x)
            ok = lhs.coordinate(i) != rhs.coordinate(i + 1)
            return Verdict(name, HOLDS if ok else FAILS,
                           "violation reproduced" if ok else "mismatch")
        return Verdict(name, UNKNOWN, "no audit hook for this check")
    except Exception as err:  # audit must never crash the report
        return Verdict(name, UNKNOWN, f"audit error: {err}")


def cmd_refute_fd(args) -> Report:
    doc = _load(args.file)
    reg = corpus.registry()
    if args.oracle not in reg or not isinstance(reg[args.oracle], SetOracle):
        raise SystemExit(f"error: no registered oracle named {args.oracle!r}")
    oracle = reg[args.oracle]
    g = _graph_from(doc, args.graph)
    x = _point_from(doc, g, args.point)
    report = Report("refute-fd")
    result = refute_finitely_defined(g, oracle, x, args.max_window)
    status = HOLDS if result.status == "refuted" else UNKNOWN
    detail = result.claim if result.status == "refuted" else \
        f"stuck windows: {result.stuck}"
    report.add(Verdict(f"refute-fd({args.oracle})", status, detail,
                       f"{len(result.rows)} window witnesses",
                       bounds={"max_window": args.max_window}))
    if args.audit and result.status == "refuted":
        try:
            audit_refutation(g, oracle, x, result)
            report.add(Verdict("audit(refute-fd)", HOLDS,
                               "all witnesses re-checked"))
        except AssertionError as err:
            report.add(Verdict("audit(refute-fd)", FAILS, str(err)))
    return report


def cmd_converge(args) -> Report:
    doc = _load(args.file)
    reg = corpus.registry()
    if args.seq not in reg or not isinstance(reg[args.seq], RepeatFamily):
        raise SystemExit(f"error: no registered sequence named {args.seq!r}")
    seq = reg[args.seq]
    g = _graph_from(doc, args.graph)
    target = _point_from(doc, g, args.target)
    env = _env_bounds()
    bounds = ConvergenceBounds(m_max=env.get("m_max", 8),
                               n_max=env.get("n_max", 32))
    verdict = check_convergence(g, seq, target, bounds)
    report = Report("converge")
    status = {"holds": HOLDS, "counterexample": FAILS,
              "unknown": UNKNOWN}[verdict.status]
    report.add(Verdict(f"converge({args.seq})", status, verdict.detail,
                       verdict.witness, bounds.as_dict(),
                       exact=verdict.exact))
    return report


def cmd_fixture(args) -> Report:
    report = Report(f"fixture run {args.name}")
    result = corpus.run_fixture(args.name)
    for row in result.rows:
        status = HOLDS if row.ok else FAILS
        report.add(Verdict(f"fixture-{args.name}:{row.key}", status,
                           f"expected {row.expected}, got {row.actual}"
                           + (f" | {row.detail}" if row.detail else "")))
    return report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--audit", action="store_true",
                        help="re-check failure witnesses")
    common.add_argument("--parallel", action="store_true",
                        help="run independent checks concurrently")
    ap = argparse.ArgumentParser(
        prog="ultrashift",
        description="ultragraph shift spaces: set algebra, topology, and "
                    "sliding block code checkers",
        parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="check graphs for sinks and empty ranges")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("emitters", parents=[common],
                       help="infinite emitters of a graph")
    p.add_argument("file")
    p.add_argument("--graph")
    p.add_argument("--minimal", action="store_true")
    p.set_defaults(fn=cmd_emitters)

    p = sub.add_parser("blocks", parents=[common],
                       help="enumerate language blocks")
    p.add_argument("file")
    p.add_argument("--graph")
    p.add_argument("-n", "--length", type=int, required=True)
    p.add_argument("--index-bound", type=int, default=4)
    p.set_defaults(fn=cmd_blocks)

    p = sub.add_parser("eval", parents=[common],
                       help="apply a map to a point")
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("check", parents=[common],
                       help="run checker suites on a map")
    p.add_argument("kind", choices=["commute", "csc", "genchl",
                                    "length-preserving"])
    p.add_argument("file")
    p.add_argument("--map", required=True)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("refute-fd", parents=[common],
                       help="refute finite definedness of a registered "
                            "oracle set")
    p.add_argument("file")
    p.add_argument("--oracle", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--graph")
    p.add_argument("--max-window", type=int, default=6)
    p.set_defaults(fn=cmd_refute_fd)

    p = sub.add_parser("converge", parents=[common],
                       help="check a registered sequence against a target "
                            "point")
    p.add_argument("file")
    p.add_argument("--seq", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--graph")
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("fixture", parents=[common],
                       help="run a built-in fixture")
    p.add_argument("action", choices=["run"])
    p.add_argument("name", choices=["a", "b", "c", "d"])
    p.set_defaults(fn=cmd_fixture)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0,) else 0
    try:
        report = args.fn(args)
    except dsl.ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    report.emit(args.format)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
