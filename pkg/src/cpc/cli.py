"""Command-line front end: ``cpc <command> ...``.

Exit status is 0 for success (bisimilar, valid), 1 when processes are
distinguished or an encoding check fails, 2 for usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import deque
from pathlib import Path

from . import corpus, explore, harness, linda, spi
from .equivalence import BisimConfig, bounded_bisim, replay
from .lts import label_key, transitions
from .patterns import PatternError, show as show_pattern, show_subst, unify
from .process import barbs, canonical, canonical_key, free_names_proc, show
from .syntax import ParseError, parse, parse_pattern


class UsageError(Exception):
    pass


def _read(source: str, expr: bool) -> str:
    if expr:
        return source
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {source}: {e.strerror}") from None


def _load(args, source: str, dialect: str = "cpc"):
    text = _read(source, getattr(args, "expr", False))
    try:
        return parse(dialect, text)
    except ParseError as e:
        raise UsageError(f"{source if not args.expr else '<expr>'}:{e}") from None
    except (PatternError, spi.SpiError) as e:
        raise UsageError(str(e)) from None


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# -- commands ----------------------------------------------------------------

def cmd_parse(args) -> int:
    P = _load(args, args.source, args.dialect)
    if args.dialect == "cpc":
        print(show(P, args.unicode))
    elif args.dialect == "linda":
        print(linda.show(P))
    else:
        print(spi.show(P))
    return 0


def cmd_run(args) -> int:
    P = _load(args, args.source)
    u = args.unicode
    if args.mode == "exhaustive":
        g = explore.explore(P, args.steps)
        if args.json:
            _dump(g.as_dict(u))
            return 0
        traces = g.maximal_traces()
        print(f"{len(g.nodes)} states, {len(g.edges)} transitions, {len(traces)} maximal traces")
        for k in sorted(g.deadlocks, key=lambda k: (g.depth[k], k)):
            print(f"deadlock after {g.depth[k]} steps: {show(g.nodes[k], u)}")
        for k in sorted(g.frontier, key=lambda k: (g.depth[k], k)):
            print(f"step bound reached: {show(g.nodes[k], u)}")
        return 0
    if args.mode == "random":
        r = explore.run_random(P, args.steps, args.seed)
    else:
        def ask(options):
            for i, o in enumerate(options):
                print(f"  [{i}] {o}")
            while True:
                try:
                    line = input("choose redex (q to stop)> ").strip()
                except EOFError:
                    return None
                if line in ("q", "quit"):
                    return None
                if line.isdigit() and int(line) < len(options):
                    return int(line)
                print(f"  enter a number between 0 and {len(options) - 1}")
        r = explore.run_interactive(P, args.steps, ask, print, u)
    if args.json:
        _dump({"outcome": r.outcome, "events": [e.as_dict() for e in r.events],
               "final": show(r.final, u)})
        return 0
    print(f"0: {show(r.states[0], u)}")
    for e, Q in zip(r.events, r.states[1:]):
        print(f"   {e.describe(u)}")
        print(f"{e.index}: {show(Q, u)}")
    print("deadlock" if r.outcome == "deadlock" else
          "stopped" if r.outcome == "stopped" else f"step bound {args.steps} reached")
    return 0


def cmd_unify(args) -> int:
    try:
        p, q = parse_pattern(args.left), parse_pattern(args.right)
    except ParseError as e:
        raise UsageError(str(e)) from None
    u = unify(p, q)
    if u is None:
        print("undefined")
        return 1
    print(show_subst(u[0], args.unicode), show_subst(u[1], args.unicode))
    return 0


def cmd_barbs(args) -> int:
    P = _load(args, args.source)
    out = sorted(sorted(b) for b in barbs(P))
    if args.json:
        _dump(out)
    else:
        for b in out:
            print("{" + ", ".join(b) + "}")
    return 0


def cmd_lts(args) -> int:
    P = canonical(_load(args, args.source))
    avoid = free_names_proc(P)
    ids = {canonical_key(P): 0}
    nodes = [P]
    edges = []
    queue = deque([(P, 0)])
    while queue:
        S, d = queue.popleft()
        if d == args.depth:
            continue
        for t in transitions(S, avoid):
            k = canonical_key(t.target)
            if k not in ids:
                ids[k] = len(nodes)
                nodes.append(t.target)
                queue.append((t.target, d + 1))
            edges.append((ids[canonical_key(S)], t.label, ids[k]))
    edges.sort(key=lambda e: (e[0], label_key(e[1]), e[2]))
    if args.json:
        _dump({"states": [show(n, args.unicode) for n in nodes],
               "transitions": [{"from": a, "label": l.show(), "to": b} for a, l, b in edges]})
        return 0
    for i, n in enumerate(nodes):
        print(f"s{i}: {show(n, args.unicode)}")
    for a, l, b in edges:
        print(f"s{a} --{l.show()}--> s{b}")
    return 0


def cmd_bisim(args) -> int:
    P = _load(args, args.left)
    Q = _load(args, args.right)
    pool = None
    if args.pool:
        pool = frozenset(n.strip() for n in args.pool.split(",") if n.strip())
        pool |= free_names_proc(P) | free_names_proc(Q)
    cfg = BisimConfig(depth=args.depth, name_pool=pool, instantiation_depth=args.inst_depth)
    r = bounded_bisim(P, Q, cfg)
    if r.bisimilar:
        print(f"bisimilar to depth {args.depth}")
        return 0
    print(f"distinguished within depth {args.depth}: {r.witness.verdict}")
    if args.witness:
        print(r.witness.show())
        print("witness replays" if replay(r.witness, cfg, r.pool) else "witness does NOT replay")
    return 1


def cmd_encode(args) -> int:
    src = _load(args, args.source, args.source_lang)
    P = harness.LANGUAGES[args.source_lang].encode(src)
    text = show(P, args.unicode) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check_encoding(args) -> int:
    src = _load(args, args.source, args.source_lang)
    rep = harness.check_encoding(args.source_lang, src, args.steps)
    if args.report == "json":
        _dump(rep.as_dict())
    else:
        print(rep.text())
    return 0 if rep.ok else 1


def cmd_corpus(args) -> int:
    ok = True
    results = []
    for name in corpus.TRADE:
        g = explore.explore(corpus.trade(name), args.steps)
        finals = sorted({show(g.nodes[k]) for k in g.deadlocks})
        lengths = sorted({len(t) - 1 for t in g.maximal_traces()})
        results.append({"suite": "trade", "name": name, "states": len(g.nodes),
                        "trace_lengths": lengths, "final_states": finals})
    for name, (left, right, expected) in corpus.EQUATIONS.items():
        P, Q, _ = corpus.equation(name)
        cfg = BisimConfig(depth=args.depth)
        r = bounded_bisim(P, Q, cfg)
        good = r.bisimilar == expected and (r.bisimilar or replay(r.witness, cfg, r.pool))
        ok &= good
        results.append({"suite": "equations", "name": name, "left": left, "right": right,
                        "expected": expected, "bisimilar": r.bisimilar, "ok": good})
    if args.json:
        _dump(results)
        return 0 if ok else 1
    for r in results:
        if r["suite"] == "trade":
            print(f"trade {r['name']}: {r['states']} states, maximal trace lengths {r['trace_lengths']}")
            for f in r["final_states"]:
                print(f"    final: {f}")
        else:
            verdict = "bisimilar" if r["bisimilar"] else "distinguished"
            print(f"equation {r['name']}: {verdict} ({'as expected' if r['ok'] else 'UNEXPECTED'})")
            print(f"    {r['left']}  vs  {r['right']}")
    return 0 if ok else 1


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpc", description="Concurrent pattern calculus workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    def source(p, name="source"):
        p.add_argument(name, help="input file ('-' for stdin)")

    def common(p):
        p.add_argument("-e", "--expr", action="store_true", help="treat inputs as program text")
        p.add_argument("--unicode", action="store_true", help="print with λ, •, → and ⌜⌝")

    p = sub.add_parser("parse", help="parse and pretty-print a program")
    source(p)
    common(p)
    p.add_argument("--dialect", choices=["cpc", "linda", "spi"], default="cpc")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", help="execute a CPC process")
    source(p)
    common(p)
    p.add_argument("--mode", choices=["exhaustive", "random", "interactive"], default="exhaustive")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("unify", help="unify two patterns")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--unicode", action="store_true")
    p.set_defaults(func=cmd_unify)

    p = sub.add_parser("barbs", help="list the barbs of a process")
    source(p)
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_barbs)

    p = sub.add_parser("lts", help="labelled transitions to a depth")
    source(p)
    common(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lts)

    p = sub.add_parser("bisim", help="bounded bisimulation check")
    source(p, "left")
    source(p, "right")
    common(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--pool", help="extra names for instantiations, comma separated")
    p.add_argument("--inst-depth", type=int, default=1)
    p.add_argument("--witness", action="store_true", help="print the distinguishing game")
    p.set_defaults(func=cmd_bisim)

    for name, func, help_ in (("encode", cmd_encode, "translate Linda or Spi into CPC"),
                              ("check-encoding", cmd_check_encoding, "test the encoding criteria")):
        p = sub.add_parser(name, help=help_)
        source(p)
        common(p)
        p.add_argument("--from", dest="source_lang", choices=["linda", "spi"], required=True)
        if name == "encode":
            p.add_argument("-o", "--output")
        else:
            p.add_argument("--steps", type=int, default=6)
            p.add_argument("--report", choices=["text", "json"], default="text")
        p.set_defaults(func=func)

    p = sub.add_parser("corpus", help="run the bundled trade and equation examples")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for attr in ("depth", "steps"):
        if getattr(args, attr, 1) is not None and getattr(args, attr, 1) < 0:
            print(f"cpc: --{attr} must be nonnegative", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except UsageError as e:
        print(f"cpc: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
