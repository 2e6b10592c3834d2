"""Command-line interface: construct | verify | simulate | experiment | bounds.

Exit codes: 0 success, 1 usage, 2 parse, 3 infeasible, 4 construction or
verification failure, 5 decode mismatch.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from netecc.code import (
    construct_deterministic,
    construct_random,
    construct_refined,
    deterministic_threshold,
    format_code,
    load_code,
    random_threshold,
    refined_patterns,
    required_field_order,
    singleton_max_messages,
)
from netecc.decode import ErrorVector, decode_erasure, decode_exhaustive, decode_pattern_search, transmit
from netecc.errors import CodeDefectError, ConstructionError, InfeasibleError, ParseError
from netecc.experiment import run_experiment
from netecc.field import FieldSpec, is_prime
from netecc.graph import load_network
from netecc.report import dump_kv

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_FAILURE, EXIT_MISMATCH = range(6)


class UsageError(Exception):
    pass


def resolve_network(name: str):
    """Load a network file; bundled fixtures may be named without a path."""
    path = Path(name)
    if not path.exists():
        stem = name if name.endswith(".net") else name + ".net"
        bundled = resources.files("netecc") / "data" / Path(stem).name
        if bundled.is_file():
            return load_network(str(bundled))
    return load_network(path)


def resolve_file(name: str) -> str:
    path = Path(name)
    if path.exists():
        return str(path)
    bundled = resources.files("netecc") / "data" / path.name
    if bundled.is_file():
        return str(bundled)
    return name


def _edge_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad edge list {text!r}") from None


def _field_order(args, net, mode, k, alpha, enforce=True) -> int:
    if mode == "deterministic":
        needed = required_field_order(net, alpha, "deterministic")
    elif mode == "refined":
        needed = required_field_order(net, None, "refined", k=k)
    else:
        needed = required_field_order(net, alpha, "random", delta=Fraction(str(args.delta)))
    if args.q in (None, "auto"):
        return needed
    try:
        q = int(args.q)
    except ValueError:
        raise UsageError(f"--q must be an integer or 'auto', got {args.q!r}") from None
    if not is_prime(q):
        raise UsageError(f"--q must be prime, got {q}")
    if enforce and q < needed and not args.unsafe_q:
        raise UsageError(f"q={q} is below the sufficient field size {needed}; pass --unsafe-q to allow it")
    return q


def _emit(args, kv_text: str, text_lines):
    if args.format == "kv":
        sys.stdout.write(kv_text)
    else:
        for line in text_lines:
            print(line)


def cmd_construct(args) -> int:
    mode = {"det": "deterministic"}.get(args.mode, args.mode)
    net = resolve_network(args.network)
    if mode != "refined" and args.alpha is None:
        raise UsageError("--alpha is required for this mode")
    q = _field_order(args, net, mode, args.k, args.alpha)
    fld = FieldSpec(q)
    if mode == "deterministic":
        code, report = construct_deterministic(net, args.k, args.alpha, fld)
    elif mode == "refined":
        code, report = construct_refined(net, args.k, fld)
    else:
        code, report = construct_random(net, args.k, args.alpha, fld, args.seed)
    text = format_code(code)
    if args.out:
        Path(args.out).write_text(text)
    elif args.format == "text":
        sys.stdout.write(text)
    lines = [
        f"mode: {report.mode}",
        f"q: {report.q}",
        f"k: {report.k}",
        f"n: {report.n}",
        "n_t: " + ", ".join(f"{t}={c}" for t, c in report.n_t.items()),
        "alpha_t: " + ", ".join(f"{t}={a}" for t, a in report.sink_alpha.items()),
        f"patterns: {report.pattern_count}",
        f"trackers: {report.tracker_count}",
        f"excluded: {len(report.excluded)}",
        f"success: {report.success}",
        "m_t^F (sink|pattern = m):",
    ]
    lines += [f"  {key} = {m}" for key, m in report.m_table.items()]
    _emit(args, report.to_kv(), lines)
    return EXIT_OK if report.success else EXIT_FAILURE


def cmd_verify(args) -> int:
    net = resolve_network(args.network)
    code = load_code(resolve_file(args.code), net)
    from netecc.verify import verify_code

    if args.alpha is not None:
        report = verify_code(code, args.alpha)
    elif args.refined:
        report = verify_code(code, pattern_sizes={t: c - code.k for t, c in net.min_cut_to_sinks().items()})
    elif args.known_failures:
        report = verify_code(code, patterns=[_edge_list(x) for x in args.known_failures], failures=True)
    elif args.known_erasures:
        report = verify_code(code, patterns=[_edge_list(x) for x in args.known_erasures])
    else:
        raise UsageError("give --alpha, --refined, --known-erasures or --known-failures")
    lines = [f"checked: {len(report.checks)}", f"failed: {len(report.failures)}"]
    lines += [f"FAIL {c.sink} {list(c.pattern)}: {c.reason}" for c in report.failures]
    lines.append("PASS" if report.passed else "FAIL")
    _emit(args, report.to_kv(), lines)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_simulate(args) -> int:
    net = resolve_network(args.network)
    code = load_code(resolve_file(args.code), net)
    q = code.q
    message = tuple(int(x) % q for x in args.message.split(","))
    if len(message) != code.k:
        raise UsageError(f"message needs {code.k} symbols")
    if args.errors is not None and args.random_weight is not None:
        raise UsageError("give either --errors or --random-weight, not both")
    if args.random_weight is not None:
        rng = random.Random(args.seed)
        if args.random_weight > len(net.edges):
            raise UsageError("random weight exceeds the edge count")
        chosen = rng.sample(net.edge_ids, args.random_weight)
        values = {e: rng.randrange(1, q) for e in chosen}
    else:
        values = {}
        for item in (args.errors or "").split(","):
            if not item.strip():
                continue
            try:
                e, v = (int(x) for x in item.split(":"))
            except ValueError:
                raise UsageError(f"bad error entry {item!r}, expected edge:value") from None
            if e not in net.edge_ids:
                raise UsageError(f"unknown edge {e}")
            values[e] = v
    err = ErrorVector.from_edges(net, values, q)
    alpha = args.alpha if args.alpha is not None else (net.n - code.k) // 2
    obs = transmit(code, message, err)
    rows = [("message", list(message)), ("error_support", list(err.support)), ("alpha", alpha)]
    lines = [f"message: {list(message)}", f"error: {err.as_dict()}", f"decoder: {args.decoder}"]
    all_ok = True
    for t in net.sinks:
        if args.decoder == "exhaustive":
            res = decode_exhaustive(code, t, obs[t], alpha)
        elif args.decoder == "pattern":
            res = decode_pattern_search(code, t, obs[t], alpha)
        else:
            pattern = _edge_list(args.pattern) if args.pattern else err.support
            try:
                res = decode_erasure(code, t, obs[t], pattern)
            except CodeDefectError as exc:
                print(f"{t}: code defect: {exc}", file=sys.stderr)
                res = None
        ok = res is not None and res.ok and res.message == message
        all_ok &= ok
        verdict = "code-defect" if res is None else res.verdict
        got = None if res is None or res.message is None else list(res.message)
        rows.append((f"sink.{t}", {"observation": list(obs[t].symbols), "verdict": verdict,
                                   "message": got, "examined": 0 if res is None else res.examined,
                                   "match": ok}))
        lines.append(f"{t}: observed {list(obs[t].symbols)} -> {verdict} {got if got is not None else ''}"
                     f"{'' if ok else ' (MISMATCH)'}")
    rows.append(("all_decoded", all_ok))
    _emit(args, dump_kv(rows), lines)
    return EXIT_OK if all_ok else EXIT_MISMATCH


def cmd_experiment(args) -> int:
    net = resolve_network(args.network)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if net.n < args.k + 2 * args.alpha:
        raise InfeasibleError(f"k + 2*alpha = {args.k + 2 * args.alpha} exceeds n = {net.n}")
    # small fields are a legitimate experiment input, so no bound check here
    q = _field_order(args, net, "random", args.k, args.alpha, enforce=False)
    report = run_experiment(net, args.k, args.alpha, q, args.trials, args.seed,
                            delta=args.delta, workers=args.workers)
    lines = [
        f"trials: {report.trials}",
        f"failures: {report.failures}",
        f"empirical failure rate: {report.rate:.4f}",
        f"bound delta: {report.delta}",
        f"q: {report.q}",
        f"within bound: {report.within_bound}",
    ]
    if report.failed_seeds:
        lines.append("failed seeds: " + " ".join(map(str, report.failed_seeds)))
    _emit(args, report.to_kv(), lines)
    return EXIT_OK


def cmd_bounds(args) -> int:
    net = resolve_network(args.network)
    cuts = net.min_cut_to_sinks()
    n = min(cuts.values())
    if args.alpha is None and args.k is None:
        raise UsageError("give --alpha or --k")
    alpha = args.alpha if args.alpha is not None else (n - args.k) // 2
    sink_alpha = {t: (alpha if args.k is None else (c - args.k) // 2) for t, c in cuts.items()}
    rows = [("n", n), ("n_t", cuts), ("alpha", alpha), ("sink_alpha", sink_alpha),
            ("edges", len(net.edges)), ("sinks", len(net.sinks))]
    if args.q is not None:
        q = int(args.q)
        rows.append(("q", q))
        rows.append(("singleton_max_messages", singleton_max_messages(n, alpha, q) if n >= 2 * alpha else 0))
        rows.append(("refined_max_messages", {
            t: (singleton_max_messages(c, sink_alpha[t], q) if c >= 2 * sink_alpha[t] else 0)
            for t, c in cuts.items()}))
    if 2 * alpha <= len(net.edges):
        rows.append(("deterministic_threshold", deterministic_threshold(net, alpha)))
        rows.append(("deterministic_q", required_field_order(net, alpha, "deterministic")))
        delta = Fraction(str(args.delta))
        rows.append(("delta", float(delta)))
        rows.append(("random_threshold", float(random_threshold(net, alpha, delta))))
        rows.append(("random_q", required_field_order(net, alpha, "random", delta=delta)))
    if args.k is not None and args.k <= n:
        rows.append(("refined_pattern_count", len(refined_patterns(net, args.k))))
        rows.append(("refined_q", required_field_order(net, None, "refined", k=args.k)))
    _emit(args, dump_kv(rows), [f"{k}: {v}" for k, v in rows])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netecc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--network", required=True, help="network file or bundled fixture name")
        sp.add_argument("--format", choices=("text", "kv"), default="text")

    c = sub.add_parser("construct", help="build a network error-correcting code")
    common(c)
    c.add_argument("--mode", choices=("det", "deterministic", "refined", "random"), default="det")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--alpha", type=int)
    c.add_argument("--q", default="auto")
    c.add_argument("--unsafe-q", action="store_true", help="allow q below the sufficient bound")
    c.add_argument("--delta", type=float, default=0.5, help="failure bound used by --q auto in random mode")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="write the code file here instead of stdout")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="audit a code file")
    common(v)
    v.add_argument("--code", required=True)
    g = v.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=int)
    g.add_argument("--refined", action="store_true")
    g.add_argument("--known-erasures", action="append", metavar="IDS")
    g.add_argument("--known-failures", action="append", metavar="IDS")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="inject errors and decode at every sink")
    common(s)
    s.add_argument("--code", required=True)
    s.add_argument("--message", required=True, help="comma-separated message symbols")
    s.add_argument("--errors", help="comma-separated edge:value pairs")
    s.add_argument("--random-weight", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--decoder", choices=("exhaustive", "erasure", "pattern"), default="exhaustive")
    s.add_argument("--alpha", type=int)
    s.add_argument("--pattern", help="known error locations for the erasure decoder")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="Monte Carlo over random constructions")
    common(e)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--alpha", type=int, required=True)
    e.add_argument("--q", default="auto")
    e.add_argument("--delta", type=float, default=0.5)
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bounds", help="Singleton bounds and field-size thresholds")
    common(b)
    b.add_argument("--alpha", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--q")
    b.add_argument("--delta", type=float, default=0.5)
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FileNotFoundError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
