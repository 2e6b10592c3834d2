"""Post-hoc audit of a network code against a tolerance specification.

For each (sink, pattern) pair the sink's observation space splits into the
message image V2 and the error image V3 of the pattern. The code handles
errors confined to the pattern iff dim V2 = k and V2 and V3 meet only in
zero; the audit additionally checks dim V3 against the imaginary-path count
m and that the final basis on the plan paths is independent.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

from netecc.code import NetworkCode, enumerate_patterns, global_table, pair_key
from netecc.errors import InsufficientCapacity
from netecc.field import combine, rank, unit
from netecc.graph import cached_augment, cached_plan, imaginary_paths, validate_pattern
from netecc.report import dump_kv


@dataclass
class TrackerCheck:
    sink: str
    pattern: tuple[int, ...]
    kind: str
    m: int | None
    dim_v2: int
    dim_v3: int | None
    dim_sum: int | None
    basis_independent: bool | None
    passed: bool
    decodable: bool
    reason: str = ""


@dataclass
class VerificationReport:
    k: int
    q: int
    checks: list[TrackerCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[TrackerCheck]:
        return [c for c in self.checks if not c.passed]

    def to_kv(self) -> str:
        rows = [("passed", self.passed), ("k", self.k), ("q", self.q),
                ("checked", len(self.checks)), ("failed", len(self.failures))]
        rows += [(f"check.{pair_key(c.sink, c.pattern)}",
                  {k: v for k, v in asdict(c).items() if k not in ("sink", "pattern")})
                 for c in self.checks]
        return dump_kv(rows)


def _dimension_check(code: NetworkCode, sink: str, pattern: tuple[int, ...]) -> TrackerCheck:
    net, k, q = code.network, code.k, code.q
    aug = cached_augment(net, pattern, k)
    table = global_table(code, pattern).vectors
    length = k + len(pattern)
    rows = [table[aug.arrival(e.id)] for e in sorted(net.in_edges(sink), key=lambda e: e.id)]
    dim_v2 = rank([r[:k] for r in rows], q, k)
    dim_v3 = rank([r[k:] for r in rows], q, len(pattern))
    dim_sum = rank(rows, q, length)
    # message recoverable iff the message map is injective and V2, V3 meet in zero
    decodable = dim_v2 == k and dim_v2 + dim_v3 == dim_sum
    try:
        plan = cached_plan(net, pattern, k, sink)
    except InsufficientCapacity:
        m = len(imaginary_paths(aug, sink))
        return TrackerCheck(sink, pattern, "erasure", m, dim_v2, dim_v3, dim_sum, None, False, decodable,
                            "no k message paths disjoint from the imaginary paths")
    m = plan.m
    basis = [table[e] for e in plan.final_edges]
    independent = rank(basis, q, length) == len(basis)
    reasons = []
    if dim_v2 != k:
        reasons.append(f"dim V2 = {dim_v2} != k = {k}")
    if dim_v3 != m:
        reasons.append(f"dim V3 = {dim_v3} != m = {m}")
    if dim_sum != k + m:
        reasons.append(f"dim(V2+V3) = {dim_sum} != k + m = {k + m}")
    if not independent:
        reasons.append("final basis dependent")
    return TrackerCheck(sink, pattern, "erasure", m, dim_v2, dim_v3, dim_sum, independent,
                        not reasons, decodable, "; ".join(reasons))


def _failure_check(code: NetworkCode, sink: str, pattern: tuple[int, ...]) -> TrackerCheck:
    """Failed edges deliver zero; the sink must still see a rank-k message map."""
    net, k, q = code.network, code.k, code.q
    dead = set(pattern)
    vec = {}
    for eid in net.edge_order:
        if eid in dead:
            vec[eid] = (0,) * k
            continue
        coeffs = code.coefficients(eid)
        if net.edge(eid).tail == net.source:
            preds = [unit(p, k) for p in coeffs]
        else:
            preds = [vec[p] for p in coeffs]
        vec[eid] = combine(list(coeffs.values()), preds, k, q)
    rows = [vec[e.id] for e in net.in_edges(sink)]
    dim_v2 = rank(rows, q, k)
    ok = dim_v2 == k
    return TrackerCheck(sink, pattern, "failure", None, dim_v2, None, None, None, ok, ok,
                        "" if ok else f"message rank {dim_v2} < k = {k} with failed edges")


def verify_code(
    code: NetworkCode,
    alpha: int | None = None,
    *,
    pattern_sizes: Mapping[str, int] | None = None,
    patterns: Iterable[Iterable[int]] | None = None,
    failures: bool = False,
) -> VerificationReport:
    """Audit ``code`` for one tolerance spec.

    Exactly one of: ``alpha`` (every sink, every pattern of size 2*alpha),
    ``pattern_sizes`` (per-sink pattern size, e.g. ``n_t - k`` for refined
    codes) or ``patterns`` (explicit known locations). With ``failures`` the
    explicit patterns are treated as failed edges emitting zero rather than
    as erasures.
    """
    net = code.network
    given = sum(x is not None for x in (alpha, pattern_sizes, patterns))
    if given != 1:
        raise ValueError("give exactly one of alpha, pattern_sizes, patterns")
    if failures and patterns is None:
        raise ValueError("failure checks need explicit patterns")
    if alpha is not None:
        pairs = [(t, F) for F in enumerate_patterns(net, min(2 * alpha, len(net.edges))) for t in net.sinks]
    elif pattern_sizes is not None:
        cache = {}
        pairs = []
        for t in net.sinks:
            size = min(pattern_sizes[t], len(net.edges))
            if size not in cache:
                cache[size] = enumerate_patterns(net, size)
            pairs += [(t, F) for F in cache[size]]
    else:
        canon = [validate_pattern(net, F) for F in patterns]
        pairs = [(t, F) for F in canon for t in net.sinks]
    check = _failure_check if failures else _dimension_check
    return VerificationReport(code.k, code.q, [check(code, t, F) for t, F in pairs])
