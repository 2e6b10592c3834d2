"""Network codes: representation, file format, global vectors, construction."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable

from netecc import kernels
from netecc.errors import ConstructionError, InfeasibleError, InsufficientCapacity, ParseError
from netecc.field import (
    FieldSpec,
    combine,
    is_independent,
    next_prime,
    rank,
    reduce_against,
    rref,
    unit,
    vec_add,
)
from netecc.graph import AugmentedNetwork, FlowPlan, Network, cached_augment, cached_plan
from netecc.report import KVRecord


@dataclass(eq=True)
class NetworkCode:
    """Local encoding coefficients for every real edge.

    ``locals[e]`` maps a predecessor edge id (an in-edge of ``e``'s tail) to
    its coefficient; ``source_locals[e]`` does the same for edges leaving the
    source, keyed by message coordinate. Missing entries are zero.
    """

    field: FieldSpec
    k: int
    network: Network
    locals: dict[int, dict[int, int]] = dc_field(default_factory=dict)
    source_locals: dict[int, dict[int, int]] = dc_field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.q

    def coefficients(self, eid: int) -> dict[int, int]:
        if self.network.edge(eid).tail == self.network.source:
            return self.source_locals.get(eid, {})
        return self.locals.get(eid, {})

    def set_coefficients(self, eid: int, coeffs: dict[int, int]) -> None:
        target = self.source_locals if self.network.edge(eid).tail == self.network.source else self.locals
        nz = {p: c % self.q for p, c in coeffs.items() if c % self.q}
        if nz:
            target[eid] = nz
        else:
            target.pop(eid, None)


def format_code(code: NetworkCode) -> str:
    lines = [f"netcode q={code.q} k={code.k}"]
    for e in code.network.edges:
        coeffs = code.coefficients(e.id)
        body = " ".join(f"{p}:{c}" for p, c in sorted(coeffs.items()))
        kw = "source_local" if e.tail == code.network.source else "local"
        lines.append(f"{kw} {e.id} {body}".rstrip())
    return "\n".join(lines) + "\n"


def parse_code(text: str, network: Network) -> NetworkCode:
    code = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if code is None:
            if parts[0] != "netcode":
                raise ParseError("expected 'netcode q=<q> k=<k>' header", lineno)
            try:
                opts = dict(p.split("=", 1) for p in parts[1:])
                field, k = FieldSpec(int(opts["q"])), int(opts["k"])
            except (KeyError, ValueError) as exc:
                raise ParseError(f"bad header: {exc}", lineno) from None
            if k < 1:
                raise ParseError("k must be positive", lineno)
            code = NetworkCode(field, k, network)
            continue
        kw = parts[0]
        if kw not in ("local", "source_local") or len(parts) < 2:
            raise ParseError(f"unexpected line {line!r}", lineno)
        try:
            eid = int(parts[1])
            edge = network.edge(eid)
        except (ValueError, KeyError):
            raise ParseError(f"unknown edge {parts[1]!r}", lineno) from None
        if eid in seen:
            raise ParseError(f"edge {eid} listed twice", lineno)
        seen.add(eid)
        from_source = edge.tail == network.source
        if from_source != (kw == "source_local"):
            raise ParseError(f"edge {eid} needs a {'source_local' if from_source else 'local'} line", lineno)
        valid = range(code.k) if from_source else {p.id for p in network.in_edges(edge.tail)}
        coeffs = {}
        for item in parts[2:]:
            try:
                p, c = (int(x) for x in item.split(":"))
            except ValueError:
                raise ParseError(f"bad coefficient {item!r}", lineno) from None
            if p not in valid:
                raise ParseError(f"{p} is not a valid predecessor of edge {eid}", lineno)
            if not 0 <= c < code.q:
                raise ParseError(f"coefficient {c} is not a residue mod {code.q}", lineno)
            coeffs[p] = c
        code.set_coefficients(eid, coeffs)
    if code is None:
        raise ParseError("empty code file")
    return code


def load_code(path: str | Path, network: Network) -> NetworkCode:
    return parse_code(Path(path).read_text(), network)


# --- global vectors -----------------------------------------------------------


@dataclass
class GlobalTable:
    pattern: tuple[int, ...]
    vectors: dict[int, tuple[int, ...]]


def _predecessor_arrival(aug: AugmentedNetwork, tail_is_source: bool, key: int) -> int:
    return aug.source_edges[key] if tail_is_source else aug.arrival(key)


def global_table(code: NetworkCode, pattern: Iterable[int]) -> GlobalTable:
    """Global vectors (message coords, then one coord per pattern edge) on G_F."""
    net, k, q = code.network, code.k, code.q
    aug = cached_augment(net, tuple(sorted(pattern)), k)
    length = k + len(aug.pattern)
    vec = {}
    for j, eid in enumerate(aug.source_edges):
        vec[eid] = unit(j, length)
    for j, (_, s) in enumerate(aug.splits):
        vec[s.imaginary] = unit(k + j, length)
    for eid in net.edge_order:
        from_source = net.edge(eid).tail == net.source
        coeffs = code.coefficients(eid)
        preds = [vec[_predecessor_arrival(aug, from_source, p)] for p in coeffs]
        b = combine(list(coeffs.values()), preds, length, q)
        s = aug.split_map.get(eid)
        if s is None:
            vec[eid] = b
        else:
            vec[s.in_half] = b
            vec[s.out_half] = vec_add(b, vec[s.imaginary], q)
    return GlobalTable(aug.pattern, vec)


def edge_transfer(code: NetworkCode) -> dict[int, tuple[int, ...]]:
    """Per real edge, the received symbol as a linear form in (message, all edge errors).

    Forms have length ``k + |E|``; error coordinates follow the edge order.
    """
    net, k, q = code.network, code.k, code.q
    length = k + len(net.edges)
    vec = {}
    for eid in net.edge_order:
        from_source = net.edge(eid).tail == net.source
        coeffs = code.coefficients(eid)
        if from_source:
            preds = [unit(p, length) for p in coeffs]
        else:
            preds = [vec[p] for p in coeffs]
        b = combine(list(coeffs.values()), preds, length, q)
        vec[eid] = vec_add(b, unit(k + net.edge_index(eid), length), q)
    return vec


def sink_matrices(code: NetworkCode, sink: str):
    """``(message_rows, error_rows)`` of the sink's observation map."""
    forms = edge_transfer(code)
    k = code.k
    rows = [forms[e.id] for e in sorted(code.network.in_edges(sink), key=lambda e: e.id)]
    return [r[:k] for r in rows], [r[k:] for r in rows]


# --- bounds -----------------------------------------------------------------


def singleton_max_messages(n: int, alpha: int, q: int) -> int:
    if alpha < 0 or n < 2 * alpha:
        raise ValueError(f"need n >= 2*alpha >= 0, got n={n}, alpha={alpha}")
    if q < 2:
        raise ValueError("q must be at least 2")
    return q ** (n - 2 * alpha)


def refined_singleton_max_messages(n_t: int, alpha_t: int, q: int) -> int:
    return singleton_max_messages(n_t, alpha_t, q)


def enumerate_patterns(net: Network, size: int) -> list[tuple[int, ...]]:
    if not 0 <= size <= len(net.edges):
        raise ValueError(f"pattern size {size} outside [0, {len(net.edges)}]")
    return list(combinations(net.edge_ids, size))


def refined_patterns(net: Network, k: int) -> list[tuple[int, ...]]:
    """Union over sinks of the patterns of size ``n_t - k``."""
    sizes = sorted({c - k for c in net.min_cut_to_sinks().values() if 0 <= c - k <= len(net.edges)})
    return [F for s in sizes for F in enumerate_patterns(net, s)]


def deterministic_threshold(net: Network, alpha: int) -> int:
    return len(net.sinks) * math.comb(len(net.edges), 2 * alpha)


def random_threshold(net: Network, alpha: int, delta) -> Fraction:
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return len(net.edges) * len(net.sinks) * math.comb(len(net.edges), 2 * alpha) / delta


def required_field_order(net: Network, alpha: int | None, mode: str = "deterministic", delta=None, k: int | None = None) -> int:
    """Smallest prime meeting the field-size condition of a construction mode."""
    if mode == "deterministic":
        return next_prime(deterministic_threshold(net, alpha), strict=True)
    if mode == "random":
        if delta is None:
            raise ValueError("random mode needs delta")
        return next_prime(math.ceil(random_threshold(net, alpha, delta)), strict=False)
    if mode == "refined":
        if k is None:
            raise ValueError("refined mode needs k")
        return next_prime(len(net.sinks) * len(refined_patterns(net, k)), strict=True)
    raise ValueError(f"unknown mode {mode!r}")


# --- construction ------------------------------------------------------------


@dataclass
class ConstructionReport(KVRecord):
    mode: str
    q: int
    k: int
    alpha: int | None
    n: int
    n_t: dict[str, int]
    sink_alpha: dict[str, int]
    alpha_max: int
    pattern_count: int
    tracker_count: int
    m_table: dict[str, int]
    excluded: list[str]
    skipped_pairs: int
    success: bool
    candidates_examined: int = 0
    failures: list[str] = dc_field(default_factory=list)
    seed: int | None = None
    elapsed: float = 0.0

    def m(self, sink: str, pattern: Iterable[int]) -> int:
        return self.m_table[pair_key(sink, pattern)]


def pair_key(sink: str, pattern: Iterable[int]) -> str:
    return f"{sink}|{','.join(str(e) for e in sorted(pattern))}"


class BasisTracker:
    """Frontier edges (one per plan path) and their global vectors."""

    def __init__(self, plan: FlowPlan, aug: AugmentedNetwork, vectors: dict):
        self.plan = plan
        self.aug = aug
        self.vectors = vectors
        self.frontier = [p[0] for p in plan.paths]
        self._slot = {}
        for i, p in enumerate(plan.paths):
            for e in p:
                self._slot[e] = i

    @property
    def sink(self):
        return self.plan.sink

    @property
    def pattern(self):
        return self.plan.pattern

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return [self.vectors[e] for e in self.frontier]

    def advance(self, edge: int) -> None:
        slot = self._slot[edge]
        assert self.frontier[slot] == self.plan.predecessor[edge]
        self.frontier[slot] = edge

    def others(self, pred: int) -> list[tuple[int, ...]]:
        return [self.vectors[e] for e in self.frontier if e != pred]


def _greedy(net: Network, k: int, fld: FieldSpec, plans: list[FlowPlan], patterns: list[tuple[int, ...]]):
    """Choose one coefficient map per real edge keeping every tracked basis independent."""
    q = fld.q
    augs = {F: cached_augment(net, F, k) for F in patterns}
    vectors = {}
    for F, aug in augs.items():
        length = k + len(F)
        vec = {eid: unit(j, length) for j, eid in enumerate(aug.source_edges)}
        for j, (_, s) in enumerate(aug.splits):
            vec[s.imaginary] = unit(k + j, length)
        vectors[F] = vec
    trackers = [BasisTracker(p, augs[p.pattern], vectors[p.pattern]) for p in plans]
    by_pattern = {}
    for t in trackers:
        by_pattern.setdefault(t.pattern, []).append(t)
    code = NetworkCode(fld, k, net)
    examined = 0

    for eid in net.edge_order:
        from_source = net.edge(eid).tail == net.source
        affected = []
        for F, group in by_pattern.items():
            c = augs[F].departure(eid)
            for t in group:
                p = t.plan.predecessor.get(c, -1)
                if p == -1:
                    continue
                key = augs[F].source_edges.index(p) if from_source else augs[F].real_of[p]
                affected.append((t, c, p, key))
        keys = sorted({key for *_, key in affected})
        coeffs = {}
        if keys:
            residuals = []
            for t, c, p, _ in affected:
                echelon, pivots = rref(t.others(p), q, len(t.vectors[p]))
                echelon = echelon[: len(pivots)]
                residuals.append(
                    [reduce_against(t.vectors[_predecessor_arrival(t.aug, from_source, key)], echelon, pivots, q)
                     for key in keys]
                )
            cand, n = kernels.scan_candidates(residuals, len(keys), q)
            examined += n
            if cand is None:
                raise ConstructionError(
                    f"no admissible coefficients for edge {eid} over GF({q}); field too small"
                )
            coeffs = dict(zip(keys, cand))
        code.set_coefficients(eid, coeffs)

        for F, aug in augs.items():
            vec = vectors[F]
            length = k + len(F)
            b = combine(list(coeffs.values()),
                        [vec[_predecessor_arrival(aug, from_source, key)] for key in coeffs], length, q)
            s = aug.split_map.get(eid)
            if s is None:
                vec[eid] = b
            else:
                vec[s.in_half] = b
                vec[s.out_half] = vec_add(b, vec[s.imaginary], q)
        touched = set()
        for t, c, _, _ in affected:
            t.advance(c)
            touched.add(id(t))
        for F, group in by_pattern.items():
            s = augs[F].split_map.get(eid)
            if s is None:
                continue
            for t in group:
                if s.out_half in t.plan.predecessor:
                    t.advance(s.out_half)
                    touched.add(id(t))
        for t in trackers:
            if id(t) in touched and not is_independent(t.basis, q):
                raise AssertionError(f"basis for {pair_key(t.sink, t.pattern)} lost independence at edge {eid}")
    return code, trackers, examined


def _audit(trackers, k, q) -> list[str]:
    bad = []
    for t in trackers:
        basis = t.basis
        if len(basis) != k + t.plan.m or rank(basis, q, len(basis[0])) != len(basis):
            bad.append(pair_key(t.sink, t.pattern))
    return bad


def _check_k(k: int):
    if k < 1:
        raise ValueError("k must be at least 1")


def construct_deterministic(net: Network, k: int, alpha: int, field: FieldSpec):
    """Code protecting every sink against errors on any 2*alpha edges."""
    _check_k(k)
    start = time.perf_counter()
    n = net.n
    if alpha < 0 or k + 2 * alpha > n:
        raise InfeasibleError(f"k + 2*alpha = {k + 2 * alpha} exceeds min-cut n = {n}")
    if 2 * alpha > len(net.edges):
        raise InfeasibleError("2*alpha exceeds the number of edges")
    patterns = enumerate_patterns(net, 2 * alpha)
    plans = []
    for F in patterns:
        for t in net.sinks:
            try:
                plans.append(cached_plan(net, F, k, t))
            except InsufficientCapacity as exc:
                raise ConstructionError(str(exc)) from exc
    code, trackers, examined = _greedy(net, k, field, plans, patterns)
    bad = _audit(trackers, k, field.q)
    cuts = net.min_cut_to_sinks()
    report = ConstructionReport(
        mode="deterministic", q=field.q, k=k, alpha=alpha, n=n, n_t=cuts,
        sink_alpha={t: alpha for t in net.sinks}, alpha_max=alpha,
        pattern_count=len(patterns), tracker_count=len(trackers),
        m_table={pair_key(p.sink, p.pattern): p.m for p in plans},
        excluded=[], skipped_pairs=0, success=not bad, candidates_examined=examined,
        failures=bad, elapsed=time.perf_counter() - start,
    )
    return code, report


def construct_refined(net: Network, k: int, field: FieldSpec):
    """Per-sink tolerance: sink t corrects floor((n_t - k) / 2) errors."""
    _check_k(k)
    start = time.perf_counter()
    cuts = net.min_cut_to_sinks()
    if k > min(cuts.values()):
        raise InfeasibleError(f"k = {k} exceeds the smallest sink min-cut {min(cuts.values())}")
    patterns = refined_patterns(net, k)
    plans, excluded, skipped = [], [], 0
    for F in patterns:
        for t in net.sinks:
            if len(F) > cuts[t] - k:
                skipped += 1
                continue
            try:
                plans.append(cached_plan(net, F, k, t))
            except InsufficientCapacity:
                excluded.append(pair_key(t, F))
    used = sorted({p.pattern for p in plans}, key=lambda F: (len(F), F))
    code, trackers, examined = _greedy(net, k, field, plans, used)
    bad = _audit(trackers, k, field.q)
    report = ConstructionReport(
        mode="refined", q=field.q, k=k, alpha=None, n=min(cuts.values()), n_t=cuts,
        sink_alpha={t: (c - k) // 2 for t, c in cuts.items()},
        alpha_max=(max(cuts.values()) - k) // 2,
        pattern_count=len(patterns), tracker_count=len(trackers),
        m_table={pair_key(p.sink, p.pattern): p.m for p in plans},
        excluded=excluded, skipped_pairs=skipped, success=not bad,
        candidates_examined=examined, failures=bad, elapsed=time.perf_counter() - start,
    )
    return code, report


def random_code(net: Network, k: int, field: FieldSpec, seed: int) -> NetworkCode:
    """Every local coefficient drawn uniformly and independently from GF(q)."""
    rng = random.Random(seed)
    code = NetworkCode(field, k, net)
    for e in net.edges:
        if e.tail == net.source:
            keys = range(k)
        else:
            keys = [p.id for p in net.in_edges(e.tail)]
        code.set_coefficients(e.id, {p: rng.randrange(field.q) for p in keys})
    return code


def construct_random(net: Network, k: int, alpha: int, field: FieldSpec, seed: int):
    from netecc.verify import verify_code

    _check_k(k)
    start = time.perf_counter()
    n = net.n
    if alpha < 0 or k + 2 * alpha > n:
        raise InfeasibleError(f"k + 2*alpha = {k + 2 * alpha} exceeds min-cut n = {n}")
    code = random_code(net, k, field, seed)
    verdict = verify_code(code, alpha)
    report = ConstructionReport(
        mode="random", q=field.q, k=k, alpha=alpha, n=n, n_t=net.min_cut_to_sinks(),
        sink_alpha={t: alpha for t in net.sinks}, alpha_max=alpha,
        pattern_count=len(enumerate_patterns(net, 2 * alpha)),
        tracker_count=len(verdict.checks),
        m_table={pair_key(c.sink, c.pattern): c.m for c in verdict.checks},
        excluded=[], skipped_pairs=0, success=verdict.passed,
        failures=[pair_key(c.sink, c.pattern) for c in verdict.failures],
        seed=seed, elapsed=time.perf_counter() - start,
    )
    return code, report
