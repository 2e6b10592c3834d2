"""Acyclic multigraph model, network file format and flow machinery.

Edges carry explicit integer ids; ascending id is the total order on E
used everywhere (error vectors, code files, pattern enumeration). Node
ties in topological order are broken by declaration order.
"""

from __future__ import annotations

import heapq
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from netecc.errors import InsufficientCapacity, ParseError

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")

IMAGINARY_SOURCE = "~s"


class Edge(NamedTuple):
    id: int
    tail: str
    head: str


Path_ = tuple[int, ...]


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    source: str
    sinks: tuple[str, ...]

    @classmethod
    def build(cls, nodes, edges, source, sinks) -> "Network":
        """Validate and build a network from plain Python values."""
        nodes = tuple(nodes)
        edges = tuple(sorted((Edge(int(i), t, h) for i, t, h in edges), key=lambda e: e.id))
        net = cls(nodes, edges, source, tuple(sinks))
        net.validate()
        return net

    def validate(self, lines: dict | None = None) -> None:
        lines = lines or {}
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ParseError("duplicate node declaration")
        if self.source is None:
            raise ParseError("missing source")
        if not self.sinks:
            raise ParseError("missing sink")
        for name in (self.source, *self.sinks):
            if name not in known:
                raise ParseError(f"unknown node {name!r}", lines.get(("node", name)))
        if self.source in self.sinks:
            raise ParseError("source cannot also be a sink")
        if len(set(self.sinks)) != len(self.sinks):
            raise ParseError("duplicate sink")
        ids = set()
        for e in self.edges:
            where = lines.get(("edge", e.id))
            if e.id < 0:
                raise ParseError(f"negative edge id {e.id}", where)
            if e.id in ids:
                raise ParseError(f"duplicate edge id {e.id}", where)
            ids.add(e.id)
            for end in (e.tail, e.head):
                if end not in known:
                    raise ParseError(f"unknown node {end!r} in edge {e.id}", where)
            if e.head == self.source:
                raise ParseError(f"edge {e.id} enters the source", where)
        order = topological_order(self)
        if len(order) != len(self.nodes):
            stuck = known - set(order)
            inner = [e.id for e in self.edges if e.tail in stuck and e.head in stuck]
            # blame the last-declared edge among the unsorted nodes
            where = max((lines[("edge", i)] for i in inner if ("edge", i) in lines), default=None)
            raise ParseError("network contains a cycle", where)
        reach = self._reachable(self.source)
        for t in self.sinks:
            if t not in reach:
                raise ParseError(f"sink {t!r} unreachable from source")

    def _reachable(self, start):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for e in self.out_edges(v):
                if e.head not in seen:
                    seen.add(e.head)
                    stack.append(e.head)
        return seen

    @cached_property
    def _out(self):
        out = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.tail].append(e)
        return out

    @cached_property
    def _in(self):
        inc = {v: [] for v in self.nodes}
        for e in self.edges:
            inc[e.head].append(e)
        return inc

    @cached_property
    def _by_id(self):
        return {e.id: e for e in self.edges}

    @cached_property
    def _position(self):
        return {e.id: i for i, e in enumerate(self.edges)}

    def out_edges(self, v: str) -> list[Edge]:
        return self._out.get(v, [])

    def in_edges(self, v: str) -> list[Edge]:
        return self._in.get(v, [])

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    def edge_index(self, eid: int) -> int:
        """Position of an edge in the total order (error-vector index)."""
        return self._position[eid]

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    def edges_between(self, tail: str, head: str) -> list[int]:
        return [e.id for e in self.out_edges(tail) if e.head == head]

    @cached_property
    def edge_order(self) -> tuple[int, ...]:
        """Edge ids sorted by (topological position of tail, id)."""
        pos = {v: i for i, v in enumerate(topological_order(self))}
        return tuple(e.id for e in sorted(self.edges, key=lambda e: (pos[e.tail], e.id)))

    def min_cut_to_sinks(self) -> dict[str, int]:
        return {t: min_cut(self, self.source, t) for t in self.sinks}

    @cached_property
    def n(self) -> int:
        """Smallest min-cut from the source to any sink."""
        return min(self.min_cut_to_sinks().values())


def parse_network(text: str | Iterable[str]) -> Network:
    """Parse the line-oriented network format."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    nodes, edges, sinks = [], [], []
    source = None
    where = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw, args = parts[0], parts[1:]
        if kw == "node":
            if len(args) != 1 or not _NAME.match(args[0]):
                raise ParseError("expected 'node <name>'", lineno)
            if args[0] in where.get("names", set()):
                raise ParseError(f"duplicate node {args[0]!r}", lineno)
            where.setdefault("names", set()).add(args[0])
            nodes.append(args[0])
        elif kw == "edge":
            if len(args) != 3:
                raise ParseError("expected 'edge <id> <tail> <head>'", lineno)
            try:
                eid = int(args[0])
            except ValueError:
                raise ParseError(f"edge id must be an integer, got {args[0]!r}", lineno) from None
            if eid < 0:
                raise ParseError(f"negative edge id {eid}", lineno)
            if ("edge", eid) in where:
                raise ParseError(f"duplicate edge id {eid}", lineno)
            where[("edge", eid)] = lineno
            edges.append((eid, args[1], args[2]))
        elif kw == "source":
            if len(args) != 1:
                raise ParseError("expected 'source <name>'", lineno)
            if source is not None:
                raise ParseError("more than one source", lineno)
            source = args[0]
            where[("node", source)] = lineno
        elif kw == "sink":
            if len(args) != 1:
                raise ParseError("expected 'sink <name>'", lineno)
            sinks.append(args[0])
            where[("node", args[0])] = lineno
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
    where.pop("names", None)
    edges = tuple(sorted((Edge(*e) for e in edges), key=lambda e: e.id))
    net = Network(tuple(nodes), edges, source, tuple(sinks))
    net.validate(where)
    return net


def load_network(path: str | Path) -> Network:
    return parse_network(Path(path).read_text())


def format_network(net: Network) -> str:
    out = [f"node {v}" for v in net.nodes]
    out.append(f"source {net.source}")
    out.extend(f"sink {t}" for t in net.sinks)
    out.extend(f"edge {e.id} {e.tail} {e.head}" for e in net.edges)
    return "\n".join(out) + "\n"


def topological_order(net) -> list[str]:
    """Kahn's algorithm; ties go to the earliest-declared node.

    On a cyclic graph the returned list is shorter than the node list.
    """
    rank = {v: i for i, v in enumerate(net.nodes)}
    indeg = {v: 0 for v in net.nodes}
    out = {v: [] for v in net.nodes}
    for e in net.edges:
        if e.tail in indeg and e.head in indeg:
            indeg[e.head] += 1
            out[e.tail].append(e.head)
    heap = [rank[v] for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = net.nodes[heapq.heappop(heap)]
        order.append(v)
        for h in out[v]:
            indeg[h] -= 1
            if indeg[h] == 0:
                heapq.heappush(heap, rank[h])
    return order


# --- unit-capacity max flow ------------------------------------------------


class _UnitFlow:
    """Edmonds-Karp on unit capacities with a deterministic path decomposition.

    Residual arcs are scanned forward-first in ascending edge id, so results
    depend only on the edge list. Successive ``augment`` calls keep the
    existing flow and search its residual graph, which may reroute earlier
    paths without reducing their number.
    """

    def __init__(self, edges: Sequence[Edge], src: str, dst: str, forbidden=frozenset()):
        self.src, self.dst = src, dst
        self.out, self.inc = {}, {}
        for e in sorted(edges, key=lambda e: e.id):
            if e.id in forbidden:
                continue
            self.out.setdefault(e.tail, []).append(e)
            self.inc.setdefault(e.head, []).append(e)
        self.flow = set()
        self.value = 0

    def augment(self, limit=None, first_edges=None) -> int:
        """Add augmenting paths; ``first_edges`` restricts the arcs leaving src."""
        src, dst = self.src, self.dst
        added = 0
        while (limit is None or added < limit) and src != dst:
            parent = {src: None}
            queue = deque([src])
            while queue and dst not in parent:
                v = queue.popleft()
                for e in self.out.get(v, ()):
                    if v == src and first_edges is not None and e.id not in first_edges:
                        continue
                    if e.id not in self.flow and e.head not in parent:
                        parent[e.head] = (e, +1)
                        queue.append(e.head)
                for e in self.inc.get(v, ()):
                    if e.id in self.flow and e.tail not in parent:
                        parent[e.tail] = (e, -1)
                        queue.append(e.tail)
            if dst not in parent:
                break
            v = dst
            while parent[v] is not None:
                e, d = parent[v]
                if d > 0:
                    self.flow.add(e.id)
                    v = e.tail
                else:
                    self.flow.discard(e.id)
                    v = e.head
            added += 1
        self.value += added
        return added

    def paths(self) -> list[Path_]:
        used = set()
        paths = []
        for _ in range(self.value):
            v, path = self.src, []
            while v != self.dst:
                e = next(e for e in self.out[v] if e.id in self.flow and e.id not in used)
                used.add(e.id)
                path.append(e.id)
                v = e.head
            paths.append(tuple(path))
        return paths


def _disjoint_paths(edges: Sequence[Edge], src: str, dst: str, limit=None, forbidden=frozenset()):
    flow = _UnitFlow(edges, src, dst, forbidden)
    flow.augment(limit)
    return flow.paths()


def min_cut(net, frm: str, to: str) -> int:
    return len(_disjoint_paths(net.edges, frm, to))


def edge_disjoint_paths(net, frm: str, to: str, count: int, forbidden=()) -> list[Path_]:
    paths = _disjoint_paths(net.edges, frm, to, count, frozenset(forbidden))
    if len(paths) < count:
        raise InsufficientCapacity(
            f"only {len(paths)} edge-disjoint paths from {frm} to {to}, {count} requested"
        )
    return paths


def path_nodes(net, path: Sequence[int]) -> list[str]:
    """Node sequence visited by an edge-id path."""
    by_id = {e.id: e for e in net.edges}
    if not path:
        return []
    return [by_id[path[0]].tail] + [by_id[i].head for i in path]


# --- augmentation ------------------------------------------------------------


def validate_pattern(net: Network, edges: Iterable[int]) -> tuple[int, ...]:
    """Canonical error pattern: sorted, duplicate-free, existing edge ids."""
    edges = list(edges)
    pattern = tuple(sorted(set(edges)))
    if len(pattern) != len(edges):
        raise ValueError("error pattern contains duplicate edges")
    for e in pattern:
        if e not in net._by_id:
            raise ValueError(f"error pattern names unknown edge {e}")
    return pattern


class Split(NamedTuple):
    in_half: int
    node: str
    out_half: int
    imaginary: int


@dataclass(frozen=True)
class AugmentedNetwork:
    base: Network
    pattern: tuple[int, ...]
    k: int
    source_edges: tuple[int, ...]
    splits: tuple[tuple[int, Split], ...]
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    imaginary_source: str = IMAGINARY_SOURCE

    @cached_property
    def split_map(self) -> dict[int, Split]:
        return dict(self.splits)

    @cached_property
    def imaginary_edges(self) -> tuple[int, ...]:
        return tuple(s.imaginary for _, s in self.splits)

    def arrival(self, eid: int) -> int:
        """Augmented edge delivering real edge ``eid``'s symbol to its head."""
        s = self.split_map.get(eid)
        return s.out_half if s else eid

    def departure(self, eid: int) -> int:
        """Augmented edge whose coefficients are chosen at ``eid``'s tail."""
        s = self.split_map.get(eid)
        return s.in_half if s else eid

    @cached_property
    def real_of(self) -> dict[int, int]:
        """Augmented id -> original edge id for real edges and their halves."""
        out = {e.id: e.id for e in self.base.edges if e.id not in self.split_map}
        for eid, s in self.splits:
            out[s.in_half] = eid
            out[s.out_half] = eid
        return out


def augment(net: Network, pattern: Iterable[int], k: int) -> AugmentedNetwork:
    """Add the imaginary source, its k source edges, and one imaginary node per pattern edge."""
    if k < 1:
        raise ValueError("k must be at least 1")
    pattern = validate_pattern(net, pattern)
    next_id = max(net.edge_ids, default=-1) + 1
    s_prime = IMAGINARY_SOURCE
    source_edges = tuple(range(next_id, next_id + k))
    next_id += k
    new_edges = [Edge(i, s_prime, net.source) for i in source_edges]
    splits = []
    nodes = list(net.nodes) + [s_prime]
    for eid in pattern:
        e = net.edge(eid)
        v = f"~v{eid}"
        s = Split(next_id, v, next_id + 1, next_id + 2)
        next_id += 3
        nodes.append(v)
        new_edges += [Edge(s.in_half, e.tail, v), Edge(s.out_half, v, e.head), Edge(s.imaginary, s_prime, v)]
        splits.append((eid, s))
    kept = [e for e in net.edges if e.id not in set(pattern)]
    edges = tuple(sorted(kept + new_edges, key=lambda e: e.id))
    return AugmentedNetwork(net, pattern, k, source_edges, tuple(splits), tuple(nodes), edges)


def strip(aug: AugmentedNetwork) -> Network:
    """Drop every added node/edge and re-merge split edges."""
    by_id = {e.id: e for e in aug.edges}
    imaginary = {aug.imaginary_source} | {s.node for _, s in aug.splits}
    edges = [e for e in aug.edges if e.tail not in imaginary and e.head not in imaginary]
    for eid, s in aug.splits:
        edges.append(Edge(eid, by_id[s.in_half].tail, by_id[s.out_half].head))
    nodes = tuple(v for v in aug.nodes if v not in imaginary)
    return Network(nodes, tuple(sorted(edges, key=lambda e: e.id)), aug.base.source, aug.base.sinks)


# --- flow plans ------------------------------------------------------------


@dataclass(frozen=True)
class FlowPlan:
    sink: str
    pattern: tuple[int, ...]
    imaginary_paths: tuple[Path_, ...]
    message_paths: tuple[Path_, ...]
    predecessor: dict = field(compare=False, hash=False)

    @property
    def m(self) -> int:
        return len(self.imaginary_paths)

    @property
    def paths(self) -> tuple[Path_, ...]:
        return self.message_paths + self.imaginary_paths

    @property
    def edges(self) -> frozenset:
        return frozenset(e for p in self.paths for e in p)

    @property
    def final_edges(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.paths)


def imaginary_paths(aug: AugmentedNetwork, sink: str) -> list[Path_]:
    """Maximum family of disjoint paths leaving the imaginary source via imaginary edges."""
    return _disjoint_paths(aug.edges, aug.imaginary_source, sink, None, frozenset(aug.source_edges))


def build_flow_plan(aug: AugmentedNetwork, sink: str) -> FlowPlan:
    """Imaginary-edge paths first (as many as possible), then k message paths.

    The message phase augments the residual graph of the imaginary-path
    flow, so imaginary paths may be rerouted; their number stays maximal
    because augmenting paths never cancel flow on arcs leaving the source.
    """
    flow = _UnitFlow(aug.edges, aug.imaginary_source, sink)
    m = flow.augment(first_edges=frozenset(aug.imaginary_edges))
    got = flow.augment(aug.k, first_edges=frozenset(aug.source_edges))
    if got < aug.k:
        raise InsufficientCapacity(
            f"insufficient residual capacity: {got} of {aug.k} message paths "
            f"to {sink} for pattern {list(aug.pattern)}"
        )
    source_edges = set(aug.source_edges)
    paths = flow.paths()
    msg = [p for p in paths if p[0] in source_edges]
    imag = [p for p in paths if p[0] not in source_edges]
    assert len(imag) == m
    pred = {}
    for p in paths:
        pred[p[0]] = None
        for a, b in zip(p, p[1:]):
            pred[b] = a
    return FlowPlan(sink, aug.pattern, tuple(imag), tuple(msg), pred)


@lru_cache(maxsize=1 << 16)
def cached_augment(net: Network, pattern: tuple[int, ...], k: int) -> AugmentedNetwork:
    return augment(net, pattern, k)


@lru_cache(maxsize=1 << 16)
def cached_plan(net: Network, pattern: tuple[int, ...], k: int, sink: str) -> FlowPlan:
    return build_flow_plan(cached_augment(net, pattern, k), sink)


def on_path_sinks(plans: Iterable[FlowPlan]) -> dict[int, set[str]]:
    """Edge -> sinks whose plan (for one pattern) uses it."""
    out: dict[int, set[str]] = {}
    for plan in plans:
        for e in plan.edges:
            out.setdefault(e, set()).add(plan.sink)
    return out


def predecessor_sets(plans: Iterable[FlowPlan]) -> dict[int, set[int]]:
    """Edge -> predecessor edges over every plan path containing it."""
    out: dict[int, set[int]] = {}
    for plan in plans:
        for e, p in plan.predecessor.items():
            if p is not None:
                out.setdefault(e, set()).add(p)
    return out
