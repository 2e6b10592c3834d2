"""Channel simulation with edge errors, and the three sink decoders."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping, Sequence

from netecc import kernels
from netecc.code import NetworkCode, global_table, sink_matrices
from netecc.errors import CodeDefectError, DecompositionError
from netecc.field import Unsolvable, decompose, mat_vec, rank, solve, solve_affine, transpose, vec_add
from netecc.graph import Network, cached_augment, validate_pattern


@dataclass(frozen=True)
class ErrorVector:
    """Error values indexed by the network's edge order."""

    entries: tuple[int, ...]
    edge_ids: tuple[int, ...]

    @classmethod
    def zero(cls, net: Network) -> "ErrorVector":
        return cls((0,) * len(net.edges), net.edge_ids)

    @classmethod
    def from_edges(cls, net: Network, values: Mapping[int, int], q: int) -> "ErrorVector":
        entries = [0] * len(net.edges)
        for eid, v in values.items():
            entries[net.edge_index(eid)] = v % q
        return cls(tuple(entries), net.edge_ids)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(e for e, v in zip(self.edge_ids, self.entries) if v)

    @property
    def weight(self) -> int:
        return sum(1 for v in self.entries if v)

    def as_dict(self) -> dict[int, int]:
        return {e: v for e, v in zip(self.edge_ids, self.entries) if v}


@dataclass(frozen=True)
class Observation:
    sink: str
    symbols: tuple[int, ...]


@dataclass
class DecodeResult:
    verdict: str  # "decoded" | "ambiguous" | "no-candidate"
    message: tuple[int, ...] | None
    examined: int
    candidates: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict == "decoded"


def _result(found, examined) -> DecodeResult:
    if not found:
        return DecodeResult("no-candidate", None, examined, [])
    if len(found) > 1:
        return DecodeResult("ambiguous", None, examined, list(found))
    return DecodeResult("decoded", tuple(found[0]), examined, list(found))


def transmit(code: NetworkCode, message: Sequence[int], err: ErrorVector | None = None) -> dict[str, Observation]:
    """Received symbols at every sink; downstream nodes forward corrupted values."""
    net, q = code.network, code.q
    if len(message) != code.k:
        raise ValueError(f"message length {len(message)} != k = {code.k}")
    err = err or ErrorVector.zero(net)
    if len(err.entries) != len(net.edges):
        raise ValueError("error vector length does not match the edge count")
    y = {}
    for eid in net.edge_order:
        coeffs = code.coefficients(eid)
        if net.edge(eid).tail == net.source:
            s = sum(c * message[j] for j, c in coeffs.items())
        else:
            s = sum(c * y[p] for p, c in coeffs.items())
        y[eid] = (s + err.entries[net.edge_index(eid)]) % q
    return {
        t: Observation(t, tuple(y[e.id] for e in sorted(net.in_edges(t), key=lambda e: e.id)))
        for t in net.sinks
    }


def decode_exhaustive(code: NetworkCode, sink: str, obs: Observation, alpha: int) -> DecodeResult:
    """Try every message against every error of weight <= alpha."""
    msg_rows, err_rows = sink_matrices(code, sink)
    found, examined = kernels.exhaustive_search(
        msg_rows, err_rows, obs.symbols, code.k, len(code.network.edges), alpha, code.q
    )
    return _result(found, examined)


def decode_erasure(code: NetworkCode, sink: str, obs: Observation, pattern) -> DecodeResult:
    """Known error locations: split the observation into message and error parts."""
    net, k, q = code.network, code.k, code.q
    pattern = validate_pattern(net, pattern)
    aug = cached_augment(net, pattern, k)
    table = global_table(code, pattern).vectors
    rows = [table[aug.arrival(e.id)] for e in sorted(net.in_edges(sink), key=lambda e: e.id)]
    msg_rows = [r[:k] for r in rows]
    if rank(msg_rows, q, k) != k:
        raise CodeDefectError(f"message map at {sink} has rank below k = {k}")
    msg_cols = transpose(msg_rows, k)
    err_cols = transpose([r[k:] for r in rows], len(pattern))
    try:
        u, _ = decompose(obs.symbols, msg_cols, err_cols, q)
    except DecompositionError as exc:
        if "intersect" in str(exc):
            raise CodeDefectError(f"message and error images intersect at {sink}") from exc
        return DecodeResult("no-candidate", None, 1)
    x = solve(msg_rows, u, q, k)
    assert not isinstance(x, Unsolvable)
    return DecodeResult("decoded", x, 1, [x])


def decode_pattern_search(code: NetworkCode, sink: str, obs: Observation, alpha: int) -> DecodeResult:
    """Solve the erasure system for every pattern of size 2*alpha.

    Each pattern's affine solution set is enumerated and filtered to error
    weight <= alpha, so the accepted (message, error) pairs are exactly those
    the exhaustive decoder accepts. ``examined`` counts erasure attempts.
    """
    net, k, q = code.network, code.k, code.q
    msg_rows, err_rows = sink_matrices(code, sink)
    size = min(2 * alpha, len(net.edges))
    found, seen = [], set()
    examined = 0
    for cols in combinations(range(len(net.edges)), size):
        a = [m + tuple(r[c] for c in cols) for m, r in zip(msg_rows, err_rows)]
        examined += 1
        sol = solve_affine(a, obs.symbols, q, k + size)
        if sol is None:
            continue
        x0, kernel = sol
        for coeffs in product(range(q), repeat=len(kernel)):
            x = list(x0)
            for c, v in zip(coeffs, kernel):
                if c:
                    x = [(a_ + c * b) % q for a_, b in zip(x, v)]
            msg, e_vals = tuple(x[:k]), x[k:]
            if sum(1 for v in e_vals if v) > alpha:
                continue
            # re-encode the candidate before accepting it
            err_full = [0] * len(net.edges)
            for c, v in zip(cols, e_vals):
                err_full[c] = v
            again = vec_add(mat_vec(msg_rows, msg, q), mat_vec(err_rows, err_full, q), q)
            if again != tuple(obs.symbols):
                continue
            if msg not in seen:
                seen.add(msg)
                found.append(msg)
    return _result(found, examined)
