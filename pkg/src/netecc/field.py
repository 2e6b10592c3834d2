"""Prime-field arithmetic and exact linear algebra over GF(q).

Vectors are tuples of canonical residues and matrices are sequences of
row tuples. Functions take the field order ``q`` directly; ``FieldSpec``
wraps it with a primality check for the public construction API.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from netecc import kernels
from netecc.errors import DecompositionError

Vector = tuple[int, ...]
Matrix = Sequence[Sequence[int]]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int, *, strict: bool) -> int:
    """Smallest prime ``> n`` (strict) or ``>= n``."""
    p = max(n + 1 if strict else n, 2)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class FieldSpec:
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"field order must be prime, got {self.q}")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("0 has no inverse in a field")
        return pow(a, self.q - 2, self.q)

    def vector(self, entries) -> Vector:
        return tuple(int(x) % self.q for x in entries)


def fe_add(a: int, b: int, f: FieldSpec) -> int:
    return f.add(a, b)


def fe_mul(a: int, b: int, f: FieldSpec) -> int:
    return f.mul(a, b)


def fe_inv(a: int, f: FieldSpec) -> int:
    return f.inv(a)


# --- vector helpers -------------------------------------------------------


def vec_add(x: Vector, y: Vector, q: int) -> Vector:
    return tuple((a + b) % q for a, b in zip(x, y))


def vec_sub(x: Vector, y: Vector, q: int) -> Vector:
    return tuple((a - b) % q for a, b in zip(x, y))


def vec_scale(c: int, x: Vector, q: int) -> Vector:
    return tuple(c * a % q for a in x)


def unit(i: int, n: int) -> Vector:
    return tuple(1 if j == i else 0 for j in range(n))


def combine(coeffs: Sequence[int], vectors: Sequence[Vector], length: int, q: int) -> Vector:
    """``sum_i coeffs[i] * vectors[i]`` as a length-``length`` vector."""
    acc = [0] * length
    for c, v in zip(coeffs, vectors):
        if c:
            for j, x in enumerate(v):
                acc[j] += c * x
    return tuple(a % q for a in acc)


def mat_vec(a: Matrix, x: Sequence[int], q: int) -> Vector:
    return tuple(sum(r * v for r, v in zip(row, x)) % q for row in a)


def transpose(a: Matrix, ncols: int | None = None) -> list[Vector]:
    if not a:
        return [()] * (ncols or 0)
    return [tuple(col) for col in zip(*a)]


def _width(a: Matrix, ncols: int | None) -> int:
    if ncols is not None:
        return ncols
    return len(a[0]) if len(a) else 0


# --- elimination ----------------------------------------------------------


def rref(a: Matrix, q: int, ncols: int | None = None) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    return kernels.row_reduce([tuple(r) for r in a], _width(a, ncols), q)


def rank(a: Matrix, q: int, ncols: int | None = None) -> int:
    if not len(a):
        return 0
    return kernels.rank([tuple(r) for r in a], _width(a, ncols), q)


def is_independent(vectors: Sequence[Vector], q: int) -> bool:
    if not vectors:
        return True
    length = len(vectors[0])
    if any(len(v) != length for v in vectors):
        raise ValueError("vectors must all have the same length")
    return rank(vectors, q, length) == len(vectors)


def row_basis(a: Matrix, q: int, ncols: int | None = None) -> list[Vector]:
    rows, pivots = rref(a, q, ncols)
    return rows[: len(pivots)]


def reduce_against(x: Vector, echelon: Sequence[Vector], pivots: Sequence[int], q: int) -> Vector:
    """Residual of ``x`` modulo the row space of a reduced echelon basis."""
    out = list(x)
    for row, c in zip(echelon, pivots):
        f = out[c]
        if f:
            for j in range(c, len(out)):
                out[j] = (out[j] - f * row[j]) % q
    return tuple(out)


class Unsolvable(enum.Enum):
    NO_SOLUTION = "no solution"
    UNDERDETERMINED = "underdetermined"


def solve_affine(a: Matrix, b: Sequence[int], q: int, ncols: int | None = None):
    """All solutions of ``a x = b``.

    Returns ``(particular, kernel_basis)`` or None when inconsistent. Free
    variables are set to zero in the particular solution.
    """
    n = _width(a, ncols)
    if len(b) != len(a):
        raise ValueError("right-hand side length must equal the row count")
    aug = [tuple(row) + (bv % q,) for row, bv in zip(a, b)]
    rows, pivots = kernels.row_reduce(aug, n + 1, q)
    if pivots and pivots[-1] == n:
        return None
    x = [0] * n
    for row, c in zip(rows, pivots):
        x[c] = row[n]
    kernel = []
    pivot_set = set(pivots)
    for free in range(n):
        if free in pivot_set:
            continue
        v = [0] * n
        v[free] = 1
        for row, c in zip(rows, pivots):
            v[c] = (-row[free]) % q
        kernel.append(tuple(v))
    return tuple(x), kernel


def solve(a: Matrix, b: Sequence[int], q: int, ncols: int | None = None):
    """Unique solution of ``a x = b``, or an ``Unsolvable`` tag."""
    result = solve_affine(a, b, q, ncols)
    if result is None:
        return Unsolvable.NO_SOLUTION
    x, kernel = result
    if kernel:
        return Unsolvable.UNDERDETERMINED
    return x


def decompose(x: Vector, basis_u: Matrix, basis_w: Matrix, q: int) -> tuple[Vector, Vector]:
    """Split ``x`` as ``u + w`` with u in rowspan(basis_u), w in rowspan(basis_w).

    The two row spaces must intersect only in zero; the spanning sets may
    be redundant. Uses one joint solve over the stacked bases.
    """
    n = len(x)
    bu = row_basis(basis_u, q, n) if len(basis_u) else []
    bw = row_basis(basis_w, q, n) if len(basis_w) else []
    if bu and bw and rank(bu + bw, q, n) != len(bu) + len(bw):
        raise DecompositionError("subspaces intersect nontrivially")
    joint = bu + bw
    if not joint:
        if any(x):
            raise DecompositionError("vector not in sum of subspaces")
        return tuple([0] * n), tuple([0] * n)
    coeffs = solve(transpose(joint), x, q, len(joint))
    if coeffs is Unsolvable.NO_SOLUTION:
        raise DecompositionError("vector not in sum of subspaces")
    cu, cw = coeffs[: len(bu)], coeffs[len(bu):]
    return combine(cu, bu, n, q), combine(cw, bw, n, q)
