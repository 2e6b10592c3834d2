"""Pure-Python implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same
signature and the same output; ``netecc.kernels`` picks one at import.
Field elements are canonical residues in ``[0, q)`` and ``q`` is prime.
"""

from itertools import combinations, product


def row_reduce(rows, ncols, q):
    """Reduced row echelon form over GF(q).

    Pivot selection takes the first nonzero entry at or below the current
    row. Returns ``(reduced_rows, pivot_columns)``; the reduced rows keep
    the input row count (zero rows sink to the bottom).
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and m[p][c] == 0:
            p += 1
        if p == nrows:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        row = m[r]
        inv = pow(row[c], q - 2, q)
        if inv != 1:
            for j in range(c, ncols):
                row[j] = row[j] * inv % q
        for i in range(nrows):
            if i == r:
                continue
            f = m[i][c]
            if f:
                other = m[i]
                for j in range(c, ncols):
                    other[j] = (other[j] - f * row[j]) % q
        pivots.append(c)
        r += 1
    return [tuple(row) for row in m], pivots


def rank(rows, ncols, q):
    return len(row_reduce(rows, ncols, q)[1])


def _is_nonzero_combo(cand, mat, q):
    length = len(mat[0])
    for j in range(length):
        s = 0
        for i, c in enumerate(cand):
            if c:
                s += c * mat[i][j]
        if s % q:
            return True
    return False


def scan_candidates(residuals, d, q):
    """First coefficient vector in lexicographic order that is admissible.

    ``residuals`` holds one ``d``-row matrix per constraint. A candidate
    ``c`` is admissible when ``sum_i c[i] * R[i]`` is nonzero mod ``q`` for
    every constraint matrix ``R``. Returns ``(candidate, examined)`` with
    ``candidate`` None when the whole space is exhausted.
    """
    n = len(residuals)
    examined = 0
    last_fail = 0
    for cand in product(range(q), repeat=d):
        if not any(cand):
            continue
        examined += 1
        if n and not _is_nonzero_combo(cand, residuals[last_fail], q):
            continue
        ok = True
        for t in range(n):
            if t != last_fail and not _is_nonzero_combo(cand, residuals[t], q):
                last_fail = t
                ok = False
                break
        if ok:
            return cand, examined
    return None, examined


def _error_vectors(n_edges, alpha, q):
    for w in range(alpha + 1):
        for support in combinations(range(n_edges), w):
            for values in product(range(1, q), repeat=w):
                yield support, values


def exhaustive_search(msg_rows, err_rows, obs, k, n_edges, alpha, q):
    """Enumerate every (message, error) with error weight <= alpha.

    ``msg_rows`` (r x k) and ``err_rows`` (r x n_edges) describe the sink's
    linear observation map. Returns ``(messages, examined)``: the distinct
    messages of matching pairs in first-found order (errors outer,
    messages inner, both lexicographic) and the number of pairs examined.
    """
    r = len(obs)
    messages = list(product(range(q), repeat=k))
    images = []
    for msg in messages:
        images.append(
            tuple(sum(msg_rows[i][j] * msg[j] for j in range(k)) % q for i in range(r))
        )
    found = []
    seen = set()
    examined = 0
    for support, values in _error_vectors(n_edges, alpha, q):
        residual = list(obs)
        for e, v in zip(support, values):
            for i in range(r):
                residual[i] -= err_rows[i][e] * v
        residual = tuple(x % q for x in residual)
        for idx, image in enumerate(images):
            if image == residual and idx not in seen:
                seen.add(idx)
                found.append(messages[idx])
        examined += len(images)
    return found, examined
