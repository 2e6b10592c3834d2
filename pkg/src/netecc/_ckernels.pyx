# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Arithmetic is done in signed 64-bit; callers guarantee ``q < 2**31`` so
every product of two residues fits.
"""

from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef inline i64 _mod(i64 a, i64 q) noexcept nogil:
    a %= q
    if a < 0:
        a += q
    return a


cdef i64 _inv(i64 a, i64 q) noexcept nogil:
    # extended Euclid; a is a nonzero residue
    cdef i64 t = 0, nt = 1, r = q, nr = a, quo, tmp
    while nr != 0:
        quo = r // nr
        tmp = t - quo * nt
        t = nt
        nt = tmp
        tmp = r - quo * nr
        r = nr
        nr = tmp
    return _mod(t, q)


cdef i64* _fill(object rows, Py_ssize_t nrows, Py_ssize_t ncols) except NULL:
    cdef i64* buf = <i64*> malloc(max(nrows * ncols, 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                buf[i * ncols + j] = row[j]
    except BaseException:
        free(buf)
        raise
    return buf


cdef Py_ssize_t _reduce(i64* m, Py_ssize_t nrows, Py_ssize_t ncols, i64 q,
                        Py_ssize_t* pivots) noexcept nogil:
    cdef Py_ssize_t r = 0, c, p, i, j
    cdef i64 inv, f, tmp
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and m[p * ncols + c] == 0:
            p += 1
        if p == nrows:
            continue
        if p != r:
            for j in range(ncols):
                tmp = m[r * ncols + j]
                m[r * ncols + j] = m[p * ncols + j]
                m[p * ncols + j] = tmp
        inv = _inv(m[r * ncols + c], q)
        if inv != 1:
            for j in range(c, ncols):
                m[r * ncols + j] = m[r * ncols + j] * inv % q
        for i in range(nrows):
            if i == r:
                continue
            f = m[i * ncols + c]
            if f != 0:
                for j in range(c, ncols):
                    m[i * ncols + j] = _mod(m[i * ncols + j] - f * m[r * ncols + j], q)
        pivots[r] = c
        r += 1
    return r


def row_reduce(rows, Py_ssize_t ncols, i64 q):
    cdef Py_ssize_t nrows = len(rows)
    cdef i64* m = _fill(rows, nrows, ncols)
    cdef Py_ssize_t* pivots = <Py_ssize_t*> malloc(max(nrows, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t rk, i, j
    if pivots == NULL:
        free(m)
        raise MemoryError()
    try:
        rk = _reduce(m, nrows, ncols, q, pivots)
        out = [tuple([m[i * ncols + j] for j in range(ncols)]) for i in range(nrows)]
        return out, [pivots[i] for i in range(rk)]
    finally:
        free(m)
        free(pivots)


def rank(rows, Py_ssize_t ncols, i64 q):
    cdef Py_ssize_t nrows = len(rows)
    cdef i64* m = _fill(rows, nrows, ncols)
    cdef Py_ssize_t* pivots = <Py_ssize_t*> malloc(max(nrows, 1) * sizeof(Py_ssize_t))
    if pivots == NULL:
        free(m)
        raise MemoryError()
    try:
        return _reduce(m, nrows, ncols, q, pivots)
    finally:
        free(m)
        free(pivots)


cdef bint _nonzero_combo(i64* cand, i64* mat, Py_ssize_t d, Py_ssize_t length,
                         i64 q) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef i64 s
    for j in range(length):
        s = 0
        for i in range(d):
            if cand[i] != 0:
                s = (s + cand[i] * mat[i * length + j]) % q
        if s != 0:
            return True
    return False


def scan_candidates(residuals, Py_ssize_t d, i64 q):
    cdef Py_ssize_t n = len(residuals)
    cdef Py_ssize_t length = 0
    cdef Py_ssize_t t, i, j, last_fail = 0
    cdef i64 examined = 0
    cdef bint ok, done = False, found = False
    if n:
        length = max(len(residuals[t][0]) for t in range(n))
    cdef i64* mats = <i64*> malloc(max(n * d * length, 1) * sizeof(i64))
    cdef i64* cand = <i64*> malloc(max(d, 1) * sizeof(i64))
    if mats == NULL or cand == NULL:
        free(mats)
        free(cand)
        raise MemoryError()
    try:
        for t in range(n):
            mat = residuals[t]
            for i in range(d):
                row = mat[i]
                for j in range(length):
                    mats[(t * d + i) * length + j] = row[j] if j < len(row) else 0
        for i in range(d):
            cand[i] = 0
        with nogil:
            while not done:
                # advance to the next vector in lexicographic order
                i = d - 1
                while i >= 0:
                    cand[i] += 1
                    if cand[i] < q:
                        break
                    cand[i] = 0
                    i -= 1
                if i < 0:
                    done = True
                    break
                examined += 1
                if n and not _nonzero_combo(cand, mats + last_fail * d * length, d, length, q):
                    continue
                ok = True
                for t in range(n):
                    if t != last_fail and not _nonzero_combo(cand, mats + t * d * length, d, length, q):
                        last_fail = t
                        ok = False
                        break
                if ok:
                    found = True
                    done = True
        if found:
            return tuple([cand[i] for i in range(d)]), examined
        return None, examined
    finally:
        free(mats)
        free(cand)


def exhaustive_search(msg_rows, err_rows, obs, Py_ssize_t k, Py_ssize_t n_edges,
                      Py_ssize_t alpha, i64 q):
    cdef Py_ssize_t r = len(obs)
    cdef Py_ssize_t n_msgs = 1, idx, i, j, w, pos
    for i in range(k):
        n_msgs *= q
    cdef i64* mrows = _fill(msg_rows, r, k)
    cdef i64* erows = NULL
    cdef i64* images = <i64*> malloc(max(n_msgs * r, 1) * sizeof(i64))
    cdef i64* digits = <i64*> malloc(max(k, 1) * sizeof(i64))
    cdef i64* residual = <i64*> malloc(max(r, 1) * sizeof(i64))
    cdef i64* o = <i64*> malloc(max(r, 1) * sizeof(i64))
    cdef Py_ssize_t* support = <Py_ssize_t*> malloc(max(alpha, 1) * sizeof(Py_ssize_t))
    cdef i64* values = <i64*> malloc(max(alpha, 1) * sizeof(i64))
    cdef char* seen = <char*> malloc(max(n_msgs, 1))
    cdef i64 s, examined = 0
    cdef bint match, more
    found = []
    try:
        erows = _fill(err_rows, r, n_edges)
        if images == NULL or digits == NULL or residual == NULL or o == NULL \
                or support == NULL or values == NULL or seen == NULL:
            raise MemoryError()
        for i in range(r):
            o[i] = obs[i]
        for idx in range(n_msgs):
            seen[idx] = 0
            pos = idx
            for j in range(k - 1, -1, -1):
                digits[j] = pos % q
                pos //= q
            for i in range(r):
                s = 0
                for j in range(k):
                    s = (s + mrows[i * k + j] * digits[j]) % q
                images[idx * r + i] = s
        for w in range(min(alpha, n_edges) + 1):
            for i in range(w):
                support[i] = i
            more = True
            while more:
                for i in range(w):
                    values[i] = 1
                while True:
                    for i in range(r):
                        s = o[i]
                        for j in range(w):
                            s -= erows[i * n_edges + support[j]] * values[j] % q
                        residual[i] = _mod(s, q)
                    for idx in range(n_msgs):
                        match = True
                        for i in range(r):
                            if images[idx * r + i] != residual[i]:
                                match = False
                                break
                        if match and not seen[idx]:
                            seen[idx] = 1
                            pos = idx
                            msg = [0] * k
                            for j in range(k - 1, -1, -1):
                                msg[j] = pos % q
                                pos //= q
                            found.append(tuple(msg))
                    examined += n_msgs
                    # next value assignment, lexicographic over 1..q-1
                    i = w - 1
                    while i >= 0:
                        values[i] += 1
                        if values[i] < q:
                            break
                        values[i] = 1
                        i -= 1
                    if i < 0:
                        break
                # next support, lexicographic combinations
                i = w - 1
                while i >= 0 and support[i] == n_edges - w + i:
                    i -= 1
                if i < 0:
                    more = False
                else:
                    support[i] += 1
                    for j in range(i + 1, w):
                        support[j] = support[j - 1] + 1
        return found, examined
    finally:
        free(mrows)
        free(erows)
        free(images)
        free(digits)
        free(residual)
        free(o)
        free(support)
        free(values)
        free(seen)
