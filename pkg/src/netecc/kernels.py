"""Backend selection for the hot kernels.

The compiled module ``netecc._ckernels`` is used when it imports; the
pure-Python module ``netecc._pykernels`` is the fallback. Setting
``NETECC_PURE_PYTHON=1`` forces the fallback. The compiled kernels work in
64-bit integers, so fields with ``q >= 2**31`` always take the Python path.
"""

import os

from netecc import _pykernels

_C_LIMIT = 2**31

try:
    if os.environ.get("NETECC_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from netecc import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"
_impl = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    """Mapping of backend name to module, for tests and benchmarks."""
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out


def _pick(q):
    return _impl if q < _C_LIMIT else _pykernels


def row_reduce(rows, ncols, q):
    return _pick(q).row_reduce(rows, ncols, q)


def rank(rows, ncols, q):
    return _pick(q).rank(rows, ncols, q)


def scan_candidates(residuals, d, q):
    return _pick(q).scan_candidates(residuals, d, q)


def exhaustive_search(msg_rows, err_rows, obs, k, n_edges, alpha, q):
    return _pick(q).exhaustive_search(msg_rows, err_rows, obs, k, n_edges, alpha, q)
