"""Assignment-search kernels, selectable between a numba and a numpy backend.

Set GSDALLOC_BACKEND=numpy or =numba to pick explicitly; the default is numba
when it imports, numpy otherwise. Both backends produce bit-identical results
because every per-assignment cost is accumulated in one canonical order:
execution terms for tasks 0..T-1, then communication terms for pairs 0..P-1.
The numpy exhaustive path adds the same terms vectorized across assignments,
which rounds identically per element.

Array conventions shared by every kernel:
  exec_img   (T, S) float64, realized or expected cost image per task/site
  comm_img   (P, S, S) float64, symmetric, zero diagonal
  avail_flat / avail_off  CSR of available site indices per task, ascending
  pair_a / pair_b  (P,) int64 task endpoints of each coupled pair, a < b
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via GSDALLOC_BACKEND=numpy
    njit = None
    NUMBA_AVAILABLE = False

BACKEND_ENV = "GSDALLOC_BACKEND"

# Absolute plus relative slack: keeps the true optimum branch alive when the
# incremental bound and the canonical sum round differently.
EPS_ABS = 1e-9
EPS_REL = 1e-12


def _resolve_backend(requested: str | None) -> str:
    choice = requested if requested is not None else os.environ.get(BACKEND_ENV, "")
    choice = choice.strip().lower()
    if choice == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba backend requested but numba is not importable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    if choice:
        raise RuntimeError(f"unknown backend {choice!r}; use 'numba' or 'numpy'")
    return "numba" if NUMBA_AVAILABLE else "numpy"


def active_backend() -> str:
    return _resolve_backend(None)


def _exhaustive_scalar(exec_img, comm_img, avail_flat, avail_off, pair_a, pair_b):
    T = avail_off.shape[0] - 1
    P = pair_a.shape[0]
    sites = np.zeros(T, np.int64)
    best_sites = np.zeros(T, np.int64)
    choice = np.zeros(T, np.int64)
    best = np.inf
    for t in range(T):
        sites[t] = avail_flat[avail_off[t]]
    while True:
        cost = 0.0
        for t in range(T):
            cost += exec_img[t, sites[t]]
        for p in range(P):
            cost += comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
        if cost < best:
            best = cost
            for t in range(T):
                best_sites[t] = sites[t]
        # odometer step, last task fastest
        t = T - 1
        while t >= 0:
            choice[t] += 1
            if avail_off[t] + choice[t] < avail_off[t + 1]:
                sites[t] = avail_flat[avail_off[t] + choice[t]]
                break
            choice[t] = 0
            sites[t] = avail_flat[avail_off[t]]
            t -= 1
        if t < 0:
            return best, best_sites


def _exhaustive_vectorized(exec_img, comm_img, avail_flat, avail_off, pair_a, pair_b):
    T = avail_off.shape[0] - 1
    lists = [avail_flat[avail_off[t] : avail_off[t + 1]] for t in range(T)]
    shape = tuple(len(lst) for lst in lists)
    idx = np.indices(shape).reshape(T, -1)
    sites = np.empty(idx.shape, np.int64)
    for t in range(T):
        sites[t] = lists[t][idx[t]]
    cost = np.zeros(sites.shape[1])
    for t in range(T):
        cost = cost + exec_img[t, sites[t]]
    for p in range(pair_a.shape[0]):
        cost = cost + comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
    k = int(np.argmin(cost))
    return float(cost[k]), sites[:, k].copy()


def _bnb_best_cost(
    exec_img, comm_img, avail_flat, avail_off, pair_a, pair_b, order, comp_pairs, comp_off
):
    """Best canonical assignment cost via depth-first branch and bound.

    `order` permutes task expansion; comp_pairs/comp_off list, per order
    position, the coupled pairs whose second endpoint is placed there.
    """
    T = avail_off.shape[0] - 1
    sites = np.full(T, -1, np.int64)
    choice = np.zeros(T, np.int64)
    partial = np.zeros(T + 1)
    min_exec = np.empty(T)
    for t in range(T):
        m = np.inf
        for k in range(avail_off[t], avail_off[t + 1]):
            v = exec_img[t, avail_flat[k]]
            if v < m:
                m = v
        min_exec[t] = m
    suffix = np.zeros(T + 1)
    for k in range(T - 1, -1, -1):
        suffix[k] = suffix[k + 1] + min_exec[order[k]]

    best = np.inf
    pos = 0
    while pos >= 0:
        t = order[pos]
        start = avail_off[t]
        count = avail_off[t + 1] - start
        if choice[pos] >= count:
            choice[pos] = 0
            sites[t] = -1
            pos -= 1
            if pos >= 0:
                choice[pos] += 1
            continue
        s = avail_flat[start + choice[pos]]
        sites[t] = s
        inc = exec_img[t, s]
        for kk in range(comp_off[pos], comp_off[pos + 1]):
            p = comp_pairs[kk]
            inc += comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
        partial[pos + 1] = partial[pos] + inc
        if partial[pos + 1] + suffix[pos + 1] > best + (EPS_ABS + EPS_REL * best):
            choice[pos] += 1
            continue
        if pos == T - 1:
            cost = 0.0
            for tt in range(T):
                cost += exec_img[tt, sites[tt]]
            for p in range(pair_a.shape[0]):
                cost += comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
            if cost < best:
                best = cost
            choice[pos] += 1
            continue
        pos += 1
        choice[pos] = 0
    return best


def _lex_first_match(
    exec_img, comm_img, avail_flat, avail_off, pair_a, pair_b, comp_pairs, comp_off, target
):
    """Lexicographically first assignment whose canonical cost equals target.

    Expands tasks in index order, so the first exact hit is the smallest site
    tuple; pruning keeps any branch within eps of target alive.
    """
    T = avail_off.shape[0] - 1
    sites = np.full(T, -1, np.int64)
    choice = np.zeros(T, np.int64)
    partial = np.zeros(T + 1)
    min_exec = np.empty(T)
    for t in range(T):
        m = np.inf
        for k in range(avail_off[t], avail_off[t + 1]):
            v = exec_img[t, avail_flat[k]]
            if v < m:
                m = v
        min_exec[t] = m
    suffix = np.zeros(T + 1)
    for k in range(T - 1, -1, -1):
        suffix[k] = suffix[k + 1] + min_exec[k]

    bound = target + (EPS_ABS + EPS_REL * target)
    pos = 0
    while pos >= 0:
        t = pos
        start = avail_off[t]
        count = avail_off[t + 1] - start
        if choice[pos] >= count:
            choice[pos] = 0
            sites[t] = -1
            pos -= 1
            if pos >= 0:
                choice[pos] += 1
            continue
        s = avail_flat[start + choice[pos]]
        sites[t] = s
        inc = exec_img[t, s]
        for kk in range(comp_off[pos], comp_off[pos + 1]):
            p = comp_pairs[kk]
            inc += comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
        partial[pos + 1] = partial[pos] + inc
        if partial[pos + 1] + suffix[pos + 1] > bound:
            choice[pos] += 1
            continue
        if pos == T - 1:
            cost = 0.0
            for tt in range(T):
                cost += exec_img[tt, sites[tt]]
            for p in range(pair_a.shape[0]):
                cost += comm_img[p, sites[pair_a[p]], sites[pair_b[p]]]
            if cost == target:
                return sites
            choice[pos] += 1
            continue
        pos += 1
        choice[pos] = 0
    return np.full(T, -1, np.int64)


_JIT_CACHE: dict[str, object] = {}


def _jit(name: str, fn):
    if name not in _JIT_CACHE:
        _JIT_CACHE[name] = njit(cache=True)(fn)
    return _JIT_CACHE[name]


def kernel_set(backend: str | None = None) -> dict:
    """The three search kernels for a backend, keyed exhaustive/bnb/lex."""
    resolved = _resolve_backend(backend)
    if resolved == "numba":
        return {
            "backend": "numba",
            "exhaustive": _jit("exhaustive", _exhaustive_scalar),
            "bnb": _jit("bnb", _bnb_best_cost),
            "lex": _jit("lex", _lex_first_match),
        }
    return {
        "backend": "numpy",
        "exhaustive": _exhaustive_vectorized,
        "bnb": _bnb_best_cost,
        "lex": _lex_first_match,
    }


def warmup(backend: str | None = None) -> str:
    """Force jit compilation on a toy instance; returns the backend used."""
    kernels = kernel_set(backend)
    exec_img = np.array([[0.5, 0.25]])
    comm_img = np.zeros((0, 2, 2))
    avail_flat = np.array([0, 1], np.int64)
    avail_off = np.array([0, 2], np.int64)
    pair = np.zeros(0, np.int64)
    comp = np.zeros(0, np.int64)
    comp_off = np.zeros(2, np.int64)
    kernels["exhaustive"](exec_img, comm_img, avail_flat, avail_off, pair, pair)
    best = kernels["bnb"](
        exec_img, comm_img, avail_flat, avail_off, pair, pair, np.array([0], np.int64), comp, comp_off
    )
    kernels["lex"](exec_img, comm_img, avail_flat, avail_off, pair, pair, comp, comp_off, best)
    return kernels["backend"]
