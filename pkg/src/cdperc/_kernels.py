"""Numba kernels for the hot loops: the clock-ordered opening sweep and
incremental union-find connectivity.  Everything here is sequential and
allocation free on purpose; callers own all arrays."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def harris_sweep(order, endpoints, caps):
    """Process edges in increasing clock order under per-vertex degree caps.

    Returns a boolean open/blocked verdict per edge.  An edge opens iff,
    at its own clock, both endpoints still have open degree below their
    caps; verdicts therefore depend only on strictly earlier edges.
    """
    n_edges = endpoints.shape[0]
    n_vertices = caps.shape[0]
    deg = np.zeros(n_vertices, dtype=np.int64)
    open_mask = np.zeros(n_edges, dtype=np.bool_)
    for i in range(n_edges):
        e = order[i]
        u = endpoints[e, 0]
        v = endpoints[e, 1]
        if deg[u] < caps[u] and deg[v] < caps[v]:
            open_mask[e] = True
            deg[u] += 1
            deg[v] += 1
    return open_mask


@njit(cache=True, nogil=True, inline="always")
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def union_find_roots(endpoints, open_mask, n_vertices):
    """Connected-component roots under the open edge set.

    The returned array is fully compressed: roots[v] is the canonical
    representative (smallest-index behaviour is not guaranteed, but
    find is idempotent: roots[roots[v]] == roots[v]).
    """
    parent = np.arange(n_vertices)
    size = np.ones(n_vertices, dtype=np.int64)
    for e in range(endpoints.shape[0]):
        if not open_mask[e]:
            continue
        ru = _find(parent, endpoints[e, 0])
        rv = _find(parent, endpoints[e, 1])
        if ru == rv:
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
    for v in range(n_vertices):
        parent[v] = _find(parent, v)
    return parent


@njit(cache=True, nogil=True)
def first_connection(order, open_mask, endpoints, n_vertices, source, is_target):
    """Position in ``order`` of the first opening that links source to a target.

    Scans open edges in clock order maintaining a union-find forest and a
    per-root count of target vertices.  Returns -1 when source and the
    target set are never connected.  A source that is itself a target
    returns -2 (connected at time zero).
    """
    if is_target[source]:
        return -2
    parent = np.arange(n_vertices)
    size = np.ones(n_vertices, dtype=np.int64)
    tcount = np.zeros(n_vertices, dtype=np.int64)
    for v in range(n_vertices):
        if is_target[v]:
            tcount[v] = 1
    for i in range(order.shape[0]):
        e = order[i]
        if not open_mask[e]:
            continue
        ru = _find(parent, endpoints[e, 0])
        rv = _find(parent, endpoints[e, 1])
        if ru == rv:
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
        tcount[ru] += tcount[rv]
        if tcount[_find(parent, source)] > 0:
            return i
    return -1
