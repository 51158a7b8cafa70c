"""Finite graph instances: boxes of Z^d and truncated d-ary trees.

Vertex and edge indexing is deterministic and part of the contract:
identical parameters give identical index layouts on every platform,
so seeded runs reproduce exactly.

Boxes enumerate vertices in lexicographic coordinate order and edges in
scan order (vertex index, then axis).  Trees use the heap layout: the
root is vertex 0 and the children of vertex v are ``d*v + 1 .. d*v + d``
in child order; edge ``i`` joins vertex ``i + 1`` to its parent.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class SizingError(RuntimeError):
    """Requested instance exceeds the configured memory budget."""


DEFAULT_BUDGET_MB = 1024
BUDGET_ENV_VAR = "CDPERC_BUDGET_MB"


def _memory_budget_bytes() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR, "")
    try:
        mb = int(raw)
    except ValueError:
        mb = DEFAULT_BUDGET_MB
    if mb <= 0:
        mb = DEFAULT_BUDGET_MB
    return mb * (1 << 20)


def _check_budget(n_vertices: int, n_edges: int, d: int) -> None:
    # coords + endpoint map + incidence CSR, all int64-ish
    approx = 8 * (n_vertices * (d + 2) + 4 * n_edges)
    budget = _memory_budget_bytes()
    if approx > budget:
        raise SizingError(
            f"instance needs ~{approx / 2**20:.0f} MiB "
            f"(budget {budget / 2**20:.0f} MiB, set {BUDGET_ENV_VAR} to raise)"
        )


@dataclass(frozen=True)
class LatticeSpec:
    """Immutable finite graph with stable vertex/edge indexing.

    ``edge_endpoints`` has shape (n_edges, 2).  ``incidence_ptr`` /
    ``incidence_edges`` form a CSR map from vertex to incident edge
    indices.  ``coords`` is (n_vertices, d) for boxes and unused for
    trees; trees carry ``depth`` per vertex instead.
    """

    kind: str                      # "box" | "tree"
    d: int                         # box dimension or tree arity
    boundary: str                  # "free" | "periodic" (trees: "free")
    n_vertices: int
    n_edges: int
    edge_endpoints: np.ndarray
    incidence_ptr: np.ndarray
    incidence_edges: np.ndarray
    coords: np.ndarray | None = None
    extent_lo: tuple[int, ...] | None = None
    extent_hi: tuple[int, ...] | None = None
    L: int | None = None           # cube half-side (free) or side (periodic)
    depth_max: int | None = None   # tree truncation depth
    depth: np.ndarray | None = field(default=None, repr=False)

    # -- generic queries ---------------------------------------------------

    def degrees(self) -> np.ndarray:
        return np.diff(self.incidence_ptr)

    def incident_edges(self, v: int) -> np.ndarray:
        return self.incidence_edges[self.incidence_ptr[v]:self.incidence_ptr[v + 1]]

    # -- box queries -------------------------------------------------------

    def index_of(self, coord) -> int:
        """Vertex index of a coordinate tuple (boxes only)."""
        if self.kind != "box":
            raise ValueError("coordinates are only defined for boxes")
        lo = np.asarray(self.extent_lo)
        hi = np.asarray(self.extent_hi)
        c = np.asarray(coord)
        if c.shape != (self.d,) or (c < lo).any() or (c > hi).any():
            raise ValueError(f"coordinate {coord} outside box")
        sizes = hi - lo + 1
        idx = 0
        for i in range(self.d):
            idx = idx * sizes[i] + (c[i] - lo[i])
        return int(idx)

    @property
    def origin_index(self) -> int:
        return self.index_of((0,) * self.d)

    def shell_indices(self, n: int, norm: str = "linf") -> np.ndarray:
        """Vertices at distance exactly ``n`` from the origin.

        Defined for origin-centered free boxes; ``norm`` selects the
        l-infinity or l1 ball.
        """
        if self.kind != "box" or self.boundary != "free":
            raise ValueError("shells need a free box")
        if self.extent_lo != tuple(-x for x in self.extent_hi):
            raise ValueError("shells need an origin-centered box")
        if norm == "linf":
            dist = np.abs(self.coords).max(axis=1)
        elif norm == "l1":
            dist = np.abs(self.coords).sum(axis=1)
        else:
            raise ValueError(f"unknown norm {norm!r}")
        return np.nonzero(dist == n)[0]

    def face_indices(self, axis: int, side: int) -> np.ndarray:
        """Vertices on the low (side=0) or high (side=1) face along ``axis``."""
        if self.kind != "box" or self.boundary != "free":
            raise ValueError("faces need a free box")
        bound = self.extent_hi[axis] if side else self.extent_lo[axis]
        return np.nonzero(self.coords[:, axis] == bound)[0]

    # -- tree queries --------------------------------------------------------

    def tree_parent(self, v: int) -> int:
        if self.kind != "tree" or v == 0:
            raise ValueError("parent of root or non-tree vertex")
        return (v - 1) // self.d

    def vertices_at_depth(self, level: int) -> np.ndarray:
        if self.kind != "tree":
            raise ValueError("depth levels are only defined for trees")
        return np.nonzero(self.depth == level)[0]


@dataclass(frozen=True)
class ConstraintSpec:
    """Per-vertex degree caps.  Caps above a vertex degree are legal and inert."""

    caps: np.ndarray

    def __post_init__(self):
        if (self.caps < 1).any():
            raise ValueError("degree caps must be >= 1")

    @classmethod
    def uniform(cls, lattice: LatticeSpec, k: int) -> "ConstraintSpec":
        if k < 1:
            raise ValueError("degree caps must be >= 1")
        return cls(np.full(lattice.n_vertices, k, dtype=np.int64))


def _build_from_edges(kind, d, boundary, n_vertices, edges, **extra) -> LatticeSpec:
    endpoints = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n_edges = endpoints.shape[0]
    counts = np.bincount(endpoints.ravel(), minlength=n_vertices)
    ptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    inc = np.empty(2 * n_edges, dtype=np.int64)
    cursor = ptr[:-1].copy()
    for e in range(n_edges):
        u, v = endpoints[e]
        inc[cursor[u]] = e
        cursor[u] += 1
        inc[cursor[v]] = e
        cursor[v] += 1
    return LatticeSpec(
        kind=kind, d=d, boundary=boundary,
        n_vertices=n_vertices, n_edges=n_edges,
        edge_endpoints=endpoints, incidence_ptr=ptr, incidence_edges=inc,
        **extra,
    )


def build_box(extent_lo, extent_hi, boundary: str = "free") -> LatticeSpec:
    """Box with vertex coordinates in the product of [lo_i, hi_i] ranges.

    Periodic boxes identify opposite faces; each axis then needs length
    >= 3 to avoid double edges.
    """
    lo = tuple(int(x) for x in extent_lo)
    hi = tuple(int(x) for x in extent_hi)
    d = len(lo)
    if d < 1 or len(hi) != d:
        raise ValueError("extents must be nonempty and of equal length")
    if any(h < l for l, h in zip(lo, hi)):
        raise ValueError("empty extent")
    if boundary not in ("free", "periodic"):
        raise ValueError(f"unknown boundary mode {boundary!r}")
    sizes = tuple(h - l + 1 for l, h in zip(lo, hi))
    if boundary == "periodic" and any(s < 3 for s in sizes):
        raise ValueError("periodic boxes need side length >= 3")

    n_vertices = int(np.prod(sizes, dtype=np.int64))
    n_edges_est = n_vertices * d
    _check_budget(n_vertices, n_edges_est, d)

    grids = np.meshgrid(*[np.arange(l, h + 1) for l, h in zip(lo, hi)],
                        indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    strides = np.empty(d, dtype=np.int64)
    strides[-1] = 1
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]

    edges = []
    rel = coords - np.asarray(lo)
    idx = rel @ strides
    order = np.argsort(idx, kind="stable")  # identity by construction
    assert (order == np.arange(n_vertices)).all()
    for v in range(n_vertices):
        for axis in range(d):
            if rel[v, axis] + 1 < sizes[axis]:
                edges.append((v, v + strides[axis]))
            elif boundary == "periodic":
                edges.append((v, v - (sizes[axis] - 1) * strides[axis]))
    return _build_from_edges(
        "box", d, boundary, n_vertices, edges,
        coords=coords, extent_lo=lo, extent_hi=hi,
    )


def build_box_lattice(d: int, L: int, boundary: str = "free") -> LatticeSpec:
    """Cube of Z^d: coordinates [-L, L]^d (free) or [0, L)^d (periodic)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if L < 1:
        raise ValueError("side parameter must be >= 1")
    if boundary == "free":
        lat = build_box((-L,) * d, (L,) * d, "free")
    elif boundary == "periodic":
        if L < 3:
            raise ValueError("periodic boxes need L >= 3")
        lat = build_box((0,) * d, (L - 1,) * d, "periodic")
    else:
        raise ValueError(f"unknown boundary mode {boundary!r}")
    object.__setattr__(lat, "L", L)
    return lat


def build_rectangle(nx: int, ny: int) -> LatticeSpec:
    """Free planar box with nx * ny vertices, anchored at the origin corner.

    Used by the crossing experiments, where an (L+2) x (L+1) vertex
    rectangle crossed along x is self-dual for the unrestricted model.
    """
    if nx < 2 or ny < 2:
        raise ValueError("rectangle needs at least 2 vertices per side")
    return build_box((0, 0), (nx - 1, ny - 1), "free")


def build_tree(d: int, depth: int) -> LatticeSpec:
    """Regular d-ary tree truncated at the given depth (root at depth 0)."""
    if d < 2:
        raise ValueError("tree arity must be >= 2")
    if depth < 1:
        raise ValueError("tree depth must be >= 1")
    n_vertices = (d ** (depth + 1) - 1) // (d - 1)
    n_edges = n_vertices - 1
    _check_budget(n_vertices, n_edges, 1)

    children = np.arange(1, n_vertices, dtype=np.int64)
    parents = (children - 1) // d
    edges = np.stack([parents, children], axis=1)

    depths = np.zeros(n_vertices, dtype=np.int64)
    level_start = 0
    width = 1
    for level in range(depth + 1):
        depths[level_start:level_start + width] = level
        level_start += width
        width *= d

    return _build_from_edges(
        "tree", d, "free", n_vertices, edges,
        depth_max=depth, depth=depths,
    )


@dataclass(frozen=True)
class DualEdgeMap:
    """Bijection between the edges of a planar free box and its shifted dual.

    Dual vertices live at half-integer points; they are stored with
    doubled coordinates so that (2x+1, 2y+1) means the point
    (x + 1/2, y + 1/2).  Each dual edge crosses exactly its primal
    partner.
    """

    dual_endpoints: np.ndarray      # (n_edges, 2, 2) doubled coordinates
    _inverse: dict = field(repr=False)

    def __len__(self) -> int:
        return self.dual_endpoints.shape[0]

    def dual_of(self, edge_index: int):
        a, b = self.dual_endpoints[edge_index]
        return (tuple(int(x) for x in a), tuple(int(x) for x in b))

    def primal_of(self, dual_edge) -> int:
        a, b = sorted(tuple(v) for v in dual_edge)
        return self._inverse[(a, b)]


def dual_map(lattice: LatticeSpec) -> DualEdgeMap:
    """Dual correspondence for a d=2 free box."""
    if lattice.kind != "box" or lattice.d != 2 or lattice.boundary != "free":
        raise ValueError("dual map is defined for d=2 free boxes only")
    ends = lattice.edge_endpoints
    cu = lattice.coords[ends[:, 0]] * 2
    cv = lattice.coords[ends[:, 1]] * 2
    horizontal = cu[:, 0] != cv[:, 0]
    mid = (cu + cv) // 2
    dual = np.empty((lattice.n_edges, 2, 2), dtype=np.int64)
    # horizontal primal edge -> vertical dual edge, and vice versa
    dual[horizontal, 0] = mid[horizontal] + np.array([0, -1])
    dual[horizontal, 1] = mid[horizontal] + np.array([0, +1])
    dual[~horizontal, 0] = mid[~horizontal] + np.array([-1, 0])
    dual[~horizontal, 1] = mid[~horizontal] + np.array([+1, 0])
    inverse = {}
    for e in range(lattice.n_edges):
        a, b = sorted(map(tuple, dual[e].tolist()))
        inverse[(a, b)] = e
    if len(inverse) != lattice.n_edges:
        raise AssertionError("dual map is not injective")
    return DualEdgeMap(dual_endpoints=dual, _inverse=inverse)
