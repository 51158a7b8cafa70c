"""Connectivity analytics over schedules and configurations.

Everything is built on an incremental union-find: edges only ever open
as t grows, so no decremental structure is needed and one clock-ordered
pass gives exact first-connection times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import first_connection, union_find_roots
from .dynamics import Configuration, OpeningSchedule, config_at
from .lattice import LatticeSpec

NEVER = np.inf


@dataclass(frozen=True)
class ClusterForest:
    """Flattened union-find over vertices: ``roots[v]`` is canonical."""

    roots: np.ndarray
    n_components: int

    def find(self, v: int) -> int:
        return int(self.roots[v])

    def connected(self, u: int, v: int) -> bool:
        return self.roots[u] == self.roots[v]

    def component_sizes(self) -> np.ndarray:
        return np.bincount(self.roots, minlength=self.roots.shape[0])


@dataclass(frozen=True)
class ConnectionTime:
    """First time a source vertex joins a target set; +inf when never."""

    t_star: float

    @property
    def never(self) -> bool:
        return not np.isfinite(self.t_star)

    def connected_at(self, t: float) -> bool:
        return t >= self.t_star


@dataclass(frozen=True)
class BoundaryCountSeries:
    """Counts of shell vertices connected to the origin, per radius."""

    t: float
    norm: str
    counts: np.ndarray            # counts[n] for n = 0..L


def components(config: Configuration, lattice: LatticeSpec) -> ClusterForest:
    roots = union_find_roots(lattice.edge_endpoints, config.open_mask,
                             lattice.n_vertices)
    return ClusterForest(roots=roots, n_components=int(np.unique(roots).size))


def connection_time(schedule: OpeningSchedule, source: int,
                    targets) -> ConnectionTime:
    """Exact first-connection time of ``source`` to any target vertex.

    One incremental union-find pass over open edges in clock order; the
    answer is the clock of the first union making source's component
    contain a target.  A source inside the target set connects at 0.
    """
    lattice = schedule.lattice
    target_idx = np.asarray(targets, dtype=np.int64)
    if target_idx.size == 0:
        raise ValueError("target set must be nonempty")
    is_target = np.zeros(lattice.n_vertices, dtype=np.bool_)
    is_target[target_idx] = True
    pos = first_connection(schedule.order, schedule.open_mask,
                           lattice.edge_endpoints, lattice.n_vertices,
                           int(source), is_target)
    if pos == -1:
        return ConnectionTime(NEVER)
    if pos == -2:
        return ConnectionTime(0.0)
    return ConnectionTime(float(schedule.clock_values[schedule.order[pos]]))


def _face_roots(forest: ClusterForest, lattice: LatticeSpec, axis: int):
    lo = forest.roots[lattice.face_indices(axis, 0)]
    hi = forest.roots[lattice.face_indices(axis, 1)]
    return np.intersect1d(np.unique(lo), np.unique(hi))


def crossing(config: Configuration, lattice: LatticeSpec, axis: int = 0) -> bool:
    """True iff some open path joins the two opposite faces along ``axis``."""
    forest = components(config, lattice)
    return _face_roots(forest, lattice, axis).size > 0


def count_crossing_clusters(config: Configuration, lattice: LatticeSpec,
                            axis: int = 0) -> int:
    """Number of distinct components owning vertices on both opposite faces.

    Finite-volume stand-in for the number of unbounded clusters; each
    counted component realizes a face-to-face crossing.
    """
    forest = components(config, lattice)
    return int(_face_roots(forest, lattice, axis).size)


def boundary_counts(schedule: OpeningSchedule, t: float,
                    norm: str = "linf") -> BoundaryCountSeries:
    """Per-shell counts of vertices connected to the origin at time t."""
    lattice = schedule.lattice
    forest = components(config_at(schedule, t), lattice)
    origin_root = forest.roots[lattice.origin_index]
    if norm == "linf":
        dist = np.abs(lattice.coords).max(axis=1)
    elif norm == "l1":
        dist = np.abs(lattice.coords).sum(axis=1)
    else:
        raise ValueError(f"unknown norm {norm!r}")
    radius = int(min(lattice.extent_hi))
    connected = forest.roots == origin_root
    counts = np.bincount(dist[connected], minlength=radius + 1)[:radius + 1]
    return BoundaryCountSeries(t=t, norm=norm, counts=counts)


def dual_blocking_crossing(config: Configuration, lattice: LatticeSpec,
                           axis: int = 0) -> bool:
    """True iff closed edges form a dual path separating the two faces.

    Walks the faces of the box (plus virtual outside regions on the two
    sides transverse to ``axis``), stepping between adjacent faces
    through closed primal edges.  By planar duality this holds exactly
    when no open crossing along ``axis`` exists.
    """
    if lattice.kind != "box" or lattice.d != 2 or lattice.boundary != "free":
        raise ValueError("dual blocking is defined for d=2 free boxes")
    (x_lo, y_lo), (x_hi, y_hi) = lattice.extent_lo, lattice.extent_hi
    open_mask = config.open_mask

    def closed(a, b) -> bool:
        shared = np.intersect1d(lattice.incident_edges(lattice.index_of(a)),
                                lattice.incident_edges(lattice.index_of(b)))
        return not open_mask[shared[0]]

    # face (i, j) = unit square with corners (i, j) .. (i+1, j+1);
    # orient so the dual path runs transverse to the crossing axis
    if axis == 0:
        faces = [(i, j) for i in range(x_lo, x_hi) for j in range(y_lo, y_hi)]
        def below(i, j):  # enter from outside across the bottom row
            return closed((i, y_lo), (i + 1, y_lo))
        def above(i, j):
            return closed((i, y_hi), (i + 1, y_hi))
    else:
        faces = [(i, j) for i in range(x_lo, x_hi) for j in range(y_lo, y_hi)]
        def below(i, j):
            return closed((x_lo, j), (x_lo, j + 1))
        def above(i, j):
            return closed((x_hi, j), (x_hi, j + 1))

    seen = set()
    stack = []
    if axis == 0:
        first = [(i, y_lo) for i in range(x_lo, x_hi) if below(i, y_lo)]
        last_row = y_hi - 1
        def is_exit(i, j):
            return j == last_row and above(i, j)
    else:
        first = [(x_lo, j) for j in range(y_lo, y_hi) if below(x_lo, j)]
        last_col = x_hi - 1
        def is_exit(i, j):
            return i == last_col and above(i, j)

    stack.extend(first)
    seen.update(first)
    face_set = set(faces)
    while stack:
        i, j = stack.pop()
        if is_exit(i, j):
            return True
        steps = (
            ((i + 1, j), ((i + 1, j), (i + 1, j + 1))),
            ((i - 1, j), ((i, j), (i, j + 1))),
            ((i, j + 1), ((i, j + 1), (i + 1, j + 1))),
            ((i, j - 1), ((i, j), (i + 1, j))),
        )
        for nxt, wall in steps:
            if nxt in face_set and nxt not in seen and closed(*wall):
                seen.add(nxt)
                stack.append(nxt)
    return False
