"""Edge-clock dynamics: one pass over the clocks yields the whole
time-indexed configuration family.

Each edge carries an i.i.d. uniform clock and tries to open exactly once,
at its clock value.  Under the degree-capped model the attempt succeeds
iff both endpoints still have open degree below their caps at that
moment, so the full schedule (verdict plus opening time per edge) is
computed by a single sweep in clock order and every time slice follows
by filtering ``opening time <= t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from ._kernels import harris_sweep
from .lattice import ConstraintSpec, LatticeSpec

BLOCKED = np.inf

MODEL_CONSTRAINED = "constrained"
MODEL_UNRESTRICTED = "unrestricted"
MODEL_DIMINISHED = "diminished"


@dataclass(frozen=True)
class ClockAssignment:
    """Per-edge uniform clocks in (0, 1), pairwise distinct.

    ``seed``/``replica`` record the generating stream; ``values[i]`` is
    the clock of edge ``i``.
    """

    values: np.ndarray
    seed: int
    replica: int

    def validate(self) -> None:
        v = self.values
        if not ((v > 0.0).all() and (v < 1.0).all()):
            raise ValueError("clock values must lie in the open interval (0,1)")
        if np.unique(v).size != v.size:
            raise ValueError("clock values must be pairwise distinct")


def sample_clocks(lattice: LatticeSpec, seed: int, replica: int = 0) -> ClockAssignment:
    """Deterministic clocks for (seed, replica): stream key mix64(seed) ^ replica."""
    child = rng.derive_seed(seed, replica)
    values = rng.open_unit_uniforms(child, lattice.n_edges)
    return ClockAssignment(values=values, seed=seed, replica=replica)


@dataclass(frozen=True)
class OpeningSchedule:
    """Final verdict of the dynamics: per edge, its opening time or BLOCKED.

    ``open_time[e]`` equals the clock of edge ``e`` if it ever opens and
    +inf otherwise, so the configuration at time t is exactly
    ``open_time <= t``.  ``order`` lists edge indices by increasing clock.
    """

    lattice: LatticeSpec
    clock_values: np.ndarray
    open_time: np.ndarray
    order: np.ndarray
    model: str

    @property
    def open_mask(self) -> np.ndarray:
        return np.isfinite(self.open_time)

    @property
    def n_blocked(self) -> int:
        return int(np.isinf(self.open_time).sum())


@dataclass(frozen=True)
class Configuration:
    """Open-edge membership at a fixed evaluation time."""

    t: float
    open_mask: np.ndarray

    @property
    def n_open(self) -> int:
        return int(self.open_mask.sum())


def run_constrained(lattice: LatticeSpec, clocks: ClockAssignment,
                    constraint: ConstraintSpec) -> OpeningSchedule:
    """Degree-capped dynamics: sweep edges in clock order, open while both
    endpoint degrees are below their caps."""
    if clocks.values.shape[0] != lattice.n_edges:
        raise ValueError("clock assignment does not cover the lattice")
    if constraint.caps.shape[0] != lattice.n_vertices:
        raise ValueError("constraint does not cover the lattice")
    order = np.argsort(clocks.values, kind="stable")
    open_mask = harris_sweep(order, lattice.edge_endpoints, constraint.caps)
    open_time = np.where(open_mask, clocks.values, BLOCKED)
    return OpeningSchedule(lattice, clocks.values, open_time, order,
                           MODEL_CONSTRAINED)


def run_unrestricted(lattice: LatticeSpec, clocks: ClockAssignment) -> OpeningSchedule:
    """Cap-free dynamics: every edge opens at its clock."""
    if clocks.values.shape[0] != lattice.n_edges:
        raise ValueError("clock assignment does not cover the lattice")
    order = np.argsort(clocks.values, kind="stable")
    return OpeningSchedule(lattice, clocks.values, clocks.values.copy(), order,
                           MODEL_UNRESTRICTED)


# ---------------------------------------------------------------------------
# Tile-diminished intermediate model (d=2 boxes)
# ---------------------------------------------------------------------------

TILE_W = 4   # vertices per tile along x
TILE_H = 3   # vertices per tile along y


@dataclass(frozen=True)
class DiminishmentLayout:
    """Tiling of a planar box by 4x3 vertex tiles.

    Each full tile (m, n) covers vertices (4m..4m+3, 3n..3n+2) and
    contributes its center edge ``g`` plus the split of the tile's edges
    into ``A`` (exactly one endpoint on the tile border) and ``B`` (both
    endpoints on the border); A, B and {g} partition the tile's edges.
    Tiles that do not fit inside the box entirely are skipped.
    """

    tiles: tuple          # of (m, n, g_edge, A_indices, B_indices)

    def __len__(self) -> int:
        return len(self.tiles)


def _edge_between(lattice: LatticeSpec, u: int, v: int) -> int:
    shared = np.intersect1d(lattice.incident_edges(u), lattice.incident_edges(v))
    if shared.size != 1:
        raise ValueError(f"no unique edge between vertices {u} and {v}")
    return int(shared[0])


def diminishment_layout(lattice: LatticeSpec) -> DiminishmentLayout:
    if lattice.kind != "box" or lattice.d != 2 or lattice.boundary != "free":
        raise ValueError("the diminished model is defined on d=2 free boxes")
    (x_lo, y_lo), (x_hi, y_hi) = lattice.extent_lo, lattice.extent_hi
    if x_hi - x_lo + 1 < TILE_W or y_hi - y_lo + 1 < TILE_H:
        raise ValueError("box too small to contain a full tile")

    tiles = []
    m_range = range(int(np.ceil(x_lo / TILE_W)), (x_hi - (TILE_W - 1)) // TILE_W + 1)
    n_range = range(int(np.ceil(y_lo / TILE_H)), (y_hi - (TILE_H - 1)) // TILE_H + 1)
    for m in m_range:
        for n in n_range:
            x0, y0 = TILE_W * m, TILE_H * n
            cell = [(x0 + i, y0 + j) for i in range(TILE_W) for j in range(TILE_H)]
            vid = {c: lattice.index_of(c) for c in cell}
            inner = {vid[(x0 + 1, y0 + 1)], vid[(x0 + 2, y0 + 1)]}
            g = _edge_between(lattice, vid[(x0 + 1, y0 + 1)], vid[(x0 + 2, y0 + 1)])
            a_set, b_set = [], []
            for (cx, cy) in cell:
                for (nx, ny) in ((cx + 1, cy), (cx, cy + 1)):
                    if (nx, ny) not in vid:
                        continue
                    e = _edge_between(lattice, vid[(cx, cy)], vid[(nx, ny)])
                    n_inner = (vid[(cx, cy)] in inner) + (vid[(nx, ny)] in inner)
                    if n_inner == 2:
                        assert e == g
                    elif n_inner == 1:
                        a_set.append(e)
                    else:
                        b_set.append(e)
            tiles.append((m, n, g,
                          np.array(sorted(a_set), dtype=np.int64),
                          np.array(sorted(b_set), dtype=np.int64)))
    return DiminishmentLayout(tiles=tuple(tiles))


def run_diminished(lattice: LatticeSpec, clocks: ClockAssignment,
                   layout: DiminishmentLayout | None = None) -> OpeningSchedule:
    """Intermediate model: unrestricted everywhere except that each full
    tile's center edge is blocked when all the tile's inner-ring clocks
    ring before every border clock (and before the center itself)."""
    if clocks.values.shape[0] != lattice.n_edges:
        raise ValueError("clock assignment does not cover the lattice")
    if layout is None:
        layout = diminishment_layout(lattice)
    u = clocks.values
    open_time = u.copy()
    for (_m, _n, g, a_idx, b_idx) in layout.tiles:
        if u[a_idx].max() < min(u[b_idx].min(), u[g]):
            open_time[g] = BLOCKED
    order = np.argsort(u, kind="stable")
    return OpeningSchedule(lattice, u, open_time, order, MODEL_DIMINISHED)


def config_at(schedule: OpeningSchedule, t: float) -> Configuration:
    """Time slice of a schedule: the edges with opening time <= t."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("evaluation time must lie in [0, 1]")
    return Configuration(t=t, open_mask=schedule.open_time <= t)
