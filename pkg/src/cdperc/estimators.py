"""Monte Carlo experiment drivers.

Every estimate is a deterministic function of (config, master seed):
replica r of experiment e draws its clocks from the stream
``derive_seed(master, STREAM_IDS[e], context...)`` with replica index r,
so results are independent of thread scheduling and batch layout.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .clusters import (boundary_counts, connection_time,
                       count_crossing_clusters, crossing)
from .dynamics import (config_at, run_constrained, run_diminished,
                       run_unrestricted, sample_clocks)
from .lattice import (ConstraintSpec, LatticeSpec, build_box_lattice,
                      build_rectangle, build_tree)
from .stats import Z95, mean_with_ci, wilson_interval

STREAM_IDS = {
    "simulate": 1,
    "theta": 2,
    "crossing": 3,
    "tc": 4,
    "k2": 5,
    "uniqueness": 6,
    "tree": 7,
}

MODELS = ("constrained", "unrestricted", "diminished")


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one seeded experiment.

    ``sizes`` drives multi-size sweeps (tc brackets, finite-size
    trends); single-lattice experiments use ``L`` or ``depth``.  The
    self-dual ``rectangle`` geometry (L+2 by L+1 vertices, crossed along
    x) anchors the unrestricted crossing probability at exactly 1/2 for
    t = 1/2.
    """

    kind: str
    seed: int
    replicas: int = 1000
    d: int = 2
    L: int | None = None
    sizes: tuple[int, ...] = ()
    depth: int | None = None
    boundary: str = "free"
    model: str = "constrained"
    k: int = 3
    t: float | None = None
    t_grid: tuple[float, ...] = ()
    norm: str = "l1"
    rectangle: bool = False
    axis: int = 0
    tol: float = 0.05
    max_batches: int = 8
    threads: int = 1

    def validated(self) -> "ExperimentConfig":
        if self.kind not in STREAM_IDS:
            raise ValueError(f"kind: unknown experiment {self.kind!r}")
        if self.replicas < 1:
            raise ValueError("replicas: must be >= 1")
        if self.model not in MODELS:
            raise ValueError(f"model: unknown model {self.model!r}")
        if self.model == "constrained" and self.k < 1:
            raise ValueError("k: degree cap must be >= 1")
        if self.t is not None and not 0.0 <= self.t <= 1.0:
            raise ValueError("t: evaluation time must lie in [0, 1]")
        if any(not 0.0 <= t <= 1.0 for t in self.t_grid):
            raise ValueError("t_grid: times must lie in [0, 1]")
        if self.tol <= 0:
            raise ValueError("tol: must be positive")
        if self.kind == "tree":
            if self.depth is None or self.depth < 1:
                raise ValueError("depth: trees need depth >= 1")
            if self.d < 2:
                raise ValueError("d: tree arity must be >= 2")
        elif self.L is None and not self.sizes:
            raise ValueError("L: box experiments need L or sizes")
        return self


def lattice_for(cfg: ExperimentConfig, L: int | None = None) -> LatticeSpec:
    if cfg.kind == "tree":
        return build_tree(cfg.d, cfg.depth)
    side = L if L is not None else cfg.L
    if cfg.rectangle:
        if cfg.d != 2:
            raise ValueError("rectangle geometry is planar")
        return build_rectangle(side + 2, side + 1)
    return build_box_lattice(cfg.d, side, cfg.boundary)


def _run_model(cfg: ExperimentConfig, lattice: LatticeSpec, stream_seed: int,
               r: int):
    clocks = sample_clocks(lattice, stream_seed, r)
    if cfg.model == "constrained":
        caps = ConstraintSpec.uniform(lattice, cfg.k)
        return run_constrained(lattice, clocks, caps)
    if cfg.model == "unrestricted":
        return run_unrestricted(lattice, clocks)
    return run_diminished(lattice, clocks)


def _replica_map(fn, replicas: int, threads: int) -> list:
    if threads <= 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicas)))


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveEstimate:
    """Empirical curve with binomial confidence half-widths per grid point."""

    ts: np.ndarray
    estimates: np.ndarray
    half_widths: np.ndarray
    replicas: int


@dataclass(frozen=True)
class ProportionEstimate:
    value: float
    ci_low: float
    ci_high: float
    successes: int
    replicas: int
    z: float = Z95

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


@dataclass(frozen=True)
class TcBracket:
    L: int
    t_lo: float
    t_hi: float
    converged: bool
    evaluations: tuple    # of (t, successes, trials)


@dataclass(frozen=True)
class TcEstimate:
    tol: float
    brackets: tuple       # of TcBracket, one per size


@dataclass(frozen=True)
class DecaySeries:
    """Replica-averaged shell counts of the origin cluster and their
    increments, used for the cap-2 decay experiment."""

    t: float
    norm: str
    ns: np.ndarray
    mean_counts: np.ndarray
    count_half_widths: np.ndarray
    mean_increments: np.ndarray
    increment_half_widths: np.ndarray
    replicas: int


@dataclass(frozen=True)
class CrossingClusterHistogram:
    L: int
    t: float
    counts: dict
    replicas: int

    def fraction_at_least(self, threshold: int) -> float:
        hits = sum(v for c, v in self.counts.items() if c >= threshold)
        return hits / self.replicas


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def estimate_theta(cfg: ExperimentConfig) -> CurveEstimate:
    """Empirical CDF of the origin-to-box-boundary connection time.

    One connection time per replica; evaluating the CDF on the grid
    makes the curve exactly nondecreasing in t.
    """
    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    targets = lattice.shell_indices(lattice.L, norm="linf")
    origin = lattice.origin_index
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["theta"])

    def one(r: int) -> float:
        schedule = _run_model(cfg, lattice, stream, r)
        return connection_time(schedule, origin, targets).t_star

    t_star = np.array(_replica_map(one, cfg.replicas, cfg.threads))
    ts = np.array(cfg.t_grid if cfg.t_grid else np.linspace(0.0, 1.0, 21))
    estimates = np.empty(ts.shape)
    half_widths = np.empty(ts.shape)
    for i, t in enumerate(ts):
        hits = int((t_star <= t).sum())
        lo, hi = wilson_interval(hits, cfg.replicas)
        estimates[i] = hits / cfg.replicas
        half_widths[i] = (hi - lo) / 2.0
    return CurveEstimate(ts=ts, estimates=estimates, half_widths=half_widths,
                         replicas=cfg.replicas)


def estimate_crossing(cfg: ExperimentConfig, t: float,
                      z: float = Z95, _context: int = 0) -> ProportionEstimate:
    """Fraction of replicas with an open side-to-side crossing at time t."""
    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["crossing"], _context)

    def one(r: int) -> bool:
        schedule = _run_model(cfg, lattice, stream, r)
        return crossing(config_at(schedule, t), lattice, cfg.axis)

    hits = int(np.sum(_replica_map(one, cfg.replicas, cfg.threads)))
    lo, hi = wilson_interval(hits, cfg.replicas, z)
    return ProportionEstimate(value=hits / cfg.replicas, ci_low=lo, ci_high=hi,
                              successes=hits, replicas=cfg.replicas, z=z)


def estimate_tc(cfg: ExperimentConfig) -> TcEstimate:
    """Bisection bracket of the time where the crossing probability passes 1/2.

    At each probe time, replica batches accumulate until the Wilson 95%
    interval separates from 1/2 or the batch budget runs out; an
    unresolved probe stops the bisection and the current (widest honest)
    bracket is reported with ``converged=False``.
    """
    cfg = cfg.validated()
    sizes = cfg.sizes if cfg.sizes else (cfg.L,)
    brackets = []
    for size in sizes:
        sub = replace(cfg, L=size, sizes=())
        lattice = lattice_for(sub, size)
        evaluations = []
        lo, hi = 0.0, 1.0
        converged = True
        context = 0
        while hi - lo > cfg.tol:
            mid = (lo + hi) / 2.0
            successes = 0
            trials = 0
            decided = None
            for _batch in range(cfg.max_batches):
                stream = rng.derive_seed(cfg.seed, STREAM_IDS["tc"], size, context)
                context += 1

                def one(r: int) -> bool:
                    schedule = _run_model(sub, lattice, stream, r)
                    return crossing(config_at(schedule, mid), lattice, cfg.axis)

                successes += int(np.sum(_replica_map(one, cfg.replicas,
                                                     cfg.threads)))
                trials += cfg.replicas
                ci_lo, ci_hi = wilson_interval(successes, trials)
                if ci_lo > 0.5:
                    decided = "above"
                    break
                if ci_hi < 0.5:
                    decided = "below"
                    break
            evaluations.append((mid, successes, trials))
            if decided == "above":
                hi = mid
            elif decided == "below":
                lo = mid
            else:
                converged = False
                break
        brackets.append(TcBracket(L=size, t_lo=lo, t_hi=hi, converged=converged,
                                  evaluations=tuple(evaluations)))
    return TcEstimate(tol=cfg.tol, brackets=tuple(brackets))


def k2_decay_experiment(cfg: ExperimentConfig) -> DecaySeries:
    """Shell-count decay of the origin cluster under degree cap 2."""
    cfg = cfg.validated()
    if cfg.model == "constrained" and cfg.k != 2:
        raise ValueError("k: the decay experiment expects cap 2")
    lattice = lattice_for(cfg)
    t = cfg.t if cfg.t is not None else 1.0
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["k2"])

    def one(r: int) -> np.ndarray:
        schedule = _run_model(cfg, lattice, stream, r)
        return boundary_counts(schedule, t, norm=cfg.norm).counts

    counts = np.stack(_replica_map(one, cfg.replicas, cfg.threads))
    increments = np.diff(counts, axis=1)
    mean_counts, count_hw = zip(*(mean_with_ci(counts[:, i])
                                  for i in range(counts.shape[1])))
    mean_incr, incr_hw = zip(*(mean_with_ci(increments[:, i])
                               for i in range(increments.shape[1])))
    return DecaySeries(
        t=t, norm=cfg.norm, ns=np.arange(counts.shape[1]),
        mean_counts=np.array(mean_counts),
        count_half_widths=np.array(count_hw),
        mean_increments=np.array(mean_incr),
        increment_half_widths=np.array(incr_hw),
        replicas=cfg.replicas,
    )


def uniqueness_experiment(cfg: ExperimentConfig, t: float) -> CrossingClusterHistogram:
    """Distribution of the number of disjoint side-to-side crossing clusters."""
    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["uniqueness"])

    def one(r: int) -> int:
        schedule = _run_model(cfg, lattice, stream, r)
        return count_crossing_clusters(config_at(schedule, t), lattice, cfg.axis)

    values = _replica_map(one, cfg.replicas, cfg.threads)
    hist: dict = {}
    for v in values:
        hist[v] = hist.get(v, 0) + 1
    return CrossingClusterHistogram(L=cfg.L, t=t, counts=dict(sorted(hist.items())),
                                    replicas=cfg.replicas)


def tree_survival(cfg: ExperimentConfig, t: float,
                  z: float = Z95) -> ProportionEstimate:
    """Fraction of replicas where the root reaches the deepest level at time t."""
    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    targets = lattice.vertices_at_depth(lattice.depth_max)
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["tree"])

    def one(r: int) -> bool:
        schedule = _run_model(cfg, lattice, stream, r)
        return connection_time(schedule, 0, targets).connected_at(t)

    hits = int(np.sum(_replica_map(one, cfg.replicas, cfg.threads)))
    lo, hi = wilson_interval(hits, cfg.replicas, z)
    return ProportionEstimate(value=hits / cfg.replicas, ci_low=lo, ci_high=hi,
                              successes=hits, replicas=cfg.replicas, z=z)


def tree_red_density(cfg: ExperimentConfig, z: float = Z95) -> tuple[float, float]:
    """Mean red-edge density over subtree edges with a full son set,
    with a normal CI over replicas."""
    from .trees import red_edge_analysis

    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["tree"], 1)

    def one(r: int) -> float:
        clocks = sample_clocks(lattice, stream, r)
        return red_edge_analysis(lattice, clocks).interior_red_density()

    densities = _replica_map(one, cfg.replicas, cfg.threads)
    return mean_with_ci(densities, z)


def simulate_schedules(cfg: ExperimentConfig) -> list:
    """Per-replica verdict summary rows for the simulate command."""
    cfg = cfg.validated()
    lattice = lattice_for(cfg)
    stream = rng.derive_seed(cfg.seed, STREAM_IDS["simulate"])

    def one(r: int):
        schedule = _run_model(cfg, lattice, stream, r)
        n_open = int(schedule.open_mask.sum())
        return (r, n_open, lattice.n_edges - n_open)

    return _replica_map(one, cfg.replicas, cfg.threads)
