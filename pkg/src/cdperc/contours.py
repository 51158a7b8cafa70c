"""Exhaustive enumeration and classification of origin-surrounding dual
circuits on the planar lattice.

Coordinates: a dual vertex (i, j) stands for the plane point
(i + 1/2, j + 1/2), so the primal origin sits inside the dual face whose
lower-left corner is (-1, -1).  A contour is a closed self-avoiding
cycle of dual vertices surrounding that face.

For a contour with n bonds we track r, the number of straight sides,
and m, the number of sides of length one.  The census enumerates every
contour with n <= n_max exactly once, anchored at its lexicographically
smallest vertex and traversed counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

DEFAULT_CONTOUR_BUDGET = 14

_UNIT_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class BudgetError(RuntimeError):
    """Enumeration request exceeds the configured budget."""


class AnomalyInjectionError(RuntimeError):
    """The unit-to-anomalous injection could not be built for a contour.

    Carries the offending contour verbatim for inspection.
    """

    def __init__(self, contour: "Contour", reason: str):
        self.contour = contour
        self.reason = reason
        super().__init__(f"{reason}; contour vertices: {contour.vertices}")


def _norm_edge(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=True)
class Contour:
    """Closed self-avoiding dual circuit around the origin, in canonical form.

    ``vertices`` lists each vertex once; the closing edge back to the
    first vertex is implicit.  Canonical form starts at the
    lexicographically smallest vertex and runs counterclockwise.
    """

    vertices: tuple

    @classmethod
    def from_vertices(cls, seq, require_origin: bool = True) -> "Contour":
        """Build and canonicalize from any closed traversal.

        Accepts the repeated-endpoint convention (last vertex equal to
        the first) or the open convention; validates the circuit and
        rotates/reflects the traversal into canonical form.
        """
        verts = [tuple(int(c) for c in v) for v in seq]
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 4:
            raise ValueError("a contour needs at least 4 bonds")
        if len(set(verts)) != len(verts):
            raise ValueError("contour is not self-avoiding")
        l = len(verts)
        for i in range(l):
            dx = verts[(i + 1) % l][0] - verts[i][0]
            dy = verts[(i + 1) % l][1] - verts[i][1]
            if (dx, dy) not in _UNIT_STEPS:
                raise ValueError("consecutive contour vertices must be adjacent")
        # anchor at the lexicographic minimum
        pivot = verts.index(min(verts))
        verts = verts[pivot:] + verts[:pivot]
        # orient counterclockwise (positive signed area)
        area2 = sum(verts[i][0] * verts[(i + 1) % l][1]
                    - verts[(i + 1) % l][0] * verts[i][1] for i in range(l))
        if area2 < 0:
            verts = [verts[0]] + verts[1:][::-1]
        contour = cls(vertices=tuple(verts))
        if require_origin and not contour.surrounds_origin:
            raise ValueError("contour does not surround the origin")
        return contour

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def directions(self) -> tuple:
        l = self.n
        return tuple(
            (self.vertices[(i + 1) % l][0] - self.vertices[i][0],
             self.vertices[(i + 1) % l][1] - self.vertices[i][1])
            for i in range(l)
        )

    @cached_property
    def r(self) -> int:
        d = self.directions
        return sum(d[i] != d[i - 1] for i in range(self.n))

    @cached_property
    def m(self) -> int:
        d = self.directions
        l = self.n
        return sum(d[i] != d[i - 1] and d[(i + 1) % l] != d[i] for i in range(l))

    @cached_property
    def edges(self) -> frozenset:
        l = self.n
        return frozenset(
            _norm_edge(self.vertices[i], self.vertices[(i + 1) % l])
            for i in range(l)
        )

    def edge_at(self, i: int):
        return _norm_edge(self.vertices[i], self.vertices[(i + 1) % self.n])

    @cached_property
    def surrounds_origin(self) -> bool:
        """Even-odd ray test against the origin face.

        Casts a ray from (-1/2, -1/2) in the +x direction; only vertical
        bonds at height j = -1 with i >= 0 cross it.
        """
        crossings = 0
        for (a, b) in self.edges:
            if a[0] == b[0] and a[0] >= 0 and min(a[1], b[1]) == -1:
                crossings += 1
        return crossings % 2 == 1


def enumerate_contours(n_max: int, budget: int = DEFAULT_CONTOUR_BUDGET) -> dict:
    """Exhaustive census {(n, r, m): [contours]} for all n <= n_max.

    Depth-first search over self-avoiding dual cycles, each generated
    exactly once from its lexicographically smallest vertex: from there
    the cycle necessarily uses the +x and +y edges, so starting with +x
    fixes the counterclockwise traversal.  Pruning: no vertex below the
    anchor, return distance must stay reachable, and the bounding-box
    half-perimeter can never exceed n_max.
    """
    if n_max > budget:
        raise BudgetError(f"n_max={n_max} exceeds the census budget {budget}")
    census: dict = {}
    if n_max < 4:
        return census
    half = n_max // 2
    for ax in range(-half, 0):
        for ay in range(-half, half):
            _anchored_cycles((ax, ay), n_max, census)
    return {key: census[key] for key in sorted(census)}


def _anchored_cycles(anchor, n_max, census) -> None:
    ax, ay = anchor
    start = (ax + 1, ay)
    path = [anchor, start]
    on_path = {anchor, start}
    bbox = [ax, ax + 1, ay, ay]    # min_x, max_x, min_y, max_y

    def extend():
        w = path[-1]
        used = len(path) - 1
        for dx, dy in _UNIT_STEPS:
            u = (w[0] + dx, w[1] + dy)
            if u == anchor:
                if used + 1 >= 4:
                    _record(path, census)
                continue
            if u in on_path or u < anchor:
                continue
            dist = abs(u[0] - ax) + abs(u[1] - ay)
            if used + 1 + dist > n_max:
                continue
            nbx = (min(bbox[0], u[0]), max(bbox[1], u[0]),
                   min(bbox[2], u[1]), max(bbox[3], u[1]))
            if 2 * (nbx[1] - nbx[0] + nbx[3] - nbx[2]) > n_max:
                continue
            saved = bbox[:]
            bbox[0], bbox[1], bbox[2], bbox[3] = nbx
            path.append(u)
            on_path.add(u)
            extend()
            on_path.discard(u)
            path.pop()
            bbox[0], bbox[1], bbox[2], bbox[3] = saved

    extend()


def _record(path, census) -> None:
    contour = Contour(vertices=tuple(path))
    if not contour.surrounds_origin:
        return
    key = (contour.n, contour.r, contour.m)
    census.setdefault(key, []).append(contour)


def census_counts(census: dict) -> dict:
    return {key: len(v) for key, v in census.items()}


# ---------------------------------------------------------------------------
# Anchored-path counting bound on census cells
# ---------------------------------------------------------------------------

def path_count_bound(n: int, r: int, m: int, strict: bool = False) -> int:
    """Upper bound (n^2/4) * 2^r * C(r, m) * C(n-r-1, r-m-1) on a census cell.

    The last factor counts compositions of n - m into r - m parts of
    size >= 2.  At the corner r == m that is an empty composition: one
    solution when n == m, none otherwise.  ``strict=True`` instead reads
    the degenerate binomial as plain zero; both readings are exported so
    the census can report them side by side.
    """
    if n < 4 or m < 0 or m > r or r > n:
        raise ValueError("need n >= 4 and 0 <= m <= r <= n")
    if r == m:
        tail = 0 if strict else (1 if n == m else 0)
    elif n - r - 1 < 0:
        tail = 0
    else:
        tail = math.comb(n - r - 1, r - m - 1)
    return (n * n // 4) * (2 ** r) * math.comb(r, m) * tail


# ---------------------------------------------------------------------------
# Anomaly templates and edge classification
# ---------------------------------------------------------------------------

# Base triplets of dual bonds, lower-left-corner coordinates.  Each has the
# same central bond; a full appearance of any image inside a contour forces
# a late clock on the primal partner of every bond in the image.
_TEMPLATE_EDGES = (
    # three stacked parallels
    ((((-1, -1), (0, -1)), ((-1, 0), (0, 0)), ((-1, 1), (0, 1))),
     ((-1, 0), (0, 0))),
    # stacked pair plus a perpendicular leaving away from the pair
    ((((-1, -1), (0, -1)), ((-1, 0), (0, 0)), ((-1, 0), (-1, 1))),
     ((-1, 0), (0, 0))),
    # staircase: perpendiculars on opposite ends and opposite sides
    ((((0, -1), (0, 0)), ((-1, 0), (0, 0)), ((-1, 0), (-1, 1))),
     ((-1, 0), (0, 0))),
)

_POINT_GROUP = (
    lambda x, y: (x, y),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (-x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, x),
    lambda x, y: (y, -x),
    lambda x, y: (-y, -x),
)


def _template_variants():
    """Distinct point-group images of the three base triplets.

    Each variant is (template_id, transform_id, edges, center) with
    coordinates normalized so the smallest edge corner sits at (0, 0).
    """
    variants = []
    seen = set()
    for t_id, (edges, center) in enumerate(_TEMPLATE_EDGES):
        for f_id, f in enumerate(_POINT_GROUP):
            mapped = [_norm_edge(f(*a), f(*b)) for (a, b) in edges]
            c = _norm_edge(f(*center[0]), f(*center[1]))
            base = min(min(e) for e in mapped)
            shift = (-base[0], -base[1])
            mapped = tuple(sorted(_shift_edge(e, shift) for e in mapped))
            c = _shift_edge(c, shift)
            if mapped in seen:
                continue
            seen.add(mapped)
            variants.append((t_id, f_id, mapped, c))
    return tuple(variants)


def _shift_edge(edge, shift):
    (a, b) = edge
    return ((a[0] + shift[0], a[1] + shift[1]), (b[0] + shift[0], b[1] + shift[1]))


_VARIANTS = _template_variants()


@dataclass(frozen=True)
class AnomalyInstance:
    template_id: int
    transform_id: int
    shift: tuple
    edges: frozenset
    center: tuple


@dataclass(frozen=True)
class ContourClassification:
    """Partition of a contour's bonds.

    ``anomalous`` bonds belong to a fully present template image;
    ``unit`` are the length-one sides (may overlap anomalous);
    ``straight`` are interior bonds of long sides, ``corner`` the
    remaining bonds adjacent to a turn -- both already excluding
    anomalous bonds.  Every bond falls in exactly one of anomalous,
    straight, corner, or unit-minus-anomalous.
    """

    contour: Contour
    anomalous: frozenset
    unit: frozenset
    straight: frozenset
    corner: frozenset
    instances: tuple

    @property
    def counts(self):
        return (len(self.anomalous), len(self.unit),
                len(self.straight), len(self.corner))


def classify_contour(contour: Contour) -> ContourClassification:
    edges = contour.edges
    d = contour.directions
    l = contour.n

    instances = []
    seen_images = set()
    for e in edges:
        vertical = e[0][0] == e[1][0]
        for (t_id, f_id, t_edges, t_center) in _VARIANTS:
            for te in t_edges:
                if (te[0][0] == te[1][0]) != vertical:
                    continue
                shift = (e[0][0] - te[0][0], e[0][1] - te[0][1])
                image = frozenset(_shift_edge(x, shift) for x in t_edges)
                if image in seen_images or not image <= edges:
                    continue
                seen_images.add(image)
                instances.append(AnomalyInstance(
                    template_id=t_id, transform_id=f_id, shift=shift,
                    edges=image, center=_shift_edge(t_center, shift)))

    anomalous = frozenset().union(*(inst.edges for inst in instances)) \
        if instances else frozenset()

    unit, straight, corner = set(), set(), set()
    for i in range(l):
        e = contour.edge_at(i)
        prev_turn = d[i] != d[i - 1]
        next_turn = d[(i + 1) % l] != d[i]
        if prev_turn and next_turn:
            unit.add(e)
        elif not prev_turn and not next_turn:
            if e not in anomalous:
                straight.add(e)
        else:
            if e not in anomalous:
                corner.add(e)

    cls = ContourClassification(
        contour=contour,
        anomalous=anomalous,
        unit=frozenset(unit),
        straight=frozenset(straight),
        corner=frozenset(corner),
        instances=tuple(instances),
    )
    assert len(cls.unit) == contour.m
    total = (len(cls.anomalous) + len(cls.straight) + len(cls.corner)
             + len(cls.unit - cls.anomalous))
    assert total == contour.n
    return cls


def injection_domain(contour: Contour) -> bool:
    """Contours covered by the anomaly-count lower bound: r > 4 or m != 2."""
    return contour.r > 4 or contour.m != 2


def anomaly_injection(contour: Contour,
                      classification: ContourClassification | None = None) -> dict:
    """Injective map from unit bonds into anomalous bonds.

    Unit bonds that are themselves anomalous map to themselves.  A
    non-anomalous unit bond necessarily sits in a U-turn (a staircase
    flank would make it anomalous); it maps to the last bond of the
    shorter adjacent straight run, which must be anomalous.  Raises
    AnomalyInjectionError, quoting the contour, if the target is not
    anomalous or the map collides.
    """
    if not injection_domain(contour):
        raise ValueError("injection is only defined when r > 4 or m != 2")
    cls = classification or classify_contour(contour)
    d = contour.directions
    l = contour.n

    mapping = {}
    for i in range(l):
        e = contour.edge_at(i)
        if e not in cls.unit:
            continue
        if e in cls.anomalous:
            mapping[e] = e
            continue
        w = d[(i + 1) % l]                      # outgoing flank direction
        if (-d[i - 1][0], -d[i - 1][1]) != w:
            raise AnomalyInjectionError(
                contour, f"unit bond {e} is not a U-turn yet not anomalous")
        lp = 1
        while d[(i + lp) % l] == w:
            lp += 1
        ls = 1
        while (-d[(i - ls) % l][0], -d[(i - ls) % l][1]) == w:
            ls += 1
        if lp <= ls:
            target = contour.edge_at((i + lp - 1) % l)
        else:
            target = contour.edge_at((i - ls + 1) % l)
        if target not in cls.anomalous:
            raise AnomalyInjectionError(
                contour, f"injection target {target} for unit bond {e} "
                         f"is not anomalous")
        mapping[e] = target

    if len(set(mapping.values())) != len(mapping):
        raise AnomalyInjectionError(contour, "injection is not injective")
    return mapping


# ---------------------------------------------------------------------------
# Census-wide verification report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusCellReport:
    n: int
    r: int
    m: int
    count: int
    bound: int
    bound_strict: int
    bound_ok: bool
    anomaly_checked: int
    anomaly_failures: tuple


def verify_census(census: dict) -> list:
    """Per-cell count bound and anomaly-floor verification.

    For every contour with r > 4 or m != 2 the anomalous-bond count must
    reach the unit-bond count, witnessed by an explicit injection;
    failures are collected (not raised) and reported verbatim.
    """
    report = []
    for (n, r, m), contours in sorted(census.items()):
        count = len(contours)
        bound = path_count_bound(n, r, m)
        failures = []
        checked = 0
        for gamma in contours:
            if not injection_domain(gamma):
                continue
            checked += 1
            cls = classify_contour(gamma)
            if len(cls.anomalous) < len(cls.unit):
                failures.append((gamma, "fewer anomalous than unit bonds"))
                continue
            try:
                anomaly_injection(gamma, cls)
            except AnomalyInjectionError as err:
                failures.append((gamma, err.reason))
        report.append(CensusCellReport(
            n=n, r=r, m=m, count=count,
            bound=bound, bound_strict=path_count_bound(n, r, m, strict=True),
            bound_ok=count <= bound,
            anomaly_checked=checked,
            anomaly_failures=tuple(failures),
        ))
    return report
