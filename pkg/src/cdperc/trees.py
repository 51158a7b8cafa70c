"""Red bonds on regular trees.

Given uniform edge clocks on the d-ary tree, the binary subforest keeps
each edge with at most one earlier-ringing brother, and the subtree of
the root inside that forest is a complete binary tree.  An edge of that
subtree is red when at most two of its son edges ring before it; red
edges are guaranteed to open under the cap-3 dynamics, and their exact
density has a closed form that the ordering oracle below reproduces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .contours import BudgetError
from .dynamics import ClockAssignment
from .exact import permutation_table
from .lattice import LatticeSpec

ORACLE_MAX_ARITY = 5


def red_edge_conditionals(d: int) -> tuple[Fraction, Fraction]:
    """Exact P(red | first among brothers) and P(red | second among brothers)."""
    if d < 2:
        raise ValueError("tree arity must be >= 2")
    f = factorial
    total = f(2 * d)
    first = d * (Fraction(1, 2 * d)
                 + Fraction(d * f(2 * d - 2), total)
                 + Fraction(d * (d - 1) * f(2 * d - 3), total))
    second = d * (Fraction((d - 1) * f(2 * d - 2), total)
                  + Fraction(2 * d * (d - 1) * f(2 * d - 3), total)
                  + Fraction(3 * d * (d - 1) ** 2 * f(2 * d - 4), total))
    return first, second


def red_edge_probability(d: int) -> Fraction:
    """Exact probability that a subtree edge is red: the mean of the two
    equally likely brother-rank conditionals."""
    first, second = red_edge_conditionals(d)
    return (first + second) / 2


def red_edge_probability_oracle(d: int) -> Fraction:
    """Brute-force check over all (2d)! orders of the relevant clocks.

    The relevant clocks are the d brother edges at the top vertex
    (including the edge itself) and the d son edges below it.  The edge
    is in the subtree iff its brother rank is 0 or 1, red iff at most
    two sons ring earlier; both conditionals are exact ratios of
    permutation counts.
    """
    if d < 2:
        raise ValueError("tree arity must be >= 2")
    if d > ORACLE_MAX_ARITY:
        raise BudgetError(f"oracle enumerates (2d)! orders; capped at d={ORACLE_MAX_ARITY}")
    table = permutation_table(2 * d)
    own = table[:, :1]
    brothers_before = (table[:, 1:d] < own).sum(axis=1)
    sons_before = (table[:, d:] < own).sum(axis=1)
    red = sons_before <= 2
    first = brothers_before == 0
    second = brothers_before == 1
    p_first = Fraction(int((first & red).sum()), int(first.sum()))
    p_second = Fraction(int((second & red).sum()), int(second.sum()))
    return (p_first + p_second) / 2


# ---------------------------------------------------------------------------
# Forest and red-edge extraction from sampled clocks
# ---------------------------------------------------------------------------

def _sibling_rows(lattice: LatticeSpec, values: np.ndarray) -> np.ndarray:
    # heap layout: edges of the d children of parent p are p*d .. p*d+d-1
    return values.reshape(-1, lattice.d)


def binary_forest_mask(lattice: LatticeSpec, clocks: ClockAssignment) -> np.ndarray:
    """Edges with at most one earlier-ringing brother."""
    if lattice.kind != "tree":
        raise ValueError("forest membership is defined on trees")
    rows = _sibling_rows(lattice, clocks.values)
    order = np.argsort(rows, axis=1)
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(lattice.d)[None, :], axis=1)
    return (ranks <= 1).ravel()


def forest_membership(lattice: LatticeSpec, clocks: ClockAssignment,
                      edge_index: int) -> bool:
    """Single-edge query of the binary-forest rule."""
    if lattice.kind != "tree":
        raise ValueError("forest membership is defined on trees")
    group = edge_index // lattice.d
    row = clocks.values[group * lattice.d:(group + 1) * lattice.d]
    earlier = int((row < clocks.values[edge_index]).sum())
    return earlier <= 1


@dataclass(frozen=True)
class RedEdgeAnalysis:
    """Root-subtree membership and red status per edge.

    ``has_sons`` marks edges whose lower vertex keeps its full set of d
    sons inside the truncation; only those edges carry the exact red
    rate (edges into the last generation have no sons and are trivially
    red).
    """

    tree_edges: np.ndarray
    red: np.ndarray
    has_sons: np.ndarray

    def interior_red_density(self) -> float:
        base = self.tree_edges & self.has_sons
        if not base.any():
            raise ValueError("no subtree edges with a full son set")
        return float(self.red[base].mean())


def red_edge_analysis(lattice: LatticeSpec, clocks: ClockAssignment) -> RedEdgeAnalysis:
    if lattice.kind != "tree":
        raise ValueError("red edges are defined on trees")
    d = lattice.d
    values = clocks.values
    n_vertices = lattice.n_vertices
    n_parents = (n_vertices - 1) // d

    forest = binary_forest_mask(lattice, clocks)

    in_tree = np.zeros(n_vertices, dtype=bool)
    in_tree[0] = True
    start, width = 1, d
    while start < n_vertices:
        level = np.arange(start, min(start + width, n_vertices))
        parents = (level - 1) // d
        in_tree[level] = in_tree[parents] & forest[level - 1]
        start += width
        width *= d
    tree_edges = in_tree[1:]

    has_sons = np.zeros(n_vertices - 1, dtype=bool)
    has_sons[:n_parents - 1] = True      # child vertex e+1 internal
    sons_before = np.zeros(n_vertices - 1, dtype=np.int64)
    rows = _sibling_rows(lattice, values)
    inner = n_parents - 1
    sons_before[:inner] = (rows[1:n_parents] < values[:inner, None]).sum(axis=1)

    red = tree_edges & (~has_sons | (sons_before <= 2))
    return RedEdgeAnalysis(tree_edges=tree_edges, red=red, has_sons=has_sons)
