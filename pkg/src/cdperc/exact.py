"""Randomness-free constants: exact ordering probabilities for the
corner-blocker events, the closed-contour tail parameter pack, and the
closed-form argmax of the inner series term.

The ordering probabilities are computed by literal enumeration of all
relative clock orders of the participating bonds (clock values enter
the events only through their order, which is exact for i.i.d. uniform
clocks), with results returned as reduced fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import chain, permutations

import numpy as np


@lru_cache(maxsize=4)
def permutation_table(n: int) -> np.ndarray:
    """All permutations of range(n) as an (n!, n) int8 array.

    Row p assigns rank p[i] to item i; iterating rows covers every
    relative order exactly once.
    """
    if n > 10:
        raise ValueError("permutation table capped at n=10")
    count = math.factorial(n)
    flat = np.fromiter(chain.from_iterable(permutations(range(n))),
                       dtype=np.int8, count=count * n)
    return flat.reshape(count, n)


def ordering_event_probability(n_items: int, conditions) -> Fraction:
    """P(every target rings after its whole blocker set).

    ``conditions`` is a list of (target_index, blocker_indices); the
    event is the intersection over all conditions of
    rank(target) > max over blockers of rank(blocker).  A blocked bond
    must outlast every bond of the saturating set, hence the max.
    """
    table = permutation_table(n_items)
    mask = np.ones(table.shape[0], dtype=bool)
    for target, blockers in conditions:
        blocker_max = table[:, list(blockers)].max(axis=1)
        mask &= table[:, target] > blocker_max
    return Fraction(int(mask.sum()), math.factorial(n_items))


# Participating bonds for the three corner-blocker cases.  Index layout:
# targets first (the primal partners of the corner-adjacent dual bonds),
# then the distinct blocker bonds of their X-sets.  Where two of the four
# dual bonds would share a frontal blocker with further corner bonds, the
# frontal blockers of the last two targets are dropped and only laterals
# kept, exactly as in the bound being verified.
_CASES = {
    # two corner bonds sharing one frontal blocker: targets e, f;
    # blockers: shared frontal s, lateral of e, lateral of f
    "shared-frontal": (5, (
        (0, (2, 3)),
        (1, (2, 4)),
    )),
    # four corner bonds, laterally entangled, first arrangement:
    # blockers 4..8 = frontal(e)=lateral(g), shared lateral(e,f),
    # frontal(f)=lateral(h), second lateral(f), second lateral(h)
    "case-I": (9, (
        (0, (4, 5)),
        (1, (5, 6, 7)),
        (2, (4,)),
        (3, (6, 8)),
    )),
    # second arrangement: blockers 4..8 = frontal(e)=lateral(g),
    # lateral(e), shared lateral(e,f), frontal(f)=lateral(h),
    # second lateral(h)
    "case-II": (9, (
        (0, (4, 5, 6)),
        (1, (6, 7)),
        (2, (4,)),
        (3, (7, 8)),
    )),
}

CORNER_CASES = tuple(_CASES)


def corner_blocker_probability(case: str) -> Fraction:
    """Exact probability of the joint corner-blocker ordering event."""
    try:
        n_items, conditions = _CASES[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}; choose from {CORNER_CASES}")
    return ordering_event_probability(n_items, conditions)


# ---------------------------------------------------------------------------
# Scalar parameter pack for the closed-contour tail bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeierlsParams:
    """Parameters of the geometric tail bound at evaluation time t.

    eps = (1-t)^(1/9); p is the fourth root of the case-I constant;
    alpha = 9 (p+eps)^2 / 2; beta is the limiting ratio of the argmax to
    the series index; delta is the per-step tail ratio.  The bound sums
    iff delta < 1 and the reported tail ratio eps_tilde / (1 - delta)
    controls the outer geometric series.
    """

    t: float
    eps: float
    p: float
    alpha: float
    eps_bar: float
    eps_tilde: float
    beta: float
    delta: float
    stirling_gap: float
    tail_ratio: float
    summable: bool


def peierls_eval(t: float) -> PeierlsParams:
    """Evaluate the tail-bound scalars and diagnostics at time t."""
    if not 0.0 < t <= 1.0:
        raise ValueError("t must lie in (0, 1]")
    eps = (1.0 - t) ** (1.0 / 9.0)
    p = float(corner_blocker_probability("case-I")) ** 0.25
    alpha = 9.0 * (p + eps) ** 2 / 2.0
    eps_bar = (2.0 / 3.0 + eps) * eps / p ** 2
    eps_tilde = (2.0 / 3.0 + eps) * alpha * eps_bar
    beta = 0.5 - 0.5 / math.sqrt(4.0 * alpha + 1.0)
    delta = (2.0 / 3.0 + eps) * (0.5 + 0.5 * math.sqrt(18.0 * (p + eps) ** 2 + 1.0))

    # closed form of the Stirling limit versus its direct evaluation
    lhs = ((1.0 - beta) ** (1.0 - beta)
           / (beta ** beta * (1.0 - 2.0 * beta) ** (1.0 - 2.0 * beta))
           * alpha ** beta)
    rhs = (1.0 - beta) / (1.0 - 2.0 * beta)
    gap = abs(lhs - rhs)

    summable = delta < 1.0
    tail_ratio = eps_tilde / (1.0 - delta) if summable else math.inf
    return PeierlsParams(t=t, eps=eps, p=p, alpha=alpha, eps_bar=eps_bar,
                         eps_tilde=eps_tilde, beta=beta, delta=delta,
                         stirling_gap=gap, tail_ratio=tail_ratio,
                         summable=summable)


# ---------------------------------------------------------------------------
# Argmax of the inner series term
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArgmaxCheck:
    k: int
    alpha: float
    scan: int
    closed_form: int
    agree: bool


def series_term_argmax(k: int, alpha: float) -> ArgmaxCheck:
    """Argmax over integer s in [1, k/2] of alpha^s * C(k-s-1, s-1).

    Compares a direct scan against the closed form ceil(r1), where r1 is
    the smaller root of the quadratic governing the term ratio
    f(s+1)/f(s):

        r1 = k/2 - (2*alpha + 1 + sqrt(Delta)) / (8*alpha + 2),
        Delta = (4*alpha + 1) k (k - 2) + (2*alpha + 1)^2.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    s_max = k // 2
    best_s, best_val = 1, -math.inf
    for s in range(1, s_max + 1):
        val = alpha ** s * math.comb(k - s - 1, s - 1)
        if val > best_val:
            best_s, best_val = s, val
    delta = (4.0 * alpha + 1.0) * k * (k - 2) + (2.0 * alpha + 1.0) ** 2
    r1 = k / 2.0 - (2.0 * alpha + 1.0 + math.sqrt(delta)) / (8.0 * alpha + 2.0)
    closed = max(1, math.ceil(r1))
    return ArgmaxCheck(k=k, alpha=alpha, scan=best_s, closed_form=closed,
                       agree=best_s == closed)
