"""Deterministic, splittable random streams for replica experiments.

Every random quantity in this package is a pure function of
``(master seed, experiment id, stream indices...)``.  Child seeds are
derived with a SplitMix64 finalizer chain so that independent replicas
get independent, reproducible Philox streams:

    child = mix64(... mix64(mix64(master) ^ part_1) ... ^ part_n)

where ``mix64`` is the SplitMix64 output function

    z = (x + 0x9E3779B97F4A7C15) mod 2^64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    z = z ^ (z >> 31)

The uniform variates themselves come from numpy's Philox4x64-10 counter
generator keyed by the child seed, reading float64 values as
``(next_uint64 >> 11) * 2**-53``.  Both halves are platform independent,
so equal seeds reproduce equal streams bit for bit everywhere.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 output function on a 64-bit lane."""
    z = (x + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(master_seed: int, *parts: int) -> int:
    """Fold ``parts`` into ``master_seed``, one mix64 round per part.

    The chain is order sensitive: derive_seed(s, a, b) != derive_seed(s, b, a)
    except on hash collisions.
    """
    z = mix64(master_seed & MASK64)
    for p in parts:
        z = mix64(z ^ (p & MASK64))
    return z


def uniform_stream(child_seed: int, n: int) -> np.ndarray:
    """``n`` float64 uniforms in [0, 1) from a Philox stream keyed by seed."""
    gen = np.random.Generator(np.random.Philox(key=child_seed & MASK64))
    return gen.random(n, dtype=np.float64)


def open_unit_uniforms(child_seed: int, n: int) -> np.ndarray:
    """Uniforms guaranteed inside the open interval (0, 1), pairwise distinct.

    Exact zeros (probability 2^-53 per draw) are bumped to the smallest
    positive double.  Ties are broken by nudging the later array index up
    by one ulp, repeatedly, so the result is a deterministic function of
    the seed alone.
    """
    u = uniform_stream(child_seed, n)
    tiny = np.nextafter(0.0, 1.0)
    u[u == 0.0] = tiny
    return break_ties(u)


def break_ties(values: np.ndarray) -> np.ndarray:
    """Perturb duplicates so all entries are distinct.

    On a tie the entry with the larger array index is moved up by the
    smallest representable increment; the pass repeats until no ties
    remain (in practice it never runs even once on sampled doubles).
    """
    out = np.asarray(values, dtype=np.float64).copy()
    while True:
        order = np.argsort(out, kind="stable")
        srt = out[order]
        dup = srt[1:] == srt[:-1]
        if not dup.any():
            return out
        # stable sort puts the smaller index first within a tie
        bump = order[1:][dup]
        out[bump] = np.nextafter(out[bump], np.inf)
