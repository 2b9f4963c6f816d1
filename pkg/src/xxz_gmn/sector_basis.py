"""Fixed-magnetization basis of an n-site spin-1/2 ring.

Configurations are plain integers. Site j (1-based) lives in bit j-1, and a
set bit is a down spin (S^z = -1/2). Within a sector of Hamming weight k the
states are kept in ascending integer order, which is the colex order of the
k-subsets, so ranking is a sum of binomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

MIN_SITES = 3
MAX_SITES = 12


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


def check_sites(n: int, lo: int = MIN_SITES, hi: int = MAX_SITES) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"site count must be an integer, got {n!r}")
    if not lo <= n <= hi:
        raise DomainError(f"site count n={n} outside [{lo}, {hi}]")
    return int(n)


def popcount(state: int) -> int:
    return int(state).bit_count()


@dataclass(frozen=True)
class SectorBasis:
    """All n-bit configurations with exactly ``k`` set bits, ascending."""

    n: int
    k: int
    states: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def bits(self) -> np.ndarray:
        """(dim, n) array of 0/1 occupations, column j is site j+1."""
        shifts = np.arange(self.n, dtype=np.int64)
        return ((self.states[:, None] >> shifts) & 1).astype(np.int8)

    def rank(self, state: int) -> int:
        return rank(state, self)


def enumerate_sector(n: int, k: int) -> SectorBasis:
    """Enumerate the weight-``k`` configurations of ``n`` sites in ascending order.

    >>> [format(s, "04b") for s in enumerate_sector(4, 2).states]
    ['0011', '0101', '0110', '1001', '1010', '1100']
    """
    n = check_sites(n, lo=1)
    if not 0 <= k <= n:
        raise DomainError(f"excitation number k={k} outside [0, n] for n={n}")
    states = sorted(sum(1 << j for j in sites) for sites in combinations(range(n), k))
    arr = np.array(states, dtype=np.int64)
    arr.setflags(write=False)
    return SectorBasis(n=n, k=k, states=arr)


def rank(state: int, basis: SectorBasis) -> int:
    """Index of ``state`` in ``basis.states`` via the combinatorial number system."""
    state = int(state)
    if state < 0 or state >> basis.n:
        raise DomainError(f"state {state} does not fit in {basis.n} bits")
    if popcount(state) != basis.k:
        raise DomainError(
            f"state {state:0{basis.n}b} has weight {popcount(state)}, sector has k={basis.k}"
        )
    r = 0
    i = 1
    pos = 0
    while state:
        if state & 1:
            r += comb(pos, i)
            i += 1
        state >>= 1
        pos += 1
    return r


def neighbor_pairs(n: int) -> list[tuple[int, int]]:
    """Periodic nearest-neighbour bonds as 1-based site pairs, each bond once."""
    if n < MIN_SITES:
        raise DomainError(f"periodic ring needs n >= {MIN_SITES} (n={n} double-counts bonds)")
    return [(j, j % n + 1) for j in range(1, n + 1)]
