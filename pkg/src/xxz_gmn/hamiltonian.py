"""Periodic ferromagnetic XXZ ring in a longitudinal field.

    H = -jx sum_j (Sx_j Sx_{j+1} + Sy_j Sy_{j+1}) - jz sum_j Sz_j Sz_{j+1} + b sum_j Sz_j

with S = sigma/2 and jz = 1 as the energy unit. The flip-flop part moves a
down spin across a bond with amplitude -jx/2, so every block of fixed
Hamming weight is closed under H.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .sector_basis import (
    DomainError,
    SectorBasis,
    check_sites,
    enumerate_sector,
    neighbor_pairs,
    rank,
)

FULL_MATRIX_MAX_SITES = 8


class CapabilityError(RuntimeError):
    """Requested size exceeds what an operation is meant to handle."""


@dataclass(frozen=True)
class ChainParams:
    n: int
    jx: float
    b: float = 0.0
    jz: float = 1.0

    def __post_init__(self):
        check_sites(self.n)
        if self.jz != 1.0:
            raise DomainError(f"jz is the energy unit and must be 1, got {self.jz}")
        if not self.jx > self.jz:
            warnings.warn(
                f"jx={self.jx} is outside the ferromagnetic easy-plane regime jx > jz > 0",
                stacklevel=3,
            )

    def with_field(self, b: float) -> "ChainParams":
        return replace(self, b=float(b))

    def with_coupling(self, jx: float) -> "ChainParams":
        return replace(self, jx=float(jx))


@dataclass(frozen=True)
class SectorMatrix:
    basis: SectorBasis
    entries: np.ndarray


def _spins(state: int, n: int) -> np.ndarray:
    # sigma_j = +1 for bit 0, -1 for bit 1
    return 1 - 2 * ((int(state) >> np.arange(n)) & 1)


def diagonal_energy(state: int, p: ChainParams) -> float:
    sig = _spins(state, p.n)
    zz = float(np.dot(sig, np.roll(sig, -1)))
    return -p.jz * zz / 4 + p.b * float(sig.sum()) / 2


def build_sector(p: ChainParams, k: int) -> SectorMatrix:
    """Dense block of H on the weight-``k`` configurations."""
    basis = enumerate_sector(p.n, k)
    dim = len(basis)
    m = np.zeros((dim, dim))
    hop = -p.jx / 2
    bonds = [(1 << (i - 1)) | (1 << (j - 1)) for i, j in neighbor_pairs(p.n)]
    for r, s in enumerate(basis.states):
        s = int(s)
        m[r, r] = diagonal_energy(s, p)
        for mask in bonds:
            pair = s & mask
            if pair and pair != mask:
                t = s ^ mask
                if t > s:
                    c = rank(t, basis)
                    m[r, c] = hop
                    m[c, r] = hop
    m.setflags(write=False)
    return SectorMatrix(basis=basis, entries=m)


def build_full(p: ChainParams) -> np.ndarray:
    """H in the full 2^n computational basis; an oracle for the sector blocks."""
    if p.n > FULL_MATRIX_MAX_SITES:
        raise CapabilityError(
            f"full matrix limited to n <= {FULL_MATRIX_MAX_SITES}, got n={p.n}"
        )
    dim = 1 << p.n
    h = np.zeros((dim, dim))
    bonds = [(1 << (i - 1)) | (1 << (j - 1)) for i, j in neighbor_pairs(p.n)]
    for s in range(dim):
        h[s, s] = diagonal_energy(s, p)
        for mask in bonds:
            pair = s & mask
            if pair and pair != mask:
                h[s ^ mask, s] = -p.jx / 2
    return h
