"""GME concurrence of pure states from reduced-state purities."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .eigensolver import PureState
from .sector_basis import DomainError

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Bipartition:
    alpha: tuple[int, ...]
    canonical: bool = True

    def complement(self, n: int) -> tuple[int, ...]:
        return tuple(j for j in range(1, n + 1) if j not in self.alpha)

    def label(self) -> str:
        return "+".join(str(j) for j in self.alpha)


def canonical_partition(alpha, n: int) -> Bipartition:
    """Representative of {alpha, complement}: the smaller side, then lexicographic."""
    alpha = tuple(sorted(set(alpha)))
    if not alpha or len(alpha) >= n or alpha[0] < 1 or alpha[-1] > n:
        raise DomainError(f"{alpha} is not a nonempty proper subset of 1..{n}")
    comp = tuple(j for j in range(1, n + 1) if j not in alpha)
    rep = min((alpha, comp), key=lambda a: (len(a), a))
    return Bipartition(rep, canonical=True)


def enumerate_bipartitions(n: int) -> list[Bipartition]:
    """The 2^(n-1) - 1 canonical bipartitions, by subset size then lexicographic."""
    if n < 2:
        raise DomainError(f"need n >= 2 sites to split, got {n}")
    out = []
    for m in range(1, n // 2 + 1):
        for alpha in combinations(range(1, n + 1), m):
            # at m = n/2 keep the half that contains site 1
            if 2 * m == n and alpha[0] != 1:
                continue
            out.append(Bipartition(alpha))
    return out


def amplitude_matrix(g: PureState, alpha) -> np.ndarray:
    """Reshape amplitudes into A[alpha configuration, complement configuration]."""
    alpha = [j - 1 for j in alpha]
    comp = [j for j in range(g.n) if j not in alpha]
    bits = g.bits
    weights_a = 1 << np.arange(len(alpha))
    weights_c = 1 << np.arange(len(comp))
    ia = bits[:, alpha] @ weights_a if alpha else np.zeros(len(bits), dtype=int)
    ic = bits[:, comp] @ weights_c if comp else np.zeros(len(bits), dtype=int)
    a = np.zeros((1 << len(alpha), 1 << len(comp)))
    a[ia, ic] = g.amplitudes
    return a


def reduced_purity(g: PureState, part: Bipartition | tuple) -> float:
    """Tr(rho_alpha^2) = ||A A^T||_F^2, computed on the smaller side."""
    alpha = part.alpha if isinstance(part, Bipartition) else tuple(part)
    a = amplitude_matrix(g, alpha)
    if a.shape[0] > a.shape[1]:
        a = a.T
    rho = a @ a.T
    return float(np.sum(rho * rho))


@dataclass(frozen=True)
class ConcurrenceResult:
    value: float
    minimizing_partition: Bipartition
    per_partition: list

    @property
    def genuinely_entangled(self) -> bool:
        return self.value > 1e-9


def gme_concurrence(g: PureState) -> ConcurrenceResult:
    """sqrt of the smallest linear entropy 1 - Tr(rho_alpha^2) over all bipartitions."""
    parts = enumerate_bipartitions(g.n)
    entropies = [(p, min(max(1.0 - reduced_purity(g, p), 0.0), 1.0)) for p in parts]
    lowest = min(e for _, e in entropies)
    # lexicographically smallest alpha among numerical ties
    best = min((p for p, e in entropies if e - lowest <= TIE_TOL), key=lambda p: p.alpha)
    return ConcurrenceResult(
        value=float(np.sqrt(lowest)),
        minimizing_partition=best,
        per_partition=entropies,
    )
