"""Sector ground states and the global ground state of the ring."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .hamiltonian import ChainParams, SectorMatrix, build_sector
from .sector_basis import DomainError, enumerate_sector

RESIDUAL_TOL = 1e-10
JACOBI_TOL = 1e-12
BOUNDARY_TOL = 1e-6


class NumericalError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class BracketError(ValueError):
    """Bisection bracket does not straddle a sector change."""


@dataclass(frozen=True)
class PureState:
    """Real pure state given by its nonzero computational-basis amplitudes."""

    n: int
    configs: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)

    @property
    def bits(self) -> np.ndarray:
        return ((self.configs[:, None] >> np.arange(self.n)) & 1).astype(np.int8)

    def dense(self) -> np.ndarray:
        psi = np.zeros(1 << self.n)
        psi[self.configs] = self.amplitudes
        return psi


@dataclass(frozen=True)
class GroundState(PureState):
    k: int = 0
    energy: float = float("nan")
    degenerate: bool = False
    gap: float = float("nan")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def dicke_state(n: int, k: int) -> GroundState:
    """Uniform superposition of all weight-``k`` configurations."""
    basis = enumerate_sector(n, k)
    amps = np.full(len(basis), comb(n, k) ** -0.5)
    return GroundState(n=n, configs=basis.states, amplitudes=_frozen(amps), k=k)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # argmax returns the lowest index among equal magnitudes
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _off_norm(a: np.ndarray) -> float:
    # explicit, not ||a||^2 - ||diag||^2, which cancels catastrophically near convergence
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` sorted ascending, eigenvectors as
    columns. Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||a||_F``.
    """
    a = np.array(a, dtype=float)
    dim = a.shape[0]
    v = np.eye(dim)
    scale = np.linalg.norm(a)
    if dim == 1 or scale == 0.0:
        return np.diag(a).copy(), v
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off < tol * scale:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        raise NumericalError("Jacobi sweeps did not converge", off)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def sector_ground(m: SectorMatrix | np.ndarray, method: str = "lapack") -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a symmetric block.

    ``method`` is ``"lapack"`` (numpy ``eigh``) or ``"jacobi"``. The returned
    vector has unit norm and its largest-magnitude entry positive.
    """
    h = m.entries if isinstance(m, SectorMatrix) else np.asarray(m, dtype=float)
    if method == "lapack":
        w, vecs = np.linalg.eigh(h)
    elif method == "jacobi":
        w, vecs = jacobi_eigh(h)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    e = float(w[0])
    v = vecs[:, 0]
    v = _fix_sign(v / np.linalg.norm(v))
    residual = float(np.max(np.abs(h @ v - e * v)))
    if residual > RESIDUAL_TOL * max(1.0, abs(e)):
        raise NumericalError("sector eigenpair failed residual check", residual)
    return e, v


@lru_cache(maxsize=512)
def _zero_field_ground(n: int, jx: float, jz: float, k: int) -> tuple[float, np.ndarray]:
    e, v = sector_ground(build_sector(ChainParams(n, jx, 0.0, jz), k))
    return e, _frozen(v)


def _field_shift(p: ChainParams, k: int) -> float:
    # b * sum_j S^z_j is constant on a sector
    return p.b * (p.n / 2 - k)


def sector_energies(p: ChainParams) -> np.ndarray:
    """Lowest energy in every sector k = 0..n."""
    return np.array(
        [_zero_field_ground(p.n, p.jx, p.jz, k)[0] + _field_shift(p, k) for k in range(p.n + 1)]
    )


def global_ground(p: ChainParams) -> GroundState:
    """Ground state over all sectors; ties within tolerance go to the smaller k.

    Sector blocks are diagonalized at zero field and shifted, since the field
    term commutes with the rest of H and only moves whole sectors.
    """
    energies = sector_energies(p)
    order = np.argsort(energies, kind="stable")
    best, second = int(order[0]), int(order[1])
    e_min = float(energies[best])
    tol = 1e-9 * max(1.0, abs(e_min))
    ties = [k for k in range(p.n + 1) if energies[k] - e_min <= tol]
    k = min(ties)
    gap = float(energies[second] - energies[best])
    basis = enumerate_sector(p.n, k)
    vec = _zero_field_ground(p.n, p.jx, p.jz, k)[1]
    return GroundState(
        n=p.n,
        configs=basis.states,
        amplitudes=vec,
        k=k,
        energy=float(energies[k]),
        degenerate=len(ties) > 1,
        gap=gap,
    )


def sector_window_k1(p: ChainParams) -> tuple[float, float]:
    """Closed-form field window (jz - jx, (n-3)(jz - jx)/(n-1)) quoted for k = 1.

    The lower edge is exact. The upper edge is the jx -> jz limit of the true
    k=1/k=2 crossing; use :func:`locate_boundary` for the actual value.
    """
    if not p.jx > p.jz:
        raise DomainError(f"window defined only for jx > jz, got jx={p.jx}, jz={p.jz}")
    d = p.jz - p.jx
    return d, (p.n - 3) * d / (p.n - 1)


def locate_boundary(
    p: ChainParams,
    k_left: int,
    k_right: int,
    b_lo: float,
    b_hi: float,
    tol: float = BOUNDARY_TOL,
) -> float:
    """Bisect on the ground sector for the field where ``k_left`` stops being ground."""
    k_lo = global_ground(p.with_field(b_lo)).k
    k_hi = global_ground(p.with_field(b_hi)).k
    if k_lo == k_hi:
        raise BracketError(f"ground sector is k={k_lo} at both b={b_lo} and b={b_hi}")
    if k_lo != k_left or k_hi != k_right:
        raise BracketError(
            f"bracket has sectors ({k_lo}, {k_hi}), expected ({k_left}, {k_right})"
        )
    lo, hi = float(b_lo), float(b_hi)
    while hi - lo > tol / 8:
        mid = 0.5 * (lo + hi)
        if global_ground(p.with_field(mid)).k == k_left:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sector_boundaries(p: ChainParams) -> list[tuple[int, int, float]]:
    """All ground-sector changes along the field axis, as ``(k_left, k_right, b)``.

    Sector energies are linear in b with slope n/2 - k, so the lower envelope
    brackets each crossing; the crossing itself is then found by bisection.
    """
    e0 = np.array([_zero_field_ground(p.n, p.jx, p.jz, k)[0] for k in range(p.n + 1)])
    slope = p.n / 2 - np.arange(p.n + 1)
    # walk the lower envelope from b -> -inf (k = 0, steepest positive slope)
    cuts = []
    k = 0
    while k < p.n:
        cand = [(float((e0[j] - e0[k]) / (slope[k] - slope[j])), j) for j in range(k + 1, p.n + 1)]
        b_cross = min(c for c, _ in cand)
        # on ties take the farthest sector; intermediate ones never win
        j = max(j for c, j in cand if c - b_cross <= 1e-12 * max(1.0, abs(b_cross)))
        cuts.append((k, j, b_cross))
        k = j
    out = []
    for i, (kl, kr, bc) in enumerate(cuts):
        left = cuts[i - 1][2] if i else bc - 1.0
        right = cuts[i + 1][2] if i + 1 < len(cuts) else bc + 1.0
        half = 0.5 * min(bc - left, right - bc, 1.0)
        out.append((kl, kr, locate_boundary(p, kl, kr, bc - half, bc + half)))
    return out
