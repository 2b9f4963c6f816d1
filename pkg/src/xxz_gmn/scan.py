"""Parameter sweeps over the ring and figure-ready CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from functools import partial

import numpy as np

from .bell_violation import AnalyticTarget, OptimizerConfig, maximize
from .concurrence import gme_concurrence
from .eigensolver import global_ground
from .hamiltonian import ChainParams

MODES = ("field-sweep", "coupling-sweep", "analytic-w", "point")
OUTPUTS = ("violation", "concurrence", "sector", "energy")
ANALYTIC_MAX_SITES = 64


class ConfigError(ValueError):
    """Invalid sweep configuration, raised before any computation."""


@dataclass(frozen=True)
class SweepConfig:
    n: int
    mode: str
    fixed: float = 0.0
    grid: tuple[float, float, int] = (0.0, 1.0, 2)
    seed: int = 0
    restarts: int = 8
    outputs: frozenset = frozenset({"violation", "concurrence"})
    n_min: int = 4
    workers: int = 1
    grid_points: int = OptimizerConfig.grid_points

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}")
        if self.restarts < 1:
            raise ConfigError("need at least one restart")
        if self.mode == "analytic-w":
            if not 4 <= self.n_min <= self.n <= ANALYTIC_MAX_SITES:
                raise ConfigError(
                    f"analytic range needs 4 <= n_min <= n <= {ANALYTIC_MAX_SITES}, "
                    f"got {self.n_min}..{self.n}"
                )
            return
        if not 3 <= self.n <= 12:
            raise ConfigError(f"exact diagonalization needs 3 <= n <= 12, got n={self.n}")
        if self.mode == "point":
            return
        lo, hi, count = self.grid
        if int(count) != count or count < 2:
            raise ConfigError(f"grid count must be an integer >= 2, got {count}")
        if not lo < hi:
            raise ConfigError(f"grid needs min < max, got ({lo}, {hi})")
        if self.mode == "coupling-sweep" and lo <= 1.0 * (1 + 1e-12):
            raise ConfigError(f"coupling grid must stay above jz = 1, got min {lo}")

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(grid_points=self.grid_points, restarts=self.restarts, seed=self.seed)

    def values(self) -> np.ndarray:
        lo, hi, count = self.grid
        return np.linspace(lo, hi, int(count))


@dataclass(frozen=True)
class ScanRecord:
    swept_value: float
    sector_k: int
    degenerate: bool
    energy: float
    violation: float | None = None
    theta1: float | None = None
    theta2: float | None = None
    theta3: float | None = None
    theta4: float | None = None
    concurrence: float | None = None
    min_partition: tuple | None = None


@dataclass(frozen=True)
class AnalyticRecord:
    n: int
    violation: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float


@dataclass(frozen=True)
class BoundaryRecord:
    k_left: int
    k_right: int
    b: float


def analyze_point(p: ChainParams, swept: float, outputs, opt: OptimizerConfig) -> ScanRecord:
    g = global_ground(p)
    extra = {}
    if "violation" in outputs:
        r = maximize(g, opt)
        t = r.angles
        extra.update(violation=r.value, theta1=t.theta1, theta2=t.theta2, theta3=t.theta3, theta4=t.theta4)
    if "concurrence" in outputs:
        c = gme_concurrence(g)
        extra.update(concurrence=c.value, min_partition=c.minimizing_partition.alpha)
    return ScanRecord(swept_value=float(swept), sector_k=g.k, degenerate=g.degenerate, energy=g.energy, **extra)


def _field_point(b, cfg: SweepConfig) -> ScanRecord:
    return analyze_point(ChainParams(cfg.n, cfg.fixed, b), b, cfg.outputs, cfg.optimizer())


def _coupling_point(jx, cfg: SweepConfig) -> ScanRecord:
    return analyze_point(ChainParams(cfg.n, jx, cfg.fixed), jx, cfg.outputs, cfg.optimizer())


def _run(fn, values, cfg: SweepConfig) -> list:
    work = partial(fn, cfg=cfg)
    values = [float(v) for v in values]
    if cfg.workers <= 1:
        return [work(v) for v in values]
    # map keeps grid order whatever the completion order
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(work, values))


def run_field_sweep(cfg: SweepConfig) -> list[ScanRecord]:
    if cfg.mode != "field-sweep":
        raise ConfigError(f"expected mode field-sweep, got {cfg.mode}")
    return _run(_field_point, cfg.values(), cfg)


def run_coupling_sweep(cfg: SweepConfig) -> list[ScanRecord]:
    if cfg.mode != "coupling-sweep":
        raise ConfigError(f"expected mode coupling-sweep, got {cfg.mode}")
    return _run(_coupling_point, cfg.values(), cfg)


def _analytic_point(n, cfg: SweepConfig) -> AnalyticRecord:
    r = maximize(AnalyticTarget(int(n)), cfg.optimizer())
    return AnalyticRecord(int(n), r.value, *r.angles.as_array().tolist())


def run_analytic_w(cfg: SweepConfig) -> list[AnalyticRecord]:
    if cfg.mode != "analytic-w":
        raise ConfigError(f"expected mode analytic-w, got {cfg.mode}")
    return _run(_analytic_point, range(cfg.n_min, cfg.n + 1), cfg)


def run_point(cfg: SweepConfig, jx: float, b: float) -> ScanRecord:
    if cfg.mode != "point":
        raise ConfigError(f"expected mode point, got {cfg.mode}")
    return analyze_point(ChainParams(cfg.n, jx, b), b, cfg.outputs, cfg.optimizer())


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    if isinstance(value, tuple):
        return "+".join(str(j) for j in value)
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.12g}")
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def columns(records) -> list[str]:
    """Field names that carry a value in at least one record, in declaration order."""
    names = [f.name for f in fields(records[0])]
    return [n for n in names if any(getattr(r, n) is not None for r in records)]


def render(records, fmt: str = "csv") -> str:
    if not records:
        raise ValueError("nothing to emit")
    cols = columns(records)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in records:
            writer.writerow([_fmt(getattr(r, c)) for c in cols])
        return buf.getvalue()
    if fmt == "json":
        rows = [{c: _jsonable(getattr(r, c)) for c in cols} for r in records]
        return json.dumps(rows, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(records, fmt: str = "csv", destination: str | None = None) -> None:
    """Write records to ``destination``, or standard output when it is None or '-'."""
    text = render(records, fmt)
    if destination in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(destination, "w", newline="") as fh:
        fh.write(text)
