"""Sweep engine: grids over (n, t0), lambda, epsilon, delta with repetitions.

Each grid cell gets per-repetition RNG streams derived from
(master seed, cell index, rep index), so results are bit-reproducible and
independent of execution order. Records are emitted in (cell, rep) order and
floats are printed with 17 significant digits, making output bytes a pure
function of (config, seed).
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import (
    BoundInputs,
    rmse_bound_nonprivate,
    rmse_bound_objective,
    rmse_bound_output,
)
from .datagen import LinearPanelData, generate_linear_panel_detailed
from .mechanisms import DpscObjConfig, DpscOutConfig, default_c, dpsc_obj, dpsc_out
from .model import LatentModelSpec, rmse_post, validate_bounds
from .ridge import sc_fit_predict

__all__ = [
    "ConfigError",
    "SweepConfig",
    "SweepRecord",
    "AggregateRow",
    "run_sweep",
    "aggregate",
    "records_to_csv",
    "aggregates_to_csv",
    "write_sweep",
    "RECORD_HEADER",
    "AGGREGATE_HEADER",
    "ALGORITHMS",
]

ALGO_NONPRIVATE = "nonprivate"
ALGO_OUT = "dpsc_out"
ALGO_OBJ = "dpsc_obj"
ALGORITHMS = (ALGO_NONPRIVATE, ALGO_OUT, ALGO_OBJ)

RECORD_HEADER = (
    "algorithm,n,t0,T,lambda,eps1,eps2,delta,c,rep,seed,"
    "rmse_pre,rmse_post,bounded,theory_bound,eps0,delta_reg"
)
AGGREGATE_HEADER = (
    "algorithm,n,t0,T,lambda,eps1,eps2,delta,c,eps0,delta_reg,bounded,theory_bound,"
    "min_rmse_post,max_rmse_post,mean_rmse_pre,mean_rmse_post,ci_half_width,reps"
)

_CI_FACTOR = 1.96  # normal-approximation 95% interval

MODE_FIXED = "fixed_per_size"
MODE_FRESH = "fresh_per_cell"


class ConfigError(ValueError):
    """A sweep configuration field or grid value is invalid."""


@dataclass(frozen=True)
class SweepConfig:
    """Declarative sweep description; see README for the JSON form."""

    algorithms: tuple[str, ...] = ALGORITHMS
    sizes: tuple[tuple[int, int], ...] = ((10, 10),)  # (n, t0); T = t0 + horizon
    lambda_grid: tuple[float, ...] = (10.0,)
    eps_grid: tuple[float, ...] = (100.0,)  # total budget, split by eps_split
    delta_grid: tuple[float, ...] = (0.0,)
    reps: int = 500
    eps_split: float = 0.5
    seed: int = 0
    dataset_mode: str = MODE_FIXED
    horizon: int = 3
    c: Optional[float] = None
    model: LatentModelSpec = field(default_factory=LatentModelSpec)
    output: Optional[str] = None
    aggregate_output: Optional[str] = None

    def validate(self):
        if not self.algorithms:
            raise ConfigError("algorithms must be a nonempty subset of "
                              f"{sorted(ALGORITHMS)}")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r}")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if not (0.0 < self.eps_split < 1.0):
            raise ConfigError(f"eps_split must lie in (0, 1), got {self.eps_split}")
        if not self.sizes:
            raise ConfigError("sizes grid is empty")
        for idx, (n, t0) in enumerate(self.sizes):
            if n < 1 or t0 < 1:
                raise ConfigError(f"sizes[{idx}] = ({n}, {t0}): n and t0 must be >= 1")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not self.lambda_grid:
            raise ConfigError("lambda grid is empty")
        for idx, lam in enumerate(self.lambda_grid):
            if lam <= 0:
                raise ConfigError(f"lambda_grid[{idx}] = {lam}: lambda must be > 0")
        private = set(self.algorithms) & {ALGO_OUT, ALGO_OBJ}
        if private:
            if not self.eps_grid:
                raise ConfigError("eps grid is empty but private algorithms are requested")
            for idx, eps in enumerate(self.eps_grid):
                if eps <= 0:
                    raise ConfigError(f"eps_grid[{idx}] = {eps}: eps must be > 0")
        if ALGO_OBJ in self.algorithms:
            if not self.delta_grid:
                raise ConfigError("delta grid is empty but dpsc_obj is requested")
            for idx, delta in enumerate(self.delta_grid):
                if delta < 0:
                    raise ConfigError(f"delta_grid[{idx}] = {delta}: delta must be >= 0")
        if self.dataset_mode not in (MODE_FIXED, MODE_FRESH):
            raise ConfigError(f"unknown dataset_mode {self.dataset_mode!r}")
        if self.c is not None and self.c <= 0:
            raise ConfigError(f"c must be > 0, got {self.c}")

    @staticmethod
    def from_dict(doc: dict) -> "SweepConfig":
        known = {
            "algorithms", "sizes", "lambda_grid", "eps_grid", "delta_grid", "reps",
            "eps_split", "seed", "dataset_mode", "horizon", "c", "model", "output",
            "aggregate_output",
        }
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(doc)
        if "algorithms" in kwargs:
            kwargs["algorithms"] = tuple(kwargs["algorithms"])
        if "sizes" in kwargs:
            kwargs["sizes"] = tuple((int(n), int(t0)) for n, t0 in kwargs["sizes"])
        for grid in ("lambda_grid", "eps_grid", "delta_grid"):
            if grid in kwargs:
                kwargs[grid] = tuple(float(x) for x in kwargs[grid])
        if "model" in kwargs:
            kwargs["model"] = LatentModelSpec(**kwargs["model"])
        config = SweepConfig(**kwargs)
        config.validate()
        return config


@dataclass(frozen=True)
class Cell:
    index: int
    algorithm: str
    size_index: int
    grid_index: tuple[int, int, int]  # (lambda, eps, delta) positions
    n: int
    t0: int
    T: int
    lam: float
    eps1: Optional[float]
    eps2: Optional[float]
    delta: Optional[float]
    c: Optional[float]


@dataclass(frozen=True)
class SweepRecord:
    """One harness measurement row."""

    cell: int
    algorithm: str
    n: int
    t0: int
    T: int
    lam: float
    eps1: Optional[float]
    eps2: Optional[float]
    delta: Optional[float]
    c: Optional[float]
    rep: int
    seed: int
    rmse_pre: float
    rmse_post: float
    bounded: bool
    theory_bound: Optional[float]
    eps0: Optional[float] = None
    delta_reg: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.rmse_post) and self.rmse_post >= 0):
            raise ValueError("rmse_post must be finite and nonnegative")
        if not (math.isfinite(self.rmse_pre) and self.rmse_pre >= 0):
            raise ValueError("rmse_pre must be finite and nonnegative")


@dataclass(frozen=True)
class AggregateRow:
    algorithm: str
    n: int
    t0: int
    T: int
    lam: float
    eps1: Optional[float]
    eps2: Optional[float]
    delta: Optional[float]
    c: Optional[float]
    eps0: Optional[float]
    delta_reg: Optional[float]
    bounded: bool
    theory_bound: Optional[float]
    min_rmse_post: float
    max_rmse_post: float
    mean_rmse_pre: float
    mean_rmse_post: float
    ci_half_width: float
    reps: int


def _enumerate_cells(config: SweepConfig) -> list[Cell]:
    cells = []
    ordered = [a for a in ALGORITHMS if a in config.algorithms]
    index = 0
    for algorithm in ordered:
        for size_index, (n, t0) in enumerate(config.sizes):
            T = t0 + config.horizon
            c = None
            if algorithm == ALGO_OBJ:
                c = config.c if config.c is not None else default_c(n, t0)
            for li, lam in enumerate(config.lambda_grid):
                if algorithm == ALGO_NONPRIVATE:
                    cells.append(Cell(index, algorithm, size_index, (li, -1, -1),
                                      n, t0, T, lam, None, None, None, None))
                    index += 1
                    continue
                for ei, eps in enumerate(config.eps_grid):
                    eps1 = config.eps_split * eps
                    eps2 = (1.0 - config.eps_split) * eps
                    if algorithm == ALGO_OUT:
                        cells.append(Cell(index, algorithm, size_index, (li, ei, -1),
                                          n, t0, T, lam, eps1, eps2, 0.0, None))
                        index += 1
                        continue
                    for di, delta in enumerate(config.delta_grid):
                        cells.append(Cell(index, algorithm, size_index, (li, ei, di),
                                          n, t0, T, lam, eps1, eps2, delta, c))
                        index += 1
    return cells


def _dataset_for(config: SweepConfig, cell: Cell,
                 cache: dict) -> LinearPanelData:
    if config.dataset_mode == MODE_FIXED:
        key = ("size", cell.size_index)
        spawn = (0, cell.size_index)
    else:
        key = ("cell", cell.size_index, cell.grid_index)
        spawn = (1, cell.size_index, *[i + 1 for i in cell.grid_index])
    if key not in cache:
        seq = np.random.SeedSequence(entropy=config.seed, spawn_key=spawn)
        cache[key] = generate_linear_panel_detailed(
            cell.n, cell.t0, cell.T, config.model, seed=seq
        )
    return cache[key]


def _cell_bound_inputs(cell: Cell, data: LinearPanelData, psi: float) -> BoundInputs:
    truth = data.panel.truth
    m_post_norm = float(np.linalg.norm(truth.M[:, cell.t0:], 2)) if truth else None
    return BoundInputs(
        n=cell.n,
        t0=cell.t0,
        T=cell.T,
        lam=cell.lam,
        eps1=cell.eps1 if cell.eps1 is not None else 1.0,
        eps2=cell.eps2 if cell.eps2 is not None else 1.0,
        delta=cell.delta or 0.0,
        sigma2=data.spec.noise_var,
        s=data.spec.noise_support,
        psi=psi,
        m_post_norm=m_post_norm,
        c=cell.c,
    )


def _rep_rng(config: SweepConfig, cell: Cell, rep: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=config.seed, spawn_key=(2, cell.index, rep))
    return np.random.default_rng(seq)


def run_sweep(config: SweepConfig) -> tuple[list[SweepRecord], list[AggregateRow]]:
    """Execute every cell of the sweep and aggregate per-cell statistics."""
    config.validate()
    cells = _enumerate_cells(config)
    cache: dict = {}
    records: list[SweepRecord] = []
    for cell in cells:
        data = _dataset_for(config, cell, cache)
        panel, target = data.panel, data.target
        m_post = target.truth.m[cell.t0:]
        m_pre = target.truth.m[: cell.t0]
        bounded = validate_bounds(panel, target).bounded
        sqrt_t0 = math.sqrt(cell.t0)

        base_fit, base_pred = sc_fit_predict(panel, target, cell.lam)
        psi = max(1.0, float(np.max(np.abs(base_fit.coeffs))))
        X_pre = panel.values[:, : cell.t0]

        def pre_rmse(coeffs) -> float:
            return float(np.linalg.norm(X_pre.T @ coeffs - m_pre)) / sqrt_t0

        inputs = _cell_bound_inputs(cell, data, psi)
        eps0 = delta_reg = None
        if cell.algorithm == ALGO_NONPRIVATE:
            bound = rmse_bound_nonprivate(inputs)
        elif cell.algorithm == ALGO_OUT:
            bound = rmse_bound_output(inputs)
        else:
            bound = rmse_bound_objective(inputs)

        for rep in range(config.reps):
            rng = _rep_rng(config, cell, rep)
            if cell.algorithm == ALGO_NONPRIVATE:
                post = rmse_post(base_pred, m_post)
                pre = pre_rmse(base_fit.coeffs)
            elif cell.algorithm == ALGO_OUT:
                mech = DpscOutConfig(
                    lam=cell.lam, eps1=cell.eps1, eps2=cell.eps2, release_coeffs=True
                )
                result = dpsc_out(panel, target, mech, rng)
                post = rmse_post(result.prediction, m_post)
                pre = pre_rmse(result.fit.coeffs)
            else:
                mech = DpscObjConfig(
                    lam=cell.lam, eps1=cell.eps1, eps2=cell.eps2,
                    delta=cell.delta, c=cell.c,
                )
                result = dpsc_obj(panel, target, mech, rng)
                post = rmse_post(result.prediction, m_post)
                pre = pre_rmse(result.fit.coeffs)
                eps0 = result.meta.eps0
                delta_reg = result.meta.delta_reg
            records.append(SweepRecord(
                cell=cell.index, algorithm=cell.algorithm, n=cell.n, t0=cell.t0,
                T=cell.T, lam=cell.lam, eps1=cell.eps1, eps2=cell.eps2,
                delta=cell.delta, c=cell.c, rep=rep, seed=config.seed,
                rmse_pre=pre, rmse_post=post, bounded=bounded,
                theory_bound=bound, eps0=eps0, delta_reg=delta_reg,
            ))
    records.sort(key=lambda r: (r.cell, r.rep))
    return records, aggregate(records)


def aggregate(records: list[SweepRecord]) -> list[AggregateRow]:
    """Group records by (algorithm, grid point) and summarize rmse_post."""
    groups: dict[tuple, list[SweepRecord]] = {}
    order: list[tuple] = []
    for rec in records:
        key = (rec.algorithm, rec.n, rec.t0, rec.T, rec.lam, rec.eps1, rec.eps2,
               rec.delta, rec.c)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    rows = []
    for key in order:
        group = groups[key]
        post = [r.rmse_post for r in group]
        reps = len(post)
        mean = statistics.fmean(post)
        half = 0.0
        if reps > 1:
            half = _CI_FACTOR * statistics.stdev(post) / math.sqrt(reps)
        first = group[0]
        rows.append(AggregateRow(
            algorithm=first.algorithm, n=first.n, t0=first.t0, T=first.T,
            lam=first.lam, eps1=first.eps1, eps2=first.eps2, delta=first.delta,
            c=first.c, eps0=first.eps0, delta_reg=first.delta_reg,
            bounded=first.bounded, theory_bound=first.theory_bound,
            min_rmse_post=min(post), max_rmse_post=max(post),
            mean_rmse_pre=statistics.fmean(r.rmse_pre for r in group),
            mean_rmse_post=mean, ci_half_width=half, reps=reps,
        ))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_HEADER.split(","))
    for r in records:
        writer.writerow([
            r.algorithm, r.n, r.t0, r.T, _fmt(r.lam), _fmt(r.eps1), _fmt(r.eps2),
            _fmt(r.delta), _fmt(r.c), r.rep, r.seed, _fmt(r.rmse_pre),
            _fmt(r.rmse_post), _fmt(r.bounded), _fmt(r.theory_bound),
            _fmt(r.eps0), _fmt(r.delta_reg),
        ])
    return buf.getvalue()


def aggregates_to_csv(rows: list[AggregateRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_HEADER.split(","))
    for a in rows:
        writer.writerow([
            a.algorithm, a.n, a.t0, a.T, _fmt(a.lam), _fmt(a.eps1), _fmt(a.eps2),
            _fmt(a.delta), _fmt(a.c), _fmt(a.eps0), _fmt(a.delta_reg),
            _fmt(a.bounded), _fmt(a.theory_bound), _fmt(a.min_rmse_post),
            _fmt(a.max_rmse_post), _fmt(a.mean_rmse_pre), _fmt(a.mean_rmse_post),
            _fmt(a.ci_half_width), a.reps,
        ])
    return buf.getvalue()


def write_sweep(config: SweepConfig) -> tuple[str, str]:
    """Run the sweep and write the records/aggregate CSVs; returns their paths.

    Output paths are opened before any computation so an unwritable location
    fails immediately instead of after the sweep.
    """
    if not config.output:
        raise ConfigError("config.output path is required")
    agg_path = config.aggregate_output
    if not agg_path:
        agg_path = (config.output[:-4] if config.output.endswith(".csv")
                    else config.output) + ".agg.csv"
    with open(config.output, "w", encoding="utf-8", newline="") as records_fh, \
            open(agg_path, "w", encoding="utf-8", newline="") as agg_fh:
        records, rows = run_sweep(config)
        records_fh.write(records_to_csv(records))
        agg_fh.write(aggregates_to_csv(rows))
    return config.output, agg_path
