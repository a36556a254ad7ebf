"""Donor/target data model: pre/post split, bounds checking, and the RMSE metric.

Matrices are stored donor-major (one row per donor's full time series), since
the privacy unit is a donor row; the vertical regression consumes column views.
All arrays are float64 and frozen read-only after construction.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

__all__ = [
    "DataError",
    "DonorPanel",
    "TargetSeries",
    "LatentModelSpec",
    "PanelTruth",
    "TargetTruth",
    "BoundsReport",
    "split",
    "rmse_post",
    "validate_bounds",
    "panel_to_json",
    "panel_from_json",
    "target_to_json",
    "target_from_json",
    "panel_to_csv",
    "panel_from_csv",
    "dataset_to_csv",
]


class DataError(ValueError):
    """A panel or target violates one of its structural invariants."""


def _as_frozen_array(values, shape_name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise DataError(f"{shape_name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{shape_name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


class PanelTruth(NamedTuple):
    """Signal/noise decomposition of a donor panel (values = M + Z)."""

    M: np.ndarray
    Z: np.ndarray


class TargetTruth(NamedTuple):
    """Signal/noise decomposition of a target series (values = m + z)."""

    m: np.ndarray
    z: np.ndarray


@dataclass(frozen=True)
class DonorPanel:
    """Donor matrix (n donors x T time points) with a pre/post split at t0.

    ``truth``, when present, holds the exact signal/noise decomposition used
    by synthetic data generators; ``values`` must equal ``M + Z`` to machine
    addition. ``bounded_flag`` records whether every entry lies in [-1, 1],
    the regime the sensitivity formulas assume.
    """

    values: np.ndarray
    t0: int
    truth: Optional[PanelTruth] = None
    bounded_flag: bool = False

    def __post_init__(self):
        values = _as_frozen_array(self.values, "panel values", 2)
        object.__setattr__(self, "values", values)
        n, T = values.shape
        if not (1 <= self.t0 < T):
            raise DataError(f"t0 must satisfy 1 <= t0 < T; got t0={self.t0}, T={T}")
        if self.truth is not None:
            M = _as_frozen_array(self.truth[0], "panel signal M", 2)
            Z = _as_frozen_array(self.truth[1], "panel noise Z", 2)
            if M.shape != values.shape or Z.shape != values.shape:
                raise DataError("truth matrices must match the panel shape")
            if not np.array_equal(values, M + Z):
                raise DataError("panel values must equal M + Z exactly")
            object.__setattr__(self, "truth", PanelTruth(M, Z))
        object.__setattr__(self, "bounded_flag", bool(np.max(np.abs(values)) <= 1.0))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> int:
        return self.T - self.t0


@dataclass(frozen=True)
class TargetSeries:
    """Target series (length T) with the same split index as its paired panel."""

    values: np.ndarray
    t0: int
    truth: Optional[TargetTruth] = None

    def __post_init__(self):
        values = _as_frozen_array(self.values, "target values", 1)
        object.__setattr__(self, "values", values)
        T = values.shape[0]
        if not (1 <= self.t0 < T):
            raise DataError(f"t0 must satisfy 1 <= t0 < T; got t0={self.t0}, T={T}")
        if self.truth is not None:
            m = _as_frozen_array(self.truth[0], "target signal m", 1)
            z = _as_frozen_array(self.truth[1], "target noise z", 1)
            if m.shape != values.shape or z.shape != values.shape:
                raise DataError("truth vectors must match the target length")
            if not np.array_equal(values, m + z):
                raise DataError("target values must equal m + z exactly")
            object.__setattr__(self, "truth", TargetTruth(m, z))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def y_pre(self) -> np.ndarray:
        return self.values[: self.t0]

    @property
    def y_post(self) -> np.ndarray:
        return self.values[self.t0 :]

    @property
    def m_post(self) -> Optional[np.ndarray]:
        return None if self.truth is None else self.truth.m[self.t0 :]

    @property
    def m_pre(self) -> Optional[np.ndarray]:
        return None if self.truth is None else self.truth.m[: self.t0]


@dataclass(frozen=True)
class LatentModelSpec:
    """Parameters of the linear latent model with random donor slopes.

    Donor slopes are truncated-Gaussian draws on [theta_lo, theta_hi]; the
    observation noise is truncated Gaussian with variance ``noise_var`` on
    [-noise_support, noise_support]. Variances refer to the parent Gaussian
    before conditioning on the support. ``target_theta``, when set, pins the
    target's slope instead of drawing it.
    """

    theta_mean: float = 4.0
    theta_var: float = 1.0
    theta_lo: float = 3.0
    theta_hi: float = 5.0
    noise_var: float = 0.1
    noise_support: float = 1.0
    target_theta: Optional[float] = None

    def __post_init__(self):
        if not self.theta_lo < self.theta_hi:
            raise DataError("theta_lo must be < theta_hi")
        if self.theta_var <= 0:
            raise DataError("theta_var must be > 0")
        if self.noise_var < 0:
            raise DataError("noise_var must be >= 0")
        if self.noise_support <= 0:
            raise DataError("noise_support must be > 0")


def split(panel: DonorPanel) -> tuple[np.ndarray, np.ndarray]:
    """Partition the panel's columns at t0 into (pre, post) views."""
    return panel.values[:, : panel.t0], panel.values[:, panel.t0 :]


def rmse_post(prediction: np.ndarray, m_post: np.ndarray) -> float:
    """Root mean squared error: l2 distance scaled by 1/sqrt(horizon)."""
    prediction = np.asarray(prediction, dtype=np.float64)
    m_post = np.asarray(m_post, dtype=np.float64)
    if prediction.shape != m_post.shape or prediction.ndim != 1 or prediction.size < 1:
        raise ValueError(
            f"prediction and reference must be equal-length vectors; "
            f"got {prediction.shape} and {m_post.shape}"
        )
    return float(np.linalg.norm(prediction - m_post) / math.sqrt(prediction.size))


@dataclass(frozen=True)
class BoundsReport:
    """Result of scanning a panel/target pair for entries outside [-1, 1].

    Violations are reported, never raised: the sensitivity formulas assume
    bounded data, but callers may knowingly run on unbounded data and carry
    the flag through to their outputs.
    """

    bounded: bool
    panel_bounded: bool
    target_bounded: bool
    max_abs: float
    first_violation: Optional[tuple] = None


def validate_bounds(panel: DonorPanel, target: Optional[TargetSeries] = None) -> BoundsReport:
    """Report whether all panel/target entries lie in [-1, 1]."""
    abs_panel = np.abs(panel.values)
    max_abs = float(abs_panel.max())
    panel_ok = max_abs <= 1.0
    first = None
    if not panel_ok:
        i, t = np.unravel_index(int(np.argmax(abs_panel > 1.0)), abs_panel.shape)
        first = ("panel", int(i), int(t))
    target_ok = True
    if target is not None:
        abs_target = np.abs(target.values)
        max_abs = max(max_abs, float(abs_target.max()))
        target_ok = bool(abs_target.max() <= 1.0)
        if panel_ok and not target_ok:
            first = ("target", int(np.argmax(abs_target > 1.0)))
    return BoundsReport(
        bounded=panel_ok and target_ok,
        panel_bounded=panel_ok,
        target_bounded=target_ok,
        max_abs=max_abs,
        first_violation=first,
    )


# --- serialization ---------------------------------------------------------
#
# JSON is the canonical form and must round-trip bit-exactly; json's float
# encoding is repr(), which is shortest-round-trip for float64.


def panel_to_json(panel: DonorPanel) -> str:
    doc = {
        "n": panel.n,
        "T": panel.T,
        "t0": panel.t0,
        "values": panel.values.tolist(),
    }
    if panel.truth is not None:
        doc["truth"] = {"M": panel.truth.M.tolist(), "Z": panel.truth.Z.tolist()}
    return json.dumps(doc)


def panel_from_json(text: str) -> DonorPanel:
    doc = json.loads(text)
    truth = None
    if "truth" in doc and doc["truth"] is not None:
        truth = PanelTruth(np.array(doc["truth"]["M"]), np.array(doc["truth"]["Z"]))
    panel = DonorPanel(values=np.array(doc["values"]), t0=int(doc["t0"]), truth=truth)
    if panel.n != int(doc["n"]) or panel.T != int(doc["T"]):
        raise DataError("panel JSON header (n, T) disagrees with the values matrix")
    return panel


def target_to_json(target: TargetSeries) -> str:
    doc = {"T": target.T, "t0": target.t0, "values": target.values.tolist()}
    if target.truth is not None:
        doc["truth"] = {"m": target.truth.m.tolist(), "z": target.truth.z.tolist()}
    return json.dumps(doc)


def target_from_json(text: str) -> TargetSeries:
    doc = json.loads(text)
    truth = None
    if "truth" in doc and doc["truth"] is not None:
        truth = TargetTruth(np.array(doc["truth"]["m"]), np.array(doc["truth"]["z"]))
    return TargetSeries(values=np.array(doc["values"]), t0=int(doc["t0"]), truth=truth)


def _csv_header(T: int) -> list[str]:
    return ["donor_id"] + [f"t{j}" for j in range(1, T + 1)]


def _write_rows(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def panel_to_csv(panel: DonorPanel) -> str:
    """One donor per row, header ``donor_id,t1..tT``; values only, no truth."""
    rows = [_csv_header(panel.T)]
    for i in range(panel.n):
        rows.append([str(i + 1)] + [f"{x:.17g}" for x in panel.values[i]])
    return _write_rows(rows)


def dataset_to_csv(panel: DonorPanel, target: TargetSeries) -> str:
    """Panel CSV with a trailing ``target`` row holding the target series."""
    if target.T != panel.T or target.t0 != panel.t0:
        raise DataError("panel and target disagree on (T, t0)")
    rows = [_csv_header(panel.T)]
    for i in range(panel.n):
        rows.append([str(i + 1)] + [f"{x:.17g}" for x in panel.values[i]])
    rows.append(["target"] + [f"{x:.17g}" for x in target.values])
    return _write_rows(rows)


def panel_from_csv(text: str, t0: int) -> DonorPanel:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0][0] != "donor_id":
        raise DataError("panel CSV must start with a donor_id header")
    data = [[float(x) for x in row[1:]] for row in rows[1:] if row and row[0] != "target"]
    return DonorPanel(values=np.array(data), t0=t0)
