"""Decay-law fits, crossover detection and parameter-scan bookkeeping.

Fits are ordinary least squares in log space; windows are always chosen by
the caller, never auto-detected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

MIN_POINTS = 5


@dataclass
class FitResult:
    model: str                     # "exponential" or "power_law"
    rate_or_exponent: float        # decay rate (exponential) or exponent (power)
    intercept: float               # ln(prefactor)
    r_squared: float
    window: tuple

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "rate_or_exponent": self.rate_or_exponent,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
        }


def _lsq_line(u: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    """Least-squares w = a*u + b; returns (a, b, r_squared)."""
    A = np.vstack([u, np.ones_like(u)]).T
    coef, *_ = np.linalg.lstsq(A, w, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    resid = w - (a * u + b)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(w - w.mean(), w - w.mean()))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return a, b, min(1.0, r2)


def _checked_points(points, need_positive_x: bool) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(sorted(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    if pts.shape[0] < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points, got {pts.shape[0]}")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(y <= 0):
        raise ValueError("all y values must be positive for a log-space fit")
    if need_positive_x and np.any(x <= 0):
        raise ValueError("all x values must be positive for a log-log fit")
    return x, y


def fit_exponential(points: Iterable) -> FitResult:
    """Fit y = C exp(-rate x); least squares on (x, ln y)."""
    x, y = _checked_points(points, need_positive_x=False)
    slope, intercept, r2 = _lsq_line(x, np.log(y))
    return FitResult(model="exponential", rate_or_exponent=-slope,
                     intercept=intercept, r_squared=r2,
                     window=(float(x[0]), float(x[-1])))


def fit_power(points: Iterable) -> FitResult:
    """Fit y = C x^p; least squares on (ln x, ln y)."""
    x, y = _checked_points(points, need_positive_x=True)
    slope, intercept, r2 = _lsq_line(np.log(x), np.log(y))
    return FitResult(model="power_law", rate_or_exponent=slope,
                     intercept=intercept, r_squared=r2,
                     window=(float(x[0]), float(x[-1])))


def crossover(curve1: Iterable, curve2: Iterable) -> float:
    """Abscissa where the two curves cross, by linear interpolation.

    The curves must share their x samples over an overlapping window and
    y1 - y2 must change sign exactly once in it.
    """
    c1 = np.asarray(sorted(curve1), dtype=float)
    c2 = np.asarray(sorted(curve2), dtype=float)
    lo = max(c1[0, 0], c2[0, 0])
    hi = min(c1[-1, 0], c2[-1, 0])
    if lo >= hi:
        raise ValueError("curves do not share an x-window")
    m1 = (c1[:, 0] >= lo - 1e-12) & (c1[:, 0] <= hi + 1e-12)
    m2 = (c2[:, 0] >= lo - 1e-12) & (c2[:, 0] <= hi + 1e-12)
    x1, x2 = c1[m1, 0], c2[m2, 0]
    if x1.shape != x2.shape or not np.allclose(x1, x2, rtol=0, atol=1e-9 * max(1.0, hi - lo)):
        raise ValueError("curves must be sampled at the same x values inside the shared window")
    x = x1
    diff = c1[m1, 1] - c2[m2, 1]
    sign = np.sign(diff)
    changes = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    if changes.size == 0:
        raise ValueError("no crossing: the curves do not change order in the window")
    if changes.size > 1:
        raise ValueError(f"multiple crossings ({changes.size}) in the window")
    i = changes[0]
    return float(x[i] - diff[i] * (x[i + 1] - x[i]) / (diff[i + 1] - diff[i]))


@dataclass
class ScanRow:
    value: float
    observables: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ScanTable:
    parameter: str
    rows: list

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def ok_rows(self) -> list:
        return [r for r in self.rows if r.ok]

    def column(self, name: str) -> np.ndarray:
        return np.array([r.observables[name] for r in self.rows if r.ok])

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows if r.ok])


def scan(parameter: str, values: Iterable[float],
         scenario: Callable[[float], dict]) -> ScanTable:
    """Evaluate scenario(value) for each value; failures are recorded per
    row without aborting the rest of the scan."""
    vals = list(values)
    if not vals:
        raise ValueError("empty scan value list")
    arr = np.asarray(vals, dtype=float)
    dv = np.diff(arr)
    if not (np.all(dv > 0) or np.all(dv < 0)):
        raise ValueError("scan values must be strictly monotone")
    rows = []
    for v in vals:
        try:
            obs = scenario(v)
            rows.append(ScanRow(value=float(v), observables=dict(obs)))
        except Exception as exc:  # noqa: BLE001 - per-row capture is the contract
            rows.append(ScanRow(value=float(v), error=f"{type(exc).__name__}: {exc}"))
    return ScanTable(parameter=parameter, rows=rows)
