"""Fit statistics between an observed series and a model's predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from errors import LengthMismatch, TooFewPoints, ValidationError

CONSTANT_OBSERVED = "ConstantObserved"
CONSTANT_PREDICTED = "ConstantPredicted"


@dataclass(frozen=True)
class FitMetrics:
    """
    r2 is the coefficient of determination (can be negative); r is the
    Pearson correlation, None when either series is constant. MSE and MAE
    divide by n.
    """

    r2: float
    r: Optional[float]
    mse: float
    mae: float
    n: int
    degenerate: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"r2": self.r2, "r": self.r, "mse": self.mse, "mae": self.mae, "n": self.n}


def _as_pair(observed: Sequence[float], predicted: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(observed, dtype=float).reshape(-1)
    yhat = np.asarray(predicted, dtype=float).reshape(-1)
    if y.size != yhat.size:
        raise LengthMismatch(f"observed has {y.size} points, predicted has {yhat.size}")
    if y.size < 2:
        raise TooFewPoints(f"need at least 2 points, got {y.size}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(yhat))):
        raise ValidationError("series contain non-finite values")
    return y, yhat


def mean_squared_error(observed: Sequence[float], predicted: Sequence[float]) -> float:
    y, yhat = _as_pair(observed, predicted)
    return float(np.mean((y - yhat) ** 2))


def compute_metrics(observed: Sequence[float], predicted: Sequence[float]) -> FitMetrics:
    """
    R^2, Pearson R, MSE and MAE of predicted against observed.

    Args:
        observed: measured series
        predicted: model values at the same points

    Returns:
        FitMetrics
    """
    y, yhat = _as_pair(observed, predicted)
    resid = y - yhat
    ss_res = float(np.sum(resid ** 2))
    mse = ss_res / y.size
    mae = float(np.mean(np.abs(resid)))

    yc = y - y.mean()
    pc = yhat - yhat.mean()
    ss_tot = float(np.sum(yc ** 2))
    ss_pred = float(np.sum(pc ** 2))

    flags = []
    if ss_tot == 0.0:
        flags.append(CONSTANT_OBSERVED)
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    if ss_pred == 0.0:
        flags.append(CONSTANT_PREDICTED)

    r: Optional[float] = None
    if not flags:
        r = float(np.sum(yc * pc)) / math.sqrt(ss_tot * ss_pred)
        r = max(-1.0, min(1.0, r))

    return FitMetrics(r2=float(r2), r=r, mse=float(mse), mae=mae, n=int(y.size), degenerate=tuple(flags))
