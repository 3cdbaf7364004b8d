"""Peaks-over-threshold estimation pipeline.

The threshold is the (n-k)-th order statistic, so exactly the k largest
observations exceed it (ties at the threshold count as non-exceedances).
Excess-based estimators run on the k strictly positive excesses; the Hill
estimator runs on the raw sample with the same k; the transformed estimate
reuses the Zhang-Stephens fit on the excesses with the smallest excess as the
support estimate.  Only the upper tail is used; observations are never folded
by absolute value (symmetric sources contribute through their largest values
only) unless ``fold_absolute`` is requested explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import (
    EstimationError,
    EstimatorId,
    FitResult,
    estimate_gpd_mle,
    estimate_hill,
    estimate_pareto_ml,
    estimate_pwm,
    estimate_zhang_stephens,
)
from .transform import transformed_shape_estimate

__all__ = [
    "DEFAULT_POT_ESTIMATORS",
    "PotConfig",
    "PotResult",
    "select_threshold",
    "excesses",
    "pot_estimate",
]

DEFAULT_POT_ESTIMATORS = (
    EstimatorId.ZHANG_STEPHENS,
    EstimatorId.GPD_MLE,
    EstimatorId.HILL,
    EstimatorId.TRANSFORMED_ZS,
)


@dataclass(frozen=True)
class PotConfig:
    """Number of exceedances k and the estimators to run on them."""

    k: int
    estimators: tuple[EstimatorId, ...] = DEFAULT_POT_ESTIMATORS
    fold_absolute: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not self.estimators:
            raise ValueError("estimator set must not be empty")


@dataclass
class PotResult:
    """Threshold, excess count and per-estimator fits or failure messages."""

    threshold: float
    excess_count: int
    fits: dict[EstimatorId, FitResult] = field(default_factory=dict)
    failures: dict[EstimatorId, str] = field(default_factory=dict)


def select_threshold(x, k: int) -> float:
    """The (n-k)-th order statistic (ascending, 1-indexed) of the sample."""
    arr = np.asarray(x, dtype=float).ravel()
    n = arr.size
    if not isinstance(k, (int, np.integer)) or not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n = {n}, got {k!r}")
    return float(np.partition(arr, n - k - 1)[n - k - 1])


def excesses(x, threshold: float) -> np.ndarray:
    """Strictly positive excesses x - threshold for observations above it."""
    arr = np.asarray(x, dtype=float).ravel()
    exc = arr[arr > threshold] - threshold
    if exc.size < 2:
        raise ValueError(
            f"need at least 2 exceedances above threshold {threshold}, got {exc.size}"
        )
    return exc


def pot_estimate(x, cfg: PotConfig) -> PotResult:
    """Run the configured estimator set above the k-largest threshold.

    Estimator failures are recorded per estimator in ``failures`` without
    aborting the others.
    """
    arr = np.asarray(x, dtype=float).ravel()
    if cfg.fold_absolute:
        arr = np.abs(arr)
    threshold = select_threshold(arr, cfg.k)
    exc = excesses(arr, threshold)
    result = PotResult(threshold=threshold, excess_count=int(exc.size))

    wanted = list(dict.fromkeys(cfg.estimators))
    needs_zs = EstimatorId.TRANSFORMED_ZS in wanted or EstimatorId.ZHANG_STEPHENS in wanted
    needs_pwm = EstimatorId.TRANSFORMED_PWM in wanted or EstimatorId.PWM in wanted

    zs_fit = pwm_fit = None
    zs_error = pwm_error = None
    if needs_zs:
        try:
            zs_fit = estimate_zhang_stephens(exc)
        except (ValueError, EstimationError) as err:
            zs_error = str(err)
    if needs_pwm:
        try:
            pwm_fit = estimate_pwm(exc)
        except (ValueError, EstimationError) as err:
            pwm_error = str(err)

    for estimator in wanted:
        try:
            if estimator is EstimatorId.ZHANG_STEPHENS:
                if zs_fit is None:
                    raise EstimationError(zs_error or "Zhang-Stephens fit unavailable")
                fit = zs_fit
            elif estimator is EstimatorId.PWM:
                if pwm_fit is None:
                    raise EstimationError(pwm_error or "PWM fit unavailable")
                fit = pwm_fit
            elif estimator is EstimatorId.GPD_MLE:
                fit = estimate_gpd_mle(exc)
            elif estimator is EstimatorId.HILL:
                fit = estimate_hill(arr, cfg.k)
            elif estimator is EstimatorId.PARETO_ML:
                fit = estimate_pareto_ml(exc)
            elif estimator is EstimatorId.TRANSFORMED_ZS:
                if zs_fit is None:
                    raise EstimationError(
                        f"initial Zhang-Stephens fit failed: {zs_error or 'unavailable'}"
                    )
                fit = transformed_shape_estimate(exc, zs_fit, float(exc.min()))
            elif estimator is EstimatorId.TRANSFORMED_PWM:
                if pwm_fit is None:
                    raise EstimationError(f"initial PWM fit failed: {pwm_error or 'unavailable'}")
                fit = transformed_shape_estimate(exc, pwm_fit, float(exc.min()))
            else:
                raise ValueError(f"estimator {estimator!r} is not supported in a POT pipeline")
        except (ValueError, EstimationError) as err:
            result.failures[estimator] = str(err)
        else:
            result.fits[estimator] = fit
    return result
