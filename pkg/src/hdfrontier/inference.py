"""Asymptotic inference for the consistent frontier estimator.

Under i.i.d. Gaussian sampling with ``p/n -> c`` in [0, 1), the centred and
``sqrt(n)``-scaled consistent estimates of ``(r_gmv, v_gmv, slope)`` are
asymptotically normal with variances

    var_r = (1 + (s + c)/(1 - c)) * v,
    var_v = 2 * v**2 / (1 - c),
    var_s = 2*(c + 2*s) + 2*(c + s)**2 / (1 - c),

and vanishing cross-correlations.  The slope's Gaussian limit is centred at
``s + p/n``, not ``s``: the consistent slope keeps an additive bias of one
concentration ratio.  Confidence intervals can either ignore the bias
(intervals for ``s + p/n`` in effect) or subtract it, via ``center_s_bias``.

Setting ``c = 0`` recovers the classic fixed-dimension limits
``((1 + s) v, 2 v**2, 4 s + 2 s**2)``.

Everything here is a plug-in: unknown population quantities in the variance
formulas are replaced by their consistent estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special

from .errors import InvalidLevel, InvalidParams, InvalidReportKind, RatioOutOfRange
from .estimators import EstimateReport, EstimatorKind
from .frontier import FrontierParams

__all__ = [
    "AsymptoticVariances",
    "ConfidenceIntervals",
    "asymptotic_variances",
    "normal_quantile",
    "confidence_intervals",
    "coverage",
    "standardized_errors",
]


@dataclass(frozen=True)
class AsymptoticVariances:
    """Limiting variances of ``sqrt(n) * (estimate - center)`` per parameter."""

    var_r: float
    var_v: float
    var_s: float


@dataclass(frozen=True)
class ConfidenceIntervals:
    """Two-sided plug-in intervals at a common confidence level."""

    level: float
    ci_r: tuple[float, float]
    ci_v: tuple[float, float]
    ci_s: tuple[float, float]


def asymptotic_variances(params: FrontierParams, ratio: float) -> AsymptoticVariances:
    """Limiting variances at given frontier parameters and concentration ratio.

    Parameters
    ----------
    params : FrontierParams
        The point (population or estimated) at which to evaluate.
    ratio : float
        Concentration ratio ``c = lim p/n`` in [0, 1).  ``ratio=0`` gives the
        classic fixed-dimension formulas.
    """
    if not 0.0 <= ratio < 1.0:
        raise RatioOutOfRange(f"ratio must lie in [0, 1), got {ratio}")
    s, v = params.slope, params.v_gmv
    if s < 0.0:
        raise InvalidParams(f"asymptotic variances need slope >= 0, got {s}")
    one_minus = 1.0 - ratio
    return AsymptoticVariances(
        var_r=(1.0 + (s + ratio) / one_minus) * v,
        var_v=2.0 * v * v / one_minus,
        var_s=2.0 * (ratio + 2.0 * s) + 2.0 * (ratio + s) ** 2 / one_minus,
    )


def normal_quantile(beta: float) -> float:
    """Standard normal quantile (inverse CDF) at probability ``beta``."""
    if not 0.0 < beta < 1.0:
        raise InvalidLevel(f"quantile probability must lie in (0, 1), got {beta}")
    return float(scipy.special.ndtri(beta))


def _half_widths(v, s, ratio: float, n: int, level: float, center_s_bias: bool):
    """Vectorized plug-in half-widths; returns (s_center, hw_r, hw_v, hw_s).

    ``v`` and ``s`` are consistent estimates (scalars or same-shape arrays).
    With ``center_s_bias`` the de-biased slope ``s - p/n`` is used both as the
    interval centre and inside the variance formulas, floored at zero under
    the square roots so a slightly negative de-biased slope cannot produce
    NaN widths.
    """
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"confidence level must lie in (0, 1), got {level}")
    if not 0.0 < ratio < 1.0:
        raise RatioOutOfRange(f"p/n must lie in (0, 1), got {ratio}")
    z = normal_quantile(0.5 + 0.5 * level)
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)
    s_center = s - ratio if center_s_bias else s
    s_var = np.maximum(s_center, 0.0)
    one_minus = 1.0 - ratio
    var_r = (1.0 + (s_var + ratio) / one_minus) * v
    var_v = 2.0 * v * v / one_minus
    var_s = 2.0 * (ratio + 2.0 * s_var) + 2.0 * (ratio + s_var) ** 2 / one_minus
    root_n = np.sqrt(float(n))
    return (
        s_center,
        z * np.sqrt(var_r) / root_n,
        z * np.sqrt(var_v) / root_n,
        z * np.sqrt(var_s) / root_n,
    )


def confidence_intervals(
    report: EstimateReport, level: float = 0.95, center_s_bias: bool = False
) -> ConfidenceIntervals:
    """Two-sided plug-in intervals from a consistent-frontier report.

    Parameters
    ----------
    report : EstimateReport
        Must come from the consistent estimator; the variance formulas are
        derived for that centring and do not transfer to other kinds.
    level : float
        Confidence level in (0, 1), default 0.95.
    center_s_bias : bool
        If True, recentre the slope interval at ``slope - p/n``, removing
        the additive finite-sample bias of the consistent slope.  The same
        de-biased value feeds the variance plug-in (floored at zero).

    Raises
    ------
    InvalidReportKind
        If the report's kind is not ``EstimatorKind.CONSISTENT``.
    """
    if report.kind is not EstimatorKind.CONSISTENT:
        raise InvalidReportKind(
            f"confidence intervals are calibrated for the consistent estimator, "
            f"got kind={report.kind.value!r}"
        )
    params = report.params
    s_center, hw_r, hw_v, hw_s = _half_widths(
        params.v_gmv, params.slope, report.ratio, report.n, level, center_s_bias
    )
    s_center = float(s_center)
    return ConfidenceIntervals(
        level=level,
        ci_r=(params.r_gmv - float(hw_r), params.r_gmv + float(hw_r)),
        ci_v=(params.v_gmv - float(hw_v), params.v_gmv + float(hw_v)),
        ci_s=(s_center - float(hw_s), s_center + float(hw_s)),
    )


def coverage(
    estimates: np.ndarray,
    truth: FrontierParams,
    ratio: float,
    n: int,
    level: float = 0.95,
    center_s_bias: bool = False,
) -> dict[str, float]:
    """Empirical coverage of the plug-in intervals over Monte Carlo estimates.

    Parameters
    ----------
    estimates : ndarray, shape (reps, 3)
        Consistent estimates per repetition, columns ``(r_gmv, v_gmv, slope)``.
    truth : FrontierParams
        Population parameters the intervals should cover.
    ratio : float
        ``p/n`` of the experiment.
    n : int
        Sample size per repetition.

    Returns
    -------
    dict with keys ``"r_gmv"``, ``"v_gmv"``, ``"slope"`` mapping to the
    fraction of repetitions whose interval contains the true value.
    """
    estimates = np.asarray(estimates, dtype=float)
    if estimates.ndim != 2 or estimates.shape[1] != 3:
        raise InvalidParams(f"estimates must have shape (reps, 3), got {estimates.shape}")
    r, v, s = estimates[:, 0], estimates[:, 1], estimates[:, 2]
    s_center, hw_r, hw_v, hw_s = _half_widths(v, s, ratio, n, level, center_s_bias)
    return {
        "r_gmv": float(np.mean(np.abs(r - truth.r_gmv) <= hw_r)),
        "v_gmv": float(np.mean(np.abs(v - truth.v_gmv) <= hw_v)),
        "slope": float(np.mean(np.abs(s_center - truth.slope) <= hw_s)),
    }


def standardized_errors(
    estimates, truth: FrontierParams, ratio: float | None = None, n: int | None = None
) -> np.ndarray:
    """Centre and scale consistent estimates by their limiting law.

    Columns of the result are ``sqrt(n) * (est - center) / sd`` with centres
    ``(r_gmv, v_gmv, slope + p/n)`` — note the slope's bias term — and
    standard deviations from :func:`asymptotic_variances` evaluated at the
    *true* parameters.  Under the Gaussian model each column is
    asymptotically standard normal and columns are asymptotically
    independent.

    Parameters
    ----------
    estimates : EstimateReport or ndarray of shape (reps, 3)
        A single consistent-estimator report, or an array of consistent
        estimates with columns ``(r_gmv, v_gmv, slope)``.
    truth : FrontierParams
    ratio : float, optional
        ``p/n`` of the experiment (also the slope-centring shift).  Taken
        from the report when one is given.
    n : int, optional
        Sample size; taken from the report when one is given.

    Returns
    -------
    ndarray — shape (3,) for a single report, (reps, 3) for an array.
    """
    single = isinstance(estimates, EstimateReport)
    if single:
        report = estimates
        if report.kind is not EstimatorKind.CONSISTENT:
            raise InvalidReportKind(
                f"standardized errors are defined for the consistent estimator, "
                f"got kind={report.kind.value!r}"
            )
        ratio = report.ratio if ratio is None else ratio
        n = report.n if n is None else n
        estimates = np.array(
            [[report.params.r_gmv, report.params.v_gmv, report.params.slope]]
        )
    else:
        estimates = np.asarray(estimates, dtype=float)
        if ratio is None or n is None:
            raise InvalidParams("ratio and n are required with array input")
    if estimates.ndim != 2 or estimates.shape[1] != 3:
        raise InvalidParams(f"estimates must have shape (reps, 3), got {estimates.shape}")
    limits = asymptotic_variances(truth, ratio)
    sds = np.sqrt([limits.var_r, limits.var_v, limits.var_s])
    centers = np.array([truth.r_gmv, truth.v_gmv, truth.slope + ratio])
    out = np.sqrt(float(n)) * (estimates - centers) / sds
    return out[0] if single else out
