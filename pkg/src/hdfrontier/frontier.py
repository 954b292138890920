"""Closed-form geometry of the mean-variance efficient frontier.

Everything in this module is population-level algebra: given a mean vector
``mu`` and a positive-definite covariance ``sigma``, the frontier in the
(variance, expected-return) plane is the parabola

    (R - r_gmv)**2 = slope * (V - v_gmv),

whose three parameters derive from the classic quadratic forms

    a = mu' inv(sigma) mu,   b = 1' inv(sigma) mu,   c = 1' inv(sigma) 1,

via ``r_gmv = b/c``, ``v_gmv = 1/c`` and ``slope = a - b**2/c``.  The same
parabola is often written with the Merton constants (a, b, c) directly; both
parameterisations are supported and interconvertible.

No matrix is ever inverted explicitly: all quadratic forms go through one
Cholesky factorization and triangular solves.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AsymmetricMatrix,
    CholeskyFailure,
    DegenerateSlope,
    DimensionMismatch,
    InvalidConstants,
    InvalidParams,
    InvalidRange,
)

__all__ = [
    "MertonConstants",
    "FrontierParams",
    "merton_constants",
    "frontier_params",
    "from_merton",
    "to_merton",
    "frontier_variance_at",
    "frontier_curve",
]

#: relative tolerance for accepting (and averaging away) covariance asymmetry
SYMMETRY_RTOL = 1e-10

#: relative tolerance below which a tiny negative slope is clamped to zero
SLOPE_CLAMP_RTOL = 1e-12


@dataclass(frozen=True)
class MertonConstants:
    """The three scalars (a, b, c) = (mu'Σ⁻¹mu, 1'Σ⁻¹mu, 1'Σ⁻¹1).

    ``c`` must be positive and, by Cauchy-Schwarz, ``a*c - b**2 >= 0`` for any
    genuine (mu, sigma) pair.  Constructing with ``validate=False`` skips the
    inequality checks; this is used internally for finite-sample estimates
    whose bias correction can push them slightly outside the population cone.
    """

    a: float
    b: float
    c: float
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        vals = (self.a, self.b, self.c)
        if not all(np.isfinite(vals)):
            raise InvalidConstants(f"constants must be finite, got {vals}")
        if not validate:
            return
        if self.c <= 0.0:
            raise InvalidConstants(f"c = 1'inv(sigma)1 must be positive, got {self.c}")
        if self.a < 0.0:
            raise InvalidConstants(f"a = mu'inv(sigma)mu must be nonnegative, got {self.a}")
        # Cauchy-Schwarz up to float slop from round-tripping
        gap = self.a * self.c - self.b * self.b
        if gap < -1e-10 * max(self.a * self.c, self.b * self.b, 1e-300):
            raise InvalidConstants(
                f"a*c - b^2 must be nonnegative (Cauchy-Schwarz), got {gap}"
            )


@dataclass(frozen=True)
class FrontierParams:
    """Vertex and curvature of the frontier parabola.

    Attributes
    ----------
    r_gmv : float
        Expected return of the global minimum variance portfolio.
    v_gmv : float
        Variance of the global minimum variance portfolio (positive).
    slope : float
        Curvature parameter ``s = a - b**2/c`` (nonnegative for populations;
        ``validate=False`` admits negative finite-sample estimates).
    """

    r_gmv: float
    v_gmv: float
    slope: float
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        vals = (self.r_gmv, self.v_gmv, self.slope)
        if not all(np.isfinite(vals)):
            raise InvalidParams(f"parameters must be finite, got {vals}")
        if self.v_gmv <= 0.0:
            raise InvalidParams(f"v_gmv must be positive, got {self.v_gmv}")
        if validate and self.slope < 0.0:
            raise InvalidParams(f"slope must be nonnegative, got {self.slope}")


def _as_mean(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1:
        raise DimensionMismatch(f"mean vector must be 1-D, got shape {mu.shape}")
    if mu.size < 2:
        raise DimensionMismatch("mean vector needs at least two assets")
    if not np.all(np.isfinite(mu)):
        raise InvalidParams("mean vector contains non-finite entries")
    return mu


def _as_covariance(sigma, p: int) -> np.ndarray:
    """Validate shape/symmetry and return the symmetrized matrix."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got shape {sigma.shape}")
    if sigma.shape[0] != p:
        raise DimensionMismatch(
            f"covariance is {sigma.shape[0]}x{sigma.shape[0]} but mean has length {p}"
        )
    if not np.all(np.isfinite(sigma)):
        raise InvalidParams("covariance contains non-finite entries")
    asym = np.abs(sigma - sigma.T).max()
    scale = np.abs(sigma).max()
    if asym > SYMMETRY_RTOL * max(scale, 1e-300):
        raise AsymmetricMatrix(
            f"covariance asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:.0e} relative"
        )
    return 0.5 * (sigma + sigma.T)


def _cholesky(sigma: np.ndarray) -> tuple:
    try:
        return scipy.linalg.cho_factor(sigma, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise CholeskyFailure(f"covariance is not positive definite: {exc}") from exc


def _quadratic_forms(mu: np.ndarray, sigma: np.ndarray) -> tuple[float, float, float]:
    """(a, b, c) through a single Cholesky factorization."""
    factor = _cholesky(sigma)
    ones = np.ones_like(mu)
    sol = scipy.linalg.cho_solve(factor, np.column_stack([ones, mu]), check_finite=False)
    c = float(ones @ sol[:, 0])
    b = float(ones @ sol[:, 1])
    a = float(mu @ sol[:, 1])
    return a, b, c


def merton_constants(mu, sigma) -> MertonConstants:
    """Compute (a, b, c) = (mu'Σ⁻¹mu, 1'Σ⁻¹mu, 1'Σ⁻¹1).

    Parameters
    ----------
    mu : array_like, shape (p,)
        Mean vector, p >= 2.
    sigma : array_like, shape (p, p)
        Positive-definite covariance matrix, symmetric within 1e-10 relative
        tolerance (small asymmetry is averaged away).

    Returns
    -------
    MertonConstants

    Raises
    ------
    DimensionMismatch, AsymmetricMatrix, CholeskyFailure
    """
    mu = _as_mean(mu)
    sigma = _as_covariance(sigma, mu.size)
    a, b, c = _quadratic_forms(mu, sigma)
    # float slop guard: a is a PD quadratic form, clamp a tiny negative result
    if a < 0 and a > -1e-12 * max(abs(b), 1.0):
        a = 0.0
    return MertonConstants(a, b, c)


def _clamped_slope(a: float, b: float, c: float) -> float:
    slope = a - b * b / c
    if slope < 0.0:
        if slope > -SLOPE_CLAMP_RTOL * a:
            return 0.0
        raise InvalidConstants(
            f"slope {slope} is negative beyond rounding tolerance "
            f"{-SLOPE_CLAMP_RTOL * a:.3e}"
        )
    return slope


def from_merton(constants: MertonConstants) -> FrontierParams:
    """Map Merton constants to the parabola's vertex/curvature form."""
    if constants.c <= 0.0:
        raise InvalidConstants(f"c must be positive, got {constants.c}")
    return FrontierParams(
        r_gmv=constants.b / constants.c,
        v_gmv=1.0 / constants.c,
        slope=_clamped_slope(constants.a, constants.b, constants.c),
    )


def to_merton(params: FrontierParams) -> MertonConstants:
    """Inverse of :func:`from_merton` (exact round trip)."""
    if params.v_gmv <= 0.0:
        raise InvalidParams(f"v_gmv must be positive, got {params.v_gmv}")
    c = 1.0 / params.v_gmv
    b = params.r_gmv / params.v_gmv
    a = params.slope + params.r_gmv**2 / params.v_gmv
    return MertonConstants(a, b, c, validate=params.slope >= 0.0)


def frontier_params(mu, sigma) -> FrontierParams:
    """Frontier vertex and curvature straight from (mu, sigma)."""
    return from_merton(merton_constants(mu, sigma))


def frontier_variance_at(params: FrontierParams, r: float) -> float:
    """Smallest attainable variance for target expected return ``r``.

    Solves the frontier equation for V:  V = v_gmv + (r - r_gmv)**2 / slope.
    With a flat frontier (slope == 0) only r == r_gmv is attainable.
    """
    r = float(r)
    if not np.isfinite(r):
        raise InvalidParams(f"target return must be finite, got {r}")
    dev = r - params.r_gmv
    if params.slope == 0.0:
        if dev == 0.0:
            return params.v_gmv
        raise DegenerateSlope(
            f"slope is zero: only r == r_gmv ({params.r_gmv}) is attainable"
        )
    return params.v_gmv + dev * dev / params.slope


def frontier_curve(params: FrontierParams, v_max: float, n_points: int = 65) -> np.ndarray:
    """Upper frontier branch sampled on an even variance grid.

    Parameters
    ----------
    params : FrontierParams
    v_max : float
        Right edge of the variance grid; must exceed ``params.v_gmv``.
    n_points : int
        Number of grid points (>= 2).

    Returns
    -------
    ndarray, shape (n_points, 2)
        Columns ``(V, R)`` with ``R = r_gmv + sqrt(slope * (V - v_gmv))``.
        The first row is exactly the vertex ``(v_gmv, r_gmv)``.
    """
    if not np.isfinite(v_max) or v_max <= params.v_gmv:
        raise InvalidRange(f"v_max must exceed v_gmv = {params.v_gmv}, got {v_max}")
    if n_points < 2:
        raise InvalidRange(f"n_points must be at least 2, got {n_points}")
    v = np.linspace(params.v_gmv, v_max, n_points)
    r = params.r_gmv + np.sqrt(np.maximum(params.slope * (v - params.v_gmv), 0.0))
    return np.column_stack([v, r])
