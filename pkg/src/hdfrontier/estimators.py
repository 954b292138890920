"""Finite-sample estimators of the efficient frontier.

Three families live here:

1. **Moment plug-ins.**  The *sample* frontier plugs the sample mean and
   sample covariance (divisor ``n``) straight into the population formulas.
   In high dimensions (p comparable to n) this overstates the slope by a
   factor close to ``1/(1 - p/n)``; multiplying all three Merton constants by
   ``1 - p/n`` yields the *consistent* estimator, and a further exact
   finite-sample correction yields the *unbiased* estimator (mean-exact for
   Gaussian returns, at the price of admitting negative slope estimates).

2. **Precision-matrix plug-ins.**  Instead of inverting the sample
   covariance, substitute a better-behaved estimator of ``inv(sigma)``:
   a de-biasing rescale of the inverse sample covariance (``sse``), an
   empirical-Bayes variant that adds an identity component (``ebe``), or a
   ridge-type estimator defined even when ``p >= n`` (``rte``).

3. **Dispatch.**  :func:`estimate` / :func:`estimate_many` compute any subset
   of the above from one set of sample moments, sharing a single Cholesky
   factorization across all kinds that need ``inv(S)`` quadratic forms.

All estimators report frontier parameters, the underlying Merton constants,
and the concentration ratio ``p/n`` in a uniform :class:`EstimateReport`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidParams,
    NotPositiveDefinite,
    RatioOutOfRange,
    SingularCovariance,
    TooFewObservations,
    ZeroTrace,
)
from .frontier import FrontierParams, MertonConstants, from_merton

__all__ = [
    "ReturnsMatrix",
    "SampleMoments",
    "EstimatorKind",
    "EstimateReport",
    "sample_moments",
    "sample_frontier",
    "consistent_merton",
    "consistent_frontier",
    "unbiased_frontier",
    "precision_sse",
    "precision_ebe",
    "precision_rte",
    "plugin_frontier",
    "estimate",
    "estimate_many",
]


@dataclass(frozen=True, eq=False)
class ReturnsMatrix:
    """An assets-by-observations panel of returns.

    Attributes
    ----------
    values : ndarray, shape (p, n)
        One row per asset, one column per observation.
    asset_labels : tuple of str, optional
        Row labels; length must equal ``p`` when given.
    timestamps : tuple, optional
        Column labels (observation times); length must equal ``n`` when given.
    """

    values: np.ndarray
    asset_labels: tuple[str, ...] | None = None
    timestamps: tuple | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch(f"returns must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidParams("returns contain non-finite entries")
        object.__setattr__(self, "values", values)
        if self.asset_labels is not None:
            labels = tuple(str(s) for s in self.asset_labels)
            if len(labels) != values.shape[0]:
                raise DimensionMismatch(
                    f"{len(labels)} labels for {values.shape[0]} assets"
                )
            object.__setattr__(self, "asset_labels", labels)
        if self.timestamps is not None:
            stamps = tuple(self.timestamps)
            if len(stamps) != values.shape[1]:
                raise DimensionMismatch(
                    f"{len(stamps)} timestamps for {values.shape[1]} observations"
                )
            object.__setattr__(self, "timestamps", stamps)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class SampleMoments:
    """Sample mean and covariance of a returns panel.

    The covariance uses divisor ``n`` (maximum-likelihood normalisation):
    ``cov = (Y - mean) (Y - mean)' / n``.
    """

    mean: np.ndarray
    cov: np.ndarray
    n: int
    p: int

    @property
    def ratio(self) -> float:
        """Concentration ratio p/n."""
        return self.p / self.n


class EstimatorKind(str, enum.Enum):
    """Names for the supported frontier estimators."""

    SAMPLE = "sample"          # raw moment plug-in
    CONSISTENT = "consistent"  # Merton constants scaled by (1 - p/n)
    UNBIASED = "unbiased"      # exact Gaussian mean correction
    SSE = "sse"                # scaled inverse sample covariance
    EBE = "ebe"                # empirical-Bayes precision (adds identity part)
    RTE = "rte"                # ridge-type precision, defined for any p/n

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: kinds whose precision matrix exists even when the sample covariance is singular
_ANY_RATIO_KINDS = frozenset({EstimatorKind.RTE})


@dataclass(frozen=True)
class EstimateReport:
    """One estimator's output, with enough context to interpret it.

    Attributes
    ----------
    kind : EstimatorKind
    params : FrontierParams
        Estimated vertex and curvature.
    merton : MertonConstants
        The (a, b, c) triple the parameters derive from.
    p, n : int
        Panel dimensions behind the estimate.
    ratio : float
        Concentration ratio ``p/n``.  Must lie in (0, 1) except for the
        ridge-type estimator, which is defined for any positive ratio.
    notes : tuple of str
        Free-form quality flags, e.g. ``"negative-slope-clamped-in-merton"``.
    """

    kind: EstimatorKind
    params: FrontierParams
    merton: MertonConstants
    p: int
    n: int
    ratio: float
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in _ANY_RATIO_KINDS and not 0.0 < self.ratio < 1.0:
            raise RatioOutOfRange(
                f"{self.kind.value} estimates require p/n in (0, 1), got {self.ratio}"
            )
        if self.ratio <= 0.0:
            raise RatioOutOfRange(f"p/n must be positive, got {self.ratio}")


def sample_moments(returns) -> SampleMoments:
    """Sample mean and divisor-``n`` covariance of a returns panel.

    Parameters
    ----------
    returns : ReturnsMatrix or array_like, shape (p, n)
        Assets in rows, observations in columns.

    Raises
    ------
    TooFewObservations
        If fewer than two observations are supplied.
    """
    if not isinstance(returns, ReturnsMatrix):
        returns = ReturnsMatrix(np.asarray(returns, dtype=float))
    if returns.n < 2:
        raise TooFewObservations(
            f"need at least 2 observations to form a covariance, got {returns.n}"
        )
    mean = returns.values.mean(axis=1)
    centered = returns.values - mean[:, None]
    cov = centered @ centered.T / returns.n
    cov = 0.5 * (cov + cov.T)
    return SampleMoments(mean=mean, cov=cov, n=returns.n, p=returns.p)


def _forms(moments: SampleMoments) -> tuple[float, float, float]:
    """(a, b, c) quadratic forms in inv(cov) via one Cholesky factorization."""
    if moments.n <= moments.p:
        raise SingularCovariance(
            f"sample covariance with p={moments.p}, n={moments.n} is singular: "
            f"estimators based on inv(S) require n > p"
        )
    try:
        factor = scipy.linalg.cho_factor(moments.cov, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularCovariance(
            f"sample covariance is not positive definite (p={moments.p}, "
            f"n={moments.n}; estimators based on inv(S) require n > p): {exc}"
        ) from exc
    ones = np.ones(moments.p)
    sol = scipy.linalg.cho_solve(
        factor, np.column_stack([ones, moments.mean]), check_finite=False
    )
    c = float(ones @ sol[:, 0])
    b = float(ones @ sol[:, 1])
    a = float(moments.mean @ sol[:, 1])
    return a, b, c


def _report(kind, params, merton, moments, notes=()) -> EstimateReport:
    return EstimateReport(
        kind=kind,
        params=params,
        merton=merton,
        p=moments.p,
        n=moments.n,
        ratio=moments.ratio,
        notes=tuple(notes),
    )


def sample_frontier(moments: SampleMoments) -> EstimateReport:
    """Raw plug-in: population formulas applied to the sample moments.

    Consistent only when ``p/n -> 0``; for ``p/n -> c > 0`` the GMV variance
    is understated by the factor ``1 - c`` and the slope inflated by roughly
    ``c/(1 - c) + c/(1 - c)**2`` plus a multiplicative distortion.
    """
    a, b, c = _forms(moments)
    merton = MertonConstants(a, b, c)
    return _report(EstimatorKind.SAMPLE, from_merton(merton), merton, moments)


def consistent_merton(moments: SampleMoments) -> MertonConstants:
    """Sample Merton constants rescaled by ``1 - p/n``.

    Under either Gaussian or heavy-tailed i.i.d. sampling with ``p/n -> c``
    in (0, 1), each rescaled constant converges almost surely to its
    population counterpart.
    """
    ratio = moments.ratio
    if not 0.0 < ratio < 1.0:
        raise RatioOutOfRange(f"consistent estimation requires p/n in (0, 1), got {ratio}")
    a, b, c = _forms(moments)
    shrink = 1.0 - ratio
    return MertonConstants(shrink * a, shrink * b, shrink * c)


def consistent_frontier(moments: SampleMoments) -> EstimateReport:
    """Ratio-consistent frontier: Merton constants scaled by ``1 - p/n``.

    Relative to the raw sample frontier this leaves ``r_gmv`` unchanged,
    multiplies the GMV variance by ``1/(1 - p/n)`` and the slope by
    ``1 - p/n``.  The slope retains an additive bias of roughly ``p/n``
    in finite samples (it converges to ``s + c``, not ``s``, when the
    centering at ``s`` alone is used); downstream inference can recenter.
    """
    merton = consistent_merton(moments)
    return _report(EstimatorKind.CONSISTENT, from_merton(merton), merton, moments)


def unbiased_frontier(
    moments: SampleMoments, _base_forms: tuple[float, float, float] | None = None
) -> EstimateReport:
    """Exactly mean-unbiased frontier parameters for Gaussian returns.

    With divisor-``n`` sample moments and ``p < n - 1``:

    - ``r_gmv`` is already unbiased and is left untouched;
    - ``v_gmv`` is multiplied by ``n / (n - p)``;
    - the slope becomes ``(n - p - 1)/n * slope_sample - (p - 1)/n``,
      which can be negative — the report keeps the signed value so that
      averaging across repetitions stays unbiased, and flags it in
      ``notes`` when it happens.

    (Equivalently, in the divisor-``n-1`` convention these read
    ``(n-1)/(n-p) * v`` and ``(n-p-1)/(n-1) * s - (p-1)/n``.)
    """
    if moments.n < moments.p + 2:
        raise TooFewObservations(
            f"unbiased correction needs n >= p + 2, got n={moments.n}, p={moments.p}"
        )
    a, b, c = _base_forms if _base_forms is not None else _forms(moments)
    base = from_merton(MertonConstants(a, b, c))
    n, p = moments.n, moments.p
    v_u = base.v_gmv * n / (n - p)
    s_u = base.slope * (n - p - 1) / n - (p - 1) / n
    params = FrontierParams(base.r_gmv, v_u, s_u, validate=False)
    merton = MertonConstants(
        s_u + base.r_gmv**2 / v_u, base.r_gmv / v_u, 1.0 / v_u, validate=False
    )
    notes = ("negative-slope",) if s_u < 0 else ()
    return _report(EstimatorKind.UNBIASED, params, merton, moments, notes)


def _require_trace(moments: SampleMoments) -> float:
    trace = float(np.trace(moments.cov))
    if trace <= 0.0:
        raise ZeroTrace(f"sample covariance trace must be positive, got {trace}")
    return trace


def precision_sse(moments: SampleMoments) -> np.ndarray:
    """Scaled inverse sample covariance, ``(n - p - 2)/(n - 1) * inv(S)``.

    The scale removes the leading inflation of Wishart inverse moments, so
    quadratic forms in this matrix track the population forms.  Requires
    ``n > p + 2`` so that the scale is positive and ``inv(S)`` exists.
    """
    n, p = moments.n, moments.p
    if n < p + 3:
        raise TooFewObservations(
            f"scaled-inverse precision needs n >= p + 3, got n={n}, p={p}"
        )
    try:
        inv = scipy.linalg.inv(moments.cov, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"sample covariance is singular: {exc}") from exc
    return (n - p - 2) / (n - 1) * 0.5 * (inv + inv.T)


def precision_ebe(moments: SampleMoments) -> np.ndarray:
    """Empirical-Bayes precision: the scaled inverse plus an identity part.

    ``(n - p - 2)/(n - 1) inv(S)  +  (p**2 + p - 2)/((n - 1) tr S) I``.

    The identity component shrinks the precision toward a multiple of I,
    which dominates the plain scaled inverse in quadratic loss.
    """
    trace = _require_trace(moments)
    n, p = moments.n, moments.p
    base = precision_sse(moments)
    ridge = (p * p + p - 2) / ((n - 1) * trace)
    return base + ridge * np.eye(p)


def precision_rte(moments: SampleMoments) -> np.ndarray:
    """Ridge-type precision ``p * inv((n - 1) S + tr(S) I)``.

    The trace ridge keeps the matrix to invert positive definite for any
    ``p/n``, including ``p >= n`` where ``inv(S)`` does not exist.
    """
    trace = _require_trace(moments)
    n, p = moments.n, moments.p
    ridged = (n - 1) * moments.cov + trace * np.eye(p)
    try:
        inv = scipy.linalg.inv(ridged, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - ridge makes this PD
        raise NotPositiveDefinite(f"ridged covariance is singular: {exc}") from exc
    return p * 0.5 * (inv + inv.T)


_PRECISION_BUILDERS = {
    EstimatorKind.SSE: precision_sse,
    EstimatorKind.EBE: precision_ebe,
    EstimatorKind.RTE: precision_rte,
}


def plugin_frontier(precision, mean, kind: EstimatorKind, n: int) -> EstimateReport:
    """Frontier parameters from an explicit precision-matrix estimate.

    Parameters
    ----------
    precision : array_like, shape (p, p)
        Symmetric positive-definite estimate of ``inv(sigma)``.
    mean : array_like, shape (p,)
        Mean estimate.
    kind : EstimatorKind
        Label recorded in the report (normally one of the precision kinds).
    n : int
        Sample size behind the estimates, for the report's ``p/n`` ratio.

    Notes
    -----
    Positive definiteness of the precision guarantees, via Cauchy-Schwarz,
    a nonnegative slope — no unvalidated constructions are needed here.
    """
    mean = np.asarray(mean, dtype=float)
    if mean.ndim != 1 or mean.size < 2:
        raise DimensionMismatch(f"mean must be a 1-D vector of length >= 2, got shape {mean.shape}")
    precision = np.asarray(precision, dtype=float)
    if precision.shape != (mean.size, mean.size):
        raise DimensionMismatch(
            f"precision shape {precision.shape} does not match mean length {mean.size}"
        )
    try:
        scipy.linalg.cho_factor(precision, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"precision estimate is not positive definite: {exc}") from exc
    ones = np.ones(mean.size)
    pm = precision @ mean
    merton = MertonConstants(float(mean @ pm), float(ones @ pm), float(ones @ precision @ ones))
    p = mean.size
    return EstimateReport(
        kind=kind,
        params=from_merton(merton),
        merton=merton,
        p=p,
        n=int(n),
        ratio=p / int(n),
    )


def _precision_forms(moments: SampleMoments, kind: EstimatorKind,
                     base_forms: tuple[float, float, float] | None) -> MertonConstants:
    """Merton constants under each precision plug-in, dodging explicit inverses.

    The scaled-inverse and empirical-Bayes precisions are affine in
    ``inv(S)`` and ``I``, so their quadratic forms are affine in the base
    forms and in (||mean||^2, sum(mean), p).  The ridge-type estimator
    needs one solve against its own (always PD) ridged matrix.
    """
    n, p = moments.n, moments.p
    mean = moments.mean
    ones = np.ones(p)
    if kind is EstimatorKind.RTE:
        trace = _require_trace(moments)
        ridged = (n - 1) * moments.cov + trace * np.eye(p)
        factor = scipy.linalg.cho_factor(ridged, lower=True, check_finite=False)
        sol = scipy.linalg.cho_solve(
            factor, np.column_stack([ones, mean]), check_finite=False
        )
        return MertonConstants(
            p * float(mean @ sol[:, 1]),
            p * float(ones @ sol[:, 1]),
            p * float(ones @ sol[:, 0]),
        )
    if base_forms is None:
        base_forms = _forms(moments)
    a, b, c = base_forms
    if n < p + 3:
        raise TooFewObservations(
            f"scaled-inverse precision needs n >= p + 3, got n={n}, p={p}"
        )
    scale = (n - p - 2) / (n - 1)
    if kind is EstimatorKind.SSE:
        return MertonConstants(scale * a, scale * b, scale * c)
    if kind is EstimatorKind.EBE:
        trace = _require_trace(moments)
        ridge = (p * p + p - 2) / ((n - 1) * trace)
        return MertonConstants(
            scale * a + ridge * float(mean @ mean),
            scale * b + ridge * float(mean.sum()),
            scale * c + ridge * p,
        )
    raise InvalidParams(f"{kind!r} is not a precision plug-in kind")


def estimate(moments: SampleMoments, kind: EstimatorKind) -> EstimateReport:
    """Compute one estimator from sample moments.  See :func:`estimate_many`."""
    return estimate_many(moments, [kind])[kind]


def estimate_many(
    moments: SampleMoments, kinds
) -> dict[EstimatorKind, EstimateReport]:
    """Compute several frontier estimators from one set of sample moments.

    All kinds that need quadratic forms in ``inv(S)`` share a single
    Cholesky factorization of the sample covariance.

    Parameters
    ----------
    moments : SampleMoments
    kinds : iterable of EstimatorKind or str

    Returns
    -------
    dict mapping each requested kind to its :class:`EstimateReport`.
    """
    kinds = [EstimatorKind(k) for k in kinds]
    out: dict[EstimatorKind, EstimateReport] = {}
    base_forms: tuple[float, float, float] | None = None
    needs_base = {
        EstimatorKind.SAMPLE,
        EstimatorKind.CONSISTENT,
        EstimatorKind.UNBIASED,
        EstimatorKind.SSE,
        EstimatorKind.EBE,
    }
    if any(k in needs_base for k in kinds):
        base_forms = _forms(moments)
    for kind in kinds:
        if kind is EstimatorKind.SAMPLE:
            merton = MertonConstants(*base_forms)
            out[kind] = _report(kind, from_merton(merton), merton, moments)
        elif kind is EstimatorKind.CONSISTENT:
            ratio = moments.ratio
            if not 0.0 < ratio < 1.0:
                raise RatioOutOfRange(
                    f"consistent estimation requires p/n in (0, 1), got {ratio}"
                )
            shrink = 1.0 - ratio
            merton = MertonConstants(*(shrink * f for f in base_forms))
            out[kind] = _report(kind, from_merton(merton), merton, moments)
        elif kind is EstimatorKind.UNBIASED:
            out[kind] = unbiased_frontier(moments, base_forms)
        elif kind in _PRECISION_BUILDERS:
            merton = _precision_forms(moments, kind, base_forms)
            out[kind] = _report(kind, from_merton(merton), merton, moments)
        else:  # pragma: no cover - EstimatorKind() above already rejects
            raise InvalidParams(f"unsupported estimator kind {kind!r}")
    return out
