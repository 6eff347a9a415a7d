"""Compactly supported kernel class: validation, evaluation, spectrum.

The family is indexed by ``theta = (a, alpha, beta, gamma_, d, k)``.
Members are radial correlation functions on R^d, equal to 1 at the
origin, vanishing outside [0, a), with at least k sign changes inside
(0, a) when k >= 1.  Admissibility of a parameter vector is decided by
four conditions:

    A.1  alpha > d/2 + k
    A.2  2 (beta - alpha) (gamma_ - alpha) >= alpha
    A.3  2 (beta + gamma_) >= 6 alpha + 1
    A.4  alpha - d/2 - k is not a positive integer

A.4 failing does not kill the kernel: it is then defined by continuation
in alpha, and evaluation routes through a representation that stays
finite there.  Three evaluation paths are implemented:

* a pair of generalized hypergeometric series in (h/a)^2, fast and well
  conditioned for h/a <= 1/2;
* a rewrite as 2(k+1) Gauss functions of argument (h/a)^2, kept as an
  independent cross-check;
* a near-range form: the order-2k turning bands operator applied to the
  k=0 closed form, collapsing to k+1 regularized Gauss functions of
  argument 1 - (h/a)^2 with exact rational weights.  It is stable for
  h/a > 1/2 and is the only valid path in the continuation case.

Everything here is a pure function of immutable parameter values, so
all operations are safe to call concurrently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import (
    ConditioningWarning,
    DomainError,
    InvalidParameterError,
    PoleError,
    RepresentationMismatchError,
)
from .specfun import PFQParams

_INTEGER_TOL = 1e-9
_WARN_TOL = 1e-5
_CHECK_TOL = 1e-6
_TINY_LAG = 1e-8
_SERIES_CUTOFF = 0.5


@dataclass(frozen=True)
class HyperParams:
    """Parameter vector of the kernel family.

    Parameters
    ----------
    a : float
        Range (support radius) in length units, > 0.
    alpha : float
        Smoothness driver, > 0.
    beta, gamma_ : float
        Shape parameters, > 0.  The trailing underscore keeps the
        field clear of the ubiquitous gamma-function name.
    d : int
        Embedding dimension, >= 1.
    k : int
        Hole-effect order, >= 0.
    """

    a: float
    alpha: float
    beta: float
    gamma_: float
    d: int
    k: int

    def __post_init__(self):
        for name in ("a", "alpha", "beta", "gamma_"):
            raw = getattr(self, name)
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise InvalidParameterError(
                    f"{name} must be a positive real, got {raw!r}") from None
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidParameterError(
                    f"{name} must be finite and > 0, got {raw!r}")
            object.__setattr__(self, name, value)
        for name, low in (("d", 1), ("k", 0)):
            raw = getattr(self, name)
            try:
                value = int(raw)
                exact = float(raw) == value
            except (TypeError, ValueError, OverflowError):
                exact = False
                value = 0
            if not exact:
                raise InvalidParameterError(
                    f"{name} must be an integer, got {raw!r}")
            if value < low:
                raise InvalidParameterError(
                    f"{name} must be >= {low}, got {raw!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the admissibility conditions for one parameter vector.

    Attributes
    ----------
    conditions : dict
        Pass/fail for each of "A.1" .. "A.4".
    strict_a3 : bool
        Whether A.3 holds with strict inequality; only then is the
        native space norm equivalent to a Sobolev space.
    sobolev_exponent : float or None
        ``alpha - k`` when every condition passes and A.3 is strict,
        otherwise None.
    continuation_required : bool
        True when ``alpha - d/2 - k`` lies within 1e-9 of a positive
        integer; evaluation then uses the continuation path.
    """

    conditions: dict[str, bool]
    strict_a3: bool
    sobolev_exponent: float | None
    continuation_required: bool

    @property
    def all_passed(self) -> bool:
        return all(self.conditions.values())


@dataclass(frozen=True)
class NormalizingConstants:
    """The two Gamma-product constants attached to a parameter vector.

    ``varpi`` scales the singular branch of the lag-domain series;
    ``varpi_hat`` scales the spectral density and is positive for every
    admissible parameter vector.
    """

    varpi: float
    varpi_hat: float


def validate(theta: HyperParams) -> ValidityReport:
    """Evaluate the admissibility conditions A.1-A.4.

    Never raises on a failed condition; the report carries the
    outcome.  A.4 is tested with an integer-proximity tolerance of
    1e-9.  When ``alpha - d/2 - k`` is within 1e-5 of a positive
    integer without triggering the continuation route, a
    `ConditioningWarning` is emitted, since the two series branches
    nearly cancel there.
    """
    half_d = 0.5 * theta.d
    s0 = theta.alpha - half_d - theta.k
    a1 = theta.alpha > half_d + theta.k
    a2 = 2.0 * (theta.beta - theta.alpha) * (theta.gamma_ - theta.alpha) \
        >= theta.alpha
    lhs3 = 2.0 * (theta.beta + theta.gamma_)
    rhs3 = 6.0 * theta.alpha + 1.0
    a3 = lhs3 >= rhs3
    strict_a3 = lhs3 > rhs3
    nearest = round(s0)
    gap = abs(s0 - nearest)
    continuation = nearest >= 1 and gap <= _INTEGER_TOL
    if nearest >= 1 and _INTEGER_TOL < gap < _WARN_TOL:
        warnings.warn(
            f"alpha - d/2 - k = {s0!r} is within {gap:.1e} of the integer "
            f"{nearest}; evaluation is ill-conditioned this close to the "
            "continuation boundary",
            ConditioningWarning, stacklevel=2)
    if a2 and a3:
        # A.2 and A.3 jointly force both shape parameters above alpha.
        assert theta.beta > theta.alpha and theta.gamma_ > theta.alpha
    conditions = {"A.1": a1, "A.2": a2, "A.3": a3, "A.4": not continuation}
    sobolev = None
    if a1 and a2 and a3 and not continuation and strict_a3:
        sobolev = theta.alpha - theta.k
    return ValidityReport(conditions=conditions, strict_a3=strict_a3,
                          sobolev_exponent=sobolev,
                          continuation_required=continuation)


def _require_admissible(theta: HyperParams,
                        report: ValidityReport) -> None:
    failed = [name for name in ("A.1", "A.2", "A.3")
              if not report.conditions[name]]
    if failed:
        raise InvalidParameterError(
            f"parameter vector {theta} fails condition(s) "
            f"{', '.join(failed)}")


def _log_gamma_ratio(numerator, denominator):
    """log and sign of prod Gamma(numerator) / prod Gamma(denominator)."""
    log = 0.0
    sign = 1.0
    for arg in numerator:
        lg, sg = specfun.log_gamma_sign(arg)
        log += lg
        sign *= sg
    for arg in denominator:
        lg, sg = specfun.log_gamma_sign(arg)
        log -= lg
        sign *= sg
    return log, sign


@lru_cache(maxsize=512)
def _varpi(theta: HyperParams) -> float:
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    log, sign = _log_gamma_ratio(
        (theta.alpha, theta.beta - hdk, theta.gamma_ - hdk, hd,
         hdk - theta.alpha),
        (hdk, theta.alpha - hdk, theta.beta - theta.alpha,
         theta.gamma_ - theta.alpha, theta.alpha - theta.k))
    return sign * math.exp(log)


@lru_cache(maxsize=512)
def _varpi_hat(theta: HyperParams) -> float:
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    log, sign = _log_gamma_ratio(
        (hd, theta.alpha, theta.beta - hdk, theta.gamma_ - hdk),
        (hdk, theta.alpha - hdk, theta.beta, theta.gamma_))
    log -= hd * math.log(math.pi) + (theta.d + 2 * theta.k) * math.log(2.0)
    return sign * math.exp(log)


def normalizing_constants(theta: HyperParams) -> NormalizingConstants:
    """Gamma-product constants, evaluated in log space with sign tracking.

    Raises
    ------
    InvalidParameterError
        If any of A.1-A.3 fails.
    PoleError
        If ``alpha - d/2 - k`` is a positive integer (within 1e-9):
        ``Gamma(d/2 + k - alpha)`` then sits on a pole, which is the
        arithmetic face of condition A.4.
    """
    report = validate(theta)
    _require_admissible(theta, report)
    if report.continuation_required:
        s0 = theta.alpha - 0.5 * theta.d - theta.k
        raise PoleError(
            f"Gamma(d/2 + k - alpha) has a pole: alpha - d/2 - k = {s0!r} "
            "is a positive integer (within 1e-9)")
    return NormalizingConstants(varpi=_varpi(theta),
                                varpi_hat=_varpi_hat(theta))


# ----------------------------------------------------------------------
# evaluation paths
# ----------------------------------------------------------------------

def _series_value(theta: HyperParams, u: float) -> float:
    """Two-branch hypergeometric series at x = u^2, for u <= 1/2.

    The singular branch carries u^(2 alpha - d - 2k) and the constant
    varpi; the analytic branch starts at 1.  Both series converge
    geometrically for u <= 1/2 and the branches do not yet cancel
    significantly there.
    """
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    s0 = theta.alpha - hdk
    x = u * u
    singular = PFQParams(
        (theta.alpha, 1.0 + theta.alpha - theta.beta,
         1.0 + theta.alpha - theta.gamma_),
        (1.0 + s0, theta.alpha - theta.k))
    analytic = PFQParams(
        (hdk, 1.0 + hdk - theta.beta, 1.0 + hdk - theta.gamma_),
        (1.0 - s0, hd))
    return (_varpi(theta) * u ** (2.0 * s0) * specfun.pfq(singular, x)
            + specfun.pfq(analytic, x))


def _gauss_pair_value(theta: HyperParams, u: float) -> float:
    """Cross-check representation: 2(k+1) Gauss functions at x = u^2."""
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    s0 = theta.alpha - hdk
    x = u * u
    kfac = math.factorial(theta.k)
    analytic = 0.0
    for n in range(theta.k + 1):
        coeff = ((-1.0) ** n * kfac
                 * specfun.pochhammer(1.0 + hdk - theta.beta, n)
                 * specfun.pochhammer(1.0 + hdk - theta.gamma_, n)
                 / (math.factorial(n) * math.factorial(theta.k - n)
                    * specfun.pochhammer(1.0 - hd - n, n)
                    * specfun.pochhammer(1.0 - s0, n)))
        analytic += coeff * x ** n * specfun.gauss_2f1(
            1.0 + hdk - theta.beta + n, 1.0 + hdk - theta.gamma_ + n,
            1.0 - s0 + n, x)
    log_b, sign_b = _log_gamma_ratio(
        (theta.beta - hdk, theta.gamma_ - hdk, hd, -s0),
        (hdk, s0, theta.beta - theta.alpha, theta.gamma_ - theta.alpha))
    singular = 0.0
    for n in range(theta.k + 1):
        coeff = ((-1.0) ** (n + theta.k) * kfac
                 * specfun.pochhammer(1.0 - theta.alpha, theta.k - n)
                 * specfun.pochhammer(1.0 + theta.alpha - theta.beta, n)
                 * specfun.pochhammer(1.0 + theta.alpha - theta.gamma_, n)
                 / (math.factorial(n) * math.factorial(theta.k - n)
                    * specfun.pochhammer(1.0 + s0, n)))
        singular += coeff * u ** (2.0 * s0 + 2 * n) * specfun.gauss_2f1(
            1.0 + theta.alpha - theta.beta + n,
            1.0 + theta.alpha - theta.gamma_ + n, 1.0 + s0 + n, x)
    return analytic + sign_b * math.exp(log_b) * singular


@lru_cache(maxsize=128)
def _near_range_weights(k: int, d: int) -> tuple[Fraction, ...]:
    """Rational weights of the near-range representation.

    Applying the order-2k turning bands operator

        C_d(h) = sum_{q=0}^{k} sum_{r=0}^{max(0,q-1)}
                 (-1)^r (k-q+1)_q (q)_r (q-r)_r h^(q-r) C^(q-r)(h)
                 / (2^(q+r) q! r! (d/2)_q)

    to the k=0 closed form kappa z^(c-1) 2F1r(A, B; c; z), z = 1-u^2,
    and folding the derivatives through the exact ladder

        d/dz [z^(c-1) 2F1r(A, B; c; z)] = z^(c-2) 2F1r(A, B; c-1; z)

    plus the chain rule for the quadratic map h -> z leaves a single
    sum over j with the weights computed here:

        H(u) = kappa sum_j T_j u^(2j) z^(c-1-j) 2F1r(A, B; c-j; z).

    The weights depend on (k, d) only and are exact rationals.
    """
    weights = [Fraction(0)] * (k + 1)

    def rising(x: Fraction, n: int) -> Fraction:
        out = Fraction(1)
        for i in range(n):
            out *= x + i
        return out

    for q in range(k + 1):
        for r in range(max(0, q - 1) + 1):
            m = q - r
            lead = (Fraction(-1) ** r * rising(Fraction(k - q + 1), q)
                    * rising(Fraction(q), r) * rising(Fraction(q - r), r)
                    / (Fraction(2) ** (q + r)
                       * math.factorial(q) * math.factorial(r)
                       * rising(Fraction(d, 2), q)))
            # m-th lag derivative of f(z(h)), z quadratic in h: i factors
            # of z'' and m-2i of z', j = m-i applications of the ladder
            for j in range((m + 1) // 2, m + 1):
                i = m - j
                weights[j] += (lead * Fraction(-2) ** j
                               * Fraction(math.factorial(m),
                                          math.factorial(i)
                                          * math.factorial(2 * j - m)
                                          * 2 ** i))
    return tuple(weights)


def _near_range_value(theta: HyperParams, u: float) -> float:
    """Near-range representation, valid on all of 0 < u <= 1.

    The Gauss argument is z = 1 - u^2, so accuracy improves toward the
    range, and nothing degenerates when alpha - d/2 - k is a positive
    integer: the lower parameters c - j stay strictly positive and the
    integer-difference connection cases are handled inside gauss_2f1.
    """
    if u >= 1.0:
        return 0.0
    if u < _TINY_LAG:
        # every j >= 1 term is O(u^2) and the j = 0 term deviates from
        # 1 by O(u^(2 min(1, s0))); with the series path covering
        # s0 < 1, the truncation error here is below 1e-15
        return 1.0
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    s0 = theta.alpha - hdk
    big_a = theta.beta - theta.alpha
    big_b = theta.gamma_ - theta.alpha
    base = big_a + big_b + s0
    z = 1.0 - u * u
    log_g, _ = _log_gamma_ratio(
        (theta.beta - hdk, theta.gamma_ - hdk), (s0,))
    total = 0.0
    for j, weight in enumerate(_near_range_weights(theta.k, theta.d)):
        if weight == 0:
            continue
        total += (float(weight) * u ** (2 * j)
                  * z ** (base - 1.0 - j)
                  * specfun.gauss_2f1_regularized(big_a, big_b,
                                                  base - j, z))
    return math.exp(log_g) * total


def _series_many(theta: HyperParams, u: np.ndarray) -> np.ndarray:
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    s0 = theta.alpha - hdk
    x = u * u
    singular = PFQParams(
        (theta.alpha, 1.0 + theta.alpha - theta.beta,
         1.0 + theta.alpha - theta.gamma_),
        (1.0 + s0, theta.alpha - theta.k))
    analytic = PFQParams(
        (hdk, 1.0 + hdk - theta.beta, 1.0 + hdk - theta.gamma_),
        (1.0 - s0, hd))
    return (_varpi(theta) * u ** (2.0 * s0)
            * specfun.pfq_many(singular, x)
            + specfun.pfq_many(analytic, x))


def _near_range_many(theta: HyperParams, u: np.ndarray) -> np.ndarray:
    out = np.empty_like(u)
    tiny = u < _TINY_LAG
    out[tiny] = 1.0
    z = 1.0 - u * u
    # the vectorized direct series is safe while z stays away from 1;
    # closer in, fall back to the scalar path with its connection
    # formulas (only reachable in the continuation case, where the
    # series representation is unavailable at small u)
    direct = ~tiny & (z <= 0.75)
    scalar = ~tiny & ~direct
    for idx in np.flatnonzero(scalar):
        out[idx] = _near_range_value(theta, float(u[idx]))
    if not np.any(direct):
        return out
    hd = 0.5 * theta.d
    hdk = hd + theta.k
    s0 = theta.alpha - hdk
    big_a = theta.beta - theta.alpha
    big_b = theta.gamma_ - theta.alpha
    base = big_a + big_b + s0
    ud = u[direct]
    zd = z[direct]
    log_g, _ = _log_gamma_ratio(
        (theta.beta - hdk, theta.gamma_ - hdk), (s0,))
    total = np.zeros_like(ud)
    for j, weight in enumerate(_near_range_weights(theta.k, theta.d)):
        if weight == 0:
            continue
        lg_c, _ = specfun.log_gamma_sign(base - j)
        total += (float(weight) * math.exp(log_g - lg_c) * ud ** (2 * j)
                  * zd ** (base - 1.0 - j)
                  * specfun.gauss_2f1_series_many(big_a, big_b,
                                                  base - j, zd))
    out[direct] = total
    return out


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------

def evaluate(theta: HyperParams, h: float, check: bool = False) -> float:
    """Kernel value at lag h >= 0.

    Returns exactly 0.0 for h >= a and exactly 1.0 at h = 0.  In
    between, the representation is chosen by lag: the hypergeometric
    series pair for h/a <= 1/2, the near-range Gauss form beyond, and
    the near-range form everywhere when the parameter vector requires
    continuation.

    Parameters
    ----------
    theta : HyperParams
        Parameter vector; must pass A.1-A.3 (continuation per A.4 is
        routed automatically).
    h : float
        Lag, >= 0; negative lags are rejected rather than reflected.
    check : bool, optional
        When True, also evaluate an independent representation and
        raise `RepresentationMismatchError` if the two differ by more
        than 1e-6 on the scale of the kernel.  Doubles the cost.

    Raises
    ------
    InvalidParameterError
        If any of A.1-A.3 fails.
    DomainError
        If h < 0.
    RepresentationMismatchError
        Only with ``check=True``, on cross-check failure.
    """
    report = validate(theta)
    _require_admissible(theta, report)
    h = float(h)
    if h < 0.0:
        raise DomainError("lag h must be nonnegative")
    if h >= theta.a:
        return 0.0
    if h == 0.0:
        return 1.0
    u = h / theta.a
    if report.continuation_required:
        value = _near_range_value(theta, u)
        if check:
            # single usable representation: compare against a small
            # move off the integer parameter point, continuous in alpha
            shifted = HyperParams(theta.a, theta.alpha - 1e-6, theta.beta,
                                  theta.gamma_, theta.d, theta.k)
            other = _near_range_value(shifted, u)
            if abs(value - other) > 1e-3 * max(1.0, abs(value)):
                raise RepresentationMismatchError(
                    f"continuation value {value!r} vs perturbed-alpha "
                    f"value {other!r} at h={h!r}")
        return value
    if u <= _SERIES_CUTOFF:
        value = _series_value(theta, u)
        other = _near_range_value(theta, u) if check else None
    else:
        value = _near_range_value(theta, u)
        other = _series_value(theta, u) if check else None
    if check and abs(value - other) > _CHECK_TOL * max(
            1.0, abs(value), abs(other)):
        raise RepresentationMismatchError(
            f"series value {value!r} and near-range value {other!r} "
            f"disagree beyond {_CHECK_TOL} at h={h!r}")
    return value


def evaluate_many(theta: HyperParams, h) -> np.ndarray:
    """Vectorized `evaluate` over an array of lags.

    Same routing as the scalar version, applied through region masks;
    series sums are evaluated across the whole array at once.
    """
    report = validate(theta)
    _require_admissible(theta, report)
    h = np.asarray(h, dtype=float)
    if np.any(h < 0.0):
        raise DomainError("lags must be nonnegative")
    out = np.zeros(h.shape)
    out[h == 0.0] = 1.0
    inside = (h > 0.0) & (h < theta.a)
    if not np.any(inside):
        return out
    u = h[inside] / theta.a
    if report.continuation_required:
        values = _near_range_many(theta, u)
    else:
        values = np.empty_like(u)
        low = u <= _SERIES_CUTOFF
        if np.any(low):
            values[low] = _series_many(theta, u[low])
        if np.any(~low):
            values[~low] = _near_range_many(theta, u[~low])
    out[inside] = values
    return out


def evaluate_continuation(theta: HyperParams, h: float) -> float:
    """Kernel value by continuation, for integer alpha - d/2 - k.

    The generic series representation degenerates when
    ``alpha - d/2 - k`` is a positive integer; the kernel is still well
    defined as the limit in alpha and is computed here through the
    near-range form, which stays finite on (0, a] and preserves
    ``H(0) = 1``.

    Raises
    ------
    InvalidParameterError
        If any of A.1-A.3 fails, or if the parameter vector does not
        actually require continuation (use `evaluate` instead).
    DomainError
        If h < 0.
    """
    report = validate(theta)
    _require_admissible(theta, report)
    if not report.continuation_required:
        raise InvalidParameterError(
            "alpha - d/2 - k is not a positive integer (within 1e-9); "
            "use evaluate for this parameter vector")
    h = float(h)
    if h < 0.0:
        raise DomainError("lag h must be nonnegative")
    if h >= theta.a:
        return 0.0
    if h == 0.0:
        return 1.0
    return _near_range_value(theta, h / theta.a)


def spectral_density(theta: HyperParams, u: float) -> float:
    """Isotropic spectral density at radial frequency u >= 0.

    Returns ``varpi_hat a^(d+2k) u^(2k) 1F2(alpha; beta, gamma_;
    -(a u)^2 / 4)``, which is nonnegative on [0, inf) for admissible
    parameter vectors.

    Raises
    ------
    InvalidParameterError
        If any of A.1-A.4 fails (the closed form requires A.4).
    DomainError
        If u < 0.
    """
    report = validate(theta)
    _require_admissible(theta, report)
    if report.continuation_required:
        raise InvalidParameterError(
            "spectral density closed form requires A.4: alpha - d/2 - k "
            "is a positive integer (within 1e-9)")
    u = float(u)
    if u < 0.0:
        raise DomainError("frequency u must be nonnegative")
    x = -0.25 * (theta.a * u) ** 2
    shape = specfun.pfq(
        PFQParams((theta.alpha,), (theta.beta, theta.gamma_)), x)
    return (_varpi_hat(theta) * theta.a ** (theta.d + 2 * theta.k)
            * u ** (2 * theta.k) * shape)


def spectral_density_many(theta: HyperParams, u) -> np.ndarray:
    """`spectral_density` over an array of frequencies.

    The shape function switches between ascending series and the
    large-argument expansion per point, so this is a plain loop.
    """
    u = np.asarray(u, dtype=float)
    flat = u.ravel()
    out = np.empty(flat.shape)
    for i, value in enumerate(flat):
        out[i] = spectral_density(theta, float(value))
    return out.reshape(u.shape)
