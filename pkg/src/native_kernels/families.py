"""Named correlation-kernel families and their parameter maps.

Every classical model handled here (triangular, circular, spherical,
Askey, Wendland variants, truncated polynomials, ...) is a member of
the hypergeometric class of `hyperkernel`, reached through a fixed
parameter map; the remaining families (Matern, Bessel-J, Gaussian,
incomplete gamma, and their oscillating variants) are limits of that
class and carry their own closed forms.

Each public constructor returns a `Kernel`: a small immutable record
bundling a family tag, the parameter record, the support radius, and a
vectorized evaluator.  Constructors validate parameters once; the
returned object is a pure function of its inputs and safe to share
across threads.

The closed forms are implemented on their own terms rather than by
delegating to `hyperkernel` (the one exception, `hole_wendland`, is a
definition-by-map in the first place).  Tests lean on that
independence: the same kernel computed through two unrelated pipelines
must agree to tight tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.special as _sp

from . import hyperkernel
from . import specfun as sf
from .errors import ConditioningWarning, DomainError, InvalidParameterError
from .hyperkernel import HyperParams, _log_gamma_ratio
from .specfun import PFQParams

__all__ = [
    "Kernel",
    "WendlandParams",
    "wendland_nu_min",
    "hypergeometric",
    "gauss_form_derivatives",
    "gauss_hypergeometric",
    "truncated_polynomial",
    "generalized_wendland",
    "hole_wendland",
    "matern",
    "hole_matern",
    "schoenberg",
    "gaussian",
    "hole_gaussian",
    "incomplete_gamma_kernel",
]

_INTEGER_TOL = 1e-9
# Above this hole order the closed-form Bessel weights are accumulated
# in floating point instead of exact rationals; see _hole_matern_weights.
_EXACT_WEIGHT_MAX_K = 12


class Kernel:
    """A radial correlation kernel with a named family tag.

    Attributes
    ----------
    family : str
        Family tag, e.g. ``"matern"`` or ``"hypergeometric"``.
    params : dict
        Family parameter record.  Always carries the scale ``a`` and
        the validity dimension ``d`` (``inf`` for families that belong
        to every dimension).
    support : float
        Radius beyond which the kernel is exactly zero; ``inf`` when
        the support is unbounded.

    Calling the kernel (or its `eval` method) with a scalar or array
    of nonnegative lags returns correlation values of matching shape;
    every family satisfies ``eval(0) == 1``.
    """

    __slots__ = ("family", "params", "support", "_evaluator")

    def __init__(self, family, params, evaluator, support=math.inf):
        self.family = str(family)
        self.params = dict(params)
        self.support = float(support)
        self._evaluator = evaluator

    def eval(self, h):
        """Correlation value at lag(s) ``h >= 0``."""
        arr = np.asarray(h, dtype=float)
        flat = np.atleast_1d(arr).ravel()
        if flat.size and (np.any(flat < 0.0) or not np.all(np.isfinite(flat))):
            raise DomainError("lags must be finite and nonnegative")
        vals = self._evaluator(flat)
        if arr.ndim == 0:
            return float(vals[0])
        return vals.reshape(arr.shape)

    __call__ = eval

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"Kernel[{self.family}]({inner})"


def _radial_eval(fn, support=math.inf):
    """Wrap an evaluator defined for lags in (0, support).

    The wrapper pins the exact values 1 at h = 0 and 0 at h >= support,
    so `fn` only ever sees strictly interior lags.
    """
    def wrapped(h):
        out = np.zeros(h.shape)
        out[h == 0.0] = 1.0
        inside = (h > 0.0) & (h < support)
        if np.any(inside):
            out[inside] = fn(h[inside])
        return out
    return wrapped


def _positive_real(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(
            f"{name} must be a positive real, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(
            f"{name} must be finite and > 0, got {value!r}")
    return value


def _integer_at_least(name, value, low):
    try:
        out = int(value)
        exact = float(value) == out
    except (TypeError, ValueError, OverflowError):
        exact = False
        out = 0
    if not exact or out < low:
        raise InvalidParameterError(
            f"{name} must be an integer >= {low}, got {value!r}")
    return out


def _near_integer(x, tol=_INTEGER_TOL):
    return abs(x - round(x)) <= tol


# ----------------------------------------------------------------------
# exact parameterizations
# ----------------------------------------------------------------------

def hypergeometric(theta: HyperParams) -> Kernel:
    """Kernel record for a raw parameter vector of the main class.

    Thin wrapper over `hyperkernel.evaluate_many`, including its
    automatic continuation routing; exists so that matrix assembly and
    the command line can treat every kernel uniformly.
    """
    report = hyperkernel.validate(theta)
    hyperkernel._require_admissible(theta, report)
    params = {"a": theta.a, "alpha": theta.alpha, "beta": theta.beta,
              "gamma": theta.gamma_, "d": theta.d, "k": theta.k}

    def _eval(h):
        return hyperkernel.evaluate_many(theta, h)

    return Kernel("hypergeometric", params, _eval, support=theta.a)


def _gauss_form_eval(a_range, aa, bb, cc, const):
    """Evaluator for const * z^(cc-1) * 2F1(aa, bb; cc; z), z = 1-h^2/a^2.

    The exponent cc - 1 is positive for every admissible parameter set,
    so the value runs continuously to 0 at the support edge.
    """
    expo = cc - 1.0

    def _inside(hpos):
        u = hpos / a_range
        # the hypergeometric factor takes the complement u^2 directly;
        # forming 1 - u^2 would round tiny lags onto the origin value
        z = (1.0 - u) * (1.0 + u)
        return const * z ** expo \
            * sf.gauss_2f1_complement_many(aa, bb, cc, u * u)

    return _radial_eval(_inside, support=a_range)


def gauss_hypergeometric(theta: HyperParams) -> Kernel:
    """Compactly supported kernel in Gauss (single 2F1) form, k = 0.

    For k = 0 the class collapses to one hypergeometric function of
    argument 1 - h^2/a^2.  Unlike the split series representation this
    form has no pole when ``alpha - d/2`` is a positive integer, so
    only A.1-A.3 are required of the parameters and no continuation
    handling is involved.

    Raises
    ------
    InvalidParameterError
        If ``theta.k != 0`` or any of A.1-A.3 fails.
    """
    if theta.k != 0:
        raise InvalidParameterError(
            f"gauss_hypergeometric requires k = 0, got k = {theta.k}")
    with warnings.catch_warnings():
        # the near-integer-parameter warning concerns the series
        # representation; this closed form is regular there
        warnings.simplefilter("ignore", ConditioningWarning)
        report = hyperkernel.validate(theta)
    hyperkernel._require_admissible(theta, report)
    half_d = 0.5 * theta.d
    aa = theta.beta - theta.alpha
    bb = theta.gamma_ - theta.alpha
    cc = theta.beta - theta.alpha + theta.gamma_ - half_d
    log, sign = _log_gamma_ratio(
        (theta.beta - half_d, theta.gamma_ - half_d),
        (cc, theta.alpha - half_d))
    const = sign * math.exp(log)
    params = {"a": theta.a, "alpha": theta.alpha, "beta": theta.beta,
              "gamma": theta.gamma_, "d": theta.d, "k": 0}
    return Kernel("gauss_hypergeometric", params,
                  _gauss_form_eval(theta.a, aa, bb, cc, const),
                  support=theta.a)


def gauss_form_derivatives(theta: HyperParams):
    """Analytic radial derivatives of the k = 0 closed form.

    Returns ``derivative(j, h)`` computing the j-th derivative of
    `gauss_hypergeometric`(theta) on (0, a), zero beyond the support.
    Repeated differentiation lowers the 2F1 denominator parameter one
    step at a time, so the result stays in closed form; suited as the
    derivative callback of the turning-bands operator.

    Raises
    ------
    InvalidParameterError
        If ``theta.k != 0``, A.1-A.3 fail, or the requested order would
        drive the lowered denominator parameter to a pole (fall back to
        finite differences in that case).
    """
    gauss_hypergeometric(theta)
    a_range = theta.a
    half_d = 0.5 * theta.d
    aa = theta.beta - theta.alpha
    bb = theta.gamma_ - theta.alpha
    cc = theta.beta - theta.alpha + theta.gamma_ - half_d
    log, sign = _log_gamma_ratio(
        (theta.beta - half_d, theta.gamma_ - half_d),
        (cc, theta.alpha - half_d))
    const = sign * math.exp(log)
    inv_a2 = 1.0 / (a_range * a_range)

    def _g_eval(s, h):
        # s-th z-derivative of z^(cc-1) 2F1(aa, bb; cc; z), z = 1-(h/a)^2
        low = cc - s
        if low < 1e-9:
            raise InvalidParameterError(
                f"analytic derivative order {s} drives the lowered "
                f"parameter to {low}; use finite differences instead")
        u = h / a_range
        z = (1.0 - u) * (1.0 + u)
        fac = 1.0
        for i in range(1, s + 1):
            fac *= cc - i
        return fac * z ** (cc - 1.0 - s) \
            * sf.gauss_2f1_complement_many(aa, bb, low, u * u)

    def derivative(j, h):
        j = int(j)
        if j < 0:
            raise InvalidParameterError("derivative order must be >= 0")
        h = np.asarray(h, dtype=float)
        scalar = h.ndim == 0
        h = np.atleast_1d(h)
        out = np.zeros_like(h)
        inside = (h > 0.0) & (h < a_range)
        if np.any(inside):
            hi = h[inside]
            # carry terms coef * h^m * G^(s)(z): the lag derivative maps
            # each to m coef h^(m-1) G^(s) - (2/a^2) coef h^(m+1) G^(s+1)
            terms = {(0, 0): 1.0}
            for _ in range(j):
                nxt = {}
                for (m, s), coef in terms.items():
                    if m > 0:
                        key = (m - 1, s)
                        nxt[key] = nxt.get(key, 0.0) + coef * m
                    key = (m + 1, s + 1)
                    nxt[key] = nxt.get(key, 0.0) - 2.0 * coef * inv_a2
                terms = nxt
            acc = np.zeros_like(hi)
            for (m, s), coef in terms.items():
                acc += coef * hi ** m * _g_eval(s, hi)
            out[inside] = const * acc
        if j == 0:
            out[h == 0.0] = 1.0
        return float(out[0]) if scalar else out

    return derivative


def truncated_polynomial(theta: HyperParams) -> Kernel:
    """Kernel as a pair of finite power sums in h/a.

    Applies when ``beta = 1 + alpha + M`` and ``gamma_ = 1 + d/2 + k + N``
    for naturals M, N (the class is symmetric in beta and gamma_, and
    the swapped reading is accepted too).  The value on [0, a) is

        sum_{n<=N} c_n (h/a)^(2n)
        + C * sum_{n<=M} e_n (h/a)^(2n + 2(alpha - d/2 - k)),

    a genuine polynomial whenever 2 alpha - d is an odd integer.

    Raises
    ------
    InvalidParameterError
        If M or N is not a natural number under either parameter
        reading, or any of A.1-A.4 fails.
    """
    half_d = 0.5 * theta.d
    hdk = half_d + theta.k

    def _offsets(beta, gamma_):
        m = beta - theta.alpha - 1.0
        n = gamma_ - hdk - 1.0
        ok = (_near_integer(m) and _near_integer(n)
              and round(m) >= 0 and round(n) >= 0)
        return ok, int(round(m)), int(round(n))

    ok, M, N = _offsets(theta.beta, theta.gamma_)
    if not ok:
        ok, M, N = _offsets(theta.gamma_, theta.beta)
        if not ok:
            raise InvalidParameterError(
                "truncated form needs beta = 1 + alpha + M and "
                "gamma = 1 + d/2 + k + N with M, N natural (in either "
                f"order); got beta={theta.beta!r}, gamma={theta.gamma_!r}")
        theta = HyperParams(theta.a, theta.alpha, theta.gamma_, theta.beta,
                            theta.d, theta.k)
    report = hyperkernel.validate(theta)
    hyperkernel._require_admissible(theta, report)
    if report.continuation_required:
        raise InvalidParameterError(
            "alpha - d/2 - k at a positive integer has no truncated "
            "power form; use the hypergeometric evaluator")

    alpha, k = theta.alpha, theta.k
    two_s0 = 2.0 * (alpha - hdk)
    first = np.array([
        sf.pochhammer(hdk, n) * sf.pochhammer(hdk - alpha - M, n)
        * sf.pochhammer(-N, n)
        / (sf.pochhammer(1.0 + hdk - alpha, n) * sf.pochhammer(half_d, n)
           * math.factorial(n))
        for n in range(N + 1)])
    second = np.array([
        sf.pochhammer(alpha, n) * sf.pochhammer(-M, n)
        * sf.pochhammer(alpha - hdk - N, n)
        / (sf.pochhammer(1.0 + alpha - hdk, n) * sf.pochhammer(alpha - k, n)
           * math.factorial(n))
        for n in range(M + 1)])
    log, sign = _log_gamma_ratio(
        (alpha, 1.0 + alpha + M - hdk, half_d, hdk - alpha),
        (hdk, alpha - hdk, 1.0 + hdk + N - alpha, alpha - k))
    log += math.lgamma(N + 1.0) - math.lgamma(M + 1.0)
    bridge = sign * math.exp(log)

    a_range = theta.a

    def _inside(hpos):
        y = (hpos / a_range) ** 2
        vals = np.polynomial.polynomial.polyval(y, first)
        vals += bridge * y ** (0.5 * two_s0) \
            * np.polynomial.polynomial.polyval(y, second)
        return vals

    params = {"a": theta.a, "alpha": alpha, "beta": theta.beta,
              "gamma": theta.gamma_, "d": theta.d, "k": k, "M": M, "N": N}
    return Kernel("truncated_polynomial", params,
                  _radial_eval(_inside, support=theta.a), support=theta.a)


# ----------------------------------------------------------------------
# Wendland family
# ----------------------------------------------------------------------

def wendland_nu_min(xi: float, d: float) -> float:
    """Smallest admissible tail exponent for offset xi in dimension d.

    The d = 1 branch with negative offset comes from the quadratic
    admissibility bound; everywhere else the linear one binds.
    """
    if d == 1 and -0.5 < xi < 0.0:
        return 0.5 * (math.sqrt(8.0 * xi + 9.0) - 1.0)
    return xi + 0.5 * (d + 1.0)


@dataclass(frozen=True)
class WendlandParams:
    """Parameter record of the (hole effect) Wendland family.

    Parameters
    ----------
    a : float
        Range, > 0.
    xi : float
        Smoothness offset, > -1/2.
    nu : float
        Tail exponent; at least ``wendland_nu_min(xi, d + 2 k)``.
    d : int
        Dimension, >= 1.
    k : int
        Hole-effect order, >= 0.
    """

    a: float
    xi: float
    nu: float
    d: int
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", _positive_real("a", self.a))
        for name in ("xi", "nu"):
            raw = getattr(self, name)
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise InvalidParameterError(
                    f"{name} must be a real number, got {raw!r}") from None
            if not math.isfinite(value):
                raise InvalidParameterError(
                    f"{name} must be finite, got {raw!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "d", _integer_at_least("d", self.d, 1))
        object.__setattr__(self, "k", _integer_at_least("k", self.k, 0))
        if self.xi <= -0.5:
            raise InvalidParameterError(
                f"xi must exceed -1/2, got {self.xi!r}")
        floor = wendland_nu_min(self.xi, self.d + 2 * self.k)
        if self.nu < floor - 1e-12:
            raise InvalidParameterError(
                f"nu = {self.nu!r} below the admissibility floor "
                f"{floor!r} for xi = {self.xi!r}, d = {self.d}, "
                f"k = {self.k}")

    @property
    def theta(self) -> HyperParams:
        """The equivalent parameter vector of the main class."""
        base = self.xi + 0.5 * (self.d + 1.0) + self.k
        return HyperParams(self.a, base, base + 0.5 * self.nu,
                           base + 0.5 * (self.nu + 1.0), self.d, self.k)


def generalized_wendland(w: WendlandParams) -> Kernel:
    """Compactly supported Wendland kernel, k = 0 (no hole effect).

    Evaluates the single-2F1 closed form directly; the Askey kernel
    (1 - h/a)_+^nu is the xi = 0 subcase.

    Raises
    ------
    InvalidParameterError
        If ``w.k != 0``.
    """
    if w.k != 0:
        raise InvalidParameterError(
            f"generalized_wendland requires k = 0, got k = {w.k}")
    aa = 0.5 * w.nu
    bb = 0.5 * (w.nu + 1.0)
    cc = w.xi + w.nu + 1.0
    log, sign = _log_gamma_ratio(
        (w.xi + 0.5 * (w.nu + 1.0), w.xi + 0.5 * w.nu + 1.0),
        (cc, w.xi + 0.5))
    const = sign * math.exp(log)
    params = {"a": w.a, "xi": w.xi, "nu": w.nu, "d": w.d, "k": 0}
    return Kernel("generalized_wendland", params,
                  _gauss_form_eval(w.a, aa, bb, cc, const), support=w.a)


def hole_wendland(w: WendlandParams) -> Kernel:
    """Oscillating Wendland kernel of hole order k.

    Defined as the member of the main class at the Wendland parameter
    map (see ``WendlandParams.theta``); evaluation delegates there,
    which routes automatically through the continuation path when
    ``xi + 1/2`` is a positive integer.
    """
    theta = w.theta

    def _eval(h):
        return hyperkernel.evaluate_many(theta, h)

    params = {"a": w.a, "xi": w.xi, "nu": w.nu, "d": w.d, "k": w.k}
    return Kernel("hole_wendland", params, _eval, support=w.a)


# ----------------------------------------------------------------------
# Matern family
# ----------------------------------------------------------------------

def _log_kv_many(order, x):
    """log K_order over a positive array, stable for large orders."""
    kve = _sp.kve(abs(order), x)
    out = np.empty_like(x)
    good = np.isfinite(kve) & (kve > 0.0)
    out[good] = np.log(kve[good]) - x[good]
    for i in np.nonzero(~good)[0]:
        out[i] = sf.log_bessel_k(order, float(x[i]))
    return out


def matern(a, nu) -> Kernel:
    """Matern correlation kernel with smoothness nu and scale a.

    ``2^(1-nu)/Gamma(nu) (h/a)^nu K_nu(h/a)``, extended by 1 at h = 0.
    The product is assembled in log space, which keeps the value finite
    for large orders at small lags where the Bessel factor alone
    overflows.  Valid in every dimension.
    """
    a = _positive_real("a", a)
    nu = _positive_real("nu", nu)
    base = (1.0 - nu) * math.log(2.0) - math.lgamma(nu)

    def _inside(hpos):
        x = hpos / a
        out = np.ones_like(x)
        pos = x > 0.0  # denormal lags can divide down to exactly zero
        if np.any(pos):
            xp = x[pos]
            out[pos] = np.exp(base + nu * np.log(xp) + _log_kv_many(nu, xp))
        return out

    params = {"a": a, "nu": nu, "d": math.inf, "k": 0}
    return Kernel("matern", params, _radial_eval(_inside))


@lru_cache(maxsize=128)
def _hole_matern_weights(nu: float, d: int, k: int) -> tuple:
    """Collapsed weights of the hole-effect Matern Bessel sum.

    The defining quadruple sum carries one term per (q, r, s, t); all
    terms sharing the same power shift p = q - r - s and order shift
    j = 2t + r + s - q are merged here, leaving at most O(k^2) Bessel
    evaluations per lag.  Individual weights grow factorially in k, so
    they are accumulated as exact rationals (nu enters as an exact
    dyadic) up to k = 12 and in floating point beyond.

    Returns a tuple of ((p, j), weight) pairs with the global factor
    2^(1-nu)/Gamma(nu) left out.
    """
    exact = k <= _EXACT_WEIGHT_MAX_K
    one = Fraction(1) if exact else 1.0
    nu_x = Fraction(nu) if exact else nu
    half_d = Fraction(d, 2) if exact else 0.5 * d

    def poch(x, n):
        out = one
        for i in range(n):
            out = out * (x + i)
        return out

    acc = {}
    for q in range(k + 1):
        for r in range(max(0, q - 1) + 1):
            for s in range(q - r + 1):
                for t in range(q - r - s + 1):
                    num = one * math.factorial(q - r)
                    num = num * poch(q - r, r)
                    num = num * poch(nu_x + 1 - s, s)
                    num = num * poch(k - q + 1, q)
                    num = num * poch(q, r)
                    den = one * (2 ** (2 * q - s))
                    den = den * (math.factorial(q) * math.factorial(r)
                                 * math.factorial(s) * math.factorial(t)
                                 * math.factorial(q - r - s - t))
                    den = den * poch(half_d, q)
                    w = num / den
                    if (q - s) % 2:
                        w = -w
                    key = (q - r - s, 2 * t + r + s - q)
                    acc[key] = acc.get(key, 0 * one) + w
    return tuple(((p, j), float(w))
                 for (p, j), w in sorted(acc.items()) if w != 0)


def hole_matern(a, nu, d, k) -> Kernel:
    """Oscillating Matern kernel of hole order k in dimension d.

    A signed combination of terms ``(h/a)^(nu+p) K_(nu+j)(h/a)`` with
    p, j in [-k, k]; reduces to `matern` at k = 0.  Each term is
    computed in log space.  The combination weights grow factorially
    with k and the terms cancel near the origin, so accuracy degrades
    for large k at small lags; a `ConditioningWarning` is emitted once
    k exceeds the exact-weight range.
    """
    a = _positive_real("a", a)
    nu = _positive_real("nu", nu)
    d = _integer_at_least("d", d, 1)
    k = _integer_at_least("k", k, 0)
    if k > _EXACT_WEIGHT_MAX_K:
        warnings.warn(
            f"hole order k = {k}: combination weights beyond the exact "
            "range are accumulated in floating point and the Bessel "
            "terms cancel heavily; expect reduced accuracy",
            ConditioningWarning, stacklevel=2)
    weights = _hole_matern_weights(nu, d, k)
    base = (1.0 - nu) * math.log(2.0) - math.lgamma(nu)

    def _inside(hpos):
        x = hpos / a
        out = np.ones_like(x)
        pos = x > 0.0  # denormal lags can divide down to exactly zero
        if not np.any(pos):
            return out
        xp = x[pos]
        lnx = np.log(xp)
        total = np.zeros_like(xp)
        for (p, j), w in weights:
            term = np.exp(math.log(abs(w)) + base + (nu + p) * lnx
                          + _log_kv_many(nu + j, xp))
            total += math.copysign(1.0, w) * term
        out[pos] = total
        return out

    params = {"a": a, "nu": nu, "d": d, "k": k}
    return Kernel("hole_matern", params, _radial_eval(_inside))


def _hole_matern_f12(a, nu, d, k, h):
    """Hole-effect Matern value through the pair-of-1F2 expression.

    Independent of the Bessel sum; only valid for non-integer nu (the
    gamma prefactor has poles at the naturals) and only accurate while
    the two exponentially growing sums have not outgrown their
    difference, i.e. for moderate h/a.  Test oracle, not a user path.
    """
    a = _positive_real("a", a)
    nu = _positive_real("nu", nu)
    if _near_integer(nu) and round(nu) >= 1:
        raise InvalidParameterError(
            "the 1F2 form of the hole-effect Matern kernel needs "
            f"non-integer nu, got {nu!r}")
    h = float(h)
    if h < 0.0:
        raise DomainError("lag h must be nonnegative")
    if h == 0.0:
        return 1.0
    half_d = 0.5 * d
    hdk = half_d + k
    z = (0.5 * h / a) ** 2
    f1 = sf.pfq(PFQParams((hdk,), (1.0 - nu, half_d)), z)
    f2 = sf.pfq(PFQParams((nu + hdk,), (nu + half_d, nu + 1.0)), z)
    log, sign = _log_gamma_ratio((nu + hdk, half_d, -nu),
                                 (hdk, nu, nu + half_d))
    return f1 + sign * math.exp(log + nu * math.log(z)) * f2


# ----------------------------------------------------------------------
# Bessel-J, Gaussian, incomplete gamma
# ----------------------------------------------------------------------

def schoenberg(a, d) -> Kernel:
    """Oscillating kernel at the lower positive-definiteness edge.

    ``Gamma(d/2) (h/2a)^(1-d/2) J_(d/2-1)(h/a)`` for h > 0 and 1 at
    h = 0: the cosine kernel for d = 1 and the cardinal sine for d = 3.
    Valid exactly in dimension d and below, with infinitely many sign
    changes.
    """
    a = _positive_real("a", a)
    d = _integer_at_least("d", d, 1)
    order = 0.5 * d - 1.0
    lg_half_d = math.lgamma(0.5 * d)

    def _inside(hpos):
        x = hpos / a
        out = np.empty_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            lead = order * np.log(0.5 * x) - lg_half_d
        # below this the leading Bessel term underflows for large d;
        # the two-term Taylor value is then exact to double precision.
        # Lags that divide down to zero land here as well.
        small = (x == 0.0) | (lead < -690.0)
        out[small] = 1.0 - x[small] ** 2 / (2.0 * d)
        big = ~small
        if np.any(big):
            xb = x[big]
            bj = _sp.jv(order, xb)
            with np.errstate(divide="ignore"):
                mag = np.exp(lg_half_d - order * np.log(0.5 * xb)
                             + np.log(np.abs(bj)))
            out[big] = np.where(bj >= 0.0, mag, -mag)
        return out

    params = {"a": a, "d": d}
    return Kernel("schoenberg", params, _radial_eval(_inside))


def gaussian(a) -> Kernel:
    """Gaussian kernel exp(-h^2/a^2); valid in every dimension."""
    a = _positive_real("a", a)

    def _inside(hpos):
        u = hpos / a
        return np.exp(-u * u)

    params = {"a": a, "d": math.inf, "k": 0}
    return Kernel("gaussian", params, _radial_eval(_inside))


def hole_gaussian(a, d, k) -> Kernel:
    """Oscillating Gaussian kernel of hole order k in dimension d.

    ``Gamma(d/2) k! / Gamma(d/2+k) exp(-h^2/4a^2) L_k^(d/2-1)(h^2/4a^2)``
    with the generalized Laguerre polynomial supplying exactly k
    positive zeros.  Note the scale convention: k = 0 yields
    exp(-h^2/4a^2), which matches `gaussian` only after halving a.
    """
    a = _positive_real("a", a)
    d = _integer_at_least("d", d, 1)
    k = _integer_at_least("k", k, 0)
    pref = math.factorial(k) / sf.pochhammer(0.5 * d, k)
    mu = 0.5 * d - 1.0

    def _inside(hpos):
        z = (0.5 * hpos / a) ** 2
        return pref * np.exp(-z) * _sp.eval_genlaguerre(k, mu, z)

    params = {"a": a, "d": d, "k": k}
    return Kernel("hole_gaussian", params, _radial_eval(_inside))


def incomplete_gamma_kernel(a, alpha, d, k) -> Kernel:
    """Kernel built from k+1 regularized incomplete gamma terms.

    At k = 0 this is the regularized upper incomplete gamma function of
    h^2/a^2, which contains exp(-h^2/a^2) (alpha = d/2 + 1), the
    Gaussian-polynomial kernels (alpha = d/2 + 1 + q) and erfc(h/a)
    (alpha = (d+1)/2) as special cases.

    Raises
    ------
    InvalidParameterError
        Unless ``alpha > d/2 + k``.
    """
    a = _positive_real("a", a)
    alpha = _positive_real("alpha", alpha)
    d = _integer_at_least("d", d, 1)
    k = _integer_at_least("k", k, 0)
    s = alpha - 0.5 * d - k
    if s <= 0.0:
        raise InvalidParameterError(
            f"alpha must exceed d/2 + k = {0.5 * d + k!r}, got {alpha!r}")
    coeffs = np.array([
        (-1.0) ** n * math.comb(k, n)
        * sf.pochhammer(alpha - k + n, k - n) * sf.pochhammer(s, n)
        / sf.pochhammer(0.5 * d, k)
        for n in range(k + 1)])

    def _inside(hpos):
        z = (hpos / a) ** 2
        acc = np.zeros_like(z)
        for n, cn in enumerate(coeffs):
            acc += cn * _sp.gammainc(s + n, z)
        return 1.0 - acc

    params = {"a": a, "alpha": alpha, "d": d, "k": k}
    return Kernel("incomplete_gamma", params, _radial_eval(_inside))
