"""Named-family tests.

The classical compact families have exact closed forms (polynomials,
arccos terms, half-integer Bessel reductions) that are written out here
from scratch; the library must hit them at near-roundoff tolerance.
The hole-effect Matern and continuation Wendland values were frozen
from 40-60 digit mpmath evaluations of the defining sums, computed
independently of the library's weight grouping.
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from native_kernels import families as fam
from native_kernels import hyperkernel as hk
from native_kernels import specfun as sf
from native_kernels.errors import (ConditioningWarning, DomainError,
                                   InvalidParameterError)

GRID = np.linspace(0.0, 0.999, 200)


# ----------------------------------------------------------------------
# closed forms written from the classical literature, no library code


def spherical_exact(u):
    return np.where(u < 1.0, 1.0 - 1.5 * u + 0.5 * u ** 3, 0.0)


def triangular_exact(u):
    return np.maximum(1.0 - u, 0.0)


def circular_exact(u):
    u = np.minimum(u, 1.0)
    return (2.0 / np.pi) * (np.arccos(u) - u * np.sqrt(1.0 - u ** 2))


def pentaspherical_exact(u):
    return np.where(u < 1.0,
                    1.0 - u * (15.0 - 10.0 * u ** 2 + 3.0 * u ** 4) / 8.0,
                    0.0)


def cubic_exact(u):
    p = 1.0 - u ** 2 * (7.0 - 8.75 * u + 3.5 * u ** 3 - 0.75 * u ** 5)
    return np.where(u < 1.0, p, 0.0)


def penta_exact(u):
    p = (1.0 - (22.0 / 3.0) * u ** 2 + 33.0 * u ** 4 - 38.5 * u ** 5
         + 16.5 * u ** 7 - 5.5 * u ** 9 + (5.0 / 6.0) * u ** 11)
    return np.where(u < 1.0, p, 0.0)


# ----------------------------------------------------------------------
# Kernel wrapper behaviour


def test_kernel_scalar_and_array_conventions():
    ker = fam.gaussian(2.0)
    v = ker(1.0)
    assert isinstance(v, float)
    arr = ker(np.array([[0.0, 1.0], [2.0, 3.0]]))
    assert arr.shape == (2, 2)
    assert arr[0, 0] == 1.0
    with pytest.raises(DomainError):
        ker(-0.5)
    with pytest.raises(DomainError):
        ker(np.array([0.0, np.nan]))


def test_kernel_support_and_zero_lag():
    ker = fam.generalized_wendland(fam.WendlandParams(2.0, 1.0, 4.0, 3))
    assert ker.support == 2.0
    assert ker(0.0) == 1.0
    assert ker(2.0) == 0.0
    assert ker(5.0) == 0.0
    assert fam.matern(1.0, 0.5).support == math.inf


def test_kernel_repr_and_params():
    ker = fam.matern(1.5, 2.5)
    assert "matern" in repr(ker)
    assert ker.params["a"] == 1.5 and ker.params["nu"] == 2.5


# ----------------------------------------------------------------------
# classical rows through the Gauss closed form


CLASSICAL_ROWS = [
    ("triangular", hk.HyperParams(1.0, 1.0, 1.5, 2.0, 1, 0), triangular_exact),
    ("circular", hk.HyperParams(1.0, 1.5, 2.0, 3.0, 2, 0), circular_exact),
    ("spherical", hk.HyperParams(1.0, 2.0, 2.5, 4.0, 3, 0), spherical_exact),
    ("pentaspherical", hk.HyperParams(1.0, 3.0, 3.5, 6.0, 5, 0),
     pentaspherical_exact),
    ("cubic", hk.HyperParams(1.0, 3.0, 3.5, 6.0, 3, 0), cubic_exact),
    ("penta", hk.HyperParams(1.0, 4.0, 4.5, 8.0, 3, 0), penta_exact),
]


@pytest.mark.parametrize("name,theta,exact",
                         CLASSICAL_ROWS, ids=[r[0] for r in CLASSICAL_ROWS])
def test_gauss_form_matches_closed_form(name, theta, exact):
    ker = fam.gauss_hypergeometric(theta)
    got = ker(GRID)
    assert np.max(np.abs(got - exact(GRID))) < 1e-13


@pytest.mark.parametrize("name,theta,exact",
                         CLASSICAL_ROWS, ids=[r[0] for r in CLASSICAL_ROWS])
def test_gauss_form_matches_series_route(name, theta, exact):
    ker = fam.gauss_hypergeometric(theta)
    inner = GRID[GRID < 1.0]
    got = ker(inner)
    via_series = hk.evaluate_many(theta, inner)
    assert np.max(np.abs(got - via_series)) < 1e-12


def test_spherical_spot_value():
    ker = fam.gauss_hypergeometric(hk.HyperParams(1.0, 2.0, 2.5, 4.0, 3, 0))
    assert ker(0.5) == pytest.approx(0.3125, abs=1e-15)


def test_triangular_spot_value():
    ker = fam.gauss_hypergeometric(hk.HyperParams(1.0, 1.0, 1.5, 2.0, 1, 0))
    assert ker(0.25) == pytest.approx(0.75, abs=1e-15)


def test_quadratic_row_on_smoothness_boundary():
    # alpha = 2, beta = 3, gamma = 3.5, d = 3 sits exactly on the
    # boundary where the smoothness condition holds with equality
    theta = hk.HyperParams(1.0, 2.0, 3.0, 3.5, 3, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ker = fam.gauss_hypergeometric(theta)
    got = ker(GRID)
    assert np.all(np.isfinite(got))
    assert got[0] == 1.0
    assert np.all(np.diff(got) <= 1e-12)


def test_gauss_form_rejects_hole_parameters():
    with pytest.raises(InvalidParameterError):
        fam.gauss_hypergeometric(hk.HyperParams(1.0, 2.5, 5.5, 6.0, 2, 1))


def test_upgraded_euclid_hat_family():
    # beta = alpha + 1/2, gamma = 2 alpha stays admissible for alpha > d/2
    for alpha in (1.7, 2.3, 4.0):
        theta = hk.HyperParams(1.0, alpha, alpha + 0.5, 2 * alpha, 3, 0)
        ker = fam.gauss_hypergeometric(theta)
        vals = ker(GRID)
        assert vals[0] == 1.0
        assert np.all(vals >= -1e-15)
        assert np.all(np.diff(vals) <= 1e-12)


# ----------------------------------------------------------------------
# raw series wrapper


def test_hypergeometric_wrapper_hole_set():
    theta = hk.HyperParams(1.0, 3.5, 7.0, 5.0, 2, 1)
    ker = fam.hypergeometric(theta)
    h = np.linspace(0.0, 0.999, 120)
    assert np.max(np.abs(ker(h) - hk.evaluate_many(theta, h))) == 0.0
    assert ker.support == 1.0
    assert ker(1.0) == 0.0


def test_hypergeometric_wrapper_rejects_invalid():
    with pytest.raises(InvalidParameterError):
        fam.hypergeometric(hk.HyperParams(1.0, 1.2, 2.5, 4.0, 3, 1))


# ----------------------------------------------------------------------
# truncated power / polynomial


def test_truncated_power_is_triangular():
    ker = fam.truncated_polynomial(hk.HyperParams(1.0, 1.0, 1.5, 2.0, 1, 0))
    assert ker.params["M"] == 0 and ker.params["N"] == 0
    u = np.linspace(0.0, 1.5, 301)
    assert np.max(np.abs(ker(u) - triangular_exact(u))) < 1e-14


def test_truncated_polynomial_matches_series_route():
    # d = 2, k = 1, alpha = 5/2, offsets M = 2, N = 3
    theta = hk.HyperParams(1.0, 2.5, 5.5, 6.0, 2, 1)
    ker = fam.truncated_polynomial(theta)
    assert {ker.params["M"], ker.params["N"]} == {2, 3}
    h = np.linspace(0.0, 0.999, 150)
    assert np.max(np.abs(ker(h) - hk.evaluate_many(theta, h))) < 1e-12


def test_truncated_polynomial_accepts_swapped_order():
    theta = hk.HyperParams(1.0, 2.5, 6.0, 5.5, 2, 1)
    ker = fam.truncated_polynomial(theta)
    h = np.linspace(0.0, 0.999, 80)
    assert np.max(np.abs(ker(h) - hk.evaluate_many(theta, h))) < 1e-12


def test_truncated_polynomial_rejects_non_integer_offsets():
    # no integer offsets in either parameter order
    with pytest.raises(InvalidParameterError):
        fam.truncated_polynomial(hk.HyperParams(1.0, 2.3, 3.2, 5.0, 3, 0))


def test_spherical_is_a_truncated_polynomial():
    # offsets are integral only in the swapped order: M = 1, N = 0
    ker = fam.truncated_polynomial(hk.HyperParams(1.0, 2.0, 2.5, 4.0, 3, 0))
    assert {ker.params["M"], ker.params["N"]} == {1, 0}
    u = np.linspace(0.0, 1.0, 201)
    assert np.max(np.abs(ker(u) - spherical_exact(u))) < 1e-14


def test_truncated_polynomial_endpoint_values():
    theta = hk.HyperParams(1.0, 2.5, 5.5, 6.0, 2, 1)
    ker = fam.truncated_polynomial(theta)
    assert ker(0.0) == 1.0
    assert abs(ker(0.9999999) - 0.0) < 1e-5
    assert ker(1.0) == 0.0


# ----------------------------------------------------------------------
# generalized Wendland


def test_wendland_nu_min_branches():
    assert fam.wendland_nu_min(1.0, 3) == 3.0
    assert fam.wendland_nu_min(0.0, 2) == 1.5
    # d = 1 with negative exponent uses the quadratic root
    v = fam.wendland_nu_min(-0.25, 1)
    assert v == pytest.approx((math.sqrt(7.0) - 1.0) / 2.0, rel=1e-15)
    # at xi = 0 the two branches meet
    assert fam.wendland_nu_min(0.0, 1) == pytest.approx(1.0, abs=1e-15)


def test_wendland_params_reject_below_minimum():
    with pytest.raises(InvalidParameterError):
        fam.WendlandParams(1.0, 1.0, 2.9, 3)
    with pytest.raises(InvalidParameterError):
        fam.WendlandParams(1.0, -0.6, 4.0, 3)
    # hole version tightens the bound through d + 2k
    with pytest.raises(InvalidParameterError):
        fam.WendlandParams(1.0, 1.0, 3.5, 3, k=1)


def test_wendland_theta_map_is_admissible():
    for (xi, d, k) in [(0.5, 3, 0), (1.0, 2, 1), (2.0, 1, 2), (-0.25, 1, 0)]:
        nu = fam.wendland_nu_min(xi, d + 2 * k) + 0.3
        w = fam.WendlandParams(1.0, xi, nu, d, k)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            report = hk.validate(w.theta)
        assert report.conditions["A.1"]
        assert report.conditions["A.2"]
        assert report.conditions["A.3"]


def test_wendland_askey_case():
    # xi = 0 collapses to the truncated power (1-u)^nu
    w = fam.WendlandParams(1.0, 0.0, 4.0, 3)
    ker = fam.generalized_wendland(w)
    u = np.linspace(0.0, 1.2, 200)
    assert np.max(np.abs(ker(u) - np.maximum(1 - u, 0.0) ** 4)) < 1e-13
    assert ker(0.75) == pytest.approx(0.00390625, abs=1e-15)


def test_wendland_matches_series_route():
    w = fam.WendlandParams(1.0, 1.0, 4.5, 3)
    ker = fam.generalized_wendland(w)
    h = np.linspace(0.0, 0.999, 150)
    assert np.max(np.abs(ker(h) - hk.evaluate_many(w.theta, h))) < 1e-12


def test_wendland_continuation_case_regular():
    # xi = 1/2 puts the series route on a pole; closed form sails through
    w = fam.WendlandParams(1.0, 0.5, 3.0, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ker = fam.generalized_wendland(w)
    frozen = {0.3: 0.47736378733434698, 0.7: 0.033112730681333014}
    for h, v in frozen.items():
        assert ker(h) == pytest.approx(v, rel=1e-13)


def test_hole_wendland_continuation_frozen_values():
    w = fam.WendlandParams(1.0, 0.5, 3.5, 2, k=1)
    ker = fam.hole_wendland(w)
    frozen = {
        0.2: 0.40141769546660509,
        0.5: -0.10534009836803377,
        0.8: -0.02707189913972769,
        0.95: -0.00061499672958659466,
    }
    for h, v in frozen.items():
        assert ker(h) == pytest.approx(v, rel=1e-12)


def test_hole_wendland_equals_series_route():
    w = fam.WendlandParams(1.0, 1.0, 4.0, 2, k=1)
    ker = fam.hole_wendland(w)
    h = np.linspace(0.0, 0.999, 120)
    assert np.max(np.abs(ker(h) - hk.evaluate_many(w.theta, h))) == 0.0
    assert np.min(ker(h)) < 0.0


def test_generalized_wendland_rejects_hole_k():
    with pytest.raises(InvalidParameterError):
        fam.generalized_wendland(fam.WendlandParams(1.0, 1.0, 5.0, 2, k=1))


# ----------------------------------------------------------------------
# Matern


def test_matern_half_integer_reductions():
    m12 = fam.matern(1.0, 0.5)
    m32 = fam.matern(1.0, 1.5)
    m52 = fam.matern(1.0, 2.5)
    x = np.linspace(1e-6, 8.0, 200)
    assert np.max(np.abs(m12(x) - np.exp(-x))) < 1e-14
    assert np.max(np.abs(m32(x) - (1 + x) * np.exp(-x))) < 1e-13
    assert np.max(np.abs(m52(x) - (1 + x + x ** 2 / 3) * np.exp(-x))) < 1e-13
    assert m12(1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert m32(0.5) == pytest.approx(0.9097959895689501, rel=1e-13)


def test_matern_large_order_small_lag():
    ker = fam.matern(1.0, 120.0)
    v = ker(np.array([1e-8, 1e-3, 0.1, 1.0]))
    assert np.all(np.isfinite(v))
    assert np.all(np.diff(v) < 0.0)
    assert v[0] == pytest.approx(1.0, abs=1e-10)


def test_matern_rejects_bad_parameters():
    with pytest.raises(InvalidParameterError):
        fam.matern(0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        fam.matern(1.0, -0.5)


def test_hole_matern_reduces_to_matern_at_k0():
    base = fam.matern(1.0, 1.5)
    hole = fam.hole_matern(1.0, 1.5, 3, 0)
    x = np.linspace(1e-4, 10.0, 200)
    assert np.max(np.abs(base(x) - hole(x))) == 0.0


def test_hole_matern_frozen_values():
    frozen = [
        (1.0, 1.5, 2, 2, 0.3, 0.89889030851967942),
        (1.0, 1.5, 2, 2, 1.0, 0.41386437131787261),
        (1.0, 1.5, 2, 2, 2.5, -0.065411483278419352),
        (1.0, 1.5, 2, 2, 6.0, -0.0049575043533327168),
        (2.0, 0.75, 3, 1, 0.5, 0.84018320568076083),
        (2.0, 0.75, 3, 1, 2.0, 0.36119745085640126),
        (2.0, 0.75, 3, 1, 5.0, 0.03107003032036688),
        (1.0, 2.0, 1, 3, 0.4, 0.76672645582562903),
        (1.0, 2.0, 1, 3, 1.2, -0.081444198241167583),
        (1.0, 2.0, 1, 3, 3.5, -0.1512116222687774),
    ]
    for a, nu, d, k, h, want in frozen:
        got = fam.hole_matern(a, nu, d, k)(h)
        assert got == pytest.approx(want, rel=1e-12), (a, nu, d, k, h)


def test_hole_matern_integer_order_works():
    # integer nu trips the reflection-formula route of other
    # representations, the Bessel sum is indifferent to it
    ker = fam.hole_matern(1.0, 2.0, 1, 3)
    assert math.isfinite(ker(0.7))


def test_hole_matern_agrees_with_series_representation():
    for (a, nu, d, k) in [(1.0, 1.5, 2, 2), (2.0, 0.75, 3, 1),
                          (1.0, 0.4, 1, 1), (1.5, 2.3, 4, 2)]:
        ker = fam.hole_matern(a, nu, d, k)
        for h in (0.2 * a, 0.9 * a, 2.0 * a):
            alt = fam._hole_matern_f12(a, nu, d, k, h)
            assert ker(h) == pytest.approx(alt, rel=1e-8, abs=1e-12)


def test_hole_matern_sign_changes():
    for k in (1, 2, 3):
        ker = fam.hole_matern(1.0, 1.5, 2, k)
        v = ker(np.linspace(1e-3, 25.0, 4000))
        signs = np.sign(v[np.abs(v) > 1e-13])
        changes = int(np.count_nonzero(np.diff(signs) != 0))
        assert changes >= k, (k, changes)


def test_hole_matern_large_k_warns():
    with pytest.warns(ConditioningWarning):
        fam.hole_matern(1.0, 1.5, 2, 13)


# ----------------------------------------------------------------------
# Schoenberg


def test_schoenberg_matches_0f1():
    for d in (1, 2, 3, 7):
        ker = fam.schoenberg(1.0, d)
        for h in (0.3, 1.7, 4.0, 11.0):
            want = sf.pfq(sf.PFQParams((), (d / 2.0,)), -h * h / 4.0)
            assert ker(h) == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_schoenberg_d1_is_cosine():
    ker = fam.schoenberg(2.0, 1)
    h = np.linspace(0.0, 30.0, 500)
    assert np.max(np.abs(ker(h) - np.cos(h / 2.0))) < 1e-12
    assert ker(2.0 * math.pi) == pytest.approx(-1.0, rel=1e-12)


def test_schoenberg_d3_is_sinc():
    ker = fam.schoenberg(1.0, 3)
    h = np.linspace(1e-6, 40.0, 500)
    assert np.max(np.abs(ker(h) - np.sin(h) / h)) < 1e-12
    assert abs(ker(math.pi)) < 1e-15


def test_schoenberg_large_dimension_underflow_guard():
    ker = fam.schoenberg(1.0, 1200)
    v = ker(np.array([1e-4, 0.05, 0.5]))
    assert np.all(np.isfinite(v))
    assert v[0] == pytest.approx(1.0, abs=1e-8)
    # two-term expansion is exact to double precision in this regime
    assert v[1] == pytest.approx(1.0 - 0.05 ** 2 / 2400.0, rel=1e-13)


def test_schoenberg_lower_bound():
    # the d-dimensional lower bound is attained up to Bessel decay
    for d in (2, 3, 5):
        ker = fam.schoenberg(1.0, d)
        v = ker(np.linspace(0.0, 60.0, 5000))
        assert np.min(v) > -1.0 / d - 1e-9


# ----------------------------------------------------------------------
# Gaussian and hole Gaussian


def test_gaussian_kernel():
    ker = fam.gaussian(2.0)
    h = np.linspace(0.0, 10.0, 100)
    assert np.max(np.abs(ker(h) - np.exp(-(h / 2.0) ** 2))) == 0.0


def test_hole_gaussian_k0_scale_convention():
    ker = fam.hole_gaussian(1.0, 3, 0)
    h = np.linspace(0.0, 6.0, 100)
    assert np.max(np.abs(ker(h) - np.exp(-h * h / 4.0))) == 0.0


def test_hole_gaussian_closed_form_k1():
    # d/2 = 1.5: prefactor 1/(d/2), kernel exp(-z)(1 + d/2 - z)/(d/2)
    ker = fam.hole_gaussian(1.0, 3, 1)
    h = np.linspace(0.0, 8.0, 160)
    z = h * h / 4.0
    want = np.exp(-z) * (1.5 - z) / 1.5
    assert np.max(np.abs(ker(h) - want)) < 1e-14


def test_hole_gaussian_sign_changes():
    for k in (1, 2, 3):
        ker = fam.hole_gaussian(1.0, 2, k)
        v = ker(np.linspace(1e-3, 12.0, 3000))
        signs = np.sign(v[np.abs(v) > 1e-13])
        changes = int(np.count_nonzero(np.diff(signs) != 0))
        assert changes == k, (k, changes)


def test_hole_gaussian_unit_at_origin():
    for (d, k) in [(1, 0), (2, 1), (3, 2), (5, 4)]:
        assert fam.hole_gaussian(1.0, d, k)(0.0) == 1.0


# ----------------------------------------------------------------------
# incomplete gamma


def test_incomplete_gamma_exponential_cases():
    # alpha = d/2 + 1 collapses the survival sum to exp(-(h/a)^2)
    ker = fam.incomplete_gamma_kernel(1.0, 2.5, 3, 0)
    assert ker(1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    # one step up appends the degree-1 Poisson partial sum
    ker2 = fam.incomplete_gamma_kernel(1.0, 3.5, 3, 0)
    assert ker2(1.0) == pytest.approx(2.0 * math.exp(-1.0), rel=1e-14)


def test_incomplete_gamma_erfc_case():
    ker = fam.incomplete_gamma_kernel(1.0, 2.0, 3, 0)
    for h in (0.3, 1.0, 2.5):
        assert ker(h) == pytest.approx(math.erfc(h), rel=1e-13)


def test_incomplete_gamma_hole_limits():
    ker = fam.incomplete_gamma_kernel(1.0, 6.0, 2, 2)
    assert ker(0.0) == 1.0
    assert abs(ker(50.0)) < 1e-15
    v = ker(np.linspace(1e-3, 6.0, 2000))
    signs = np.sign(v[np.abs(v) > 1e-12])
    assert int(np.count_nonzero(np.diff(signs) != 0)) >= 2


def test_incomplete_gamma_rejects_nonpositive_smoothness():
    with pytest.raises(InvalidParameterError):
        fam.incomplete_gamma_kernel(1.0, 2.5, 3, 1)


# ----------------------------------------------------------------------
# shared invariants


ALL_SAMPLE_KERNELS = [
    fam.gauss_hypergeometric(hk.HyperParams(1.0, 2.0, 2.5, 4.0, 3, 0)),
    fam.hypergeometric(hk.HyperParams(1.0, 3.5, 7.0, 5.0, 2, 1)),
    fam.truncated_polynomial(hk.HyperParams(1.0, 2.5, 5.5, 6.0, 2, 1)),
    fam.generalized_wendland(fam.WendlandParams(1.0, 1.0, 4.5, 3)),
    fam.hole_wendland(fam.WendlandParams(1.0, 1.0, 4.0, 2, k=1)),
    fam.matern(1.0, 1.7),
    fam.hole_matern(1.0, 1.5, 2, 2),
    fam.schoenberg(1.0, 3),
    fam.gaussian(1.0),
    fam.hole_gaussian(1.0, 3, 2),
    fam.incomplete_gamma_kernel(1.0, 4.0, 3, 1),
]


@pytest.mark.parametrize("ker", ALL_SAMPLE_KERNELS,
                         ids=[k.family for k in ALL_SAMPLE_KERNELS])
def test_kernel_bounded_and_normalized(ker):
    h = np.linspace(0.0, 4.0, 400)
    v = ker(h)
    assert v[0] == 1.0
    assert np.max(np.abs(v)) <= 1.0 + 1e-12


@given(h=st.floats(min_value=0.0, max_value=20.0))
@settings(max_examples=60, deadline=None)
def test_matern_between_zero_and_one(h):
    # log-space assembly can overshoot 1 by a few ulp at denormal lags
    v = fam.matern(2.0, 1.3)(h)
    assert 0.0 <= v <= 1.0 + 1e-12


@given(u=st.floats(min_value=0.0, max_value=0.9999))
@settings(max_examples=60, deadline=None)
def test_spherical_row_pointwise(u):
    ker = fam.gauss_hypergeometric(hk.HyperParams(1.0, 2.0, 2.5, 4.0, 3, 0))
    assert ker(u) == pytest.approx(float(spherical_exact(np.array([u]))[0]),
                                   abs=1e-12)
