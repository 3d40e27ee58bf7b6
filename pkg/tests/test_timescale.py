"""Tests for the Lambert-W time rescalings.

Oracles used here:
  * W itself: the defining identity W(x e^x) = x and scipy.special.lambertw.
  * f_sub / f_super: the explicit inverse map t(f) = f + c*(exp(f/(a*g)) - 1)
    with c = xi (sub) or eta (super), checked pointwise.
  * theta_shift: the explicit inverse t(theta) = theta - lam*exp((theta-lam)/gamma).
"""

import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from hele_homog import (
    SubScaling,
    SuperScaling,
    ThetaShift,
    ValidationError,
    f_sub,
    f_sub_deriv,
    f_super,
    f_super_deriv,
    lambert_w0,
    theta_shift,
    theta_shift_deriv,
)

T_MAX_FROZEN = 1.2 * (math.log(6.0) - 1.0) + 0.2  # SuperScaling(1, 1.2, 0.2)


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

class TestLambertW:
    def test_defining_identity(self):
        xs = np.linspace(-1.0, 10.0, 201)
        w = lambert_w0(xs * np.exp(xs))
        assert np.max(np.abs(w - xs)) <= 1e-9

    def test_against_scipy(self):
        zs = np.concatenate([
            np.linspace(-1 / math.e + 1e-12, 0.0, 60),
            np.linspace(0.0, 50.0, 60),
            [1e3, 1e6],
        ])
        ours = lambert_w0(zs)
        ref = scipy.special.lambertw(zs, 0).real
        assert np.max(np.abs(ours - ref)) <= 1e-11 * (1 + np.max(np.abs(ref)))

    def test_special_points(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)
        assert lambert_w0(-1 / math.e) == pytest.approx(-1.0, abs=1e-7)

    def test_scalar_in_scalar_out(self):
        out = lambert_w0(1.0)
        assert isinstance(out, float)

    def test_below_branch_point_rejected(self):
        with pytest.raises(ValidationError):
            lambert_w0(-1 / math.e - 1e-6)

    @settings(max_examples=80, deadline=None)
    @given(x=st.floats(min_value=-1.0, max_value=20.0, allow_nan=False))
    def test_identity_property(self, x):
        assert lambert_w0(x * math.exp(x)) == pytest.approx(x, abs=1e-9)


# ---------------------------------------------------------------------------
# Slow rescaling (sub side)
# ---------------------------------------------------------------------------

def _sub_inverse(f, s):
    ag = s.alpha * s.gamma
    return f + s.xi * (math.exp(f / ag) - 1.0)


class TestSubScaling:
    def test_xi(self):
        s = SubScaling(alpha=0.5, gamma=1.0, lam=0.25)
        assert s.xi == pytest.approx(1.0 + 0.25 - 0.5)

    def test_starts_at_zero(self):
        s = SubScaling(alpha=0.5, gamma=1.0, lam=0.0)
        assert f_sub(0.0, s) == pytest.approx(0.0, abs=1e-12)

    def test_initial_slope(self):
        s = SubScaling(alpha=0.5, gamma=2.0, lam=0.5)
        expect = s.alpha * s.gamma / (s.gamma + s.lam)
        assert f_sub_deriv(0.0, s) == pytest.approx(expect, abs=1e-12)

    def test_inverse_map_oracle(self):
        s = SubScaling(alpha=0.7, gamma=1.3, lam=0.2)
        for t in np.linspace(0.0, 8.0, 33):
            f = f_sub(t, s)
            assert _sub_inverse(f, s) == pytest.approx(t, abs=1e-9)

    def test_derivative_matches_inverse_slope(self):
        # dt/df = 1 + (xi/ag) exp(f/ag), so f'(t) is its reciprocal.
        s = SubScaling(alpha=0.7, gamma=1.3, lam=0.2)
        ag = s.alpha * s.gamma
        for t in np.linspace(0.0, 8.0, 17):
            f = f_sub(t, s)
            slope = 1.0 / (1.0 + (s.xi / ag) * math.exp(f / ag))
            assert f_sub_deriv(t, s) == pytest.approx(slope, abs=1e-10)

    def test_derivative_finite_difference(self):
        s = SubScaling(alpha=0.4, gamma=1.0, lam=0.0)
        h = 1e-6
        for t in [0.5, 2.0, 5.0]:
            fd = (f_sub(t + h, s) - f_sub(t - h, s)) / (2 * h)
            assert f_sub_deriv(t, s) == pytest.approx(fd, rel=1e-6)

    def test_slowdown(self):
        s = SubScaling(alpha=0.5, gamma=1.0)
        ts = np.linspace(0.0, 10.0, 50)
        vals = f_sub(ts, s)
        assert np.all(vals <= ts + 1e-12)
        assert np.all(f_sub_deriv(ts, s) <= 1.0 + 1e-12)
        assert np.all(np.diff(vals) > 0)

    def test_identity_branch(self):
        # xi <= 0 when alpha >= 1 + lam/gamma.
        s = SubScaling(alpha=1.5, gamma=1.0, lam=0.25)
        assert s.xi <= 0
        ts = np.linspace(0.0, 4.0, 9)
        assert np.allclose(f_sub(ts, s), ts)
        assert np.allclose(f_sub_deriv(ts, s), 1.0)

    def test_negative_time_rejected(self):
        s = SubScaling(alpha=0.5, gamma=1.0)
        with pytest.raises(ValidationError):
            f_sub(-0.1, s)

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            SubScaling(alpha=0.0, gamma=1.0)
        with pytest.raises(ValidationError):
            SubScaling(alpha=1.0, gamma=-1.0)
        with pytest.raises(ValidationError):
            SubScaling(alpha=1.0, gamma=1.0, lam=-0.1)

    @settings(max_examples=50, deadline=None)
    @given(
        alpha=st.floats(min_value=0.1, max_value=0.95),
        gamma=st.floats(min_value=0.2, max_value=3.0),
        lam=st.floats(min_value=0.0, max_value=1.0),
        t=st.floats(min_value=0.0, max_value=10.0),
    )
    def test_inverse_property(self, alpha, gamma, lam, t):
        s = SubScaling(alpha=alpha, gamma=gamma, lam=lam)
        f = f_sub(t, s)
        assert _sub_inverse(f, s) == pytest.approx(t, abs=1e-8 * (1 + t))


# ---------------------------------------------------------------------------
# Fast rescaling (super side)
# ---------------------------------------------------------------------------

def _super_inverse(f, s):
    ag = s.alpha * s.gamma
    return f + s.eta * (math.exp(f / ag) - 1.0)


class TestSuperScaling:
    def test_eta_and_t_max_frozen(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        assert s.eta == pytest.approx(-0.2)
        assert s.t_max == pytest.approx(T_MAX_FROZEN, abs=1e-12)
        assert s.t_max == pytest.approx(1.1501113630736661, abs=1e-12)

    def test_t_max_is_inverse_maximum(self):
        # t(f) = f + eta*(exp(f/ag) - 1) attains its max where t'(f) = 0,
        # i.e. f* = ag*log(-ag/eta); t(f*) must equal t_max.
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        ag = s.alpha * s.gamma
        f_star = ag * math.log(ag / -s.eta)
        assert _super_inverse(f_star, s) == pytest.approx(s.t_max, abs=1e-12)
        # and it is a maximum: slightly off f* gives smaller t.
        assert _super_inverse(f_star - 1e-3, s) < s.t_max
        assert _super_inverse(f_star + 1e-3, s) < s.t_max

    def test_starts_at_zero(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        assert f_super(0.0, s) == pytest.approx(0.0, abs=1e-12)

    def test_initial_slope(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        expect = s.alpha * s.gamma / (s.gamma - s.lam)
        assert f_super_deriv(0.0, s) == pytest.approx(expect, abs=1e-12)

    def test_inverse_map_oracle(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        for t in np.linspace(0.0, s.t_max * 0.999, 40):
            f = f_super(t, s)
            assert _super_inverse(f, s) == pytest.approx(t, abs=1e-9)

    def test_speedup(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        ts = np.linspace(0.01, s.t_max * 0.99, 30)
        vals = f_super(ts, s)
        assert np.all(vals >= ts)
        assert np.all(f_super_deriv(ts, s) >= 1.0)

    def test_blowup_rejected(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        with pytest.raises(ValidationError, match="blown up"):
            f_super(s.t_max, s)
        with pytest.raises(ValidationError, match="blown up"):
            f_super(s.t_max + 1.0, s)
        with pytest.raises(ValidationError):
            f_super_deriv(s.t_max, s)

    def test_value_diverges_near_t_max(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        ag = s.alpha * s.gamma
        f_star = ag * math.log(ag / -s.eta)
        assert f_super(s.t_max * (1 - 1e-9), s) > 0.99 * f_star

    def test_identity_branch(self):
        # eta >= 0 when alpha <= 1 - lam/gamma.
        s = SuperScaling(alpha=0.5, gamma=1.0, lam=0.25)
        assert s.eta >= 0
        assert s.t_max == math.inf
        ts = np.linspace(0.0, 4.0, 9)
        assert np.allclose(f_super(ts, s), ts)

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            SuperScaling(alpha=1.0, gamma=1.0, lam=1.0)  # gamma > lam fails
        with pytest.raises(ValidationError):
            SuperScaling(alpha=1.0, gamma=1.0, lam=-0.1)

    def test_derivative_finite_difference(self):
        s = SuperScaling(alpha=1.0, gamma=1.2, lam=0.2)
        h = 1e-7
        for t in [0.1, 0.5, 0.9]:
            fd = (f_super(t + h, s) - f_super(t - h, s)) / (2 * h)
            assert f_super_deriv(t, s) == pytest.approx(fd, rel=1e-5)


# ---------------------------------------------------------------------------
# Theta shift
# ---------------------------------------------------------------------------

def _theta_inverse(theta, sh):
    return theta - sh.lam * math.exp((theta - sh.lam) / sh.gamma)


class TestThetaShift:
    def test_starts_at_lam(self):
        sh = ThetaShift(gamma=1.0, lam=0.3)
        assert theta_shift(0.0, sh) == pytest.approx(0.3, abs=1e-12)

    def test_zero_lam_identity(self):
        sh = ThetaShift(gamma=1.0, lam=0.0)
        ts = np.linspace(0.0, 5.0, 11)
        assert np.allclose(theta_shift(ts, sh), ts)
        assert sh.t_lambda == math.inf

    def test_endpoint(self):
        sh = ThetaShift(gamma=1.0, lam=0.3)
        tl = sh.t_lambda
        assert tl == pytest.approx(math.log(1 / 0.3) + 0.3 - 1.0, abs=1e-12)
        assert theta_shift(tl, sh) == pytest.approx(tl + sh.gamma, abs=1e-7)

    def test_inverse_map_oracle(self):
        sh = ThetaShift(gamma=1.4, lam=0.5)
        for t in np.linspace(0.0, sh.t_lambda * 0.999, 30):
            th = theta_shift(t, sh)
            assert _theta_inverse(th, sh) == pytest.approx(t, abs=1e-9)

    def test_monotone_and_deriv_at_least_one(self):
        sh = ThetaShift(gamma=1.0, lam=0.3)
        ts = np.linspace(0.0, sh.t_lambda * 0.99, 40)
        th = theta_shift(ts, sh)
        assert np.all(np.diff(th) > 0)
        assert np.all(theta_shift_deriv(ts, sh) >= 1.0)

    def test_inverse_slope_in_unit_interval(self):
        # dt/dtheta = 1 - (lam/gamma) exp((theta-lam)/gamma) lies in (0, 1].
        sh = ThetaShift(gamma=1.0, lam=0.3)
        ts = np.linspace(0.0, sh.t_lambda * 0.99, 40)
        th = theta_shift(ts, sh)
        inv_slopes = 1.0 - (sh.lam / sh.gamma) * np.exp((th - sh.lam) / sh.gamma)
        assert np.all(inv_slopes > 0)
        assert np.all(inv_slopes <= 1.0)
        assert np.allclose(theta_shift_deriv(ts, sh) * inv_slopes, 1.0, atol=1e-10)

    def test_beyond_endpoint_rejected(self):
        sh = ThetaShift(gamma=1.0, lam=0.3)
        with pytest.raises(ValidationError):
            theta_shift(sh.t_lambda + 1.0, sh)

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            ThetaShift(gamma=1.0, lam=1.5)  # lam > gamma
        with pytest.raises(ValidationError):
            ThetaShift(gamma=0.0, lam=0.0)

    def test_derivative_finite_difference(self):
        sh = ThetaShift(gamma=1.0, lam=0.3)
        h = 1e-7
        for t in [0.05, 0.2, sh.t_lambda * 0.5]:
            fd = (theta_shift(t + h, sh) - theta_shift(t - h, sh)) / (2 * h)
            assert theta_shift_deriv(t, sh) == pytest.approx(fd, rel=1e-5)
