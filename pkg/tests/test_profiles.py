import numpy as np
import pytest

from shearlab import profiles as P


def fd_derivative(fun, y, h):
    return (fun(y + h) - fun(y - h)) / (2.0 * h)


class TestGevrey:
    def test_printed_values_rho2(self, gevrey):
        assert gevrey(1.0) == pytest.approx(np.exp(-1.0), abs=1e-15)
        assert gevrey.derivative(1.0, 1) == pytest.approx(np.exp(-1.0),
                                                          abs=1e-15)
        # unique inflection at rho^(1-rho) = 1/2
        assert gevrey.derivative(0.5, 2) == pytest.approx(0.0, abs=1e-14)
        assert gevrey.params["y0"] == 0.5

    def test_third_derivative_at_inflection(self, gevrey):
        # closed form -rho^(3 rho - 1)/(e^rho (rho-1)^3) = -32/e^2,
        # confirmed against a finite-difference pass through U itself
        expected = -32.0 / np.e**2
        got = gevrey.derivative(0.5, 3)
        assert got == pytest.approx(expected, rel=1e-12)
        from shearlab.numerics import richardson_derivative
        fd = richardson_derivative(gevrey, np.asarray(0.5), 4e-3, order=3)
        assert fd == pytest.approx(expected, rel=1e-6)

    def test_wall_and_far_field(self, gevrey):
        assert gevrey(0.0) == 0.0
        for k in range(1, 4):
            assert gevrey.derivative(0.0, k) == 0.0
        # order 4 falls back to differencing the flat third derivative
        assert abs(gevrey.derivative(0.0, 4)) < 1e-50
        gap = abs(gevrey(gevrey.far_field_probe) - gevrey.u_infinity)
        assert gap < 1e-8

    def test_monotone(self, gevrey):
        ys = np.linspace(0.05, 30.0, 200)
        assert (gevrey.derivative(ys, 1) > 0).all()

    @pytest.mark.parametrize("rho", [1.5, 2.0, 3.0])
    def test_assumptions_above_half(self, rho):
        g = P.make_gevrey_profile(rho)
        rep = P.check_assumptions(g, P.AssumptionRegime.GAMMA_ABOVE_HALF,
                                  k_max=4)
        assert rep.passed

    def test_assumptions_below_half_fails_order0(self, gevrey):
        rep = P.check_assumptions(gevrey,
                                  P.AssumptionRegime.GAMMA_BELOW_HALF,
                                  k_max=4)
        assert not rep.passed
        assert rep.l1_integrable[0] is False
        assert all(rep.l1_integrable[k] for k in range(1, 5))

    def test_invalid_rho(self):
        with pytest.raises(ValueError):
            P.make_gevrey_profile(1.0)


class TestDerivativeConsistency:
    @pytest.mark.parametrize("name", ["gevrey", "two_inflection"])
    def test_fd_agreement(self, name, gevrey, two_inflection):
        from shearlab.numerics import richardson_derivative
        u = gevrey if name == "gevrey" else two_inflection
        ys = np.linspace(0.1, 10.0, 50)
        for k in (1, 2, 3):
            low = (lambda y: u(y)) if k == 1 \
                else (lambda y, kk=k: u.derivative(y, kk - 1))
            h = 1e-4 * np.maximum(ys, 1.0)
            fd = richardson_derivative(low, ys, h, order=1)
            an = u.derivative(ys, k)
            scale = np.maximum(np.abs(an), 1e-10)
            assert np.max(np.abs(fd - an) / scale) < 1e-6

    def test_order_zero_and_unsupported(self, gevrey):
        assert P.derivative(gevrey, 0, 1.0) == gevrey(1.0)
        with pytest.raises(P.UnsupportedOrderError):
            gevrey.derivative(1.0, gevrey.d_max + 1)


class TestTwoInflection:
    def test_sign_scan_exactly_two_changes(self, two_inflection):
        ys = np.linspace(0.02, 40.0, 6000)
        u2 = two_inflection.derivative(ys, 2)
        signs = np.sign(u2)
        signs = signs[np.abs(u2) > 1e-30]
        changes = int(np.sum(np.diff(signs) != 0))
        assert changes == 2

    def test_boundary_values(self, two_inflection):
        assert two_inflection(0.0) == 0.0
        assert abs(two_inflection(P.Y_MAX)) < 1e-8

    def test_equal_inflection_values(self, two_inflection):
        info = P.inflection_data(two_inflection)
        assert len(info.inflection_points) == 2
        vals = [two_inflection(p) for p in info.inflection_points]
        assert abs(vals[0] - vals[1]) < 1e-6
        assert info.inflection_value == pytest.approx(vals[0], abs=1e-9)

    def test_inflections_at_requested_positions(self, two_inflection):
        info = P.inflection_data(two_inflection)
        assert info.inflection_points[0] == pytest.approx(1.0, abs=1e-7)
        assert info.inflection_points[1] == pytest.approx(3.0, abs=1e-7)

    def test_positive_between_wall_and_tail(self, two_inflection):
        # positivity is resolvable down to the construction's quadrature
        # noise (~1e-13 of the peak): the flat wall region and the
        # Gaussian-sharpened far tail sink below that scale
        ys = np.linspace(0.05, 5.5, 400)
        assert (two_inflection(ys) > 0).all()
        near = np.linspace(1e-3, 0.05, 50)
        assert np.max(np.abs(two_inflection(near))) < 1e-8
        far = np.linspace(6.0, 40.0, 100)
        assert np.max(np.abs(two_inflection(far))) < 1e-12

    def test_sign_conditions(self, two_inflection):
        u = two_inflection
        inner = np.linspace(0.05, 0.98, 60)
        assert (u.derivative(inner, 1) > 0).all()
        assert (u.derivative(inner, 2) > 0).all()
        mid = np.linspace(1.02, 2.98, 60)
        assert (u.derivative(mid, 2) < 0).all()
        d1 = u.derivative(mid, 1)
        assert d1[0] > 0 > d1[-1]
        outer = np.linspace(3.02, 7.0, 60)
        assert (u.derivative(outer, 1) < 0).all()
        assert (u.derivative(outer, 2) > 0).all()

    def test_below_half_assumptions(self, two_inflection):
        rep = P.check_assumptions(two_inflection,
                                  P.AssumptionRegime.GAMMA_BELOW_HALF,
                                  k_max=4)
        assert rep.passed

    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            P.make_two_inflection_profile(3.0, 1.0)


class TestInflectionData:
    def test_gevrey_classification(self, gevrey):
        info = P.inflection_data(gevrey)
        assert info.inflection_points == pytest.approx([0.5], abs=1e-9)
        assert info.inflection_value == pytest.approx(np.exp(-2.0),
                                                      rel=1e-10)
        assert info.kplus
        assert np.isfinite(info.k_sup)
        assert info.k_inf_interior > 0
        # l'Hopital limit at the inflection: -U'''/U' = 8 at rho = 2
        assert info.limits_at_inflections[0] == pytest.approx(8.0,
                                                              rel=1e-9)

    def test_linear_ramp_not_kplus(self):
        info = P.inflection_data(P.make_linear_ramp())
        assert not info.kplus
        assert info.inflection_points == []

    def test_scaling_invariance_of_k(self, gevrey):
        info = P.inflection_data(gevrey)
        k1 = P.k_evaluator(gevrey, info.inflection_points,
                           info.inflection_value)
        scaled = P.ShearProfile(
            "scaled", lambda y: 3.0 * gevrey(y),
            tuple(lambda y, f=f: 3.0 * f(y)
                  for f in gevrey.derivative_evaluators),
            u_infinity=3.0, far_field_probe=gevrey.far_field_probe)
        info_s = P.inflection_data(scaled)
        assert info_s.kplus
        k2 = P.k_evaluator(scaled, info_s.inflection_points,
                           info_s.inflection_value)
        ys = np.linspace(0.2, 10.0, 40)
        assert np.max(np.abs(k1(ys) - k2(ys))) < 1e-7

    def test_k_removable_singularity(self, gevrey):
        info = P.inflection_data(gevrey)
        kf = P.k_evaluator(gevrey, info.inflection_points,
                           info.inflection_value)
        # approaching the inflection point the ratio tends to the limit
        assert kf(0.5) == pytest.approx(8.0, rel=1e-9)
        assert kf(0.5 + 1e-7) == pytest.approx(8.0, rel=1e-4)
