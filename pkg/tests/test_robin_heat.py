import warnings

import numpy as np
import pytest
from scipy import linalg as sla
from scipy.special import erf, erfc

from shearlab import profiles as P
from shearlab import robin_heat as H


@pytest.fixture(scope="module")
def raw_exp():
    return P.make_exponential_profile(1.0)


class TestExtension:
    def test_even_and_odd_limits(self, gevrey):
        ys = np.array([-0.5, -2.0, -7.5])
        even = H.extension_value(gevrey, 0.0, ys)
        odd = H.extension_value(gevrey, H.INF, ys)
        assert even == pytest.approx(gevrey(-ys), abs=1e-15)
        assert odd == pytest.approx(-gevrey(-ys), abs=1e-15)

    @pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
    def test_raw_exponential_closed_form(self, raw_exp, a):
        ys = np.array([-0.3, -1.0, -2.5, -6.0])
        got = H.extension_value(raw_exp, a, ys)
        yy = -ys
        exact = np.exp(-yy) - (2 * a / (a - 1.0)) \
            * (np.exp(-yy) - np.exp(-a * yy))
        assert got == pytest.approx(exact, abs=1e-12)

    def test_three_formulas_agree(self, gevrey):
        ys = np.array([-0.25, -1.0, -3.0, -7.0, -15.0])
        vals = [H.extension_value(gevrey, 1.0, ys, formula=f)
                for f in ("direct", "parts", "flat")]
        assert np.max(np.abs(vals[0] - vals[1])) < 1e-9
        assert np.max(np.abs(vals[0] - vals[2])) < 1e-9

    def test_positive_side_untouched(self, gevrey):
        ys = np.array([0.0, 0.7, 4.0])
        assert H.extension_value(gevrey, 3.0, ys) \
            == pytest.approx(gevrey(ys), abs=1e-15)

    def test_oddness_invariant(self, gevrey):
        # d_y u0~ - a u0~ must be odd for every finite a
        for a in (0.3, 2.0):
            yp = np.linspace(0.05, 8.0, 100)
            g_pos = gevrey.derivative(yp, 1) - a * gevrey(yp)
            g_neg = H.extension_derivative(gevrey, a, 1, -yp) \
                - a * H.extension_value(gevrey, a, -yp)
            assert np.max(np.abs(g_pos + g_neg)) < 1e-8

    def test_extension_derivative_vs_fd(self, gevrey):
        a = 10.0
        got = H.extension_derivative(gevrey, a, 1, -1.0)
        h = 1e-5
        fd = (H.extension_value(gevrey, a, -1.0 + h)
              - H.extension_value(gevrey, a, -1.0 - h)) / (2 * h)
        assert got == pytest.approx(fd, rel=1e-5)

    def test_derivative_odd_even_patterns(self, gevrey):
        for k in (1, 2, 3):
            d_odd = H.extension_derivative(gevrey, H.INF, k, -2.0)
            d_even = H.extension_derivative(gevrey, 0.0, k, -2.0)
            base = gevrey.derivative(2.0, k)
            assert d_odd == pytest.approx((-1.0) ** (k + 1) * base,
                                          abs=1e-15)
            assert d_even == pytest.approx((-1.0) ** k * base, abs=1e-15)

    def test_monotone_in_a_for_monotone_data(self, gevrey):
        y = -1.5
        a_grid = [0.0, 0.1, 0.5, 1.0, 5.0, 50.0, H.INF]
        vals = [H.extension_value(gevrey, a, y) for a in a_grid]
        assert all(v0 >= v1 - 1e-12 for v0, v1 in zip(vals, vals[1:]))
        assert vals[0] == pytest.approx(gevrey(1.5), abs=1e-14)
        assert vals[-1] == pytest.approx(-gevrey(1.5), abs=1e-14)

    def test_flatness_gate(self, raw_exp):
        with pytest.raises(H.FlatnessError):
            H.extend(raw_exp, 1.0)
        ext = H.extend(raw_exp, 1.0, allow_nonflat=True)
        assert ext.coefficient == 1.0
        with pytest.raises(ValueError):
            H.extend(raw_exp, -1.0, allow_nonflat=True)


class TestSolveRobin:
    def test_zero_data(self):
        zero = P.make_constant_profile(0.0)
        fld = H.solve_robin(zero, 1.0, 0.5)
        assert np.max(np.abs(fld.values)) < 1e-13

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    @pytest.mark.parametrize("t", [0.5, 1.0])
    def test_erf_reference(self, alpha, t):
        stub = P.make_constant_profile(1.0)
        ys = np.array([0.0, 0.5, 1.0, 2.0])
        fld = H.solve_robin(stub, alpha, t, grid=ys, allow_nonflat=True)
        exact = erf(ys / (2 * np.sqrt(t))) \
            + np.exp(alpha * (alpha * t + ys)) \
            * erfc((2 * alpha * t + ys) / (2 * np.sqrt(t)))
        assert np.max(np.abs(fld.values - exact)) < 1e-6

    def test_bc_residual_robin(self, gevrey):
        fld = H.solve_robin(gevrey, 1.0, 0.1)
        assert H.bc_residual(fld) < 1e-6 * (1 + abs(fld.values[0]))

    def test_bc_residual_limits(self, gevrey):
        dirich = H.solve_robin(gevrey, H.INF, 0.5)
        assert H.bc_residual(dirich) < 1e-8
        neum = H.solve_robin(gevrey, 0.0, 0.5)
        assert H.bc_residual(neum) < 1e-8

    def test_bc_residual_needs_resolution(self, gevrey):
        fld = H.solve_robin(gevrey, 1.0, 0.5,
                            grid=np.linspace(0.0, 40.0, 41))
        with pytest.raises(H.InsufficientResolutionError):
            H.bc_residual(fld)

    def test_invalid_time(self, gevrey):
        with pytest.raises(ValueError):
            H.solve_robin(gevrey, 1.0, 0.0)

    def test_dirichlet_mass_decay(self, gevrey):
        norms = []
        for t in (0.25, 0.5, 1.0, 2.0):
            fld = H.solve_robin(gevrey, H.INF, t)
            norms.append(np.sqrt(np.trapezoid(fld.values ** 2, fld.grid)))
        assert all(a >= b for a, b in zip(norms, norms[1:]))

    def test_semigroup_and_reextension(self, gevrey):
        """The evolved field's half-line trace, re-extended by the same
        Robin rule, must reproduce the full-line field; one more step
        must agree with the direct solution at the summed time."""
        a, t1, t2 = 1.0, 0.4, 0.35
        grid = np.linspace(0.0, 30.0, 601)
        fld1 = H.solve_robin(gevrey, a, t1, grid)

        from scipy.interpolate import CubicSpline
        trace = CubicSpline(grid, fld1.values)
        trace_profile = P.ShearProfile(
            "evolved", lambda y: trace(np.clip(y, 0.0, 30.0)),
            (lambda y: trace(np.clip(y, 0.0, 30.0), 1),
             lambda y: trace(np.clip(y, 0.0, 30.0), 2),
             lambda y: trace(np.clip(y, 0.0, 30.0), 3)),
            u_infinity=float(fld1.values[-1]), flat_at_zero=False)

        # the re-extension reproduces the evolved field below the wall
        y_neg = np.linspace(-2.0, -0.1, 7)
        direct = H._convolve_halfline(gevrey.value, a, t1, y_neg)
        reext = H.extension_value(trace_profile, a, y_neg,
                                  formula="parts")
        assert np.max(np.abs(direct - reext)) < 1e-5

        # and one more step matches the direct two-step evolution
        sub = np.linspace(0.0, 8.0, 81)
        two_step = H.solve_robin(trace_profile, a, t2, sub,
                                 allow_nonflat=True)
        direct12 = H.solve_robin(gevrey, a, t1 + t2, sub)
        assert np.max(np.abs(two_step.values - direct12.values)) < 1e-5


class TestInhomogeneousDirichlet:
    def test_reduces_to_homogeneous(self, gevrey):
        fld = H.solve_inhomogeneous_dirichlet(gevrey, None, None, 0.5)
        ref = H.solve_robin(gevrey, H.INF, 0.5)
        assert np.max(np.abs(fld.values - ref.values)) < 1e-12

    def test_boundary_value_recovery(self):
        f = lambda s: s * s
        for t in (0.5, 1.0):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                val0 = H.dirichlet_boundary_field(f, t, 0.0)
                near = H.dirichlet_boundary_field(f, t, 1e-5)
            assert val0 == pytest.approx(t * t, abs=1e-14)
            assert near == pytest.approx(t * t, abs=1e-5)

    def test_compatibility_warning(self, gevrey):
        with pytest.warns(RuntimeWarning):
            H.solve_inhomogeneous_dirichlet(None, lambda s: 1.0 + s, None,
                                            0.2,
                                            grid=np.linspace(0, 4, 41))

    def test_source_against_crank_nicolson(self):
        """Independent time-stepping oracle for the source part."""
        r_fun = lambda s, x: np.exp(-s) * np.exp(-x)
        t_end = 0.5
        grid = np.linspace(0.0, 40.0, 401)
        fld = H.solve_inhomogeneous_dirichlet(None, None, r_fun, t_end,
                                              grid=grid, n_time_nodes=48)

        n, dt = 4000, 5e-4
        dy = 40.0 / n
        ycn = np.linspace(0.0, 40.0, n + 1)
        u = np.zeros(n + 1)
        lam = dt / (2 * dy * dy)
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = -lam
        ab[1, :] = 1 + 2 * lam
        ab[2, :-1] = -lam
        for m in range(int(round(t_end / dt))):
            s0, s1 = m * dt, (m + 1) * dt
            rhs = u[1:-1] + lam * (u[2:] - 2 * u[1:-1] + u[:-2]) \
                + 0.5 * dt * (r_fun(s0, ycn[1:-1]) + r_fun(s1, ycn[1:-1]))
            u[1:-1] = sla.solve_banded((1, 1), ab, rhs)
        oracle = np.interp(grid, ycn, u)
        assert np.max(np.abs(fld.values - oracle)) < 1e-4

    def test_neumann_boundary_field(self):
        # d_y u(t, 0) = g(t); check the flux with a one-sided stencil
        gfun = lambda s: np.sin(s)
        t = 0.8
        ys = np.array([0.0, 1e-3, 2e-3, 3e-3, 4e-3])
        vals = H.neumann_boundary_field(gfun, t, ys)
        from shearlab.numerics import fd_weights
        w = fd_weights(ys, 0.0, 1)
        assert float(w @ vals) == pytest.approx(gfun(t), rel=1e-6)


class TestRates:
    def test_robin_to_dirichlet_linf_slope(self, gevrey):
        res = H.rate_experiment(gevrey, np.geomspace(10, 1e4, 7),
                                norm="linf", limit="to_infinity")
        assert res.slope == pytest.approx(-1.0, abs=0.1)
        assert res.r2 > 0.999

    def test_sqrt_2a_exact_form(self, raw_exp):
        # closed form sqrt(2a/(1+a)) for the raw exponential
        for a in (1e-3, 1e-2, 1e-1):
            d = H.extension_distance(raw_exp, a, "to_zero", "l2", 0)
            assert d == pytest.approx(np.sqrt(2 * a / (1 + a)), rel=1e-6)

    def test_to_zero_l2_slope_flat_cutoff(self):
        fc = P.make_exponential_profile(1.0, flat_cutoff=True)
        res = H.rate_experiment(fc, np.geomspace(1e-4, 1e-1, 7),
                                norm="l2", limit="to_zero")
        assert res.slope == pytest.approx(0.5, abs=0.05)

    def test_to_zero_linf_slope_two_inflection(self, two_inflection):
        res = H.rate_experiment(two_inflection,
                                np.geomspace(1e-4, 1e-1, 7),
                                norm="linf", limit="to_zero")
        assert res.slope == pytest.approx(1.0, abs=0.1)

    def test_l1_order0_advisory(self, gevrey):
        res = H.rate_experiment(gevrey, np.geomspace(1e-4, 1e-1, 6),
                                norm="l1", limit="to_zero")
        assert res.slope is None
        assert "L1" in res.advisory

    def test_preconditions(self, gevrey):
        with pytest.raises(ValueError):
            H.rate_experiment(gevrey, [1.0, 2.0, 4.0], norm="linf")
        with pytest.raises(ValueError):
            H.rate_experiment(gevrey, [1.0, 2.0, 3.0, 4.0, 100.0],
                              norm="linf")

    def test_evolved_rate_uniform_in_time(self, gevrey):
        # the a -> inf rate persists for the evolved fields
        res = H.rate_experiment(gevrey, np.geomspace(10, 1e3, 5),
                                norm="linf", limit="to_infinity", t=0.5)
        assert res.slope == pytest.approx(-1.0, abs=0.15)


class TestEnvelopes:
    def test_envelope_identity(self):
        ts = np.linspace(0.0, 20.0, 81)
        env = H.Envelope(alpha=1.0, beta=0.25, constant=1.0)
        ok, worst = H.envelope_check(ts, env(ts), env)
        assert ok and worst == pytest.approx(1.0, rel=1e-12)

    def test_envelope_scalar_maximization(self):
        ts = np.linspace(0.0, 20.0, 401)
        samples = ts * np.exp(0.5 * ts)
        env = H.Envelope(alpha=1.0, beta=0.0, constant=10.0)
        ok, worst = H.envelope_check(ts, samples, env)
        assert ok
        assert worst == pytest.approx(np.max(samples * np.exp(-ts)),
                                      rel=1e-12)

    def test_gronwall_exact_case(self):
        # lam = 0, beta = 0, C = 1: phi = (e^(at) - 1)/a <= e^(at)/a
        env = H.gronwall_bound(0.0, 1.0, 0.0, 1.0, 0.0)
        assert env.constant == pytest.approx(1.0, rel=1e-10)

    def test_gronwall_bounded_ratio(self):
        env = H.gronwall_bound(0.5, 1.0, 0.25, 1.0, 0.0)
        assert np.isfinite(env.constant)
        assert env.constant == pytest.approx(2.0, rel=0.2)

    def test_gronwall_hypothesis(self):
        with pytest.raises(ValueError):
            H.gronwall_bound(1.5, 1.0, 0.25, 1.0)

    def test_integral_ratio_limit(self):
        # the comparison constant tends to 1/alpha
        r30 = H.integral_envelope_ratio(1.0, 0.25, 30.0)
        assert abs(r30 - 1.0) < 0.05
        r10 = H.integral_envelope_ratio(2.0, 0.5, 10.0)
        assert abs(r10 - 0.5) < 0.05 * 0.5 + 0.05

    def test_solve_robin_norms_under_envelope(self, gevrey):
        ts = np.linspace(0.25, 2.0, 6)
        norms = []
        for t in ts:
            fld = H.solve_robin(gevrey, 1.0, t)
            norms.append(np.sqrt(np.trapezoid(fld.values ** 2, fld.grid)))
        env = H.Envelope(alpha=0.5, beta=0.0, constant=float(norms[0]))
        ok, worst = H.envelope_check(ts, np.asarray(norms), env)
        assert ok
