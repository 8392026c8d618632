"""Shear-profile catalog for the half-line y >= 0.

Profiles U(y) are smooth velocity profiles with a far-field limit
U_inf = lim_{y->inf} U(y).  The catalog profiles are *flat* at the wall:
every derivative vanishes at y = 0, which is what makes them compatible
with the Robin heat problem at all orders and for every coefficient.

Two constructions are provided:

* a Gevrey profile  U(y) = exp(-y^(-1/(rho-1))),  rho > 1, with closed
  forms for the first three derivatives and a unique inflection point at
  y0 = rho^(1-rho);
* a two-inflection profile with U(0) = U_inf = 0 and U > 0 in between,
  built by prescribing the curvature U'' = (y-y1)(y-y2) * (positive
  envelope) and integrating twice.  Three moment conditions (U'(inf)=0,
  U(inf)=0, equal values at the two inflection points) are enforced by a
  linear solve for the three curvature-lobe weights plus a 1-d root find
  in the tail-sharpness parameter.

The classification machinery (inflection points, the ratio
K(y) = -U''/(U - U0) and its boundedness/positivity) lives here too.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .numerics import (fd_weights, gauss_panels, richardson_derivative,
                       smooth_step, smooth_step_derivative)

Y_MAX = 40.0          # truncation for half-line quadratures
FLAT_FLOOR = 1e-12    # below this y the flat profiles evaluate to exact 0


class AssumptionRegime(enum.Enum):
    GAMMA_ABOVE_HALF = "gamma_above_half"   # needs U^(k) in L1 for k >= 1
    GAMMA_BELOW_HALF = "gamma_below_half"   # needs U^(k) in L1 for k >= 0


class ShearProfile:
    """A shear profile with analytic derivative evaluators.

    evaluator and derivative_evaluators[k-1] (orders 1..analytic order)
    accept scalars or arrays.  Orders above the analytic ones fall back
    to Richardson-extrapolated finite differences of the highest
    analytic derivative.
    """

    def __init__(self, name, evaluator, derivative_evaluators, u_infinity,
                 d_max=6, flat_at_zero=True, far_field_probe=Y_MAX,
                 params=None):
        if d_max < 4:
            raise ValueError("d_max must be at least 4")
        self.name = name
        self.evaluator = evaluator
        self.derivative_evaluators = tuple(derivative_evaluators)
        self.u_infinity = float(u_infinity)
        self.d_max = int(d_max)
        self.flat_at_zero = bool(flat_at_zero)
        self.far_field_probe = float(far_field_probe)
        self.params = dict(params or {})

    def value(self, y):
        return self.evaluator(y)

    def __call__(self, y):
        return self.evaluator(y)

    def derivative(self, y, k=1):
        """k-th derivative at y; k = 0 is the profile itself."""
        if k < 0:
            raise ValueError("derivative order must be >= 0")
        if k > self.d_max:
            raise UnsupportedOrderError(
                f"order {k} above d_max={self.d_max} for profile {self.name}")
        if k == 0:
            return self.evaluator(y)
        n_analytic = len(self.derivative_evaluators)
        if k <= n_analytic:
            return self.derivative_evaluators[k - 1](y)
        # finite differences of the highest analytic derivative
        top = self.derivative_evaluators[n_analytic - 1]
        extra = k - n_analytic
        if extra > 3:
            raise UnsupportedOrderError(
                f"order {k} not available for profile {self.name}")
        y = np.asarray(y, dtype=float)
        h = np.maximum(1e-3, 0.02 * np.maximum(y, 0.1))
        return richardson_derivative(top, y, h, order=extra)


class UnsupportedOrderError(ValueError):
    pass


class ProfileConstructionError(RuntimeError):
    pass


def derivative(profile: ShearProfile, k: int, y):
    """Module-level convenience wrapper for ShearProfile.derivative."""
    return profile.derivative(y, k)


# ----------------------------------------------------------------------
# Gevrey catalog profile
# ----------------------------------------------------------------------

def make_gevrey_profile(rho: float) -> ShearProfile:
    """Flat Gevrey-class profile U(y) = exp(-y^(-1/(rho-1))).

    Monotone increasing with U_inf = 1, one inflection point at
    y0 = rho^(1-rho).  Evaluations are carried out in the variable
    t = y^(-1/(rho-1)) so tiny y underflows gracefully to 0.
    """
    if not rho > 1.0:
        raise ValueError("rho must be > 1")
    rho = float(rho)
    pw = 1.0 / (rho - 1.0)

    def tvar(y):
        return y ** (-pw)

    def _mask(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        pos = y > FLAT_FLOOR
        return y, pos

    def _wrap(y_in, out):
        if np.isscalar(y_in) or np.ndim(y_in) == 0:
            return float(out[0])
        return out

    def u(yin):
        y, pos = _mask(yin)
        out = np.zeros_like(y)
        out[pos] = np.exp(-tvar(y[pos]))
        return _wrap(yin, out)

    def u1(yin):
        y, pos = _mask(yin)
        out = np.zeros_like(y)
        t = tvar(y[pos])
        out[pos] = np.exp(rho * np.log(t) - t) / (rho - 1.0)
        return _wrap(yin, out)

    def u2(yin):
        y, pos = _mask(yin)
        out = np.zeros_like(y)
        t = tvar(y[pos])
        out[pos] = (1.0 - rho / t) * np.exp(2 * rho * np.log(t) - t) \
            / (rho - 1.0) ** 2
        return _wrap(yin, out)

    def u3(yin):
        y, pos = _mask(yin)
        out = np.zeros_like(y)
        t = tvar(y[pos])
        poly = 1.0 + 2.0 * rho**2 / t**2 - (rho / t) * (3.0 + 1.0 / t)
        out[pos] = poly * np.exp(3 * rho * np.log(t) - t) / (rho - 1.0) ** 3
        return _wrap(yin, out)

    return ShearProfile(
        name=f"gevrey(rho={rho:g})",
        evaluator=u,
        derivative_evaluators=(u1, u2, u3),
        u_infinity=1.0,
        d_max=6,
        flat_at_zero=True,
        far_field_probe=(1.2e8) ** (rho - 1.0),
        params={"rho": rho, "y0": rho ** (1.0 - rho)},
    )


# ----------------------------------------------------------------------
# Two-inflection catalog profile
# ----------------------------------------------------------------------

def _curvature_factory(y1, y2, m, s, d):
    """Closed-form curvature pieces before weighting.

    base(y)  = (y-y1)(y-y2) exp(-m/y - s*y)
    tail(y)  = smooth_step((y-y2)/d) * (y-y2)^2      (Gaussian sharpener arg)
    windows  W1, W2, W3 partition unity across the three curvature lobes.
    """
    def pieces(y, sigma):
        y = np.asarray(y, dtype=float)
        base = np.zeros_like(y)
        pos = y > FLAT_FLOOR
        yp = y[pos]
        tail = smooth_step((yp - y2) / d) * (yp - y2) ** 2
        base[pos] = (yp - y1) * (yp - y2) * np.exp(-m / yp - s * yp
                                                   - sigma * tail)
        s1 = smooth_step((y - y1) / d)
        s2 = smooth_step((y - (y2 - d)) / d)
        return base * (1.0 - s1), base * (s1 - s2), base * s2
    return pieces


def make_two_inflection_profile(y1: float, y2: float,
                                amplitude: float = 1.0) -> ShearProfile:
    """Profile with U(0) = U_inf = 0, U > 0 in between, peak = amplitude.

    U'' > 0 on (0, y1), U'' < 0 on (y1, y2) with U' changing sign there,
    and U'' > 0 on (y2, inf); the two inflection points carry the same
    profile value, which the construction enforces exactly through the
    moment conditions on the curvature.
    """
    if not (0 < y1 < y2):
        raise ValueError("need 0 < y1 < y2")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    y1, y2 = float(y1), float(y2)
    delta = y2 - y1
    d = 0.25 * delta

    attempts = [(y1, 2.0 / delta), (y1, 1.0 / delta), (y1, 4.0 / delta),
                (y1, 1.0), (0.5 * y1, 2.0 / delta), (2.0 * y1, 2.0 / delta)]
    solved = None
    for m, s in attempts:
        solved = _solve_curvature_weights(y1, y2, m, s, d)
        if solved is not None:
            break
    if solved is None:
        raise ProfileConstructionError(
            f"no valid curvature balance found for (y1, y2) = ({y1}, {y2})")
    m, s, sigma, w = solved

    pieces = _curvature_factory(y1, y2, m, s, d)

    def curvature(y):
        p1, p2, p3 = pieces(y, sigma)
        return w[0] * p1 + w[1] * p2 + w[2] * p3

    # dense cumulative integration of the closed-form curvature
    y_end = y2 + d + np.sqrt(185.0 / sigma) + 60.0 / s
    grid = np.linspace(0.0, y_end, int(y_end / 1.0e-3) + 2)
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    mid = 0.5 * (grid[1:] + grid[:-1])
    half = 0.5 * np.diff(grid)
    nodes = mid[:, None] + half[:, None] * gl_x[None, :]
    panel = (curvature(nodes.ravel()).reshape(nodes.shape)
             @ gl_w) * half
    up_nodes = np.concatenate([[0.0], np.cumsum(panel)])
    up_spline = CubicSpline(grid, up_nodes,
                            bc_type=((1, 0.0), (1, float(curvature(y_end)))))
    u_spline = up_spline.antiderivative()

    # validation of the construction
    u_y1 = float(u_spline(y1))
    u_y2 = float(u_spline(y2))
    peak = float(optimize.brentq(up_spline, y1, y2, xtol=1e-14))
    u_peak = float(u_spline(peak))
    if abs(u_y1 - u_y2) > 1e-9 * u_peak or u_peak <= 0:
        raise ProfileConstructionError("inflection values failed to match")
    if abs(float(up_spline(y_end))) > 1e-9 * u_peak \
            or abs(float(u_spline(y_end))) > 1e-8 * u_peak:
        raise ProfileConstructionError("curvature moments failed to close")

    scale = float(amplitude) / u_peak

    def _eval(fun, yin):
        y = np.atleast_1d(np.asarray(yin, dtype=float))
        out = np.zeros_like(y)
        inside = (y > FLAT_FLOOR) & (y <= y_end)
        out[inside] = fun(y[inside])
        if np.isscalar(yin) or np.ndim(yin) == 0:
            return float(out[0])
        return out

    u = lambda y: _eval(lambda x: scale * u_spline(x), y)
    u1 = lambda y: _eval(lambda x: scale * up_spline(x), y)
    u2 = lambda y: _eval(lambda x: scale * curvature(x), y)

    def u3(yin):
        yy = np.asarray(yin, dtype=float)
        h = np.maximum(5e-5, 2e-4 * np.maximum(yy, 0.1))
        out = richardson_derivative(u2, yy, h, order=1)
        if np.isscalar(yin) or np.ndim(yin) == 0:
            return float(out)
        return out

    return ShearProfile(
        name=f"two_inflection(y1={y1:g},y2={y2:g})",
        evaluator=u,
        derivative_evaluators=(u1, u2, u3),
        u_infinity=0.0,
        d_max=6,
        flat_at_zero=True,
        far_field_probe=Y_MAX,
        params={"y1": y1, "y2": y2, "amplitude": float(amplitude),
                "m": m, "s": s, "sigma": sigma,
                "weights": tuple(float(x) for x in w),
                "peak_location": peak, "inflection_value": scale * u_y1},
    )


def _solve_curvature_weights(y1, y2, m, s, d):
    """Find sigma and positive lobe weights meeting the moment conditions.

    Rows: total curvature, first moment (closes U at infinity), and the
    equal-inflection-value condition.  Linear in the weights; sigma is
    located by a bracketed root find of the third condition's residual.
    """
    delta = y2 - y1
    y_cut = y2 + d + 80.0 / s
    segs = [(1e-9, y1), (y1, y1 + d), (y1 + d, y2 - d), (y2 - d, y2),
            (y2, y2 + d)]
    nodes_list, weights_list = [], []
    for lo, hi in segs:
        n, wq = gauss_panels(lo, hi, max(12, int((hi - lo) / 0.05)), 10)
        nodes_list.append(n)
        weights_list.append(wq)
    # graded panels on the far tail
    edges = np.geomspace(d, y_cut - y2, 160) + y2
    edges = np.concatenate([[y2 + d], edges[edges > y2 + d]])
    for lo, hi in zip(edges[:-1], edges[1:]):
        n, wq = gauss_panels(lo, hi, 2, 10)
        nodes_list.append(n)
        weights_list.append(wq)
    nodes = np.concatenate(nodes_list)
    wq = np.concatenate(weights_list)

    pieces = _curvature_factory(y1, y2, m, s, d)
    ker0 = np.ones_like(nodes)
    ker1 = nodes
    ker2 = np.where(nodes <= y1, 0.0,
                    np.where(nodes <= y2, nodes - y1, delta))

    def system(sigma):
        p = pieces(nodes, sigma)
        M = np.empty((3, 3))
        for j in range(3):
            M[0, j] = np.sum(wq * ker0 * p[j])
            M[1, j] = np.sum(wq * ker1 * p[j])
            M[2, j] = np.sum(wq * ker2 * p[j])
        return M

    def resid(sigma):
        M = system(sigma)
        w12 = np.linalg.solve(M[:2, :2], -M[:2, 2])
        w = np.array([w12[0], w12[1], 1.0])
        return float(M[2] @ w), w, M

    sig_grid = np.geomspace(0.05, 48.0, 40)
    prev = None
    for sig in sig_grid:
        try:
            r, w, _ = resid(sig)
        except np.linalg.LinAlgError:
            prev = None
            continue
        ok = bool((w > 0).all())
        if prev is not None and ok and prev[2] \
                and np.sign(r) != np.sign(prev[1]):
            sigma = optimize.brentq(lambda x: resid(x)[0], prev[0], sig,
                                    xtol=1e-13)
            r_fin, w_fin, M = resid(sigma)
            scale = np.abs(M).max()
            if (w_fin > 0).all() and abs(r_fin) < 1e-9 * scale:
                return m, s, float(sigma), w_fin
        prev = (sig, r, ok)
    return None


# ----------------------------------------------------------------------
# Test stubs
# ----------------------------------------------------------------------

def make_constant_profile(value: float = 1.0) -> ShearProfile:
    """U identically equal to value; violates flatness at the wall."""
    c = float(value)

    def u(y):
        y = np.asarray(y, dtype=float)
        return np.full_like(y, c) if y.ndim else c

    zero = lambda y: np.zeros_like(np.asarray(y, dtype=float)) \
        if np.ndim(y) else 0.0
    return ShearProfile("constant", u, (zero, zero, zero), u_infinity=c,
                        flat_at_zero=(c == 0.0), params={"value": c})


def make_linear_ramp(slope: float = 1.0) -> ShearProfile:
    """U(y) = slope * y; curvature identically zero (not in class K+)."""
    a = float(slope)
    u = lambda y: a * np.asarray(y, dtype=float) if np.ndim(y) else a * y
    one = lambda y: np.full_like(np.asarray(y, dtype=float), a) \
        if np.ndim(y) else a
    zero = lambda y: np.zeros_like(np.asarray(y, dtype=float)) \
        if np.ndim(y) else 0.0
    return ShearProfile("linear_ramp", u, (one, zero, zero), u_infinity=0.0,
                        flat_at_zero=False, params={"slope": a})


def make_exponential_profile(rate: float = 1.0,
                             flat_cutoff: bool = False) -> ShearProfile:
    """U(y) = exp(-rate*y), optionally multiplied by a flat cutoff.

    The raw version has U(0) = 1 (not flat); with flat_cutoff the profile
    is multiplied by a smooth chi with chi = 0 near 0 and chi = 1 for
    y >= 1, which restores flatness at the wall.
    """
    r = float(rate)
    if not flat_cutoff:
        u = lambda y: np.exp(-r * np.asarray(y, dtype=float))
        d = [lambda y, k=k: (-r) ** k * np.exp(-r * np.asarray(y, dtype=float))
             for k in (1, 2, 3)]
        return ShearProfile("exp_raw", u, d, u_infinity=0.0,
                            flat_at_zero=False, params={"rate": r})

    def chi(y):
        return smooth_step(np.asarray(y, dtype=float))

    def u(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-r * y) * chi(y)

    def u1(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-r * y) * (smooth_step_derivative(y) - r * chi(y))

    def fd(order):
        def dk(y):
            y = np.asarray(y, dtype=float)
            return richardson_derivative(u1, y, 1e-3, order=order - 1)
        return dk

    return ShearProfile("exp_flat_cutoff", u, (u1, fd(2), fd(3)),
                        u_infinity=0.0, flat_at_zero=True,
                        params={"rate": r, "cutoff": True})


# ----------------------------------------------------------------------
# Assumption checks
# ----------------------------------------------------------------------

@dataclass
class AssumptionReport:
    regime: AssumptionRegime
    k_max: int
    tolerance: float
    boundary_values: np.ndarray        # |U^(k)(0)| for k = 0..k_max
    derivatives_vanish_at_zero: bool
    l1_integrable: dict                # order -> bool
    l1_tail_estimates: dict            # order -> float (inf if divergent)
    l1_norms: dict                     # order -> truncated-integral value

    @property
    def passed(self) -> bool:
        return self.derivatives_vanish_at_zero and all(
            self.l1_integrable.values())


def _wall_derivative_estimate(profile: ShearProfile, k: int) -> float:
    """|U^(k)(0)| by a one-sided stencil placed inside the flat window.

    Near-wall flat profiles can have enormous intermediate derivative
    peaks (the flat window shrinks with the Gevrey index), so the
    stencil spacing is chosen where the values themselves are below
    1e-40; without such a window a plain spacing of 1e-4 is used, which
    is enough to flag genuinely non-vanishing derivatives.
    """
    h = 1e-4
    for y_edge in 1e-4 * 2.0 ** np.arange(0, 14):
        if abs(float(np.atleast_1d(profile.value(y_edge))[0])) > 1e-40:
            break
        h = y_edge / (k + 3)
    nodes = h * np.arange(k + 3)
    w = fd_weights(nodes, 0.0, k)
    vals = np.atleast_1d(profile.value(nodes))
    return abs(float(w @ vals))


def check_assumptions(profile: ShearProfile,
                      regime: AssumptionRegime,
                      k_max: int = 4,
                      tol: float = 1e-8) -> AssumptionReport:
    """Numerical screening of the wall-flatness and L1 requirements.

    The far-tail integrability is judged from a power-law fit of
    |U^(k)| between Y_MAX/2 and Y_MAX: decay faster than 1/y gives a
    finite tail estimate, otherwise the order is flagged divergent.
    """
    if k_max > profile.d_max:
        raise UnsupportedOrderError("k_max above profile d_max")
    n_analytic = len(profile.derivative_evaluators)
    boundary = []
    for k in range(k_max + 1):
        if k <= n_analytic:
            val = abs(float(np.atleast_1d(profile.derivative(0.0, k))[0]))
        else:
            val = _wall_derivative_estimate(profile, k)
        boundary.append(val)
    boundary = np.asarray(boundary)
    vanish = bool((boundary < tol).all())

    k_start = 1 if regime is AssumptionRegime.GAMMA_ABOVE_HALF else 0
    nodes, wq = gauss_panels(0.0, Y_MAX, 400, 10)
    integrable, tails, norms = {}, {}, {}
    for k in range(k_start, k_max + 1):
        vals = np.abs(np.atleast_1d(profile.derivative(nodes, k)))
        norms[k] = float(np.sum(wq * vals))
        v_half = abs(float(np.atleast_1d(profile.derivative(Y_MAX / 2, k))[0]))
        v_end = abs(float(np.atleast_1d(profile.derivative(Y_MAX, k))[0]))
        if v_end < 1e-12 and v_half < 1e-12:
            integrable[k] = True
            tails[k] = v_end * Y_MAX
            continue
        if v_half <= 0 or v_end <= 0:
            integrable[k] = True
            tails[k] = 0.0
            continue
        p = float(np.log(v_half / v_end) / np.log(2.0))
        if p > 1.05:
            integrable[k] = True
            tails[k] = v_end * Y_MAX / (p - 1.0)
        else:
            integrable[k] = False
            tails[k] = float("inf")
    return AssumptionReport(regime=regime, k_max=k_max, tolerance=tol,
                            boundary_values=boundary,
                            derivatives_vanish_at_zero=vanish,
                            l1_integrable=integrable,
                            l1_tail_estimates=tails,
                            l1_norms=norms)


# ----------------------------------------------------------------------
# Inflection analysis and the K ratio
# ----------------------------------------------------------------------

@dataclass
class InflectionData:
    inflection_points: list
    inflection_value: Optional[float]
    kplus: bool
    k_sup: float
    k_inf_interior: float
    limits_at_inflections: list = field(default_factory=list)


def inflection_data(profile: ShearProfile,
                    grid: Optional[np.ndarray] = None) -> InflectionData:
    """Locate curvature sign changes and classify the K ratio.

    K(y) = -U''/(U - U0) with the removable singularity at an inflection
    evaluated as -U'''/U' (l'Hopital).  kplus requires K > 0 on the
    probed interior window and a finite sup.
    """
    if grid is None:
        grid = np.linspace(0.01, Y_MAX, 8000)
    u2 = np.atleast_1d(profile.derivative(grid, 2))
    signs = np.sign(u2)
    signs[np.abs(u2) < 1e-300] = 0.0
    points = []
    for i in range(len(grid) - 1):
        if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
            root = optimize.brentq(
                lambda y: float(np.atleast_1d(profile.derivative(y, 2))[0]),
                grid[i], grid[i + 1], xtol=1e-14)
            points.append(float(root))
    if not points:
        return InflectionData([], None, False, 0.0, 0.0)

    values = [float(np.atleast_1d(profile.value(p))[0]) for p in points]
    u0 = float(np.mean(values))
    spread = max(values) - min(values)
    scale = max(abs(u0), max(abs(v) for v in values), 1e-30)
    consistent = spread <= 1e-6 * max(1.0, scale)

    limits = []
    for p in points:
        u1v = float(np.atleast_1d(profile.derivative(p, 1))[0])
        u3v = float(np.atleast_1d(profile.derivative(p, 3))[0])
        limits.append(-u3v / u1v if u1v != 0 else float("nan"))

    kfun = k_evaluator(profile, points, u0, limits)
    kvals = kfun(grid)
    k_sup = float(np.nanmax(kvals))
    lo = 0.5 * points[0]
    spread = points[-1] - points[0] if len(points) > 1 else points[0]
    hi = min(points[-1] + max(1.0, 0.5 * spread), Y_MAX)
    window = grid[(grid >= lo) & (grid <= hi)]
    k_inf = float(np.nanmin(kfun(window)))
    kplus = bool(consistent and np.isfinite(k_sup) and k_inf > 0)
    return InflectionData(points, u0 if consistent else None, kplus,
                          k_sup, k_inf, limits)


def k_evaluator(profile: ShearProfile,
                points: Sequence[float],
                u0: float,
                limits: Optional[Sequence[float]] = None) -> Callable:
    """Vectorized K(y) = -U''/(U - U0) with removable singularities.

    Within |U - U0| < 1e-10 of an inflection the printed l'Hopital value
    -U'''/U' at the nearest inflection point is substituted.
    """
    pts = np.asarray(points, dtype=float)
    if limits is None:
        limits = []
        for p in pts:
            u1v = float(np.atleast_1d(profile.derivative(p, 1))[0])
            u3v = float(np.atleast_1d(profile.derivative(p, 3))[0])
            limits.append(-u3v / u1v)
    lims = np.asarray(limits, dtype=float)

    def K(yin):
        y = np.atleast_1d(np.asarray(yin, dtype=float))
        u = np.atleast_1d(profile.value(y))
        u2 = np.atleast_1d(profile.derivative(y, 2))
        denom = u - u0
        near = np.abs(denom) < 1e-10
        out = np.empty_like(y)
        safe = ~near
        out[safe] = -u2[safe] / denom[safe]
        if near.any() and len(pts):
            idx = np.abs(y[near, None] - pts[None, :]).argmin(axis=1)
            out[near] = lims[idx]
        elif near.any():
            out[near] = 0.0
        if np.isscalar(yin) or np.ndim(yin) == 0:
            return float(out[0])
        return out

    return K
