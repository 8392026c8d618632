"""Half-line heat flow with the mixed wall condition  d_y u = a u.

The solution with initial data u0 is a full-line kernel convolution
u(t) = K * u0~, where K(t,y) = exp(-y^2/4t)/sqrt(4 pi t) and u0~ is the
unique continuous extension of u0 for which d_y u0~ - a u0~ is odd:

    u0~(-y) = u0(y) - 2a int_0^y exp(-a(y-s)) u0(s) ds            (A)
            = -u0(y) + 2 exp(-ay) u0(0)
              + 2 int_0^y exp(-a(y-s)) u0'(s) ds                  (B)

(A) and (B) are related by integration by parts; a = inf gives the odd
extension (Dirichlet), a = 0 the even one (Neumann).

For the evolved field the inner extension integral is exchanged with the
kernel convolution analytically, which leaves single quadratures:

    u(t,y) = int_0^inf [K(t,y-x) + K(t,y+x)] u0(x) dx
           - a int_0^inf u0(x) E(t, y+x) dx,
    E(t,b) = exp(-b^2/4t) erfcx((b + 2at) / (2 sqrt t)),

valid for any bounded u0 (no flatness needed); erfcx keeps every factor
in range.  Kernel mass beyond 12 sqrt(t) standard widths is below 1e-30
and is truncated.

The module also carries the convergence-rate experiments toward the
Dirichlet (a -> inf) and Neumann (a -> 0) limits, the inhomogeneous
Dirichlet solver u1 + u2 + u3, and the envelope / comparison-integral
helpers used by the growth bookkeeping.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import erfcx

from .numerics import fd_weights, gauss_panels, loglog_slope
from .profiles import ShearProfile, Y_MAX

INF = float("inf")


class FlatnessError(ValueError):
    """Raised when an operation needs data with u0(0) = 0 (all orders)."""


class InsufficientResolutionError(ValueError):
    pass


def heat_kernel(t, y):
    y = np.asarray(y, dtype=float)
    return np.exp(-y * y / (4.0 * t)) / np.sqrt(4.0 * np.pi * t)


def _kernel_halfline_weight(t, b, a):
    """exp(-b^2/4t) * erfcx((b + 2at)/(2 sqrt t)), overflow-guarded.

    Equals 2 exp(ab + a^2 t) - (mirror term) when the erfcx argument is
    negative; that branch only occurs for b < -2at, where the exponent
    a(b + at) is negative, so both branches stay finite.
    """
    b = np.asarray(b, dtype=float)
    warg = (b + 2.0 * a * t) / (2.0 * np.sqrt(t))
    out = np.empty_like(b)
    pos = warg >= 0
    out[pos] = np.exp(-b[pos] ** 2 / (4.0 * t)) * erfcx(warg[pos])
    if (~pos).any():
        bn = b[~pos]
        out[~pos] = 2.0 * np.exp(a * bn + a * a * t) \
            - np.exp(-bn ** 2 / (4.0 * t)) * erfcx(-warg[~pos])
    return out


# ----------------------------------------------------------------------
# Extensions of the initial data
# ----------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _exp_window_edges(a: float, y: float) -> np.ndarray:
    """Panel edges on [0, y] resolving both exp(-a(y-s)) and the data.

    The kernel needs resolution on the scale 1/a below s = y; the data
    profiles live on O(1)..O(Y_MAX) scales near s = 0.  The union ladder
    covers both; panels where the kernel is below exp(-45) are dropped.
    """
    lo = 0.0 if a <= 0 else max(0.0, y - 45.0 / a)
    edges = {lo, y}
    if a > 0:
        step = 1.0 / a
        for mult in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
            e = y - mult * step
            if e > lo:
                edges.add(e)
    # dyadic ladder near the wall: the flat profiles vary on scale ~ y there
    ladder = [0.0125 * 2.0 ** j for j in range(6)]
    for e in ladder + [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0, Y_MAX]:
        if lo < e < y:
            edges.add(e)
    return np.array(sorted(edges))


def _exp_window_integral(g: Callable, a: float, y: float) -> float:
    """int_0^y exp(-a(y-s)) g(s) ds, composite Gauss-Legendre panels.

    g must accept numpy arrays.  Each panel wider than a few kernel
    e-folds is split further so the exponential stays polynomial-cheap.
    """
    if y <= 0:
        return 0.0
    edges = _exp_window_edges(a, y)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        n_split = 1 if a <= 0 else max(1, int(np.ceil(a * width / 4.0)))
        n_split = min(n_split, 12)
        sub = np.linspace(lo, hi, n_split + 1)
        mid = 0.5 * (sub[1:] + sub[:-1])
        half = 0.5 * np.diff(sub)
        s = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        wq = (half[:, None] * _GL_W[None, :]).ravel()
        total += float(np.sum(wq * np.exp(-a * (y - s)) * g(s)))
    return total


def extension_value(u0: ShearProfile, a: float, y, formula: str = "auto"):
    """The Robin-compatible extension u0~ evaluated anywhere on the line.

    formula selects between the equivalent representations: "direct"
    (the exponential-weight form with u0' - a u0), "parts" (A above) and
    "flat" (B with the boundary term dropped, valid for u0(0) = 0).
    "auto" picks "flat" for flat profiles and "parts" otherwise.
    """
    yin = y
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = np.atleast_1d(u0.value(y[pos]))
    neg = ~pos
    if neg.any():
        ay = -y[neg]
        if a == INF:
            out[neg] = -np.atleast_1d(u0.value(ay))
        elif a == 0.0:
            out[neg] = np.atleast_1d(u0.value(ay))
        else:
            mode = formula
            if mode == "auto":
                mode = "flat" if u0.flat_at_zero else "parts"
            vals = np.empty(ay.shape)
            u0_at_0 = float(np.atleast_1d(u0.value(0.0))[0])
            g_val = lambda s: np.atleast_1d(u0.value(s))
            g_der = lambda s: np.atleast_1d(u0.derivative(s, 1))
            for i, yy in enumerate(ay):
                if mode == "flat":
                    vals[i] = -float(np.atleast_1d(u0.value(yy))[0]) \
                        + 2.0 * _exp_window_integral(g_der, a, yy)
                elif mode == "parts":
                    vals[i] = float(np.atleast_1d(u0.value(yy))[0]) \
                        - 2.0 * a * _exp_window_integral(g_val, a, yy)
                elif mode == "direct":
                    vals[i] = np.exp(-a * yy) * u0_at_0 \
                        + _exp_window_integral(
                            lambda s: g_der(s) - a * g_val(s), a, yy)
                else:
                    raise ValueError(f"unknown formula {formula!r}")
            out[neg] = vals
    if np.isscalar(yin) or np.ndim(yin) == 0:
        return float(out[0])
    return out


@dataclass
class ExtendedProfile:
    """Initial data extended to the full line by the Robin rule."""
    base: ShearProfile
    coefficient: float

    def __call__(self, y):
        return extension_value(self.base, self.coefficient, y)

    def derivative(self, y, k=1):
        return extension_derivative(self.base, self.coefficient, k, y)


def extend(u0: ShearProfile, a: float,
           allow_nonflat: bool = False) -> ExtendedProfile:
    """Extend u0 so the evolved field satisfies d_y u = a u at the wall."""
    if a != INF and a < 0:
        raise ValueError("coefficient a must be >= 0 (or inf)")
    wall = abs(float(np.atleast_1d(u0.value(0.0))[0]))
    if wall > 1e-10 and not allow_nonflat:
        raise FlatnessError(
            f"u0(0) = {wall:.3e} != 0; pass allow_nonflat to bypass")
    return ExtendedProfile(base=u0, coefficient=a)


def extension_derivative(u0: ShearProfile, a: float, k: int, y):
    """k-th derivative of the extension at y (y < 0 is the new side).

    Uses the simplified derivative formula whose boundary sums vanish
    because every derivative of u0 vanishes at the wall:
        (-1)^k u0~^(k)(-y) = -u0^(k)(y)
                             + 2 int_0^y exp(-a(y-s)) u0^(k+1)(s) ds.
    """
    yin = y
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if k == 0:
        out = extension_value(u0, a, y)
        return out if np.ndim(yin) else float(np.atleast_1d(out)[0])
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = np.atleast_1d(u0.derivative(y[pos], k))
    neg = ~pos
    if neg.any():
        ay = -y[neg]
        sign = (-1.0) ** k
        if a == INF:
            out[neg] = -sign * np.atleast_1d(u0.derivative(ay, k))
        elif a == 0.0:
            out[neg] = sign * np.atleast_1d(u0.derivative(ay, k))
        else:
            if not u0.flat_at_zero:
                raise FlatnessError(
                    "extension derivatives for finite a need data that is "
                    "flat at the wall (distributional terms otherwise)")
            vals = np.empty(ay.shape)
            g_next = lambda s: np.atleast_1d(u0.derivative(s, k + 1))
            for i, yy in enumerate(ay):
                integral = _exp_window_integral(g_next, a, yy)
                vals[i] = sign * (
                    -float(np.atleast_1d(u0.derivative(yy, k))[0])
                    + 2.0 * integral)
            out[neg] = vals
    return out if np.ndim(yin) else float(out[0])


# ----------------------------------------------------------------------
# Evolved fields
# ----------------------------------------------------------------------

def default_grid(y_max: float = Y_MAX) -> np.ndarray:
    """400 uniform nodes plus 50 wall-clustered nodes in [0, 0.5]."""
    uniform = np.linspace(0.0, y_max, 401)
    graded = np.geomspace(2e-3, 0.5, 50)
    return np.unique(np.concatenate([uniform, graded]))


@dataclass
class HeatField:
    time: float
    grid: np.ndarray
    values: np.ndarray
    coefficient: float
    source_kind: str = "robin_homogeneous"
    parts: dict = field(default_factory=dict)

    def interpolate(self, y):
        return np.interp(y, self.grid, self.values)


def solve_robin(u0: ShearProfile, a: float, t: float,
                grid: Optional[np.ndarray] = None,
                allow_nonflat: bool = False) -> HeatField:
    """Evolve u0 under the half-line heat flow with d_y u = a u at y = 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    if a != INF and a < 0:
        raise ValueError("coefficient a must be >= 0 (or inf)")
    wall = abs(float(np.atleast_1d(u0.value(0.0))[0]))
    if wall > 1e-10 and not allow_nonflat:
        raise FlatnessError(
            f"u0(0) = {wall:.3e} != 0; pass allow_nonflat to bypass")
    if grid is None:
        grid = default_grid()
    grid = np.asarray(grid, dtype=float)
    values = _convolve_halfline(u0.value, a, t, grid)
    return HeatField(time=float(t), grid=grid, values=values,
                     coefficient=a, source_kind="robin_homogeneous")


def _convolve_halfline(u0_fun: Callable, a: float, t: float,
                       y: np.ndarray) -> np.ndarray:
    """K * u0~ evaluated on y (any sign) via the erfcx reduction."""
    y = np.asarray(y, dtype=float)
    reach = 12.0 * np.sqrt(t)
    x_hi = float(np.max(y)) + reach + 1.0

    def fv(x):
        ux = u0_fun(np.array([x], dtype=float))
        ux = float(np.atleast_1d(ux)[0])
        if a == INF:
            return (heat_kernel(t, y - x) - heat_kernel(t, y + x)) * ux
        if a == 0.0:
            return (heat_kernel(t, y - x) + heat_kernel(t, y + x)) * ux
        return (heat_kernel(t, y - x) + heat_kernel(t, y + x)
                - a * _kernel_halfline_weight(t, y + x, a)) * ux

    res = integrate.quad_vec(fv, 0.0, x_hi, epsabs=1e-13, epsrel=1e-11,
                             limit=600)
    return res[0]


def bc_residual(fld: HeatField) -> float:
    """Wall-condition residual of an evolved field.

    Finite a: |d_y u(t,0) - a u(t,0)| with a one-sided stencil of order
    >= 4 on the first grid nodes.  a = inf returns |u(t,0)| (Dirichlet),
    a = 0 returns |d_y u(t,0)| (Neumann).
    """
    grid, vals = fld.grid, fld.values
    if np.count_nonzero(grid <= 0.1) < 5:
        raise InsufficientResolutionError(
            "need at least 5 nodes in [0, 0.1] for the wall stencil")
    if fld.coefficient == INF:
        return abs(float(vals[0]))
    nodes = grid[:6]
    w = fd_weights(nodes, 0.0, 1)
    dudy = float(w @ vals[:6])
    if fld.coefficient == 0.0:
        return abs(dudy)
    return abs(dudy - fld.coefficient * float(vals[0]))


# ----------------------------------------------------------------------
# Inhomogeneous Dirichlet problem: u = u1 + u2 + u3
# ----------------------------------------------------------------------

def dirichlet_boundary_field(f: Callable, t: float, y):
    """Solution of the heat equation with zero data and wall value f(t).

    u1(t,y) = -2 d_yK * f; the time-convolution singularity is removed
    with s = y^2/(4 v^2), leaving
        u1(t,y) = (2/sqrt(pi)) int_{y/(2 sqrt t)}^inf e^{-v^2}
                   f(t - y^2/(4 v^2)) dv,
    whose y -> 0 limit is f(t) (returned exactly at y = 0).  Complex
    boundary data is supported.
    """
    yin = y
    y = np.atleast_1d(np.asarray(y, dtype=float))
    probe = f(t)
    out = np.empty(y.shape, dtype=complex if np.iscomplexobj(probe)
                   or isinstance(probe, complex) else float)
    for i, yy in enumerate(y):
        if yy == 0.0:
            out[i] = f(t)
            continue
        lo = yy / (2.0 * np.sqrt(t))

        def g(v):
            return np.exp(-v * v) * f(t - yy * yy / (4.0 * v * v))

        if out.dtype == complex:
            re = integrate.quad(lambda v: np.real(g(v)), lo, lo + 10.0,
                                epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            im = integrate.quad(lambda v: np.imag(g(v)), lo, lo + 10.0,
                                epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            out[i] = (2.0 / np.sqrt(np.pi)) * (re + 1j * im)
        else:
            val = integrate.quad(g, lo, lo + 10.0, epsabs=1e-13,
                                 epsrel=1e-12, limit=200)[0]
            out[i] = (2.0 / np.sqrt(np.pi)) * val
    return out if np.ndim(yin) else out[0]


def neumann_boundary_field(g: Callable, t: float, y):
    """Heat field with zero data and wall flux d_y u(t,0) = g(t).

    u(t,y) = -2 K * g in time; the sqrt singularity is removed with
    tau = w^2.  Complex flux data is supported.
    """
    yin = y
    y = np.atleast_1d(np.asarray(y, dtype=float))
    probe = g(t)
    is_c = np.iscomplexobj(probe) or isinstance(probe, complex)
    out = np.empty(y.shape, dtype=complex if is_c else float)
    hi = np.sqrt(t)
    for i, yy in enumerate(y):
        def f(w):
            arg = -yy * yy / (4.0 * w * w) if w > 0 else \
                (0.0 if yy == 0 else -np.inf)
            return np.exp(arg) * g(t - w * w)

        if is_c:
            re = integrate.quad(lambda w: np.real(f(w)), 0.0, hi,
                                epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            im = integrate.quad(lambda w: np.imag(f(w)), 0.0, hi,
                                epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            val = re + 1j * im
        else:
            val = integrate.quad(f, 0.0, hi, epsabs=1e-13, epsrel=1e-12,
                                 limit=200)[0]
        out[i] = -(2.0 / np.sqrt(np.pi)) * val
    return out if np.ndim(yin) else out[0]


def solve_inhomogeneous_dirichlet(u0: Optional[ShearProfile],
                                  f: Optional[Callable],
                                  r: Optional[Callable],
                                  t: float,
                                  grid: Optional[np.ndarray] = None,
                                  n_time_nodes: int = 64) -> HeatField:
    """Heat flow with wall value f(t), source r(t,y) and data u0.

    u1 propagates the wall value, u2 = K * (odd extension of u0), and
    u3 convolves the odd-extended source in space and time.  A wall
    value with f(0) != 0 violates the corner compatibility; the solution
    is still produced (interior-smooth) with a warning.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if grid is None:
        grid = default_grid()
    grid = np.asarray(grid, dtype=float)
    total = np.zeros_like(grid)
    parts = {}

    if f is not None:
        f0 = f(0.0)
        if abs(f0) > 1e-12:
            warnings.warn("boundary value f(0) != 0: corner compatibility "
                          "violated; solution valid in the interior",
                          RuntimeWarning)
        u1 = np.real(dirichlet_boundary_field(f, t, grid))
        parts["boundary"] = u1
        total = total + u1

    if u0 is not None:
        u2 = _convolve_halfline(u0.value, INF, t, grid)
        parts["initial"] = u2
        total = total + u2

    if r is not None:
        x_nodes, x_w = np.polynomial.legendre.leggauss(n_time_nodes)
        s_nodes = 0.5 * t * (x_nodes + 1.0)
        s_weights = 0.5 * t * x_w
        u3 = np.zeros_like(grid)
        for s, ws in zip(s_nodes, s_weights):
            tau = t - s

            def fv(x):
                rx = r(s, x)
                return (heat_kernel(tau, grid - x)
                        - heat_kernel(tau, grid + x)) * rx

            x_hi = float(np.max(grid)) + 12.0 * np.sqrt(tau) + 1.0
            inner = integrate.quad_vec(fv, 0.0, x_hi, epsabs=1e-12,
                                       epsrel=1e-10, limit=400)[0]
            u3 += ws * inner
        parts["source"] = u3
        total = total + u3

    return HeatField(time=float(t), grid=grid, values=total,
                     coefficient=INF, source_kind="inhomogeneous_dirichlet",
                     parts=parts)


# ----------------------------------------------------------------------
# Convergence-rate experiments
# ----------------------------------------------------------------------

@dataclass
class RateResult:
    a_values: np.ndarray
    norm_values: np.ndarray
    norm_kind: str
    derivative_order: int
    limit: str
    time: float
    slope: Optional[float]
    intercept: Optional[float]
    r2: Optional[float]
    advisory: Optional[str] = None


def _extension_difference(u0: ShearProfile, a: float, limit: str, k: int,
                          y: np.ndarray) -> np.ndarray:
    """|d^k (u0^a - u0^lim)| on the extended side, sampled at -y (y > 0).

    limit "to_infinity" compares with the odd extension, "to_zero" with
    the even one; both differences reduce to one exponential-window
    integral (plus wall terms that vanish for flat data).
    """
    vals = np.empty_like(y)
    if limit == "to_infinity":
        g = lambda s: np.atleast_1d(u0.derivative(s, k + 1))
        for i, yy in enumerate(y):
            vals[i] = 2.0 * _exp_window_integral(g, a, yy)
        return np.abs(vals)
    if limit == "to_zero":
        bsum = 0.0
        wall = [float(np.atleast_1d(u0.derivative(0.0, j))[0])
                for j in range(max(k, 1))]
        g = lambda s: np.atleast_1d(u0.derivative(s, k))
        for i, yy in enumerate(y):
            if k >= 1:
                bsum = 2.0 * np.exp(-a * yy) * sum(
                    (-a) ** (k - j) * wall[j] for j in range(k))
            vals[i] = bsum - 2.0 * a * _exp_window_integral(g, a, yy)
        return np.abs(vals)
    raise ValueError(f"unknown limit {limit!r}")


def extension_distance(u0: ShearProfile, a: float, limit: str = "to_zero",
                       norm: str = "l2", k: int = 0) -> float:
    """Full-line L^p distance between u0^a and the limiting extension.

    The difference vanishes on y >= 0, so only the extended side
    contributes; for the slow a -> 0 limit it decays like exp(-a y), so
    the variable is rescaled by min(1, a) before the outer quadrature.
    """
    span = Y_MAX + (50.0 / a if limit == "to_zero" else 10.0)

    def diff_abs(y):
        return _extension_difference(u0, a, limit, k,
                                     np.atleast_1d(np.asarray(y, float)))[0]

    if norm == "linf":
        ygrid = np.geomspace(1e-3, span, 240)
        return float(np.max(_extension_difference(u0, a, limit, k, ygrid)))
    p = {"l1": 1, "l2": 2}[norm]
    c = min(1.0, a) if limit == "to_zero" else 1.0
    pts = sorted({z for z in (c * 1.0, c * 10.0, c * Y_MAX, 1.0, 10.0)
                  if 0.0 < z < c * span})
    val, _ = integrate.quad(lambda z: diff_abs(z / c) ** p / c, 0.0,
                            c * span, epsabs=1e-14, epsrel=1e-10,
                            limit=400, points=pts)
    return float(val ** (1.0 / p))


def rate_experiment(u0: ShearProfile, a_values, norm: str = "linf",
                    limit: str = "to_infinity", t: float = 0.0, k: int = 0,
                    assume_integral_condition: bool = False) -> RateResult:
    """Fit the convergence order of u0^a toward the a -> inf or a -> 0 limit.

    At t = 0 the extensions are compared directly; for t > 0 the evolved
    fields are compared on the solution grid.  Returns the least-squares
    log-log slope with the two extreme a samples dropped.
    """
    a_values = np.sort(np.asarray(a_values, dtype=float))
    if len(a_values) < 5:
        raise ValueError("need at least 5 coefficient samples")
    ratios = a_values[1:] / a_values[:-1]
    if np.max(ratios) / np.min(ratios) > 1.5:
        raise ValueError("a_values should form a geometric progression")

    if limit == "to_zero" and norm == "l1" and k == 0 \
            and not assume_integral_condition:
        return RateResult(a_values, np.full_like(a_values, np.nan), norm, k,
                          limit, t, None, None, None,
                          advisory="L1 rate at order 0 needs the integrated "
                                   "data y -> int_0^y u0 to be L1; pass "
                                   "assume_integral_condition to assert it")

    norms = np.empty_like(a_values)
    if t == 0.0:
        for i, a in enumerate(a_values):
            norms[i] = extension_distance(u0, a, limit, norm, k)
    else:
        grid = default_grid()
        lim_a = INF if limit == "to_infinity" else 0.0
        ref = solve_robin(u0, lim_a, t, grid).values
        nodes, wq = grid, None
        for i, a in enumerate(a_values):
            diff = solve_robin(u0, a, t, grid).values - ref
            if norm == "linf":
                norms[i] = np.max(np.abs(diff))
            elif norm == "l1":
                norms[i] = np.trapezoid(np.abs(diff), grid)
            else:
                norms[i] = np.sqrt(np.trapezoid(diff * diff, grid))

    slope, intercept, r2 = loglog_slope(a_values, norms, drop_extremes=True)
    return RateResult(a_values, norms, norm, k, limit, t, slope, intercept,
                      r2)


# ----------------------------------------------------------------------
# Envelopes and the comparison lemma machinery
# ----------------------------------------------------------------------

@dataclass
class Envelope:
    """t -> constant * exp(alpha t) / (1 + t)^beta."""
    alpha: float
    beta: float
    constant: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.constant * np.exp(self.alpha * t) / (1.0 + t) ** self.beta

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        return np.log(self.constant) + self.alpha * t \
            - self.beta * np.log1p(t)


def envelope_check(t_samples, values, env: Envelope):
    """Worst ratio of samples against the envelope; compared in log space."""
    t_samples = np.asarray(t_samples, dtype=float)
    values = np.asarray(values, dtype=float)
    log_ratio = np.log(np.maximum(values, 1e-300)) - env.log_value(t_samples) \
        + np.log(env.constant)
    worst = float(np.exp(np.max(log_ratio)))
    return worst <= env.constant * (1.0 + 1e-9), worst


def gronwall_bound(lam: float, alpha: float, beta: float, C: float,
                   phi0: float = 0.0, t_check: float = 30.0,
                   n_samples: int = 241) -> Envelope:
    """Envelope for phi' <= lam phi + C exp(alpha t)/(1+t)^beta.

    Integrates the saturated equation with the integrating factor and
    fits the smallest constant C' with phi(t) <= C' exp(alpha t)/(1+t)^beta
    on [0, t_check].  Requires 0 <= lam < alpha.
    """
    if not (0 <= lam < alpha):
        raise ValueError("need 0 <= lam < alpha")
    ts = np.linspace(0.0, t_check, n_samples)
    phi = np.empty_like(ts)
    phi[0] = phi0
    # phi(t) = e^{lam t} phi0 + C int_0^t e^{lam(t-s)} e^{alpha s}(1+s)^-beta ds
    # accumulated interval by interval to keep every factor in range
    acc = 0.0  # int_0^t e^{-lam s} e^{alpha s}(1+s)^-beta, times e^{lam t}
    for i in range(1, len(ts)):
        seg, _ = integrate.quad(
            lambda s: np.exp((alpha - lam) * s) * (1.0 + s) ** (-beta),
            ts[i - 1], ts[i], epsabs=1e-13, epsrel=1e-12)
        acc += seg
        phi[i] = np.exp(lam * ts[i]) * (phi0 + C * acc)
    log_env = alpha * ts - beta * np.log1p(ts)
    cprime = float(np.max(phi * np.exp(-log_env)))
    return Envelope(alpha=alpha, beta=beta, constant=cprime)


def integral_envelope_ratio(alpha: float, beta: float, t: float) -> float:
    """(int_0^t e^{alpha s}(1+s)^-beta ds) / (e^{alpha t}(1+t)^-beta).

    Tends to 1/alpha as t grows; evaluated with the overflow-free
    integrand e^{alpha(s-t)} ((1+t)/(1+s))^beta.
    """
    lo = max(0.0, t - 60.0 / alpha)
    val, _ = integrate.quad(
        lambda s: np.exp(alpha * (s - t)) * ((1.0 + t) / (1.0 + s)) ** beta,
        lo, t, epsabs=1e-14, epsrel=1e-12, limit=300)
    return float(val)
