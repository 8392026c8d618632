"""Exponent and timing bookkeeping for the boundary-layer instability.

Everything here is exact rational arithmetic on the slip exponent gamma:
the instability order theta(gamma), the boundary-layer amplitude
a(gamma) = 1/4 - theta, the expansion granularity n with 2^-n <= theta,
the ladder k_j = 1 + j/(2^n N) controlling growth exponents of the
cascade terms, per-regime wall-condition data for the leading
boundary-layer corrector, and the time T at which a size-nu^N
perturbation reaches size nu^theta:

    exp(sigma0 T) / (1 + T)^(1/4) = nu^(theta - N).

The gamma = 1/2 case is out of scope (no single viscosity-independent
shear flow exists there after rescaling); gamma = 3/4 sits on the
regime boundary where the wall condition is Robin and the first branch
inequality for n is vacuous (handled by a documented fall-through).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from scipy import optimize

from . import robin_heat
from .rayleigh import RayleighMode

Rational = Union[int, float, Fraction, str]

ONE_QUARTER = Fraction(1, 4)
ONE_HALF = Fraction(1, 2)
THREE_QUARTERS = Fraction(3, 4)


class OutOfScopeError(ValueError):
    """gamma = 1/2 is handled by a separate argument; not covered here."""


class BoundaryRegime(enum.Enum):
    DIRICHLET = "dirichlet"       # gamma > 3/4: wall value -u_I
    ROBIN = "robin"               # gamma = 3/4: d_Y u - u = trace
    NEUMANN_MID = "neumann_mid"   # 1/2 < gamma < 3/4: d_Y u = u_I
    NEUMANN_LOW = "neumann_low"   # gamma < 1/2: d_Y u = -d_y u_I


def as_fraction(g: Rational) -> Fraction:
    """Exact rational from int/Fraction/str; floats via their repr."""
    if isinstance(g, Fraction):
        return g
    if isinstance(g, int):
        return Fraction(g)
    if isinstance(g, str):
        return Fraction(g)
    return Fraction(repr(float(g)))


def theta_of_gamma(gamma: Rational) -> Fraction:
    """Instability order: 1/4 above 3/4, gamma - 1/2 between, 0 below."""
    g = as_fraction(gamma)
    if g >= THREE_QUARTERS:
        return ONE_QUARTER
    if g > ONE_HALF:
        return g - ONE_HALF
    return Fraction(0)


def amplitude_a(gamma: Rational) -> Fraction:
    """Boundary-layer amplitude exponent; a + theta = 1/4 identically."""
    g = as_fraction(gamma)
    if g >= THREE_QUARTERS:
        a = Fraction(0)
    elif g > ONE_HALF:
        a = THREE_QUARTERS - g
    else:
        a = ONE_QUARTER
    assert a + theta_of_gamma(g) == ONE_QUARTER
    return a


def choose_n(gamma: Rational) -> int:
    """Minimal n >= 2 with 2^-n below the regime's order gap.

    gamma = 3/4 makes that gap zero; the middle-branch value n = 2 is
    used there (the Robin regime has no wall-condition remainder, so n
    only sets the ladder granularity).
    """
    g = as_fraction(gamma)
    if g == ONE_HALF:
        raise OutOfScopeError("gamma = 1/2 is out of scope")
    if g == THREE_QUARTERS:
        return 2
    if g > THREE_QUARTERS:
        bound = g - THREE_QUARTERS
    elif g > ONE_HALF:
        bound = g - ONE_HALF
    else:
        bound = (ONE_HALF - g) / 2
    n = 2
    while Fraction(1, 2 ** n) > bound:
        n += 1
        if n > 60:
            raise ValueError("gamma too close to a regime boundary")
    return n


def bc_regime(gamma: Rational) -> BoundaryRegime:
    g = as_fraction(gamma)
    if g == ONE_HALF:
        raise OutOfScopeError("gamma = 1/2 is out of scope")
    if g > THREE_QUARTERS:
        return BoundaryRegime.DIRICHLET
    if g == THREE_QUARTERS:
        return BoundaryRegime.ROBIN
    if g > ONE_HALF:
        return BoundaryRegime.NEUMANN_MID
    return BoundaryRegime.NEUMANN_LOW


@dataclass
class ExpansionPlan:
    gamma: Fraction
    N: int
    M: int
    n: int
    theta: Fraction
    amplitude_a: Fraction
    regime: BoundaryRegime
    k_table: list                 # k_j = 1 + j/(2^n N), j = 0..M
    remainder_orders: dict
    p_order: Fraction             # P = 1 + (M+1)/(2^n N)
    notes: list = field(default_factory=list)

    def k(self, j: int) -> Fraction:
        return 1 + Fraction(j, 2 ** self.n * self.N)


def build_plan(gamma: Rational, N: int, M: int) -> ExpansionPlan:
    """Assemble the full exponent table for an (N, M) expansion.

    remainder_orders records, as exact rationals (exponents of nu):
      * interior and boundary cascade remainders at N + (M+1) 2^-n
        relative to their prefactors,
      * the wall-condition remainder r1: the per-regime printed
        exponent (None for Robin, which is exact) plus the composed
        total N + a + printed (an interpretation, flagged in notes),
      * the normal-velocity remainder r2 at N + a + 1/4 - 2^-n + M 2^-n.
    """
    g = as_fraction(gamma)
    if N < 1:
        raise ValueError("N must be >= 1")
    if M < 0:
        raise ValueError("M must be >= 0")
    n = choose_n(g)
    th = theta_of_gamma(g)
    a = amplitude_a(g)
    regime = bc_regime(g)
    notes = []
    if g == THREE_QUARTERS:
        notes.append("gamma = 3/4: first n-branch vacuous; middle-branch "
                     "n = 2 used (no wall remainder in the Robin regime)")

    two_n = Fraction(1, 2 ** n)
    k_table = [1 + Fraction(j, 2 ** n * N) for j in range(M + 1)]

    cascade = N + (M + 1) * two_n
    if regime is BoundaryRegime.DIRICHLET:
        r1_printed = g - THREE_QUARTERS - two_n + M * two_n
    elif regime is BoundaryRegime.ROBIN:
        r1_printed = None
    else:
        r1_printed = THREE_QUARTERS - g - two_n + M * two_n
    r1_total = None if r1_printed is None else N + a + r1_printed
    if r1_printed is not None:
        notes.append("r1 composed total assumes the printed exponent "
                     "multiplies the O(nu^(N+a)) layer term; it is then "
                     "at least N + (M+1) 2^-n")
    r2_order = N + a + ONE_QUARTER - two_n + M * two_n

    orders = {
        "interior_remainder": cascade,
        "boundary_remainder": cascade,
        "r1_printed": r1_printed,
        "r1_total": r1_total,
        "r2": r2_order,
    }
    p_order = 1 + Fraction(M + 1, 2 ** n * N)
    return ExpansionPlan(gamma=g, N=N, M=M, n=n, theta=th, amplitude_a=a,
                         regime=regime, k_table=k_table,
                         remainder_orders=orders, p_order=p_order,
                         notes=notes)


# ----------------------------------------------------------------------
# Instability time
# ----------------------------------------------------------------------

@dataclass
class InstabilityTime:
    t_threshold: float      # solves exp(s0 T)/(1+T)^(1/4) = nu^(theta-N)
    t_final: float          # t_threshold - tau
    sqrt_nu_t: float        # sqrt(nu) * t_final (original-variable time)
    residual: float         # relative defect of the defining equation


def instability_time(nu: float, theta: Rational, N: int, sigma0: float,
                     tau: float = 0.0) -> InstabilityTime:
    """Time for a nu^N-size perturbation to reach size nu^theta."""
    if not (0 < nu <= 1):
        raise ValueError("need 0 < nu <= 1")
    if sigma0 <= 0:
        raise ValueError("need sigma0 > 0")
    th = float(as_fraction(theta))
    if th - N >= 0:
        raise ValueError("need theta - N < 0")
    target = (th - N) * np.log(nu)     # >= 0

    def gap(T):
        return sigma0 * T - 0.25 * np.log1p(T) - target

    if target == 0.0:
        t_star = 0.0
    else:
        hi = (N - th) * abs(np.log(nu)) / sigma0 + 10.0
        t_star = float(optimize.brentq(gap, 0.0, hi, xtol=1e-14,
                                       rtol=8.9e-16))
    t_final = t_star - tau
    if t_final <= 0 and tau > 0:
        raise ValueError(f"tau = {tau} exceeds the threshold time {t_star}")
    lhs = sigma0 * t_star - 0.25 * np.log1p(t_star)
    resid = abs(np.expm1(lhs - target))
    return InstabilityTime(t_threshold=t_star, t_final=t_final,
                           sqrt_nu_t=float(np.sqrt(nu) * t_final),
                           residual=float(resid))


# ----------------------------------------------------------------------
# Leading boundary-layer corrector
# ----------------------------------------------------------------------

@dataclass
class CorrectorField:
    regime: BoundaryRegime
    time: float
    y_grid: np.ndarray
    u_b: np.ndarray               # complex tangential corrector
    v_b: np.ndarray               # recovered normal component
    wall_trace: complex           # modal wall data it must cancel/match
    wall_value: complex           # u_b at the wall
    decay_rate: float             # fitted exponential decay in Y
    v_far_residual: float         # |v_b| at the far end (must -> 0)


def leading_corrector(mode: RayleighMode, gamma: Rational, t: float,
                      y_grid: Optional[np.ndarray] = None) -> CorrectorField:
    """Leading-order tangential corrector for the mode's wall trace.

    Per regime the corrector solves the flat heat equation in the layer
    variable with wall data built from the mode (limit form, viscosity
    factors dropped): Dirichlet takes u_b(t, 0) = -trace, the Neumann
    regimes take the flux, Robin takes d_Y u_b - u_b = trace.  The
    normal component is recovered from incompressibility,
    v_b = -ik int_Y^inf u_b.
    """
    regime = bc_regime(gamma)
    if y_grid is None:
        y_grid = np.linspace(0.0, 25.0, 401)
    y_grid = np.asarray(y_grid, dtype=float)
    k = mode.wavenumber
    lam = -1j * k * mode.phase_speed
    du0 = mode.eigenfunction_derivative[0]     # u_I modal wall amplitude

    if regime is BoundaryRegime.DIRICHLET:
        trace = du0
        f = lambda s: -du0 * np.exp(lam * s)
        u_b = robin_heat.dirichlet_boundary_field(f, t, y_grid)
    elif regime is BoundaryRegime.NEUMANN_MID:
        trace = du0
        gfun = lambda s: du0 * np.exp(lam * s)
        u_b = robin_heat.neumann_boundary_field(gfun, t, y_grid)
    elif regime is BoundaryRegime.NEUMANN_LOW:
        # wall flux is -d_y u_I; for wall-flat profiles the modal trace
        # of d_y u_I is phi''(0) = k^2 phi(0), essentially zero
        phi0 = mode.eigenfunction[0]
        trace = -(k * k) * phi0
        gfun = lambda s: trace * np.exp(lam * s)
        u_b = robin_heat.neumann_boundary_field(gfun, t, y_grid)
    else:                                       # ROBIN
        trace = du0

        def h(s):
            # solves h' = h + g with g the modal trace (exact integral)
            return trace * (np.exp(lam * s) - np.exp(s)) / (lam - 1.0)

        dy = 1e-4
        vals = robin_heat.dirichlet_boundary_field(h, t, y_grid)
        plus = robin_heat.dirichlet_boundary_field(h, t, y_grid + dy)
        minus = robin_heat.dirichlet_boundary_field(
            h, t, np.maximum(y_grid - dy, 0.0))
        dvdy = (plus - minus) / (2.0 * dy)
        wall = y_grid < dy      # one-sided at the wall (overrides above)
        if wall.any():
            plus2 = robin_heat.dirichlet_boundary_field(
                h, t, y_grid[wall] + 2 * dy)
            dvdy[wall] = (-3.0 * vals[wall] + 4.0 * plus[wall]
                          - plus2) / (2.0 * dy)
        u_b = dvdy + vals

    # normal component from incompressibility, integrated from far out
    rev = u_b[::-1]
    dy_grid = np.diff(y_grid[::-1]) * -1.0
    acc = np.concatenate([[0.0 + 0.0j],
                          np.cumsum(0.5 * (rev[1:] + rev[:-1]) * dy_grid)])
    v_b = -1j * k * acc[::-1]

    # exponential decay fit on the tail half
    mag = np.abs(u_b)
    sel = (y_grid > 0.2 * y_grid[-1]) & (mag > 1e-14 * mag.max())
    if np.count_nonzero(sel) >= 4:
        coef = np.polyfit(y_grid[sel], np.log(mag[sel]), 1)
        mu = -float(coef[0])
    else:
        mu = float("nan")
    # the recovery integral starts at the far end, so v_b(inf) = 0 holds
    # by construction; the honest residual is the neglected tail mass
    tail = abs(k) * mag[-1] / mu if np.isfinite(mu) and mu > 0 \
        else abs(k) * mag[-1]
    return CorrectorField(regime=regime, time=float(t), y_grid=y_grid,
                          u_b=np.asarray(u_b), v_b=v_b,
                          wall_trace=complex(trace * np.exp(lam * t)),
                          wall_value=complex(u_b[0]),
                          decay_rate=mu,
                          v_far_residual=float(tail))


# ----------------------------------------------------------------------
# Uniformity sweeps for the rescaled shear evolution
# ----------------------------------------------------------------------

@dataclass
class SweepResult:
    nu_values: np.ndarray
    sup_ratios: np.ndarray
    slope: float
    pass_flat: bool


def usbound_sweep(profile, gamma: Rational, nu_values=None,
                  t_rescaled=(0.5, 2.0),
                  t_fixed=(0.05, 0.2, 0.8, 2.0),
                  slope_tol: float = 0.05) -> SweepResult:
    """Uniformity of (u^nu - u^limit)/nu^|gamma - 1/2| over the sweep.

    u^nu evolves the profile with wall coefficient a = nu^(1/2-gamma);
    the limit is the Dirichlet evolution for gamma > 1/2 and the
    Neumann one below.  The claim is uniform over all times, so the
    samples combine layer times sqrt(nu) * t_rescaled with fixed
    physical times (where the sup actually sits).  The sup, divided by
    the predicted rate, should show no trend in nu (fitted log-log
    slope within slope_tol of zero).
    """
    g = as_fraction(gamma)
    if g == ONE_HALF:
        raise OutOfScopeError("gamma = 1/2 is out of scope")
    if nu_values is None:
        nu_values = np.geomspace(1e-2, 1e-5, 4)
    nu_values = np.asarray(sorted(nu_values, reverse=True), dtype=float)
    rate = abs(float(g - ONE_HALF))
    limit_a = robin_heat.INF if g > ONE_HALF else 0.0
    grid = robin_heat.default_grid(20.0)

    sups = []
    for nu in nu_values:
        a = nu ** float(ONE_HALF - g)
        worst = 0.0
        times = sorted(set(float(np.sqrt(nu)) * np.asarray(t_rescaled))
                       | set(t_fixed))
        for t_phys in times:
            ua = robin_heat.solve_robin(profile, a, t_phys, grid).values
            ul = robin_heat.solve_robin(profile, limit_a, t_phys,
                                        grid).values
            worst = max(worst, float(np.max(np.abs(ua - ul))))
        sups.append(worst / nu ** rate)
    sups = np.asarray(sups)
    lx = np.log(nu_values)
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, np.log(sups), rcond=None)
    slope = float(coef[0])
    return SweepResult(nu_values=nu_values, sup_ratios=sups, slope=slope,
                       pass_flat=bool(abs(slope) <= slope_tol))


def layer_growth_check(profile, gamma: Rational, nu_values=None,
                       y_scale_points=(0.0, 1.0, 2.0, 4.0, 8.0),
                       t_rescaled=(0.5, 2.0), slope_tol: float = 0.05):
    """Pointwise layer bound: |u^nu(sqrt(nu) t, nu^(1/4) Y)| / nu^(2^-n)
    stays below a line C1 Y + C2 uniformly in nu.

    Returns the per-nu sup of the ratio value/(1 + Y) and its log-log
    trend against nu (flat means the bound is uniform).
    """
    g = as_fraction(gamma)
    n = choose_n(g)
    scale = Fraction(1, 2 ** n)
    if nu_values is None:
        nu_values = np.geomspace(1e-2, 1e-5, 4)
    nu_values = np.asarray(sorted(nu_values, reverse=True), dtype=float)
    ys = np.asarray(y_scale_points, dtype=float)
    sups = []
    for nu in nu_values:
        a = nu ** float(ONE_HALF - g)
        worst = 0.0
        for tr in t_rescaled:
            t_phys = np.sqrt(nu) * tr
            grid = np.unique(nu ** 0.25 * ys)
            fld = robin_heat.solve_robin(profile, a, t_phys,
                                         np.union1d(grid,
                                                    np.linspace(0, 1, 8)))
            vals = np.interp(nu ** 0.25 * ys, fld.grid, fld.values)
            ratio = np.abs(vals) / nu ** float(scale) / (1.0 + ys)
            worst = max(worst, float(np.max(ratio)))
        sups.append(worst)
    sups = np.asarray(sups)
    lx = np.log(nu_values)
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, np.log(sups), rcond=None)
    slope = float(coef[0])
    return SweepResult(nu_values=nu_values, sup_ratios=sups, slope=slope,
                       pass_flat=bool(abs(slope) <= slope_tol))
