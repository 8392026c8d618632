"""Acceptance criteria for the whole laboratory.

Each criterion is a callable returning a CriterionResult; the registry
at the bottom drives both the pytest acceptance module and the CLI
runner.  Heavy shared state (the Gevrey dispersion scan) is cached on
the context object.

Two sub-checks are implemented faithfully but are documented as
mathematically unattainable as stated (see the result's
known_deviation flag and note):

* the Robin->Neumann distance for raw exp(-y) data equals
  sqrt(2a/(1+a)) exactly, which is 4.7% below the asymptotic sqrt(2a)
  at a = 0.1 (the 1% tolerance holds only for the two smaller a);
* the wave-packet envelope exponents emerge on the time scale set by
  1/sigma0 ~ 29, so the fixed window [10, 30] is pre-asymptotic; the
  law is verified on the scaled window [7, 21]/sigma0 instead.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import certificate as cert
from . import planner
from . import profiles as prof
from . import rayleigh
from . import robin_heat as heat


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    runtime: float
    details: dict = field(default_factory=dict)
    known_deviation: bool = False
    note: str = ""

    @property
    def status(self) -> str:
        if self.passed:
            return "PASS"
        return "XFAIL (documented)" if self.known_deviation else "FAIL"

    def line(self) -> str:
        return f"[{self.cid:2d}] {self.status:<19s} {self.title}"


class AcceptanceContext:
    """Caches the expensive shared artifacts across criteria."""

    def __init__(self):
        self._t0 = time.time()

    @cached_property
    def gevrey(self):
        return prof.make_gevrey_profile(2.0)

    @cached_property
    def raw_exp(self):
        return prof.make_exponential_profile(1.0)

    @cached_property
    def curve(self):
        return rayleigh.scan_sigma(self.gevrey)

    @cached_property
    def peak_mode(self):
        i0 = int(np.argmax(self.curve.sigma_values))
        return self.curve.modes[i0]


def _timed(fn):
    def wrapper(ctx):
        t0 = time.time()
        res = fn(ctx)
        res.runtime = time.time() - t0
        return res
    wrapper.__name__ = fn.__name__
    return wrapper


@_timed
def criterion_1_robin_dirichlet_rate(ctx) -> CriterionResult:
    a_vals = np.geomspace(10.0, 1e4, 7)
    res = heat.rate_experiment(ctx.gevrey, a_vals, norm="linf",
                               limit="to_infinity", t=0.0)
    ok = abs(res.slope - (-1.0)) <= 0.1
    return CriterionResult(1, "Robin->Dirichlet extension rate "
                           "(L-inf slope -1 +- 0.1)", ok, 0.0,
                           {"slope": res.slope, "r2": res.r2})


@_timed
def criterion_2_neumann_sqrt2a(ctx) -> CriterionResult:
    details = {}
    ok_small = True
    for a in (1e-3, 1e-2):
        d = heat.extension_distance(ctx.raw_exp, a, "to_zero", "l2", 0)
        rel = abs(d - np.sqrt(2 * a)) / np.sqrt(2 * a)
        details[f"rel_err(a={a:g})"] = rel
        ok_small = ok_small and rel < 0.01
    a = 1e-1
    d = heat.extension_distance(ctx.raw_exp, a, "to_zero", "l2", 0)
    rel = abs(d - np.sqrt(2 * a)) / np.sqrt(2 * a)
    details["rel_err(a=0.1)"] = rel
    details["exact_form_rel_err(a=0.1)"] = \
        abs(d - np.sqrt(2 * a / (1 + a))) / np.sqrt(2 * a / (1 + a))
    ok_large = rel < 0.01
    passed = ok_small and ok_large
    return CriterionResult(
        2, "Robin->Neumann optimal L2 distance sqrt(2a) (rel < 1%)",
        passed, 0.0, details,
        known_deviation=(ok_small and not ok_large),
        note="exact distance is sqrt(2a/(1+a)); the sqrt(2a) target is "
             "its small-a asymptote and sits 4.7% high at a = 0.1")


@_timed
def criterion_3_erf_reference(ctx) -> CriterionResult:
    from scipy.special import erf, erfc
    stub = prof.make_constant_profile(1.0)
    worst = 0.0
    ys = np.array([0.0, 0.5, 1.0, 2.0])
    for alpha in (0.5, 1.0):
        for t in (0.5, 1.0):
            fld = heat.solve_robin(stub, alpha, t, grid=ys,
                                   allow_nonflat=True)
            exact = erf(ys / (2 * np.sqrt(t))) \
                + np.exp(alpha * (alpha * t + ys)) \
                * erfc((2 * alpha * t + ys) / (2 * np.sqrt(t)))
            worst = max(worst, float(np.max(np.abs(fld.values - exact))))
    return CriterionResult(3, "erf/erfc closed-form reference (1e-6)",
                           worst <= 1e-6, 0.0, {"max_abs_err": worst})


@_timed
def criterion_4_bc_residual(ctx) -> CriterionResult:
    worst = 0.0
    details = {}
    for a in (0.5, 1.0, 2.0):
        for t in (0.1, 1.0):
            fld = heat.solve_robin(ctx.gevrey, a, t)
            r = heat.bc_residual(fld) / (1.0 + abs(float(fld.values[0])))
            details[f"res(a={a:g},t={t:g})"] = r
            worst = max(worst, r)
    return CriterionResult(4, "Robin wall residual < 1e-6", worst < 1e-6,
                           0.0, details)


@_timed
def criterion_5_certificate(ctx) -> CriterionResult:
    c = cert.certify(ctx.gevrey)
    qp_exact = 16.0 * np.exp(-4.0)
    rel_qp = abs(c.q_prime_at_y0 - qp_exact) / qp_exact
    ok = (abs(c.q_at_y0) <= 1e-6 and rel_qp <= 1e-3
          and 0 < c.eta0 < c.y0 and c.q_value < 0 and c.min_eig < 0)
    return CriterionResult(
        5, "variational certificate (Q(y0)=0, Q'(y0)=16e^-4, Q(eta0)<0, "
           "negative eigenvalue)", ok, 0.0,
        {"q_at_y0": c.q_at_y0, "q_prime_rel_err": rel_qp,
         "eta0": c.eta0, "q_value": c.q_value, "min_eig": c.min_eig,
         "cutoff_n": c.n})


@_timed
def criterion_6_spectral_crosscheck(ctx) -> CriterionResult:
    curve = ctx.curve
    sigma0 = curve.sigma0
    details = {"k0": curve.k0, "sigma0": sigma0}
    ok = sigma0 > 0
    sig = curve.sigma_values
    details["sigma_left_end_frac"] = sig[0] / sigma0
    details["sigma_right_end_frac"] = sig[-1] / sigma0
    ok = ok and sig[-1] <= 0.05 * sigma0
    ok = ok and sig[0] <= 0.2 * sigma0 and sig[0] < sig[1] < sig[2]

    worst_colloc = 0.0
    all_semi = True
    worst_resid = 0.0
    for m in curve.modes:
        if m is None:
            continue
        all_semi = all_semi and rayleigh.semicircle_check(m, ctx.gevrey)
        worst_colloc = max(worst_colloc,
                           rayleigh.collocation_residual(m, ctx.gevrey))
        worst_resid = max(worst_resid, m.residual)
    details["worst_collocation"] = worst_colloc
    details["worst_residual"] = worst_resid
    details["all_semicircle"] = all_semi
    ok = ok and all_semi and worst_colloc < 1e-6 and worst_resid < 1e-10

    slope = rayleigh.growth_oracle(ctx.gevrey, curve.k0,
                                   sigma_expected=sigma0)
    details["oracle_slope"] = slope
    details["oracle_rel_err"] = abs(slope - sigma0) / sigma0
    ok = ok and abs(slope - sigma0) / sigma0 < 0.05
    return CriterionResult(6, "dispersion scan + time-stepping oracle "
                           "(5%) + semicircle + collocation", ok, 0.0,
                           details)


def _wavepacket_fit(ctx, lo, hi):
    curve = ctx.curve
    band = curve.sigma_values > 0
    kk = curve.k_values[band]
    ss = curve.sigma_values[band]
    ww = np.array([np.trapezoid(np.abs(m.eigenfunction) ** 2, m.y_grid)
                   for m, b in zip(curve.modes, band) if b])
    t_grid = np.linspace(lo, hi, 61)
    log_n = rayleigh.wavepacket_norm_history(kk, ss, ww, t_grid)
    return rayleigh.fit_envelope_exponents(t_grid, log_n)


@_timed
def criterion_7_wavepacket_envelope(ctx) -> CriterionResult:
    sigma0 = ctx.curve.sigma0
    s_lit, p_lit = _wavepacket_fit(ctx, 10.0, 30.0)
    lo, hi = 7.0 / sigma0, 21.0 / sigma0
    s_scl, p_scl = _wavepacket_fit(ctx, lo, hi)
    lit_ok = abs(s_lit - sigma0) / sigma0 <= 0.03 \
        and abs(p_lit - 0.25) <= 0.1
    scl_ok = abs(s_scl - sigma0) / sigma0 <= 0.03 \
        and abs(p_scl - 0.25) <= 0.1
    details = {
        "sigma_fit[10,30]": s_lit, "power_fit[10,30]": p_lit,
        f"sigma_fit[{lo:.0f},{hi:.0f}]": s_scl,
        f"power_fit[{lo:.0f},{hi:.0f}]": p_scl,
    }
    return CriterionResult(
        7, "wave-packet envelope exp(s0 t)/(1+t)^(1/4) "
           "(rate 3%, power 0.25 +- 0.1)",
        lit_ok, 0.0, details,
        known_deviation=(scl_ok and not lit_ok),
        note="the peak curvature gives sigma0 ~ 0.034, so the asymptotic "
             "window starts near t ~ 7/sigma0 ~ 200; [10, 30] is "
             "pre-asymptotic for this profile and the fit is run on the "
             "scaled window as well")


@_timed
def criterion_8_exponent_table(ctx) -> CriterionResult:
    F = Fraction
    expected_theta = {
        "0": F(0), "0.3": F(0), "0.5": F(0), "0.6": F(1, 10),
        "0.7": F(1, 5), "0.75": F(1, 4), "1": F(1, 4), "2": F(1, 4)}
    ok = True
    for g, th in expected_theta.items():
        ok = ok and planner.theta_of_gamma(g) == th
        ok = ok and planner.amplitude_a(g) + th == F(1, 4)
    # continuity at the knots (exact limits from both sides)
    eps = F(1, 10 ** 9)
    ok = ok and planner.theta_of_gamma(F(1, 2) - eps) == 0
    ok = ok and planner.theta_of_gamma(F(1, 2) + eps) == eps
    ok = ok and planner.theta_of_gamma(F(3, 4) - eps) == F(1, 4) - eps
    ok = ok and planner.theta_of_gamma(F(3, 4)) == F(1, 4)
    plan = planner.build_plan("1", 1, 3)
    k = plan.k
    add_ok = all(k(j1) + k(j2) == k(j1 + j2 + 2 ** plan.n * plan.N)
                 for j1 in range(4) for j2 in range(4))
    ok = ok and add_ok and plan.k_table == [F(1), F(5, 4), F(3, 2), F(7, 4)]
    return CriterionResult(8, "exponent table exact (theta, a, k_j "
                           "additivity)", ok, 0.0,
                           {"k_table": [str(x) for x in plan.k_table],
                            "additivity": add_ok})


@_timed
def criterion_9_instability_time(ctx) -> CriterionResult:
    it = planner.instability_time(1e-4, Fraction(1, 4), 1, 1.0)

    # independent bracketed bisection oracle
    target = (0.25 - 1.0) * np.log(1e-4)
    lo, hi = 0.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - 0.25 * np.log1p(mid) - target > 0:
            hi = mid
        else:
            lo = mid
    t_oracle = 0.5 * (lo + hi)
    details = {"T": it.t_threshold, "T_bisect": t_oracle,
               "residual": it.residual}
    ok = (abs(it.t_threshold - t_oracle) < 1e-8
          and abs(it.t_threshold - 7.44) <= 0.01
          and it.residual < 1e-12)
    sq = [planner.instability_time(10.0 ** (-e), Fraction(1, 4), 1,
                                   1.0).sqrt_nu_t
          for e in (2, 4, 6, 8)]
    details["sqrt_nu_T"] = sq
    ok = ok and all(a > b for a, b in zip(sq, sq[1:])) and sq[-1] < 0.01
    return CriterionResult(9, "instability time (bisection oracle, "
                           "1e-12 residual, sqrt(nu) T decay)", ok, 0.0,
                           details)


@_timed
def criterion_10_usbound_sweep(ctx) -> CriterionResult:
    sw = planner.usbound_sweep(ctx.gevrey, "1")
    return CriterionResult(10, "rescaled shear-flow uniformity sweep "
                           "(log-slope within 0.05)", sw.pass_flat, 0.0,
                           {"ratios": sw.sup_ratios.tolist(),
                            "slope": sw.slope})


@_timed
def criterion_11_gronwall_asympt(ctx) -> CriterionResult:
    ratio = heat.integral_envelope_ratio(1.0, 0.25, 30.0)
    ok = abs(ratio - 1.0) <= 0.05
    return CriterionResult(11, "comparison-integral constant -> 1/alpha "
                           "(5% at t=30)", ok, 0.0, {"ratio": ratio})


@_timed
def criterion_12_leading_corrector(ctx) -> CriterionResult:
    mode = ctx.peak_mode
    details = {}
    ok = True
    for t in (1.0, 3.0, 5.0):
        c = planner.leading_corrector(mode, "1", t)
        cancel = abs(c.wall_value + c.wall_trace) \
            / max(1.0, abs(c.wall_trace))
        details[f"cancel(t={t:g})"] = cancel
        details[f"mu(t={t:g})"] = c.decay_rate
        ok = ok and cancel <= 1e-5 and c.decay_rate > 0
    return CriterionResult(12, "Dirichlet-regime corrector wall "
                           "cancellation (1e-5) and decay", ok, 0.0,
                           details)


CRITERIA = [
    criterion_1_robin_dirichlet_rate,
    criterion_2_neumann_sqrt2a,
    criterion_3_erf_reference,
    criterion_4_bc_residual,
    criterion_5_certificate,
    criterion_6_spectral_crosscheck,
    criterion_7_wavepacket_envelope,
    criterion_8_exponent_table,
    criterion_9_instability_time,
    criterion_10_usbound_sweep,
    criterion_11_gronwall_asympt,
    criterion_12_leading_corrector,
]


def run_all(ctx: AcceptanceContext = None, echo=print):
    """Evaluate every criterion; returns the list of results."""
    if ctx is None:
        ctx = AcceptanceContext()
    results = []
    for fn in CRITERIA:
        res = fn(ctx)
        results.append(res)
        if echo is not None:
            echo(res.line())
            if res.note:
                echo(f"     note: {res.note}")
    return results
