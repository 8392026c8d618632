"""Command-line front end.

    shearlab <experiment> [--key value ...] [--config FILE]
             [--out DIR] [--seed INT]
    shearlab acceptance [--out DIR]

Each experiment writes CSV artifacts (comma-separated, '.' decimal, LF,
UTF-8) plus a gnuplot script next to each CSV, and prints a one-line
report.  Config files are flat `key = value` text; command-line pairs
override them.  Exit codes: 0 pass, 1 numerical failure, 2 config
error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import acceptance
from . import certificate as cert
from . import planner
from . import profiles as prof
from . import rayleigh
from . import robin_heat as heat


class ConfigError(ValueError):
    pass


@dataclass
class RunReport:
    experiment: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    wall_time: float = 0.0

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        bits = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"{self.experiment}: {status} ({self.wall_time:.1f}s) {bits}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_csv_cell(x) for x in row) + "\n")
    _write_plot_script(path, header)
    return path


def _csv_cell(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_plot_script(csv_path, header):
    base = os.path.splitext(csv_path)[0]
    name = os.path.basename(csv_path)
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set grid",
        f"set title '{os.path.basename(base)}'",
    ]
    if len(header) >= 2:
        lines.append(f"plot '{name}' using 1:2 with linespoints")
    with open(base + ".gnuplot", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _make_profile(params):
    name = params.get("profile", "gevrey")
    if name == "gevrey":
        return prof.make_gevrey_profile(params.get("rho", 2.0))
    if name == "two_inflection":
        return prof.make_two_inflection_profile(
            params.get("y1", 1.0), params.get("y2", 3.0),
            params.get("amplitude", 1.0))
    if name == "exp_cutoff":
        return prof.make_exponential_profile(params.get("rate", 1.0),
                                             flat_cutoff=True)
    if name == "exp_raw":
        return prof.make_exponential_profile(params.get("rate", 1.0))
    raise ConfigError(f"unknown profile {name!r}")


# ----------------------------------------------------------------------
# Experiments
# ----------------------------------------------------------------------
# schema: key -> (parser, default, help)

def _floats(s):
    return [float(x) for x in str(s).split(",") if x != ""]


PROFILE_KEYS = {
    "profile": (str, "gevrey", "gevrey | two_inflection | exp_cutoff | "
                               "exp_raw"),
    "rho": (float, 2.0, "Gevrey index"),
    "y1": (float, 1.0, "first inflection target"),
    "y2": (float, 3.0, "second inflection target"),
    "amplitude": (float, 1.0, "two-inflection peak height"),
    "rate": (float, 1.0, "exponential decay rate"),
}


def run_robin_rates(params, outdir, seed):
    u0 = _make_profile(params)
    limit = params["limit"]
    a_vals = np.geomspace(params["a_min"], params["a_max"],
                          int(params["n_points"]))
    res = heat.rate_experiment(u0, a_vals, norm=params["norm"],
                               limit=limit, t=params["t"],
                               k=int(params["k"]))
    rows = [(a, v, params["norm"], params["t"])
            for a, v in zip(res.a_values, res.norm_values)]
    art1 = _write_csv(os.path.join(outdir, "rates.csv"),
                      ["a", "norm_value", "norm_kind", "t"], rows)
    expected = params["expected_slope"]
    tol = params["slope_tol"]
    passed = res.slope is not None and abs(res.slope - expected) <= tol
    art2 = _write_csv(
        os.path.join(outdir, "slope_summary.csv"),
        ["experiment", "slope", "intercept", "r2", "expected_slope",
         "tolerance", "pass"],
        [("robin-rates", res.slope, res.intercept, res.r2, expected, tol,
          passed)])
    return RunReport("robin-rates", passed,
                     {"slope": res.slope, "expected": expected},
                     [art1, art2])


RATE_KEYS = dict(PROFILE_KEYS, **{
    "limit": (str, "to_infinity", "to_infinity | to_zero"),
    "norm": (str, "linf", "linf | l1 | l2"),
    "k": (int, 0, "derivative order"),
    "t": (float, 0.0, "compare evolved fields at this time (0: data)"),
    "a_min": (float, 10.0, "smallest coefficient"),
    "a_max": (float, 1e4, "largest coefficient"),
    "n_points": (int, 7, "geometric samples"),
    "expected_slope": (float, -1.0, "target log-log slope"),
    "slope_tol": (float, 0.1, "slope tolerance"),
})


def run_erf_reference(params, outdir, seed):
    from scipy.special import erf, erfc
    stub = prof.make_constant_profile(1.0)
    ys = np.asarray(_floats(params["ys"]))
    rows = []
    worst = 0.0
    for alpha in _floats(params["alphas"]):
        for t in _floats(params["times"]):
            fld = heat.solve_robin(stub, alpha, t, grid=ys,
                                   allow_nonflat=True)
            exact = erf(ys / (2 * np.sqrt(t))) \
                + np.exp(alpha * (alpha * t + ys)) \
                * erfc((2 * alpha * t + ys) / (2 * np.sqrt(t)))
            for y, num, ex in zip(ys, fld.values, exact):
                rows.append((alpha, t, y, num, ex, abs(num - ex)))
                worst = max(worst, abs(num - ex))
    art = _write_csv(os.path.join(outdir, "erf_reference.csv"),
                     ["alpha", "t", "y", "numeric", "exact", "abs_err"],
                     rows)
    passed = worst <= params["tol"]
    return RunReport("erf-reference", passed, {"max_abs_err": worst}, [art])


ERF_KEYS = {
    "alphas": (str, "0.5,1.0", "wall coefficients"),
    "times": (str, "0.5,1.0", "evaluation times"),
    "ys": (str, "0,0.5,1,2", "evaluation heights"),
    "tol": (float, 1e-6, "pointwise tolerance"),
}


def run_envelope(params, outdir, seed):
    u0 = _make_profile(params)
    a = params["a"]
    alpha, beta = params["alpha"], params["beta"]
    ts = np.linspace(params["t_min"], params["t_max"], int(params["n_t"]))
    norms = []
    for t in ts:
        fld = heat.solve_robin(u0, a if a >= 0 else heat.INF, t)
        norms.append(np.sqrt(np.trapezoid(fld.values ** 2, fld.grid)))
    norms = np.asarray(norms)
    env = heat.Envelope(alpha=alpha, beta=beta, constant=1.0)
    log_ratio = np.log(norms) - env.log_value(ts)
    c_fit = float(np.exp(np.max(log_ratio)))
    env_f = heat.Envelope(alpha=alpha, beta=beta, constant=c_fit)
    ok, worst = heat.envelope_check(ts, norms, env_f)
    rows = list(zip(ts, norms, env_f(ts)))
    art = _write_csv(os.path.join(outdir, "envelope.csv"),
                     ["t", "l2_norm", "envelope"], rows)
    return RunReport("envelope", bool(ok),
                     {"fitted_constant": c_fit, "worst_ratio": worst},
                     [art])


ENVELOPE_KEYS = dict(PROFILE_KEYS, **{
    "a": (float, 1.0, "wall coefficient (-1 for Dirichlet)"),
    "alpha": (float, 0.5, "envelope exponential rate"),
    "beta": (float, 0.0, "envelope algebraic power"),
    "t_min": (float, 0.1, ""),
    "t_max": (float, 3.0, ""),
    "n_t": (int, 8, "number of sample times"),
})


def run_gronwall(params, outdir, seed):
    lam, alpha, beta = params["lam"], params["alpha"], params["beta"]
    env = heat.gronwall_bound(lam, alpha, beta, params["c"],
                              params["phi0"])
    ts = np.linspace(1.0, 30.0, 30)
    rows = [(t, heat.integral_envelope_ratio(alpha, beta, t)) for t in ts]
    art = _write_csv(os.path.join(outdir, "asympt_ratio.csv"),
                     ["t", "integral_to_envelope_ratio"], rows)
    final = rows[-1][1]
    passed = abs(final * alpha - 1.0) <= 0.05
    return RunReport("gronwall", passed,
                     {"envelope_constant": env.constant,
                      "final_ratio_times_alpha": final * alpha}, [art])


GRONWALL_KEYS = {
    "lam": (float, 0.5, "linear growth coefficient"),
    "alpha": (float, 1.0, "forcing exponential rate"),
    "beta": (float, 0.25, "forcing algebraic power"),
    "c": (float, 1.0, "forcing constant"),
    "phi0": (float, 0.0, "initial value"),
}


def run_profile_check(params, outdir, seed):
    u0 = _make_profile(params)
    ys = np.linspace(0.1, 10.0, 50)
    worst = 0.0
    for k in (1, 2, 3):
        f_low = (lambda y: u0.value(y)) if k == 1 \
            else (lambda y, kk=k: u0.derivative(y, kk - 1))
        h = 2e-5 * np.maximum(ys, 1.0)
        fd = (f_low(ys + h) - f_low(ys - h)) / (2 * h)
        an = u0.derivative(ys, k)
        rel = np.max(np.abs(fd - an)
                     / np.maximum(np.abs(an), 1e-10))
        worst = max(worst, float(rel))
    info = prof.inflection_data(u0)
    regime = prof.AssumptionRegime.GAMMA_ABOVE_HALF \
        if params["regime"] == "above" \
        else prof.AssumptionRegime.GAMMA_BELOW_HALF
    rep = prof.check_assumptions(u0, regime)
    rows = [(p, info.inflection_value, lim)
            for p, lim in zip(info.inflection_points,
                              info.limits_at_inflections)]
    art = _write_csv(os.path.join(outdir, "inflections.csv"),
                     ["y_inflection", "inflection_value", "k_limit"],
                     rows)
    passed = worst <= 1e-6 and (rep.passed == (params["expect_pass"] != 0))
    return RunReport("profile-check", passed,
                     {"fd_rel_err": worst, "kplus": info.kplus,
                      "assumptions_pass": rep.passed}, [art])


PROFILE_CHECK_KEYS = dict(PROFILE_KEYS, **{
    "regime": (str, "above", "above | below (gamma vs 1/2)"),
    "expect_pass": (int, 1, "expected assumption-check outcome"),
})


def run_certify(params, outdir, seed):
    u0 = _make_profile(params)
    try:
        c = cert.certify(u0)
        row = (u0.name, c.eta0, c.n, c.q_value, c.y0, c.q_at_y0,
               c.q_prime_at_y0, c.min_eig, c.passed)
        passed = c.passed
        metrics = {"eta0": c.eta0, "q_value": c.q_value,
                   "min_eig": c.min_eig}
    except cert.CertificateError as e:
        row = (u0.name, "", "", "", "", "", "", "", False)
        passed = params.get("expect_fail", 0) != 0
        metrics = {"error": str(e)}
    art = _write_csv(os.path.join(outdir, "certificate.csv"),
                     ["profile", "eta0", "n", "q_value", "y0", "q_at_y0",
                      "q_prime_at_y0", "min_eig", "pass"], [row])
    return RunReport("certify", passed, metrics, [art])


CERTIFY_KEYS = dict(PROFILE_KEYS, **{
    "expect_fail": (int, 0, "1 if the certificate should fail"),
})


def run_dispersion(params, outdir, seed):
    u0 = _make_profile(params)
    kmin, kmax, nk = params["k_min"], params["k_max"], int(params["n_k"])
    k_grid = np.unique(np.concatenate([
        np.linspace(kmin, 0.32 * kmax, max(nk - nk // 4, 16)),
        np.linspace(0.38 * kmax, kmax, nk // 4)]))
    curve = rayleigh.scan_sigma(u0, k_grid)
    rows = []
    for k, s, m in zip(curve.k_values, curve.sigma_values, curve.modes):
        if m is None:
            rows.append((k, 0.0, "", "", "", False))
        else:
            rows.append((k, s, m.phase_speed.real, m.phase_speed.imag,
                         m.residual, True))
    art1 = _write_csv(os.path.join(outdir, "dispersion.csv"),
                      ["k", "sigma", "re_c", "im_c", "residual", "found"],
                      rows)
    arts = [art1]
    i0 = int(np.argmax(curve.sigma_values))
    if curve.modes[i0] is not None:
        m = curve.modes[i0]
        stride = max(1, len(m.y_grid) // 2000)
        art2 = _write_csv(
            os.path.join(outdir, "peak_mode.csv"),
            ["y", "re_phi", "im_phi"],
            [(y, p.real, p.imag) for y, p in
             zip(m.y_grid[::stride], m.eigenfunction[::stride])])
        arts.append(art2)
    passed = curve.sigma0 > 0 if params["expect_unstable"] else True
    return RunReport("dispersion", passed,
                     {"k0": curve.k0, "sigma0": curve.sigma0,
                      "n_unstable": int(np.sum(curve.sigma_values > 0))},
                     arts)


DISPERSION_KEYS = dict(PROFILE_KEYS, **{
    "k_min": (float, 0.05, ""),
    "k_max": (float, 5.0, ""),
    "n_k": (int, 32, "wavenumber samples (>= 20)"),
    "expect_unstable": (int, 1, "require sigma0 > 0"),
})


def run_growth_oracle(params, outdir, seed):
    u0 = _make_profile(params)
    kwargs = {"seed": int(seed)}
    if params["t_final"] > 0:
        kwargs["T"] = params["t_final"]
    else:
        kwargs["sigma_expected"] = params["sigma_expected"]
    slope = rayleigh.growth_oracle(u0, params["k"], dt=params["dt"],
                                   **kwargs)
    rows = [(params["k"], slope, params["sigma_expected"])]
    art = _write_csv(os.path.join(outdir, "growth_oracle.csv"),
                     ["k", "fitted_slope", "sigma_expected"], rows)
    sig = params["sigma_expected"]
    passed = True if sig <= 0 else abs(slope - sig) / sig <= 0.05
    return RunReport("growth-oracle", passed, {"slope": slope}, [art])


ORACLE_KEYS = dict(PROFILE_KEYS, **{
    "k": (float, 0.66, "wavenumber"),
    "dt": (float, 0.01, "time step"),
    "t_final": (float, 0.0, "integration horizon (0: from sigma)"),
    "sigma_expected": (float, 0.0345, "reference growth rate"),
})


def run_plan(params, outdir, seed):
    plan = planner.build_plan(str(params["gamma"]), int(params["n_big"]),
                              int(params["m_terms"]))
    rows = []
    for j, kj in enumerate(plan.k_table):
        o_int = plan.N + Fraction(j, 2 ** plan.n)
        o_bdr = o_int + plan.amplitude_a
        rows.append((j, str(kj), str(o_int), str(o_bdr)))
    art = _write_csv(os.path.join(outdir, "order_table.csv"),
                     ["j", "k_j", "nu_order_uI", "nu_order_ub"], rows)
    dump = os.path.join(outdir, "plan.txt")
    with open(dump, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"gamma      = {plan.gamma}\n")
        f.write(f"N, M, n    = {plan.N}, {plan.M}, {plan.n}\n")
        f.write(f"theta      = {plan.theta}\n")
        f.write(f"amplitude  = {plan.amplitude_a}\n")
        f.write(f"regime     = {plan.regime.value}\n")
        f.write(f"P          = {plan.p_order}\n")
        for key, val in plan.remainder_orders.items():
            f.write(f"{key:<20s} = {val}\n")
        for note in plan.notes:
            f.write(f"note: {note}\n")
    return RunReport("plan", True,
                     {"theta": str(plan.theta), "n": plan.n,
                      "regime": plan.regime.value}, [art, dump])


PLAN_KEYS = {
    "gamma": (str, "1", "slip exponent (rational string accepted)"),
    "n_big": (int, 1, "initial perturbation order N"),
    "m_terms": (int, 3, "cascade depth M"),
}


def run_instability_time(params, outdir, seed):
    th = Fraction(str(params["theta"]))
    rows = []
    for e in _floats(params["nu_exponents"]):
        nu = 10.0 ** (-e)
        it = planner.instability_time(nu, th, int(params["n_big"]),
                                      params["sigma0"], params["tau"])
        rows.append((nu, it.t_threshold, it.t_final, it.sqrt_nu_t,
                     it.residual))
    art = _write_csv(os.path.join(outdir, "instability_time.csv"),
                     ["nu", "t_threshold", "t_final", "sqrt_nu_t",
                      "residual"], rows)
    worst = max(r[4] for r in rows)
    return RunReport("instability-time", worst < 1e-12,
                     {"worst_residual": worst,
                      "last_sqrt_nu_t": rows[-1][3]}, [art])


TIME_KEYS = {
    "theta": (str, "1/4", "instability order"),
    "n_big": (int, 1, "initial perturbation order N"),
    "sigma0": (float, 1.0, "peak growth rate"),
    "tau": (float, 0.0, "safety offset subtracted from the time"),
    "nu_exponents": (str, "2,4,6,8", "nu = 10^-e sweep"),
}


def run_corrector(params, outdir, seed):
    u0 = _make_profile(params)
    mode = rayleigh.solve_mode(u0, params["k"],
                               complex(params["c_re"], params["c_im"]))
    c = planner.leading_corrector(mode, str(params["gamma"]),
                                  params["t"])
    rows = [(y, u.real, u.imag, v.real, v.imag)
            for y, u, v in zip(c.y_grid, c.u_b, c.v_b)]
    art = _write_csv(os.path.join(outdir, "corrector.csv"),
                     ["Y", "re_ub", "im_ub", "re_vb", "im_vb"], rows)
    cancel = abs(c.wall_value + c.wall_trace) / max(1.0,
                                                    abs(c.wall_trace))
    if c.regime is planner.BoundaryRegime.DIRICHLET:
        passed = cancel <= 1e-5 and c.decay_rate > 0
    else:
        passed = c.decay_rate > 0
    return RunReport("corrector", passed,
                     {"regime": c.regime.value, "wall_cancel": cancel,
                      "decay_rate": c.decay_rate,
                      "v_far_residual": c.v_far_residual}, [art])


CORRECTOR_KEYS = dict(PROFILE_KEYS, **{
    "gamma": (str, "1", "slip exponent"),
    "k": (float, 0.6565217391304348, "mode wavenumber"),
    "c_re": (float, 0.147, "phase-speed seed (real)"),
    "c_im": (float, 0.0525, "phase-speed seed (imag)"),
    "t": (float, 2.0, "evaluation time"),
})


def run_usbound_sweep(params, outdir, seed):
    u0 = _make_profile(params)
    nu_vals = [10.0 ** (-e) for e in _floats(params["nu_exponents"])]
    sw = planner.usbound_sweep(u0, str(params["gamma"]), nu_vals,
                               slope_tol=params["slope_tol"])
    rows = list(zip(sw.nu_values, sw.sup_ratios))
    art = _write_csv(os.path.join(outdir, "usbound.csv"),
                     ["nu", "sup_ratio"], rows)
    return RunReport("usbound-sweep", sw.pass_flat,
                     {"slope": sw.slope}, [art])


USBOUND_KEYS = dict(PROFILE_KEYS, **{
    "gamma": (str, "1", "slip exponent"),
    "nu_exponents": (str, "2,3,4,5", "nu = 10^-e sweep"),
    "slope_tol": (float, 0.05, "allowed trend"),
})


EXPERIMENTS = {
    "robin-rates": (RATE_KEYS, run_robin_rates),
    "erf-reference": (ERF_KEYS, run_erf_reference),
    "envelope": (ENVELOPE_KEYS, run_envelope),
    "gronwall": (GRONWALL_KEYS, run_gronwall),
    "profile-check": (PROFILE_CHECK_KEYS, run_profile_check),
    "certify": (CERTIFY_KEYS, run_certify),
    "dispersion": (DISPERSION_KEYS, run_dispersion),
    "growth-oracle": (ORACLE_KEYS, run_growth_oracle),
    "plan": (PLAN_KEYS, run_plan),
    "instability-time": (TIME_KEYS, run_instability_time),
    "corrector": (CORRECTOR_KEYS, run_corrector),
    "usbound-sweep": (USBOUND_KEYS, run_usbound_sweep),
}


# ----------------------------------------------------------------------
# Config handling and entry point
# ----------------------------------------------------------------------

def parse_config_file(path):
    values = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


def resolve_params(experiment, raw):
    schema, _ = EXPERIMENTS[experiment]
    params = {k: default for k, (_, default, _h) in schema.items()}
    for key, val in raw.items():
        if key not in schema:
            raise ConfigError(
                f"unknown key {key!r} for experiment {experiment!r} "
                f"(known: {', '.join(sorted(schema))})")
        parser = schema[key][0]
        try:
            params[key] = parser(val)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key!r}: {e}")
    return params


def run(experiment, raw_params, outdir, seed=1234) -> RunReport:
    """Dispatch one experiment; deterministic given the seed."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    params = resolve_params(experiment, raw_params)
    os.makedirs(outdir, exist_ok=True)
    _, runner = EXPERIMENTS[experiment]
    t0 = time.time()
    report = runner(params, outdir, seed)
    report.wall_time = time.time() - t0
    return report


def run_acceptance_suite(outdir=None, echo=print):
    """Run every acceptance criterion; returns (results, exit_code).

    Documented known deviations report as XFAIL and do not fail the
    suite; any other failure gives a nonzero exit code.
    """
    ctx = acceptance.AcceptanceContext()
    results = acceptance.run_all(ctx, echo=echo)
    if outdir is not None:
        os.makedirs(outdir, exist_ok=True)
        rows = [(r.cid, r.title, r.status, r.runtime,
                 "; ".join(f"{k}={_fmt(v)}" for k, v in r.details.items()))
                for r in results]
        _write_csv(os.path.join(outdir, "acceptance_summary.csv"),
                   ["id", "criterion", "status", "runtime_s", "details"],
                   rows)
    hard_fail = [r for r in results if not r.passed
                 and not r.known_deviation]
    n_pass = sum(r.passed for r in results)
    n_known = sum(1 for r in results if not r.passed and r.known_deviation)
    if echo is not None:
        echo(f"--- {n_pass}/{len(results)} passed, {n_known} documented "
             f"deviations, {len(hard_fail)} failures")
    return results, (0 if not hard_fail else 1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shearlab",
        description="Numerical experiments: Robin heat flows and "
                    "shear-flow spectral instability.")
    parser.add_argument("experiment",
                        choices=sorted(EXPERIMENTS) + ["acceptance"])
    parser.add_argument("--config", help="flat key = value file")
    parser.add_argument("--out", default=None, help="output directory "
                        "(default $SHEARLAB_OUT or ./shearlab_out)")
    parser.add_argument("--seed", type=int, default=1234)
    args, extra = parser.parse_known_args(argv)

    outdir = args.out or os.environ.get("SHEARLAB_OUT", "shearlab_out")
    outdir = os.path.join(outdir, args.experiment)

    try:
        raw = {}
        if args.config:
            raw.update(parse_config_file(args.config))
        if len(extra) % 2 != 0:
            raise ConfigError(f"dangling option in {extra!r}; use "
                              "--key value pairs")
        for flag, val in zip(extra[::2], extra[1::2]):
            if not flag.startswith("--"):
                raise ConfigError(f"expected --key, got {flag!r}")
            raw[flag[2:].replace("-", "_")] = val

        if args.experiment == "acceptance":
            if raw:
                raise ConfigError("acceptance takes no extra keys")
            _, code = run_acceptance_suite(outdir)
            return code

        report = run(args.experiment, raw, outdir, seed=args.seed)
        print(report.summary())
        for a in report.artifacts:
            print(f"  wrote {a}")
        return 0 if report.passed else 1
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
