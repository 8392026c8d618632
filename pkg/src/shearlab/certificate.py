"""Constructive variational certificate of shear-flow instability.

For a class-K+ profile (K(y) = -U''/(U - U0) bounded and positive, U0
the common inflection value) a negative value of the quadratic form

    Q(phi) = int_0^inf ( |phi'|^2 - K |phi|^2 )

over wall-vanishing test functions forces a negative eigenvalue of
-d_yy - K, and with it an unstable Rayleigh eigenvalue.  The certifying
family comes from the profile itself: with

    U_shift(y; eta) = U(y + y0 - eta) - U0,

the tail integral Q(eta) = int_eta^inf ( |U_shift'|^2 - K |U_shift|^2 )
satisfies Q(y0) = 0 and Q'(y0) = U'(y0)^2 > 0, so Q(eta0) < 0 slightly
below the inflection point.  Cutting off at scale n,

    w(y) = U_shift(y; eta) * chi(y / n)   for y >= eta,  0 below,

gives an admissible function with Q(w) -> Q(eta) as n grows.

Note the convention: K stays the UNSHIFTED ratio of the original
profile while U_shift translates.  With this reading the boundary and
interior terms reproduce Q'(y0) = U'(y0)^2 exactly (the shifted-K
reading would make Q constant in eta).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from . import profiles as prof
from .numerics import cutoff_chi, cutoff_chi_derivative, gauss_panels
from .profiles import ShearProfile, Y_MAX


class CertificateError(RuntimeError):
    """No negative-energy test function could be certified."""


class EigensolveError(RuntimeError):
    pass


@dataclass
class Certificate:
    eta0: float
    n: int
    q_value: float
    y0: float
    q_at_y0: float
    q_prime_at_y0: float
    min_eig: float

    @property
    def passed(self) -> bool:
        return self.q_value < 0 and self.min_eig < 0


def _profile_k(profile: ShearProfile, info=None):
    if info is None:
        info = prof.inflection_data(profile)
    if not info.inflection_points:
        raise CertificateError(
            f"profile {profile.name} has no inflection point")
    if not info.kplus:
        raise CertificateError(
            f"profile {profile.name} is not in the positive-K class")
    kfun = prof.k_evaluator(profile, info.inflection_points,
                            info.inflection_value,
                            info.limits_at_inflections)
    return info, kfun


def _graded_nodes(lo, hi, fine_until, fine_step=0.02, grow=1.06):
    """Panel edges: uniform spacing up to fine_until, geometric after."""
    edges = [lo]
    x = lo
    while x < min(fine_until, hi):
        x = min(x + fine_step * max(1.0, abs(x) / 4.0), hi)
        edges.append(x)
    step = fine_step * max(1.0, abs(x) / 4.0)
    while x < hi:
        step *= grow
        x = min(x + step, hi)
        edges.append(x)
    return np.asarray(edges)


_GLX, _GLW = np.polynomial.legendre.leggauss(12)


def _panel_quad(fun, edges):
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * _GLX[None, :]).ravel()
    wq = (half[:, None] * _GLW[None, :]).ravel()
    return float(np.sum(wq * fun(nodes)))


def quadratic_form(profile: ShearProfile, phi: Callable,
                   phi_prime: Optional[Callable] = None,
                   support: tuple = (0.0, Y_MAX), info=None) -> float:
    """Q(phi) = int ( |phi'|^2 - K phi^2 ) for wall-vanishing phi.

    phi (and phi_prime, if omitted it is differenced) must be
    negligible beyond the stated support.
    """
    wall = abs(float(np.atleast_1d(phi(np.array([0.0])))[0]))
    probe = np.abs(np.atleast_1d(phi(np.array([support[1]]))))
    if wall > 1e-8:
        raise ValueError(f"phi(0) = {wall:.2e}; needs a wall zero")
    info, kfun = _profile_k(profile, info)
    if phi_prime is None:
        h = 1e-6
        phi_prime = lambda y: (phi(y + h) - phi(y - h)) / (2.0 * h)

    lo, hi = support
    edges = _graded_nodes(max(lo, 1e-9), hi, fine_until=min(hi, 12.0))
    for p in info.inflection_points:
        if lo < p < hi:
            edges = np.unique(np.concatenate([edges, [p]]))

    def integrand(y):
        dp = np.asarray(phi_prime(y))
        pv = np.asarray(phi(y))
        return np.abs(dp) ** 2 - kfun(y) * np.abs(pv) ** 2

    return _panel_quad(integrand, edges)


def q_of_eta(profile: ShearProfile, eta: float, info=None,
             z_cut: float = 1500.0) -> float:
    """Tail energy Q(eta) of the shifted profile against the fixed K.

    After substituting z = y + y0 - eta the integral runs over
    [y0, inf); the far tail is truncated at z_cut with the first-order
    correction -(U_inf - U0) U'(z_cut + eta - y0) for the K term and a
    numerical remainder for the |U'|^2 term.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    info, kfun = _profile_k(profile, info)
    y0 = info.inflection_points[0]
    u0 = info.inflection_value
    delta = eta - y0

    def integrand(z):
        du = np.asarray(profile.derivative(z, 1))
        uv = np.asarray(profile.value(z)) - u0
        return du * du - kfun(z + delta) * uv * uv

    edges = _graded_nodes(y0, z_cut, fine_until=12.0)
    main = _panel_quad(integrand, edges)

    # analytic far-tail correction (see docstring)
    du_tail = lambda z: np.asarray(profile.derivative(z, 1)) ** 2
    tail_sq = _panel_quad(du_tail, _graded_nodes(z_cut, 4 * z_cut, z_cut))
    u_inf = profile.u_infinity
    du_at = float(np.atleast_1d(profile.derivative(z_cut + delta, 1))[0])
    return main + tail_sq - (u_inf - u0) * du_at


def shifted_profile_value(profile: ShearProfile, eta: float, y, info=None):
    """U(y + y0 - eta) - U0 with the flat-zero extension below the wall."""
    if info is None:
        info = prof.inflection_data(profile)
    y0 = info.inflection_points[0]
    u0 = info.inflection_value
    y = np.asarray(y, dtype=float)
    arg = np.maximum(y + y0 - eta, 0.0)   # flat profiles vanish below 0
    return np.asarray(profile.value(arg)) - u0


def build_test_function(profile: ShearProfile, eta: float, n: int,
                        info=None):
    """w(y) = shifted profile times the cutoff chi(y/n), zero below eta.

    Continuous at eta because the shifted profile vanishes there (its
    value is the inflection value).  Returns (w, w') callables; w is
    supported in [eta, 2n].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if info is None:
        info = prof.inflection_data(profile)
    y0 = info.inflection_points[0]
    u0 = info.inflection_value

    def w(y):
        y = np.asarray(y, dtype=float)
        out = shifted_profile_value(profile, eta, y, info) \
            * cutoff_chi(y / n)
        return np.where(y <= eta, 0.0, out)

    def wp(y):
        y = np.asarray(y, dtype=float)
        arg = np.maximum(y + y0 - eta, 0.0)
        du = np.asarray(profile.derivative(arg, 1))
        uv = np.asarray(profile.value(arg)) - u0
        out = du * cutoff_chi(y / n) \
            + uv * cutoff_chi_derivative(y / n) / n
        return np.where(y <= eta, 0.0, out)

    return w, wp


def min_eig_schrodinger(profile: ShearProfile, n_nodes: int = 4000,
                        info=None, y_max: float = Y_MAX,
                        _check: bool = True) -> float:
    """Smallest eigenvalue of -d_yy - K on [0, y_max], Dirichlet ends.

    K is the profile's inflection ratio; see min_eig_operator for the
    discretization and iteration details.
    """
    info, kfun = _profile_k(profile, info)
    return min_eig_operator(kfun, n_nodes=n_nodes, y_max=y_max,
                            _check=_check)


def min_eig_operator(kfun: Callable, n_nodes: int = 4000,
                     y_max: float = Y_MAX, _check: bool = True) -> float:
    """Smallest eigenvalue of -d_yy - kfun on [0, y_max], Dirichlet ends.

    Three-point stencil; inverse iteration from a shift below the
    spectrum (variational bound -sup K), then Rayleigh-quotient shifts.
    The returned value is the h^2-extrapolated pair (N, 2N); the
    half-resolution extrapolated pair must agree with it to 1e-4.
    """

    def smallest(n):
        h = y_max / n
        y = np.linspace(h, y_max - h, n - 1)
        diag = 2.0 / h**2 - np.asarray(kfun(y))
        off = -1.0 / h**2

        def solve_shifted(shift, v):
            ab = np.zeros((3, n - 1))
            ab[0, 1:] = off
            ab[1, :] = diag - shift
            ab[2, :-1] = off
            return solve_banded((1, 1), ab, v)

        shift = -float(np.max(np.asarray(kfun(y)))) - 1.0
        v = np.sin(np.pi * y / y_max)
        v /= np.linalg.norm(v)
        lam_old = np.inf
        for _ in range(60):
            v = solve_shifted(shift, v)
            v /= np.linalg.norm(v)
            lam = float(v @ (diag * v) + 2.0 * off * np.dot(v[1:], v[:-1]))
            if abs(lam - lam_old) < 1e-13 * max(1.0, abs(lam)):
                break
            lam_old = lam
        # Rayleigh-quotient polish
        for _ in range(3):
            try:
                v_new = solve_shifted(lam, v)
            except np.linalg.LinAlgError:
                break
            nv = np.linalg.norm(v_new)
            if not np.isfinite(nv) or nv == 0:
                break
            v = v_new / nv
            lam = float(v @ (diag * v) + 2.0 * off * np.dot(v[1:], v[:-1]))
        return lam

    lam_n = smallest(n_nodes)
    lam_2n = smallest(2 * n_nodes)
    lam = (4.0 * lam_2n - lam_n) / 3.0
    if _check:
        lam_half = smallest(n_nodes // 2)
        lam_prev = (4.0 * lam_n - lam_half) / 3.0
        if abs(lam - lam_prev) > 1e-4:
            raise EigensolveError(
                f"eigenvalue not grid-converged: {lam_prev:.6e} vs {lam:.6e}")
    return lam


def rayleigh_quotient(profile: ShearProfile, phi: Callable,
                      phi_prime: Optional[Callable] = None,
                      support: tuple = (0.0, Y_MAX), info=None) -> float:
    """Q(phi) / ||phi||_L2^2 (an upper bound for the smallest eigenvalue)."""
    q = quadratic_form(profile, phi, phi_prime, support, info)
    edges = _graded_nodes(max(support[0], 1e-9), support[1],
                          fine_until=min(support[1], 12.0))
    norm2 = _panel_quad(lambda y: np.abs(np.asarray(phi(y))) ** 2, edges)
    return q / norm2


def certify(profile: ShearProfile, tol_cert: float = 1e-6,
            info=None) -> Certificate:
    """Full certification pipeline for a class-K+ profile.

    Verifies Q(y0) ~ 0 and Q'(y0) > 0, walks eta down from y0 in steps
    y0/64 until Q(eta) < -tol_cert, escalates the cutoff scale n until
    the admissible test function has negative energy, and fills in the
    discretized operator's smallest eigenvalue.
    """
    info, kfun = _profile_k(profile, info)
    y0 = info.inflection_points[0]

    q0 = q_of_eta(profile, y0, info)
    # centered difference of Q at y0 with one Richardson sweep
    d = y0 / 200.0
    d1 = (q_of_eta(profile, y0 + d, info)
          - q_of_eta(profile, y0 - d, info)) / (2 * d)
    d2 = (q_of_eta(profile, y0 + d / 2, info)
          - q_of_eta(profile, y0 - d / 2, info)) / d
    qp = (4.0 * d2 - d1) / 3.0
    if qp <= 0:
        raise CertificateError(
            f"Q'(y0) = {qp:.3e} <= 0 contradicts the shift construction")
    if abs(q0) > 1e-6 * (1.0 + abs(qp)):
        raise CertificateError(f"Q(y0) = {q0:.3e} not numerically zero")

    eta0 = None
    q_eta = None
    for j in range(1, 64):
        eta = y0 - j * y0 / 64.0
        val = q_of_eta(profile, eta, info)
        if val < -tol_cert:
            eta0, q_eta = eta, val
            break
    if eta0 is None:
        raise CertificateError(
            "no eta with negative tail energy found below the inflection "
            "point (profile possibly stable or assumptions violated)")

    n = 32
    q_w = None
    while n <= 4096:
        w, wp = build_test_function(profile, eta0, n, info)
        q_w = quadratic_form(profile, w, wp, support=(0.0, 2.0 * n),
                             info=info)
        if q_w < 0:
            break
        n *= 2
    if q_w is None or q_w >= 0:
        raise CertificateError(
            f"cutoff escalation exhausted (last Q(w) = {q_w:.3e})")

    lam = min_eig_schrodinger(profile, info=info)
    return Certificate(eta0=float(eta0), n=int(n), q_value=float(q_w),
                       y0=float(y0), q_at_y0=float(q0),
                       q_prime_at_y0=float(qp), min_eig=float(lam))
