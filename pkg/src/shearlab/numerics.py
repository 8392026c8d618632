"""Small shared numerical utilities: smooth cutoffs, finite-difference
weights on arbitrary nodes, panel quadrature, and log-log slope fits."""

from __future__ import annotations

import numpy as np


def glue(s):
    """C-infinity glue h(s) = exp(-1/s) for s > 0, 0 otherwise."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_step(u):
    """C-infinity monotone step: 0 for u <= 0, 1 for u >= 1.

    Built from the standard glue; symmetric, step(1/2) = 1/2 exactly.
    """
    u = np.asarray(u, dtype=float)
    a = glue(u)
    b = glue(1.0 - u)
    return a / (a + b)


def smooth_step_derivative(u):
    """Analytic derivative of smooth_step."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    ui = u[inside]
    a = np.exp(-1.0 / ui)
    b = np.exp(-1.0 / (1.0 - ui))
    da = a / ui**2
    db = -b / (1.0 - ui) ** 2
    out[inside] = (da * b - a * db) / (a + b) ** 2
    return out


def cutoff_chi(s):
    """Smooth cutoff equal to 1 on [0, 1] and 0 on [2, inf)."""
    s = np.asarray(s, dtype=float)
    return smooth_step(2.0 - s)


def cutoff_chi_derivative(s):
    s = np.asarray(s, dtype=float)
    return -smooth_step_derivative(2.0 - s)


def fd_weights(nodes, x0, order):
    """Finite-difference weights on arbitrary nodes (Fornberg's algorithm).

    Returns w such that sum(w * f(nodes)) approximates the order-th
    derivative of f at x0 with the maximal order of accuracy the node
    set allows.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    if order >= n:
        raise ValueError("need more nodes than the derivative order")
    w = np.zeros((n, order + 1))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, n):
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            for m in range(min(i, order), 0, -1):
                w[i, m] = c1 * (m * w[i - 1, m - 1] - c5 * w[i - 1, m]) / c2
            w[i, 0] = -c1 * c5 * w[i - 1, 0] / c2
            for m in range(min(i, order), 0, -1):
                w[j, m] = (c4 * w[j, m] - m * w[j, m - 1]) / c3
            w[j, 0] = c4 * w[j, 0] / c3
        c1 = c2
    return w[:, order]


def gauss_panels(lo, hi, n_panels, n_gauss=12):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    edges = np.linspace(lo, hi, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def loglog_slope(x, y, drop_extremes=True):
    """Least-squares slope of log(y) against log(x).

    Returns (slope, intercept, r2). With drop_extremes the first and
    last samples are excluded (pre-asymptotic / roundoff guard).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if drop_extremes and len(x) >= 5:
        x, y = x[1:-1], y[1:-1]
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((ly - fit) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def richardson_derivative(fn, x, h, order=1):
    """Richardson-extrapolated central finite difference of fn at x."""
    x = np.asarray(x, dtype=float)

    def central(step):
        if order == 1:
            return (fn(x + step) - fn(x - step)) / (2.0 * step)
        if order == 2:
            return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / step**2
        if order == 3:
            return (fn(x + 2 * step) - 2 * fn(x + step) + 2 * fn(x - step)
                    - fn(x - 2 * step)) / (2.0 * step**3)
        raise ValueError("order must be 1, 2 or 3")

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0
